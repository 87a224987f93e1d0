//! Dense complex polynomials and their roots.
//!
//! Coefficients are stored in ascending order: `c[0] + c[1]·s + … + c[n]·sⁿ`.
//! Degrees 1 and 2 use closed forms; higher degrees use the eigenvalues of
//! the companion matrix followed by a few Newton polishing steps.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<C64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(C64::new(0.0, 0.0));
        }
        Poly { coeffs }
    }

    pub fn constant(c: C64) -> Self {
        Poly::new(vec![c])
    }

    /// `s − root`
    pub fn linear(root: C64) -> Self {
        Poly::new(vec![-root, C64::new(1.0, 0.0)])
    }

    /// Π (s − rᵢ)
    pub fn from_roots<I: IntoIterator<Item = C64>>(roots: I) -> Self {
        roots
            .into_iter()
            .fold(Poly::constant(C64::new(1.0, 0.0)), |acc, r| acc.mul(&Poly::linear(r)))
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, s: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * s + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::constant(C64::new(0.0, 0.0));
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as f64)
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = C64::new(0.0, 0.0);
        Poly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(zero)
                        + other.coeffs.get(i).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }

    pub fn scale(&self, factor: C64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// All roots, unordered. Fails only for the zero or constant polynomial.
    pub fn roots(&self) -> Result<Vec<C64>> {
        let n = self.degree();
        if n == 0 {
            return Err(Error::InvalidParameter(
                "constant polynomial has no roots".into(),
            ));
        }
        let lead = self.coeffs[n];
        let monic: Vec<C64> = self.coeffs.iter().map(|c| c / lead).collect();
        let raw = match n {
            1 => vec![-monic[0]],
            2 => quadratic_roots(monic[1], monic[0]).to_vec(),
            _ => companion_roots(&monic)?,
        };
        let deriv = self.derivative();
        Ok(raw.into_iter().map(|r| self.polish(&deriv, r)).collect())
    }

    fn polish(&self, deriv: &Poly, mut root: C64) -> C64 {
        let mut best = self.eval(root).norm();
        for _ in 0..8 {
            let d = deriv.eval(root);
            if d.norm() == 0.0 {
                break;
            }
            let next = root - self.eval(root) / d;
            let r = self.eval(next).norm();
            if !(r < best) {
                break;
            }
            best = r;
            root = next;
        }
        root
    }
}

/// Roots of `s² + b·s + c`, avoiding cancellation.
pub fn quadratic_roots(b: C64, c: C64) -> [C64; 2] {
    let disc = (b * b - c * 4.0).sqrt();
    // pick the sign that makes |b + sign·disc| large
    let q = if (b.conj() * disc).re >= 0.0 {
        -(b + disc) / 2.0
    } else {
        -(b - disc) / 2.0
    };
    if q.norm() == 0.0 {
        return [C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
    }
    [q, c / q]
}

fn companion_roots(monic: &[C64]) -> Result<Vec<C64>> {
    let n = monic.len() - 1;
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -monic[i];
    }
    let schur = m.schur();
    let eig = schur.eigenvalues().ok_or(Error::RootNotConverged {
        residual: f64::NAN,
        tolerance: 0.0,
    })?;
    Ok(eig.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn roots_of_known_cubic() {
        let want = [c(1.0, 0.5), c(-2.0, 0.1), c(0.3, -1.0)];
        let p = Poly::from_roots(want);
        let mut got = p.roots().unwrap();
        got.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        let mut want = want.to_vec();
        want.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < 1e-12, "{g} vs {w}");
        }
    }

    #[test]
    fn quintic_with_close_roots() {
        let want = [c(0.0, 0.1), c(0.01, 0.1), c(1.0, 0.1), c(2.0, 0.3), c(-1.0, 0.2)];
        let p = Poly::from_roots(want);
        for r in p.roots().unwrap() {
            assert!(p.eval(r).norm() < 1e-12);
        }
    }

    #[test]
    fn quadratic_closed_form_is_stable() {
        // roots 1e8 and 1e-8
        let [a, b] = quadratic_roots(c(-(1e8 + 1e-8), 0.0), c(1.0, 0.0));
        let (big, small) = if a.norm() > b.norm() { (a, b) } else { (b, a) };
        assert!((big.re - 1e8).abs() / 1e8 < 1e-15);
        assert!((small.re - 1e-8).abs() / 1e-8 < 1e-12);
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let p = Poly::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(p.degree(), 1);
        assert!(Poly::new(vec![c(3.0, 0.0)]).roots().is_err());
    }
}
