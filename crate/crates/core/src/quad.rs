//! Adaptive Gauss–Kronrod (7/15) quadrature for complex-valued integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::C64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the 7-point rule (nodes XGK[1], XGK[3], XGK[5], XGK[7])
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: C64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

struct Interval {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let err = ((kronrod - gauss) * half).norm();
    (kronrod * half, err)
}

/// Integrate `f` over `[a, b]`, splitting first at the given interior
/// breakpoints, until the summed error estimate is below
/// `max(abs_tol, rel_tol·|I|)` or `max_intervals` is reached.
pub fn integrate<F: Fn(f64) -> C64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> QuadResult {
    let mut cuts: Vec<f64> = std::iter::once(a)
        .chain(breakpoints.iter().copied().filter(|p| *p > a && *p < b))
        .chain(std::iter::once(b))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in cuts.windows(2) {
        let (value, error) = gk15(&f, w[0], w[1]);
        evaluations += 15;
        heap.push(Interval { a: w[0], b: w[1], value, error });
    }
    loop {
        let total: C64 = heap.iter().map(|i| i.value).sum();
        let err: f64 = heap.iter().map(|i| i.error).sum();
        let target = abs_tol.max(rel_tol * total.norm());
        if err <= target || heap.len() >= max_intervals {
            return QuadResult { value: total, error: err, evaluations, converged: err <= target };
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            return QuadResult { value: total, error: err, evaluations, converged: false };
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk15(&f, lo, hi);
            evaluations += 15;
            heap.push(Interval { a: lo, b: hi, value, error });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| C64::new(x.powi(5) - 3.0 * x * x, x), -1.0, 2.0, &[], 1e-14, 0.0, 10);
        let want = C64::new((64.0 - 1.0) / 6.0 - (8.0 + 1.0), 1.5);
        assert!((r.value - want).norm() < 1e-13);
        assert!(r.converged);
    }

    #[test]
    fn lorentzian_resolves_narrow_peak() {
        let eta = 1e-3;
        let r = integrate(|x| C64::new(eta / (x * x + eta * eta), 0.0), -1.0, 1.0, &[0.0], 1e-10, 0.0, 2000);
        let want = 2.0 * (1.0 / eta).atan();
        assert!((r.value.re - want).abs() < 1e-9, "{} vs {}", r.value.re, want);
    }

    #[test]
    fn oscillatory_integrand() {
        let r = integrate(|x| C64::new(0.0, x).exp(), 0.0, 100.0, &[], 1e-10, 0.0, 5000);
        let want = (C64::new(0.0, 100.0).exp() - 1.0) / C64::new(0.0, 1.0);
        assert!((r.value - want).norm() < 1e-9);
    }
}
