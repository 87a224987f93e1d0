"""Smoke test for the fano_memory_py extension.

Build and install first:
    pip install maturin
    maturin build --release -m crates/py/Cargo.toml -o dist && pip install dist/*.whl
"""

import math

import fano_memory_py as fm


def main():
    fig3 = fm.Scenario.preset("fig3")
    ideal = fm.Scenario.preset("ideal")

    r = fig3.response(1e4)
    assert abs(r["beta1"] / math.pi - 1) < 1e-2, r

    ks = [-0.05, 0.0, 0.05]
    branches = ideal.dispersion(ks)
    assert len(branches) == 3
    bp = ideal.branch_point()
    assert abs(bp["vg_plus"] - 1e-4) < 1e-7, bp
    assert abs(bp["chi_plus"]) < 1e-12

    regime = fig3.memory_regime()
    assert abs(regime["vg_plus"] / fig3.branch_point()["vg_plus"] - 1) < 0.02

    checks = fig3.check()
    assert checks["resonance_overlap"][2] is False

    out = ideal.simulate()
    assert out["fidelity"] > 0.999, out["fidelity"]
    assert len(out["z"]) == len(out["output"])
    assert fig3.simulate("expansion")["fidelity"] > 0.99

    try:
        fm.Scenario.from_toml("[units]\nsystem = 'SI'\n")
    except ValueError:
        pass
    else:
        raise AssertionError("bad units accepted")

    bad_pulse = """
[units]
system = "scaled"
[[resonances]]
e = 0.0
gamma = 0.2
q = 7.0
[[resonances]]
e = 1.0
gamma = 0.2
q = 4.0
[schedule]
retrieve = 1.0
[pulse]
points = 32
width = 0.5
length = 64.0
"""
    try:
        fm.Scenario.from_toml(bad_pulse).simulate()
    except ArithmeticError:
        pass
    else:
        raise AssertionError("unresolved pulse accepted")

    print("smoke test ok: fidelity", out["fidelity"])


if __name__ == "__main__":
    main()
