"""Acceptance criteria, one test each.

Every check records a PASS/FAIL line; the lines are printed in the pytest
terminal summary, or directly when this file is run as a script.
"""

import time

import numpy as np
import pytest

from eurcoh.fuzz import bound_fuzz
from eurcoh.infotheory import uncertainty_report
from eurcoh.qla import DensityMatrix, eig_hermitian
from eurcoh.states import bell_diagonal_state, mub_qubit
from eurcoh.sweep import P_GRID, THETA_GRID, SweepConfig, rows_to_csv, run_sweep
from eurcoh.tomography import (
    PoissonLikelihood,
    expected_counts,
    linear_reconstruct,
    monte_carlo_errors,
    simulate_counts,
    standard_settings,
)

TOL = 1e-9
RESULTS: dict[int, str] = {}

# states evaluated in criteria 1 and 3, reused by criterion 5
ENDPOINTS = [(0.0, 45.0), (1.0, 45.0)]
TIGHTNESS = [(p, 45.0) for p in P_GRID]


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    assert ok, RESULTS[n]


def random_density(rng, rank):
    z = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    m = z @ z.conj().T
    return m / np.trace(m).real


def test_criterion_01_endpoints():
    t0 = time.perf_counter()
    worst = 0.0
    for p, theta in ENDPOINTS:
        r = uncertainty_report(bell_diagonal_state(p, theta), mub_qubit())
        worst = max(worst, abs(r.elhs), abs(r.clhs - 3.0))
    dt = time.perf_counter() - t0
    record(1, worst <= TOL and dt < 1.0, f"max |ELHS-0|,|CLHS-3| = {worst:.2e}, {dt:.3f} s")


@pytest.fixture(scope="module")
def fuzz_consistent():
    t0 = time.perf_counter()
    summary = bound_fuzz(10_000, seed=2024, delta_variant="consistent")
    return summary, time.perf_counter() - t0


def test_criterion_02_fuzz(fuzz_consistent):
    s, dt = fuzz_consistent
    ok = s.violations == 0 and s.worst_margin >= -TOL and dt < 60.0
    record(2, ok, f"{s.n} states, {s.violations} violations, worst margin {s.worst_margin:.3e}, {dt:.1f} s")


def test_criterion_03_tightness():
    worst = 0.0
    for p, theta in TIGHTNESS:
        r = uncertainty_report(bell_diagonal_state(p, theta), mub_qubit())
        worst = max(worst, abs(r.erhs2 - r.elhs), abs(r.crhs2 - r.clhs))
    record(3, worst <= TOL, f"max gap over p grid at 45 deg = {worst:.2e}")


def test_criterion_04_as_printed_delta():
    r = uncertainty_report(bell_diagonal_state(1.0, 45.0), mub_qubit(), "as_printed")
    s = bound_fuzz(1, seed=0, delta_variant="as_printed")
    flagged = s.variant_inconsistent and any("VARIANT INCONSISTENCY" in line for line in s.lines())
    ok = abs(r.erhs2 - 2.0) <= TOL and abs(r.elhs) <= TOL and flagged
    record(4, ok, f"ERHS2 = {r.erhs2:.12g} > ELHS = {r.elhs:.3g}; fuzz flagged: {flagged}")


def test_criterion_05_identity(fuzz_consistent):
    worst = 0.0
    for p, theta in ENDPOINTS + TIGHTNESS:
        r = uncertainty_report(bell_diagonal_state(p, theta), mub_qubit())
        worst = max(worst, abs(r.elhs - r.clhs - 3.0 * r.s_a_given_b))
    worst = max(worst, fuzz_consistent[0].identity_residual)
    record(5, worst <= TOL, f"max |ELHS - CLHS - 3 S(A|B)| = {worst:.2e} (incl. fuzz states)")


def test_criterion_06_anticorrelation():
    rows = {r.theta_deg: r for r in run_sweep(SweepConfig("theta", (1.0,), THETA_GRID))}
    lo = [t for t in THETA_GRID if t <= 45.0]
    hi = [t for t in THETA_GRID if t >= 45.0]
    e_lo = [rows[t].elhs for t in lo]
    c_lo = [rows[t].clhs for t in lo]
    e_hi = [rows[t].elhs for t in hi]
    c_hi = [rows[t].clhs for t in hi]
    ok = (
        all(b <= a + TOL for a, b in zip(e_lo, e_lo[1:]))
        and all(b >= a - TOL for a, b in zip(c_lo, c_lo[1:]))
        and all(b >= a - TOL for a, b in zip(e_hi, e_hi[1:]))
        and all(b <= a + TOL for a, b in zip(c_hi, c_hi[1:]))
    )
    record(6, ok, "ELHS falls and CLHS rises on [0,45]; mirrored on [45,90]")


def test_criterion_07_tomography_fidelity():
    t0 = time.perf_counter()
    parts = []
    ok = True
    for name, (p, theta) in zip(("rho1", "rho2", "rho3", "rho4"),
                                [(1.0, 30.0), (0.0, 30.0), (1.0, 45.0), (0.0, 45.0)]):
        rep = monte_carlo_errors(bell_diagonal_state(p, theta), standard_settings(36), 1e4, 100, seed=11)
        mean, sd = rep.as_dict()["fidelity"]
        ok &= mean >= 0.995 and sd < 0.01 and rep.n_failed == 0
        parts.append(f"{name} {mean:.5f}+-{sd:.5f}")
    dt = time.perf_counter() - t0
    ok &= dt < 300.0
    record(7, ok, f"{', '.join(parts)}; {dt:.1f} s")


def test_criterion_08_noiseless_linear():
    rng = np.random.default_rng(8)
    settings = standard_settings(36)
    worst = 0.0
    for i in range(1000):
        rho = random_density(rng, 1 + i % 4)
        est = linear_reconstruct(expected_counts(DensityMatrix(rho, (2, 2)), settings, 1e4))
        worst = max(worst, float(np.max(np.abs(est.rho_hat.mat - rho))))
    record(8, worst <= TOL, f"1000 states, max-entry error {worst:.2e}")


def test_criterion_09_numerical_core():
    rng = np.random.default_rng(9)
    rec = uni = 0.0
    for _ in range(1000):
        z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        m = 0.5 * (z + z.conj().T)
        spec = eig_hermitian(m)
        rec = max(rec, float(np.max(np.abs(spec.reconstruct() - m))))
        uni = max(uni, float(np.max(np.abs(spec.vectors.conj().T @ spec.vectors - np.eye(4)))))

    grad_err = 0.0
    for i in range(100):
        rho = random_density(rng, 1 + i % 4)
        like = PoissonLikelihood(simulate_counts(DensityMatrix(rho, (2, 2)), None, 1e3, i))
        x = rng.normal(size=16)
        _, g = like.value_and_grad(x)
        h = 1e-6 * max(1.0, float(np.linalg.norm(x)))
        fd = np.array([(like.value(x + h * e) - like.value(x - h * e)) / (2 * h) for e in np.eye(16)])
        grad_err = max(grad_err, float(np.linalg.norm(g - fd) / np.linalg.norm(fd)))
    ok = rec <= TOL and uni <= TOL and grad_err <= 1e-5
    record(9, ok, f"reconstruction {rec:.1e}, unitarity {uni:.1e}, gradient rel. error {grad_err:.1e}")


def test_criterion_10_determinism(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        run_sweep(SweepConfig("theta", seed=42, output_path=str(path)))
    tomo = [SweepConfig("p", (45.0,), (0.0, 0.5, 1.0), "tomographic", mc_samples=3, seed=42) for _ in range(2)]
    tomo_text = [rows_to_csv(run_sweep(c), c.resolved()) for c in tomo]
    same = paths[0].read_bytes() == paths[1].read_bytes() and tomo_text[0] == tomo_text[1]
    record(10, same, "analytic and tomographic sweeps byte-identical across runs")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
