"""Monte Carlo calibration of the simulated tomography.

For each state, repeats simulate -> reconstruct -> report and prints the mean
and spread of the fidelity and the bound quantities, for linear inversion and
maximum likelihood across several exposures.

    python3 scripts/calibrate_tomography.py --samples 100 --exposures 1e3,1e4,1e5
"""

import argparse
import time
from dataclasses import dataclass, field

import numpy as np

from eurcoh.infotheory import uncertainty_report
from eurcoh.qla import DensityMatrix, eig_hermitian
from eurcoh.states import bell_diagonal_state
from eurcoh.tomography import (
    derive_seed,
    fidelity,
    linear_reconstruct,
    mle_reconstruct,
    simulate_counts,
    standard_settings,
)


@dataclass(frozen=True)
class Calibration:
    states: tuple = ((1.0, 30.0), (0.0, 30.0), (1.0, 45.0), (0.0, 45.0), (0.5, 45.0))
    exposures: tuple = (1e3, 1e4, 1e5)
    samples: int = 100
    settings: int = 36
    seed: int = 0
    quantities: tuple = field(default=("elhs", "clhs", "erhs2", "crhs2"))


def clip_to_states(rho: DensityMatrix) -> DensityMatrix:
    spec = eig_hermitian(rho.mat)
    v = np.clip(spec.values, 0.0, None)
    return DensityMatrix((spec.vectors * (v / v.sum())) @ spec.vectors.conj().T, (2, 2))


def run(cal: Calibration) -> None:
    settings = standard_settings(cal.settings)
    print(f"{'p':>4} {'theta':>5} {'exposure':>9} {'method':>6} {'F mean':>9} {'F std':>8} "
          + " ".join(f"{q + ' bias':>11}" for q in cal.quantities))
    for si, (p, theta) in enumerate(cal.states):
        truth = bell_diagonal_state(p, theta)
        exact = uncertainty_report(truth)
        for ei, exposure in enumerate(cal.exposures):
            stats = {"linear": [], "mle": []}
            for i in range(cal.samples):
                table = simulate_counts(truth, settings, exposure, derive_seed(cal.seed, si, ei, i))
                for name, est in (("linear", clip_to_states(linear_reconstruct(table).rho_hat)),
                                  ("mle", mle_reconstruct(table).rho_hat)):
                    rep = uncertainty_report(est)
                    stats[name].append([fidelity(est, truth)]
                                       + [getattr(rep, q) - getattr(exact, q) for q in cal.quantities])
            for name, vals in stats.items():
                arr = np.array(vals)
                print(f"{p:4g} {theta:5g} {exposure:9.0e} {name:>6} {arr[:, 0].mean():9.6f} "
                      f"{arr[:, 0].std(ddof=1):8.6f} " + " ".join(f"{b:11.5f}" for b in arr[:, 1:].mean(axis=0)))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description="Monte Carlo calibration of the simulated tomography.")
    ap.add_argument("--samples", type=int, default=Calibration.samples)
    ap.add_argument("--exposures", default="1e3,1e4,1e5")
    ap.add_argument("--settings", type=int, choices=(16, 36), default=36)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    t0 = time.perf_counter()
    run(Calibration(exposures=tuple(float(e) for e in a.exposures.split(",")),
                    samples=a.samples, settings=a.settings, seed=a.seed))
    print(f"done in {time.perf_counter() - t0:.1f} s")
