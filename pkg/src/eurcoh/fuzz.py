"""Random-state checks of the uncertainty lower bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .infotheory import pairwise_shannon_bound, uncertainty_report
from .qla import DensityMatrix, partial_trace
from .states import bell_diagonal_state, mub_qubit

INEQUALITIES = ("eur", "cur", "eur_holevo", "cur_holevo")
FUZZ_TOL = 1e-9


def random_two_qubit_state(rng: np.random.Generator, k: int) -> DensityMatrix:
    """Reduced state of a Haar-random pure state on C^2 x C^2 x C^k."""
    z = rng.normal(size=(4, k)) + 1j * rng.normal(size=(4, k))
    z /= np.linalg.norm(z)
    return DensityMatrix(z @ z.conj().T, (2, 2))


def random_product_state(rng: np.random.Generator) -> DensityMatrix:
    kets = []
    for _ in range(2):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        kets.append(v / np.linalg.norm(v))
    return DensityMatrix.from_ket(np.kron(*kets), (2, 2))


@dataclass
class FuzzSummary:
    n: int
    delta_variant: str
    violations: int = 0
    per_inequality: dict[str, int] = field(default_factory=lambda: {k: 0 for k in INEQUALITIES})
    worst_margin: float = math.inf
    worst_inequality: str = ""
    worst_state: np.ndarray | None = None
    pairwise_slack_worst: float = math.inf
    identity_residual: float = 0.0
    anchor_margins: dict[str, float] = field(default_factory=dict)

    @property
    def variant_inconsistent(self) -> bool:
        """True when the maximally entangled anchor state breaks a bound."""
        return any(v < -FUZZ_TOL for v in self.anchor_margins.values())

    def lines(self) -> list[str]:
        out = [
            f"states evaluated     : {self.n}",
            f"delta variant        : {self.delta_variant}",
            f"violations (>{FUZZ_TOL:g}) : {self.violations}",
        ]
        out += [f"  {k:<18} : {v}" for k, v in self.per_inequality.items()]
        out.append(f"worst margin         : {self.worst_margin:.12g} ({self.worst_inequality})")
        out.append(f"pairwise MU slack    : {self.pairwise_slack_worst:.12g}")
        out.append(f"max |E - C - 3S(A|B)|: {self.identity_residual:.3g}")
        out.append("anchor rho(p=1, theta=45) margins:")
        out += [f"  {k:<18} : {v:.12g}" for k, v in self.anchor_margins.items()]
        if self.variant_inconsistent:
            bad = min(self.anchor_margins.values())
            out.append(
                f"VARIANT INCONSISTENCY: the maximally entangled state violates the "
                f"{self.delta_variant} bound by {-bad:.12g} bits"
            )
        if self.worst_state is not None and self.violations:
            out.append("worst-case state (real | imag):")
            for row in self.worst_state:
                out.append("  " + " ".join(f"{z.real:+.6f}{z.imag:+.6f}j" for z in row))
        return out


def bound_fuzz(
    n: int,
    seed: int = 0,
    delta_variant: str = "consistent",
    ranks: tuple[int, ...] = (1, 2, 4),
    product: bool = False,
) -> FuzzSummary:
    """Draw ``n`` random two-qubit states and check all four lower bounds on each.

    Ancilla dimension k is drawn uniformly from ``ranks`` per state; with
    ``product=True`` only separable pure states are drawn. The maximally
    entangled state is always evaluated as an extra anchor and reported
    separately from the random statistics.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    mubs = mub_qubit()
    summary = FuzzSummary(n, delta_variant)
    for _ in range(n):
        if product:
            rho = random_product_state(rng)
        else:
            rho = random_two_qubit_state(rng, int(rng.choice(ranks)))
        rep = uncertainty_report(rho, mubs, delta_variant)
        bad = False
        for name, margin in rep.margins().items():
            if margin < -FUZZ_TOL:
                summary.per_inequality[name] += 1
                bad = True
            if margin < summary.worst_margin:
                summary.worst_margin = margin
                summary.worst_inequality = name
                summary.worst_state = rho.mat.copy()
        summary.violations += bad
        summary.identity_residual = max(
            summary.identity_residual, abs(rep.elhs - rep.clhs - len(mubs) * rep.s_a_given_b)
        )
        rho_a = partial_trace(rho, 0)
        for i in range(len(mubs)):
            for j in range(i + 1, len(mubs)):
                slack = pairwise_shannon_bound(rho_a, mubs[i], mubs[j])
                summary.pairwise_slack_worst = min(summary.pairwise_slack_worst, slack)

    anchor = uncertainty_report(bell_diagonal_state(1.0, 45.0), mubs, delta_variant)
    summary.anchor_margins = anchor.margins()
    return summary
