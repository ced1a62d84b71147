"""Entropies, coherence measures and the entropic / coherence uncertainty
bounds for local measurements on subsystem A with quantum memory B.

All logarithms are base 2.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Literal, NamedTuple, Sequence

import numpy as np

from .errors import DimensionMismatch, NotAProbabilityVector
from .measurement import MeasurementOutcomeEnsemble, dephase_global, measure_local
from .qla import DensityMatrix, eigvals_hermitian, partial_trace
from .states import ProjectiveMeasurement, mub_qubit

DeltaVariant = Literal["consistent", "as_printed"]
DELTA_VARIANTS: tuple[str, ...] = ("consistent", "as_printed")
EIG_ZERO = 1e-15
MUB_TOL = 1e-9


def _entropy_of_eigs(vals) -> float:
    s = 0.0
    for lam in vals:
        if lam > EIG_ZERO:
            s -= lam * math.log2(lam)
    return max(float(s), 0.0)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return _entropy_of_eigs(eigvals_hermitian(mat))


def shannon_entropy(p: Sequence[float]) -> float:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise NotAProbabilityVector("expected a non-empty 1-d probability vector")
    if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
        raise NotAProbabilityVector(f"not a probability vector: {p}")
    return _entropy_of_eigs(p)


def conditional_entropy(rho_ab: DensityMatrix) -> float:
    """S(A|B) = S(AB) - S(B); negative values witness entanglement."""
    return von_neumann_entropy(rho_ab) - von_neumann_entropy(partial_trace(rho_ab, 1))


def mutual_information(rho_ab: DensityMatrix) -> float:
    s_a = von_neumann_entropy(partial_trace(rho_ab, 0))
    s_b = von_neumann_entropy(partial_trace(rho_ab, 1))
    return s_a + s_b - von_neumann_entropy(rho_ab)


def holevo_quantity(ens: MeasurementOutcomeEnsemble, rho_b: DensityMatrix) -> float:
    """S(rho_B) - sum_i p_i S(rho_B|i): information about the outcome held in B."""
    return von_neumann_entropy(rho_b) - sum(p * von_neumann_entropy(r) for p, r in ens.nonzero())


def relative_entropy_coherence(rho: DensityMatrix, basis) -> float:
    return von_neumann_entropy(dephase_global(rho, basis)) - von_neumann_entropy(rho)


def unilateral_coherence(rho_ab: DensityMatrix, m: ProjectiveMeasurement) -> float:
    """S(rho_MB) - S(rho_AB) for a measurement M on subsystem A."""
    return von_neumann_entropy(measure_local(rho_ab, m).dephased_joint) - von_neumann_entropy(rho_ab)


class OverlapFactors(NamedTuple):
    b: float
    c: float


def _overlap(m1: ProjectiveMeasurement, m2: ProjectiveMeasurement) -> np.ndarray:
    u, v = m1.basis(), m2.basis()
    return np.array([[abs(np.vdot(a, b)) ** 2 for b in v] for a in u])


def overlap_factor_b(measurements: Sequence[ProjectiveMeasurement]) -> OverlapFactors:
    """State-independent overlap constants for a list of measurements.

    ``c`` is the largest overlap between eigenvectors of the first two
    measurements. ``b`` nests a max over the first index, a sum over the middle
    indices and a max over the last, taken over every index tuple in the given
    measurement order.
    """
    if len(measurements) < 2:
        raise ValueError("need at least two measurements")
    d = measurements[0].dim
    if any(m.dim != d for m in measurements):
        raise DimensionMismatch("measurements act on different dimensions")
    n = len(measurements)
    ov = [_overlap(measurements[k], measurements[k + 1]) for k in range(n - 1)]
    c = float(ov[0].max())
    first = ov[0].max(axis=0)  # max over i_1, indexed by i_2

    best = 0.0
    for i_last in range(d):
        total = 0.0
        for mid in itertools.product(range(d), repeat=n - 2):
            idx = (*mid, i_last)  # i_2 .. i_N
            term = first[idx[0]]
            for k in range(1, n - 1):
                term *= ov[k][idx[k - 1], idx[k]]
            total += term
        best = max(best, total)
    return OverlapFactors(float(best), c)


def is_complete_mub(measurements: Sequence[ProjectiveMeasurement], tol: float = MUB_TOL) -> bool:
    d = measurements[0].dim
    if len(measurements) != d + 1 or any(m.dim != d for m in measurements):
        return False
    for m1, m2 in itertools.combinations(measurements, 2):
        if np.max(np.abs(_overlap(m1, m2) - 1.0 / d)) > tol:
            return False
    return True


@dataclass(frozen=True)
class UncertaintyReport:
    """Both sides of the entropic (E*) and coherence (C*) uncertainty relations.

    ``erhs1``/``crhs1`` are the plain lower bounds, ``erhs2``/``crhs2`` add
    ``max(0, delta)``. Everything is in bits.
    """

    per_measurement_conditional_entropy: tuple[float, ...]
    per_measurement_coherence: tuple[float, ...]
    holevo: tuple[float, ...]
    elhs: float
    erhs1: float
    erhs2: float
    clhs: float
    crhs1: float
    crhs2: float
    s_ab: float
    s_a: float
    s_b: float
    s_a_given_b: float
    i_ab: float
    delta: float
    delta_variant: str
    log_overlap: float
    complete_mub: bool
    n_measurements: int
    labels: tuple[str, ...] = field(default=())

    def margins(self) -> dict[str, float]:
        """lhs - rhs for each of the four inequalities (negative = violated)."""
        return {
            "eur": self.elhs - self.erhs1,
            "cur": self.clhs - self.crhs1,
            "eur_holevo": self.elhs - self.erhs2,
            "cur_holevo": self.clhs - self.crhs2,
        }

    def violations(self, tol: float = 1e-9) -> dict[str, float]:
        return {k: v for k, v in self.margins().items() if v < -tol}

    def scalars(self) -> dict[str, float]:
        out = {k: v for k, v in asdict(self).items() if isinstance(v, float)}
        return out


def delta_term(i_ab: float, holevos: Sequence[float], variant: str) -> float:
    """Holevo / mutual-information correction to the lower bounds.

    ``consistent`` weights I(A:B) by N - 1 (= d for a complete MUB set);
    ``as_printed`` weights it by N (= d + 1), which overshoots for entangled
    states and is kept only for comparison.
    """
    n = len(holevos)
    if variant == "consistent":
        weight = n - 1
    elif variant == "as_printed":
        weight = n
    else:
        raise ValueError(f"unknown delta variant {variant!r}")
    return weight * i_ab - sum(holevos)


def uncertainty_report(
    rho_ab: DensityMatrix,
    measurements: Sequence[ProjectiveMeasurement] | None = None,
    delta_variant: str = "consistent",
) -> UncertaintyReport:
    if measurements is None:
        measurements = mub_qubit()
    measurements = list(measurements)
    if len(measurements) < 2:
        raise ValueError("need at least two measurements")
    if len(rho_ab.dims) != 2:
        raise DimensionMismatch(f"expected a bipartite state, got dims {rho_ab.dims}")
    d = rho_ab.dims[0]
    n = len(measurements)

    rho_a = partial_trace(rho_ab, 0)
    rho_b = partial_trace(rho_ab, 1)
    s_ab = von_neumann_entropy(rho_ab)
    s_a = von_neumann_entropy(rho_a)
    s_b = von_neumann_entropy(rho_b)
    s_a_given_b = s_ab - s_b
    i_ab = s_a + s_b - s_ab

    cond, coh, hol = [], [], []
    for m in measurements:
        ens = measure_local(rho_ab, m)
        s_mb = von_neumann_entropy(ens.dephased_joint)
        cond.append(float(s_mb - s_b))
        coh.append(float(s_mb - s_ab))
        hol.append(float(s_b - sum(p * von_neumann_entropy(r) for p, r in ens.nonzero())))

    complete = is_complete_mub(measurements)
    if complete:
        log_overlap = math.log2(d)
        erhs1 = log_overlap + d * s_a_given_b
    else:
        log_overlap = -math.log2(overlap_factor_b(measurements).b)
        erhs1 = log_overlap + (n - 1) * s_a_given_b
    crhs1 = log_overlap - s_a_given_b

    erhs1, crhs1 = float(erhs1), float(crhs1)
    delta = float(delta_term(i_ab, hol, delta_variant))
    boost = max(0.0, delta)
    elhs = math.fsum(cond)
    clhs = math.fsum(coh)
    return UncertaintyReport(
        per_measurement_conditional_entropy=tuple(cond),
        per_measurement_coherence=tuple(coh),
        holevo=tuple(hol),
        elhs=elhs,
        erhs1=erhs1,
        erhs2=erhs1 + boost,
        clhs=clhs,
        crhs1=crhs1,
        crhs2=crhs1 + boost,
        s_ab=s_ab,
        s_a=s_a,
        s_b=s_b,
        s_a_given_b=s_a_given_b,
        i_ab=i_ab,
        delta=delta,
        delta_variant=delta_variant,
        log_overlap=log_overlap,
        complete_mub=complete,
        n_measurements=n,
        labels=tuple(m.label for m in measurements),
    )


def eur_report(rho_ab, measurements=None, delta_variant: str = "consistent") -> UncertaintyReport:
    """Entropic side; the returned report carries the coherence side as well."""
    return uncertainty_report(rho_ab, measurements, delta_variant)


def cur_report(rho_ab, measurements=None, delta_variant: str = "consistent") -> UncertaintyReport:
    """Coherence side; same report object as :func:`eur_report`."""
    return uncertainty_report(rho_ab, measurements, delta_variant)


def pairwise_shannon_bound(rho: DensityMatrix, m1: ProjectiveMeasurement, m2: ProjectiveMeasurement) -> float:
    """H(P) + H(Q) - log2(1/c) for a single system; nonnegative when the bound holds."""
    def probs(m):
        return np.clip([np.trace(p @ rho.mat).real for p in m.projectors], 0.0, None)

    c = overlap_factor_b([m1, m2]).c
    return shannon_entropy(probs(m1)) + shannon_entropy(probs(m2)) + math.log2(c)
