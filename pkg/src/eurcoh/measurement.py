"""Local projective measurements on subsystem A of a bipartite state."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch
from .qla import DensityMatrix, partial_trace
from .states import ProjectiveMeasurement

ZERO_PROB = 1e-12


@dataclass(frozen=True, eq=False)
class MeasurementOutcomeEnsemble:
    """Outcome statistics of one local measurement.

    ``conditional_joint`` and ``conditional_memory`` hold ``None`` for outcomes
    whose probability is below 1e-12; those outcomes drop out of every
    entropy sum.
    """

    probabilities: np.ndarray
    conditional_joint: tuple[DensityMatrix | None, ...]
    conditional_memory: tuple[DensityMatrix | None, ...]
    dephased_joint: DensityMatrix

    def nonzero(self):
        for p, rho_b in zip(self.probabilities, self.conditional_memory):
            if rho_b is not None:
                yield float(p), rho_b


def measure_local(rho_ab: DensityMatrix, m: ProjectiveMeasurement) -> MeasurementOutcomeEnsemble:
    if len(rho_ab.dims) != 2:
        raise DimensionMismatch(f"expected a bipartite state, got dims {rho_ab.dims}")
    da, db = rho_ab.dims
    if m.dim != da:
        raise DimensionMismatch(f"measurement acts on dimension {m.dim}, subsystem A has {da}")

    probs = []
    joints: list[DensityMatrix | None] = []
    memories: list[DensityMatrix | None] = []
    dephased = np.zeros_like(rho_ab.mat)
    for big in m.lifted(db):
        block = big @ rho_ab.mat @ big
        dephased += block
        p = float(np.trace(block).real)
        if -ZERO_PROB <= p < 0.0:
            p = 0.0
        probs.append(p)
        if p < ZERO_PROB:
            joints.append(None)
            memories.append(None)
            continue
        joint = DensityMatrix(block / p, rho_ab.dims)
        joints.append(joint)
        memories.append(partial_trace(joint, 1))

    dephased = 0.5 * (dephased + dephased.conj().T)
    return MeasurementOutcomeEnsemble(
        np.array(probs),
        tuple(joints),
        tuple(memories),
        DensityMatrix(dephased, rho_ab.dims),
    )


def dephase_global(rho: DensityMatrix, basis: Sequence[Sequence[complex]]) -> DensityMatrix:
    """Keep only the populations of ``rho`` in an orthonormal ``basis``."""
    vecs = [np.asarray(b, dtype=complex).reshape(-1) for b in basis]
    if len(vecs) != rho.dim or any(v.size != rho.dim for v in vecs):
        raise DimensionMismatch(f"basis of {len(vecs)} vectors does not span dimension {rho.dim}")
    out = np.zeros_like(rho.mat)
    for v in vecs:
        pop = np.real(v.conj() @ rho.mat @ v)
        out += pop * np.outer(v, v.conj())
    return DensityMatrix(out, rho.dims)


def product_basis(*bases: Sequence[Sequence[complex]]) -> list[np.ndarray]:
    """Kronecker products of basis vectors, first factor major."""
    out = [np.array([1.0 + 0j])]
    for basis in bases:
        out = [np.kron(a, np.asarray(b, dtype=complex)) for a in out for b in basis]
    return out
