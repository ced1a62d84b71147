"""Small dense complex linear algebra: Kronecker products, partial traces and a
cyclic Jacobi eigensolver for Hermitian matrices.

Basis ordering is subsystem-A major everywhere: for two qubits the product
basis runs HH, HV, VH, VV.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidSubsystem,
    NoConvergence,
    NotHermitian,
    NotPSD,
    TraceMismatch,
)

HERMITIAN_TOL = 1e-10
SOLVER_HERMITIAN_TOL = 1e-8
PSD_CLAMP_FLOOR = -1e-9
SQRT_PSD_FLOOR = -1e-6
TRACE_TOL = 1e-6
JACOBI_MAX_SWEEPS = 100


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A density operator together with the dimensions of its tensor factors.

    The constructor only checks shapes. Use :func:`validate_density` for the
    full Hermitian / trace / positivity checks.
    """

    mat: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        mat = np.asarray(self.mat)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatch(f"density matrix must be square, got {mat.shape}")
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims) or math.prod(dims) != mat.shape[0]:
            raise DimensionMismatch(f"dims {dims} do not factor dimension {mat.shape[0]}")
        object.__setattr__(self, "mat", _frozen(mat))
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))

    @classmethod
    def from_ket(cls, ket: Sequence[complex], dims: Sequence[int] | None = None) -> DensityMatrix:
        v = np.asarray(ket, dtype=complex).reshape(-1)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()), tuple(dims) if dims is not None else (v.size,))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues in descending order; eigenvectors are the columns of ``vectors``."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


def tensor_product(a, b):
    """Kronecker product, A index major.

    Accepts plain arrays or :class:`DensityMatrix`; two density matrices give a
    density matrix with the factor dimensions concatenated.
    """
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.mat, b.mat), a.dims + b.dims)
    a = a.mat if isinstance(a, DensityMatrix) else np.asarray(a, dtype=complex)
    b = b.mat if isinstance(b, DensityMatrix) else np.asarray(b, dtype=complex)
    return np.kron(a, b)


def partial_trace(rho: DensityMatrix, keep: int | Sequence[int]) -> DensityMatrix:
    """Trace out every subsystem except those listed in ``keep``."""
    n = len(rho.dims)
    if n < 2:
        raise InvalidSubsystem("partial trace needs at least two subsystems")
    keep_idx = [keep] if isinstance(keep, (int, np.integer)) else list(keep)
    if not keep_idx or any(not 0 <= k < n for k in keep_idx) or len(set(keep_idx)) != len(keep_idx):
        raise InvalidSubsystem(f"keep={keep!r} invalid for {n} subsystems")
    keep_idx = sorted(int(k) for k in keep_idx)
    traced = [i for i in range(n) if i not in keep_idx]

    t = rho.mat.reshape(rho.dims + rho.dims)
    # contract traced pairs from the highest axis down so indices stay valid
    for offset, i in enumerate(sorted(traced, reverse=True)):
        cur = n - offset
        t = np.trace(t, axis1=i, axis2=i + cur)
    kept_dims = tuple(rho.dims[k] for k in keep_idx)
    d = math.prod(kept_dims)
    return DensityMatrix(t.reshape(d, d), kept_dims)


def _check_hermitian(m: np.ndarray, tol: float) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NotHermitian("matrix has non-finite entries")
    asym = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if asym > tol:
        raise NotHermitian(f"max |M - M^dagger| = {asym:.3e} exceeds {tol:.1e}")


def _jacobi(a: list[list[complex]], n: int, want_vectors: bool, max_sweeps: int):
    """Cyclic complex Jacobi on a Hermitian matrix held as nested lists.

    Each rotation first removes the phase of a[p][q] and then applies the real
    symmetric Jacobi rotation, so the combined transform is unitary.
    """
    v = [[1.0 + 0j if i == j else 0j for j in range(n)] for i in range(n)] if want_vectors else None
    for i in range(n):
        a[i][i] = complex(a[i][i].real, 0.0)
    scale = max(1.0, math.sqrt(sum(abs(x) ** 2 for row in a for x in row)))
    thresh = 1e-17 * scale

    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off = max(off, abs(a[p][q]))
        if off <= thresh:
            return [a[i][i].real for i in range(n)], v

        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                mag = abs(apq)
                if mag <= thresh:
                    continue
                ph = apq / mag
                phc = ph.conjugate()
                app = a[p][p].real
                aqq = a[q][q].real
                tau = (aqq - app) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                sph = s * phc  # s e^{-i phi}
                cph = c * phc  # c e^{-i phi}
                # columns: A <- A G with G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                for k in range(n):
                    akp = a[k][p]
                    akq = a[k][q]
                    a[k][p] = c * akp - sph * akq
                    a[k][q] = s * akp + cph * akq
                # rows: A <- G^dagger A
                sphc = sph.conjugate()
                cphc = cph.conjugate()
                for k in range(n):
                    apk = a[p][k]
                    aqk = a[q][k]
                    a[p][k] = c * apk - sphc * aqk
                    a[q][k] = s * apk + cphc * aqk
                a[p][q] = 0j
                a[q][p] = 0j
                a[p][p] = complex(app - t * mag, 0.0)
                a[q][q] = complex(aqq + t * mag, 0.0)
                if want_vectors:
                    for k in range(n):
                        vkp = v[k][p]
                        vkq = v[k][q]
                        v[k][p] = c * vkp - sph * vkq
                        v[k][q] = s * vkp + cph * vkq
    raise NoConvergence(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")


def _prepare(m) -> tuple[np.ndarray, int]:
    m = np.asarray(m, dtype=complex)
    _check_hermitian(m, SOLVER_HERMITIAN_TOL)
    return 0.5 * (m + m.conj().T), m.shape[0]


def eigvals_hermitian(m) -> np.ndarray:
    """Eigenvalues only, descending. Same solver as :func:`eig_hermitian`."""
    h, n = _prepare(m)
    if n == 1:
        return np.array([h[0, 0].real])
    if n == 2:
        # a single Jacobi rotation diagonalises a 2x2 block exactly
        a, d, b = h[0, 0].real, h[1, 1].real, abs(h[0, 1])
        mid, rad = 0.5 * (a + d), math.hypot(0.5 * (a - d), b)
        return np.array([mid + rad, mid - rad])
    vals, _ = _jacobi(h.tolist(), n, False, JACOBI_MAX_SWEEPS)
    return np.array(sorted(vals, reverse=True))


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    for x in vec:
        if abs(x) > 1e-12:
            return vec * (abs(x) / x)
    return vec


def _sort_key(val: float, vec: np.ndarray):
    # larger leading entries first, so a degenerate diagonal keeps basis order
    entries = tuple(c for x in vec for c in (-round(x.real, 12), -round(x.imag, 12)))
    return (-round(val, 12),) + entries


def eig_hermitian(m) -> Spectrum:
    """Full eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Eigenpairs come out sorted by descending eigenvalue, ties broken by
    comparing eigenvector entries. Each eigenvector is rephased so that its
    first non-negligible component is real and positive.
    """
    h, n = _prepare(m)
    vals, v = _jacobi(h.tolist(), n, True, JACOBI_MAX_SWEEPS)
    vecs = np.array(v, dtype=complex)
    pairs = [(vals[j], _fix_phase(vecs[:, j])) for j in range(n)]
    pairs.sort(key=lambda pv: _sort_key(*pv))
    values = np.array([p[0] for p in pairs])
    vectors = np.column_stack([p[1] for p in pairs])
    values.setflags(write=False)
    vectors.setflags(write=False)
    return Spectrum(values, vectors)


def matrix_sqrt_psd(rho) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues below zero but above -1e-6 are treated as rounding noise and
    clamped to zero.
    """
    m = rho.mat if isinstance(rho, DensityMatrix) else rho
    spec = eig_hermitian(m)
    if spec.values.size and spec.values.min() < SQRT_PSD_FLOOR:
        raise NotPSD(f"eigenvalue {spec.values.min():.3e} below {SQRT_PSD_FLOOR}")
    root = np.sqrt(np.clip(spec.values, 0.0, None))
    return (spec.vectors * root) @ spec.vectors.conj().T


def validate_density(m, dims: Sequence[int]) -> DensityMatrix:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {m.shape}")
    _check_hermitian(m, HERMITIAN_TOL)
    tr = float(np.trace(m).real)
    if abs(tr - 1.0) > TRACE_TOL:
        raise TraceMismatch(f"trace {tr:.9f} differs from 1")
    spec = eig_hermitian(m)
    lo = float(spec.values.min())
    if lo < PSD_CLAMP_FLOOR:
        raise NotPSD(f"eigenvalue {lo:.3e} below {PSD_CLAMP_FLOOR}")
    if lo < 0.0:
        vals = np.clip(spec.values, 0.0, None)
        m = (spec.vectors * vals) @ spec.vectors.conj().T
    m = 0.5 * (m + m.conj().T)
    m = m / np.trace(m).real
    return DensityMatrix(m, tuple(dims))


def is_valid_density(rho: DensityMatrix) -> bool:
    try:
        validate_density(rho.mat, rho.dims)
    except (NotHermitian, NotPSD, TraceMismatch, DimensionMismatch):
        return False
    return True
