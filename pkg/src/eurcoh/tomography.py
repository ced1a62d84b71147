"""Simulated two-qubit polarization tomography.

Coincidence counts are drawn as independent Poisson variables per setting,
``n_k ~ Poisson(exposure * Tr[(P_a x P_b) rho])``. Reconstruction is either a
linear least-squares inversion onto the Pauli basis or a maximum-likelihood fit
over ``rho = T^dagger T / Tr(T^dagger T)`` with ``T`` upper triangular.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, MalformedCsv, NoConvergence, UnderdeterminedSettings
from .infotheory import uncertainty_report
from .qla import DensityMatrix, eig_hermitian, eigvals_hermitian, matrix_sqrt_psd
from .states import KETS, PAULIS, PureState, mub_qubit

SIXTEEN = ("H", "V", "D", "R")
THIRTYSIX = ("H", "V", "D", "A", "R", "L")
MLE_MAX_ITER = 10_000
MLE_FTOL = 1e-10
MLE_GTOL = 1e-8

# two-qubit Pauli products sigma_i x sigma_j, i major
PAULI2 = np.array([np.kron(a, b) for a in PAULIS for b in PAULIS])


@dataclass(frozen=True, eq=False)
class TomographySetting:
    label: str
    basis_a: PureState
    basis_b: PureState

    def projector(self) -> np.ndarray:
        return np.kron(self.basis_a.projector(), self.basis_b.projector())


@dataclass(frozen=True, eq=False)
class CountTable:
    """Coincidence counts per setting.

    ``counts`` are integers for simulated data; :func:`expected_counts` fills
    them with exact (float) means for noiseless checks.
    """

    settings: tuple[TomographySetting, ...]
    counts: np.ndarray
    exposure: float
    seed: int | None = None

    def __post_init__(self):
        counts = np.array(self.counts)
        if counts.shape != (len(self.settings),):
            raise DimensionMismatch(f"{counts.size} counts for {len(self.settings)} settings")
        if np.any(counts < 0):
            raise ValueError("counts must be nonnegative")
        if not self.exposure > 0:
            raise ValueError("exposure must be positive")
        counts.setflags(write=False)
        object.__setattr__(self, "settings", tuple(self.settings))
        object.__setattr__(self, "counts", counts)


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    rho_hat: DensityMatrix
    method: str
    iterations: int = 0
    converged: bool = True
    log_likelihood: float | None = None
    physical: bool = True


@dataclass(frozen=True)
class ErrorBarReport:
    quantity_names: tuple[str, ...]
    means: tuple[float, ...]
    std_devs: tuple[float, ...]
    n_samples: int
    n_failed: int = 0
    samples: tuple[tuple[float, ...], ...] = field(default=(), repr=False)

    def as_dict(self) -> dict[str, tuple[float, float]]:
        return {n: (m, s) for n, m, s in zip(self.quantity_names, self.means, self.std_devs)}


def standard_settings(mode: str | int = "thirtysix") -> list[TomographySetting]:
    """Product settings: {H,V,D,A,R,L}^2 (36) or the minimal {H,V,D,R}^2 (16)."""
    if mode in ("thirtysix", 36, "36"):
        letters = THIRTYSIX
    elif mode in ("sixteen", 16, "16"):
        letters = SIXTEEN
    else:
        raise ValueError(f"unknown settings mode {mode!r}")
    return [
        TomographySetting(a + b, PureState(KETS[a]), PureState(KETS[b]))
        for a, b in itertools.product(letters, repeat=2)
    ]


def _projectors(settings: Sequence[TomographySetting]) -> np.ndarray:
    return np.array([s.projector() for s in settings])


def _probabilities(rho: DensityMatrix, projs: np.ndarray) -> np.ndarray:
    # Tr(P_k rho) for all k at once
    p = np.real(np.einsum("kij,ji->k", projs, rho.mat))
    return np.clip(p, 0.0, None)


def simulate_counts(
    rho: DensityMatrix,
    settings: Sequence[TomographySetting] | None = None,
    exposure: float = 1e4,
    seed: int = 0,
) -> CountTable:
    if settings is None:
        settings = standard_settings()
    if not exposure > 0:
        raise ValueError("exposure must be positive")
    rng = np.random.default_rng(seed)
    means = exposure * _probabilities(rho, _projectors(settings))
    counts = rng.poisson(means).astype(np.int64)
    return CountTable(tuple(settings), counts, float(exposure), int(seed))


def expected_counts(
    rho: DensityMatrix, settings: Sequence[TomographySetting] | None = None, exposure: float = 1e4
) -> CountTable:
    """Noise-free counts (exact means), for oracle checks."""
    if settings is None:
        settings = standard_settings()
    means = exposure * _probabilities(rho, _projectors(settings))
    return CountTable(tuple(settings), means, float(exposure), None)


def _design_matrix(projs: np.ndarray) -> np.ndarray:
    # row k: Tr(P_k sigma_ij) / 4, so that p_k = row_k . S with S_00 = 1
    return np.real(np.einsum("kij,mji->km", projs, PAULI2)) / 4.0


def linear_reconstruct(table: CountTable) -> ReconstructionResult:
    """Least-squares inversion of the counts onto the two-qubit Pauli expansion.

    The overall count scale is fitted jointly with the Stokes parameters and
    divided out through the identity component, so the estimate has unit
    trace. It is not projected onto physical states.
    """
    projs = _projectors(table.settings)
    if projs.shape[1:] != (4, 4):
        raise DimensionMismatch("linear inversion is implemented for two qubits")
    a = _design_matrix(projs)
    rank = np.linalg.matrix_rank(a)
    if rank < 16:
        raise UnderdeterminedSettings(f"design matrix rank {rank} < 16")
    x, *_ = np.linalg.lstsq(a, np.asarray(table.counts, dtype=float), rcond=None)
    if x[0] <= 0:
        raise UnderdeterminedSettings("no counts to normalise the estimate")
    stokes = x / x[0]
    mat = np.einsum("m,mij->ij", stokes, PAULI2) / 4.0
    mat = 0.5 * (mat + mat.conj().T)
    rho = DensityMatrix(mat, (2, 2))
    physical = bool(eigvals_hermitian(mat).min() >= -1e-12)
    return ReconstructionResult(rho, "linear", physical=physical)


# --- maximum likelihood -----------------------------------------------------

_OFF = np.triu_indices(4, k=1)
N_PARAMS = 16


def params_to_t(x: np.ndarray) -> np.ndarray:
    """16 reals -> upper-triangular T: 4 real diagonal entries, then Re/Im of the 6 off-diagonal ones."""
    t = np.zeros((4, 4), dtype=complex)
    t[np.diag_indices(4)] = x[:4]
    t[_OFF] = x[4:10] + 1j * x[10:16]
    return t


def t_to_params(t: np.ndarray) -> np.ndarray:
    return np.concatenate([np.real(np.diag(t)), np.real(t[_OFF]), np.imag(t[_OFF])])


def rho_from_params(x: np.ndarray) -> np.ndarray:
    t = params_to_t(x)
    m = t.conj().T @ t
    return m / np.trace(m).real


def _param_basis() -> np.ndarray:
    """E_j with T = sum_j x_j E_j."""
    out = np.zeros((N_PARAMS, 4, 4), dtype=complex)
    for j in range(N_PARAMS):
        e = np.zeros(N_PARAMS)
        e[j] = 1.0
        out[j] = params_to_t(e)
    return out


_E = _param_basis()


def quadratic_forms(projs: np.ndarray) -> np.ndarray:
    """Real symmetric Q_k with Tr(P_k T^dagger T) = x^T Q_k x."""
    # Q_k[j, l] = Re Tr(P_k E_j^dagger E_l)
    ee = np.einsum("jba,lbc->jlac", _E.conj(), _E)
    q = np.real(np.einsum("kca,jlac->kjl", projs, ee))
    return 0.5 * (q + q.transpose(0, 2, 1))


class PoissonLikelihood:
    """Poissonian log-likelihood of the counts as a function of the 16 T parameters.

    ``mu_k = exposure * x^T Q_k x / x^T x``, so value and gradient are a couple
    of small matrix products.
    """

    def __init__(self, table: CountTable):
        projs = _projectors(table.settings)
        if projs.shape[1:] != (4, 4):
            raise DimensionMismatch("maximum likelihood is implemented for two qubits")
        self.q = quadratic_forms(projs)
        self._q2 = self.q.reshape(-1, N_PARAMS)
        self._k = len(projs)
        self.counts = np.asarray(table.counts, dtype=float)
        self.exposure = table.exposure
        self._pos = self.counts > 0
        self._n = self.counts[self._pos]

    def _mu(self, x: np.ndarray):
        qx = (self._q2 @ x).reshape(self._k, N_PARAMS)
        nrm = x @ x
        return self.exposure * (qx @ x) / nrm, qx, nrm

    def value(self, x: np.ndarray) -> float:
        mu, _, _ = self._mu(x)
        mp = mu[self._pos]
        if mp.size and mp.min() <= 0:
            return -math.inf
        return float(self._n @ np.log(mp) - mu.sum())

    def value_and_grad(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        mu, qx, nrm = self._mu(x)
        mp = mu[self._pos]
        if mp.size and mp.min() <= 0:
            return -math.inf, np.zeros_like(x)
        val = float(self._n @ np.log(mp) - mu.sum())
        w = -np.ones_like(mu)
        w[self._pos] += self._n / mp
        # d mu_k / dx = 2 (exposure Q_k x - mu_k x) / |x|^2
        grad = 2.0 * (self.exposure * (w @ qx) - (w @ mu) * x) / nrm
        return val, grad

    def value_grad_hess(self, x: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
        """Value, gradient and exact Hessian.

        With m_k = x^T Q_k x / |x|^2 and u_k = Q_k x - m_k x, the Hessian is
        sum_k w_k d2mu_k - sum_k (n_k / mu_k^2) dmu_k dmu_k^T where
        dmu_k = 2 e u_k / |x|^2 and
        d2mu_k = 2 e / |x|^2 (Q_k - m_k I - 2 (x u_k^T + u_k x^T) / |x|^2).
        """
        mu, qx, nrm = self._mu(x)
        mp = mu[self._pos]
        if mp.size and mp.min() <= 0:
            return -math.inf, np.zeros_like(x), np.zeros((N_PARAMS, N_PARAMS))
        val = float(self._n @ np.log(mp) - mu.sum())
        m = mu / self.exposure
        u = qx - m[:, None] * x
        w = -np.ones_like(mu)
        w[self._pos] += self._n / mp
        c = np.zeros_like(mu)
        c[self._pos] = self._n / (mp * mp)
        k = 2.0 * self.exposure / nrm
        su = w @ u
        grad = k * su
        hess = k * (np.tensordot(w, self.q, 1) - (w @ m) * np.eye(N_PARAMS)
                    - 2.0 * (np.outer(x, su) + np.outer(su, x)) / nrm)
        hess -= k * k * (u.T * c) @ u
        return val, grad, hess


def _initial_params(init: DensityMatrix | None, table: CountTable) -> np.ndarray:
    if init is None:
        try:
            init = linear_reconstruct(table).rho_hat
        except UnderdeterminedSettings:
            init = DensityMatrix(np.eye(4) / 4, (2, 2))
    spec = eig_hermitian(init.mat)
    vals = np.clip(spec.values, 0.0, None)
    vals = vals / vals.sum() if vals.sum() > 0 else np.full(4, 0.25)
    mixed = (spec.vectors * vals) @ spec.vectors.conj().T
    mixed = 0.99 * mixed + 0.01 * np.eye(4) / 4
    lower = np.linalg.cholesky(0.5 * (mixed + mixed.conj().T))
    x = t_to_params(lower.conj().T)
    return x / np.linalg.norm(x)


def _damped_newton_direction(g: np.ndarray, h: np.ndarray, lam: float) -> tuple[np.ndarray, float]:
    """Solve (-H + lam I) d = g, raising lam until the shifted matrix is positive definite."""
    a = -h
    floor = 1e-12 * max(1.0, float(np.abs(np.diag(a)).max()))
    lam = max(lam, 0.0)
    while True:
        try:
            chol = np.linalg.cholesky(a + lam * np.eye(N_PARAMS))
            break
        except np.linalg.LinAlgError:
            lam = max(10.0 * lam, floor)
    y = np.linalg.solve(chol, g)
    return np.linalg.solve(chol.conj().T, y), lam


def mle_reconstruct(
    table: CountTable,
    init: DensityMatrix | None = None,
    max_iter: int = MLE_MAX_ITER,
    raise_on_failure: bool = False,
) -> ReconstructionResult:
    """Maximum-likelihood state estimate.

    Ascent on the 16 Cholesky parameters along a Levenberg-damped Newton
    direction, with the step halved until the likelihood improves. The damping
    shrinks after full steps and grows after halved ones. Stops when both the
    realised and the predicted per-event improvement drop below 1e-10, when
    the gradient norm falls below 1e-8, or after ``max_iter`` iterations. In
    the last case the final iterate is returned with ``converged=False``, or
    :class:`NoConvergence` is raised if requested.
    """
    like = PoissonLikelihood(table)
    ftol = MLE_FTOL * max(1.0, float(np.sum(table.counts)))
    x = _initial_params(init, table)
    val, g, h = like.value_grad_hess(x)
    lam = 1e-8 * max(1.0, float(np.abs(np.diag(h)).max()))
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        if math.sqrt(g @ g) < MLE_GTOL:
            converged = True
            break
        d, lam = _damped_newton_direction(g, h, lam)
        predicted = float(g @ d)
        a = 1.0
        for _ in range(60):
            x_new = x + a * d
            x_new /= math.sqrt(x_new @ x_new)
            val_new = like.value(x_new)
            if val_new > val:
                break
            a *= 0.5
        else:
            converged = True  # no ascent left at working precision
            break
        lam = lam / 3.0 if a == 1.0 else 4.0 * lam
        gain = val_new - val
        x = x_new
        val, g, h = like.value_grad_hess(x)
        if gain < ftol and predicted < ftol:
            converged = True
            break

    rho = rho_from_params(x)
    rho = 0.5 * (rho + rho.conj().T)
    if not converged and raise_on_failure:
        raise NoConvergence(f"MLE did not converge in {max_iter} iterations")
    return ReconstructionResult(
        DensityMatrix(rho, (2, 2)), "mle", iterations=it, converged=converged, log_likelihood=val
    )


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)), not squared."""
    a = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho)
    b = sigma.mat if isinstance(sigma, DensityMatrix) else np.asarray(sigma)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    root = matrix_sqrt_psd(a)
    inner = root @ b @ root
    vals = eigvals_hermitian(0.5 * (inner + inner.conj().T))
    vals = np.where(vals < 1e-15, 0.0, vals)  # rounding noise would contribute ~1e-8 after sqrt
    f = float(np.sum(np.sqrt(vals)))
    return min(max(f, 0.0), 1.0)


# --- Monte Carlo error bars ---------------------------------------------------

REPORT_QUANTITIES = (
    "elhs", "erhs1", "erhs2", "clhs", "crhs1", "crhs2",
    "s_ab", "s_a", "s_b", "s_a_given_b", "i_ab", "delta",
)


def derive_seed(seed: int, *path: int) -> int:
    """Independent 64-bit seed for a (seed, index, ...) path."""
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), *map(int, path)])
    return int(ss.generate_state(1, np.uint64)[0])


def _one_sample(args) -> tuple[bool, tuple[float, ...]]:
    rho_true, settings, exposure, sample_seed, quantities, delta_variant = args
    table = simulate_counts(rho_true, settings, exposure, sample_seed)
    res = mle_reconstruct(table)
    if not res.converged:
        return False, ()
    report = uncertainty_report(res.rho_hat, mub_qubit(), delta_variant)
    values = []
    for q in quantities:
        if q == "fidelity":
            values.append(fidelity(res.rho_hat, rho_true))
        else:
            values.append(float(getattr(report, q)))
    return True, tuple(values)


def monte_carlo_errors(
    rho_true: DensityMatrix,
    settings: Sequence[TomographySetting] | None = None,
    exposure: float = 1e4,
    n_samples: int = 100,
    seed: int = 0,
    quantities: Iterable[str] = ("fidelity",),
    delta_variant: str = "consistent",
    workers: int = 1,
) -> ErrorBarReport:
    """Repeat simulate -> MLE -> report and summarise each quantity by mean and std.

    Sample ``i`` draws its counts from ``derive_seed(seed, i)``. Samples whose
    MLE fails to converge are counted in ``n_failed`` and left out.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    quantities = tuple(quantities)
    for q in quantities:
        if q != "fidelity" and q not in REPORT_QUANTITIES:
            raise ValueError(f"unknown quantity {q!r}")
    if settings is None:
        settings = standard_settings()
    jobs = [
        (rho_true, tuple(settings), exposure, derive_seed(seed, i), quantities, delta_variant)
        for i in range(n_samples)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one_sample, jobs, chunksize=max(1, n_samples // (4 * workers))))
    else:
        results = [_one_sample(j) for j in jobs]

    good = [vals for ok, vals in results if ok]
    n_failed = len(results) - len(good)
    if len(good) < 2:
        raise NoConvergence(f"only {len(good)} of {n_samples} Monte Carlo samples converged")
    arr = np.array(good)
    return ErrorBarReport(
        quantities,
        tuple(float(v) for v in arr.mean(axis=0)),
        tuple(float(v) for v in arr.std(axis=0, ddof=1)),
        len(good),
        n_failed,
        tuple(good),
    )


# --- serialization ----------------------------------------------------------

COUNT_COLUMNS = ("setting_label", "basis_a", "basis_b", "count", "exposure", "seed")


def _ket_name(state: PureState) -> str:
    for name, ket in KETS.items():
        if state.dim == 2 and np.allclose(state.amplitudes, ket, atol=1e-12):
            return name
    return ";".join(repr(complex(a)) for a in state.amplitudes)


def _ket_from_name(text: str) -> PureState:
    if text in KETS:
        return PureState(KETS[text])
    try:
        return PureState(np.array([complex(t) for t in text.split(";")]))
    except ValueError as exc:
        raise MalformedCsv(f"unreadable basis ket {text!r}") from exc


def _fmt_count(c) -> str:
    c = float(c)
    return str(int(c)) if c.is_integer() else repr(c)


def count_table_to_csv(table: CountTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COUNT_COLUMNS)
    seed = "" if table.seed is None else str(table.seed)
    for s, c in zip(table.settings, table.counts):
        w.writerow([s.label, _ket_name(s.basis_a), _ket_name(s.basis_b), _fmt_count(c), repr(table.exposure), seed])
    return buf.getvalue()


def count_table_from_csv(text: str) -> CountTable:
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows or set(COUNT_COLUMNS) - set(rows[0]):
        raise MalformedCsv(f"count table needs columns {COUNT_COLUMNS}")
    try:
        settings = [
            TomographySetting(r["setting_label"], _ket_from_name(r["basis_a"]), _ket_from_name(r["basis_b"]))
            for r in rows
        ]
        counts = np.array([float(r["count"]) for r in rows])
        exposure = float(rows[0]["exposure"])
        seed = int(rows[0]["seed"]) if rows[0]["seed"] else None
    except (KeyError, ValueError) as exc:
        raise MalformedCsv(str(exc)) from exc
    if np.all(counts == np.round(counts)):
        counts = counts.astype(np.int64)
    return CountTable(tuple(settings), counts, exposure, seed)


def reconstruction_to_text(res: ReconstructionResult) -> str:
    """Header comment plus the 16 matrix entries as ``re,im`` lines, row-major."""
    ll = "" if res.log_likelihood is None else repr(res.log_likelihood)
    lines = [
        f"# method={res.method} converged={str(res.converged).lower()} "
        f"iterations={res.iterations} log_likelihood={ll}",
        "re,im",
    ]
    lines += [f"{float(z.real)!r},{float(z.imag)!r}" for z in res.rho_hat.mat.reshape(-1)]
    return "\n".join(lines) + "\n"


def reconstruction_from_text(text: str) -> DensityMatrix:
    vals = []
    for line in text.splitlines():
        if not line or line.startswith("#") or line == "re,im":
            continue
        try:
            re_, im_ = line.split(",")
            vals.append(complex(float(re_), float(im_)))
        except ValueError as exc:
            raise MalformedCsv(f"unreadable matrix entry {line!r}") from exc
    if len(vals) != 16:
        raise MalformedCsv(f"expected 16 entries, found {len(vals)}")
    return DensityMatrix(np.array(vals).reshape(4, 4), (2, 2))


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = os.fspath(path)
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)
