"""Two-qubit polarization states, the qubit MUB set and a Jones-calculus model
of the wave plates used to realise the MUB projectors.

Angles are taken in degrees at every public entry point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import AngleOutOfRange, DimensionMismatch
from .qla import DensityMatrix

SQ2 = 1.0 / math.sqrt(2.0)

# polarization kets in the (H, V) basis
KETS: dict[str, np.ndarray] = {
    "H": np.array([1, 0], dtype=complex),
    "V": np.array([0, 1], dtype=complex),
    "D": np.array([SQ2, SQ2], dtype=complex),
    "A": np.array([SQ2, -SQ2], dtype=complex),
    "R": np.array([SQ2, 1j * SQ2], dtype=complex),
    "L": np.array([SQ2, -1j * SQ2], dtype=complex),
}

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)
PAULIS = (IDENTITY2, SIGMA_X, SIGMA_Y, SIGMA_Z)


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if abs(np.linalg.norm(v) - 1.0) > 1e-10:
            raise ValueError(f"ket not normalised (norm {np.linalg.norm(v)!r})")
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self, dims: Sequence[int] | None = None) -> DensityMatrix:
        return DensityMatrix(self.projector(), tuple(dims) if dims else (self.dim,))


@dataclass(frozen=True)
class StateParams:
    p: float
    theta_deg: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"mixing weight p={self.p} outside [0, 1]")
        _check_angle(self.theta_deg)

    @property
    def theta(self) -> float:
        return math.radians(self.theta_deg)


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement:
    """Ordered rank-1 projectors, outcome 0 first."""

    label: str
    projectors: tuple[np.ndarray, ...]

    def __post_init__(self):
        projs = tuple(np.array(p, dtype=complex) for p in self.projectors)
        if not projs:
            raise ValueError("measurement needs at least one projector")
        d = projs[0].shape[0]
        if any(p.shape != (d, d) for p in projs):
            raise DimensionMismatch("projectors must share one square shape")
        if len(projs) != d:
            raise ValueError(f"need {d} rank-1 projectors for a complete basis, got {len(projs)}")
        if np.max(np.abs(sum(projs) - np.eye(d))) > 1e-10:
            raise ValueError("projectors do not sum to the identity")
        for i, a in enumerate(projs):
            for j, b in enumerate(projs):
                target = a if i == j else 0
                if np.max(np.abs(a @ b - target)) > 1e-9:
                    raise ValueError("projectors are not mutually orthogonal")
        for p in projs:
            p.setflags(write=False)
        object.__setattr__(self, "projectors", projs)
        vecs = []
        for p in projs:
            col = p[:, int(np.argmax(np.abs(np.diag(p))))]
            vecs.append(col / np.linalg.norm(col))
        object.__setattr__(self, "_basis", tuple(vecs))
        object.__setattr__(self, "_lifted", {})

    @classmethod
    def from_basis(cls, label: str, kets: Sequence[Sequence[complex]]) -> ProjectiveMeasurement:
        vs = [np.asarray(k, dtype=complex) for k in kets]
        return cls(label, tuple(np.outer(v, v.conj()) for v in vs))

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    def lifted(self, d_other: int) -> tuple[np.ndarray, ...]:
        """Projectors tensored with the identity on a ``d_other``-dimensional partner."""
        cached = self._lifted.get(d_other)
        if cached is None:
            eye = np.eye(d_other, dtype=complex)
            cached = tuple(np.kron(p, eye) for p in self.projectors)
            for c in cached:
                c.setflags(write=False)
            self._lifted[d_other] = cached
        return cached

    def basis(self) -> list[np.ndarray]:
        """Unit vectors spanning each projector (phase fixed by the largest component)."""
        return list(self._basis)


@dataclass(frozen=True)
class WavePlate:
    kind: Literal["half", "quarter"]
    axis_deg: float

    def __post_init__(self):
        if self.kind not in ("half", "quarter"):
            raise ValueError(f"unknown wave plate kind {self.kind!r}")


def _check_angle(theta_deg: float) -> None:
    if not (0.0 <= theta_deg <= 90.0) or math.isnan(theta_deg):
        raise AngleOutOfRange(f"theta={theta_deg} deg outside [0, 90]")


def bell_like_state(theta_deg: float, which: Literal["Phi", "Psi"] = "Phi") -> PureState:
    """cos t|HH> + sin t|VV> (Phi) or cos t|HV> - sin t|VH> (Psi)."""
    _check_angle(theta_deg)
    t = math.radians(theta_deg)
    c, s = math.cos(t), math.sin(t)
    if which == "Phi":
        amps = [c, 0, 0, s]
    elif which == "Psi":
        amps = [0, c, -s, 0]
    else:
        raise ValueError(f"which must be 'Phi' or 'Psi', not {which!r}")
    return PureState(np.array(amps, dtype=complex))


def bell_diagonal_state(p: float | StateParams, theta_deg: float | None = None) -> DensityMatrix:
    """p |Phi_t><Phi_t| + (1 - p) |Psi_t><Psi_t| on two qubits."""
    params = p if isinstance(p, StateParams) else StateParams(float(p), float(theta_deg))
    phi = bell_like_state(params.theta_deg, "Phi").projector()
    psi = bell_like_state(params.theta_deg, "Psi").projector()
    return DensityMatrix(params.p * phi + (1.0 - params.p) * psi, (2, 2))


def product_ket(*labels: str) -> np.ndarray:
    v = np.array([1.0 + 0j])
    for lab in labels:
        v = np.kron(v, KETS[lab])
    return v


def mub_qubit() -> list[ProjectiveMeasurement]:
    """Eigenbases of sigma_x, sigma_y, sigma_z as {D,A}, {R,L}, {H,V}."""
    return [
        ProjectiveMeasurement.from_basis("x", [KETS["D"], KETS["A"]]),
        ProjectiveMeasurement.from_basis("y", [KETS["R"], KETS["L"]]),
        ProjectiveMeasurement.from_basis("z", [KETS["H"], KETS["V"]]),
    ]


def _rot(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, s], [-s, c]], dtype=complex)


def jones_matrix(plate: WavePlate) -> np.ndarray:
    """Jones matrix of a wave plate with its fast axis at ``axis_deg`` from H.

    Half-wave: reflection about the axis. Quarter-wave: R(-t) diag(1, i) R(t).
    """
    t = math.radians(plate.axis_deg)
    if plate.kind == "half":
        c2, s2 = math.cos(2 * t), math.sin(2 * t)
        return np.array([[c2, s2], [s2, -c2]], dtype=complex)
    return _rot(-t) @ np.diag([1.0, 1j]) @ _rot(t)


def projector_from_plates(*plates: WavePlate) -> np.ndarray:
    """Projector selected by the PBS transmit port after the given plates.

    Light crosses the plates in argument order, so the composed Jones matrix is
    U = J_last ... J_first and the projector is U^dagger |H><H| U.
    """
    u = np.eye(2, dtype=complex)
    for plate in plates:
        u = jones_matrix(plate) @ u
    h = np.outer(KETS["H"], KETS["H"].conj())
    return u.conj().T @ h @ u


# (basis label, outcome, P1 kind, theta1, P2 kind, theta2)
PLATE_SETTINGS = (
    ("x", 0, "half", 22.5, "half", 22.5),
    ("x", 1, "half", -22.5, "half", -22.5),
    ("y", 0, "quarter", 45.0, "quarter", -45.0),
    ("y", 1, "quarter", -45.0, "quarter", 45.0),
    ("z", 0, "half", 0.0, "half", 0.0),
    ("z", 1, "half", 45.0, "half", 45.0),
)


@dataclass(frozen=True)
class PlateCheck:
    basis: str
    outcome: int
    single_plate_distance: float
    single_plate_matched_outcome: int | None
    two_plate_distance: float
    two_plate_matched: tuple[str, int] | None


def check_plate_table(tol: float = 1e-12) -> list[PlateCheck]:
    """Compare each wave-plate row against the MUB projectors.

    Two readings are evaluated: P1 alone in front of the PBS, and P1 followed
    by P2. Distances are max-entry distances to the intended projector; the
    ``matched`` fields name whichever MUB projector the plates actually select.
    """
    mubs = {m.label: m for m in mub_qubit()}
    everything = [(m.label, i, p) for m in mubs.values() for i, p in enumerate(m.projectors)]
    rows = []
    for label, outcome, k1, t1, k2, t2 in PLATE_SETTINGS:
        target = mubs[label].projectors[outcome]
        single = projector_from_plates(WavePlate(k1, t1))
        double = projector_from_plates(WavePlate(k1, t1), WavePlate(k2, t2))

        single_match = next(
            (i for i, p in enumerate(mubs[label].projectors) if np.max(np.abs(single - p)) < tol), None
        )
        double_match = next(
            ((lab, i) for lab, i, p in everything if np.max(np.abs(double - p)) < tol), None
        )
        rows.append(
            PlateCheck(
                label,
                outcome,
                float(np.max(np.abs(single - target))),
                single_match,
                float(np.max(np.abs(double - target))),
                double_match,
            )
        )
    return rows
