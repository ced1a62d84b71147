"""Entropic and coherence uncertainty bounds for two-qubit polarization states,
with simulated tomography and parameter sweeps."""

from .errors import (
    AngleOutOfRange,
    DimensionMismatch,
    EurcohError,
    InvalidConfig,
    InvalidSubsystem,
    MalformedCsv,
    NoConvergence,
    NotAProbabilityVector,
    NotHermitian,
    NotPSD,
    TraceMismatch,
    UnderdeterminedSettings,
)
from .fuzz import FuzzSummary, bound_fuzz
from .infotheory import (
    UncertaintyReport,
    conditional_entropy,
    cur_report,
    eur_report,
    holevo_quantity,
    is_complete_mub,
    mutual_information,
    overlap_factor_b,
    relative_entropy_coherence,
    shannon_entropy,
    uncertainty_report,
    unilateral_coherence,
    von_neumann_entropy,
)
from .measurement import MeasurementOutcomeEnsemble, dephase_global, measure_local
from .qla import (
    DensityMatrix,
    Spectrum,
    eig_hermitian,
    eigvals_hermitian,
    matrix_sqrt_psd,
    partial_trace,
    tensor_product,
    validate_density,
)
from .states import (
    KETS,
    ProjectiveMeasurement,
    PureState,
    StateParams,
    WavePlate,
    bell_diagonal_state,
    bell_like_state,
    jones_matrix,
    mub_qubit,
    projector_from_plates,
)
from .sweep import SweepConfig, SweepRow, read_sweep_csv, run_sweep
from .tomography import (
    CountTable,
    ErrorBarReport,
    ReconstructionResult,
    TomographySetting,
    fidelity,
    linear_reconstruct,
    mle_reconstruct,
    monte_carlo_errors,
    simulate_counts,
    standard_settings,
)

__version__ = "0.1.0"
