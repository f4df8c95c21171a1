"""Spectral-Galerkin simulator and verification harness for a weakly damped
coupled Ginzburg-Landau/Schrodinger pair system (BCS-BEC crossover regime)."""

from .model import Forcing, PhysParams, ValidityReport, from_original_variables, to_original_variables, validate_params
from .spectral import (
    BoxDomain,
    FieldNorms,
    GridField,
    SpectralField,
    analyze,
    cubic_term,
    l4_norm4,
    mixed_grad_sq_integral,
    norms,
    synthesize,
)
from .dynamics import (
    BlowUpError,
    LinearBlock,
    SystemState,
    Trajectory,
    integrate,
    linear_block,
    linear_exact_step,
    record_trajectory,
    rhs,
    step,
)
from .diagnostics import (
    Certificate,
    DiagnosticsRecord,
    EnergyWeights,
    absorbing_fit,
    compute_record,
    e1,
    e2,
    e3,
    h2_monitor,
    identity_residuals,
    integral_monitor,
    upsilon1,
    upsilon2,
)
from .decomposition import (
    ContractionReport,
    SplitTrajectory,
    contraction_certificate,
    difference_split,
    holder_time_estimate,
    lipschitz_estimate,
    phi_c,
    phi_d_exact,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
