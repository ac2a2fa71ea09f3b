"""Water waves with constant vorticity in conformal coordinates.

A pseudo-spectral library for the 2D infinite-depth gravity water wave
system written in holomorphic position/velocity variables (W, Q), together
with its linearization, a quadratic normal form, and the cubic-corrected
energies used to verify long-time (cubic lifespan) behaviour numerically.
"""

__version__ = "0.1.0"

from .spectral import (
    CUSP_FLOOR,
    MEAN_TOL_FACTOR,
    TRUNC_TOL,
    CuspError,
    Domain,
    DomainMismatchError,
    HolomorphyReport,
    MeanNotZeroError,
    SpectralError,
    SpectralField,
    antiderivative,
    derivative,
    forward_transform,
    grid_integral,
    half_derivative,
    hilbert,
    holomorphy_report,
    inner,
    integral,
    product,
    project_P,
    project_Pbar,
    reciprocal_one_plus,
    truncate_to,
)
from .state import (
    AuxiliaryFields,
    ConstraintError,
    ControlNorms,
    DiagonalState,
    Params,
    WaveState,
    auxiliary_fields,
    auxiliary_transport,
    besov_sup,
    control_norms,
    frequency_shift,
    m_fields,
    taylor_margin,
    to_diagonal,
    transport_coefficients,
    validate_state,
)
from .evolution import (
    CSV_HEADER,
    ENERGY_VARIANT,
    DiagnosticsRecord,
    RealFormState,
    RhsFull,
    cfl_limit,
    diagnostics,
    dispersion_roots,
    energy,
    evolve,
    load_snapshot,
    momentum,
    realform_from_state,
    rhs_diff,
    rhs_full,
    rhs_linear,
    rhs_realform,
    save_snapshot,
    step,
)
from .linearized import (
    Background,
    LinSources,
    LinearizedState,
    background,
    energy_lin2,
    energy_lin3,
    evolve_pair,
    lin_sources,
    rhs_linearized,
)
from .normalform import (
    QuadraticCorrection,
    SymbolTable,
    cubic_residual,
    quadratic_correction,
    quadratic_correction_symbols,
    symbols,
    verify_symbol_systems,
)
from .energies import (
    EnergyBreakdown,
    GoodVariables,
    amplitude_coefficients,
    diff_n,
    drift_scan,
    energy0,
    energy_n,
    energy_n0_cubic,
    energy_n0_rate,
    energy_n_high,
    energy_nf_high,
    good_variables,
    h_n,
    state_from_diagonal,
)
