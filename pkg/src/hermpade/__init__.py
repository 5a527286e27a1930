"""Row sequences of Hermite-Padé approximants at arbitrary precision."""
from .approximants import (
    ApproximantRecord,
    FromHermitePade,
    defect_diagnostics,
    hermite_pade,
    incomplete_pade,
    normalize_l1,
    pade,
)
from .numerics import (
    Polynomial,
    PrecisionContext,
    coefficient_norm,
    get_context,
    null_space_vector,
    roots,
    sup_norm_on_circle,
    valuation_at_zero,
)
from .row_analysis import (
    cluster_zeros,
    convergence_on_circle,
    derivative_rates,
    fit_geometric_rate,
    inverse_diagnosis,
    sweep,
)
from .series import (
    Atom,
    CoefficientSeries,
    MeromorphicModel,
    SystemModel,
    associated_system,
    disk_radii_Rm,
    radius_R0,
    system_from_json,
    taylor_coefficients,
)
from .system_poles import (
    algebraically_independent,
    cancellation_system,
    enumerate_system_poles,
    predicted_theta,
    r_xi_s,
    star_radii,
)

__version__ = "0.1.0"

__all__ = [
    "ApproximantRecord", "Atom", "CoefficientSeries", "FromHermitePade", "MeromorphicModel", "Polynomial",
    "PrecisionContext", "SystemModel", "algebraically_independent", "associated_system",
    "cancellation_system", "cluster_zeros", "coefficient_norm", "convergence_on_circle",
    "defect_diagnostics", "derivative_rates", "disk_radii_Rm", "enumerate_system_poles",
    "fit_geometric_rate", "get_context", "hermite_pade", "incomplete_pade", "inverse_diagnosis",
    "normalize_l1", "null_space_vector", "pade", "predicted_theta", "r_xi_s", "radius_R0", "roots",
    "star_radii", "sup_norm_on_circle", "sweep", "system_from_json", "taylor_coefficients",
    "valuation_at_zero",
]
