"""Simulation and numerical verification toolkit for a planar cooperative
population map (larvae/adult mosquito dynamics).

See the subpackage modules: `core` (the map itself), `equilibria` (fixed
points and types), `geometry` (trapping rectangle and invariant regions),
`lyapunov` (the monotone functional), `cycles` (periodic-orbit exclusion),
`trajectory` (orbit limits and basins), `cli` (command-line front end).
"""

from .core import (
    Params,
    State,
    emergence_response,
    step_general,
    step_w0,
    validate_params,
)
from .cycles import (
    Cycle,
    CycleCertificate,
    CycleCoefficients,
    brute_force_cycle_search,
    cycle_coefficients,
    no_cycle_certificate,
    quartic_residual,
    reduced_quadratic,
    shifted_quadratic,
    two_cycle_y_of_x,
)
from .equilibria import (
    EquilibriumReport,
    FixedPointClass,
    RegimeQuantities,
    classify_fixed_point,
    classify_origin_regime,
    eigenvalues_2x2,
    equilibrium_report,
    jacobian,
    regime_quantities,
)
from .geometry import (
    InvarianceReport,
    RegionBounds,
    RegionLabel,
    check_invariance,
    omega_bounds,
    region_of,
)
from .lyapunov import (
    LyapunovSample,
    MonotonicityReport,
    delta_phi_closed,
    delta_phi_direct,
    lyapunov_sample,
    monotonicity_report,
    phi,
)
from .trajectory import (
    BasinRaster,
    EscapeProbeReport,
    OmegaLimitClass,
    TrajectoryReport,
    basin_raster,
    escape_probe,
    iterate,
)

__version__ = "0.1.0"

__all__ = [
    "Params", "State", "validate_params", "emergence_response",
    "step_general", "step_w0",
    "RegimeQuantities", "FixedPointClass", "EquilibriumReport",
    "regime_quantities", "jacobian", "eigenvalues_2x2",
    "classify_fixed_point", "classify_origin_regime", "equilibrium_report",
    "RegionLabel", "RegionBounds", "InvarianceReport",
    "omega_bounds", "region_of", "check_invariance",
    "LyapunovSample", "MonotonicityReport",
    "phi", "delta_phi_closed", "delta_phi_direct", "lyapunov_sample",
    "monotonicity_report",
    "CycleCoefficients", "CycleCertificate", "Cycle",
    "two_cycle_y_of_x", "cycle_coefficients", "quartic_residual",
    "reduced_quadratic", "shifted_quadratic", "no_cycle_certificate",
    "brute_force_cycle_search",
    "OmegaLimitClass", "TrajectoryReport", "EscapeProbeReport", "BasinRaster",
    "iterate", "escape_probe", "basin_raster",
    "__version__",
]
