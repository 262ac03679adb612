"""Stability of energy-stationary pairs on cones and cylinders.

The package splits into four layers.  ``ode_core`` holds the integrator
(adaptive Dormand-Prince with dense output, compiled kernel when the
extension built, pure Python otherwise), root finding, node counting and
quadrature.  ``profiles`` produces the background solutions, ``spectra``
the linearized 1-D eigenvalues and cross-section Neumann eigenvalues, and
``stability`` the second-variation index and the final verdict.
"""

from ._kernel import active_kernel
from .errors import (BracketError, ConvergenceError, EigenSearchError,
                     EnstabError, NonFiniteState, ResonanceError,
                     ShootingError, StepSizeUnderflow)
from .ode_core import (Grid, Trajectory, composite_boole, composite_simpson,
                       count_nodes, find_root, integrate_ivp, uniform_grid)
from .profiles import (NonlinearitySpec, Profile, ShootConfig, boundary_data,
                       energy, max_ode_residual, ode_residual,
                       parse_nonlinearity, profile_to_csv, solve_1d,
                       solve_radial)
from .spectra import (EigenResult, NeumannDomainSpec, alpha_spectrum,
                      fd_spectrum_2d, neumann_lambda1, nondegeneracy_check,
                      nuhat_first, parse_domain, spectrum_to_csv)
from .stability import (HProfile, StabilityReport, SweepResult,
                        classify_cone, classify_cylinder,
                        cone_identity_residual, cylinder_identity_residual,
                        hprime_monotonicity_check, lagrange_multiplier,
                        mode_second_variation, rho_index, solve_h_cone,
                        solve_h_cylinder, sweep_rho, sweep_to_csv,
                        torsion_beta)

__version__ = "0.1.0"

__all__ = [
    "active_kernel",
    "BracketError", "ConvergenceError", "EigenSearchError", "EnstabError",
    "NonFiniteState", "ResonanceError", "ShootingError", "StepSizeUnderflow",
    "Grid", "Trajectory", "composite_boole", "composite_simpson",
    "count_nodes", "find_root", "integrate_ivp", "uniform_grid",
    "NonlinearitySpec", "Profile", "ShootConfig", "boundary_data", "energy",
    "max_ode_residual", "ode_residual", "parse_nonlinearity",
    "profile_to_csv", "solve_1d", "solve_radial",
    "EigenResult", "NeumannDomainSpec", "alpha_spectrum", "fd_spectrum_2d",
    "neumann_lambda1", "nondegeneracy_check", "nuhat_first", "parse_domain",
    "spectrum_to_csv",
    "HProfile", "StabilityReport", "SweepResult", "classify_cone",
    "classify_cylinder", "cone_identity_residual",
    "cylinder_identity_residual", "hprime_monotonicity_check",
    "lagrange_multiplier", "mode_second_variation", "rho_index",
    "solve_h_cone", "solve_h_cylinder", "sweep_rho", "sweep_to_csv",
    "torsion_beta",
    "__version__",
]
