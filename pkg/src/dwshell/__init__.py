"""Davis-Wielandt shells, rotated scaled relative graphs, and the
separation and stability certificates built on them."""

from .geometry import BoundaryCurve2D
from .graphs import (
    PhaseInterval,
    SectorialPhases,
    Texture,
    nnr_sample,
    numerical_range_boundary,
    sectorial_phases,
    segmental_phases,
    texture_check,
    theta_srg,
    theta_srg_phases,
)
from .linalg import (
    EigenPair,
    Hyperplane3,
    Paraboloid,
    ShellPoint,
    haar_unitary,
    hermitian_extreme_eigs,
    lift_spectrum,
    singular_value_extremes,
    toeplitz_parts,
)
from .separation import (
    SeparationVerdict,
    check_condition,
    construct_singularizing_unitary,
    dw_separation,
    eigen_cone_bound,
    implication_audit,
    srg_phase_condition,
    theta_srg_separation,
    unitary_orbit_falsifier,
)
from .shell import (
    GainInterval,
    InverseShellBoundary,
    ShellBoundary,
    dw_boundary,
    dw_support_point,
    f_inv_map,
    inverse_dw_boundary,
    inverse_gain_interval,
    inverse_numerical_range,
    zero_eigen_normality,
)
from .stability import (
    FrequencyGrid,
    StabilityReport,
    StateSpaceSystem,
    default_frequency_grid,
    freq_response,
    nyquist_eigenloci,
    stability_dw,
    stability_gain_phase,
    stability_theta_srg,
)
from .tomography import (
    CrossSectionProblem,
    DualSolveResult,
    InfeasibleSliceError,
    SolverFailureError,
    cross_section_extremum,
    plot_ssg,
    plot_theta_srg,
    plot_theta_srg_via_vnumran,
)

__version__ = "0.1.0"
