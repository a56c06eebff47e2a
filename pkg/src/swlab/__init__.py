"""swlab: a numerical laboratory for sum-of-squares operators.

Builds discrete Hormander sum-of-squares operators on Cartesian grids and
verifies their constructive theory end to end: sub-Riemannian distance
fields obtained as monotone limits of elliptic regularizations, subelliptic
wave evolution with sharp domain-of-dependence cones, spectral functional
calculus (heat, wave, half-wave groups, fractional powers), and the
degenerate-elliptic extension problem whose weighted trace derivative
recovers fractional powers up to an explicit constant.
"""

from swlab.geometry import (
    Grid,
    VectorField,
    VectorFieldSet,
    AssembledOperator,
    BracketReport,
    build_grid,
    make_fields,
    fields_from_table,
    assemble_vector_field,
    assemble_sum_of_squares,
    bracket_rank,
    h1x_norm,
    PRESETS,
)
from swlab.distance import (
    DistanceField,
    RegularizationSchedule,
    ControlPath,
    ConeSpec,
    ConvergenceReport,
    cometric_at,
    riemannian_distance_field,
    subriemannian_distance,
    control_path_energy,
    ball_mask,
    ball_comparison,
)
from swlab.wave import (
    WaveState,
    Trajectory,
    EnergyEntry,
    EnergyReport,
    CutoffSpec,
    LeakageReport,
    cfl_max_step,
    solve_wave,
    energy,
    energy_report,
    cutoff_data,
    cone_leakage,
)
from swlab.spectral import (
    SpectralDecomposition,
    ModalCoefficients,
    MatrixOperator,
    eigendecomposition,
    project,
    heat_semigroup,
    fractional_power,
    wave_propagator,
    half_wave,
    masuda_residual,
    spectral_power_heat_bound,
)
from swlab.extension import (
    theta,
    theta_k,
    constant_Ds,
    constant_Cs,
    ExtensionSolution,
    extension_solution,
    extension_by_heat_quadrature,
    pde_residual,
    trace_derivative_limit,
    fuchs_roots,
    fuchsian_residual,
    indicial_exponent_fit,
)

__version__ = "0.1.0"
