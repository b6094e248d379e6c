"""Solver toolkit for two coupled Ginzburg-Landau scalar fields.

Classifies the fixed points of the static field equations, finds the
eigenvalue pairs at which regular Z2-symmetric localized solutions exist by
a nested-bisection shooting method, and computes energy profiles, total
energies and rescaled-variable tables.
"""

from .model import (
    DimensionfulParams,
    FieldState,
    ModelParams,
    conserved_quantity,
    energy_density,
    nondimensionalize,
    potential,
    potential_gradient,
    rhs,
)
from .fixed_points import (
    FixedPoint,
    MinimaConditions,
    check_cond_max,
    characteristic_roots,
    classify,
    fixed_point_absences,
    fixed_points,
    jacobian,
    minima_conditions,
    potential_gaps,
)
from .integrator import (
    IntegratorConfig,
    Termination,
    Trajectory,
    active_kernel,
    dense_resample,
    integrate,
)
from .shooting import (
    BarredResult,
    EigenResult,
    ShootSpec,
    ShootingError,
    SweepRow,
    TrajectoryClass,
    bisect_mu2,
    classify_trajectory,
    solve_barred,
    solve_eigenpair,
    sweep,
)
from .observables import (
    EnergyProfile,
    PhaseSeries,
    RescaledResult,
    energy_profile,
    inverse_rescale,
    phase_series,
    rescale_result,
    total_energy,
)

__version__ = "0.1.0"
