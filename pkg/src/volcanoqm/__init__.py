"""Quantum mechanics in cosh-sech volcano potentials.

Library layout:

- `potential`    construction, classification and classical geometry
- `classical`    trajectories, regimes, oscillation periods
- `exact`        the closed-form degenerate bound-state pair
- `numerics`     Numerov, residuals, quadrature (the independent engine)
- `observables`  expectation values, divergences, momentum spectrum
- `cli`          command-line front end (`volcanoqm ...`)
"""

from .potential import (
    CaseClass,
    Convention,
    CoshSechParams,
    CoshSechPotential,
    GeneratedPotential,
    QuarticWell,
    classify,
    eval_potential,
    extrema,
    from_generator,
    taylor_quartic,
    turning_points,
)
from .classical import (
    Regime,
    Trajectory,
    allowed_regions,
    classify_initial,
    integrate_trajectory,
    oscillation_period,
)
from .exact import (
    ExactState,
    Parity,
    PhaseIntegral,
    bound_state_window,
    constraint_params,
    eigen_energy,
    eval_state,
    make_state,
    node_count,
    node_density,
    node_positions,
    norm_constant,
    ode_residual,
    state_derivative,
    wronskian,
)
from .numerics import (
    Grid,
    GridFunction,
    QuadratureResult,
    ResidualReport,
    numerov_integrate,
    oscillatory_integral,
    quadrature,
    residual,
)
from .observables import (
    Converged,
    CutoffSeries,
    Diverging,
    expect_momentum,
    expect_p2,
    expect_position,
    expect_x2,
    momentum_spectrum,
    regularized_energy,
)

__version__ = "0.1.0"
