"""Classical point-particle dynamics in a volcano potential.

Energy E = v^2/2 + V(x) decides everything: below the barrier top a
particle started inside the well oscillates forever, one started beyond
the outer turning point runs away to infinity, and the band between the
turning points is classically forbidden.  Exactly at the barrier energy
the motion follows the separatrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from . import numerics
from .potential import (
    CoshSechParams,
    CoshSechPotential,
    NoTurningPoints,
    extrema,
    outer_intersection,
    turning_points,
)

__all__ = [
    "Regime",
    "PhasePoint",
    "RegionMap",
    "Trajectory",
    "classify_initial",
    "allowed_regions",
    "integrate_trajectory",
    "oscillation_period",
]

SEPARATRIX_TOL = 1e-9  # |E - v_max| below this is numerically the separatrix
ESCAPE_HORIZON = 20.0


class Regime(Enum):
    OSCILLATING = "oscillating"
    ESCAPING = "escaping"
    SEPARATRIX = "separatrix"


@dataclass(frozen=True)
class PhasePoint:
    t: float
    x: float
    v: float


@dataclass(frozen=True)
class RegionMap:
    """Partition of the line at fixed energy (intervals as (lo, hi))."""

    energy: float
    allowed: Tuple[Tuple[float, float], ...]
    forbidden: Tuple[Tuple[float, float], ...]
    escape: Tuple[Tuple[float, float], ...]


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    energy: np.ndarray
    escaped: bool = False

    @property
    def energy_drift(self):
        """max |E(t) - E(0)| / |E(0)| over the integrated points."""
        e0 = self.energy[0]
        scale = abs(e0) if e0 != 0 else 1.0
        return float(np.max(np.abs(self.energy - e0)) / scale)

    def points(self):
        return [PhasePoint(t, x, v) for t, x, v in zip(self.t, self.x, self.v)]


def _energy(pot, x0, v0):
    return 0.5 * v0 * v0 + float(pot(x0))


def classify_initial(params: CoshSechParams, x0, v0, separatrix_tol=SEPARATRIX_TOL):
    """Regime of the motion started from (x0, v0).

    Determined solely by the conserved energy and |x0| relative to the
    turning points; near-barrier energies within `separatrix_tol` are
    reported as SEPARATRIX (the classification is ill-posed there).
    """
    pot = CoshSechPotential(params)
    ext = extrema(params)
    energy = _energy(pot, x0, v0)
    if ext.has_central_well and abs(energy - ext.v_max) < separatrix_tol:
        return Regime.SEPARATRIX
    if not ext.has_central_well or energy > ext.v_max:
        return Regime.ESCAPING
    try:
        tp = turning_points(params, energy)
    except NoTurningPoints:
        # below the well bottom: no central allowed region at all
        return Regime.ESCAPING
    if abs(x0) <= tp.x1:
        return Regime.OSCILLATING
    return Regime.ESCAPING


def allowed_regions(params: CoshSechParams, energy) -> RegionMap:
    """Classically allowed / forbidden / escape intervals at energy E.

    The forbidden band (x1, x2) and its mirror exist exactly when
    v_min < E < v_max.  Below v_min there is no central region but the
    escape intervals beyond the outer intersection remain.
    """
    ext = extrema(params)
    inf = math.inf
    if not ext.has_central_well or energy >= ext.v_max:
        full = ((-inf, inf),)
        return RegionMap(energy=energy, allowed=full, forbidden=(), escape=full)
    if energy < ext.v_min:
        pot = CoshSechPotential(params)
        x2 = outer_intersection(pot, energy, ext.x_barrier)
        return RegionMap(
            energy=energy,
            allowed=((-inf, -x2), (x2, inf)),
            forbidden=((-x2, x2),),
            escape=((-inf, -x2), (x2, inf)),
        )
    tp = turning_points(params, energy)
    if tp.degenerate and tp.x1 == 0.0:
        return RegionMap(
            energy=energy,
            allowed=((0.0, 0.0), (-inf, -tp.x2), (tp.x2, inf)),
            forbidden=((-tp.x2, 0.0), (0.0, tp.x2)),
            escape=((-inf, -tp.x2), (tp.x2, inf)),
        )
    return RegionMap(
        energy=energy,
        allowed=((-tp.x1, tp.x1), (-inf, -tp.x2), (tp.x2, inf)),
        forbidden=((tp.x1, tp.x2), (-tp.x2, -tp.x1)),
        escape=((-inf, -tp.x2), (tp.x2, inf)),
    )


def integrate_trajectory(
    params: CoshSechParams,
    x0,
    v0,
    dt,
    n_steps,
    horizon=ESCAPE_HORIZON,
) -> Trajectory:
    """Velocity-Verlet integration of x'' = -V'(x) with the analytic force.

    Symplectic and time-reversible (a negative dt retraces the motion).
    Stops early with `escaped=True` once |x| crosses the horizon, where the
    volcano force grows exponentially and further stepping is meaningless.
    """
    if dt == 0:
        raise ValueError("dt must be nonzero")
    if n_steps < 1:
        raise ValueError("need n_steps >= 1")

    a1, a2, nu = params.a1, params.a2, params.nu
    two_nu = 2.0 * nu

    def force(x):
        # -V'(x) = -2 tanh x (a2 sech^2 x - nu a1 cosh^{2 nu} x)
        ch = math.cosh(x)
        return -2.0 * math.tanh(x) * (a2 / (ch * ch) - nu * a1 * ch ** two_nu)

    pot = CoshSechPotential(params)
    ts = np.empty(n_steps + 1)
    xs = np.empty(n_steps + 1)
    vs = np.empty(n_steps + 1)
    x, v = float(x0), float(v0)
    ts[0], xs[0], vs[0] = 0.0, x, v
    escaped = False
    filled = n_steps + 1
    try:
        f = force(x)
        for k in range(1, n_steps + 1):
            v_half = v + 0.5 * dt * f
            x = x + dt * v_half
            f = force(x)
            v = v_half + 0.5 * dt * f
            ts[k], xs[k], vs[k] = k * dt, x, v
            if abs(x) > horizon:
                escaped = True
                filled = k + 1
                break
    except OverflowError:
        escaped = True
        filled = k  # state before the overflowing step is the last valid one
    ts, xs, vs = ts[:filled], xs[:filled], vs[:filled]
    energy = 0.5 * vs * vs + np.asarray(pot(xs), dtype=float)
    return Trajectory(t=ts, x=xs, v=vs, energy=energy, escaped=escaped)


def oscillation_period(params: CoshSechParams, energy):
    """Period of bounded motion, T = 2 int_{-x1}^{x1} dx / sqrt(2 (E - V)).

    The inverse-square-root turning-point singularity is removed by the
    substitution x = x1 sin(phi): the cos(phi) Jacobian cancels the zero of
    E - V at the endpoint, leaving a smooth integrand for quadrature.
    """
    ext = extrema(params)
    if not ext.has_central_well:
        raise NoTurningPoints("no central well: no oscillation", "barrierless")
    if not (ext.v_min < energy < ext.v_max):
        raise NoTurningPoints(
            f"E={energy} outside the oscillation window ({ext.v_min}, {ext.v_max})",
            regime_hint="no bounded motion at this energy",
        )
    tp = turning_points(params, energy)
    pot = CoshSechPotential(params)
    x1 = tp.x1

    def integrand(phi):
        x = x1 * math.sin(phi)
        gap = energy - float(pot(x))
        if gap <= 0:
            # roundoff at the very endpoint: analytic limit sqrt(x1 / V'(x1))
            slope = float(pot.derivative(x1))
            return math.sqrt(x1 / slope) if slope > 0 else 0.0
        return x1 * math.cos(phi) / math.sqrt(2.0 * gap)

    q = numerics.quadrature(integrand, 0.0, 0.5 * math.pi, tol=1e-12)
    return 4.0 * q.value
