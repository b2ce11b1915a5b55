"""Independent numerical engine: Numerov propagation, finite-difference
residuals, adaptive quadrature and oscillation-safe integrals.

Nothing in this module knows about the closed-form eigenstates; it is the
verification side of every dual-route check in the package.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad

__all__ = [
    "Grid",
    "GridFunction",
    "ResidualReport",
    "QuadratureResult",
    "OscillatoryResult",
    "GridTooCoarse",
    "NumerovResolutionWarning",
    "numerov_integrate",
    "residual",
    "quadrature",
    "oscillatory_integral",
]


class GridTooCoarse(ValueError):
    """The requested grid cannot support the finite-difference stencil."""

    def __init__(self, message, required_dx):
        super().__init__(message)
        self.required_dx = required_dx


class NumerovResolutionWarning(UserWarning):
    """Q * dx^2 exceeded 1 somewhere: the recursion is formally stable but
    the local oscillation is not resolved."""


@dataclass(frozen=True)
class Grid:
    """Uniform grid x0 + k*dx for k = 0..n-1."""

    x0: float
    dx: float
    n: int

    def __post_init__(self):
        if self.dx <= 0:
            raise ValueError("dx must be positive")
        if self.n < 3:
            raise ValueError("need at least 3 points")

    @classmethod
    def from_interval(cls, a, b, dx):
        """Grid spanning [a, b]; dx is adjusted down so the span is exact."""
        if not b > a:
            raise ValueError("need b > a")
        n = int(round((b - a) / dx)) + 1
        return cls(x0=a, dx=(b - a) / (n - 1), n=n)

    def points(self):
        return self.x0 + self.dx * np.arange(self.n)


@dataclass(frozen=True)
class GridFunction:
    grid: Grid
    values: np.ndarray
    overflow: bool = False

    def __post_init__(self):
        if len(self.values) != self.grid.n:
            raise ValueError("values length must equal grid.n")


@dataclass(frozen=True)
class ResidualReport:
    """Norms of psi'' + Q psi, scaled by the largest sampled |psi|."""

    max_abs: float
    l2: float
    normalized_by: float

    @property
    def max_rel(self):
        return self.max_abs / self.normalized_by

    @property
    def l2_rel(self):
        return self.l2 / self.normalized_by


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    err_estimate: float
    subdivisions: int
    converged: bool = True


@dataclass(frozen=True)
class OscillatoryResult:
    value: float
    err_bound: float
    segments: int
    truncated_at: Optional[float] = None  # x where the lobe sum was cut off


def numerov_integrate(q: Callable, grid: Grid, psi0: float, psi1: float) -> GridFunction:
    """Propagate psi'' + Q(x) psi = 0 with the O(dx^4) Numerov recursion.

    `q` is evaluated vectorised on the grid.  The first two values seed the
    recursion.  If |psi| leaves the representable range the overflow flag is
    set and the remaining entries are NaN.
    """
    x = grid.points()
    qv = np.asarray(q(x), dtype=float)
    h2 = grid.dx * grid.dx
    if np.max(np.abs(qv)) * h2 > 1.0:
        warnings.warn(
            f"Q*dx^2 reaches {np.max(np.abs(qv)) * h2:.3g} > 1: oscillation "
            "not resolved at this spacing",
            NumerovResolutionWarning,
            stacklevel=2,
        )
    f = 1.0 + (h2 / 12.0) * qv
    y = np.empty(grid.n)
    y[0], y[1] = psi0, psi1
    overflow = False
    for k in range(1, grid.n - 1):
        y[k + 1] = ((12.0 - 10.0 * f[k]) * y[k] - f[k - 1] * y[k - 1]) / f[k + 1]
        if not math.isfinite(y[k + 1]) or abs(y[k + 1]) > 1e300:
            y[k + 2 :] = np.nan
            y[k + 1] = np.nan
            overflow = True
            break
    return GridFunction(grid=grid, values=y, overflow=overflow)


def residual(values, grid: Grid, q_values) -> ResidualReport:
    """Residual of psi'' + Q psi = 0 with psi'' from the 5-point stencil.

    The stencil is O(dx^4), matching Numerov's order.  Norms are reported
    relative to max|psi| over the grid (see `max_rel`).  Grids coarser than
    dx = 1e-2 are refused outright with a hint.
    """
    if grid.dx > 1e-2:
        qmax = float(np.max(np.abs(q_values)))
        hint = min(1e-2, 0.05 / math.sqrt(qmax)) if qmax > 0 else 1e-2
        raise GridTooCoarse(
            f"dx={grid.dx:g} too coarse for the 5-point stencil; "
            f"need dx <= 0.01 (local oscillation suggests dx <~ {hint:.2g})",
            required_dx=hint,
        )
    y = np.asarray(values, dtype=float)
    qv = np.asarray(q_values, dtype=float)
    if len(y) != grid.n or len(qv) != grid.n:
        raise ValueError("values and q_values must match the grid")
    h2 = grid.dx * grid.dx
    d2 = (-y[:-4] + 16.0 * y[1:-3] - 30.0 * y[2:-2] + 16.0 * y[3:-1] - y[4:]) / (12.0 * h2)
    res = d2 + qv[2:-2] * y[2:-2]
    scale = float(np.max(np.abs(y)))
    if scale == 0.0:
        return ResidualReport(max_abs=0.0, l2=0.0, normalized_by=1.0)
    return ResidualReport(
        max_abs=float(np.max(np.abs(res))),
        l2=float(np.sqrt(np.sum(res * res) * grid.dx)),
        normalized_by=scale,
    )


def quadrature(f, a, b, tol=1e-10, limit=200, points=None) -> QuadratureResult:
    """Adaptive Gauss-Kronrod integral of f over [a, b].

    Wraps scipy's QUADPACK adaptive rule; returns the value together with
    the error estimate and the number of subintervals used.  On failure to
    converge within the subdivision budget the partial result is returned
    with `converged=False`.
    """
    if not b > a:
        raise ValueError("need b > a")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = quad(f, a, b, epsabs=tol, epsrel=tol, limit=limit,
                   points=points, full_output=True)
    value, err, info = out[0], out[1], out[2]
    converged = len(out) == 3
    return QuadratureResult(
        value=float(value),
        err_estimate=float(err),
        subdivisions=int(info.get("last", 0)),
        converged=converged,
    )


# --- oscillation-safe integration ------------------------------------------
#
# Integrals of the form  int envelope(x) * trig(phase(x)) dx  with a phase
# whose rate grows without bound (here: theta' ~ cosh^nu) defeat plain
# adaptive quadrature: beyond the point where the rule resolves a period the
# samples are effectively random.  Between consecutive zeros of the trig
# factor the integrand has one sign, so the integral is an alternating
# series of lobe areas; once the lobes decrease, truncation is safe with the
# first omitted lobe bounding the error.  Each lobe spans half a period and
# is integrated exactly enough by 12-point Gauss-Legendre.

_GL_NODES, _GL_WEIGHTS = leggauss(12)


def _lobe_sums(envelope, phase, trig, edges):
    """Gauss-Legendre integral of envelope*trig(phase) on each [e_k, e_k+1]."""
    left = edges[:-1]
    width = np.diff(edges)
    x = left[:, None] + (0.5 * (_GL_NODES + 1.0))[None, :] * width[:, None]
    vals = envelope(x) * trig(phase(x))
    return 0.5 * width * (vals @ _GL_WEIGHTS)


def oscillatory_integral(
    envelope,
    phase,
    phase_inverse,
    a,
    b=None,
    kind="cos",
    tol=1e-12,
    batch=512,
    max_segments=5_000_000,
) -> OscillatoryResult:
    """int_a^b envelope(x) * cos_or_sin(phase(x)) dx, phase increasing.

    Parameters
    ----------
    envelope, phase : callables, vectorised over x
        phase must be strictly increasing on [a, b).
    phase_inverse : callable
        Maps phase values back to x (vectorised).
    a, b : floats
        b=None integrates until the lobes decay below `tol`, which requires
        envelope/phase_rate -> 0.
    kind : 'cos' or 'sin'

    The integrand keeps one sign between consecutive zeros of the trig
    factor, so the lobe areas form an (eventually) alternating decreasing
    series; truncation error is bounded by the first omitted lobe.  Returns
    the value, that bound, and the lobe count.  Raises if the lobes neither
    decay nor reach b within `max_segments`.
    """
    if kind == "cos":
        trig = np.cos
        offset = 0.5 * math.pi  # zeros of cos at pi/2 + k pi
    elif kind == "sin":
        trig = np.sin
        offset = 0.0  # zeros of sin at k pi
    else:
        raise ValueError("kind must be 'cos' or 'sin'")

    theta_a = float(phase(a))
    theta_b = float(phase(b)) if b is not None else math.inf
    # first trig zero at or beyond theta_a
    k0 = math.ceil((theta_a - offset) / math.pi)
    first_zero = offset + k0 * math.pi
    if first_zero >= theta_b:
        # less than one lobe in range: single panel
        val = float(_lobe_sums(envelope, phase, trig, np.array([a, b]))[0])
        return OscillatoryResult(value=val, err_bound=0.0, segments=1)

    # opening partial lobe [a, x(first_zero)]
    x_first = float(phase_inverse(np.array([first_zero]))[0])
    total = float(_lobe_sums(envelope, phase, trig, np.array([a, x_first]))[0])
    err_bound = 0.0
    segments = 1
    truncated_at = None
    prev_edge_x = x_first
    prev_theta = first_zero
    decayed = False

    small_streak = 0
    while True:
        if b is not None:
            remaining = max(1, int((theta_b - prev_theta) // math.pi) + 1)
            k = min(batch, remaining)
        else:
            k = batch
        thetas = prev_theta + math.pi * np.arange(1, k + 1)
        if b is not None:
            thetas = thetas[thetas <= theta_b + 1e-9]
            if len(thetas) == 0:
                break
        edges = np.concatenate(([prev_edge_x], phase_inverse(thetas)))
        lobes = _lobe_sums(envelope, phase, trig, edges)
        abs_lobes = np.abs(lobes)

        # truncate once several consecutive lobes fall below tol
        cut = None
        for i, al in enumerate(abs_lobes):
            small_streak = small_streak + 1 if al < tol else 0
            if small_streak >= 3:
                cut = i + 1
                break
        if cut is not None:
            total += float(np.sum(lobes[:cut]))
            segments += cut
            err_bound += float(abs_lobes[cut - 1])
            truncated_at = float(edges[cut])
            decayed = True
            break

        total += float(np.sum(lobes))
        segments += len(lobes)
        prev_edge_x = float(edges[-1])
        prev_theta = float(thetas[-1])
        if segments > max_segments:
            raise RuntimeError(
                f"oscillatory integral did not decay within {max_segments} lobes"
            )
        if b is not None and prev_theta >= theta_b - 1e-9:
            break

    if b is not None and not decayed and prev_edge_x < b:
        # closing partial lobe
        total += float(_lobe_sums(envelope, phase, trig, np.array([prev_edge_x, b]))[0])
        segments += 1
    if b is None and not decayed:
        raise RuntimeError("semi-infinite oscillatory integral requires decay")
    return OscillatoryResult(
        value=total, err_bound=err_bound, segments=segments, truncated_at=truncated_at
    )
