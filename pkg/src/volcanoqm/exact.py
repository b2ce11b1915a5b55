"""Closed-form bound states of the volcano Schrodinger problem.

With V from the cosh-sech family, the stationary equation in capital
couplings reads

    psi'' + (A1 cosh^{2 nu} x + A2 sech^2 x + A3) psi = 0,
    A1 = 2 a1,  A2 = 2 a2,  A3 = 2 E,

and admits the exactly solvable pair

    psi_even(x) = N cos(sqrt(A1) F(x)) / cosh^{nu/2} x
    psi_odd(x)  = N sin(sqrt(A1) F(x)) / cosh^{nu/2} x

whenever A2 = (nu/2)(nu/2 + 1) and A3 = -nu^2 / 4, i.e. E = -nu^2 / 8.
F(x) = int_0^x cosh^nu t dt is the phase integral; fixing its lower limit
at 0 makes the even/odd parity exact.  Both parities share the same energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import numerics
from .potential import (
    CoshSechParams,
    CoshSechPotential,
    EvaluationOverflow,
    cosh_power,
    extrema,
    log_cosh,
)

__all__ = [
    "Parity",
    "ExactState",
    "PhaseIntegral",
    "WindowReport",
    "constraint_params",
    "eigen_energy",
    "make_state",
    "eval_state",
    "state_derivative",
    "state_second_derivative",
    "norm_constant",
    "node_positions",
    "node_count",
    "node_density",
    "density_node_count",
    "wronskian",
    "ode_residual",
    "bound_state_window",
    "matched_potential",
]

_GL20_NODES, _GL20_WEIGHTS = leggauss(20)

# the paper-adjacent claim that the eigenvalue sits inside the classical
# window only when A1 exceeds nu/2; flagged, not enforced (see
# bound_state_window)
WINDOW_CLAIM = "A1 > nu/2"


class Parity(Enum):
    EVEN = "even"
    ODD = "odd"


def constraint_params(nu):
    """(A2, A3) that make the closed-form pair solve the equation."""
    if not nu > 0:
        raise ValueError(
            f"nu must be positive for normalisable states, got {nu}"
        )
    return (nu / 2.0) * (nu / 2.0 + 1.0), -nu * nu / 4.0


def eigen_energy(nu):
    """E = A3 / 2 = -nu^2 / 8."""
    if not nu > 0:
        raise ValueError(f"nu must be positive, got {nu}")
    return -nu * nu / 8.0


class PhaseIntegral:
    """F(x) = int_0^x cosh^nu t dt, odd and strictly increasing.

    Integer nu uses the closed-form reduction
        n F_n = cosh^{n-1} x sinh x + (n - 1) F_{n-2},
    seeded by F_0 = x, F_1 = sinh x.  Non-integer nu falls back to
    cumulative fixed-order Gauss-Legendre panels (unit-width, 20 nodes),
    which is exact to machine precision for this analytic integrand.
    """

    def __init__(self, nu):
        if not nu > 0:
            raise ValueError(f"nu must be positive, got {nu}")
        self.nu = float(nu)
        self._integer = float(nu).is_integer()

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        ax = np.abs(np.atleast_1d(x))
        if np.any(self.nu * ax > 700.0):
            raise EvaluationOverflow(
                f"phase integral overflows for nu={self.nu}, |x| up to {np.max(ax):.3g}"
            )
        out = self._on_nonnegative(ax) * np.sign(np.atleast_1d(x))
        out = out.reshape(np.shape(x)) if not scalar else float(out[0])
        return out

    def rate(self, x):
        """F'(x) = cosh^nu x."""
        return cosh_power(x, self.nu)

    def _on_nonnegative(self, ax):
        if self._integer:
            return self._closed_form(ax)
        return self._panel_quadrature(ax)

    def _closed_form(self, ax):
        n = int(self.nu)
        sh, ch = np.sinh(ax), np.cosh(ax)
        if n == 0:
            return ax.copy()
        if n == 1:
            return sh
        # climb the reduction two orders at a time from F_0 or F_1
        cur = sh if n % 2 else ax.copy()
        start = 1 if n % 2 else 0
        for m in range(start + 2, n + 1, 2):
            cur = (ch ** (m - 1) * sh + (m - 1) * cur) / m
        return cur

    def _panel_quadrature(self, ax):
        # cumulative unit panels [0,1],[1,2],... then a partial panel per point
        hi = float(np.max(ax)) if len(ax) else 0.0
        n_full = int(math.floor(hi))
        edges = np.arange(n_full + 1, dtype=float)
        if n_full > 0:
            lefts = edges[:-1]
            xs = lefts[:, None] + 0.5 * (_GL20_NODES + 1.0)[None, :]
            panel = 0.5 * (cosh_power(xs, self.nu) @ _GL20_WEIGHTS)
            prefix = np.concatenate(([0.0], np.cumsum(panel)))
        else:
            prefix = np.array([0.0])
        base = np.floor(ax).astype(int)
        base = np.minimum(base, n_full)
        frac_left = base.astype(float)
        width = ax - frac_left
        xs = frac_left[:, None] + (0.5 * (_GL20_NODES + 1.0))[None, :] * width[:, None]
        partial = 0.5 * width * (cosh_power(xs, self.nu) @ _GL20_WEIGHTS)
        return prefix[base] + partial

    def inverse(self, values):
        """x with F(x) = v, vectorised; safeguarded Newton on the monotone F."""
        if self._integer and int(self.nu) == 1:
            out = np.arcsinh(np.asarray(values, dtype=float))
            return out if np.ndim(values) else float(out)
        v = np.atleast_1d(np.asarray(values, dtype=float))
        sign = np.sign(v)
        target = np.abs(v)
        # F(x) ~ e^{nu x} / (nu 2^nu) for large x and F(x) >= x near 0, so
        # this hi overshoots the root slightly for every target
        hi = np.maximum(
            target + 0.5,
            np.log1p(self.nu * target * 2.0 ** self.nu) / self.nu + 1.0,
        )
        for _ in range(200):
            mask = self._on_nonnegative(hi) < target
            if not np.any(mask):
                break
            hi[mask] *= 1.4
            if np.max(hi) * self.nu > 700.0:
                raise EvaluationOverflow("phase inverse target out of range")
        lo = np.zeros_like(hi)
        x = hi.copy()
        # F is convex increasing, so Newton from above converges
        # monotonically; the lo/hi clamp is a pure safety net
        for _ in range(100):
            f = self._on_nonnegative(x) - target
            lo = np.where(f < 0, x, lo)
            hi = np.where(f > 0, x, hi)
            x_new = x - f / cosh_power(x, self.nu)
            bad = (x_new <= lo) | (x_new >= hi)
            x_new = np.where(bad, 0.5 * (lo + hi), x_new)
            if np.all(np.abs(x_new - x) <= 1e-15 * (1.0 + np.abs(x))):
                x = x_new
                break
            x = x_new
        out = sign * x
        return out if np.ndim(values) else float(out[0])


@dataclass(frozen=True)
class ExactState:
    """One closed-form eigenstate; energy is always -nu^2/8."""

    nu: float
    big_a1: float
    parity: Parity
    energy: float
    norm_const: float

    @property
    def big_a2(self):
        return constraint_params(self.nu)[0]

    def phase(self):
        return PhaseIntegral(self.nu)


def make_state(nu, big_a1, parity, normalized=True):
    """Construct an eigenstate; `normalized=False` leaves the constant at 1."""
    if isinstance(parity, str):
        parity = Parity(parity)
    if not big_a1 > 0:
        raise ValueError(f"A1 must be positive, got {big_a1}")
    n = norm_constant(nu, big_a1, parity) if normalized else 1.0
    return ExactState(
        nu=float(nu),
        big_a1=float(big_a1),
        parity=parity,
        energy=eigen_energy(nu),
        norm_const=n,
    )


def _trig(parity):
    return np.cos if parity is Parity.EVEN else np.sin


def eval_state(state, x, phase=None):
    """psi(x) = N trig(sqrt(A1) F(x)) / cosh^{nu/2} x."""
    F = phase or state.phase()
    x = np.asarray(x, dtype=float)
    theta = math.sqrt(state.big_a1) * F(x)
    env = np.exp(-0.5 * state.nu * log_cosh(x))
    return state.norm_const * _trig(state.parity)(theta) * env


def state_derivative(state, x, phase=None):
    """Analytic psi'(x) from the product rule on envelope * oscillation."""
    F = phase or state.phase()
    x = np.asarray(x, dtype=float)
    sa = math.sqrt(state.big_a1)
    theta = sa * F(x)
    env = np.exp(-0.5 * state.nu * log_cosh(x))
    t = np.tanh(x)
    rate = sa * cosh_power(x, state.nu)
    if state.parity is Parity.EVEN:
        core = -0.5 * state.nu * t * np.cos(theta) - rate * np.sin(theta)
    else:
        core = -0.5 * state.nu * t * np.sin(theta) + rate * np.cos(theta)
    return state.norm_const * env * core


def state_second_derivative(state, x, phase=None):
    """Analytic psi''(x).

    Differentiating twice, the mixed sin/cos terms cancel identically
    (theta'' = nu tanh x theta' matches the envelope's log-derivative), so

        psi'' = [nu^2/4 tanh^2 x - nu/2 sech^2 x - A1 cosh^{2 nu} x] psi.

    This is plain differentiation of the closed form; no eigenvalue
    condition enters.
    """
    x = np.asarray(x, dtype=float)
    t = np.tanh(x)
    sech2 = np.exp(-2.0 * log_cosh(x))
    g = (
        0.25 * state.nu * state.nu * t * t
        - 0.5 * state.nu * sech2
        - state.big_a1 * cosh_power(x, 2.0 * state.nu)
    )
    return g * eval_state(state, x, phase=phase)


def norm_constant(nu, big_a1, parity, tol=1e-13):
    """Normalisation constant.

    nu = 1 has the closed forms

        N_even = (pi/2 (1 + e^{-2 sqrt(A1)}))^{-1/2}
        N_odd  = (pi/2 (1 - e^{-2 sqrt(A1)}))^{-1/2}.

    Other nu integrate |psi|^2 numerically: the smooth half
    int cosh^{-nu} is a plain quadrature with the analytic tail bound
    int_L^inf cosh^{-nu} <= 2^nu e^{-nu L} / nu, and the oscillatory half
    int cosh^{-nu} cos(2 theta) is summed lobe by lobe.
    """
    if isinstance(parity, str):
        parity = Parity(parity)
    if not nu > 0:
        raise ValueError(f"nu must be positive for a normalisable state, got {nu}")
    if not big_a1 > 0:
        raise ValueError(f"A1 must be positive, got {big_a1}")
    if nu == 1.0:
        s = math.exp(-2.0 * math.sqrt(big_a1))
        if parity is Parity.EVEN:
            return (math.pi / 2.0 * (1.0 + s)) ** -0.5
        return (math.pi / 2.0 * (1.0 - s)) ** -0.5

    F = PhaseIntegral(nu)
    sa = math.sqrt(big_a1)
    env2 = lambda x: np.exp(-nu * log_cosh(x))
    # truncate where the envelope squared is below 1e-18
    L = (18.0 * math.log(10.0) + nu * math.log(2.0)) / nu
    smooth = numerics.quadrature(env2, 0.0, L, tol=tol).value
    tail = 2.0 ** nu * math.exp(-nu * L) / nu
    osc = numerics.oscillatory_integral(
        env2,
        phase=lambda x: 2.0 * sa * F(x),
        phase_inverse=lambda t: F.inverse(t / (2.0 * sa)),
        a=0.0,
        b=None,
        kind="cos",
        tol=1e-15,
    )
    # |psi_un|^2 = env^2 (1 +/- cos 2 theta)/2, so the full-line integral is
    # int_0^inf env^2 dx +/- int_0^inf env^2 cos(2 theta) dx
    sign = 1.0 if parity is Parity.EVEN else -1.0
    full_integral = (smooth + tail) + sign * osc.value
    return 1.0 / math.sqrt(full_integral)


def node_positions(state, x_max, verify=True):
    """Zeros of the oscillatory factor on [0, x_max], exact via the phase.

    Even states vanish where sqrt(A1) F = pi/2 + n pi; odd states where
    sqrt(A1) F = n pi (so x = 0 is always a node of the odd state).  Each
    interior node is confirmed as a sign change of psi unless the local
    half-wavelength falls below floating-point spacing.
    """
    if not x_max > 0:
        raise ValueError("x_max must be positive")
    F = state.phase()
    sa = math.sqrt(state.big_a1)
    theta_max = sa * F(x_max)
    if state.parity is Parity.EVEN:
        n_nodes = int(math.floor(theta_max / math.pi + 0.5))
        targets = (np.arange(n_nodes) + 0.5) * math.pi
        nodes = F.inverse(targets / sa) if n_nodes else np.array([])
    else:
        n_pos = int(math.floor(theta_max / math.pi))
        targets = (np.arange(n_pos) + 1.0) * math.pi
        pos = F.inverse(targets / sa) if n_pos else np.array([])
        nodes = np.concatenate(([0.0], pos))
    if len(nodes) > 2_000_000:
        raise RuntimeError(
            f"{len(nodes)} nodes on [0, {x_max}]; use node_count instead"
        )
    if verify:
        interior = nodes[nodes > 0]
        if len(interior):
            delta = 0.4 * math.pi / (sa * np.asarray(F.rate(interior)))
            ok = delta > 4.0 * np.spacing(interior)
            probe = interior[ok]
            d = delta[ok]
            left = eval_state(state, probe - d, phase=F)
            right = eval_state(state, probe + d, phase=F)
            if np.any(left * right >= 0):
                raise RuntimeError("node failed its sign-change confirmation")
    return nodes


def node_count(state, x_max):
    """Number of nodes on [0, x_max] from phase arithmetic alone."""
    F = state.phase()
    theta = math.sqrt(state.big_a1) * F(x_max)
    if state.parity is Parity.EVEN:
        return int(math.floor(theta / math.pi + 0.5))
    return int(math.floor(theta / math.pi)) + 1  # + the x = 0 node


def node_density(state, x):
    """dn/dx = sqrt(A1) cosh^nu x / (2 pi).

    n counts full 2 pi windings of the phase; one winding contains two
    zeros of either fixed-parity state, so cumulative zero counts are
    2 * int dn/dx (see density_node_count).  Strictly increasing in |x|.
    """
    return math.sqrt(state.big_a1) * cosh_power(x, state.nu) / (2.0 * math.pi)


def density_node_count(state, x_max, tol=1e-10):
    """Node count predicted by integrating the density, 2 zeros per winding.

    Deliberately routed through numerical quadrature of dn/dx so it stays
    an independent cross-check of node_positions.
    """
    q = numerics.quadrature(lambda x: node_density(state, x), 0.0, x_max, tol=tol)
    return 2.0 * q.value


def wronskian(nu, big_a1, x):
    """Wronskian of the unnormalised even/odd pair; identically sqrt(A1)."""
    even = ExactState(nu=nu, big_a1=big_a1, parity=Parity.EVEN,
                      energy=eigen_energy(nu), norm_const=1.0)
    odd = ExactState(nu=nu, big_a1=big_a1, parity=Parity.ODD,
                     energy=eigen_energy(nu), norm_const=1.0)
    F = even.phase()
    return (
        eval_state(even, x, phase=F) * state_derivative(odd, x, phase=F)
        - state_derivative(even, x, phase=F) * eval_state(odd, x, phase=F)
    )


def schrodinger_q(nu, big_a1):
    """Q(x) of psi'' + Q psi = 0 at the exactly solvable couplings."""
    big_a2, big_a3 = constraint_params(nu)

    def q(x):
        x = np.asarray(x, dtype=float)
        return (
            big_a1 * cosh_power(x, 2.0 * nu)
            + big_a2 * np.exp(-2.0 * log_cosh(x))
            + big_a3
        )

    return q


def ode_residual(state, x_min=-5.0, x_max=5.0, dx=1e-3, energy_shift=0.0):
    """Finite-difference residual of the state against its own equation.

    `energy_shift` perturbs E (hence A3 by twice the shift); nonzero values
    are the negative control showing the residual detects a spectral
    mismatch.
    """
    grid = numerics.Grid.from_interval(x_min, x_max, dx)
    x = grid.points()
    psi = eval_state(state, x)
    q = schrodinger_q(state.nu, state.big_a1)(x) + 2.0 * energy_shift
    return numerics.residual(psi, grid, q)


def matched_potential(state):
    """The lowercase-convention potential whose equation the state solves."""
    big_a2, _ = constraint_params(state.nu)
    params = CoshSechParams(a1=state.big_a1 / 2.0, a2=big_a2 / 2.0, nu=state.nu)
    return CoshSechPotential(params)


@dataclass(frozen=True)
class WindowReport:
    nu: float
    big_a1: float
    energy: float
    v_min: float
    v_max: float
    inside: bool
    claim_satisfied: bool
    note: str


def bound_state_window(nu, big_a1):
    """Numerical check that E = -nu^2/8 sits inside (v_min, v_max).

    The stated restriction `A1 > nu/2` does not match the numerics at the
    reference couplings (nu=1, A1=0.018 has E inside the window with
    A1 < nu/2), so the report records both facts and flags the discrepancy
    instead of resolving it.
    """
    state_energy = eigen_energy(nu)
    big_a2, _ = constraint_params(nu)
    params = CoshSechParams(a1=big_a1 / 2.0, a2=big_a2 / 2.0, nu=nu)
    ext = extrema(params)
    if not ext.has_central_well:
        return WindowReport(
            nu=nu, big_a1=big_a1, energy=state_energy,
            v_min=ext.v_min, v_max=math.nan, inside=False,
            claim_satisfied=big_a1 > nu / 2.0,
            note="no central well at these couplings",
        )
    inside = ext.v_min < state_energy < ext.v_max
    claim = big_a1 > nu / 2.0
    if inside == claim:
        note = f"window check and the '{WINDOW_CLAIM}' restriction agree"
    else:
        note = (
            f"FLAG: numerical window check ({'inside' if inside else 'outside'}) "
            f"disagrees with the stated restriction '{WINDOW_CLAIM}' "
            f"(A1={big_a1}, nu/2={nu / 2.0}); reporting the numerics, "
            "not resolving the discrepancy"
        )
    return WindowReport(
        nu=nu, big_a1=big_a1, energy=state_energy,
        v_min=ext.v_min, v_max=ext.v_max, inside=inside,
        claim_satisfied=claim, note=note,
    )
