"""Construction and classical geometry of cosh-sech volcano potentials.

The family

    V(x) = -(a1 * cosh(x)**(2*nu) + a2 * sech(x)**2)

interpolates, as the signs of (a1, a2) change, between a double-barrier
volcano, the Poschl-Teller well, a single barrier and a single well.
Everything here works in units hbar = m = 1; all quantities are
dimensionless.

Two parameter conventions circulate for the same potential: the lowercase
couplings (a1, a2) that appear in V itself, and the capital couplings
(A1, A2) = (2*a1, 2*a2) that appear once V is inserted into the stationary
Schrodinger equation.  `CoshSechParams` stores lowercase canonically and
records which convention the caller used, so values are halved exactly once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "Convention",
    "CaseClass",
    "CoshSechParams",
    "CoshSechPotential",
    "QuarticWell",
    "GeneratedPotential",
    "ExtremaInfo",
    "TurningPoints",
    "TaylorQuartic",
    "EvaluationOverflow",
    "NoTurningPoints",
    "GENERATOR_CATALOG",
    "log_cosh",
    "cosh_power",
    "eval_potential",
    "from_generator",
    "classify",
    "extrema",
    "turning_points",
    "taylor_quartic",
    "outer_intersection",
    "a2_exact_preset",
    "a2_text_preset",
    "spec_to_text",
    "spec_from_text",
]

# exp argument beyond which a double overflows
_EXP_LIMIT = 709.0


class EvaluationOverflow(FloatingPointError):
    """cosh(x)**p exceeded the double range; raised instead of returning inf."""


class NoTurningPoints(ValueError):
    """Requested energy admits no (inner, outer) turning-point pair."""

    def __init__(self, message, regime_hint):
        super().__init__(message)
        self.regime_hint = regime_hint


class Convention(Enum):
    """Whether coupling inputs are (a1, a2) or (A1, A2) = (2 a1, 2 a2)."""

    LOWERCASE_A = "a"
    CAPITAL_A = "A"


class CaseClass(Enum):
    """Sign regime of (a1, a2) and the potential shape it produces."""

    VOLCANO = "volcano"              # a1 > 0, a2 > 0
    POSCHL_TELLER = "poschl-teller"  # a1 = 0, a2 > 0
    SINGLE_BARRIER = "single-barrier"  # a1 < 0, a2 < 0
    SINGLE_WELL = "single-well"      # a1 < 0, a2 > 0
    UNCLASSIFIED = "unclassified"


def log_cosh(x):
    """log(cosh(x)), stable for arbitrarily large |x|."""
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - math.log(2.0)


def cosh_power(x, p):
    """cosh(x)**p evaluated in the log domain.

    Exactly even in x.  Raises :class:`EvaluationOverflow` when the result
    would exceed the double range rather than silently returning inf.
    """
    arg = p * log_cosh(np.asarray(x, dtype=float))
    if np.any(arg > _EXP_LIMIT):
        raise EvaluationOverflow(
            f"cosh(x)**{p} overflows double precision (needs exp({np.max(arg):.1f}))"
        )
    return np.exp(arg)


def _sech2(x):
    return np.exp(-2.0 * log_cosh(np.asarray(x, dtype=float)))


@dataclass(frozen=True)
class CoshSechParams:
    """Couplings of the cosh-sech family, stored in the lowercase convention.

    Use :meth:`create` to build from either convention; the constructor
    itself expects lowercase values.
    """

    a1: float
    a2: float
    nu: float
    convention: Convention = Convention.LOWERCASE_A

    def __post_init__(self):
        if not (self.nu > 0):
            raise ValueError(f"nu must be positive, got {self.nu}")
        for name in ("a1", "a2", "nu"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @classmethod
    def create(cls, a1, a2, nu, convention=Convention.LOWERCASE_A):
        """Build params, halving capital-convention inputs exactly once."""
        if isinstance(convention, str):
            convention = Convention(convention)
        if convention is Convention.CAPITAL_A:
            return cls(a1 / 2.0, a2 / 2.0, nu, convention)
        return cls(a1, a2, nu, convention)

    @property
    def big_a1(self):
        return 2.0 * self.a1

    @property
    def big_a2(self):
        return 2.0 * self.a2

    def as_inputs(self, convention):
        """Couplings as the caller would enter them under `convention`."""
        if isinstance(convention, str):
            convention = Convention(convention)
        if convention is Convention.CAPITAL_A:
            return self.big_a1, self.big_a2
        return self.a1, self.a2


@dataclass(frozen=True)
class CoshSechPotential:
    """V(x) = -(a1 cosh^{2 nu} x + a2 sech^2 x)."""

    params: CoshSechParams

    def __call__(self, x):
        p = self.params
        return -(p.a1 * cosh_power(x, 2.0 * p.nu) + p.a2 * _sech2(x))

    def derivative(self, x):
        """V'(x) = 2 tanh(x) (a2 sech^2 x - nu a1 cosh^{2 nu} x)."""
        p = self.params
        return 2.0 * np.tanh(x) * (p.a2 * _sech2(x) - p.nu * p.a1 * cosh_power(x, 2.0 * p.nu))

    def curvature_at_origin(self):
        """V''(0) = 2 (a2 - nu a1)."""
        p = self.params
        return 2.0 * (p.a2 - p.nu * p.a1)


@dataclass(frozen=True)
class QuarticWell:
    """Inverted double well V(x) = a x^2 - b x^4."""

    a: float
    b: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        x2 = x * x
        return self.a * x2 - self.b * x2 * x2

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        return 2.0 * self.a * x - 4.0 * self.b * x ** 3


# generator catalog: g(x) -> (exp(2 g), analytic g'')
# 'ln_cosh_nu' absorbs the factor nu from g'' = nu sech^2 into the a2
# coupling so that Generated(ln cosh^nu, a1, a2) is the cosh-sech family
# with coefficient a2 on sech^2, matching the published form of V.
GENERATOR_CATALOG = ("ln_sech", "ln_cosh_nu")


@dataclass(frozen=True)
class GeneratedPotential:
    """V(x) = -(a1 exp(2 g(x)) + a2 g''(x)/s) for a catalog generator g.

    s = 1 for ln_sech and s = nu for ln_cosh_nu (the curvature is
    unit-normalised so the sech^2 coupling is a2 itself).
    """

    generator: str
    a1: float
    a2: float
    nu: float = 1.0

    def __post_init__(self):
        if self.generator not in GENERATOR_CATALOG:
            raise ValueError(
                f"unknown generator {self.generator!r}; catalog: {GENERATOR_CATALOG}"
            )
        if self.generator == "ln_cosh_nu" and not (self.nu > 0):
            raise ValueError("ln_cosh_nu generator requires nu > 0")

    def __call__(self, x):
        if self.generator == "ln_sech":
            # g = -ln cosh: exp(2g) = sech^2, g'' = -sech^2
            s2 = _sech2(x)
            return -(self.a1 * s2 - self.a2 * s2)
        # g = nu ln cosh: exp(2g) = cosh^{2 nu}, g''/nu = sech^2
        return -(self.a1 * cosh_power(x, 2.0 * self.nu) + self.a2 * _sech2(x))


@dataclass(frozen=True)
class ExtremaInfo:
    v_min: float
    has_central_well: bool
    x_barrier: Optional[float] = None
    v_max: Optional[float] = None


@dataclass(frozen=True)
class TurningPoints:
    x1: float
    x2: float
    degenerate: bool = False


@dataclass(frozen=True)
class TaylorQuartic:
    """Maclaurin coefficients of V through fourth order."""

    constant: float
    x2: float
    x4: float

    def as_quartic_well(self):
        return QuarticWell(a=self.x2, b=-self.x4)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        x2 = x * x
        return self.constant + self.x2 * x2 + self.x4 * x2 * x2


def eval_potential(spec, x):
    """Evaluate any potential variant at x (scalar or array)."""
    return spec(x)


def from_generator(generator, a1, a2, nu=1.0):
    """Build a potential from the closed generator catalog."""
    return GeneratedPotential(generator=generator, a1=a1, a2=a2, nu=nu)


def classify(a1, a2):
    """Sign-regime classification of the cosh-sech couplings."""
    if a1 > 0 and a2 > 0:
        return CaseClass.VOLCANO
    if a1 == 0 and a2 > 0:
        return CaseClass.POSCHL_TELLER
    if a1 < 0 and a2 < 0:
        return CaseClass.SINGLE_BARRIER
    if a1 < 0 and a2 > 0:
        return CaseClass.SINGLE_WELL
    return CaseClass.UNCLASSIFIED


def _require_volcano(params):
    if classify(params.a1, params.a2) is not CaseClass.VOLCANO:
        raise ValueError(
            f"operation requires volcano-regime couplings (a1 > 0, a2 > 0); "
            f"got a1={params.a1}, a2={params.a2}"
        )


def extrema(params):
    """Well bottom and barrier top of a volcano-regime potential.

    The barrier top solves cosh(x)**(2 nu + 2) = a2 / (nu a1), the root of
    V'; the closed-form location is polished by bisection on V' and the
    sign change is checked.  When a2 <= nu a1 the origin is not a minimum
    and there is no barrier.
    """
    _require_volcano(params)
    pot = CoshSechPotential(params)
    v_min = -(params.a1 + params.a2)
    ratio = params.a2 / (params.nu * params.a1)
    if ratio <= 1.0:
        return ExtremaInfo(v_min=v_min, has_central_well=False)

    xb = math.acosh(ratio ** (1.0 / (2.0 * params.nu + 2.0)))
    lo, hi = 0.5 * xb, min(2.0 * xb + 1.0, xb + 5.0)
    if not (pot.derivative(lo) > 0 > pot.derivative(hi)):
        raise RuntimeError("barrier bracketing failed; V' has no sign change")
    xb = brentq(pot.derivative, lo, hi, xtol=1e-14, rtol=8.9e-16)
    return ExtremaInfo(
        v_min=v_min,
        has_central_well=True,
        x_barrier=xb,
        v_max=float(pot(xb)),
    )


def outer_intersection(pot, energy, x_start):
    """Bracketed root of V(x) = E on the outer, decreasing branch."""
    hi = x_start + 1.0
    while pot(hi) > energy:
        hi = 2.0 * hi
        if hi > 500.0:
            raise RuntimeError("outer turning point bracket not found")
    return brentq(lambda x: pot(x) - energy, x_start, hi, xtol=1e-12, rtol=8.9e-16)


def turning_points(params, energy, tol=1e-10):
    """Inner and outer classical turning points at the given energy.

    Valid for v_min <= E <= v_max in the volcano regime.  The boundary
    energies return degenerate pairs (both points at the well bottom or at
    the barrier top).
    """
    _require_volcano(params)
    ext = extrema(params)
    if not ext.has_central_well:
        raise NoTurningPoints(
            "no central well: a2 <= nu a1, the origin is a maximum",
            regime_hint="barrierless",
        )
    if energy < ext.v_min - tol:
        raise NoTurningPoints(
            f"E={energy} lies below the well bottom v_min={ext.v_min}",
            regime_hint="below well bottom: no classically allowed central region",
        )
    if energy > ext.v_max + tol:
        raise NoTurningPoints(
            f"E={energy} lies above the barrier top v_max={ext.v_max}",
            regime_hint="above barrier top: motion is unbounded, no forbidden band",
        )
    if abs(energy - ext.v_min) <= tol:
        return TurningPoints(x1=0.0, x2=0.0, degenerate=True)
    if abs(energy - ext.v_max) <= tol:
        return TurningPoints(x1=ext.x_barrier, x2=ext.x_barrier, degenerate=True)

    pot = CoshSechPotential(params)
    x1 = brentq(lambda x: pot(x) - energy, 0.0, ext.x_barrier, xtol=1e-12, rtol=8.9e-16)
    x2 = outer_intersection(pot, energy, ext.x_barrier)
    return TurningPoints(x1=x1, x2=x2, degenerate=False)


def taylor_quartic(params):
    """Maclaurin expansion of V through order x^4.

    cosh^{2 nu} x = 1 + nu x^2 + (nu^2/2 - nu/6) x^4 + ...
    sech^2 x      = 1 -    x^2 +         (2/3) x^4 + ...

    so the x^2 coefficient is a2 - nu a1: positive exactly when the
    central well exists, reproducing the a x^2 - b x^4 inverted double
    well near the origin.
    """
    _require_volcano(params)
    a1, a2, nu = params.a1, params.a2, params.nu
    return TaylorQuartic(
        constant=-(a1 + a2),
        x2=a2 - nu * a1,
        x4=-(a1 * nu * (3.0 * nu - 1.0) / 6.0 + 2.0 * a2 / 3.0),
    )


def a2_exact_preset(nu):
    """Lowercase a2 compatible with the exact solutions: A2 = (nu/2)(nu/2+1)."""
    return (nu / 2.0) * (nu / 2.0 + 1.0) / 2.0


def a2_text_preset(nu):
    """Lowercase a2 = nu (nu + 1), the well-depth normalisation quoted in
    prose discussions of the volcano case.

    Note this conflicts with :func:`a2_exact_preset`; both are kept as
    named presets rather than silently reconciled.
    """
    return nu * (nu + 1.0)


# --- canonical text serialisation (key=value lines) ------------------------

def spec_to_text(spec):
    """Serialise a potential variant to key=value lines."""
    if isinstance(spec, CoshSechPotential):
        p = spec.params
        a1_in, a2_in = p.as_inputs(p.convention)
        lines = [
            "family=cosh_sech",
            f"a1={a1_in!r}",
            f"a2={a2_in!r}",
            f"nu={p.nu!r}",
            f"convention={p.convention.value}",
        ]
    elif isinstance(spec, QuarticWell):
        lines = ["family=quartic", f"a={spec.a!r}", f"b={spec.b!r}"]
    elif isinstance(spec, GeneratedPotential):
        lines = [
            "family=generated",
            f"generator={spec.generator}",
            f"a1={spec.a1!r}",
            f"a2={spec.a2!r}",
            f"nu={spec.nu!r}",
        ]
    else:
        raise TypeError(f"not a potential variant: {spec!r}")
    return "\n".join(lines) + "\n"


def spec_from_text(text):
    """Inverse of :func:`spec_to_text`; rejects unknown keys."""
    fields = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"malformed line (expected key=value): {raw!r}")
        key, value = line.split("=", 1)
        fields[key.strip()] = value.strip()

    family = fields.pop("family", None)
    if family == "cosh_sech":
        allowed = {"a1", "a2", "nu", "convention"}
        _reject_unknown(fields, allowed)
        params = CoshSechParams.create(
            float(fields["a1"]),
            float(fields["a2"]),
            float(fields["nu"]),
            fields.get("convention", "a"),
        )
        return CoshSechPotential(params)
    if family == "quartic":
        _reject_unknown(fields, {"a", "b"})
        return QuarticWell(a=float(fields["a"]), b=float(fields["b"]))
    if family == "generated":
        _reject_unknown(fields, {"generator", "a1", "a2", "nu"})
        return GeneratedPotential(
            generator=fields["generator"],
            a1=float(fields["a1"]),
            a2=float(fields["a2"]),
            nu=float(fields.get("nu", 1.0)),
        )
    raise ValueError(f"unknown or missing family: {family!r}")


def _reject_unknown(fields, allowed):
    unknown = set(fields) - allowed
    if unknown:
        raise ValueError(f"unknown keys: {sorted(unknown)}")
