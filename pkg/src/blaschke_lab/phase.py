"""Phase geometry of the Blaschke-power coefficient integral.

For a pole parameter ``lam`` in ``(0, 1)`` and a scaled frequency ``t = k/n``
inside ``(alpha, 1/alpha)`` the phase

    h_t(s) = arg b_lam(e^{is}) - t s,        s in [0, pi],

has exactly one stationary point ``phi(t)`` on ``(0, pi)``.  This module
evaluates ``phi``, the argument ``psi`` of ``1 - lam e^{i phi}``, the
accumulated phase ``F = h_t(phi)``, the amplitude weight
``r = sqrt((t - alpha)(1/alpha - t))`` and the derivatives of all of these.

Every function works on floats and numpy arrays in double precision.  Passing
``prec`` (bits, > 53) switches to a scalar mpmath evaluation.  Double precision
already keeps ``n * F(t)`` accurate to about ``1e-9`` for ``n = 10**6``, well
inside the ``1e-6`` phase budget the equidistribution sums need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import mpmath
import numpy as np

from .errors import (
    CertificationFailure,
    DegenerateLambda,
    InvalidLambda,
    NonpositiveT,
    OutOfRangeT,
)

__all__ = [
    "LambdaParam",
    "PhasePoint",
    "StationaryPoints",
    "Tolerances",
    "TOLERANCES",
    "N_MAX",
    "q_of",
    "phase_point",
    "h_eval",
    "h_prime",
    "h_second",
    "stationary_points",
]

#: Largest ``n`` for which the double-precision phase budget is documented.
N_MAX = 10**6

_MAX_DENOMINATOR = 10**6


@dataclass
class Tolerances:
    """Default tolerances of the phase invariants (mutable for overrides)."""

    cos_phi: float = 1e-12
    stationary: float = 1e-10
    finite_difference: float = 1e-5


TOLERANCES = Tolerances()


@dataclass(frozen=True)
class LambdaParam:
    """Validated pole parameter ``0 <= lam < 1``.

    ``exact`` holds a rational equal to ``lam`` when one with denominator at
    most ``10**6`` exists; the closed-form oracle then runs in exact
    arithmetic.
    """

    lam: float
    exact: Fraction | None = None

    def __post_init__(self) -> None:
        lam = float(self.lam)
        if not (0.0 <= lam < 1.0) or math.isnan(lam):
            raise InvalidLambda(f"lambda must lie in [0, 1), got {self.lam!r}")
        object.__setattr__(self, "lam", lam)
        if self.exact is None:
            guess = Fraction(lam).limit_denominator(_MAX_DENOMINATOR)
            if float(guess) == lam:
                object.__setattr__(self, "exact", guess)
        elif float(self.exact) != lam:
            raise InvalidLambda(f"exact value {self.exact} does not round to {lam!r}")

    @classmethod
    def parse(cls, value: Any) -> "LambdaParam":
        """Build from a decimal string, float, Fraction or another LambdaParam."""
        if isinstance(value, LambdaParam):
            return value
        if isinstance(value, str):
            try:
                frac = Fraction(value.strip())
            except ValueError as exc:
                raise InvalidLambda(f"cannot parse lambda {value!r}") from exc
            value = frac
        if isinstance(value, Fraction):
            return cls(float(value), value if value.denominator <= _MAX_DENOMINATOR else None)
        return cls(float(value))

    @property
    def alpha(self) -> float:
        return (1.0 - self.lam) / (1.0 + self.lam)

    @property
    def alpha_inv(self) -> float:
        return (1.0 + self.lam) / (1.0 - self.lam)

    def mp(self) -> mpmath.mpf:
        """``lam`` as an mpf at the current mpmath precision."""
        if self.exact is not None:
            return mpmath.mpf(self.exact.numerator) / self.exact.denominator
        return mpmath.mpf(self.lam)

    def require_positive(self) -> None:
        if self.lam == 0.0:
            raise DegenerateLambda("phase geometry is undefined for lambda = 0")

    def __str__(self) -> str:
        return repr(self.lam)


@dataclass(frozen=True)
class PhasePoint:
    """Phase geometry at a scaled frequency ``t`` (fields may be arrays)."""

    t: Any
    q: Any
    phi: Any
    psi: Any
    big_f: Any
    r: Any
    phi_prime: Any
    psi_prime: Any
    psi_second: Any
    r_prime: Any
    big_f_prime: Any
    big_f_second: Any


@dataclass(frozen=True)
class StationaryPoints:
    z_plus: complex
    z_minus: complex
    phi2_plus: complex
    phi2_minus: complex
    residual_plus: float
    residual_minus: float


def _use_mp(prec: int | None) -> bool:
    return prec is not None and prec > 53


def _check_t(p: LambdaParam, t: Any) -> None:
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0.0):
        raise NonpositiveT(f"t must be positive, got {t!r}")
    if np.any(t_arr <= p.alpha) or np.any(t_arr >= p.alpha_inv):
        raise OutOfRangeT(
            f"t must lie in the open interval ({p.alpha!r}, {p.alpha_inv!r})"
        )


def q_of(p: LambdaParam, t: Any, prec: int | None = None) -> Any:
    """Cosine of the stationary angle, ``(1+lam^2)/(2lam) - (1-lam^2)/(2 lam t)``."""
    p.require_positive()
    if np.any(np.asarray(t, dtype=float) <= 0.0):
        raise NonpositiveT(f"t must be positive, got {t!r}")
    if _use_mp(prec):
        with mpmath.workprec(prec):
            lam = p.mp()
            t = mpmath.mpf(t)
            return (1 + lam**2) / (2 * lam) - (1 - lam**2) / (2 * lam * t)
    lam = p.lam
    t = np.asarray(t, dtype=float) if not np.isscalar(t) else float(t)
    return (1.0 + lam * lam) / (2.0 * lam) - (1.0 - lam * lam) / (2.0 * lam * t)


def phase_point(p: LambdaParam, t: Any, prec: int | None = None) -> PhasePoint:
    """Full phase record at ``t`` in ``(alpha, 1/alpha)``.

    ``phi`` is computed as ``atan2(sin phi, q)`` with
    ``sin phi = (1 - lam^2) r / (2 lam t)``, which stays accurate near the
    turning points where ``arccos`` loses digits.
    """
    p.require_positive()
    _check_t(p, t)
    if _use_mp(prec):
        return _phase_point_mp(p, t, prec)
    lam = p.lam
    a = p.alpha
    scalar = np.isscalar(t)
    t = np.asarray(t, dtype=float)
    one_m = 1.0 - lam * lam
    q = (1.0 + lam * lam) / (2.0 * lam) - one_m / (2.0 * lam * t)
    r = np.sqrt((t - a) * (1.0 / a - t))
    sin_phi = one_m * r / (2.0 * lam * t)
    phi = np.arctan2(sin_phi, q)
    psi = np.arctan(-r / (t + 1.0))
    big_f = phi - t * phi - 2.0 * psi
    r_prime = ((1.0 + lam * lam) / one_m - t) / r
    psi_second = (r + t * r_prime - t * t * r_prime) / (2.0 * t * t * r * r)
    out = dict(
        t=t,
        q=q,
        phi=phi,
        psi=psi,
        big_f=big_f,
        r=r,
        phi_prime=-1.0 / (t * r),
        psi_prime=(t - 1.0) / (2.0 * r * t),
        psi_second=psi_second,
        r_prime=r_prime,
        big_f_prime=-phi,
        big_f_second=1.0 / (t * r),
    )
    if scalar:
        out = {key: float(val) for key, val in out.items()}
    return PhasePoint(**out)


def _phase_point_mp(p: LambdaParam, t: Any, prec: int) -> PhasePoint:
    with mpmath.workprec(prec):
        lam = p.mp()
        t = mpmath.mpf(t)
        a = (1 - lam) / (1 + lam)
        one_m = 1 - lam * lam
        q = (1 + lam * lam) / (2 * lam) - one_m / (2 * lam * t)
        r = mpmath.sqrt((t - a) * (1 / a - t))
        phi = mpmath.atan2(one_m * r / (2 * lam * t), q)
        psi = mpmath.atan(-r / (t + 1))
        r_prime = ((1 + lam * lam) / one_m - t) / r
        return PhasePoint(
            t=t,
            q=q,
            phi=phi,
            psi=psi,
            big_f=phi - t * phi - 2 * psi,
            r=r,
            phi_prime=-1 / (t * r),
            psi_prime=(t - 1) / (2 * r * t),
            psi_second=(r + t * r_prime - t * t * r_prime) / (2 * t * t * r * r),
            r_prime=r_prime,
            big_f_prime=-phi,
            big_f_second=1 / (t * r),
        )


def h_eval(p: LambdaParam, t: Any, s: Any, prec: int | None = None) -> Any:
    """Phase ``h_t(s) = arg b_lam(e^{is}) - t s`` on ``[0, pi]``.

    Uses ``arg b_lam(e^{is}) = s - 2 arg(1 - lam e^{is})``.  The second
    argument has positive real part, so the expression is continuous in ``s``
    and ``h_t(0) = 0`` without any unwrapping.
    """
    p.require_positive()
    if _use_mp(prec):
        with mpmath.workprec(prec):
            lam = p.mp()
            t = mpmath.mpf(t)
            s = mpmath.mpf(s)
            return s - t * s - 2 * mpmath.atan2(-lam * mpmath.sin(s), 1 - lam * mpmath.cos(s))
    lam = p.lam
    s = np.asarray(s, dtype=float) if not np.isscalar(s) else float(s)
    out = s - t * s - 2.0 * np.arctan2(-lam * np.sin(s), 1.0 - lam * np.cos(s))
    return float(out) if np.ndim(out) == 0 else out


def h_prime(p: LambdaParam, t: Any, s: Any) -> Any:
    """``h_t'(s) = (1 - lam^2)/|1 - lam e^{is}|^2 - t``."""
    lam = p.lam
    return (1.0 - lam * lam) / (1.0 + lam * lam - 2.0 * lam * np.cos(s)) - t


def h_second(p: LambdaParam, s: Any) -> Any:
    """``h''(s)``; independent of ``t``."""
    lam = p.lam
    den = 1.0 + lam * lam - 2.0 * lam * np.cos(s)
    out = -2.0 * lam * (1.0 - lam * lam) * np.sin(s) / (den * den)
    return float(out) if np.ndim(out) == 0 else out


def _big_phi(lam: mpmath.mpf, t: mpmath.mpf):
    def big_phi(z):
        return -t * mpmath.log(z) + mpmath.log(z - lam) - mpmath.log(1 - lam * z)

    return big_phi


def stationary_points(
    p: LambdaParam, t: float, tol: float | None = None
) -> StationaryPoints:
    """Stationary points ``e^{+-i phi(t)}`` of ``log(z^{-t} b_lam(z))``.

    The second derivative comes from the closed form
    ``(1-lam^2)(z - z')lam / ((z-lam)^2 (1-lam z)^2)``.  The vanishing of the
    first derivative is checked by 50-digit numerical differentiation of the
    explicit logarithm; a residual above ``tol`` raises CertificationFailure.
    """
    tol = TOLERANCES.stationary if tol is None else tol
    pp = phase_point(p, t)
    lam = p.lam
    zp = complex(math.cos(pp.phi), math.sin(pp.phi))
    zm = zp.conjugate()

    def second(z, w):
        return (1 - lam * lam) * (z - w) * lam / ((z - lam) ** 2 * (1 - lam * z) ** 2)

    residuals = []
    with mpmath.workdps(50):
        big_phi = _big_phi(p.mp(), mpmath.mpf(t))
        pp_mp = phase_point(p, t, prec=200)
        for sign in (1, -1):
            z = mpmath.expj(sign * pp_mp.phi)
            residuals.append(float(abs(mpmath.diff(big_phi, z))))
    if max(residuals) >= tol:
        raise CertificationFailure(
            f"|Phi'(z)| = {max(residuals):.3e} at the stationary points exceeds {tol}"
        )
    return StationaryPoints(
        z_plus=zp,
        z_minus=zm,
        phi2_plus=second(zp, zm),
        phi2_minus=second(zm, zp),
        residual_plus=residuals[0],
        residual_minus=residuals[1],
    )
