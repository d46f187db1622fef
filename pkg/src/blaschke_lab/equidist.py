"""Window solver, weighted sums and Weyl sums for the lower-bound argument.

The frequencies ``k`` with ``k/n`` in ``[beta, 1/beta]`` form the window
``I_n``.  On it the Blaschke coefficients behave like
``amplitude(t) * cos(2 pi s_{n,k})`` with fractional parts

    s_{n,k} = frac((n F(k/n) - psi(k/n) - pi/4) / (2 pi)).

``M`` sums the weights ``[(1/alpha - t)(t - alpha)]^{-1/4}`` over the window,
``X`` sums the same weights times ``|cos(2 pi s_{n,k})|``; equidistribution
of ``s_{n,k}`` drives ``X/M`` to ``2/pi``.

Totals use :func:`math.fsum` (correctly rounded, so independent of
summation order); running partial sums use ``np.longdouble``.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import EmptyWindow, NoRoot, OutOfWindow, ZeroFrequency
from .phase import LambdaParam, phase_point
from .special import GAMMA_3_4, L_CONST

__all__ = [
    "WindowConfig",
    "EquidistReport",
    "VdcReport",
    "WEYL_J_CAP",
    "beta_solve",
    "window_from_beta",
    "step4_constant",
    "window_integral",
    "full_window_closed_form",
    "full_window_quadrature",
    "window_indices",
    "window_weights",
    "s_frac",
    "s_frac_array",
    "big_m",
    "big_x",
    "weyl_partial_sums",
    "weyl_sum",
    "max_weyl",
    "vdc_bound_check",
    "weighted_exp_sum",
    "histogram_tv",
    "equidist_report",
    "report_csv",
    "weyl_csv",
]

#: Largest Weyl frequency ``j`` examined by default.
WEYL_J_CAP = 8

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class WindowConfig:
    lam: LambdaParam
    alpha: float
    beta: float
    target: float
    residual: float = 0.0

    @property
    def beta_inv(self) -> float:
        return 1.0 / self.beta


def window_integral(p: LambdaParam, beta: float) -> float:
    """``int_beta^{1/beta} dt / [(1/alpha - t)(t - alpha)]^{1/4}``.

    With ``t = alpha + D sin^2(theta)``, ``D = 1/alpha - alpha`` the integrand
    becomes ``sqrt(D) sqrt(2 sin 2 theta)``, bounded on the whole range.
    """
    a = p.alpha
    d = 1.0 / a - a

    def theta(t: float) -> float:
        u = min(max((t - a) / d, 0.0), 1.0)
        return math.asin(math.sqrt(u))

    lo, hi = theta(beta), theta(1.0 / beta)
    if hi <= lo:
        return 0.0
    val, _ = quad(
        lambda th: math.sqrt(2.0 * math.sin(2.0 * th)),
        lo,
        hi,
        epsabs=1e-13,
        epsrel=1e-13,
        limit=200,
    )
    return math.sqrt(d) * val


def full_window_closed_form(p: LambdaParam) -> float:
    """``(2 Gamma(3/4))^2 sqrt(lam / (pi (1 - lam^2)))``."""
    lam = p.lam
    return (2.0 * GAMMA_3_4) ** 2 * math.sqrt(lam / (math.pi * (1.0 - lam * lam)))


def full_window_quadrature(p: LambdaParam, dps: int = 30) -> float:
    """Tanh-sinh quadrature of the full window on the original variable.

    The integrand has quarter-power singularities at both endpoints; the
    double-exponential rule clusters nodes there, so no substitution is used.
    """
    with mpmath.workdps(dps):
        lam = p.mp()
        a = (1 - lam) / (1 + lam)
        quarter = mpmath.mpf(-0.25)

        def integrand(t):
            u, v = t - a, 1 / a - t
            if u <= 0 or v <= 0:
                return mpmath.mpf(0)
            return (u * v) ** quarter

        return float(mpmath.quad(integrand, [a, 1, 1 / a]))


def beta_solve(p: LambdaParam, tol: float = 1e-10) -> WindowConfig:
    """Solve ``window_integral(beta) = Gamma(3/4)^2 / sqrt(1 - lam)`` for ``beta``.

    The window integral decreases from its full value at ``beta = alpha`` to 0
    at ``beta = 1``; a root exists iff the full value exceeds the target,
    which holds for ``lam > pi / (16 - pi)`` (about 0.2443).
    """
    p.require_positive()
    a = p.alpha
    target = L_CONST / math.sqrt(1.0 - p.lam)
    full = full_window_closed_form(p)
    if not full > target:
        raise NoRoot(
            f"full window integral {full:.6g} does not exceed target {target:.6g} "
            f"for lambda={p.lam}"
        )
    beta = brentq(
        lambda b: window_integral(p, b) - target, a, 1.0, xtol=1e-15, rtol=1e-15, maxiter=500
    )
    residual = window_integral(p, beta) - target
    if abs(residual) > tol:
        raise NoRoot(f"beta solver residual {residual:.3e} exceeds {tol}")
    return WindowConfig(p, a, beta, target, residual)


def window_indices(w: WindowConfig, n: int) -> np.ndarray:
    """Integers in ``[beta n, n / beta]``."""
    lo = math.ceil(w.beta * n)
    hi = math.floor(n / w.beta)
    if n < 1 or lo > hi:
        raise EmptyWindow(f"window is empty for n={n}")
    return np.arange(lo, hi + 1)


def _in_window(w: WindowConfig, n: int, k) -> bool:
    k_arr = np.asarray(k)
    return bool(np.all(k_arr >= math.ceil(w.beta * n)) and np.all(k_arr <= math.floor(n / w.beta)))


def window_weights(w: WindowConfig, n: int, ks: np.ndarray | None = None) -> np.ndarray:
    """``[(1/alpha - t)(t - alpha)]^{-1/4} = 1/sqrt(r(t))`` at ``t = k/n``."""
    ks = window_indices(w, n) if ks is None else ks
    t = ks / n
    a = w.alpha
    return ((1.0 / a - t) * (t - a)) ** -0.25


def s_frac_array(
    w: WindowConfig, n: int, ks: np.ndarray | None = None, prec: int | None = None
) -> np.ndarray:
    ks = window_indices(w, n) if ks is None else np.asarray(ks)
    if prec is not None and prec > 53:
        return np.array([_s_frac_mp(w.lam, n, int(k), prec) for k in ks])
    pp = phase_point(w.lam, ks / n)
    x = (n * pp.big_f - pp.psi - 0.25 * math.pi) / _TWO_PI
    return x - np.floor(x)


def s_frac(
    p: LambdaParam, w: WindowConfig, n: int, k: int, prec: int | None = None
) -> float:
    """Fractional part of ``(n F(k/n) - psi(k/n) - pi/4) / (2 pi)``."""
    if not _in_window(w, n, k):
        raise OutOfWindow(f"k={k} is outside the window for n={n}")
    if prec is not None and prec > 53:
        return _s_frac_mp(p, n, k, prec)
    return float(s_frac_array(w, n, np.array([k]))[0])


def _s_frac_mp(p: LambdaParam, n: int, k: int, prec: int) -> float:
    with mpmath.workprec(prec):
        pp = phase_point(p, mpmath.mpf(k) / n, prec=prec)
        x = (n * pp.big_f - pp.psi - mpmath.pi / 4) / (2 * mpmath.pi)
        return float(x - mpmath.floor(x))


def window_from_beta(p: LambdaParam, beta: float) -> WindowConfig:
    """Window with a user-supplied ``beta`` in ``(alpha, 1)``; residual is reported."""
    p.require_positive()
    if not (p.alpha < beta < 1.0):
        raise OutOfWindow(f"beta must lie in ({p.alpha}, 1), got {beta}")
    target = L_CONST / math.sqrt(1.0 - p.lam)
    return WindowConfig(p, p.alpha, beta, target, window_integral(p, beta) - target)


def step4_constant(p: LambdaParam) -> float:
    """Limit of ``sum_{k in I_n} |c_k| / sqrt(n)`` implied by the three limits.

    ``sqrt(2/((1-lam^2) pi)) * (2/pi) * Gamma(3/4)^2 / sqrt(1-lam)``.
    """
    lam = p.lam
    return math.sqrt(2.0 / ((1.0 - lam * lam) * math.pi)) * (2.0 / math.pi) * L_CONST / math.sqrt(1.0 - lam)


def big_m(w: WindowConfig, n: int) -> float:
    return math.fsum(window_weights(w, n))


def big_x(w: WindowConfig, n: int, prec: int | None = None) -> float:
    wts = window_weights(w, n)
    return math.fsum(wts * np.abs(np.cos(_TWO_PI * s_frac_array(w, n, prec=prec))))


def _check_j(j: int) -> None:
    if j == 0:
        raise ZeroFrequency("Weyl sums need j != 0")


def weyl_partial_sums(
    w: WindowConfig, n: int, j: int, s: np.ndarray | None = None
) -> np.ndarray:
    """``A_{n,j,m}`` for every ``m`` in the window, in window order."""
    _check_j(j)
    s = s_frac_array(w, n) if s is None else s
    ang = _TWO_PI * j * s
    re = np.cumsum(np.cos(ang), dtype=np.longdouble)
    im = np.cumsum(np.sin(ang), dtype=np.longdouble)
    return re.astype(float) + 1j * im.astype(float)


def weyl_sum(w: WindowConfig, n: int, j: int, m: int) -> complex:
    """Partial exponential sum over window indices ``l <= m``."""
    _check_j(j)
    ks = window_indices(w, n)
    if not ks[0] <= m <= ks[-1]:
        raise OutOfWindow(f"m={m} is outside the window for n={n}")
    return complex(weyl_partial_sums(w, n, j)[m - ks[0]])


def max_weyl(w: WindowConfig, n: int, j: int, s: np.ndarray | None = None) -> float:
    return float(np.abs(weyl_partial_sums(w, n, j, s)).max())


@dataclass(frozen=True)
class VdcReport:
    n: int
    j: int
    mu: float
    theta_prime_a: float
    theta_prime_b: float
    theta_prime_max_abs: float
    max_weyl: float
    c_fit: float


def vdc_bound_check(w: WindowConfig, n: int, j: int, grid: int = 4001) -> VdcReport:
    """Fit the constant in the van der Corput bound for the window sums.

    For ``theta(x) = j (n F(x/n) - psi(x/n) - pi/4) / (2 pi)`` one has
    ``exp(2 pi i theta(k)) = exp(2 pi i j s_{n,k})`` and

        theta'(x)  = j (F'(t) - psi'(t)/n) / (2 pi),
        theta''(x) = j (F''(t) - psi''(t)/n) / (2 pi n).

    ``mu`` is the minimum of ``|theta''|`` over the window.  ``c_fit`` is the
    smallest ``C`` with ``|A_{n,j,m}| <= (|theta'(m) - theta'(a)| + 2)(4/sqrt(mu) + C)``
    for every ``m``; a negative value means the bound already holds with
    ``C = 0``.
    """
    _check_j(j)
    p = w.lam
    a_x, b_x = w.beta * n, n / w.beta
    t_grid = np.linspace(w.beta, 1.0 / w.beta, grid)
    pp = phase_point(p, t_grid)
    theta2 = j * (pp.big_f_second - pp.psi_second / n) / (_TWO_PI * n)
    mu = float(np.abs(theta2).min())

    def theta1(x):
        q = phase_point(p, np.asarray(x) / n)
        return j * (q.big_f_prime - q.psi_prime / n) / _TWO_PI

    th_a = float(theta1(a_x))
    th_b = float(theta1(b_x))
    ks = window_indices(w, n)
    amax = np.abs(weyl_partial_sums(w, n, j))
    factor = np.abs(theta1(ks) - th_a) + 2.0
    c_fit = float((amax / factor).max() - 4.0 / math.sqrt(mu))
    return VdcReport(
        n=n,
        j=j,
        mu=mu,
        theta_prime_a=th_a,
        theta_prime_b=th_b,
        theta_prime_max_abs=float(np.abs(theta1(np.linspace(a_x, b_x, grid))).max()),
        max_weyl=float(amax.max()),
        c_fit=c_fit,
    )


def weighted_exp_sum(
    w: WindowConfig, n: int, j: int, s: np.ndarray | None = None
) -> tuple[float, float, float]:
    """``|Y|``, ``|Y|/M`` and the Abel-summation bound on ``|Y|``.

    ``Y = sum_{k in I_n} exp(2 pi i j s_{n,k}) / sqrt(r(k/n))``.  The bound is
    ``max_m |A_{n,j,m}| * (last weight + total variation of the weights)``.
    """
    _check_j(j)
    wts = window_weights(w, n)
    s = s_frac_array(w, n) if s is None else s
    ang = _TWO_PI * j * s
    y = complex(math.fsum(wts * np.cos(ang)), math.fsum(wts * np.sin(ang)))
    m = math.fsum(wts)
    a_max = float(np.abs(weyl_partial_sums(w, n, j, s)).max())
    abel = a_max * (float(wts[-1]) + math.fsum(np.abs(np.diff(wts))))
    return abs(y), abs(y) / m, abel


def histogram_tv(w: WindowConfig, n: int, bins: int = 20) -> float:
    """Total-variation distance between the binned ``s_{n,k}`` and uniform."""
    s = s_frac_array(w, n)
    counts, _ = np.histogram(s, bins=bins, range=(0.0, 1.0))
    return 0.5 * float(np.abs(counts / len(s) - 1.0 / bins).sum())


@dataclass(frozen=True)
class EquidistReport:
    n: int
    M: float
    X: float
    ratio_xm: float
    weyl: dict = field(default_factory=dict)
    y_over_m: dict = field(default_factory=dict)


def equidist_report(
    w: WindowConfig, n: int, js=(1, 2, 3), prec: int | None = None
) -> EquidistReport:
    s = s_frac_array(w, n, prec=prec)
    wts = window_weights(w, n)
    m = math.fsum(wts)
    x = math.fsum(wts * np.abs(np.cos(_TWO_PI * s)))
    sq = math.sqrt(n)
    weyl = {j: max_weyl(w, n, j, s) / sq for j in js}
    y_over_m = {j: weighted_exp_sum(w, n, j, s)[1] for j in js}
    return EquidistReport(n, m, x, x / m, weyl, y_over_m)


def report_csv(w: WindowConfig, reports) -> str:
    buf = io.StringIO()
    buf.write("lambda,n,M,X,ratio_xm\n")
    for r in reports:
        buf.write(f"{w.lam.lam!r},{r.n},{r.M!r},{r.X!r},{r.ratio_xm!r}\n")
    return buf.getvalue()


def weyl_csv(w: WindowConfig, reports) -> str:
    buf = io.StringIO()
    buf.write("lambda,n,j,max_weyl_over_sqrt_n,y_over_m\n")
    for r in reports:
        for j in sorted(r.weyl):
            buf.write(f"{w.lam.lam!r},{r.n},{j},{r.weyl[j]!r},{r.y_over_m[j]!r}\n")
    return buf.getvalue()
