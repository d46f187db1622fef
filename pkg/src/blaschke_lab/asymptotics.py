"""Stationary-phase asymptotics of the Blaschke-power coefficients.

For ``t = k/n`` in the window ``[beta, 1/beta]`` the leading term is

    c_k ~ sqrt(2 / (n (1 - lam^2) pi)) cos(n F(t) - psi(t) - pi/4)
          / [(1/alpha - t)(t - alpha)]^{1/4},

with an absolute remainder ``O(1/n)`` uniform over the window.  This module
evaluates that term, integrates the real-integral representation

    c_k = (1/pi) Re int_0^pi exp(i n h_t(s)) / (1 - lam e^{is}) ds

with an oscillation-aware adaptive Gauss-Legendre rule, and checks the
cut-off stationary-phase step (plateau ``[gamma/2, pi - gamma/2]``).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .coeffs import Engine, TestFunction, certified_truncation, coeff_closed_form, compute_spectrum
from .equidist import WindowConfig, beta_solve, window_indices
from .errors import (
    CertificationFailure,
    CutoffInvalid,
    InvalidLambda,
    OutOfWindow,
    ResolutionInsufficient,
)
from .phase import LambdaParam, phase_point

__all__ = [
    "AsymptoticRecord",
    "ErrorProfile",
    "QuadConfig",
    "CutoffConfig",
    "FedoryukResult",
    "theorem3_leading",
    "theorem3_coeff",
    "oscillatory_integral",
    "oscillatory_oracle",
    "cutoff_gamma",
    "cutoff_nu",
    "fedoryuk_leading",
    "endpoint_piece",
    "error_profile",
    "profile_csv",
    "PROFILE_COLUMNS",
]

PROFILE_COLUMNS = (
    "lambda", "n", "k", "t", "predicted", "exact", "abs_err", "scaled_err",
    "amplitude", "phase_mod_2pi",
)

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class AsymptoticRecord:
    n: int
    k: int
    t: float
    predicted: float
    exact: float
    abs_err: float
    scaled_err: float
    amplitude: float
    phase_mod_2pi: float


@dataclass(frozen=True)
class ErrorProfile:
    lam: float
    n: int
    records: list
    max_abs_err: float
    max_scaled_err: float


@dataclass(frozen=True)
class QuadConfig:
    """Adaptive panel quadrature settings.

    Panels carry ``order``-point Gauss-Legendre rules; the initial panel
    count gives at least ``nodes_per_period`` nodes per oscillation period.
    A panel is accepted once the rule on it and on its two halves agree
    within its share of ``tol``.
    """

    order: int = 20
    nodes_per_period: int = 10
    tol: float = 1e-13
    max_panels: int = 1 << 20


@dataclass(frozen=True)
class CutoffConfig:
    """Cutoff ``nu``: 1 on ``[gamma/2, pi - gamma/2]``, 0 outside ``[gamma/4, pi - gamma/4]``.

    ``gamma=None`` derives it from the window so that ``phi(t)`` stays in
    ``[gamma, pi - gamma]``.
    """

    gamma: float | None = None


@dataclass(frozen=True)
class FedoryukResult:
    leading: complex
    numeric: complex
    gamma: float
    phi: float


def _require_lambda(p: LambdaParam) -> None:
    if not (0.5 <= p.lam < 1.0):
        raise InvalidLambda(f"the window asymptotics need lambda in [1/2, 1), got {p.lam}")


def _window(p: LambdaParam, window: WindowConfig | None) -> WindowConfig:
    return beta_solve(p) if window is None else window


def theorem3_leading(p: LambdaParam, n: int, t):
    """Leading term, amplitude and phase at scaled frequency ``t`` (array ok)."""
    pp = phase_point(p, t)
    lam = p.lam
    amplitude = math.sqrt(2.0 / (n * (1.0 - lam * lam) * math.pi)) / np.sqrt(pp.r)
    phase = n * pp.big_f - pp.psi - 0.25 * math.pi
    return amplitude * np.cos(phase), amplitude, phase


def theorem3_coeff(
    p: LambdaParam,
    n: int,
    k: int,
    window: WindowConfig | None = None,
    exact: float | None = None,
) -> AsymptoticRecord:
    """Compare the leading term at ``t = k/n`` with the exact coefficient.

    ``exact`` defaults to the closed form for rational ``lam`` and
    ``n <= 2000``, otherwise to the recurrence engine.
    """
    _require_lambda(p)
    w = _window(p, window)
    if not (math.ceil(w.beta * n) <= k <= math.floor(n / w.beta)):
        raise OutOfWindow(f"k/n={k / n:.6g} is outside [{w.beta:.6g}, {1 / w.beta:.6g}]")
    tf = TestFunction.blaschke(p, n)
    if exact is None:
        if p.exact is not None and n <= 2000:
            exact = float(coeff_closed_form(tf, k))
        else:
            N = max(certified_truncation(tf), k)
            exact = float(compute_spectrum(tf, N, Engine.RECURRENCE).coeffs[k])
    t = k / n
    pred, amp, phase = theorem3_leading(p, n, t)
    err = abs(exact - float(pred))
    return AsymptoticRecord(
        n=n,
        k=k,
        t=t,
        predicted=float(pred),
        exact=float(exact),
        abs_err=err,
        scaled_err=n * err,
        amplitude=float(amp),
        phase_mod_2pi=float(phase % _TWO_PI),
    )


# --------------------------------------------------------------------------
# quadrature
# --------------------------------------------------------------------------

def oscillatory_integral(func, a: float, b: float, periods: float, quad: QuadConfig) -> complex:
    """Adaptive composite Gauss-Legendre integral of a complex ``func`` on ``[a, b]``.

    ``periods`` estimates how many oscillations ``func`` performs on the
    interval and fixes the initial panel density.  Sample values carry a
    rounding error of about ``eps * |phase|``, so the per-panel tolerance is
    floored at ``64 eps (1 + 2 pi periods)`` times the panel length.
    """
    if quad.nodes_per_period < 10:
        raise ResolutionInsufficient(
            f"{quad.nodes_per_period} nodes per period is below the minimum of 10"
        )
    x, wts = np.polynomial.legendre.leggauss(quad.order)
    panels = max(4, int(math.ceil(periods * quad.nodes_per_period / quad.order)) + 1)
    lo = np.linspace(a, b, panels + 1)
    left, right = lo[:-1], lo[1:]
    total = 0.0 + 0.0j
    span = b - a
    floor = 64.0 * np.finfo(float).eps * (1.0 + _TWO_PI * periods)

    def rule(l, r):
        half = 0.5 * (r - l)
        mid = 0.5 * (r + l)
        nodes = mid[:, None] + half[:, None] * x[None, :]
        return (func(nodes) * wts[None, :]).sum(axis=1) * half

    accepted = []
    while len(left):
        if len(left) > quad.max_panels:
            raise ResolutionInsufficient(
                f"adaptive quadrature exceeded {quad.max_panels} panels"
            )
        mid = 0.5 * (left + right)
        coarse = rule(left, right)
        fine = rule(left, mid) + rule(mid, right)
        length = right - left
        ok = np.abs(coarse - fine) <= np.maximum(quad.tol / span, floor) * length
        accepted.append(fine[ok])
        left, right = np.concatenate([left[~ok], mid[~ok]]), np.concatenate([mid[~ok], right[~ok]])
        if len(left) and np.min(right - left) < span * 1e-14:
            raise ResolutionInsufficient("adaptive quadrature could not resolve the integrand")
    for chunk in accepted:
        total += complex(math.fsum(chunk.real), math.fsum(chunk.imag))
    return total


def _max_h_prime(p: LambdaParam, t: float) -> float:
    return max(abs(p.alpha - t), abs(p.alpha_inv - t))


def oscillatory_oracle(
    p: LambdaParam, n: int, k: int, quad: QuadConfig | None = None
) -> float:
    """``(1/pi) Re int_0^pi exp(i (n arg b_lam(e^{is}) - k s)) / (1 - lam e^{is}) ds``."""
    p.require_positive()
    quad = QuadConfig() if quad is None else quad
    lam = p.lam

    def integrand(s):
        arg_b = s - 2.0 * np.arctan2(-lam * np.sin(s), 1.0 - lam * np.cos(s))
        return np.exp(1j * (n * arg_b - k * s)) / (1.0 - lam * np.exp(1j * s))

    periods = (n * math.pi * _max_h_prime(p, k / n if n else 0.0) + k + 1) / _TWO_PI
    return oscillatory_integral(integrand, 0.0, math.pi, periods, quad).real / math.pi


# --------------------------------------------------------------------------
# cutoff and the stationary-phase step
# --------------------------------------------------------------------------

def cutoff_gamma(p: LambdaParam, window: WindowConfig | None = None) -> float:
    """Largest ``gamma`` with ``phi(t)`` in ``[gamma, pi - gamma]`` on the window.

    ``phi`` decreases in ``t``, so the extremes sit at the window edges.
    """
    w = _window(p, window)
    lo = phase_point(p, 1.0 / w.beta).phi
    hi = phase_point(p, w.beta).phi
    return min(lo, math.pi - hi)


def _smooth_step(x):
    x = np.clip(x, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(x > 0.0, np.exp(-1.0 / np.where(x > 0.0, x, 1.0)), 0.0)
        b = np.where(x < 1.0, np.exp(-1.0 / np.where(x < 1.0, 1.0 - x, 1.0)), 0.0)
    return a / (a + b)


def cutoff_nu(s, gamma: float):
    """Smooth bump built from ``exp(-1/x)`` glue."""
    s = np.asarray(s, dtype=float)
    q = 0.25 * gamma
    rise = _smooth_step((s - q) / q)
    fall = _smooth_step((math.pi - q - s) / q)
    return rise * fall


def _resolve_gamma(p: LambdaParam, t: float, cutoff: CutoffConfig, window) -> tuple[float, float]:
    phi = phase_point(p, t).phi
    gamma = cutoff_gamma(p, window) if cutoff.gamma is None else cutoff.gamma
    if not (0.0 < gamma < 0.5 * math.pi):
        raise CutoffInvalid(f"gamma must lie in (0, pi/2), got {gamma}")
    if not (gamma <= phi <= math.pi - gamma):
        raise CutoffInvalid(
            f"stationary point {phi:.6g} is not inside [gamma, pi - gamma] for gamma={gamma:.6g}"
        )
    return gamma, phi


def _tilde_phase(p: LambdaParam, n: int, t: float):
    lam = p.lam

    def tilde(s):
        arg_b = s - 2.0 * np.arctan2(-lam * np.sin(s), 1.0 - lam * np.cos(s))
        return -(n * arg_b - n * t * s)

    return tilde


def fedoryuk_leading(
    p: LambdaParam,
    n: int,
    t: float,
    cutoff: CutoffConfig | None = None,
    window: WindowConfig | None = None,
    quad: QuadConfig | None = None,
) -> FedoryukResult:
    """Leading stationary-phase term of ``J = int nu g exp(i n h~)`` and ``J`` itself.

    ``g(s) = 1/(1 - lam e^{-is})`` and ``h~ = -h_t``; ``h~''(phi) = t r(t) > 0``
    so the leading term is

        exp(i (n h~(phi) + pi/4 + psi)) sqrt(2 pi / (n (1 - lam^2))) / sqrt(r).
    """
    cutoff = CutoffConfig() if cutoff is None else cutoff
    quad = QuadConfig() if quad is None else quad
    w = _window(p, window)
    if not (w.beta <= t <= 1.0 / w.beta):
        raise OutOfWindow(f"t={t} is outside the window")
    gamma, phi = _resolve_gamma(p, t, cutoff, w)
    pp = phase_point(p, t)
    lam = p.lam
    leading = np.exp(1j * (-n * pp.big_f + 0.25 * math.pi + pp.psi)) * math.sqrt(
        _TWO_PI / (n * (1.0 - lam * lam))
    ) / math.sqrt(pp.r)
    tilde = _tilde_phase(p, n, t)

    def integrand(s):
        return cutoff_nu(s, gamma) * np.exp(1j * tilde(s)) / (1.0 - lam * np.exp(-1j * s))

    periods = n * math.pi * _max_h_prime(p, t) / _TWO_PI
    numeric = oscillatory_integral(integrand, 0.25 * gamma, math.pi - 0.25 * gamma, periods, quad)
    return FedoryukResult(complex(leading), numeric, gamma, phi)


def endpoint_piece(
    p: LambdaParam,
    n: int,
    t: float,
    side: str = "left",
    cutoff: CutoffConfig | None = None,
    window: WindowConfig | None = None,
    quad: QuadConfig | None = None,
) -> complex:
    """``int (1 - nu) g exp(i n h~)`` over ``[0, gamma/2]`` or ``[pi - gamma/2, pi]``."""
    cutoff = CutoffConfig() if cutoff is None else cutoff
    quad = QuadConfig() if quad is None else quad
    gamma, _ = _resolve_gamma(p, t, cutoff, window)
    lam = p.lam
    tilde = _tilde_phase(p, n, t)

    def integrand(s):
        return (1.0 - cutoff_nu(s, gamma)) * np.exp(1j * tilde(s)) / (1.0 - lam * np.exp(-1j * s))

    if side == "left":
        a, b = 0.0, 0.5 * gamma
    elif side == "right":
        a, b = math.pi - 0.5 * gamma, math.pi
    else:
        raise ValueError("side must be 'left' or 'right'")
    periods = n * (b - a) * _max_h_prime(p, t) / _TWO_PI
    return oscillatory_integral(integrand, a, b, periods, quad)


# --------------------------------------------------------------------------
# error profile
# --------------------------------------------------------------------------

def error_profile(
    p: LambdaParam,
    n: int,
    window: WindowConfig | None = None,
    engine: str | Engine = Engine.RECURRENCE,
) -> ErrorProfile:
    """Leading term against the exact coefficients for every ``k`` in ``I_n``."""
    _require_lambda(p)
    w = _window(p, window)
    ks = window_indices(w, n)
    tf = TestFunction.blaschke(p, n)
    N = max(certified_truncation(tf), int(ks[-1]))
    spec = compute_spectrum(tf, N, engine)
    t = ks / n
    pp = phase_point(p, t)
    if not np.all(t * pp.r > 0.0):
        raise CertificationFailure("h~''(phi(t)) = t r(t) is not positive on the window")
    pred, amp, phase = theorem3_leading(p, n, t)
    exact = spec.coeffs[ks]
    err = np.abs(exact - pred)
    records = [
        AsymptoticRecord(
            n=n,
            k=int(k),
            t=float(tt),
            predicted=float(pv),
            exact=float(ev),
            abs_err=float(e),
            scaled_err=float(n * e),
            amplitude=float(a),
            phase_mod_2pi=float(ph % _TWO_PI),
        )
        for k, tt, pv, ev, e, a, ph in zip(ks, t, pred, exact, err, amp, phase)
    ]
    max_err = float(err.max())
    return ErrorProfile(p.lam, n, records, max_err, n * max_err)


def profile_csv(profiles) -> str:
    buf = io.StringIO()
    buf.write(",".join(PROFILE_COLUMNS) + "\n")
    for prof in profiles:
        for r in prof.records:
            buf.write(
                f"{prof.lam!r},{r.n},{r.k},{r.t!r},{r.predicted!r},{r.exact!r},"
                f"{r.abs_err!r},{r.scaled_err!r},{r.amplitude!r},{r.phase_mod_2pi!r}\n"
            )
    return buf.getvalue()
