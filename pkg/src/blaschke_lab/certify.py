"""Invariant suites shared by the ``certify`` command.

Each suite returns a :class:`SuiteResult` whose ``worst`` is the largest
observed ratio of error to allowed error, so ``worst <= 1`` means pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .coeffs import (
    Family,
    TestFunction,
    certified_truncation,
    coeff_closed_form,
    coeffs_closed_form,
    coeffs_fft,
    coeffs_recurrence,
    l2_tail_bound_of,
)
from .phase import LambdaParam, h_prime, h_second, phase_point, stationary_points

__all__ = [
    "SuiteResult",
    "cross_engine_suite",
    "parseval_suite",
    "derivative_suite",
    "run_all",
    "SMALL_GRID",
    "FULL_GRID",
]

SMALL_GRID = ((0.3, 0.5, 0.75, 0.9), tuple(range(1, 13)))
FULL_GRID = ((0.3, 0.5, 0.75, 0.9), tuple(range(1, 61)))


@dataclass(frozen=True)
class SuiteResult:
    suite: str
    cases: int
    worst: float

    @property
    def passed(self) -> bool:
        return self.worst <= 1.0


def cross_engine_suite(lams, ns, k_factor: int = 4, atol: float = 1e-10, rtol: float = 1e-10) -> SuiteResult:
    """Recurrence, closed form and FFT agree on ``k = 0..k_factor*n``."""
    worst, cases = 0.0, 0
    for lam in lams:
        for n in ns:
            tf = TestFunction.blaschke(lam, n)
            N = k_factor * n
            ref = coeffs_closed_form(tf, N).coeffs
            allowed = np.maximum(atol, rtol * np.abs(ref))
            for other in (coeffs_recurrence(tf, N).coeffs, coeffs_fft(tf, N).coeffs):
                worst = max(worst, float((np.abs(other - ref) / allowed).max()))
            cases += 1
    return SuiteResult("cross_engine", cases, worst)


def parseval_suite(lams, ns) -> SuiteResult:
    """Exact partial sums of ``c_k**2`` against ``1/(1 - lam**2)``.

    Coefficients are exact rationals, so the difference is exactly the
    discarded squared mass, which must sit below twice its certified bound.
    """
    worst, cases = 0.0, 0
    for lam in lams:
        p = LambdaParam.parse(lam)
        if p.exact is None:
            raise ValueError(f"lambda={lam} has no exact rational form")
        for n in ns:
            tf = TestFunction(Family.BLASCHKE_POWER, p, n)
            N = certified_truncation(tf)
            total = sum((coeff_closed_form(tf, k) ** 2 for k in range(N + 1)), Fraction(0))
            target = 1 / (1 - p.exact**2)
            gap = abs(float(target - total))
            worst = max(worst, gap / (2.0 * l2_tail_bound_of(tf, N)))
            cases += 1
    return SuiteResult("parseval", cases, worst)


def _fd(f, x, h):
    return (f(x + h) - f(x - h)) / (2.0 * h)


def derivative_suite(points: int = 1000, seed: int = 0, rtol: float = 1e-5) -> SuiteResult:
    """Central differences of phi, psi, F and F' against closed forms.

    Also checks the stationary-point residual (``< 1e-10``) and that the
    second derivative of the phase there equals ``t r(t)`` (``1e-10``
    relative).  ``(lam, t)`` are drawn uniformly from ``(0.05, 0.95)`` and
    the interior of ``(alpha, 1/alpha)``.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        lam = float(rng.uniform(0.05, 0.95))
        p = LambdaParam.parse(lam)
        a, b = p.alpha, p.alpha_inv
        t = float(a + (b - a) * rng.uniform(0.05, 0.95))
        h = 1e-6 * t
        pp = phase_point(p, t)

        def at(x, name):
            return getattr(phase_point(p, x), name)

        checks = (
            (_fd(lambda x: at(x, "phi"), t, h), pp.phi_prime),
            (_fd(lambda x: at(x, "psi"), t, h), pp.psi_prime),
            (_fd(lambda x: at(x, "big_f"), t, h), -pp.phi),
            (_fd(lambda x: at(x, "big_f_prime"), t, h), pp.big_f_second),
            (pp.big_f_second, 1.0 / (t * pp.r)),
        )
        for fd, exact in checks:
            scale = max(abs(exact), 1e-3 * abs(pp.phi_prime))
            worst = max(worst, abs(fd - exact) / (rtol * scale))
        res = abs(float(h_prime(p, t, pp.phi)))
        worst = max(worst, res / 1e-10)
        h2 = -float(h_second(p, pp.phi))
        worst = max(worst, abs(h2 - t * pp.r) / (1e-10 * t * pp.r))
    sp = stationary_points(LambdaParam.parse(0.5), 1.0)
    worst = max(worst, max(sp.residual_plus, sp.residual_minus) / 1e-10)
    return SuiteResult("derivatives", points, worst)


def run_all(small: bool = True) -> list[SuiteResult]:
    lams, ns = SMALL_GRID if small else FULL_GRID
    return [
        cross_engine_suite(lams, ns),
        parseval_suite(lams, ns),
        derivative_suite(200 if small else 1000),
    ]
