"""Wiener (l1) and Hardy (l2) norms, the Nikolskii ratio and sharpness sweeps.

Norms are returned as intervals: the lower end drops the estimated rounding
error, the upper end adds the certified truncation tail and the rounding
error.  The sharpness constant divides the ratio by ``sqrt(m / (1 - lam))``
where ``m`` is the class index of the test function (``n + 1`` for
``b_lam**n / (1 - lam z)``, ``n`` for the Dirichlet kernel).
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .coeffs import Engine, Family, Spectrum, TestFunction, compute_spectrum
from .errors import CapacityExceeded, NoRoot, UncertifiedTail
from .phase import LambdaParam

__all__ = [
    "Interval",
    "NormReport",
    "SweepRecord",
    "LAMBDA_CLAMP",
    "l1_norm",
    "l2_norm",
    "l2_exact",
    "nikolskii_ratio",
    "report_from_spectrum",
    "dirichlet_comparison",
    "partial_l1_window",
    "sharpness_sweep",
    "sweep_csv",
    "SWEEP_COLUMNS",
]

#: Sweeps refuse ``lam`` at or above this value.
LAMBDA_CLAMP = 0.999

SWEEP_COLUMNS = (
    "lambda", "n", "l1_low", "l1_high", "l2", "ratio_low", "ratio_high",
    "constant_low", "constant_high", "partial_l1_In",
)


@dataclass(frozen=True)
class Interval:
    low: float
    high: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "low", float(self.low))
        object.__setattr__(self, "high", float(self.high))

    @property
    def mid(self) -> float:
        return 0.5 * (self.low + self.high)

    @property
    def width(self) -> float:
        return self.high - self.low

    def __contains__(self, x: float) -> bool:
        return self.low <= x <= self.high

    def scale(self, factor: float) -> "Interval":
        return Interval(self.low * factor, self.high * factor)


def _check_tail(s: Spectrum) -> None:
    if s.tail_bound is None or not math.isfinite(s.tail_bound):
        raise UncertifiedTail("spectrum has no finite tail bound")


def l1_norm(s: Spectrum) -> Interval:
    """``[sum |c_k| - err, sum |c_k| + tail + err]``."""
    _check_tail(s)
    part = math.fsum(np.abs(s.coeffs))
    return Interval(max(part - s.round_err, 0.0), part + s.tail_bound + s.round_err)


def l2_norm(s: Spectrum) -> Interval:
    _check_tail(s)
    if not math.isfinite(s.l2_tail):
        raise UncertifiedTail("spectrum has no finite l2 tail bound")
    sq = math.fsum(s.coeffs * s.coeffs)
    return Interval(
        max(math.sqrt(sq) - s.round_err, 0.0), math.sqrt(sq + s.l2_tail) + s.round_err
    )


def l2_exact(lam) -> float:
    """``1/sqrt(1 - lam^2)``: multiplication by ``b_lam**n`` is an H2 isometry."""
    lam = LambdaParam.parse(lam).lam
    return 1.0 / math.sqrt(1.0 - lam * lam)


@dataclass(frozen=True)
class NormReport:
    n: int
    lam: float
    family: Family
    degree: int
    l1: Interval
    l2: Interval
    ratio: Interval
    sharpness_constant: Interval
    engine: Engine
    truncation_n: int
    tail_bound: float


def nikolskii_ratio(
    tf: TestFunction,
    engine: str | Engine = "auto",
    N: int | None = None,
    rel_tol: float | None = None,
) -> NormReport:
    """Norms, ratio ``l1/l2`` and ratio over ``sqrt(degree / (1 - lam))``."""
    return report_from_spectrum(tf, compute_spectrum(tf, N, engine, rel_tol))


def report_from_spectrum(tf: TestFunction, spec: Spectrum) -> NormReport:
    lam = tf.lam.lam
    if tf.family is Family.DIRICHLET:
        l1 = Interval(float(tf.n), float(tf.n))
        root = math.sqrt(tf.n)
        l2 = Interval(root, root)
        ratio = Interval(root, root)
    else:
        l1 = l1_norm(spec)
        l2 = l2_norm(spec)
        ratio = Interval(l1.low / l2.high, l1.high / l2.low)
    if tf.family is Family.DIRICHLET:
        # sqrt(n) / sqrt(n / (1 - lam)) collapses to sqrt(1 - lam)
        c = math.sqrt(1.0 - lam)
        constant = Interval(c, c)
    else:
        constant = ratio.scale(1.0 / math.sqrt(tf.degree / (1.0 - lam)))
    return NormReport(
        n=tf.n,
        lam=lam,
        family=tf.family,
        degree=tf.degree,
        l1=l1,
        l2=l2,
        ratio=ratio,
        sharpness_constant=constant,
        engine=spec.engine,
        truncation_n=spec.truncation_n,
        tail_bound=spec.tail_bound,
    )


def dirichlet_comparison(report: NormReport) -> float:
    """Ratio divided by ``sqrt(n / (2 (1 - lam)))``; at least 1 for ``lam <= 1/2``."""
    return report.ratio.low / math.sqrt(report.n / (2.0 * (1.0 - report.lam)))


def partial_l1_window(spec: Spectrum, beta: float) -> float:
    """``sum_{k in I_n} |c_k|`` over ``I_n = Z cap [beta n, n / beta]``."""
    n = spec.function.n
    lo = math.ceil(beta * n)
    hi = min(math.floor(n / beta), spec.truncation_n)
    if lo > hi:
        return 0.0
    return math.fsum(np.abs(spec.coeffs[lo: hi + 1]))


@dataclass(frozen=True)
class SweepRecord:
    lam: float
    n: int
    l1_low: float
    l1_high: float
    l2: float
    ratio_low: float
    ratio_high: float
    constant_low: float
    constant_high: float
    partial_l1_In: float

    def row(self) -> tuple:
        return (
            self.lam, self.n, self.l1_low, self.l1_high, self.l2, self.ratio_low,
            self.ratio_high, self.constant_low, self.constant_high, self.partial_l1_In,
        )


def _beta_for(p: LambdaParam) -> float | None:
    from .equidist import beta_solve

    if p.lam == 0.0:
        return None
    try:
        return beta_solve(p).beta
    except NoRoot:
        return None


def _sweep_cell(family: Family, p: LambdaParam, n: int, beta, engine, rel_tol) -> SweepRecord:
    tf = TestFunction(family, p, n)
    spec = compute_spectrum(tf, engine=engine, rel_tol=rel_tol)
    rep = report_from_spectrum(tf, spec)
    partial = math.nan
    if beta is not None and family is Family.BLASCHKE_POWER and n > 0:
        partial = partial_l1_window(spec, beta)
    return SweepRecord(
        lam=p.lam,
        n=n,
        l1_low=rep.l1.low,
        l1_high=rep.l1.high,
        l2=rep.l2.mid,
        ratio_low=rep.ratio.low,
        ratio_high=rep.ratio.high,
        constant_low=rep.sharpness_constant.low,
        constant_high=rep.sharpness_constant.high,
        partial_l1_In=partial,
    )


def sharpness_sweep(
    lambdas,
    ns,
    family: Family | str = Family.BLASCHKE_POWER,
    engine: str | Engine = "auto",
    threads: int = 1,
    rel_tol: float | None = None,
    betas: dict | None = None,
) -> list[SweepRecord]:
    """One :class:`SweepRecord` per ``(lam, n)``, sorted by ``(lam, n)``.

    Cells are independent and run on up to ``threads`` worker threads; the
    output order never depends on completion order.  ``betas`` overrides
    the solved window parameter per ``lam`` value.
    """
    family = Family(family)
    params = sorted({LambdaParam.parse(x) for x in lambdas}, key=lambda q: q.lam)
    ns = sorted(set(int(n) for n in ns))
    if not params or not ns:
        raise ValueError("sweep grids must be nonempty")
    for q in params:
        if q.lam >= LAMBDA_CLAMP:
            raise CapacityExceeded(f"lambda={q.lam} is at or above the clamp {LAMBDA_CLAMP}")
    override = {LambdaParam.parse(k).lam: v for k, v in (betas or {}).items()}
    if family is Family.BLASCHKE_POWER:
        window = {q: override.get(q.lam, None) or _beta_for(q) for q in params}
    else:
        window = {}

    def cell(job):
        q, n = job
        return _sweep_cell(family, q, n, window.get(q), engine, rel_tol)

    jobs = [(q, n) for q in params for n in ns]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(cell, jobs))
    else:
        rows = [cell(job) for job in jobs]
    return sorted(rows, key=lambda r: (r.lam, r.n))


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(SWEEP_COLUMNS) + "\n")
    for r in rows:
        buf.write(",".join(repr(float(v)) if isinstance(v, float) else str(int(v)) for v in r.row()) + "\n")
    return buf.getvalue()
