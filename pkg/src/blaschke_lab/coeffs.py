"""Taylor coefficients of the two test families.

``BlaschkePower``: ``f_n(z) = b_lam(z)**n / (1 - lam z)`` with
``b_lam(z) = (z - lam)/(1 - lam z)``.
``Dirichlet``: ``D_n(z) = 1 + z + ... + z**(n-1)``.

Three engines compute the Blaschke coefficients: a forward recurrence (the
default), an FFT of boundary samples (fast path for large truncations) and a
closed-form binomial sum (the exact oracle).  Every :class:`Spectrum` carries a
tail bound on the discarded l1 mass obtained from a Cauchy estimate on a circle
of radius ``rho`` in ``(1, 1/lam)``.
"""

from __future__ import annotations

import enum
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np
from scipy.signal import lfilter

from .errors import (
    AliasingUncertified,
    CapacityExceeded,
    CertificationFailure,
    InvalidRadius,
    OracleCapExceeded,
    PrecisionExhausted,
)
from .phase import LambdaParam

__all__ = [
    "Family",
    "Engine",
    "TestFunction",
    "Spectrum",
    "MAX_N",
    "ORACLE_CAP",
    "coeffs_recurrence",
    "coeff_closed_form",
    "coeffs_closed_form",
    "coeffs_fft",
    "compute_spectrum",
    "dirichlet_coeffs",
    "tail_bound_of",
    "l2_tail_bound_of",
    "certified_truncation",
    "spectrum_to_csv",
    "spectrum_to_json",
]

#: Largest truncation index any engine accepts.
MAX_N = 1 << 24
#: Largest Blaschke exponent accepted by the closed-form oracle.
ORACLE_CAP = 2000
#: Relative l1 tolerance used when no truncation is requested.
DEFAULT_REL_TOL = 1e-9
#: Safety factor on the sampled maximum modulus in the Cauchy estimate.
SAFETY_FACTOR = 2.0
#: Work in recurrence rounds above which the ``auto`` engine switches to FFT.
AUTO_RECURRENCE_WORK = 2 * 10**7

_EPS = np.finfo(float).eps


class Family(str, enum.Enum):
    BLASCHKE_POWER = "BlaschkePower"
    DIRICHLET = "Dirichlet"


class Engine(str, enum.Enum):
    RECURRENCE = "Recurrence"
    CLOSED_FORM = "ClosedForm"
    FFT = "FFT"


@dataclass(frozen=True)
class TestFunction:
    """A member of one of the two test families.

    ``n`` is the Blaschke exponent for ``BlaschkePower`` and the number of
    ones for ``Dirichlet``.  ``lam`` is kept for Dirichlet only to form the
    comparison bound.
    """

    __test__ = False  # not a pytest class

    family: Family
    lam: LambdaParam
    n: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "lam", LambdaParam.parse(self.lam))
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"n must be a nonnegative integer, got {self.n!r}")
        if self.family is Family.DIRICHLET and self.n < 1:
            raise ValueError("the Dirichlet kernel needs n >= 1")
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def blaschke(cls, lam, n: int) -> "TestFunction":
        return cls(Family.BLASCHKE_POWER, LambdaParam.parse(lam), n)

    @classmethod
    def dirichlet(cls, n: int, lam=0.0) -> "TestFunction":
        return cls(Family.DIRICHLET, LambdaParam.parse(lam), n)

    @property
    def degree(self) -> int:
        """Index of the smallest class ``R_{m, lam}`` containing the function."""
        if self.family is Family.DIRICHLET:
            return self.n
        return self.n + 1


@dataclass(frozen=True)
class Spectrum:
    """Coefficients ``0..truncation_n`` plus certified tail information.

    ``tail_bound`` bounds the l1 mass of the discarded coefficients (and, for
    the FFT engine, the aliasing error).  ``l2_tail`` bounds the discarded
    squared l2 mass.  ``round_err`` is an a-priori estimate of the l1 norm of
    the floating-point error in ``coeffs``; it is a model, not a proof.
    """

    coeffs: np.ndarray
    truncation_n: int
    tail_bound: float
    engine: Engine
    precision_bits: int = 53
    l2_tail: float = 0.0
    round_err: float = 0.0
    function: TestFunction | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        arr = np.array(self.coeffs, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)
        for name in ("tail_bound", "l2_tail", "round_err"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if len(arr) != self.truncation_n + 1:
            raise ValueError("coeffs must have truncation_n + 1 entries")
        if not self.tail_bound >= 0.0:
            raise ValueError("tail_bound must be a nonnegative number")


# --------------------------------------------------------------------------
# tail bounds
# --------------------------------------------------------------------------

def _rho_grid(lam: float, size: int = 512) -> np.ndarray:
    top = math.log(1.0 / lam) * (1.0 - 1e-6)
    eps = np.geomspace(1e-8 * top, top, size)
    return np.exp(eps)


def _log_max_modulus(tf: TestFunction, rho: np.ndarray, samples: int) -> np.ndarray:
    """log of SAFETY_FACTOR * max over sampled |z| = rho of |f_n(z)|."""
    lam, n = tf.lam.lam, tf.n
    theta = 2.0 * np.pi * np.arange(samples) / samples
    z = rho[:, None] * np.exp(1j * theta)[None, :]
    den = np.log(np.abs(1.0 - lam * z))
    logf = n * (np.log(np.abs(z - lam)) - den) - den
    return logf.max(axis=1) + math.log(SAFETY_FACTOR)


def _check_rho(lam: float, rho: float) -> None:
    upper = math.inf if lam == 0.0 else 1.0 / lam
    if not (1.0 < rho < upper):
        raise InvalidRadius(f"rho must lie in (1, {upper}), got {rho!r}")


def _trivial_tail(tf: TestFunction, N: int) -> float | None:
    if tf.family is Family.DIRICHLET:
        return float(max(0, tf.n - 1 - N))
    if tf.lam.lam == 0.0:
        return 0.0 if N >= tf.n else 1.0
    return None


def tail_bound_of(
    tf: TestFunction, N: int, rho: float | None = None, samples: int = 256
) -> float:
    """Bound on ``sum_{k > N} |c_k|`` from a Cauchy estimate.

    On ``|z| = rho`` the coefficients obey ``|c_k| <= M(rho) rho**-k``, so the
    tail is at most ``M(rho) rho**-N / (1 - 1/rho)``.  ``M`` is the sampled
    maximum of ``|f_n|`` times a safety factor 2.  With ``rho=None`` the
    smallest bound over a logarithmic grid of radii is returned.
    """
    trivial = _trivial_tail(tf, N)
    if rho is not None:
        _check_rho(tf.lam.lam, rho)
    if trivial is not None:
        return trivial
    rhos = _rho_grid(tf.lam.lam) if rho is None else np.array([float(rho)])
    log_m = _log_max_modulus(tf, rhos, samples)
    log_tail = log_m - N * np.log(rhos) - np.log1p(-1.0 / rhos)
    return float(np.exp(log_tail.min()))


def l2_tail_bound_of(
    tf: TestFunction, N: int, rho: float | None = None, samples: int = 256
) -> float:
    """Bound on ``sum_{k > N} c_k**2`` (squared l2 tail)."""
    trivial = _trivial_tail(tf, N)
    if rho is not None:
        _check_rho(tf.lam.lam, rho)
    if trivial is not None:
        return trivial
    rhos = _rho_grid(tf.lam.lam) if rho is None else np.array([float(rho)])
    log_m = _log_max_modulus(tf, rhos, samples)
    log_tail = 2.0 * log_m - 2.0 * (N + 1) * np.log(rhos) - np.log1p(-(rhos**-2.0))
    return float(np.exp(log_tail.min()))


def certified_truncation(tf: TestFunction, tol: float | None = None) -> int:
    """Smallest ``N`` whose certified l1 tail is below ``tol``.

    The default ``tol`` is ``1e-9`` times a lower bound of the l1 norm (the
    exact l2 norm for the Blaschke family).
    """
    if tf.family is Family.DIRICHLET:
        return tf.n - 1
    lam = tf.lam.lam
    if lam == 0.0:
        return tf.n
    if tol is None:
        tol = DEFAULT_REL_TOL / math.sqrt(1.0 - lam * lam)
    rhos = _rho_grid(lam)
    log_m = _log_max_modulus(tf, rhos, 256)
    need = (log_m - np.log1p(-1.0 / rhos) - math.log(tol)) / np.log(rhos)
    N = max(int(math.ceil(float(need.min()))), 0)
    if N > MAX_N:
        raise CapacityExceeded(f"certified truncation {N} exceeds MAX_N={MAX_N}")
    # the grid minimum is attained exactly at this N; nudge for rounding in need
    while tail_bound_of(tf, N) > tol:
        N += 1
    return N


def _check_capacity(N: int) -> None:
    if N < 0:
        raise ValueError("truncation index must be nonnegative")
    if N > MAX_N:
        raise CapacityExceeded(f"truncation {N} exceeds MAX_N={MAX_N}")


# --------------------------------------------------------------------------
# engines
# --------------------------------------------------------------------------

def dirichlet_coeffs(n: int) -> Spectrum:
    """``n`` ones; the tail is exactly zero."""
    tf = TestFunction.dirichlet(n)
    return Spectrum(np.ones(n), n - 1, 0.0, Engine.CLOSED_FORM, function=tf)


def coeffs_recurrence(tf: TestFunction, N: int | None = None) -> Spectrum:
    """Coefficients by ``n`` rounds of multiplication by ``b_lam``.

    Starts from the geometric sequence of ``1/(1 - lam z)``.  Each round forms
    ``a = g * (z - lam)`` and divides by ``1 - lam z`` through
    ``c_k = a_k + lam c_{k-1}``, which is what ``lfilter`` evaluates.  The
    only feedback coefficient is ``lam < 1``, so the recursion is stable.
    """
    if tf.family is Family.DIRICHLET:
        return dirichlet_coeffs(tf.n)
    N = certified_truncation(tf) if N is None else int(N)
    _check_capacity(N)
    lam = tf.lam.lam
    g = lam ** np.arange(N + 1, dtype=float)
    num, den = [-lam, 1.0], [1.0, -lam]
    for _ in range(tf.n):
        g = lfilter(num, den, g)
    peak = float(np.abs(g).max()) if len(g) else 0.0
    growth = (1.0 + lam) / (1.0 - lam)
    round_err = float(4.0 * _EPS * (tf.n + 1) * growth * peak * (N + 1))
    return Spectrum(
        g,
        N,
        tail_bound_of(tf, N),
        Engine.RECURRENCE,
        l2_tail=l2_tail_bound_of(tf, N),
        round_err=round_err,
        function=tf,
    )


def _closed_form_int(n: int, k: int, p: int, q: int) -> Fraction:
    # q**(n+k) * c_k = sum_j (-1)**(n-j) C(n,j) C(k-j+n,n) p**(n+k-2j) q**(2j)
    total = 0
    for j in range(min(n, k) + 1):
        term = math.comb(n, j) * math.comb(k - j + n, n) * p ** (n + k - 2 * j) * q ** (2 * j)
        total += -term if (n - j) % 2 else term
    return Fraction(total, q ** (n + k))


def coeff_closed_form(
    tf: TestFunction, k: int, digits: int = 30, max_dps: int = 4000
) -> Fraction | mpmath.mpf:
    """Exact coefficient ``c_k`` from ``f_n = (z - lam)**n (1 - lam z)**-(n+1)``.

    ``c_k = sum_j C(n,j) (-lam)**(n-j) C(k-j+n, n) lam**(k-j)``.  For a
    rational ``lam`` the sum is done in integers and a Fraction is returned.
    Otherwise it is evaluated in mpmath with enough guard digits to absorb the
    binomial cancellation, twice at different precisions; unless both agree
    to ``digits`` significant digits PrecisionExhausted is raised.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if tf.family is Family.DIRICHLET:
        return Fraction(1 if k < tf.n else 0)
    n = tf.n
    if n > ORACLE_CAP:
        raise OracleCapExceeded(f"n={n} exceeds the oracle cap {ORACLE_CAP}")
    exact = tf.lam.exact
    if exact is not None:
        return _closed_form_int(n, k, exact.numerator, exact.denominator)

    lam_f = tf.lam.lam
    # magnitude of the largest term in decimal digits, to size the guard
    log_terms = [
        math.lgamma(n + 1) - math.lgamma(j + 1) - math.lgamma(n - j + 1)
        + math.lgamma(k - j + n + 1) - math.lgamma(n + 1) - math.lgamma(k - j + 1)
        + (n + k - 2 * j) * math.log(lam_f)
        for j in range(min(n, k) + 1)
    ] if lam_f > 0 else [0.0]
    dps = digits + 15 + max(0, int(max(log_terms) / math.log(10)) + 1)

    def evaluate(dps: int) -> mpmath.mpf:
        with mpmath.workdps(dps):
            lam = mpmath.mpf(tf.lam.lam)
            total = mpmath.mpf(0)
            for j in range(min(n, k) + 1):
                total += (
                    mpmath.binomial(n, j) * (-lam) ** (n - j)
                    * mpmath.binomial(k - j + n, n) * lam ** (k - j)
                )
            return total

    while dps <= max_dps:
        a, b = evaluate(dps), evaluate(dps + 20)
        with mpmath.workdps(dps + 20):
            if a == b or abs(a - b) <= mpmath.mpf(10) ** (-digits) * abs(b):
                return +b
        dps *= 2
    raise PrecisionExhausted(f"could not certify {digits} digits of c_{k} for n={n}")


def coeffs_closed_form(tf: TestFunction, N: int) -> Spectrum:
    """Spectrum assembled from the exact oracle (small instances only)."""
    _check_capacity(N)
    vals = [coeff_closed_form(tf, k) for k in range(N + 1)]
    arr = np.array([float(v) for v in vals])
    return Spectrum(
        arr,
        N,
        tail_bound_of(tf, N),
        Engine.CLOSED_FORM,
        precision_bits=0 if tf.lam.exact is not None else 100,
        l2_tail=l2_tail_bound_of(tf, N),
        round_err=_EPS * float(np.abs(arr).sum()),
        function=tf,
    )


def _fft_length(N: int, oversample: int) -> int:
    return 1 << max(int(math.ceil(math.log2(max(oversample * (N + 1), 2)))), 1)


def coeffs_fft(
    tf: TestFunction,
    N: int | None = None,
    oversample: int | None = None,
    tol: float | None = None,
) -> Spectrum:
    """Coefficients from an FFT of ``f_n`` sampled on the unit circle.

    ``b_lam(e^{is})**n`` is formed as ``exp(i n arg b_lam(e^{is}))`` so no
    power is taken of a rounded unimodular number.  With ``M`` samples the
    computed ``c_k`` equals ``sum_m c_{k + mM}``; the l1 aliasing error over
    indices ``0..N`` is therefore at most the tail beyond ``M - 1``, which is
    added to ``tail_bound``.  AliasingUncertified is raised if that aliasing
    bound exceeds ``tol``.

    With ``oversample=None`` the length is the smallest power of two that
    covers ``2 (N + 1)`` and makes the aliasing bound at most ``1e-14``
    (or ``tol``); an explicit ``oversample`` fixes ``M >= oversample (N+1)``.
    """
    if tf.family is Family.DIRICHLET:
        return dirichlet_coeffs(tf.n)
    N = certified_truncation(tf) if N is None else int(N)
    _check_capacity(N)
    if oversample is None:
        alias_tol = 1e-14 if tol is None else tol
        M = max(_fft_length(N, 2), _fft_length(certified_truncation(tf, alias_tol), 1))
    elif oversample < 1:
        raise ValueError("oversample must be >= 1")
    else:
        M = _fft_length(N, oversample)
    if M > 4 * MAX_N:
        raise CapacityExceeded(f"FFT length {M} too large")
    lam = tf.lam.lam
    s = 2.0 * np.pi * np.arange(M) / M
    e = np.exp(1j * s)
    arg_b = s - 2.0 * np.arctan2(-lam * np.sin(s), 1.0 - lam * np.cos(s))
    f = np.exp(1j * (tf.n * arg_b)) / (1.0 - lam * e)
    c = np.fft.fft(f)[: N + 1] / M
    peak = float(np.abs(c).max())
    if peak and float(np.abs(c.imag).max()) >= 1e-12 * max(1.0, peak):
        raise CertificationFailure(
            f"FFT coefficients have imaginary parts up to {np.abs(c.imag).max():.3e}"
        )
    alias = tail_bound_of(tf, M - 1)
    if tol is not None and alias > tol:
        raise AliasingUncertified(f"aliasing bound {alias:.3e} exceeds {tol:.3e}")
    f_max = 1.0 / (1.0 - lam)
    per_coeff = 4.0 * _EPS * (tf.n * math.pi + math.log2(M) + 1.0) * f_max
    return Spectrum(
        c.real,
        N,
        tail_bound_of(tf, N) + alias,
        Engine.FFT,
        l2_tail=l2_tail_bound_of(tf, N) + alias * alias + 2.0 * alias * f_max,
        round_err=per_coeff * (N + 1),
        function=tf,
    )


def compute_spectrum(
    tf: TestFunction,
    N: int | None = None,
    engine: str | Engine = "auto",
    rel_tol: float | None = None,
) -> Spectrum:
    """Dispatch to an engine; ``auto`` picks FFT when the recurrence is costly.

    Without ``N`` the truncation is certified at ``rel_tol`` (default
    ``1e-9``) relative to a lower bound of the l1 norm.
    """
    if tf.family is Family.DIRICHLET:
        return dirichlet_coeffs(tf.n)
    if N is None and rel_tol is not None and tf.lam.lam > 0.0:
        lam = tf.lam.lam
        N = certified_truncation(tf, rel_tol / math.sqrt(1.0 - lam * lam))
    if engine == "auto":
        N = certified_truncation(tf) if N is None else N
        engine = Engine.RECURRENCE if tf.n * (N + 1) <= AUTO_RECURRENCE_WORK else Engine.FFT
    engine = Engine(engine)
    if engine is Engine.RECURRENCE:
        return coeffs_recurrence(tf, N)
    if engine is Engine.FFT:
        return coeffs_fft(tf, N)
    N = certified_truncation(tf) if N is None else N
    return coeffs_closed_form(tf, N)


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def spectrum_to_csv(spec: Spectrum) -> str:
    buf = io.StringIO()
    buf.write("k,coeff\n")
    for k, c in enumerate(spec.coeffs):
        buf.write(f"{k},{float(c)!r}\n")
    return buf.getvalue()


def spectrum_to_json(spec: Spectrum, version: str | None = None) -> str:
    tf = spec.function
    doc = {
        "engine": spec.engine.value,
        "precision_bits": spec.precision_bits,
        "tail_bound": spec.tail_bound,
        "l2_tail": spec.l2_tail,
        "round_err": spec.round_err,
        "truncation_n": spec.truncation_n,
        "coeffs": [float(c) for c in spec.coeffs],
    }
    if tf is not None:
        doc.update(family=tf.family.value, n=tf.n, **{"lambda": tf.lam.lam})
    if version is not None:
        doc["version"] = version
    return json.dumps(doc, sort_keys=True, indent=1)
