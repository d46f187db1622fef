import cmath
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from blaschke_lab.errors import (
    CertificationFailure,
    DegenerateLambda,
    InvalidLambda,
    NonpositiveT,
    OutOfRangeT,
)
from blaschke_lab.phase import (
    LambdaParam,
    h_eval,
    h_prime,
    h_second,
    phase_point,
    q_of,
    stationary_points,
)

P = LambdaParam.parse("0.5")


def interior_point(lam, u):
    p = LambdaParam.parse(lam)
    a, b = p.alpha, p.alpha_inv
    return p, a + (b - a) * u


lam_st = st.floats(min_value=0.02, max_value=0.97)
u_st = st.floats(min_value=0.01, max_value=0.99)


# ---- LambdaParam ----

def test_lambda_parse_exact():
    p = LambdaParam.parse("0.5")
    assert p.lam == 0.5 and p.exact == Fraction(1, 2)
    assert p.alpha == pytest.approx(1 / 3) and p.alpha_inv == pytest.approx(3.0)


def test_lambda_parse_decimal_string_keeps_rational():
    assert LambdaParam.parse("0.3").exact == Fraction(3, 10)


@pytest.mark.parametrize("bad", ["1", "-0.1", "1.5", "abc", float("nan")])
def test_lambda_rejects(bad):
    with pytest.raises(InvalidLambda):
        LambdaParam.parse(bad)


def test_lambda_zero_rejected_by_phase():
    with pytest.raises(DegenerateLambda):
        phase_point(LambdaParam.parse(0), 1.0)


# ---- q_of ----

def test_q_examples():
    assert q_of(P, 1.0) == pytest.approx(0.5, abs=1e-15)
    assert q_of(P, 1 / 3) == pytest.approx(-1.0, abs=1e-15)
    assert q_of(P, 3.0) == pytest.approx(1.0, abs=1e-15)


# ---- phase_point ----

def test_phase_point_at_one():
    pp = phase_point(P, 1.0)
    assert pp.phi == pytest.approx(math.pi / 3, abs=1e-15)
    assert pp.r == pytest.approx(2 / math.sqrt(3), abs=1e-15)
    assert pp.psi == pytest.approx(-math.pi / 6, abs=1e-15)
    assert pp.big_f == pytest.approx(math.pi / 3, abs=1e-15)
    assert pp.psi_prime == pytest.approx(0.0, abs=1e-15)
    assert pp.phi_prime == pytest.approx(-math.sqrt(3) / 2, abs=1e-15)


def test_phase_point_high_precision_agrees():
    pp = phase_point(P, 1.0, prec=200)
    with mpmath.workprec(200):
        assert abs(pp.phi - mpmath.pi / 3) < mpmath.mpf(10) ** -55
        assert abs(pp.r - 2 / mpmath.sqrt(3)) < mpmath.mpf(10) ** -55


def test_phi_tends_to_pi_at_alpha():
    pp = phase_point(P, 1 / 3 + 1e-12)
    assert pp.phi == pytest.approx(math.pi, abs=1e-5)


def test_t_domain_errors():
    with pytest.raises(NonpositiveT):
        phase_point(P, 0.0)
    with pytest.raises(OutOfRangeT):
        phase_point(P, 3.0)
    with pytest.raises(OutOfRangeT):
        phase_point(P, 0.2)


@given(lam_st, u_st)
def test_cos_phi_equals_q(lam, u):
    p, t = interior_point(lam, u)
    assert abs(math.cos(phase_point(p, t).phi) - q_of(p, t)) < 1e-12


@given(lam_st, u_st)
def test_modulus_identity(lam, u):
    p, t = interior_point(lam, u)
    phi = phase_point(p, t).phi
    got = abs(1 - lam * cmath.exp(1j * phi))
    assert got == pytest.approx(math.sqrt((1 - lam * lam) / t), rel=1e-12)


@given(lam_st, u_st)
def test_r_from_q(lam, u):
    p, t = interior_point(lam, u)
    q = q_of(p, t)
    want = 2 * lam * t / (1 - lam * lam) * math.sqrt(1 - q * q)
    assert phase_point(p, t).r == pytest.approx(want, rel=1e-10)


def _fd(f, x, h=1e-6):
    return (f(x + h) - f(x - h)) / (2 * h)


@given(lam_st, st.floats(min_value=0.05, max_value=0.95))
def test_derivatives_against_finite_differences(lam, u):
    p, t = interior_point(lam, u)
    pp = phase_point(p, t)
    h = 1e-6 * t
    scale = abs(pp.phi_prime)
    pairs = [
        ("phi", pp.phi_prime),
        ("psi", pp.psi_prime),
        ("big_f", pp.big_f_prime),
        ("big_f_prime", pp.big_f_second),
        ("r", pp.r_prime),
        ("psi_prime", pp.psi_second),
    ]
    for name, exact in pairs:
        fd = _fd(lambda x: getattr(phase_point(p, x), name), t, h)
        assert abs(fd - exact) <= 1e-5 * max(abs(exact), 1e-3 * scale), name


@given(lam_st, u_st)
def test_f_prime_is_minus_phi_and_f_second(lam, u):
    p, t = interior_point(lam, u)
    pp = phase_point(p, t)
    assert pp.big_f_prime == pytest.approx(-pp.phi, rel=1e-14)
    assert pp.big_f_second == pytest.approx(1 / (t * pp.r), rel=1e-12)


def test_vectorized_matches_scalar():
    ts = np.linspace(0.4, 2.9, 7)
    vec = phase_point(P, ts)
    for i, t in enumerate(ts):
        assert vec.big_f[i] == phase_point(P, float(t)).big_f


# ---- h ----

def test_h_examples():
    assert h_eval(P, 1.0, math.pi / 3) == pytest.approx(math.pi / 3, abs=1e-15)
    assert h_eval(P, 1.0, math.pi / 3) == pytest.approx(phase_point(P, 1.0).big_f, abs=1e-15)
    assert h_second(P, 0.0) == 0.0
    assert h_second(P, math.pi / 3) == pytest.approx(-2 / math.sqrt(3), rel=1e-14)
    assert h_second(P, math.pi / 2) == pytest.approx(-0.48, rel=1e-14)


@given(lam_st, st.floats(min_value=0.1, max_value=5.0))
def test_h_is_zero_at_origin(lam, t):
    assert h_eval(LambdaParam.parse(lam), t, 0.0) == 0.0


@given(lam_st, u_st)
def test_h_at_stationary_point_is_f(lam, u):
    p, t = interior_point(lam, u)
    pp = phase_point(p, t)
    assert h_eval(p, t, pp.phi) == pytest.approx(pp.big_f, abs=1e-12)


def test_h_matches_unwrapped_argument():
    s = np.linspace(0, math.pi, 401)
    t = 1.3
    b = (np.exp(1j * s) - 0.5) / (1 - 0.5 * np.exp(1j * s))
    want = np.unwrap(np.angle(b)) - t * s
    assert np.allclose(h_eval(P, t, s), want, atol=1e-13)


@given(lam_st, st.floats(min_value=0.05, max_value=3.0))
def test_h_derivatives_finite_difference(lam, s):
    p = LambdaParam.parse(lam)
    t = 1.1
    assert _fd(lambda x: h_eval(p, t, x), s) == pytest.approx(h_prime(p, t, s), rel=1e-5, abs=1e-8)
    assert _fd(lambda x: h_prime(p, t, x), s) == pytest.approx(h_second(p, s), rel=1e-5, abs=1e-8)


@given(lam_st, u_st)
def test_stationary_identity(lam, u):
    p, t = interior_point(lam, u)
    pp = phase_point(p, t)
    assert abs(h_prime(p, t, pp.phi)) < 1e-10
    assert h_second(p, pp.phi) == pytest.approx(-t * pp.r, rel=1e-10)


# ---- stationary points ----

def test_stationary_points_at_one():
    sp = stationary_points(P, 1.0)
    assert sp.z_plus == pytest.approx(cmath.exp(1j * math.pi / 3), abs=1e-15)
    assert sp.z_minus == pytest.approx(cmath.exp(-1j * math.pi / 3), abs=1e-15)
    assert sp.residual_plus < 1e-10 and sp.residual_minus < 1e-10


def test_stationary_second_derivative_finite_difference():
    sp = stationary_points(P, 1.0)
    with mpmath.workdps(40):
        lam, t = mpmath.mpf(1) / 2, mpmath.mpf(1)

        def big_phi(z):
            return -t * mpmath.log(z) + mpmath.log(z - lam) - mpmath.log(1 - lam * z)

        z = mpmath.expj(mpmath.pi / 3)
        h = mpmath.mpf(10) ** -8
        fd = (big_phi(z + h) - 2 * big_phi(z) + big_phi(z - h)) / h**2
    assert abs(complex(fd) - sp.phi2_plus) <= 1e-6 * abs(sp.phi2_plus)


def test_stationary_tolerance_failure():
    with pytest.raises(CertificationFailure):
        stationary_points(P, 1.0, tol=1e-300)
