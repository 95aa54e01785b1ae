import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special as sc

from rmtprod import specfun
from rmtprod.errors import DivergenceError, DomainError, PoleError, ValidationError
from rmtprod.quad import integrate
from rmtprod.specfun import EvalPolicy, meijer, meijer_g


# --------------------------------------------------------------- log_gamma


def test_log_gamma_values():
    assert specfun.log_gamma(1.0) == pytest.approx(0.0, abs=1e-15)
    assert specfun.log_gamma(0.5) == pytest.approx(0.5723649429247001, rel=1e-14)
    assert math.exp(specfun.log_gamma(4.7) - specfun.log_gamma(3.7)) == pytest.approx(3.7, rel=1e-13)


@pytest.mark.parametrize("z", [0, -1, -7])
def test_log_gamma_pole(z):
    with pytest.raises(PoleError):
        specfun.log_gamma(z)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.5, 20), st.floats(-10, 10))
def test_log_gamma_recurrence(re, im):
    z = complex(re, im)
    err = specfun.log_gamma(z + 1) - specfun.log_gamma(z) - np.log(z)
    assert abs(err) < 1e-12


@pytest.mark.parametrize("z", [0.3 + 0j, 2.5 - 4j, -3.7 + 0.2j, 12 + 30j])
def test_log_gamma_vs_mpmath(z):
    assert abs(specfun.log_gamma(z) - complex(mp.loggamma(z))) < 1e-12 * max(1, abs(complex(mp.loggamma(z))))


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("z", [0.7, 1.3, 2.9])
def test_gauss_multiplication(n, z):
    lhs = specfun.log_gamma(n * z)
    rhs = (0.5 * (1 - n) * math.log(2 * math.pi) + (n * z - 0.5) * math.log(n)
           + sum(specfun.log_gamma(z + k / n) for k in range(n)))
    assert abs(math.exp((lhs - rhs).real) - 1) < 1e-11


def test_log_gamma_ratio_matches_direct():
    val, sign = specfun.log_gamma_ratio([4.5, -0.5], [2.0])
    direct = math.gamma(4.5) * math.gamma(-0.5) / math.gamma(2.0)
    assert sign * math.exp(val) == pytest.approx(direct, rel=1e-13)


# --------------------------------------------------------------- polygamma


def test_polygamma_values():
    assert specfun.polygamma(0, 1) == pytest.approx(-0.5772156649015329, rel=1e-14)
    assert specfun.polygamma(1, 1) == pytest.approx(math.pi ** 2 / 6, rel=1e-14)
    assert specfun.polygamma(0, 3.5) - specfun.polygamma(0, 2.5) == pytest.approx(0.4, rel=1e-13)


@pytest.mark.parametrize("order,x", [(0, 0.3), (1, 7.25), (2, 1.5), (3, 0.9)])
def test_polygamma_vs_mpmath(order, x):
    assert specfun.polygamma(order, x) == pytest.approx(float(mp.polygamma(order, x)), rel=1e-12)


@pytest.mark.parametrize("x", [0, -2])
def test_polygamma_pole(x):
    with pytest.raises(PoleError):
        specfun.polygamma(0, x)


# --------------------------------------------------------------- hyper_pfq


def test_hyper_values():
    assert specfun.hyper_pfq([-1], [1], 0.3) == pytest.approx(0.7, rel=1e-14)
    assert specfun.hyper_pfq([], [], 1.0) == pytest.approx(math.e, rel=1e-14)
    assert specfun.hyper_pfq([1], [2], 1.0) == pytest.approx(math.e - 1, rel=1e-13)


@pytest.mark.parametrize("a,b,z", [([0.5, 1.5], [2.5], 0.7), ([1.2], [0.3, 2.0], -4.0), ([-3, 2.5], [1.5], 10.0)])
def test_hyper_vs_mpmath(a, b, z):
    assert specfun.hyper_pfq(a, b, z) == pytest.approx(float(mp.hyper(a, b, z)), rel=1e-11)


def test_hyper_divergent():
    with pytest.raises(DivergenceError):
        specfun.hyper_pfq([1, 1, 1], [1], 0.1)


# ----------------------------------------------------------------- meijer


def test_meijer_spec_invariants():
    with pytest.raises(ValidationError):
        meijer(3, 0, (), (0.0, 1.0))
    with pytest.raises(ValidationError):
        # b_1 − a_1 + 1 = 0 puts a pole of Γ(b−u) on a pole of Γ(1−a+u)
        meijer(1, 1, (1.0,), (0.0,))


def test_meijer_paper_values():
    assert meijer_g(meijer(1, 0, (), (0.0,)), 1.0) == pytest.approx(0.36787944117144233, rel=1e-12)
    assert meijer_g(meijer(1, 0, (1.0,), (0.0,)), 0.5) == pytest.approx(1.0, rel=1e-10)
    assert meijer_g(meijer(1, 0, (1.0,), (0.0,)), 2.0) == pytest.approx(0.0, abs=1e-10)
    assert meijer_g(meijer(2, 0, (), (0.0, 0.0)), 1.0) == pytest.approx(2 * sc.k0(2.0), rel=1e-10)


_MP_CASES = [
    (2, 0, (), (0.0, 0.0), [0.01, 0.5, 3.0, 40.0]),
    (3, 0, (), (0.0, 1.0, 2.5), [0.02, 1.0, 30.0, 900.0]),
    (1, 1, (0.2,), (0.4, -0.3), [0.1, 1.0, 9.0]),
    (2, 1, (-3.0,), (0.0, 0.0, 0.0), [1e-300, 1e-5, 0.3, 5.0]),
    (1, 3, (0.5, 1.0, 1.0), (1.0, 0.0, -1.0), [0.2, 3.0, 50.0]),
    (1, 0, (), (0.0, -1.0, -2.0), [0.5, 4.0, 40.0]),
]


@pytest.mark.parametrize("m,n,a,b,xs", _MP_CASES)
def test_meijer_vs_mpmath(m, n, a, b, xs):
    spec = meijer(m, n, a, b)
    ours = np.atleast_1d(meijer_g(spec, np.array(xs)))
    an, ap = list(a[:n]), list(a[n:])
    bm, bq = list(b[:m]), list(b[m:])
    mp.mp.dps = 30
    ref = np.array([float(mp.meijerg([an, ap], [bm, bq], x)) for x in xs])
    np.testing.assert_allclose(ours, ref, rtol=1e-8, atol=1e-300)


@pytest.mark.parametrize("nu", [0.0, 1.0, 2.5])
def test_meijer_golden_special_cases(nu):
    x = np.linspace(0.1, 20, 60)
    np.testing.assert_allclose(meijer_g(meijer(1, 0, (), (nu,)), x), x ** nu * np.exp(-x), rtol=1e-9)
    np.testing.assert_allclose(meijer_g(meijer(2, 0, (), (nu, 0.0)), x),
                               2 * x ** (nu / 2) * sc.kv(nu, 2 * np.sqrt(x)), rtol=1e-9)


@pytest.mark.parametrize("c", [0.3, 1.0, -0.2])
def test_meijer_shift_identity(c):
    x = np.linspace(0.1, 20, 25)
    g = meijer_g(meijer(2, 0, (), (0.5, 1.3)), x)
    gs = meijer_g(meijer(2, 0, (), (0.5 + c, 1.3 + c)), x)
    np.testing.assert_allclose(gs, x ** c * g, rtol=1e-8)


@pytest.mark.parametrize("x", [0.3, 1.0, 4.0])
def test_mellin_convolution(x):
    g1, g2 = meijer(1, 0, (), (0.5,)), meijer(1, 0, (), (1.5,))
    val = integrate(lambda t: meijer_g(g1, x / t) * meijer_g(g2, t) / t, 0.0, np.inf, rtol=1e-12)
    assert val == pytest.approx(meijer_g(meijer(2, 0, (), (0.5, 1.5)), x), rel=1e-7)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_large_argument_asymptotics(m):
    b = tuple(0.5 * i for i in range(m))
    z = 50.0 ** m
    assert meijer_g(meijer(m, 0, (), b), z) == pytest.approx(specfun.meijer_asymptotic(b, z), rel=0.05)


@pytest.mark.parametrize("m,n,a,b", [(2, 0, (), (0.3, 1.1)), (1, 1, (0.2,), (0.4, -0.3)),
                                     (2, 1, (0.1,), (0.0, 0.6, -0.2))])
def test_residue_agrees_with_contour(m, n, a, b):
    s = meijer(m, n, a, b)
    x = np.geomspace(0.05, 8, 15)
    np.testing.assert_allclose(meijer_g(s, x, method="residue"), meijer_g(s, x, method="contour"), rtol=1e-8)


@pytest.mark.parametrize("N", [1, 2, 5, 8])
def test_cancelling_parameters_reduce_to_laguerre(N):
    # G^{1,1}_{1,2}(z | −N; 0, 0) = N! e^{−z} L_N(z) is exponentially small with no algebraic part
    z = np.array([0.37, 12.3, 21.7, 30.0, 60.0])
    ref = math.factorial(N) * np.exp(-z) * sc.eval_laguerre(N, z)
    np.testing.assert_allclose(meijer_g(meijer(1, 1, (-float(N),), (0.0, 0.0)), z), ref, rtol=1e-10)


@pytest.mark.parametrize("a,b", [((-3.0,), (0.5, 1.0, 0.0)), ((-2.0,), (0.0, 2.0, 1.0)), ((-1.5,), (0.3, 0.0, 0.5))])
def test_reduction_agrees_with_contour(a, b):
    s = meijer(2, 1, a, b)
    x = np.geomspace(0.1, 10, 9)
    np.testing.assert_allclose(meijer_g(s, x), meijer_g(s, x, method="contour"), rtol=1e-8)


@pytest.mark.parametrize("b,ref", [((3.0, 0.0), 2.0), ((0.0, 3.0), 2.0), ((2.5, 0.0), sc.gamma(2.5))])
def test_tiny_argument_limit(b, ref):
    # G^{2,0}_{0,2}(x | b, 0) = 2 x^{b/2} K_b(2√x) → Γ(b) as x → 0
    assert meijer_g(meijer(2, 0, (), b), 1e-300) == pytest.approx(ref, rel=1e-9)


def test_exponential_special_case_extremes():
    x = np.array([1e-300, 1e-8, 1.0, 700.0, 1e6])
    np.testing.assert_allclose(meijer_g(meijer(1, 0, (), (2.0,)), x), x ** 2 * np.exp(-x), rtol=1e-13)


def test_meijer_errors():
    s = meijer(1, 0, (), (0.0,))
    with pytest.raises(DomainError):
        meijer_g(s, -1.0)
    with pytest.raises(ValidationError):
        meijer_g(s, 1.0, method="magic")


def test_meijer_tolerance_policy():
    s = meijer(3, 0, (), (0.0, 0.5, 1.0))
    loose = meijer_g(s, 2.0, policy=EvalPolicy(abs_tol=1e-6, rel_tol=1e-6))
    tight = meijer_g(s, 2.0)
    assert loose == pytest.approx(tight, rel=1e-6)


def test_meijer_perturbed_crosscheck():
    s = meijer(2, 0, (), (0.0, 0.0))
    assert specfun.meijer_g_perturbed(s, 1.0) == pytest.approx(2 * sc.k0(2.0), rel=1e-6)


# ------------------------------------------------------------ Mellin moment


def test_mellin_moment_values():
    assert specfun.meijer_mellin_moment(meijer(1, 0, (), (0.0,)), 2) == pytest.approx(1.0)
    assert specfun.meijer_mellin_moment(meijer(2, 0, (), (0.0, 0.0)), 2) == pytest.approx(1.0)
    with pytest.raises(PoleError):
        specfun.meijer_mellin_moment(meijer(1, 0, (), (0.0,)), 0)


@pytest.mark.parametrize("s", [1, 2, 3])
def test_mellin_moment_quadrature(s):
    spec = meijer(2, 0, (), (0.0, 0.0))
    q = integrate(lambda x: x ** (s - 1) * meijer_g(spec, x), 0.0, np.inf, rtol=1e-12)
    assert q == pytest.approx(specfun.meijer_mellin_moment(spec, s), rel=1e-8)


# --------------------------------------------------------- classic_special


def test_classic_values():
    assert specfun.classic_special("bessel_j", 0, 0.0) == 1.0
    assert specfun.classic_special("airy_ai", 0, 0.0) == pytest.approx(3 ** (-2 / 3) / math.gamma(2 / 3), rel=1e-12)
    # K_0(2) = ∫_0^∞ exp(−2 cosh t) dt
    k0 = integrate(lambda t: np.exp(-2 * np.cosh(t)), 0.0, np.inf, rtol=1e-13)
    assert specfun.classic_special("bessel_k", 0, 2.0) == pytest.approx(k0, rel=1e-10)


@pytest.mark.parametrize("a,x", [(2.5, 1.0), (0.0, 0.7), (-1.5, 2.0), (-3.0, 0.4)])
def test_upper_incomplete_gamma_vs_mpmath(a, x):
    assert specfun.classic_special("upper_incomplete_gamma", a, x) == pytest.approx(
        float(mp.gammainc(a, x)), rel=1e-10)


def test_classic_domain():
    with pytest.raises(DomainError):
        specfun.classic_special("bessel_k", 0, -1.0)
    with pytest.raises(ValidationError):
        specfun.classic_special("bessel_y", 0, 1.0)
