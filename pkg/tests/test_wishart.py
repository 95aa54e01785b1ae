import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special as sc

from rmtprod import wishart
from rmtprod.errors import DomainError, ValidationError
from rmtprod.quad import integrate
from rmtprod.wishart import WishartModel


def _laguerre_kernel(N, nu, x, y):
    # n = 1 reduces to the Laguerre ensemble with weight y^ν e^{−y}
    out = 0.0
    for k in range(N):
        c = math.exp(math.lgamma(k + 1) - math.lgamma(k + nu + 1))
        out = out + c * sc.eval_genlaguerre(k, nu, x) * sc.eval_genlaguerre(k, nu, y)
    return out * y ** nu * np.exp(-y)


# ------------------------------------------------------------------- model


@pytest.mark.parametrize("N,charges", [(0, (0,)), (3, ()), (3, (-1,)), (3, (2, 1))])
def test_model_validation(N, charges):
    with pytest.raises(ValidationError):
        WishartModel(N, charges)


def test_log_normalization_small_case():
    m = WishartModel(2, (0, 1))
    # 2! · [0! Γ(1) Γ(2)] · [1! Γ(2) Γ(3)]
    assert m.log_normalization() == pytest.approx(math.log(2 * 1 * 2))


def test_weight_is_gamma_density_for_one_factor():
    x = np.linspace(0.1, 10, 30)
    np.testing.assert_allclose(wishart.weight(0, x, WishartModel(3, (1.5,))), x ** 1.5 * np.exp(-x), rtol=1e-10)
    np.testing.assert_allclose(wishart.weight(2, x, WishartModel(3, (1.5,))), x ** 3.5 * np.exp(-x), rtol=1e-10)


@pytest.mark.parametrize("i,j", [(0, 0), (2, 1), (3, 4)])
def test_bimoment_vs_quadrature(i, j):
    m = WishartModel(4, (0, 1))
    q = integrate(lambda x: x ** i * wishart.weight(j, x, m), 0.0, np.inf, rtol=1e-12)
    assert q == pytest.approx(wishart.bimoment(i, j, m), rel=1e-8)


def test_bimoment_rejects_negative():
    with pytest.raises(ValidationError):
        wishart.bimoment(-1, 0, WishartModel(2))


# --------------------------------------------------------------- biortho


def test_biortho_laguerre_case():
    m = WishartModel(5, (2,))
    x = np.linspace(0.2, 8, 9)
    for k in range(5):
        t = wishart.biortho(k, m)
        monic = (-1) ** k * math.factorial(k) * sc.eval_genlaguerre(k, 2, x)
        np.testing.assert_allclose(t.p(x), monic, rtol=1e-10, atol=1e-10)
        assert t.h == pytest.approx(math.factorial(k) * math.gamma(k + 3), rel=1e-12)


@pytest.mark.parametrize("charges", [(0, 0), (0, 1, 2)])
def test_biortho_gram_small(charges):
    m = WishartModel(4, charges)
    tri = [wishart.biortho(k, m) for k in range(4)]
    G = np.array([[integrate(lambda x: tri[i].p(x) * tri[j].phi(x), 0.0, np.inf, rtol=1e-11) / tri[i].h
                   for j in range(4)] for i in range(4)])
    np.testing.assert_allclose(G, np.eye(4), atol=1e-7)


def test_biortho_is_monic():
    c = wishart.biortho(5, WishartModel(6, (0, 3))).coeffs
    assert c[-1] == 1.0


# ----------------------------------------------------------------- kernel


@pytest.mark.parametrize("N,nu", [(1, 0.0), (4, 0.0), (6, 1.5)])
def test_kernel_reduces_to_laguerre(N, nu):
    x, y = np.meshgrid([0.3, 1.0, 4.0], [0.5, 2.0, 7.0])
    np.testing.assert_allclose(wishart.kernel(N, x, y, WishartModel(N, (nu,))),
                               _laguerre_kernel(N, nu, x, y), rtol=1e-9)


@pytest.mark.parametrize("N,charges", [(3, (0, 0)), (5, (0, 1, 2))])
def test_kernel_sum_vs_integral(N, charges):
    m = WishartModel(N, charges)
    x, y = np.meshgrid([0.4, 1.7, 5.0], [0.6, 3.0])
    np.testing.assert_allclose(wishart.kernel(N, x, y, m, form="sum"), wishart.kernel(N, x, y, m, form="integral"),
                               rtol=1e-7)


@pytest.mark.parametrize("N,charges", [(1, (0,)), (4, (0,)), (6, (0, 1))])
def test_kernel_integral_far_tail(N, charges):
    # kernel values near e^{−30}: the plain [0, 1] integral cancels to about 1e-4 here
    m = WishartModel(N, charges)
    x, y = np.meshgrid([0.3, 3.0, 30.0], [10.0, 30.0])
    np.testing.assert_allclose(wishart.kernel(N, x, y, m, form="integral"), wishart.kernel(N, x, y, m), rtol=1e-8)


def test_kernel_trace_is_N():
    m = WishartModel(4, (0, 1))
    assert integrate(lambda x: wishart.kernel(4, x, x, m), 0.0, np.inf, rtol=1e-11) == pytest.approx(4, abs=1e-6)


def test_kernel_errors():
    m = WishartModel(2)
    with pytest.raises(DomainError):
        wishart.kernel(2, -1.0, 1.0, m)
    with pytest.raises(ValidationError):
        wishart.kernel(2, 1.0, 1.0, m, form="closed")


# ---------------------------------------------------------------- moments


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 40), st.lists(st.integers(0, 5), min_size=1, max_size=4))
def test_first_moment_is_expected_trace(N, charges):
    # E tr(Y†Y) = N Π(N+ν_ℓ) for a product of induced Ginibre factors
    m = WishartModel(N, sorted(charges))
    assert wishart.density_moment(1, m) == pytest.approx(N * math.prod(N + v for v in charges), rel=1e-12)


def test_density_moment_zero_and_errors():
    assert wishart.density_moment(0, WishartModel(7, (0, 1))) == 7.0
    with pytest.raises(ValidationError):
        wishart.density_moment(-1, WishartModel(2))


def test_density_moment_laguerre_second():
    # n = 1: E tr W² = N(N+ν)(2N+ν)
    N, nu = 6, 2
    assert wishart.density_moment(2, WishartModel(N, (nu,))) == pytest.approx(N * (N + nu) * (2 * N + nu))


def test_density_moment_warns_for_large_N():
    with pytest.warns(RuntimeWarning):
        wishart.density_moment(3, WishartModel(250, (0,)))


# ------------------------------------------------------------ Fuss–Catalan


def test_fc_moment_catalan_row():
    assert [wishart.fc_moment(1, s) for s in range(7)] == [1, 1, 2, 5, 14, 42, 132]
    assert [wishart.fc_moment(2, s) for s in range(5)] == [1, 1, 3, 12, 55]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 12))
def test_fc_moment_is_integer(n, s):
    v = wishart.fc_moment(n, s)
    assert v == int(v) and v >= 1


def test_fc_density_marchenko_pastur():
    x = np.linspace(0.05, 3.95, 40)
    np.testing.assert_allclose(wishart.fc_density(1, x), np.sqrt((4 - x) / x) / (2 * math.pi), rtol=1e-9)


@pytest.mark.parametrize("n", [2, 3])
def test_fc_meijer_vs_trig(n):
    x = np.linspace(0.05, 0.95, 10) * wishart.fc_support_edge(n)
    np.testing.assert_allclose(wishart.fc_density(n, x), wishart.fc_density(n, x, form="trig"), rtol=1e-7)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_fc_density_moments(n):
    K = wishart.fc_support_edge(n)
    for s in (0, 1, 2):
        # x = K u^{n+1} removes the origin singularity
        q = integrate(lambda u: (K * u ** (n + 1)) ** s * wishart.fc_density(n, K * u ** (n + 1))
                      * (n + 1) * K * u ** n, 0.0, 1.0, rtol=1e-11)
        assert q == pytest.approx(wishart.fc_moment(n, s), rel=1e-7)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_fc_edge_behaviour(n):
    c0, cK = wishart.fc_edge_coefficients(n)
    K = wishart.fc_support_edge(n)
    x0 = 1e-8
    assert wishart.fc_density(n, x0) / x0 ** (-n / (n + 1)) == pytest.approx(c0, rel=1e-2)
    d = 1e-6 * K
    assert wishart.fc_density(n, K - d) / math.sqrt(d) == pytest.approx(cK, rel=1e-2)


def test_fc_density_outside_support():
    assert wishart.fc_density(2, 7.0) == 0.0
    with pytest.raises(DomainError):
        wishart.fc_density(2, 7.0, form="trig")
    with pytest.raises(ValidationError):
        wishart.fc_density(0, 1.0)


# -------------------------------------------------------- macroscopic law


def test_green_one_factor_closed_form():
    z = 5.0
    assert wishart.green(1, z) == pytest.approx((5 - math.sqrt(5)) / 10, rel=1e-12)


@pytest.mark.parametrize("z", [8.0 + 0j, 2.0 + 1.5j, -1.0 - 0.5j])
def test_green_vs_stieltjes_quadrature(z):
    n, K = 2, wishart.fc_support_edge(2)

    def part(f):
        return integrate(lambda u: f(wishart.fc_density(n, K * u ** 3) * 3 * K * u ** 2 / (z - K * u ** 3)),
                         0.0, 1.0, rtol=1e-11)

    ref = part(np.real) + 1j * part(np.imag)
    assert abs(wishart.green(n, z) - ref) < 1e-7


def test_green_on_support_raises():
    with pytest.raises(DomainError):
        wishart.green(2, 1.0)


def test_scaled_density_reduces_to_fc():
    x = np.linspace(0.2, 6.5, 12)
    np.testing.assert_allclose(wishart.macro_density_scaled(2, (0.0, 0.0), x), wishart.fc_density(2, x), rtol=1e-7)
    assert wishart.macro_support_scaled(2, (0.0, 0.0)) == pytest.approx((0.0, 6.75), abs=1e-12)


def test_scaled_density_with_charge_normalized():
    lo, hi = wishart.macro_support_scaled(2, (0.5, 1.0))
    assert lo > 0
    mass = integrate(lambda x: wishart.macro_density_scaled(2, (0.5, 1.0), x), lo, hi, rtol=1e-9)
    assert mass == pytest.approx(1.0, abs=1e-5)


# -------------------------------------------------------- limiting kernels


def test_sine_and_airy_diagonals():
    assert wishart.kernel_limit("sine", None, 0.3, 0.3) == pytest.approx(1.0)
    ai, aip, _, _ = sc.airy(0.5)
    assert wishart.kernel_limit("airy", None, 0.5, 0.5) == pytest.approx(aip ** 2 - 0.5 * ai ** 2)
    # the diagonal is the limit of the off-diagonal formula
    assert wishart.kernel_limit("airy", None, 0.5, 0.5 + 1e-6) == pytest.approx(aip ** 2 - 0.5 * ai ** 2, rel=1e-5)


@pytest.mark.parametrize("nu", [0.0, 1.0])
def test_meijer_hard_one_factor_is_bessel(nu):
    x, y = 0.7, 1.3
    assert wishart.kernel_limit("meijer_hard", (nu,), x, y) == pytest.approx(
        4 * (y / x) ** (nu / 2) * wishart.kernel_limit("bessel", nu, 4 * x, 4 * y), rel=1e-9)


def test_hard_edge_scaling_limit_trend():
    nus = (0.0, 1.0)
    x, y = np.array([0.5, 2.0]), np.array([0.8, 1.5])
    lim = wishart.kernel_limit("meijer_hard", nus, x, y)
    errs = [np.max(np.abs(wishart.kernel(N, x / N, y / N, WishartModel(N, nus)) / N / lim - 1)) for N in (10, 20, 40)]
    assert errs[0] > errs[1] > errs[2]


def test_kernel_limit_errors():
    with pytest.raises(ValidationError):
        wishart.kernel_limit("gauss", None, 1.0, 1.0)
    with pytest.raises(DomainError):
        wishart.kernel_limit("bessel", 0.0, -1.0, 1.0)


# ------------------------------------------------------ mutual information


@pytest.mark.parametrize("n,snr", [(1, 0.5), (2, 3.0), (3, 20.0)])
def test_mutual_info_vs_quadrature(n, snr):
    assert wishart.mutual_info(n, snr) == pytest.approx(wishart.mutual_info_quadrature(n, snr), rel=1e-9)


def test_mutual_info_edge_cases():
    assert wishart.mutual_info(2, 0.0) == 0.0
    with pytest.raises(DomainError):
        wishart.mutual_info(2, -1.0)
    # monotone in the signal-to-noise ratio
    vals = [wishart.mutual_info(2, s) for s in (0.1, 1.0, 10.0)]
    assert vals[0] < vals[1] < vals[2]


def test_wide_correlator():
    assert wishart.wide_correlator(2, 0.5, 2.0) == pytest.approx(wishart.wide_correlator(2, 2.0, 0.5))
    assert wishart.wide_correlator(1, 1.0, 4.0) == pytest.approx(-(0.5 + 2.0) / (4 * math.pi ** 2 * 9))
    assert wishart.wide_correlator(2, 1.0, 2.0) == pytest.approx(-0.0515661, abs=5e-8)
    with pytest.raises(DomainError):
        wishart.wide_correlator(1, 1.0, 1.0)
    with pytest.raises(ValidationError):
        wishart.wide_correlator(3, 1.0, 2.0)
