"""Invariant suite behind the ``verify`` experiment.

Each check returns ``(ok, detail)``.  Checks are tagged ``tolerance`` (a
fixed numerical bound), ``trend`` (error must decrease along a sequence of
sizes; no rate is asserted) or ``statistical`` (seeded Monte Carlo).
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special as sc
from scipy import stats

from . import asymptotics, eigen, sampling, specfun, wishart
from .quad import integrate
from .specfun import meijer, meijer_g

__all__ = ["Check", "CheckResult", "CHECKS", "run_checks"]

_SEED = 20240601


@dataclass(frozen=True)
class Check:
    name: str
    module: str
    kind: str
    fn: Callable[[], tuple]


@dataclass(frozen=True)
class CheckResult:
    name: str
    module: str
    kind: str
    ok: bool
    detail: str
    seconds: float


def _rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def _decreasing(errs):
    return all(e2 < e1 for e1, e2 in zip(errs, errs[1:]))


# ------------------------------------------------------------------ specfun


def _lgamma_recurrence():
    rng = np.random.default_rng(_SEED)
    z = rng.uniform(0.5, 20, 100) + 1j * rng.uniform(-10, 10, 100)
    err = max(abs(specfun.log_gamma(v + 1) - specfun.log_gamma(v) - np.log(v)) for v in z)
    return err < 1e-12, f"max error {err:.2e}"


def _gauss_multiplication():
    worst = 0.0
    for n in (2, 3):
        for z in (0.7, 1.3, 2.9):
            lhs = math.lgamma(n * z)
            rhs = (0.5 * (1 - n) * math.log(2 * math.pi) + (n * z - 0.5) * math.log(n)
                   + sum(math.lgamma(z + k / n) for k in range(n)))
            worst = max(worst, abs(math.exp(lhs - rhs) - 1))
    return worst < 1e-11, f"max rel {worst:.2e}"


def _meijer_shift():
    x = np.linspace(0.1, 20, 25)
    c = 0.7
    worst = 0.0
    for m, n, a, b in ((2, 0, (), (0.5, 1.3)), (1, 1, (0.2,), (0.4, -0.3)), (3, 0, (), (0.0, 0.25, 1.0))):
        g = meijer_g(meijer(m, n, a, b), x)
        gs = meijer_g(meijer(m, n, tuple(v + c for v in a), tuple(v + c for v in b)), x)
        worst = max(worst, _rel(gs, x ** c * g))
    return worst < 1e-8, f"max rel {worst:.2e}"


def _mellin_convolution():
    nu1, nu2 = 0.5, 1.5
    g1 = meijer(1, 0, (), (nu1,))
    g2 = meijer(1, 0, (), (nu2,))
    target = meijer(2, 0, (), (nu1, nu2))
    worst = 0.0
    for x in (0.3, 1.0, 4.0):
        val = integrate(lambda t: meijer_g(g1, x / t) * meijer_g(g2, t) / t, 0.0, np.inf, rtol=1e-12)
        worst = max(worst, _rel(val, meijer_g(target, x)))
    return worst < 1e-7, f"max rel {worst:.2e}"


def _meijer_large_argument():
    worst = 0.0
    for m in (1, 2, 3):
        b = tuple(0.5 * i for i in range(m))
        z = 50.0 ** m
        worst = max(worst, _rel(meijer_g(meijer(m, 0, (), b), z), specfun.meijer_asymptotic(b, z)))
    return worst < 0.05, f"max rel {worst:.2e}"


def _residue_vs_contour():
    x = np.geomspace(0.05, 8, 15)
    worst = 0.0
    for m, n, a, b in ((2, 0, (), (0.3, 1.1)), (1, 1, (0.2,), (0.4, -0.3)), (2, 1, (0.1,), (0.0, 0.6, -0.2))):
        s = meijer(m, n, a, b)
        worst = max(worst, _rel(meijer_g(s, x, method="residue"), meijer_g(s, x, method="contour")))
    return worst < 1e-8, f"max rel {worst:.2e}"


def _golden_values():
    x = np.linspace(0.1, 20, 40)
    worst = 0.0
    for nu in (0.0, 1.0, 2.5):
        worst = max(worst, _rel(meijer_g(meijer(1, 0, (), (nu,)), x), x ** nu * np.exp(-x)))
        worst = max(worst, _rel(meijer_g(meijer(2, 0, (), (nu, 0.0)), x),
                                2 * x ** (nu / 2) * sc.kv(nu, 2 * np.sqrt(x))))
    s = meijer(2, 0, (), (0.5, 1.0))
    mom = 0.0
    for k in (0.5, 1.0, 2.3):
        q = integrate(lambda t: t ** (k - 1) * meijer_g(s, t), 0.0, np.inf, rtol=1e-12)
        mom = max(mom, _rel(q, specfun.meijer_mellin_moment(s, k)))
    return worst < 1e-9 and mom < 1e-8, f"pointwise {worst:.2e}, Mellin {mom:.2e}"


# ----------------------------------------------------------------- sampling


def _reproducibility():
    spec = sampling.EnsembleSpec(2, 5, (0, 1, 1))
    a = sampling.finite_time_exponents_batch(spec, _SEED, range(6), chunk_bytes=1)
    b = sampling.finite_time_exponents_batch(spec, _SEED, range(6))
    c = [sampling.finite_time_exponents(spec, sampling.stream_rng(_SEED, s)) for s in range(6)]
    same = all(np.array_equal(u.lyapunov, v.lyapunov) and np.array_equal(u.stability, w.stability)
               for u, v, w in zip(a, b, c))
    return same, "batch, chunked and single runs bit-identical" if same else "mismatch"


def _quaternion_symmetry():
    rng = sampling.stream_rng(_SEED, 1)
    N = 4
    J = np.kron(np.array([[0, 1], [-1, 0]]), np.eye(N))
    facs = [sampling.ginibre(4, N, N, rng), sampling.induced_square(4, N, 2, rng)]
    exact = all(np.array_equal(J @ F.conj(), F @ J) for F in facs)
    ev = sampling.eigenvalues(facs, beta=4)
    direct = np.linalg.eigvals(facs[1] @ facs[0])
    pair = max(np.min(np.abs(direct - v)) for v in direct.conj())
    match = max(np.min(np.abs(ev - v)) for v in direct) / np.max(np.abs(direct))
    ok = exact and pair < 1e-10 and match < 1e-10
    return ok, f"JX*=XJ exact: {exact}; conjugate pairing {pair:.1e}; vs direct {match:.1e}"


def _haar_singular_values():
    rng = sampling.stream_rng(_SEED, 2)
    worst = 0.0
    for beta in (1, 2, 4):
        A = sampling.ginibre(beta, 5, 5, rng)
        U = sampling.haar_unitary(beta, 5, rng)
        sa = np.linalg.svd(A, compute_uv=False)
        su = np.linalg.svd(U @ A, compute_uv=False)
        worst = max(worst, _rel(su, sa))
    return worst < 1e-12, f"max rel {worst:.2e}"


def _haar_covariance():
    N, M = 3, 4000
    rng = sampling.stream_rng(_SEED, 3)
    U = np.stack([sampling.haar_unitary(2, N, rng) for _ in range(M)])
    cov = np.einsum("sij,skl->ijkl", U, U.conj()) / M
    target = np.einsum("ik,jl->ijkl", np.eye(N), np.eye(N)) / N
    # |U_ij|^2 has variance below 1/N^2, so 1/(N sqrt M) bounds the MC error
    err = np.max(np.abs(cov - target))
    bound = 3 / (N * math.sqrt(M)) * 1.5
    return err < bound, f"max deviation {err:.4f} (bound {bound:.4f})"


def _rectangular_induced():
    spec = sampling.EnsembleSpec(2, 3, (0, 2))
    rect, ind = [], []
    for s in range(1500):
        rng = sampling.stream_rng(_SEED, 10_000 + s)
        rect.append(sampling.squared_singular_values(sampling.product_chain(spec, "rectangular", rng)))
        rng = sampling.stream_rng(_SEED + 1, 10_000 + s)
        ind.append(sampling.squared_singular_values(sampling.product_chain(spec, "square_induced", rng)))
    p = stats.ks_2samp(np.ravel(rect), np.ravel(ind)).pvalue
    return p > 0.01, f"two-sample KS p = {p:.3f}"


def _qr_vs_direct():
    rng = sampling.stream_rng(_SEED, 4)
    n, N = 6, 5
    facs = [sampling.ginibre(2, N, N, rng) for _ in range(n)]
    P = facs[0]
    for F in facs[1:]:
        P = F @ P
    lsv = sampling.squared_singular_values(facs, log=True)
    le, _ = sampling.eigenvalues(facs, log=True)
    dsv = np.sort(2 * np.log(np.linalg.svd(P, compute_uv=False)))
    de = np.sort(np.log(np.abs(np.linalg.eigvals(P))))
    err = max(np.max(np.abs(lsv - dsv)), np.max(np.abs(np.sort(le) - de))) / n
    return err < 1e-10, f"max exponent difference {err:.2e}"


# ----------------------------------------------------------------- wishart


def _reproducing():
    model = wishart.WishartModel(3, (0, 0))
    worst = 0.0
    for x, y in ((0.4, 1.1), (2.0, 0.3), (1.5, 1.5)):
        val = integrate(lambda u: wishart.kernel(3, x, u, model) * wishart.kernel(3, u, y, model),
                        0.0, np.inf, rtol=1e-10)
        worst = max(worst, abs(val - wishart.kernel(3, x, y, model)))
    return worst < 1e-5, f"max abs {worst:.2e}"


def _gram():
    worst = 0.0
    for n in (1, 2, 3):
        model = wishart.WishartModel(6, (0, 1, 2)[:n])
        tri = [wishart.biortho(k, model) for k in range(6)]
        for i in range(6):
            for j in range(6):
                g = integrate(lambda x: tri[i].p(x) * tri[j].phi(x), 0.0, np.inf, rtol=1e-11) / tri[i].h
                worst = max(worst, abs(g - (i == j)))
    return worst < 1e-7, f"max |G - I| {worst:.2e}"


def _weight_convolution():
    worst = 0.0
    g = lambda nu, t: t ** nu * np.exp(-t)
    for x in (0.3, 1.0, 3.0):
        w2 = integrate(lambda t: g(0.0, x / t) * g(1.0, t) / t, 0.0, np.inf, rtol=1e-11)
        worst = max(worst, _rel(w2, wishart.weight(0, x, wishart.WishartModel(1, (0, 1)))))

        def inner(s):
            return integrate(lambda t: g(1.0, s / t) * g(2.0, t) / t, 0.0, np.inf, rtol=1e-11)

        w3 = integrate(lambda s: np.array([g(0.0, x / v) * inner(v) / v for v in np.ravel(s)]).reshape(np.shape(s)),
                       0.0, np.inf, rtol=1e-9)
        worst = max(worst, _rel(w3, wishart.weight(0, x, wishart.WishartModel(1, (0, 1, 2)))))
    return worst < 1e-6, f"max rel {worst:.2e}"


def _moment_consistency():
    model = wishart.WishartModel(4, (0, 1))
    worst = 0.0
    for s in range(4):
        q = integrate(lambda x: x ** s * wishart.kernel(4, x, x, model), 0.0, np.inf, rtol=1e-11)
        worst = max(worst, _rel(q, wishart.density_moment(s, model)))
    return worst < 1e-5, f"max rel {worst:.2e}"


def _fc_moment_trend():
    n = 2
    rows = []
    for s in (2, 3):
        errs = [abs(wishart.density_moment(s, wishart.WishartModel(N, (0,) * n)) / N ** (n * s + 1)
                    - wishart.fc_moment(n, s)) for N in (20, 40, 80)]
        rows.append(errs)
    ok = all(_decreasing(e) for e in rows)
    return ok, "errors " + "; ".join(", ".join(f"{v:.2e}" for v in e) for e in rows)


def _hard_edge_trend():
    nus = (0.0, 1.0)
    x = np.array([0.5, 1.0, 2.0])
    y = np.array([0.7, 1.0, 1.5])
    lim = wishart.kernel_limit("meijer_hard", nus, x, y)
    errs = [_rel(wishart.kernel(N, x / N, y / N, wishart.WishartModel(N, nus)) / N, lim) for N in (10, 20, 40)]
    return _decreasing(errs), "errors " + ", ".join(f"{e:.2e}" for e in errs)


def _heine():
    N, n, M = 3, 2, 10_000
    spec = sampling.EnsembleSpec(2, N, (0,) * n)
    model = wishart.WishartModel(N, (0,) * n)
    pN = wishart.biortho(N, model).p
    zs = np.array([0.5, 2.0, 6.0])
    vals = np.empty((M, zs.size))
    for s in range(M):
        x = sampling.squared_singular_values(sampling.product_chain(spec, "rectangular", sampling.stream_rng(_SEED, s)))
        vals[s] = np.prod(zs[:, None] - x[None, :], axis=1)
    mean, se = vals.mean(axis=0), vals.std(axis=0, ddof=1) / math.sqrt(M)
    z = np.abs(mean - pN(zs)) / se
    return bool(np.all(z < 3)), "z-scores " + ", ".join(f"{v:.2f}" for v in z)


# ------------------------------------------------------------------- eigen


def _eigen_radial_mc():
    # per-bin densities carry ~0.07 binomial noise at this sample size, so
    # the 0.05 bound is applied to the binned CDF
    N, n, M = 50, 2, 100
    spec = sampling.EnsembleSpec(2, N, (0,) * n)
    r = np.concatenate([np.abs(sampling.eigenvalues(sampling.product_chain(spec, "rectangular",
                                                                            sampling.stream_rng(_SEED, s))))
                        for s in range(M)]) / N ** (n / 2)
    edges = np.linspace(0, 1.2, 26)
    cnt, _ = np.histogram(r, edges)
    emp = np.concatenate([[0.0], np.cumsum(cnt)]) / r.size
    sup = float(np.max(np.abs(emp - eigen.macro_radial_cdf(n, edges))))
    return sup < 0.05, f"binned CDF sup-norm {sup:.4f}"


def _permanental():
    worst = 1.0
    for beta, N in ((2, 3), (4, 3)):
        spec = sampling.EnsembleSpec(beta, N, (0, 1))
        model = eigen.EigenModel(beta, N, (0, 1))
        mat, rad = [], []
        for s in range(2000):
            ev = sampling.eigenvalues(sampling.product_chain(spec, "square_induced", sampling.stream_rng(_SEED, s)),
                                      beta=beta)
            mat.append(np.sort(np.abs(ev[:N])))
            rad.append(np.sort(eigen.sample_radii(model, sampling.stream_rng(_SEED + 7, s))))
        mat, rad = np.array(mat), np.array(rad)
        for k in range(N):
            worst = min(worst, stats.ks_2samp(mat[:, k], rad[:, k]).pvalue)
    return worst > 0.001, f"min KS p over order statistics {worst:.3f}"


def _quaternion_conjugation():
    model = eigen.EigenModel(4, 4, (0, 1))
    x, y = np.meshgrid(np.linspace(-2, 2, 9), np.linspace(0.1, 2, 7))
    z = x + 1j * y
    a = eigen.quaternion_density(model, z)
    b = eigen.quaternion_density(model, z.conj())
    err = _rel(b, a)
    return err < 1e-12, f"max rel {err:.2e}"


def _real_prob_mc():
    N, n, M = 4, 2, 20_000
    spec = sampling.EnsembleSpec(1, N, (0,) * n)
    res = sampling.finite_time_exponents_batch(spec, _SEED, range(M), kind="eig")
    frac = sum(r.real_count == N for r in res) / M
    p = eigen.prob_all_real(eigen.EigenModel(1, N, (0,) * n))
    z = (frac - p) / math.sqrt(p * (1 - p) / M)
    return abs(z) < 3, f"MC {frac:.4f} vs {p:.4f} (z = {z:.2f})"


def _monomial_orthogonality():
    model = eigen.EigenModel(2, 5, (0, 1))
    th = np.linspace(0, 2 * math.pi, 32, endpoint=False)
    worst = 0.0
    for k in range(5):
        for l in range(5):
            ang = np.mean(np.exp(1j * (k - l) * th)) * 2 * math.pi
            rad = integrate(lambda r: r ** (k + l + 1) * eigen.weight_beta(model, r), 0.0, np.inf, rtol=1e-12)
            if k != l:
                worst = max(worst, abs(ang * rad))
    return worst < 1e-10, f"max off-diagonal {worst:.2e}"


def _skew_orthogonality():
    worst = 0.0
    th = np.linspace(0, 2 * math.pi, 64, endpoint=False)
    for charges in ((0,), (0, 1)):
        model = eigen.EigenModel(4, 4, charges)
        h = [math.exp(eigen._log_h(model, k)) for k in range(8)]
        mom = [integrate(lambda r: r ** (j + 1) * eigen.weight_beta(model, r), 0.0, np.inf, rtol=1e-12)
               for j in range(17)]

        def coeffs(deg):
            c = np.zeros(8)
            if deg % 2:
                c[deg] = 1.0
                return c
            k = deg // 2
            for i in range(k + 1):
                c[2 * i] = math.prod(h[2 * j] / h[2 * j - 1] for j in range(i + 1, k + 1))
            return c

        def skew(ca, cb):
            # ½∫ w (z̄−z)(f(z)g(z̄) − f(z̄)g(z)) over monomials, polar quadrature
            tot = 0.0
            for a in np.nonzero(ca)[0]:
                for b in np.nonzero(cb)[0]:
                    ang = np.mean(4 * np.sin(th) * np.sin((a - b) * th)) * 2 * math.pi
                    tot += ca[a] * cb[b] * 0.5 * ang * mom[a + b + 1]
            return tot

        for i in range(4):
            for j in range(4):
                for (p, q, target) in ((2 * i, 2 * j, 0.0), (2 * i + 1, 2 * j + 1, 0.0),
                                       (2 * i + 1, 2 * j, 2 * h[2 * i + 1] * (i == j))):
                    if max(p, q) > 7:
                        continue
                    v = skew(coeffs(p), coeffs(q))
                    scale = 2 * h[2 * i + 1]
                    worst = max(worst, abs(v - target) / scale)
    return worst < 1e-6, f"max rel {worst:.2e}"


# ------------------------------------------------------------- asymptotics


def _exponent_law_mc(attr):
    N, n, M = 4, 200, 2000
    spec = sampling.EnsembleSpec(2, N, (0,) * n)
    res = sampling.finite_time_exponents_batch(spec, _SEED, range(M), kind="eig" if attr == "stability" else "sv")
    vals = np.array([getattr(r, attr) for r in res])
    worst_z, worst_p = 0.0, 1.0
    for k in range(1, N + 1):
        law = asymptotics.exponent_law(2, 0.0, k)
        w = law.width(n)
        worst_z = max(worst_z, abs(vals[:, k - 1].mean() - law.mu) / (w / math.sqrt(M)))
        worst_p = min(worst_p, stats.kstest((vals[:, k - 1] - law.mu) / w, "norm").pvalue)
    return worst_z < 3 and worst_p > 0.01, f"max mean z {worst_z:.2f}, min KS p {worst_p:.3f}"


def _lyapunov_bias_trend():
    # finite-n means of singular-value exponents carry an O(1/n) offset
    N, M = 4, 2000
    errs = []
    for n in (50, 200, 800):
        spec = sampling.EnsembleSpec(2, N, (0,) * n)
        res = sampling.finite_time_exponents_batch(spec, _SEED, range(M), kind="sv")
        lam = np.array([r.lyapunov for r in res]).mean(axis=0)
        mu = np.array([asymptotics.exponent_law(2, 0.0, k).mu for k in range(1, N + 1)])
        errs.append(float(np.max(np.abs(lam - mu))))
    return _decreasing(errs), "max |mean - mu| " + ", ".join(f"{e:.2e}" for e in errs)


def _stability_vs_lyapunov():
    N, M = 4, 200
    gaps = []
    for n in (100, 1000):
        spec = sampling.EnsembleSpec(2, N, (0,) * n)
        res = sampling.finite_time_exponents_batch(spec, _SEED, range(M))
        gaps.append(float(np.mean([np.abs(r.stability - r.lyapunov) for r in res])))
    return gaps[1] < gaps[0] / 5, f"mean |ζ-λ| {gaps[0]:.3e} -> {gaps[1]:.3e}"


def _triangular_ks(kind, N, n, M):
    spec = sampling.EnsembleSpec(2, N, (0,) * n)
    res = sampling.finite_time_exponents_batch(spec, _SEED, range(M), kind=kind)
    attr = "lyapunov" if kind == "sv" else "stability"
    x = np.concatenate([np.exp(getattr(r, attr)) for r in res]) / math.sqrt(N)
    return float(stats.kstest(x, asymptotics.triangular_cdf).statistic)


def _triangular_eig():
    ks = _triangular_ks("eig", 100, 100, 20)
    return ks < 0.03, f"KS {ks:.4f} (20 draws)"


def _triangular_sv_trend():
    # singular-value exponents carry an O(1/n) offset at finite n
    ks = [_triangular_ks("sv", 100, n, 10) for n in (25, 100)]
    return _decreasing(ks), "KS " + ", ".join(f"{v:.4f}" for v in ks) + " at n = 25, 100"


def _real_crystallization():
    fr = []
    for n in (10, 100, 1000):
        spec = sampling.EnsembleSpec(1, 4, (0,) * n)
        res = sampling.finite_time_exponents_batch(spec, _SEED, range(400), kind="eig")
        fr.append(sum(r.real_count == 4 for r in res) / 400)
    ok = fr[0] < fr[1] < fr[2] or (fr[0] < fr[1] and fr[2] == 1.0)
    return ok, "fractions " + ", ".join(f"{f:.3f}" for f in fr)


CHECKS = [
    Check("log_gamma recurrence", "specfun", "tolerance", _lgamma_recurrence),
    Check("Gauss multiplication", "specfun", "tolerance", _gauss_multiplication),
    Check("Meijer shift identity", "specfun", "tolerance", _meijer_shift),
    Check("Mellin convolution", "specfun", "tolerance", _mellin_convolution),
    Check("large-argument asymptotics", "specfun", "tolerance", _meijer_large_argument),
    Check("residue vs contour", "specfun", "tolerance", _residue_vs_contour),
    Check("golden values and Mellin moments", "specfun", "tolerance", _golden_values),
    Check("substream reproducibility", "sampling", "tolerance", _reproducibility),
    Check("quaternion symmetry and pairing", "sampling", "tolerance", _quaternion_symmetry),
    Check("Haar singular-value invariance", "sampling", "tolerance", _haar_singular_values),
    Check("Haar entry covariance", "sampling", "statistical", _haar_covariance),
    Check("rectangular vs induced chains", "sampling", "statistical", _rectangular_induced),
    Check("periodic QR vs direct product", "sampling", "tolerance", _qr_vs_direct),
    Check("kernel reproducing property", "wishart", "tolerance", _reproducing),
    Check("bi-orthogonal Gram matrix", "wishart", "tolerance", _gram),
    Check("weight as gamma convolution", "wishart", "tolerance", _weight_convolution),
    Check("density moments vs quadrature", "wishart", "tolerance", _moment_consistency),
    Check("Fuss-Catalan moment convergence", "wishart", "trend", _fc_moment_trend),
    Check("hard-edge kernel convergence", "wishart", "trend", _hard_edge_trend),
    Check("Heine characteristic polynomial", "wishart", "statistical", _heine),
    Check("radial macroscopic density", "eigen", "statistical", _eigen_radial_mc),
    Check("permanental radii", "eigen", "statistical", _permanental),
    Check("quaternion conjugation symmetry", "eigen", "tolerance", _quaternion_conjugation),
    Check("real-spectrum probability vs MC", "eigen", "statistical", _real_prob_mc),
    Check("monomial orthogonality", "eigen", "tolerance", _monomial_orthogonality),
    Check("skew-orthogonality", "eigen", "tolerance", _skew_orthogonality),
    Check("stability exponent means and Gaussianity", "asymptotics", "statistical",
          lambda: _exponent_law_mc("stability")),
    Check("Lyapunov exponent bias vanishes", "asymptotics", "trend", _lyapunov_bias_trend),
    Check("stability approaches Lyapunov", "asymptotics", "trend", _stability_vs_lyapunov),
    Check("triangular law, singular values", "asymptotics", "trend", _triangular_sv_trend),
    Check("triangular law, eigenvalue moduli", "asymptotics", "statistical", _triangular_eig),
    Check("real spectra become certain", "asymptotics", "trend", _real_crystallization),
]


def run_checks(names=None, progress: Callable | None = None) -> list[CheckResult]:
    """Run the suite (or the named subset); exceptions count as failures."""
    out = []
    for chk in CHECKS:
        if names is not None and chk.name not in names:
            continue
        t0 = time.perf_counter()
        try:
            ok, detail = chk.fn()
        except Exception as exc:  # noqa: BLE001
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        res = CheckResult(chk.name, chk.module, chk.kind, bool(ok), detail, time.perf_counter() - t0)
        out.append(res)
        if progress is not None:
            progress(res)
    return out
