"""Squared singular values of products of complex Ginibre matrices.

The squared singular values of X_n⋯X_1, with X_i of charge ν_i, form a
polynomial ensemble with weights w_j(x) = G^{n,0}_{0,n}(x | ν_1+j, ν_2, …, ν_n).
This module collects the finite-N bi-orthogonal system and kernel, moments,
the large-N Fuss–Catalan law and its Green function, the microscopic limit
kernels, and a few derived macroscopic quantities.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import special as sc

from . import specfun
from .errors import BranchError, DomainError, ValidationError
from .quad import integrate
from .specfun import meijer, meijer_g

__all__ = [
    "BiorthoTriple",
    "WishartModel",
    "bimoment",
    "biortho",
    "density_moment",
    "fc_density",
    "fc_edge_coefficients",
    "fc_moment",
    "fc_support_edge",
    "green",
    "kernel",
    "kernel_limit",
    "log_bimoment",
    "macro_density_scaled",
    "macro_support_scaled",
    "mutual_info",
    "mutual_info_quadrature",
    "weight",
    "wide_correlator",
]


@dataclass(frozen=True)
class WishartModel:
    """N×N product of n complex induced Ginibre factors with charges ν_1 ≤ … ≤ ν_n."""

    N: int
    charges: tuple = (0,)

    def __post_init__(self):
        ch = tuple(float(v) for v in self.charges)
        object.__setattr__(self, "charges", ch)
        if self.N < 1 or int(self.N) != self.N:
            raise ValidationError("N must be a positive integer")
        if not ch:
            raise ValidationError("at least one factor is required")
        if any(v <= -1 for v in ch):
            raise ValidationError("charges must be > -1")
        if list(ch) != sorted(ch):
            raise ValidationError("charges must be sorted ascending")

    @property
    def n(self) -> int:
        return len(self.charges)

    def log_normalization(self) -> float:
        """log 𝒵 = log N! + Σ_k [log k! + Σ_ℓ log Γ(ν_ℓ+k+1)]."""
        out = math.lgamma(self.N + 1)
        for k in range(self.N):
            out += math.lgamma(k + 1) + sum(math.lgamma(v + k + 1) for v in self.charges)
        return out


def weight(j: int, x, model: WishartModel):
    """w_j(x) = G^{n,0}_{0,n}(x | ν_1+j, ν_2, …, ν_n)."""
    nu = model.charges
    return meijer_g(meijer(model.n, 0, (), (nu[0] + j,) + nu[1:]), x)


def log_bimoment(i: int, j: int, model: WishartModel) -> float:
    nu = model.charges
    return math.lgamma(i + j + nu[0] + 1) + sum(math.lgamma(i + v + 1) for v in nu[1:])


def bimoment(i: int, j: int, model: WishartModel) -> float:
    """M_ij = ∫ x^i w_j(x) dx = Γ(i+j+ν_1+1) Π_{ℓ≥2} Γ(i+ν_ℓ+1)."""
    if i < 0 or j < 0:
        raise ValidationError("bi-moment indices must be non-negative")
    return math.exp(log_bimoment(i, j, model))


def log_norm(k: int, charges: Sequence[float]) -> float:
    """log h_k = log k! + Σ_ℓ log Γ(k+ν_ℓ+1)."""
    return math.lgamma(k + 1) + sum(math.lgamma(k + v + 1) for v in charges)


def _poly_coeffs(k: int, charges: Sequence[float]) -> np.ndarray:
    # p_k(x) = Σ_j (−1)^{k+j} C(k,j) Π_ℓ Γ(k+ν_ℓ+1)/Γ(j+ν_ℓ+1) x^j
    j = np.arange(k + 1, dtype=float)
    logc = sc.gammaln(k + 1) - sc.gammaln(j + 1) - sc.gammaln(k - j + 1)
    for v in charges:
        logc = logc + sc.gammaln(k + v + 1) - sc.gammaln(j + v + 1)
    sign = np.where((k + j) % 2 == 0, 1.0, -1.0)
    return sign * np.exp(logc)


def _phi_coeffs(k: int, nu1: float) -> np.ndarray:
    # φ_k = Σ_j (−1)^{k−j} C(k,j) Γ(ν_1+k+1)/Γ(ν_1+j+1) w_j
    return _poly_coeffs(k, (nu1,))


def _weights(J: int, y, charges: Sequence[float]) -> np.ndarray:
    nu = tuple(charges)
    return np.stack([
        np.asarray(meijer_g(meijer(len(nu), 0, (), (nu[0] + j,) + nu[1:]), y), dtype=float)
        for j in range(J)
    ])


def _phi(k: int, y, charges: Sequence[float]):
    # the Mellin integrand is the weight's times (1+u)_k, so φ_k is a finite
    # combination of the w_j; this keeps relative accuracy in the far tail
    out = np.tensordot(_phi_coeffs(k, charges[0]), _weights(k + 1, y, charges), axes=1)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class BiorthoTriple:
    """Monic p_k, dual function φ_k and norm h_k with ∫ p_i φ_j = h_i δ_ij."""

    k: int
    p: Callable
    phi: Callable
    h: float
    coeffs: np.ndarray


def biortho(k: int, model: WishartModel) -> BiorthoTriple:
    """Bi-orthogonal pair of degree k.

    p_k is the terminating hypergeometric polynomial, φ_k(y) is
    (−1)^k G^{n,1}_{1,n+1}(y | −k; ν, 0), and h_k = k! Π Γ(k+ν_ℓ+1).
    """
    if k < 0:
        raise ValidationError("degree must be non-negative")
    nu = model.charges
    c = _poly_coeffs(k, nu)
    return BiorthoTriple(
        k=k,
        p=lambda x: npoly.polyval(np.asarray(x, dtype=float), c),
        phi=lambda y: _phi(k, y, nu),
        h=math.exp(log_norm(k, nu)),
        coeffs=c,
    )


def kernel(N: int, x, y, model: WishartModel, form: str = "sum"):
    """Correlation kernel K_N(x, y), broadcast elementwise over x and y.

    ``form="sum"`` uses Σ_{k<N} p_k(x) φ_k(y)/h_k.  ``form="integral"`` uses
    ∫_0^1 G^{1,0}_{1,n+1}(ux | N; 0, −ν) G^{n,1}_{1,n+1}(uy | −N; ν, 0) du,
    switching to the equivalent −∫_1^∞ where ∫_0^1 cancels badly.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("kernel arguments must be positive")
    nu = model.charges
    if form == "sum":
        out = np.zeros(x.shape)
        W = _weights(N, y, nu)
        for k in range(N):
            c = _poly_coeffs(k, nu) * math.exp(-log_norm(k, nu))
            out = out + npoly.polyval(x, c) * np.tensordot(_phi_coeffs(k, nu[0]), W[: k + 1], axes=1)
    elif form == "integral":
        s1 = meijer(1, 0, (float(N),), (0.0,) + tuple(-v for v in nu))
        s2 = meijer(len(nu), 1, (-float(N),), tuple(nu) + (0.0,))

        def f(u, xx, yy):
            return meijer_g(s1, u * xx) * meijer_g(s2, u * yy)

        out = np.asarray(integrate(f, 0.0, 1.0, args=(x, y), rtol=1e-11))
        # The Mellin transforms of the two factors multiply to 1, so ∫_0^∞ vanishes
        # wherever it converges (always for n = 1, for x < y otherwise).  There −∫_1^∞ avoids the
        # cancellation that makes ∫_0^1 lose relative accuracy for large y.
        cand = (x < y) if len(nu) > 1 else np.ones(x.shape, dtype=bool)
        if np.any(cand):
            xs, ys = x[cand], y[cand]
            mass = integrate(lambda u, a, b: np.abs(f(u, a, b)), 0.0, 1.0, args=(xs, ys), rtol=1e-4)
            bad = np.abs(out[cand]) < 1e-4 * mass
            if np.any(bad):
                sel = np.flatnonzero(cand)[bad]
                # the G^{n,1} factor decays like exp(−n (uy)^{1/n}); stop where that is e^{−800}
                xb, yb = xs[bad], ys[bad]
                top = (800.0 / len(nu)) ** len(nu) / yb
                out.flat[sel] = -np.asarray(integrate(lambda t, a, b, c: (c - 1) * f(1 + (c - 1) * t, a, b),
                                                      0.0, 1.0, args=(xb, yb, top), rtol=1e-11))
    else:
        raise ValidationError(f"unknown kernel form {form!r}")
    return float(out) if out.ndim == 0 else out


def density_moment(s: int, model: WishartModel) -> float:
    """∫ x^s K_N(x,x) dx for integer s ≥ 0 (s = 0 gives N).

    (1/s!) Σ_{j<s} (−1)^j C(s−1,j) (N−j)_s Π_ℓ (N+ν_ℓ−j)_s, with the
    alternating sum accumulated exactly by fsum.
    """
    if s < 0 or int(s) != s:
        raise ValidationError("s must be a non-negative integer")
    s = int(s)
    N = model.N
    if s == 0:
        return float(N)
    if N > 200:
        warnings.warn("alternating moment sum loses relative accuracy for N > 200", RuntimeWarning)
    terms = []
    for j in range(s):
        if N - j <= 0:
            break
        logt = math.lgamma(N - j + s) - math.lgamma(N - j)
        for v in model.charges:
            logt += math.lgamma(N + v - j + s) - math.lgamma(N + v - j)
        logt += math.log(math.comb(s - 1, j)) - math.lgamma(s + 1)
        terms.append((-1) ** j * math.exp(logt))
    return math.fsum(terms)


def fc_moment(n: int, s) -> float:
    """Fuss–Catalan moment (1/(ns+1)) C((n+1)s, s); exact for integer s."""
    if float(s) == int(s) and s >= 0:
        s = int(s)
        return float(Fraction(math.comb((n + 1) * s, s), n * s + 1))
    val = math.exp(math.lgamma((n + 1) * s + 1) - math.lgamma(s + 1) - math.lgamma(n * s + 1)) / (n * s + 1)
    r = round(val)
    return float(r) if abs(val - r) < 1e-9 else val


def fc_support_edge(n: int) -> float:
    """K_n = (n+1)^{n+1}/n^n."""
    return (n + 1) ** (n + 1) / n ** n


def fc_edge_coefficients(n: int) -> tuple[float, float]:
    """(c_0, c_K) with ρ ~ c_0 x^{−n/(n+1)} at 0 and ρ ~ c_K √(K_n − x) at K_n."""
    c0 = math.sin(math.pi / (n + 1)) / math.pi
    cK = (2 ** (1 / 3) * n ** (n - 1) / (n + 1) ** (n + 2 / 3)) ** 1.5 / math.pi
    return c0, cK


def _fc_spec(n: int) -> specfun.MeijerGSpec:
    a = tuple((1 - k) / n for k in range(n))
    b = tuple(-(k + 1) / (n + 1) for k in range(n))
    return meijer(n, 0, a, b)


def _fc_trig_x(n: int, al):
    return np.sin((n + 1) * al) ** (n + 1) / (np.sin(al) * np.sin(n * al) ** n)


def fc_density(n: int, x, form: str = "meijer"):
    """Fuss–Catalan density on [0, K_n].

    The trigonometric form inverts x(α) = sin^{n+1}((n+1)α)/(sin α sin^n(nα)),
    which decreases from K_n to 0 on (0, π/(n+1)), by bisection.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    xa = np.asarray(x, dtype=float)
    K = fc_support_edge(n)
    if form == "meijer":
        out = np.zeros(xa.shape)
        inside = (xa > 0) & (xa < K)
        out[xa == 0] = np.inf
        if np.any(inside):
            pref = n ** (n - 1.5) / (n + 1) ** (n + 0.5) / math.sqrt(2 * math.pi)
            z = xa[inside] * n ** n / (n + 1) ** (n + 1)
            out[inside] = pref * meijer_g(_fc_spec(n), z)
    elif form == "trig":
        if np.any((xa <= 0) | (xa >= K)):
            raise DomainError("trigonometric form is defined on the open support only")
        lo = np.zeros(xa.shape)
        hi = np.full(xa.shape, math.pi / (n + 1))
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            above = _fc_trig_x(n, mid) > xa
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        al = 0.5 * (lo + hi)
        out = np.sin(al) ** 2 * np.sin(n * al) ** (n - 1) / (math.pi * np.sin((n + 1) * al) ** n)
    else:
        raise ValidationError(f"unknown form {form!r}")
    return float(out) if out.ndim == 0 else out


def _charge_poly(alphas: Sequence[float]) -> np.ndarray:
    # P(g) = g Π_ℓ (g + α_ℓ)/(1 + α_ℓ), increasing-order coefficients
    c = np.array([0.0, 1.0])
    for a in alphas:
        c = npoly.polymul(c, [a / (1 + a), 1 / (1 + a)])
    return c


def macro_support_scaled(n: int, alphas: Sequence[float]) -> tuple[float, float]:
    """Edges of the support of the scaled-charge macroscopic density.

    Edges are the critical values z = P'(g) of g ↦ P(g) − z(g−1), i.e. the
    real roots of P(g) − (g−1)P'(g).
    """
    alphas = _check_alphas(n, alphas)
    P = _charge_poly(alphas)
    dP = npoly.polyder(P)
    Q = npoly.polysub(P, npoly.polymul([-1.0, 1.0], dP))
    roots = npoly.polyroots(Q)
    zs = [npoly.polyval(r.real, dP) for r in roots if abs(r.imag) < 1e-9]
    zs = [z for z in zs if z > 1e-12]
    hi = max(zs)
    lo = 0.0 if min(alphas) == 0 else min(zs)
    return float(lo), float(hi)


def _check_alphas(n: int, alphas) -> tuple:
    alphas = tuple(float(a) for a in alphas)
    if len(alphas) != n:
        raise ValidationError("need one scaled charge per factor")
    if any(a < 0 for a in alphas):
        raise ValidationError("scaled charges must be non-negative")
    return alphas


def _newton(P, dP, g, z, tol=1e-14, maxit=30):
    for _ in range(maxit):
        f = npoly.polyval(g, P) - z * (g - 1)
        d = npoly.polyval(g, dP) - z
        step = f / d
        g = g - step
        if abs(step) <= tol * max(1.0, abs(g)):
            return g, True
    return g, False


def _track_root(alphas: Sequence[float], z: complex, steps: int = 200) -> complex:
    """Follow the root of P(g) = z(g−1) with g → 1 at infinity to the point z."""
    P = _charge_poly(alphas)
    dP = npoly.polyder(P)
    R = 10.0 * max(macro_support_scaled(len(alphas), alphas)[1], 1.0, abs(z))
    H = 0.5 * R
    side = -1.0 if z.imag < 0 or (z.imag == 0 and z.real < 0) else 1.0
    if z.imag == 0 and z.real < 0:
        side = 1.0
    path = [complex(R, 0), complex(R, side * H), complex(z.real, side * H), z]
    g, ok = _newton(P, dP, 1.0 + 0j, path[0])
    if not ok:
        raise BranchError("could not seed the branch at large |z|")
    for start, end in zip(path[:-1], path[1:]):
        t, dt = 0.0, 1.0 / steps
        while t < 1.0:
            dt = min(dt, 1.0 - t)
            zt = start + (t + dt) * (end - start)
            g_new, ok = _newton(P, dP, g, zt)
            if ok and abs(g_new - g) <= 0.1 * (1 + abs(g)):
                g, t = g_new, t + dt
                dt = min(2 * dt, 1.0 / steps)
            else:
                dt *= 0.5
                if dt < 1e-12:
                    raise BranchError(f"branch tracking failed near z = {zt}")
    return g


def green(n: int, z, alphas: Sequence[float] | None = None) -> complex:
    """Stieltjes transform G(z) = ∫ ρ(x)/(z−x) dx of the macroscopic density.

    zG solves (zG)^{n+1} = z(zG − 1) (or the scaled-charge generalization
    when ``alphas`` is given), selecting the branch with zG → 1 at infinity.
    """
    alphas = (0.0,) * n if alphas is None else _check_alphas(n, alphas)
    z = complex(z)
    lo, hi = macro_support_scaled(n, alphas)
    if z.imag == 0 and lo <= z.real <= hi:
        raise DomainError("z lies on the support; use a complex argument")
    return _track_root(alphas, z) / z


def macro_density_scaled(n: int, alphas: Sequence[float], x, eps: float = 1e-9):
    """Macroscopic density with scaled charges α_ℓ = lim ν_ℓ/N.

    Obtained as (1/π) Im G(x − i0): the root is tracked to x − iε and then
    polished by Newton at the real point.
    """
    alphas = _check_alphas(n, alphas)
    P = _charge_poly(alphas)
    dP = npoly.polyder(P)
    lo, hi = macro_support_scaled(n, alphas)
    xa = np.asarray(x, dtype=float)
    out = np.zeros(xa.shape)
    for i, xv in np.ndenumerate(xa):
        if not lo < xv < hi:
            continue
        g = _track_root(alphas, complex(xv, -eps * max(1.0, xv)))
        g2, ok = _newton(P, dP, g, complex(xv, 0.0))
        if ok:
            g = g2
        out[i] = max(g.imag, 0.0) / (math.pi * xv)
    return float(out) if out.ndim == 0 else out


def _bessel_kernel(nu, x, y):
    sx, sy = np.sqrt(x), np.sqrt(y)
    jx, jy = sc.jv(nu, sx), sc.jv(nu, sy)
    djx, djy = sc.jvp(nu, sx), sc.jvp(nu, sy)
    with np.errstate(invalid="ignore", divide="ignore"):
        off = (jx * sy * djy - sx * djx * jy) / (2 * (x - y))
    diag = 0.25 * (jx ** 2 - sc.jv(nu + 1, sx) * sc.jv(nu - 1, sx))
    return np.where(x == y, diag, off)


def _airy_kernel(x, y):
    ax, apx, _, _ = sc.airy(x)
    ay, apy, _, _ = sc.airy(y)
    with np.errstate(invalid="ignore", divide="ignore"):
        off = (ax * apy - apx * ay) / (x - y)
    return np.where(x == y, apx ** 2 - x * ax ** 2, off)


def _sine_kernel(x, y):
    return np.sinc(x - y)


def _meijer_hard_kernel(nus, x, y):
    m = len(nus)
    s1 = meijer(1, 0, (), (0.0,) + tuple(-v for v in nus))
    s2 = meijer(m, 0, (), tuple(nus) + (0.0,))

    def f(u, xx, yy):
        return meijer_g(s1, u * xx) * meijer_g(s2, u * yy)

    return np.asarray(integrate(f, 0.0, 1.0, args=(x, y), rtol=1e-11))


def kernel_limit(kind: str, params, x, y):
    """Microscopic limit kernels.

    ``kind`` is ``"sine"``, ``"airy"``, ``"bessel"`` (``params`` = ν) or
    ``"meijer_hard"`` (``params`` = sequence of the m fixed charges).
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if kind == "sine":
        out = _sine_kernel(x, y)
    elif kind == "airy":
        out = _airy_kernel(x, y)
    elif kind == "bessel":
        if np.any(x <= 0) or np.any(y <= 0):
            raise DomainError("Bessel kernel needs positive arguments")
        out = _bessel_kernel(float(params), x, y)
    elif kind == "meijer_hard":
        if np.any(x <= 0) or np.any(y <= 0):
            raise DomainError("Meijer kernel needs positive arguments")
        nus = tuple(float(v) for v in np.atleast_1d(params))
        out = _meijer_hard_kernel(nus, x, y)
    else:
        raise ValidationError(f"unknown kernel kind {kind!r}")
    return float(out) if np.ndim(out) == 0 else out


def _mutual_info_spec(n: int) -> specfun.MeijerGSpec:
    a = tuple(k / (n + 1) for k in range(1, n + 1)) + (1.0, 1.0)
    b = (1.0, 0.0) + tuple((k - 1) / n for k in range(n))
    return meijer(1, n + 2, a, b)


def mutual_info(n: int, snr) -> float:
    """∫ ρ_FC(x) log_2(1 + γx) dx as a closed-form G^{1,n+2}_{n+2,n+2}."""
    if snr < 0:
        raise DomainError("signal-to-noise ratio must be non-negative")
    if snr == 0:
        return 0.0
    pref = math.sqrt((n + 1) / (2 * math.pi * n ** 3)) / math.log(2)
    return pref * meijer_g(_mutual_info_spec(n), fc_support_edge(n) * snr)


def mutual_info_quadrature(n: int, snr: float) -> float:
    """Direct quadrature of ∫ ρ_FC(x) log_2(1+γx) dx."""
    K = fc_support_edge(n)
    return integrate(lambda x: fc_density(n, x) * np.log2(1 + snr * x), 0.0, K, rtol=1e-11)


def wide_correlator(n: int, x, y):
    """Connected two-point wide correlator on (0, ∞) for n = 1 or 2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x == y) or np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("need distinct positive arguments")
    if n == 1:
        out = -(np.sqrt(x / y) + np.sqrt(y / x)) / (4 * math.pi ** 2 * (x - y) ** 2)
    elif n == 2:
        out = -(1 + np.cbrt(x / y) + np.cbrt(y / x)) / (6 * math.pi ** 2 * (x - y) ** 2)
    else:
        raise ValidationError("wide correlator is only available for n = 1, 2")
    return float(out) if out.ndim == 0 else out
