"""Exact eigenvalue statistics of products of Ginibre matrices.

β=2: determinantal process with weight G^{n,0}_{0,n}(|z|² | ν).
β=4: Pfaffian process on the upper half-plane with weight G^{n,0}_{0,n}(2^n|z|² | 2ν).
β=1: one-point weight and the probability that the whole spectrum is real.

Integrating out the phases turns the β=2 and β=4 jpdfs into permanents, so
the moduli are N independent radii with densities f_k; ``sample_radii``
draws from these by inverse-CDF tables.
"""
from __future__ import annotations

import functools
import hashlib
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import special as sc
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, PoleError, ValidationError
from .specfun import meijer, meijer_g

__all__ = [
    "EigenModel",
    "kernel_bulk",
    "kernel_complex",
    "kernel_edge",
    "kernel_origin",
    "macro_radial",
    "macro_radial_cdf",
    "moments_complex",
    "pfaffian",
    "phase_avg_quaternion_density",
    "prob_all_real",
    "quaternion_correlation",
    "quaternion_density",
    "quaternion_prekernel",
    "radial_factor",
    "real_prob_entries",
    "sample_radii",
    "weight_beta",
]


@dataclass(frozen=True)
class EigenModel:
    """N×N product of n induced Ginibre factors of Dyson index β."""

    beta: int
    N: int
    charges: tuple = (0,)

    def __post_init__(self):
        ch = tuple(float(v) for v in self.charges)
        object.__setattr__(self, "charges", ch)
        if self.beta not in (1, 2, 4):
            raise ValidationError("beta must be 1, 2 or 4")
        if self.N < 1 or int(self.N) != self.N:
            raise ValidationError("N must be a positive integer")
        if not ch:
            raise ValidationError("at least one factor is required")
        if any(v < 0 for v in ch) or list(ch) != sorted(ch):
            raise ValidationError("charges must be non-negative and sorted ascending")

    @property
    def n(self) -> int:
        return len(self.charges)


def _need_beta(model: EigenModel, *betas):
    if model.beta not in betas:
        raise ValidationError(f"operation requires beta in {betas}")


def _weight_spec(model: EigenModel):
    s = model.beta / 2
    return meijer(model.n, 0, (), tuple(s * v for v in model.charges)), s ** model.n


def weight_beta(model: EigenModel, r):
    """Radial weight G^{n,0}_{0,n}((β/2)^n r² | βν/2).

    At r = 0 the value is +inf when the weight diverges there (n ≥ 2 with a
    zero charge).
    """
    spec, c = _weight_spec(model)
    ra = np.abs(np.asarray(r, dtype=float))
    out = np.empty(ra.shape)
    arg = c * ra ** 2
    zero = arg == 0
    if np.any(zero):
        bmin = min(spec.b)
        if bmin > 0:
            out[zero] = 0.0
        elif model.n == 1:
            out[zero] = 1.0
        else:
            out[zero] = np.inf
    if np.any(~zero):
        out[~zero] = meijer_g(spec, arg[~zero])
    return float(out) if out.ndim == 0 else out


def _log_gprod(charges, k):
    return sum(sc.gammaln(v + k + 1) for v in charges)


def kernel_complex(N: int, x, y, model: EigenModel):
    """β=2 kernel w(|x|) Σ_{k<N} (x ȳ)^k / (π Π_ℓ Γ(ν_ℓ+k+1)).

    The sum is accumulated with log-space coefficients; the value is complex
    off the diagonal and real on it.
    """
    _need_beta(model, 2)
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    x, y = np.broadcast_arrays(x, y)
    t = x * y.conj()
    k = np.arange(N)
    coef = np.exp(-_log_gprod(model.charges, k))
    out = np.polynomial.polynomial.polyval(t, coef) / math.pi
    out = out * weight_beta(model, np.abs(x))
    return complex(out) if out.ndim == 0 else out


def moments_complex(s: float, model: EigenModel) -> float:
    """∫ |z|^{2s} K_N(z,z) d²z = Σ_{k<N} Π_ℓ Γ(ν_ℓ+k+s+1)/Γ(ν_ℓ+k+1)."""
    _need_beta(model, 2)
    if s <= -model.charges[0] - 1:
        raise PoleError("moment requires s > -nu_1 - 1")
    k = np.arange(model.N)
    logs = sum(sc.gammaln(v + k + s + 1) - sc.gammaln(v + k + 1) for v in model.charges)
    return math.fsum(np.exp(logs))


def _alphas(n, alphas):
    if alphas is None:
        return (0.0,) * n
    alphas = tuple(float(a) for a in alphas)
    if len(alphas) != n or any(a < 0 for a in alphas):
        raise ValidationError("need n non-negative scaled charges")
    return alphas


def _n_of(model) -> int:
    return model if isinstance(model, (int, np.integer)) else model.n


def macro_radial_cdf(model, r, alphas: Sequence[float] | None = None):
    """Fraction of eigenvalues within radius r after N^{n/2} rescaling.

    F(r) solves p_α(F) = r² with p_α(t) = Π_ℓ(t+α_ℓ), so F runs from 0 at
    r_in² = Πα_ℓ to 1 at r_out² = Π(1+α_ℓ).
    """
    n = _n_of(model)
    al = _alphas(n, alphas)
    ra = np.asarray(r, dtype=float)
    r2 = ra ** 2
    if all(a == 0 for a in al):
        out = np.clip(r2, 0, 1) ** (1.0 / n)
        return float(out) if out.ndim == 0 else out
    p = lambda t: np.prod([t + a for a in al], axis=0)
    lo_r2, hi_r2 = p(0.0), p(1.0)
    target = np.clip(r2, lo_r2, hi_r2)
    lo = np.zeros(target.shape)
    hi = np.ones(target.shape)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = p(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    out = np.where(r2 <= lo_r2, 0.0, np.where(r2 >= hi_r2, 1.0, out))
    return float(out) if out.ndim == 0 else out


def macro_radial(model, r, alphas: Sequence[float] | None = None):
    """Macroscopic density (per unit area) of eigenvalues after N^{n/2} rescaling.

    α=0: |z|^{2(1−n)/n}/(πn) on the unit disk.  General α: 1/(π p_α'(F(r)))
    on the annulus r_in ≤ r ≤ r_out, with F from ``macro_radial_cdf``.
    """
    n = _n_of(model)
    al = _alphas(n, alphas)
    ra = np.abs(np.asarray(r, dtype=float))
    if all(a == 0 for a in al):
        with np.errstate(divide="ignore"):
            out = np.where(ra <= 1, ra ** (2 * (1 - n) / n) / (math.pi * n), 0.0)
        return float(out) if out.ndim == 0 else out
    F = np.asarray(macro_radial_cdf(n, ra, al))
    dp = np.zeros(F.shape)
    for i in range(n):
        term = np.ones(F.shape)
        for j, a in enumerate(al):
            if j != i:
                term = term * (F + a)
        dp = dp + term
    r2 = ra ** 2
    inside = (r2 > np.prod(al)) & (r2 < np.prod([1 + a for a in al]))
    out = np.where(inside, 1.0 / (math.pi * np.where(dp > 0, dp, 1.0)), 0.0)
    return float(out) if out.ndim == 0 else out


def _entire_series(t, charges, max_terms: int = 100000):
    """Σ_{k≥0} t^k / Π Γ(ν_ℓ+k+1) for complex t (an entire function)."""
    t = np.asarray(t, dtype=complex)
    shape = t.shape
    t = t.ravel()
    total = np.zeros(t.shape, dtype=complex)
    logt = np.log(np.where(t == 0, 1.0, t))
    done = np.zeros(t.shape, dtype=bool)
    peak = np.full(t.shape, -np.inf)
    k = 0
    chunk = 64
    while not np.all(done) and k < max_terms:
        ks = np.arange(k, k + chunk)
        lc = -_log_gprod(charges, ks)
        e = ks[None, :] * logt[:, None] + lc[None, :]
        if k == 0:
            e[t == 0, 1:] = -np.inf
        else:
            e[t == 0] = -np.inf
        terms = np.exp(e)
        terms[done] = 0
        total += terms.sum(axis=1)
        peak = np.maximum(peak, e.real.max(axis=1))
        last = e.real[:, -1]
        # past the peak once log|term| decreases in k, so the tail is geometric
        decreasing = e.real[:, -1] < e.real[:, -2]
        done |= decreasing & (last < peak - 40) | (t == 0)
        k += chunk
    return total.reshape(shape)


def kernel_origin(model: EigenModel, x, y):
    """Microscopic β=2 kernel at the origin (no rescaling).

    (1/π) G^{n,0}_{0,n}(|x|² | ν) Σ_{k≥0} (x ȳ)^k / Π Γ(ν_ℓ+k+1); the series is
    the G^{1,1}_{1,n+1}(−x ȳ) factor.  Diverges at x = 0 for n ≥ 2 with ν_1 = 0.
    """
    _need_beta(model, 2)
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    x, y = np.broadcast_arrays(x, y)
    s = _entire_series(x * y.conj(), model.charges)
    out = weight_beta(model, np.abs(x)) * s / math.pi
    return complex(out) if np.ndim(out) == 0 else out


def kernel_bulk(u, v):
    """Ginibre bulk kernel (1/π) exp(−|u|²/2 − |v|²/2 + u v̄)."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    return np.exp(-abs(u) ** 2 / 2 - abs(v) ** 2 / 2 + u * v.conj()) / math.pi


def kernel_edge(u, v, z_star):
    """Edge kernel K_bulk(u,v)·erfc(√2(z_* v̄ + u z̄_*))/2 at a point |z_*| = 1."""
    from scipy.special import erfc

    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    arg = math.sqrt(2) * (z_star * v.conj() + u * np.conj(z_star))
    return kernel_bulk(u, v) * erfc(arg) / 2


# ------------------------------------------------------------------- β = 4


def _log_pow(z: np.ndarray, e: np.ndarray) -> np.ndarray:
    # complex log of z**e with 0**0 = 1
    with np.errstate(divide="ignore"):
        lz = np.log(z.astype(complex))
    return np.where(e == 0, 0.0, e * lz)


def quaternion_prekernel(model: EigenModel, x, y, N: int | None = None):
    """κ_N(x,y) = 2^n π^{n/2−1} Σ_{k<N} Σ_{j≤k} (x^{2k+1}y^{2j} − y^{2k+1}x^{2j}) / Π 4^ν Γ(ν+j+1)Γ(ν+k+3/2).

    The prefactor follows from the skew-orthogonal system with norms
    h_k = (π/2) Π Γ(2ν+k+1)/2^{k+1}, so R₁ integrates to 2N over the plane.
    Coefficients and powers are combined in log-space; ``N`` defaults to model.N.
    """
    _need_beta(model, 4)
    N = model.N if N is None else N
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    x, y = np.broadcast_arrays(x, y)
    shape = x.shape
    x, y = x.ravel(), y.ravel()
    k = np.arange(N)
    lj = -sum(sc.gammaln(v + k + 1) + v * math.log(4) for v in model.charges)
    lk = -sum(sc.gammaln(v + k + 1.5) for v in model.charges)
    jj, kk = np.meshgrid(k, k, indexing="ij")
    mask = jj <= kk
    lc = (lj[:, None] + lk[None, :])[mask]
    ej, ek = 2 * jj[mask], 2 * kk[mask] + 1
    out = np.zeros(x.shape, dtype=complex)
    for i in range(x.size):
        a = np.exp(lc + _log_pow(x[i], ek) + _log_pow(y[i], ej))
        b = np.exp(lc + _log_pow(y[i], ek) + _log_pow(x[i], ej))
        out[i] = np.sum(a) - np.sum(b)
    out *= 2.0 ** model.n * math.pi ** (model.n / 2 - 1)
    out = out.reshape(shape)
    return complex(out) if out.ndim == 0 else out


def quaternion_density(model: EigenModel, z):
    """One-point function R₁(z) = (z̄ − z) w(|z|) κ_N(z, z̄)."""
    z = np.asarray(z, dtype=complex)
    val = (z.conj() - z) * weight_beta(model, np.abs(z)) * np.asarray(quaternion_prekernel(model, z, z.conj()))
    out = val.real
    return float(out) if np.ndim(out) == 0 else out


def pfaffian(A: np.ndarray) -> complex:
    """Pfaffian of a skew-symmetric matrix by pivoted skew Gaussian elimination."""
    A = np.array(A, dtype=complex)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValidationError("Pfaffian needs a square matrix")
    if n % 2:
        return 0.0
    pf = 1.0 + 0j
    for k in range(0, n - 1, 2):
        p = k + 1 + int(np.argmax(np.abs(A[k, k + 1:])))
        if p != k + 1:
            A[[k + 1, p]] = A[[p, k + 1]]
            A[:, [k + 1, p]] = A[:, [p, k + 1]]
            pf = -pf
        piv = A[k, k + 1]
        if piv == 0:
            return 0.0 + 0j
        pf *= piv
        if k + 2 < n:
            tau = A[k, k + 2:] / piv
            # eliminate rows/columns k+2.. using the (k, k+1) pivot pair
            A[k + 2:, k + 2:] += np.outer(A[k + 1, k + 2:], tau) - np.outer(tau, A[k + 1, k + 2:])
    return pf


def quaternion_correlation(model: EigenModel, zs: Sequence[complex]) -> float:
    """k-point function Π_i (z̄_i − z_i) w(z_i) · Pf[S(z_i, z_j)].

    S(x,y) = [[κ(x,y), κ(x,ȳ)], [κ(x̄,y), κ(x̄,ȳ)]] is the skew-symmetric
    2×2-block form of the kernel; dimension ≤ 20.
    """
    zs = np.asarray(zs, dtype=complex).ravel()
    k = zs.size
    if 2 * k > 20:
        raise ValidationError("Pfaffian dimension limited to 20")
    pts = np.empty(2 * k, dtype=complex)
    pts[0::2], pts[1::2] = zs, zs.conj()
    X, Y = np.meshgrid(pts, pts, indexing="ij")
    S = np.asarray(quaternion_prekernel(model, X, Y))
    pre = np.prod((zs.conj() - zs) * np.asarray(weight_beta(model, np.abs(zs))))
    return float((pre * pfaffian(S)).real)


def phase_avg_quaternion_density(model: EigenModel, r, N: int | None = None):
    """∫_{−π}^{π} R₁(r e^{iθ}) dθ for β=4, so ∫ value·r dr = 2N.

    Equals 4·2^{2n} r² w(r) Σ_{k<N} (2^{2n} r⁴)^k / Π_ℓ Γ(2(ν_ℓ+k+1)); with
    ``N=np.inf`` the sum runs to infinity (origin limit).
    """
    _need_beta(model, 4)
    N = model.N if N is None else N
    ra = np.asarray(r, dtype=float)
    if np.any(ra <= 0):
        raise DomainError("r must be positive")
    n = model.n
    t = 2.0 ** (2 * n) * ra ** 4
    if math.isinf(N):
        s = _phase_series_inf(t, model.charges)
    else:
        k = np.arange(int(N))
        lc = -sum(sc.gammaln(2 * (v + k + 1)) for v in model.charges)
        with np.errstate(divide="ignore"):
            lt = np.log(t)
        s = np.exp(lc[None, :] + k[None, :] * lt.ravel()[:, None]).sum(axis=1).reshape(ra.shape)
    out = 4 * 2.0 ** (2 * n) * ra ** 2 * np.asarray(weight_beta(model, ra)) * s
    return float(out) if np.ndim(out) == 0 else out


def _phase_series_inf(t, charges):
    t = np.asarray(t, dtype=float)
    total = np.zeros(t.shape)
    lt = np.log(t)
    peak = np.full(t.shape, -np.inf)
    k0 = 0
    while True:
        k = np.arange(k0, k0 + 64)
        lc = -sum(sc.gammaln(2 * (v + k + 1)) for v in charges)
        e = lc[None, :] + k[None, :] * lt.ravel()[:, None]
        total += np.exp(e).sum(axis=1).reshape(t.shape)
        peak = np.maximum(peak, e.max(axis=1).reshape(t.shape))
        if np.all((e[:, -1] < e[:, -2]).reshape(t.shape) & (e[:, -1].reshape(t.shape) < peak - 40)):
            return total
        k0 += 64


# ------------------------------------------------------------ radial factors


def _log_h(model: EigenModel, k: int) -> float:
    if model.beta == 2:
        return math.log(math.pi) + float(_log_gprod(model.charges, k))
    return math.log(math.pi / 2) + sum(math.lgamma(2 * v + k + 1) - (k + 1) * math.log(2) for v in model.charges)


def radial_factor(model: EigenModel, k: int, r):
    """Density f_k of the k-th independent radius.

    β=2: 2π r^{2k−1} w(r)/h_{k−1}; β=4: π r^{4k−1} w(r)/h_{2k−1}.
    """
    _need_beta(model, 2, 4)
    if not 1 <= k <= model.N:
        raise ValidationError("k must lie in 1..N")
    ra = np.asarray(r, dtype=float)
    out = np.zeros(ra.shape)
    pos = ra > 0
    if np.any(pos):
        rp = ra[pos]
        w = np.asarray(weight_beta(model, rp))
        if model.beta == 2:
            lp = math.log(2 * math.pi) + (2 * k - 1) * np.log(rp) - _log_h(model, k - 1)
        else:
            lp = math.log(math.pi) + (4 * k - 1) * np.log(rp) - _log_h(model, 2 * k - 1)
        out[pos] = np.exp(lp) * w
    return float(out) if out.ndim == 0 else out


_GRID = 4096


def _radius_bounds(model: EigenModel, k: int) -> tuple[float, float]:
    # r² (β=2) or 2^n r² (β=4) is a product of independent gamma variables
    shapes = [v + k for v in model.charges] if model.beta == 2 else [2 * v + 2 * k for v in model.charges]
    mean = sum(sc.digamma(a) for a in shapes)
    sd = math.sqrt(sum(sc.polygamma(1, a) for a in shapes))
    lo = min(mean - 12 * sd, -40.0 / min(shapes))
    hi = max(mean + 12 * sd, model.n * math.log(80.0))
    if model.beta == 4:
        lo -= model.n * math.log(2)
        hi -= model.n * math.log(2)
    return 0.5 * lo, 0.5 * hi


def _cache_dir() -> Path | None:
    d = os.environ.get("RMT_PRODUCTS_CACHE")
    return Path(d) if d else None


@functools.lru_cache(maxsize=256)
def _inverse_cdf(beta: int, N: int, charges: tuple, k: int):
    model = EigenModel(beta, N, charges)
    key = hashlib.sha256(repr((beta, charges, k, _GRID)).encode()).hexdigest()[:20]
    cdir = _cache_dir()
    path = cdir / f"radii-{key}.npz" if cdir else None
    if path is not None and path.exists():
        data = np.load(path)
        u, F = data["logr"], data["cdf"]
    else:
        a, b = _radius_bounds(model, k)
        u = np.linspace(a, b, _GRID)
        r = np.exp(u)
        dens = np.asarray(radial_factor(model, k, r)) * r
        F = cumulative_trapezoid(dens, u, initial=0.0)
        F /= F[-1]
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(f".{os.getpid()}.tmp.npz")
            np.savez(tmp, logr=u, cdf=F)
            os.replace(tmp, path)
    keep = np.concatenate([[True], np.diff(F) > 0])
    return PchipInterpolator(F[keep], u[keep])


def sample_radii(model: EigenModel, rng: np.random.Generator) -> np.ndarray:
    """One draw of the N eigenvalue moduli, in random (symmetrized) order."""
    _need_beta(model, 2, 4)
    uni = rng.random(model.N)
    r = np.array([math.exp(float(_inverse_cdf(model.beta, model.N, model.charges, k)(uni[k - 1])))
                  for k in range(1, model.N + 1)])
    return rng.permutation(r)


# ------------------------------------------------------------------- β = 1


@dataclass(frozen=True)
class RealProbEntries:
    M: np.ndarray
    m: np.ndarray | None


def real_prob_entries(model: EigenModel) -> RealProbEntries:
    """Matrix entries M_ij (and the odd-N column m_j) of the real-spectrum determinant."""
    _need_beta(model, 1)
    nu, n, N = model.charges, model.n, model.N
    if any(v != int(v) for v in nu):
        raise ValidationError("prob_all_real needs integer charges")
    rows = (N + 1) // 2
    cols = N // 2
    M = np.empty((rows, cols))
    for i in range(1, rows + 1):
        for j in range(1, cols + 1):
            a = tuple(1.5 - v / 2 - i for v in nu) + (1.0,)
            b = tuple(v / 2 + j for v in nu) + (0.0,)
            g = meijer_g(meijer(n + 1, n, a, b), 1.0, method="contour")
            den = sum(math.lgamma((v + 2 * j - 1) / 2) + math.lgamma((v + 2 * j) / 2) for v in nu)
            M[i - 1, j - 1] = g * math.exp(-den)
    m = None
    if N % 2:
        m = np.array([math.exp(sum(math.lgamma((v + 2 * j - 1) / 2) - math.lgamma((v + N) / 2) for v in nu))
                      for j in range(1, rows + 1)])
    return RealProbEntries(M, m)


def prob_all_real(model: EigenModel) -> float:
    """Probability that all N eigenvalues of a real product are real."""
    ent = real_prob_entries(model)
    mat = ent.M if ent.m is None else np.column_stack([ent.M, ent.m])
    if mat.size == 0:
        return 1.0
    return float(np.linalg.det(mat))
