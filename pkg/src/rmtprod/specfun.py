"""Gamma-type functions, hypergeometric series and Meijer G-functions.

The Meijer G-function is

    G^{m,n}_{p,q}(x | a; b) = (1/2πi) ∫_L x^u Π_{i≤m} Γ(b_i−u) Π_{j≤n} Γ(1−a_j+u)
                              / [Π_{j>n} Γ(a_j−u) Π_{i>m} Γ(1−b_i+u)] du.

Two evaluators are provided.  The vertical-line Mellin–Barnes quadrature is
used whenever the integrand decays exponentially along the line
(``delta = m+n−(p+q)/2 > 0``).  It handles repeated b-parameters, which give
higher-order poles, without special treatment.  The residue series sums the
poles of Π Γ(b_i−u) and is used for the remaining classes (``delta ≤ 0``);
it requires the b_1..b_m to be pairwise non-congruent mod 1.

Before either evaluator runs, a pair a_j (j ≤ n), b_k (k > m) with b_k − a_j a
small non-negative integer is removed by rewriting G as a finite combination
of lower-order functions.  Such pairs cancel every algebraic term and leave an
exponentially small value that neither evaluator resolves to relative accuracy.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import special as sc

from .errors import (
    ConvergenceError,
    DivergenceError,
    DomainError,
    PoleError,
    ValidationError,
)

__all__ = [
    "EvalPolicy",
    "MeijerGSpec",
    "classic_special",
    "hyper_pfq",
    "log_gamma",
    "log_gamma_ratio",
    "meijer",
    "meijer_asymptotic",
    "meijer_g",
    "meijer_mellin_moment",
    "polygamma",
]

DEFAULT_ABS_TOL = 1e-12
DEFAULT_REL_TOL = 1e-9


def _is_nonpos_int(z: complex) -> bool:
    z = complex(z)
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _lgam(z: np.ndarray) -> np.ndarray:
    """Complex log-gamma with +inf at the poles instead of nan."""
    z = np.asarray(z, dtype=complex)
    out = sc.loggamma(z)
    poles = (z.imag == 0.0) & (z.real <= 0.0) & (z.real == np.floor(z.real))
    if np.any(poles):
        out = np.where(poles, np.inf + 0j, out)
    return out


def log_gamma(z):
    """Principal branch of log Γ(z).

    Real positive input gives a float, anything else a complex number.
    Raises :class:`PoleError` at non-positive integers.
    """
    if _is_nonpos_int(z):
        raise PoleError(f"log_gamma has a pole at {z}")
    if isinstance(z, (int, float, np.integer, np.floating)) and z > 0:
        return float(sc.gammaln(z))
    return complex(sc.loggamma(complex(z)))


def log_gamma_ratio(num: Sequence[float], den: Sequence[float]) -> tuple[float, float]:
    """log|Π Γ(num) / Π Γ(den)| and its sign, for real arguments.

    A pole in the denominator gives (-inf, 0).  A pole in the numerator raises.
    """
    logv = 0.0
    sign = 1.0
    for v in num:
        if _is_nonpos_int(v):
            raise PoleError(f"gamma pole at {v}")
        logv += float(sc.gammaln(v))
        sign *= float(sc.gammasgn(v))
    for v in den:
        if _is_nonpos_int(v):
            return -math.inf, 0.0
        logv -= float(sc.gammaln(v))
        sign *= float(sc.gammasgn(v))
    return logv, sign


def polygamma(order: int, x: float) -> float:
    """ψ^(order)(x); order 0 is the digamma function."""
    if order < 0 or int(order) != order:
        raise DomainError("order must be a non-negative integer")
    order = int(order)
    if _is_nonpos_int(x):
        raise PoleError(f"polygamma has a pole at {x}")
    if order == 0:
        return float(sc.psi(x))
    # psi^(k)(x) = psi^(k)(x+1) - (-1)^k k! / x^(k+1), shifted to x > 0
    shift = 0.0
    while x <= 0:
        shift -= (-1) ** order * math.factorial(order) / x ** (order + 1)
        x += 1.0
    return float(sc.polygamma(order, x)) + shift


@dataclass(frozen=True)
class EvalPolicy:
    """Accuracy and truncation controls for series and contour evaluation.

    ``contour_truncation`` is the imaginary-part cutoff T of the vertical line;
    ``None`` selects it from the Stirling decay of the integrand so that the
    discarded tail is below ``abs_tol``.
    """

    abs_tol: float = DEFAULT_ABS_TOL
    rel_tol: float = DEFAULT_REL_TOL
    contour_truncation: float | None = None
    max_series_terms: int = 2_000_000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValidationError("tolerances must be positive")
        if self.contour_truncation is not None and self.contour_truncation <= 0:
            raise ValidationError("contour_truncation must be positive")
        if self.max_series_terms < 1:
            raise ValidationError("max_series_terms must be positive")


_DEFAULT_POLICY = EvalPolicy()


def _as_param(v):
    c = complex(v)
    return c.real if c.imag == 0.0 else c


@dataclass(frozen=True)
class MeijerGSpec:
    """Index and parameter record for G^{m,n}_{p,q}(· | a; b)."""

    m: int
    n: int
    p: int
    q: int
    a: tuple = field(default=())
    b: tuple = field(default=())

    def __post_init__(self):
        a = tuple(_as_param(v) for v in self.a)
        b = tuple(_as_param(v) for v in self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if len(a) != self.p or len(b) != self.q:
            raise ValidationError("parameter list lengths must equal p and q")
        if not (0 <= self.m <= self.q and 0 <= self.n <= self.p):
            raise ValidationError("need 0 <= m <= q and 0 <= n <= p")
        for bi in b[: self.m]:
            for aj in a[: self.n]:
                if _is_nonpos_int(complex(bi) - complex(aj) + 1):
                    raise ValidationError(
                        f"poles of Γ(b-u) and Γ(1-a+u) collide (b={bi}, a={aj})"
                    )

    @property
    def delta(self) -> float:
        """m + n − (p+q)/2; the line integral converges absolutely iff > 0."""
        return self.m + self.n - 0.5 * (self.p + self.q)

    @property
    def is_real(self) -> bool:
        return all(isinstance(v, float) for v in self.a + self.b)

    def shifted(self, c: float) -> "MeijerGSpec":
        """Parameters of x^c G(x): every a and b shifted by c."""
        return MeijerGSpec(
            self.m, self.n, self.p, self.q,
            tuple(v + c for v in self.a), tuple(v + c for v in self.b),
        )

    def inverted(self) -> "MeijerGSpec":
        """Parameters of G(1/x) = G^{n,m}_{q,p}(x | 1−b; 1−a)."""
        return MeijerGSpec(
            self.n, self.m, self.q, self.p,
            tuple(1 - v for v in self.b), tuple(1 - v for v in self.a),
        )

    def conjugation_closed(self) -> bool:
        def closed(group):
            vals = sorted((complex(v) for v in group), key=lambda z: (z.real, z.imag))
            conj = sorted((complex(v).conjugate() for v in group), key=lambda z: (z.real, z.imag))
            return np.allclose(vals, conj, rtol=0, atol=1e-14)

        return all(
            closed(g)
            for g in (self.a[: self.n], self.a[self.n:], self.b[: self.m], self.b[self.m:])
        )


def meijer(m: int, n: int, a: Sequence = (), b: Sequence = ()) -> MeijerGSpec:
    """Shorthand constructor inferring p and q from the parameter lists."""
    return MeijerGSpec(m, n, len(a), len(b), tuple(a), tuple(b))


def _log_gamma_part(spec: MeijerGSpec, u: np.ndarray) -> np.ndarray:
    """log of the gamma quotient in the Mellin–Barnes integrand (without x^u)."""
    u = np.asarray(u, dtype=complex)
    out = np.zeros(u.shape, dtype=complex)
    for bi in spec.b[: spec.m]:
        out += _lgam(bi - u)
    for aj in spec.a[: spec.n]:
        out += _lgam(1 - aj + u)
    for aj in spec.a[spec.n:]:
        out -= _lgam(aj - u)
    for bi in spec.b[spec.m:]:
        out -= _lgam(1 - bi + u)
    return out


def _contour_interval(spec: MeijerGSpec) -> tuple[float, float]:
    lo = max((complex(a).real - 1 for a in spec.a[: spec.n]), default=-math.inf)
    hi = min((complex(b).real for b in spec.b[: spec.m]), default=math.inf)
    return lo, hi


def _tol(policy: EvalPolicy, value: np.ndarray, scale: np.ndarray) -> np.ndarray:
    # abs_tol acts relative to the integrand or term scale, capped at abs_tol
    return np.maximum(policy.rel_tol * np.abs(value), policy.abs_tol * np.minimum(1.0, scale))


def _contour_candidates(spec: MeijerGSpec, xmax: float) -> tuple[np.ndarray, float, float]:
    lo, hi = _contour_interval(spec)
    if not lo < hi:
        raise DomainError("no vertical line separates the two pole sequences")
    offset = 0.0137
    if math.isfinite(lo) and math.isfinite(hi):
        w = hi - lo
        mg = min(0.25, w / 4)
        cand = np.linspace(lo + mg, hi - mg, 33) + offset * min(1.0, w / 8)
    else:
        span = 4.0 + 2.0 * max(xmax, 1.0) ** (1.0 / max(2 * spec.delta, 1.0))
        step = max(0.125, span / 256)
        grid = np.arange(0.0, span, step)
        if math.isfinite(hi):
            cand = hi - 0.25 - offset - grid
        elif math.isfinite(lo):
            cand = lo + 0.25 + offset + grid
        else:
            cand = np.concatenate([-grid[::-1], grid[1:]]) + offset
    # lines hugging an edge pole: the saddle for extreme x sits ~1/|log x| from it
    near = 0.25 * 2.0 ** -np.arange(1, 13)
    extra = []
    for edge, sgn in ((hi, -1.0), (lo, 1.0)):
        if not math.isfinite(edge):
            continue
        # skip edges whose pole is cancelled by a denominator gamma
        probe = _log_gamma_part(spec, np.array([edge + sgn * 1e-8 + 0j])).real[0]
        if probe > 10.0:
            extra.append(edge + sgn * near * min(1.0, (hi - lo) / 2))
    if extra:
        cand = np.concatenate([cand] + extra)
    return cand, lo, hi


def _contour(spec: MeijerGSpec, x: np.ndarray, policy: EvalPolicy) -> np.ndarray:
    if spec.delta <= 0:
        raise DivergenceError("line integral diverges for delta <= 0; use the residue series")
    if spec.m == 0 and spec.n == 0:
        return np.zeros_like(x)
    logx = np.log(x)
    cand, lo, hi = _contour_candidates(spec, float(np.max(x)))
    g0 = _log_gamma_part(spec, cand + 0j).real
    score = g0[None, :] + cand[None, :] * logx[:, None]
    score = np.where(np.isfinite(score), score, np.inf)
    choice = np.argmin(score, axis=1)
    out = np.empty(x.shape, dtype=float)
    for idx in np.unique(choice):
        sel = np.nonzero(choice == idx)[0]
        for start in range(0, sel.size, 256):
            chunk = sel[start:start + 256]
            out[chunk] = _trapezoid_line(spec, float(cand[idx]), logx[chunk], lo, hi, policy)
    return out


def _truncation(spec: MeijerGSpec, c: float, policy: EvalPolicy) -> float:
    if policy.contour_truncation is not None:
        return float(policy.contour_truncation)
    # Stirling: |integrand| ~ C t^α exp(−π δ t); scan until 40 e-folds below the peak
    peak = _log_gamma_part(spec, np.array([c + 0j])).real[0]
    t = 1.0
    while t < 2.0 ** 16:
        ts = np.linspace(t, 2 * t, 9)
        vals = _log_gamma_part(spec, c + 1j * ts).real
        peak = max(peak, float(np.max(vals)))
        if vals[-1] < peak - 40.0 + math.log(policy.abs_tol / DEFAULT_ABS_TOL) and t >= 2.0:
            return 2 * t
        t *= 2
    raise ConvergenceError("contour integrand does not decay")


def _trapezoid_line(spec, c, logx, lo, hi, policy) -> np.ndarray:
    """(1/2π)∫ x^{c+it} F(c+it) dt by nested trapezoid doubling."""
    T = _truncation(spec, c, policy)
    d = min(c - lo, hi - c)
    d = 1.0 if not math.isfinite(d) else d
    real = spec.is_real
    h = min(T / 32.0, 0.5 * d)
    nodes = max(int(math.ceil(T / h)), 8)
    h = T / nodes
    u_c = c * logx

    def values(ts):
        lg = _log_gamma_part(spec, c + 1j * ts)
        e = lg[None, :] + u_c[:, None] + 1j * ts[None, :] * logx[:, None]
        return np.exp(e)

    if real:
        ts = np.arange(0, nodes + 1) * h
        v = values(ts).real
        w = np.ones(ts.size)
        w[0] = 0.5
        S = h * (v @ w)
        A = h * (np.abs(v) @ w)
    else:
        ts = np.arange(-nodes, nodes + 1) * h
        v = values(ts)
        S = 0.5 * h * v.sum(axis=1)
        A = 0.5 * h * np.abs(v).sum(axis=1)
    level = 0
    while True:
        h *= 0.5
        if real:
            ts = (2 * np.arange(nodes) + 1) * h
            v = values(ts).real
            S_new = 0.5 * S + h * v.sum(axis=1)
            A = 0.5 * A + h * np.abs(v).sum(axis=1)
        else:
            ts = (2 * np.arange(-nodes, nodes) + 1) * h
            v = values(ts)
            S_new = 0.5 * S + 0.5 * h * v.sum(axis=1)
            A = 0.5 * A + 0.5 * h * np.abs(v).sum(axis=1)
        nodes *= 2
        level += 1
        scale = A / (math.pi if real else 1.0)
        err = np.abs(S_new - S)
        S = S_new
        val = S / math.pi if real else (S / (2 * math.pi)).real
        tol = _tol(policy, val, scale)
        if level >= 2 and np.all(err / (math.pi if real else 2 * math.pi) <= tol):
            return val
        if nodes > 2 ** 18:
            raise ConvergenceError("contour quadrature did not reach the requested accuracy")


def _residue_right(spec: MeijerGSpec, x: np.ndarray, policy: EvalPolicy) -> np.ndarray:
    """Sum of residues at the poles u = b_h + k of Π Γ(b_i − u), all simple."""
    bm = [complex(v) for v in spec.b[: spec.m]]
    for i in range(len(bm)):
        for j in range(i + 1, len(bm)):
            diff = bm[i] - bm[j]
            if diff.imag == 0 and diff.real == round(diff.real):
                raise DomainError("b-parameters congruent mod 1; residue series not applicable")
    logx = np.log(x).astype(complex)
    total = np.zeros(x.shape, dtype=complex)
    maxterm = np.zeros(x.shape)
    pq_equal = spec.p == spec.q
    for h, bh in enumerate(bm):
        S = np.zeros(x.shape, dtype=complex)
        done = np.zeros(x.shape, dtype=bool)
        k0 = 0
        chunk = 64
        while True:
            k = np.arange(k0, k0 + chunk, dtype=float)
            lc = -sc.gammaln(k + 1) + 1j * np.pi * np.mod(k, 2)
            for j, bj in enumerate(bm):
                if j != h:
                    lc = lc + _lgam(bj - bh - k)
            for aj in spec.a[: spec.n]:
                lc = lc + _lgam(1 - aj + bh + k)
            for aj in spec.a[spec.n:]:
                lc = lc - _lgam(aj - bh - k)
            for bj in spec.b[spec.m:]:
                lc = lc - _lgam(1 - bj + bh + k)
            if np.any(np.isinf(lc.real) & (lc.real > 0)) or np.any(np.isnan(lc)):
                raise PoleError("residue coefficient hits a gamma pole")
            e = lc[None, :] + (bh + k)[None, :] * logx[:, None]
            terms = np.where(np.isneginf(e.real), 0.0, np.exp(e))
            terms[done] = 0.0
            S += terms.sum(axis=1)
            mags = np.abs(terms)
            maxterm = np.maximum(maxterm, mags.max(axis=1))
            last, prev = mags[:, -1], mags[:, -2]
            with np.errstate(divide="ignore", invalid="ignore"):
                r = np.where(prev > 0, last / prev, 0.0)
            if pq_equal:
                r = np.where(last > 0, np.maximum(r, x), r)
            with np.errstate(divide="ignore", invalid="ignore"):
                tail = np.where(r < 1, last * r / (1 - r), np.inf)
            tail = np.where(last == 0, 0.0, tail)
            tol = _tol(policy, S + total, maxterm)
            done |= tail <= 0.01 * tol
            k0 += chunk
            if np.all(done):
                break
            if k0 >= policy.max_series_terms:
                raise ConvergenceError("residue series did not converge within max_series_terms")
            chunk = min(2 * chunk, 65536)
        total += S
    tol = _tol(policy, total, np.ones_like(maxterm))
    if np.any(maxterm * 1e-16 > 100 * np.maximum(tol, policy.abs_tol)):
        raise ConvergenceError("cancellation in the residue series exceeds the tolerance")
    return total.real


_NEAR_ONE = 0.99


def _norlund_applicable(spec: MeijerGSpec) -> bool:
    return spec.n == 0 and spec.m == spec.p == spec.q and spec.is_real


def _near_unit(spec: MeijerGSpec, x: np.ndarray, policy: EvalPolicy) -> np.ndarray:
    """G^{m,0}_{m,m} just below x = 1.

    There G = (1−x)^{s−1} h(1−x) with s = Σa − Σb and h analytic for |1−x| < 1.
    h is interpolated on Chebyshev nodes where the residue series converges
    quickly and continued the short distance to the edge.
    """
    coef, w0, w1, s = _norlund_fit(spec, policy)
    w = 1.0 - x
    t = (2 * w - (w0 + w1)) / (w1 - w0)
    return np.polynomial.chebyshev.chebval(t, coef) * w ** (s - 1)


@functools.lru_cache(maxsize=64)
def _norlund_fit(spec: MeijerGSpec, policy: EvalPolicy):
    s = sum(spec.a) - sum(spec.b)
    w0, w1, deg = 1.0 - 0.995, 0.5, 28
    t = np.cos(np.pi * (np.arange(deg + 1) + 0.5) / (deg + 1))
    w = 0.5 * (w0 + w1) + 0.5 * (w1 - w0) * t
    fine = EvalPolicy(policy.abs_tol * 1e-3, policy.rel_tol * 1e-3, None, policy.max_series_terms)
    g = _residue_right(spec, 1.0 - w, fine)
    coef = np.polynomial.chebyshev.chebfit(t, g / w ** (s - 1), deg)
    return coef, w0, w1, s


def _residue(spec: MeijerGSpec, x: np.ndarray, policy: EvalPolicy) -> np.ndarray:
    out = np.empty(x.shape, dtype=float)
    if spec.q > spec.p:
        right = np.ones(x.shape, dtype=bool)
    elif spec.p > spec.q:
        right = np.zeros(x.shape, dtype=bool)
    else:
        right = x <= 1.0
    left = ~right
    near = right & (x > _NEAR_ONE) & (x < 1.0) & _norlund_applicable(spec)
    right &= ~near
    if np.any(near):
        out[near] = _near_unit(spec, x[near], policy)
    if np.any(right):
        out[right] = _residue_right(spec, x[right], policy)
    if np.any(left):
        inv = spec.inverted()
        out[left] = 0.0 if inv.m == 0 else _residue_right(inv, 1.0 / x[left], policy)
    return out


def meijer_g(spec: MeijerGSpec, x, policy: EvalPolicy | None = None, method: str = "auto"):
    """Evaluate G^{m,n}_{p,q}(x | a; b) for positive real x.

    ``method`` is ``"auto"``, ``"contour"`` or ``"residue"``.  Scalars in give a
    float out; arrays give arrays.
    """
    policy = policy or _DEFAULT_POLICY
    if not spec.conjugation_closed():
        raise DomainError("parameter lists are not closed under conjugation")
    scalar = np.ndim(x) == 0
    shape = np.shape(x)
    xa = np.asarray(x, dtype=float).ravel()
    if np.any(~(xa > 0)):
        raise DomainError("meijer_g requires x > 0")
    auto = method == "auto"
    if auto:
        lo, hi = _contour_interval(spec)
        method = "contour" if spec.delta > 0 and lo < hi else "residue"
        if method == "residue" and spec.p == spec.q and spec.delta <= 0 and np.any(xa == 1.0):
            sb = sum(complex(v) for v in spec.b).real
            sa = sum(complex(v) for v in spec.a).real
            if not sb - sa < 0:
                raise DivergenceError("series diverges at |x| = 1 for these parameters")
    if method not in ("contour", "residue"):
        raise ValidationError(f"unknown method {method!r}")
    if auto and (spec.m, spec.n, spec.p, spec.q) == (1, 0, 0, 1) and spec.is_real:
        with np.errstate(under="ignore"):
            out = np.exp(spec.b[0] * np.log(xa) - xa)
        return float(out[0]) if scalar else out.reshape(shape)
    if auto:
        terms = _reduce(spec)
        if terms is not None:
            out = sum(c * meijer_g(s, xa, policy) for c, s in terms)
            return float(out[0]) if scalar else out.reshape(shape)
    out = np.zeros(xa.shape)
    live = ~_underflows(spec, xa)
    if not np.all(np.isfinite(xa[live])):
        raise DomainError("meijer_g requires finite x")
    if np.any(live):
        xs = xa[live]
        out[live] = _contour(spec, xs, policy) if method == "contour" else _residue(spec, xs, policy)
    return float(out[0]) if scalar else out.reshape(shape)


_MAX_REDUCTION_ORDER = 40


def _reduce(spec: MeijerGSpec):
    """Split G into Σ c_i G' when some a_j (j ≤ n), b_k (k > m) have b_k − a_j ∈ {0, 1, …}.

    Then Γ(1−a_j+u)/Γ(1−b_k+u) = (1−b_k+u)_M is a polynomial in u; writing it
    in the basis (b_1−u)_i absorbs each term into Γ(b_1−u) as b_1 → b_1+i.
    The reduced functions carry no exponentially small remainder hidden by
    cancelling poles.  Returns None when no such pair exists.
    """
    if spec.m == 0 or not spec.is_real:
        return None
    for j in range(spec.n):
        for k in range(spec.m, spec.q):
            d = spec.b[k] - spec.a[j]
            M = round(d)
            if abs(d - M) > 1e-12 or not 0 <= M <= _MAX_REDUCTION_ORDER:
                continue
            b1, bk = spec.b[0], spec.b[k]
            target = npoly.polyfromroots([bk - 1 - i for i in range(M)])
            basis = [npoly.polyfromroots([b1 + l for l in range(i)]) * (-1) ** i for i in range(M + 1)]
            A = np.zeros((M + 1, M + 1))
            for i, c in enumerate(basis):
                A[: c.size, i] = c
            coef = np.linalg.solve(A, target)
            a = spec.a[:j] + spec.a[j + 1:]
            rest = spec.b[1:k] + spec.b[k + 1:]
            return [(float(c), MeijerGSpec(spec.m, spec.n - 1, spec.p - 1, spec.q - 1, a, (b1 + i,) + rest))
                    for i, c in enumerate(coef)]
    return None


def _underflows(spec: MeijerGSpec, x: np.ndarray) -> np.ndarray:
    # G^{q,0}_{p,q} with p < q decays like x^θ exp(−(q−p) x^{1/(q−p)})
    if not (spec.n == 0 and spec.m == spec.q and spec.p < spec.q and spec.is_real):
        return np.zeros(x.shape, dtype=bool)
    k = spec.q - spec.p
    theta = (sum(spec.b) - sum(spec.a) + (spec.p - spec.q + 1) / 2) / k
    with np.errstate(over="ignore", invalid="ignore"):
        expo = -k * x ** (1.0 / k) + abs(theta) * np.log(np.maximum(x, 1.0)) + 10.0
    return (expo < -760.0) | np.isposinf(x)


def meijer_g_perturbed(spec: MeijerGSpec, x, eps: float = 1e-4, policy: EvalPolicy | None = None):
    """Residue series with congruent b's split by eps, Richardson-extrapolated.

    Cross-check only: accuracy is limited to roughly eps times the cancellation
    between the nearly coincident poles.
    """
    def split(e):
        b = list(spec.b)
        for i in range(spec.m):
            b[i] = b[i] + e * (i + 1) * math.sqrt(2)
        return MeijerGSpec(spec.m, spec.n, spec.p, spec.q, spec.a, tuple(b))

    g1 = meijer_g(split(eps), x, policy, method="residue")
    g2 = meijer_g(split(2 * eps), x, policy, method="residue")
    return 2 * np.asarray(g1) - np.asarray(g2) if np.ndim(x) else 2 * g1 - g2


def meijer_mellin_moment(spec: MeijerGSpec, s):
    """∫_0^∞ x^{s−1} G(x) dx as a gamma-product, evaluated in log space."""
    num = [b + s for b in spec.b[: spec.m]] + [1 - a - s for a in spec.a[: spec.n]]
    den = [1 - b - s for b in spec.b[spec.m:]] + [a + s for a in spec.a[spec.n:]]
    for v in num:
        if _is_nonpos_int(v):
            raise PoleError(f"Mellin moment has a pole (gamma argument {v})")
    lg = complex(np.sum(_lgam(np.array(num, dtype=complex)))) if num else 0j
    for v in den:
        if _is_nonpos_int(v):
            return 0.0
    if den:
        lg -= complex(np.sum(_lgam(np.array(den, dtype=complex))))
    val = np.exp(lg)
    if spec.is_real and np.isreal(s):
        return float(val.real)
    return complex(val)


def meijer_asymptotic(b: Sequence[float], z):
    """Leading large-z behaviour of G^{m,0}_{0,m}(z | b).

    (2π)^{(m−1)/2}/√m · z^{(Σb − (m−1)/2)/m} · exp(−m z^{1/m}).
    """
    m = len(b)
    z = np.asarray(z, dtype=float)
    theta = (sum(b) - 0.5 * (m - 1)) / m
    return (2 * math.pi) ** (0.5 * (m - 1)) / math.sqrt(m) * z ** theta * np.exp(-m * z ** (1.0 / m))


def hyper_pfq(a: Sequence[float], b: Sequence[float], z: float,
              policy: EvalPolicy | None = None) -> float:
    """Generalized hypergeometric series pFq(a; b; z) for real arguments."""
    policy = policy or _DEFAULT_POLICY
    a = [float(v) for v in a]
    b = [float(v) for v in b]
    if any(_is_nonpos_int(v) for v in b):
        raise PoleError("lower parameter is a non-positive integer")
    if z == 0:
        return 1.0
    stops = [-int(v) for v in a if _is_nonpos_int(v)]
    kmax = min(stops) if stops else None
    p, q = len(a), len(b)
    if kmax is None:
        if p > q + 1:
            raise DivergenceError("pFq diverges for p > q+1 unless it terminates")
        if p == q + 1 and (abs(z) > 1 or (abs(z) == 1 and not sum(b) - sum(a) > 0)):
            raise DivergenceError("pFq with p = q+1 diverges at this argument")
    term = 1.0
    terms = [1.0]
    k = 0
    limit = policy.max_series_terms if kmax is None else kmax
    while k < limit:
        ratio = z / (k + 1)
        for v in a:
            ratio *= v + k
        for v in b:
            ratio /= v + k
        term *= ratio
        terms.append(term)
        k += 1
        if kmax is not None:
            continue
        r = abs(ratio)
        total = abs(math.fsum(terms))
        tol = max(policy.rel_tol * 1e-3 * total, policy.abs_tol * 1e-3)
        # the ratio magnitude is eventually decreasing for p <= q, tends to |z| for p = q+1
        r_eff = max(r, abs(z)) if p == q + 1 else r
        if r_eff < 1 and abs(term) * r_eff / (1 - r_eff) <= tol:
            break
    else:
        if kmax is None:
            raise ConvergenceError("hypergeometric series did not converge")
    return math.fsum(terms)


_CLASSIC = ("bessel_j", "bessel_k", "airy_ai", "erfc", "upper_incomplete_gamma")


def classic_special(kind: str, order: float, x: float) -> float:
    """Bessel J/K, Airy Ai (order 0) or Ai' (order 1), erfc, and Γ(order, x)."""
    if kind not in _CLASSIC:
        raise ValidationError(f"unknown special function {kind!r}")
    if kind == "bessel_j":
        if x < 0 and order != int(order):
            raise DomainError("J_ν(x) with non-integer ν needs x >= 0")
        return float(sc.jv(order, x))
    if kind == "bessel_k":
        if x <= 0:
            raise DomainError("K_ν(x) needs x > 0")
        return float(sc.kv(order, x))
    if kind == "airy_ai":
        if order not in (0, 1):
            raise DomainError("airy_ai order must be 0 (Ai) or 1 (Ai')")
        ai, aip, _, _ = sc.airy(x)
        return float(ai if order == 0 else aip)
    if kind == "erfc":
        return float(sc.erfc(x))
    if x < 0:
        raise DomainError("incomplete gamma needs x >= 0")
    if order > 0:
        return float(sc.gammaincc(order, x) * sc.gamma(order))
    if x == 0:
        raise PoleError("Γ(a, 0) diverges for a <= 0")
    return _upper_gamma_nonpos(order, x)


def _upper_gamma_nonpos(a: float, x: float) -> float:
    # Γ(a, x) = (Γ(a+1, x) − x^a e^{−x}) / a, stepping a up to (0, 1]
    if a > 0:
        return float(sc.gammaincc(a, x) * sc.gamma(a))
    if a == 0:
        return float(sc.exp1(x))
    return (_upper_gamma_nonpos(a + 1, x) - x ** a * math.exp(-x)) / a
