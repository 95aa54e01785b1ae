"""Monte Carlo sampling of Gaussian product ensembles and their spectra.

Quaternion (β=4) matrices are stored as their 2N×2N complex embedding
[[A, B], [−B̄, Ā]], which satisfies J X̄ = X J with J = [[0, I], [−I, 0]].

Spectra of long products are computed without forming the product: the
factor cycle is swept by a periodic subspace (QR) iteration until the
orthogonal basis stabilizes, after which eigenvalues are read off from
log-scaled products of small diagonal blocks.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError

log = logging.getLogger(__name__)

__all__ = [
    "EnsembleSpec",
    "FiniteTimeExponents",
    "SpectrumSample",
    "eigenvalues",
    "elliptic",
    "finite_time_exponents",
    "finite_time_exponents_batch",
    "ginibre",
    "haar_unitary",
    "induced_square",
    "product_chain",
    "squared_singular_values",
    "stream_rng",
]

_BETAS = (1, 2, 4)


def stream_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for substream ``stream`` of ``seed``.

    Substreams depend only on (seed, stream), never on worker count.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class EnsembleSpec:
    """Product of n Ginibre-type factors of Dyson index β with charges ν_1 ≤ … ≤ ν_n."""

    beta: int
    dim: int
    charges: tuple = (0,)

    def __post_init__(self):
        ch = tuple(int(v) for v in self.charges)
        if any(float(v) != int(v) for v in self.charges):
            raise ValidationError("charges must be integers")
        object.__setattr__(self, "charges", ch)
        if self.beta not in _BETAS:
            raise ValidationError("beta must be 1, 2 or 4")
        if self.dim < 1:
            raise ValidationError("dim must be >= 1")
        if not ch:
            raise ValidationError("at least one factor is required")
        if any(v < 0 for v in ch) or list(ch) != sorted(ch):
            raise ValidationError("charges must be non-negative and sorted ascending")

    @property
    def n(self) -> int:
        return len(self.charges)

    @property
    def gamma_const(self) -> int:
        return 2 if self.beta == 4 else 1


@dataclass
class SpectrumSample:
    kind: str
    values: np.ndarray
    seed_record: tuple
    spec: EnsembleSpec


@dataclass
class FiniteTimeExponents:
    """Finite-n Lyapunov (λ) and stability (ζ) exponents of one realization."""

    lyapunov: np.ndarray
    stability: np.ndarray
    phases: np.ndarray
    real_count: int
    n: int
    log_sv: np.ndarray = field(repr=False, default=None)
    log_eig: np.ndarray = field(repr=False, default=None)


def _check_beta(beta):
    if beta not in _BETAS:
        raise ValidationError("beta must be 1, 2 or 4")


def _quaternion_embed(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return np.block([[A, B], [-B.conj(), A.conj()]])


def ginibre(beta: int, rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Gaussian matrix with i.i.d. standard entries.

    β=1 real N(0,1); β=2 complex with E|z|² = 1; β=4 quaternion q = u + vj with
    E[q†q] = 1 (so E|u|² = E|v|² = 1/2), returned as the 2·rows × 2·cols embedding.
    """
    _check_beta(beta)
    if rows < 1 or cols < 1:
        raise ValidationError("rows and cols must be >= 1")
    if beta == 1:
        return rng.standard_normal((rows, cols))
    if beta == 2:
        z = rng.standard_normal((2, rows, cols))
        return (z[0] + 1j * z[1]) / math.sqrt(2)
    z = rng.standard_normal((4, rows, cols)) / 2
    return _quaternion_embed(z[0] + 1j * z[1], z[2] + 1j * z[3])


def _quaternion_gram_schmidt(G: np.ndarray) -> np.ndarray:
    N = G.shape[1] // 2
    cols = []
    for j in range(N):
        v = G[:, j].copy()
        for _ in range(2):
            for c in cols:
                v -= c * (c.conj() @ v)
        v /= np.linalg.norm(v)
        x, y = v[:N], v[N:]
        cols.append(v)
        cols.append(np.concatenate([-y.conj(), x.conj()]))
    first = np.stack(cols[0::2], axis=1)
    partner = np.stack(cols[1::2], axis=1)
    return np.concatenate([first, partner], axis=1)


def haar_unitary(beta: int, N: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal (β=1), unitary (β=2) or symplectic-unitary (β=4) matrix.

    β=1,2: QR of a Ginibre matrix with the phases of diag R moved into Q.
    β=4: quaternion Gram–Schmidt, returned as a 2N×2N embedding.
    """
    _check_beta(beta)
    if N < 1:
        raise ValidationError("N must be >= 1")
    G = ginibre(beta, N, N, rng)
    if beta == 4:
        return _quaternion_gram_schmidt(G)
    Q, R = np.linalg.qr(G)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))[None, :]


def _resymmetrize(X: np.ndarray) -> np.ndarray:
    N = X.shape[0] // 2
    return _quaternion_embed(X[:N, :N], X[:N, N:])


def induced_square(beta: int, N: int, nu: int, rng: np.random.Generator) -> np.ndarray:
    """N×N induced Ginibre matrix of charge ν.

    Singular values are taken from an (N+ν)×N Ginibre matrix and recombined
    with fresh Haar rotations; the induced density is isotropic, so this has
    the right law.
    """
    _check_beta(beta)
    if nu < 0 or int(nu) != nu:
        raise ValidationError("nu must be a non-negative integer")
    if nu == 0:
        return ginibre(beta, N, N, rng)
    G = ginibre(beta, N + int(nu), N, rng)
    s = np.linalg.svd(G, compute_uv=False)
    U = haar_unitary(beta, N, rng)
    V = haar_unitary(beta, N, rng)
    if beta == 4:
        S = np.concatenate([s[::2], s[::2]])
        return _resymmetrize((U * S[None, :]) @ V.conj().T)
    return (U * s[None, :]) @ V.conj().T


def elliptic(N: int, tau: float, rng: np.random.Generator, beta: int = 2) -> np.ndarray:
    """Elliptic Ginibre matrix E = √(1+τ)(X+X†)/2 + √(1−τ)(X−X†)/2.

    τ=0 gives a Ginibre matrix and τ=1 a Hermitian one.
    """
    if beta != 2:
        raise ValidationError("only beta=2 is supported for the elliptic ensemble")
    if not -1 <= tau <= 1:
        raise ValidationError("tau must lie in [-1, 1]")
    X = ginibre(2, N, N, rng)
    H = (X + X.conj().T) / 2
    A = (X - X.conj().T) / 2
    return math.sqrt(1 + tau) * H + math.sqrt(1 - tau) * A


def product_chain(spec: EnsembleSpec, mode: str, rng: np.random.Generator) -> list:
    """Independent factors X_1, …, X_n in multiplication order (X_1 acts first).

    ``rectangular``: X_i is (N+ν_i)×(N+ν_{i−1}) Ginibre with ν_0 = 0.
    ``square_induced``: X_i is N×N induced Ginibre of charge ν_i.
    """
    N = spec.dim
    if mode == "rectangular":
        dims = (0,) + spec.charges
        return [ginibre(spec.beta, N + dims[i + 1], N + dims[i], rng) for i in range(spec.n)]
    if mode == "square_induced":
        return [induced_square(spec.beta, N, nu, rng) for nu in spec.charges]
    raise ValidationError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------- product spectra

_TOL = 1e-13


def _blocks(M: np.ndarray, tol: float) -> list:
    """Finest partition making M block upper triangular up to ``tol``."""
    N = M.shape[0]
    low = np.abs(np.tril(M, -1))
    reach = np.arange(N)
    for j in range(N):
        rows = np.nonzero(low[:, j] > tol)[0]
        if rows.size:
            reach[j] = max(reach[j], rows.max())
    bounds, start, end = [], 0, 0
    for j in range(N):
        end = max(end, reach[j])
        if j == end:
            bounds.append((start, j + 1))
            start = j + 1
    return bounds


def _cycle_spectrum(factors: Sequence[np.ndarray], max_sweeps: int = 400):
    """Eigenvalues of F_L⋯F_1 for a batch of factor cycles.

    ``factors[i]`` has shape (B, d_out, d_in) with the cycle returning to
    dimension N.  Returns (log|λ|, phase λ) arrays of shape (B, N).
    """
    B, _, N = factors[0].shape
    dtype = np.result_type(*factors, np.float64)
    eye = np.broadcast_to(np.eye(N, dtype=dtype), (B, N, N))
    Qin = eye.copy()
    win = max(N - 1, 0)
    prev = None
    for sweep in range(max_sweeps):
        Z = Qin
        d_log = np.zeros((B, N))
        d_ph = np.ones((B, N), dtype=dtype)
        W = np.broadcast_to(np.eye(2, dtype=dtype), (B, win, 2, 2)).copy()
        W_log = np.zeros((B, win))
        T = eye.copy()
        T_log = np.zeros(B)
        idx = np.arange(win)
        for step, F in enumerate(factors):
            Z, R = np.linalg.qr(F @ Z)
            diag = np.diagonal(R, axis1=1, axis2=2)
            a = np.abs(diag)
            d_log += np.log(a)
            d_ph *= np.where(a > 0, diag / np.where(a > 0, a, 1), 1)
            if win:
                Rw = np.stack([np.stack([R[:, idx, idx], R[:, idx, idx + 1]], -1),
                               np.stack([R[:, idx + 1, idx], R[:, idx + 1, idx + 1]], -1)], -2)
                W = Rw @ W
                s = np.max(np.abs(W), axis=(-2, -1))
                s = np.where(s > 0, s, 1.0)
                W /= s[..., None, None]
                W_log += np.log(s)
            T = R @ T
            if step % 10 == 9 or step == len(factors) - 1:
                s = np.max(np.abs(T), axis=(-2, -1))
                s = np.where(s > 0, s, 1.0)
                T /= s[:, None, None]
                T_log += np.log(s)
        M = np.swapaxes(Qin.conj(), -1, -2) @ Z
        parts = [_blocks(M[b], _TOL) for b in range(B)]
        est = _assemble(M, parts, d_log, d_ph, W, W_log, T, T_log)
        Qin = Z
        if sweep >= 1 and _settled(parts, d_log, est, prev):
            break
        prev = est
    return est


def _settled(parts, d_log, est, prev) -> bool:
    """Stop once every block is at most 2×2, or the estimate is stable and
    no larger block spans more than ~1e8 in modulus (global T is then exact
    enough for it)."""
    small = all(hi - lo <= 2 for p in parts for lo, hi in p)
    if small:
        return True
    for b, p in enumerate(parts):
        for lo, hi in p:
            if hi - lo > 2 and np.ptp(d_log[b, lo:hi]) > 18.0:
                return False
    a = np.sort(est[0], axis=1), np.sort(est[1], axis=1)
    c = np.sort(prev[0], axis=1), np.sort(prev[1], axis=1)
    with np.errstate(invalid="ignore"):
        return bool(np.all(np.abs(a[0] - c[0]) <= 1e-11 * np.maximum(1.0, np.abs(a[0])))
                    and np.all(np.abs(a[1] - c[1]) <= 1e-9))


def _assemble(M, parts, d_log, d_ph, W, W_log, T, T_log):
    B, N = d_log.shape
    out_log = np.empty((B, N))
    out_ph = np.empty((B, N))
    for b in range(B):
        for lo, hi in parts[b]:
            if hi - lo == 1:
                lam = M[b, lo, lo]
                out_log[b, lo] = d_log[b, lo] + math.log(abs(lam))
                out_ph[b, lo] = np.angle(lam * d_ph[b, lo])
                continue
            if hi - lo == 2:
                blk, scale = W[b, lo], W_log[b, lo]
            else:
                blk, scale = T[b, lo:hi, lo:hi], T_log[b]
            ev = np.linalg.eigvals(M[b, lo:hi, lo:hi] @ blk)
            with np.errstate(divide="ignore"):
                out_log[b, lo:hi] = np.log(np.abs(ev)) + scale
            out_ph[b, lo:hi] = np.angle(ev)
    return out_log, out_ph


def _stack(factors):
    return [np.asarray(F)[None] if np.ndim(F) == 2 else np.asarray(F) for F in factors]


def _dedupe_pairs(logm, ph):
    # Kramers pairs: keep the upper half-plane representative of each pair
    order = np.lexsort((-ph, logm))
    logm, ph = logm[order], ph[order]
    return logm[0::2], np.abs(ph[0::2])


def _eig_log(factors, beta):
    logm, ph = _cycle_spectrum(_stack(factors))
    return logm[0], ph[0]


def eigenvalues(factors: Sequence[np.ndarray], beta: int = 2, log: bool = False):
    """Eigenvalues of the product X_n⋯X_1 (``factors`` in multiplication order).

    Returns complex values ordered by modulus.  For β=4 embeddings the 2N
    values are N upper-half-plane representatives followed by their exact
    conjugates.  With ``log=True``, or whenever a modulus is not representable,
    a pair (log-modulus, phase) is returned instead.
    """
    _check_beta(beta)
    shapes = [np.shape(F) for F in factors]
    if shapes[-1][0] != shapes[0][1]:
        raise ValidationError("product is not square")
    logm, ph = _eig_log(factors, beta)
    if beta == 4:
        lm, p = _dedupe_pairs(logm, ph)
        logm = np.concatenate([lm, lm])
        ph = np.concatenate([p, -p])
    else:
        order = np.argsort(logm, kind="stable")
        logm, ph = logm[order], ph[order]
    if log or np.any(logm > 700) or np.any(logm < -700):
        return logm, ph
    mod = np.exp(logm)
    vals = mod * np.cos(ph) + 1j * mod * np.sin(ph)
    real = (ph == 0) | (np.abs(ph) == math.pi)
    vals[real] = mod[real] * np.cos(ph[real])
    if beta == 4:
        N = vals.size // 2
        vals[N:] = vals[:N].conj()
    return vals


def _adjoint_cycle(factors):
    return list(factors) + [np.swapaxes(F.conj(), -1, -2) for F in reversed(factors)]


def squared_singular_values(factors: Sequence[np.ndarray], beta: int = 2, log: bool = False):
    """Squared singular values of X_n⋯X_1, ascending.

    Computed as eigenvalues of the cycle X_1†⋯X_n†X_n⋯X_1 by periodic QR
    sweeps, never forming the product.  β=4 pairs are deduplicated to N
    values.  ``log=True`` returns log x_k.
    """
    logm, _ = _cycle_spectrum(_adjoint_cycle(_stack(factors)))
    logm = np.sort(logm[0])
    if beta == 4:
        logm = logm[0::2]
    return logm if log else np.exp(logm)


def _real_count(ph: np.ndarray, N: int, beta: int) -> int:
    if beta != 1:
        return 0
    tol = 1e-6
    cnt = int(np.sum(np.abs(np.sin(ph)) <= tol))
    while (cnt - N) % 2 and tol < 1e-2:
        tol *= 10
        log.warning("real-eigenvalue parity mismatch; widening tolerance to %g", tol)
        cnt = int(np.sum(np.abs(np.sin(ph)) <= tol))
    return cnt


def _exponents(spec, log_sv, log_eig, ph) -> FiniteTimeExponents:
    n, N, beta = spec.n, spec.dim, spec.beta
    if log_sv is None:
        log_sv = np.empty(0)
    elif beta == 4:
        log_sv = np.sort(log_sv)[0::2]
    if log_eig is None:
        log_eig = ph = np.empty(0)
        real = 0
    else:
        real = _real_count(ph, N, beta)
        if beta == 4:
            log_eig, ph = _dedupe_pairs(log_eig, ph)
    order = np.argsort(log_eig, kind="stable")
    return FiniteTimeExponents(
        lyapunov=np.sort(log_sv) / (2 * n),
        stability=log_eig[order] / n,
        phases=ph[order],
        real_count=real,
        n=n,
        log_sv=np.sort(log_sv),
        log_eig=log_eig[order],
    )


def _factor_stack(spec: EnsembleSpec, rng: np.random.Generator) -> np.ndarray:
    if all(v == 0 for v in spec.charges):
        N = spec.dim
        if spec.beta == 1:
            return rng.standard_normal((spec.n, N, N))
        if spec.beta == 2:
            # same draw order as repeated ginibre() calls
            z = rng.standard_normal((spec.n, 2, N, N))
            return (z[:, 0] + 1j * z[:, 1]) / math.sqrt(2)
        return np.stack([ginibre(4, N, N, rng) for _ in range(spec.n)])
    return np.stack(product_chain(spec, "square_induced", rng))


def _check_kind(kind):
    if kind not in ("both", "sv", "eig"):
        raise ValidationError("kind must be 'both', 'sv' or 'eig'")


def finite_time_exponents(spec: EnsembleSpec, rng: np.random.Generator,
                          kind: str = "both") -> FiniteTimeExponents:
    """Lyapunov and stability exponents of one product realization.

    λ_k = log x_k/(2n) from squared singular values, ζ_k = log|z_k|/n from
    eigenvalues, both obtained by periodic QR sweeps over the factor stream.
    ``kind="sv"`` or ``"eig"`` skips the other half (its arrays are empty).
    """
    _check_kind(kind)
    F = _factor_stack(spec, rng)
    facs = [F[i][None] for i in range(spec.n)]
    lsv = _cycle_spectrum(_adjoint_cycle(facs))[0][0] if kind != "eig" else None
    le, ph = _cycle_spectrum(facs) if kind != "sv" else (None, None)
    return _exponents(spec, lsv, None if le is None else le[0], None if ph is None else ph[0])


def finite_time_exponents_batch(spec: EnsembleSpec, seed: int, streams: Iterable[int],
                                chunk_bytes: int = 64 * 2 ** 20, kind: str = "both") -> list:
    """finite_time_exponents for many substreams, vectorized across realizations.

    Realization ``s`` uses ``stream_rng(seed, s)``, so results do not depend
    on how the streams are chunked.
    """
    _check_kind(kind)
    streams = list(streams)
    d = spec.dim * spec.gamma_const
    per = spec.n * d * d * 16
    size = max(1, int(chunk_bytes // per))
    out = []
    for start in range(0, len(streams), size):
        chunk = streams[start:start + size]
        F = np.stack([_factor_stack(spec, stream_rng(seed, s)) for s in chunk])
        facs = [F[:, i] for i in range(spec.n)]
        lsv = _cycle_spectrum(_adjoint_cycle(facs))[0] if kind != "eig" else None
        le, ph = _cycle_spectrum(facs) if kind != "sv" else (None, None)
        out.extend(_exponents(spec, None if lsv is None else lsv[b],
                              None if le is None else le[b],
                              None if ph is None else ph[b]) for b in range(len(chunk)))
    return out
