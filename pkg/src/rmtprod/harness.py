"""Experiment orchestration, histograms, comparison statistics and emission.

Monte Carlo realization ``i`` always draws from ``stream_rng(seed, i)``, and
results are merged in realization order, so outputs do not depend on the
worker count.  Emitted files contain no timing data; wall-clock time lives on
the in-memory bundle only.
"""
from __future__ import annotations

import functools
import hashlib
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import __version__, eigen, sampling, wishart
from .errors import DomainError, ValidationError
from .sampling import EnsembleSpec

__all__ = [
    "EXPERIMENTS",
    "ComparisonStat",
    "ExperimentConfig",
    "Grid",
    "Histogram",
    "ResultBundle",
    "binomial_z",
    "compare",
    "config_hash",
    "emit",
    "fc_cdf",
    "histogram",
    "ks_statistic",
    "load_bundle",
    "run_experiment",
]

EXPERIMENTS = ("spectra", "density-curve", "kernel-grid", "real-prob", "lyapunov", "fc", "mutual-info", "verify")
_ANALYTIC = ("density-curve", "kernel-grid", "real-prob", "fc", "mutual-info", "verify")


@dataclass(frozen=True)
class Grid:
    """Evaluation grid of ``points`` values from ``min`` to ``max``."""

    min: float
    max: float
    points: int
    log: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.min) and math.isfinite(self.max)) or self.max <= self.min:
            raise ValidationError("grid needs finite min < max")
        if self.points < 2 or int(self.points) != self.points:
            raise ValidationError("grid needs at least 2 points")
        if self.log and self.min <= 0:
            raise ValidationError("log grid needs min > 0")

    @classmethod
    def parse(cls, text: str) -> "Grid":
        """Parse ``min:max:points[:log]``."""
        parts = text.split(":")
        if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
            raise ValidationError(f"bad grid {text!r}; expected min:max:points[:log]")
        try:
            return cls(float(parts[0]), float(parts[1]), int(parts[2]), len(parts) == 4)
        except ValueError as exc:
            raise ValidationError(f"bad grid {text!r}: {exc}") from None

    def values(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.min, self.max, self.points)
        return np.linspace(self.min, self.max, self.points)


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one run.

    ``parallel_width`` and ``output`` affect execution only and are left out
    of the serialized config and its hash.
    """

    experiment: str
    ensemble: EnsembleSpec = field(default_factory=lambda: EnsembleSpec(2, 2, (0,)))
    samples: int = 0
    seed: int = 0
    parallel_width: int = 1
    grid: Grid | None = None
    output: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValidationError(f"unknown experiment {self.experiment!r}")
        if int(self.samples) != self.samples or self.samples < 0:
            raise ValidationError("samples must be a non-negative integer")
        if self.samples < 1 and self.experiment not in _ANALYTIC:
            raise ValidationError("Monte Carlo experiments need samples >= 1")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise ValidationError("seed must be a 64-bit unsigned integer")
        if self.parallel_width < 1:
            raise ValidationError("parallel_width must be >= 1")
        if self.format not in ("csv", "json"):
            raise ValidationError("format must be csv or json")

    def to_dict(self) -> dict:
        e = self.ensemble
        return {
            "experiment": self.experiment,
            "ensemble": {"beta": e.beta, "dim": e.dim, "charges": list(e.charges)},
            "samples": int(self.samples),
            "seed": int(self.seed),
            "grid": None if self.grid is None else asdict(self.grid),
        }


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=True)


def config_hash(config: ExperimentConfig | dict) -> str:
    d = config.to_dict() if isinstance(config, ExperimentConfig) else config
    return hashlib.sha256(_canonical(d).encode()).hexdigest()[:16]


@dataclass
class Histogram:
    edges: list
    counts: list
    density: list
    dropped: int = 0
    empty: bool = False

    @property
    def widths(self) -> np.ndarray:
        return np.diff(np.asarray(self.edges, dtype=float))

    @property
    def centers(self) -> np.ndarray:
        e = np.asarray(self.edges, dtype=float)
        return 0.5 * (e[1:] + e[:-1])


def histogram(data, edges) -> Histogram:
    """Counts over half-open bins [e_i, e_{i+1}); values outside are dropped.

    The density is normalized by the binned total, so it integrates to one
    whenever anything was binned.
    """
    e = np.asarray(edges, dtype=float)
    if e.ndim != 1 or e.size < 2 or np.any(np.diff(e) <= 0):
        raise ValidationError("edges must be strictly ascending with at least two entries")
    x = np.asarray(data, dtype=float).ravel()
    idx = np.searchsorted(e, x, side="right") - 1
    inside = (idx >= 0) & (idx < e.size - 1) & (x < e[-1])
    counts = np.bincount(idx[inside], minlength=e.size - 1)
    total = int(counts.sum())
    if total:
        dens = counts / (total * np.diff(e))
    else:
        dens = np.zeros(e.size - 1)
    return Histogram(e.tolist(), [int(c) for c in counts], dens.tolist(), int(x.size - total), total == 0)


@dataclass(frozen=True)
class ComparisonStat:
    ks: float | None = None
    sup_norm: float | None = None
    binomial_z: float | None = None


def ks_statistic(samples, cdf: Callable) -> float:
    """sup_x |F_emp(x) − F(x)| for the empirical CDF of ``samples``."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise ValidationError("KS statistic needs at least one sample")
    F = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, x.size + 1)
    return float(min(1.0, max(np.max(i / x.size - F), np.max(F - (i - 1) / x.size), 0.0)))


def binomial_z(successes: int, trials: int, p: float) -> float:
    """Standardized deviation of an observed proportion from p."""
    if trials < 1:
        raise ValidationError("need at least one trial")
    if p <= 0 or p >= 1:
        return 0.0 if successes == p * trials else math.inf
    return (successes / trials - p) / math.sqrt(p * (1 - p) / trials)


def compare(empirical, cdf: Callable | None = None, density: Callable | None = None,
            domain: tuple | None = None, points: int = 4001) -> ComparisonStat:
    """Compare empirical data with an analytic law.

    ``empirical`` is a sample array, a :class:`Histogram` or a CDF callable.
    Samples or a CDF give ``ks`` against ``cdf``; a CDF callable is compared
    on ``points`` grid values across ``domain``.  A histogram gives
    ``sup_norm`` against ``density`` at bin centers, or against the bin
    averages of ``cdf`` when no density is given.
    """
    if isinstance(empirical, Histogram):
        lo, hi = empirical.edges[0], empirical.edges[-1]
        if domain is not None and (hi <= domain[0] or lo >= domain[1]):
            raise DomainError("histogram does not overlap the analytic domain")
        if density is not None:
            ana = np.asarray(density(empirical.centers), dtype=float)
        elif cdf is not None:
            ana = np.diff(np.asarray(cdf(np.asarray(empirical.edges)), dtype=float)) / empirical.widths
        else:
            raise ValidationError("need an analytic density or CDF")
        return ComparisonStat(sup_norm=float(np.max(np.abs(np.asarray(empirical.density) - ana))))
    if cdf is None:
        raise ValidationError("need an analytic CDF")
    if callable(empirical):
        if domain is None:
            raise ValidationError("comparing two CDFs needs a domain")
        x = np.linspace(domain[0], domain[1], points)
        d = np.abs(np.asarray(empirical(x), dtype=float) - np.asarray(cdf(x), dtype=float))
        return ComparisonStat(ks=float(min(1.0, np.max(d))))
    x = np.asarray(empirical, dtype=float)
    if domain is not None and np.any((x < domain[0]) | (x > domain[1])):
        raise DomainError("samples fall outside the analytic domain")
    return ComparisonStat(ks=ks_statistic(x, cdf))


@functools.lru_cache(maxsize=32)
def _fc_cdf_table(n: int, points: int):
    # x = K u^{n+1} removes the x^{−n/(n+1)} singularity at the origin
    K = wishart.fc_support_edge(n)
    u = np.linspace(0.0, 1.0, points)
    x = K * u ** (n + 1)
    f = np.empty(points)
    f[1:-1] = np.asarray(wishart.fc_density(n, x[1:-1])) * (n + 1) * K * u[1:-1] ** n
    f[0] = f[1]
    f[-1] = 0.0
    F = np.concatenate([[0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(u))])
    F /= F[-1]
    return PchipInterpolator(x, F)


def fc_cdf(n: int, x, points: int = 20001):
    """Fuss–Catalan CDF by cumulative quadrature (cached per n and grid)."""
    K = wishart.fc_support_edge(n)
    xa = np.asarray(x, dtype=float)
    out = np.where(xa <= 0, 0.0, np.where(xa >= K, 1.0, _fc_cdf_table(n, points)(np.clip(xa, 0, K))))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------- bundles


@dataclass
class ResultBundle:
    experiment: str
    config: dict
    config_hash: str
    columns: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    histogram: dict | None = None
    samples: list | None = None
    stats: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    wall_clock: float = field(default=0.0, compare=False)

    @property
    def ok(self) -> bool:
        return self.stats.get("failed", 0) == 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("wall_clock")
        return d


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_plain(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        return float(v)
    return v


def _realizations(config: ExperimentConfig, fn: Callable[[int], object]) -> list:
    idx = range(config.samples)
    if config.parallel_width == 1:
        return [fn(i) for i in idx]
    with ThreadPoolExecutor(max_workers=config.parallel_width) as pool:
        return list(pool.map(fn, idx))


def _grid(config: ExperimentConfig, default: Grid) -> np.ndarray:
    return (config.grid or default).values()


def _run_spectra(config: ExperimentConfig) -> dict:
    spec = config.ensemble
    N, n = spec.dim, spec.n

    def one(i):
        facs = sampling.product_chain(spec, "square_induced", sampling.stream_rng(config.seed, i))
        sv = sampling.squared_singular_values(facs, beta=spec.beta, log=True)
        lm, _ = sampling.eigenvalues(facs, beta=spec.beta, log=True)
        if spec.beta == 4:
            lm = lm[: N]
        return sv, lm

    parts = _realizations(config, one)
    x = np.exp(np.concatenate([p[0] for p in parts]) - n * math.log(N))
    r = np.exp(np.concatenate([p[1] for p in parts]) - 0.5 * n * math.log(N))
    edges = _grid(config, Grid(0.0, wishart.fc_support_edge(n), 31))
    h = histogram(x, edges)
    stats = {
        "ks_singular_fc": ks_statistic(x, lambda t: fc_cdf(n, t)),
        "sup_singular_fc": compare(h, cdf=lambda t: fc_cdf(n, t)).sup_norm,
        "ks_modulus_macro": ks_statistic(r, lambda t: eigen.macro_radial_cdf(n, t)),
        "values": int(x.size),
        "dropped": h.dropped,
    }
    return {"histogram": asdict(h), "stats": stats,
            "samples": {"singular_rescaled": x.tolist(), "modulus_rescaled": r.tolist()}}


def _wishart_model(config: ExperimentConfig):
    spec = config.ensemble
    if spec.beta != 2:
        raise ValidationError("finite-N singular-value formulas are available for beta=2 only")
    return wishart.WishartModel(spec.dim, spec.charges)


def _run_density(config: ExperimentConfig) -> dict:
    model = _wishart_model(config)
    x = _grid(config, Grid(0.01, 4.0 * model.N ** model.n, 200))
    if np.any(x <= 0):
        raise ValidationError("density grid must be positive")
    y = wishart.kernel(model.N, x, x, model)
    return {"columns": ["x", "value"], "rows": [[a, b] for a, b in zip(x.tolist(), np.atleast_1d(y).tolist())]}


def _run_kernel(config: ExperimentConfig) -> dict:
    model = _wishart_model(config)
    g = _grid(config, Grid(0.1, 5.0, 20))
    if np.any(g <= 0):
        raise ValidationError("kernel grid must be positive")
    X, Y = np.meshgrid(g, g, indexing="ij")
    K = wishart.kernel(model.N, X, Y, model)
    return {"columns": ["x", "y", "value"],
            "rows": [[a, b, c] for a, b, c in zip(X.ravel().tolist(), Y.ravel().tolist(), K.ravel().tolist())]}


def _run_fc(config: ExperimentConfig) -> dict:
    n = config.ensemble.n
    x = _grid(config, Grid(0.0, wishart.fc_support_edge(n), 101))
    y = np.asarray(wishart.fc_density(n, x), dtype=float)
    return {"columns": ["x", "value"], "rows": [[a, b] for a, b in zip(x.tolist(), y.tolist())]}


def _run_mutual_info(config: ExperimentConfig) -> dict:
    n = config.ensemble.n
    g = _grid(config, Grid(0.01, 100.0, 41, True))
    vals = [wishart.mutual_info(n, float(s)) for s in g]
    return {"columns": ["snr", "value"], "rows": [[a, b] for a, b in zip(g.tolist(), vals)]}


def _run_real_prob(config: ExperimentConfig) -> dict:
    spec = config.ensemble
    if spec.beta != 1:
        raise ValidationError("real-prob needs beta=1")
    p = eigen.prob_all_real(eigen.EigenModel(1, spec.dim, spec.charges))
    stats = {"analytic": p}
    if config.samples:
        res = _batch(config, "eig")
        hits = sum(r.real_count == spec.dim for r in res)
        stats.update(empirical=hits / config.samples, successes=hits,
                     binomial_z=binomial_z(hits, config.samples, p))
    return {"columns": ["quantity", "value"], "rows": [["prob_all_real", p]], "stats": stats}


def _batch(config: ExperimentConfig, kind: str) -> list:
    spec = config.ensemble
    if config.parallel_width == 1:
        return sampling.finite_time_exponents_batch(spec, config.seed, range(config.samples), kind=kind)
    chunks = [range(i, min(i + 64, config.samples)) for i in range(0, config.samples, 64)]
    with ThreadPoolExecutor(max_workers=config.parallel_width) as pool:
        parts = pool.map(lambda c: sampling.finite_time_exponents_batch(spec, config.seed, c, kind=kind), chunks)
        return [r for p in parts for r in p]


def _run_lyapunov(config: ExperimentConfig) -> dict:
    from . import asymptotics
    from scipy import stats as st

    spec = config.ensemble
    res = _batch(config, "both")
    lam = np.array([r.lyapunov for r in res])
    zeta = np.array([r.stability for r in res])
    same = len(set(spec.charges)) == 1
    rows, stats = [], {}
    for k in range(1, spec.dim + 1):
        row = [k, lam[:, k - 1].mean(), lam[:, k - 1].std(ddof=1) if len(res) > 1 else 0.0,
               zeta[:, k - 1].mean(), zeta[:, k - 1].std(ddof=1) if len(res) > 1 else 0.0]
        if same:
            law = asymptotics.exponent_law(spec.beta, float(spec.charges[0]), k)
            w = law.width(spec.n)
            row += [law.mu, w]
            if len(res) > 1:
                stats[f"ks_lyapunov_{k}"] = float(st.kstest((lam[:, k - 1] - law.mu) / w, "norm").statistic)
                stats[f"ks_stability_{k}"] = float(st.kstest((zeta[:, k - 1] - law.mu) / w, "norm").statistic)
        else:
            row += [math.nan, math.nan]
        rows.append(row)
    stats["real_fraction"] = sum(r.real_count == spec.dim for r in res) / len(res) if spec.beta == 1 else None
    return {"columns": ["k", "lyapunov_mean", "lyapunov_sd", "stability_mean", "stability_sd", "mu", "width"],
            "rows": rows, "stats": stats, "samples": {"lyapunov": lam.tolist(), "stability": zeta.tolist()}}


def _run_verify(config: ExperimentConfig) -> dict:
    from . import checks

    res = checks.run_checks()
    rows = [[r.module, r.name, r.kind, "PASS" if r.ok else "FAIL", r.detail] for r in res]
    failed = sum(not r.ok for r in res)
    return {"columns": ["module", "check", "kind", "status", "detail"], "rows": rows,
            "stats": {"passed": len(res) - failed, "failed": failed}}


_RUNNERS = {
    "spectra": _run_spectra,
    "density-curve": _run_density,
    "kernel-grid": _run_kernel,
    "fc": _run_fc,
    "mutual-info": _run_mutual_info,
    "real-prob": _run_real_prob,
    "lyapunov": _run_lyapunov,
    "verify": _run_verify,
}


def run_experiment(config: ExperimentConfig) -> ResultBundle:
    """Run one experiment; the result depends only on the serialized config."""
    t0 = time.perf_counter()
    out = _RUNNERS[config.experiment](config)
    cfg = config.to_dict()
    return ResultBundle(
        experiment=config.experiment,
        config=cfg,
        config_hash=config_hash(cfg),
        columns=out.get("columns", []),
        rows=_plain(out.get("rows", [])),
        histogram=_plain(out.get("histogram")),
        samples=_plain(out.get("samples")),
        stats=_plain(out.get("stats", {})),
        metadata={"package_version": __version__},
        wall_clock=time.perf_counter() - t0,
    )


# ----------------------------------------------------------------- output


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, bool) or v is None:
        return str(v)
    if isinstance(v, int):
        return str(v)
    return format(float(v), ".17g")


def _csv_text(bundle: ResultBundle) -> str:
    lines = [f"# experiment={bundle.experiment}", f"# config_hash={bundle.config_hash}",
             f"# config={_canonical(bundle.config)}"]
    if bundle.stats:
        lines.append(f"# stats={_canonical(bundle.stats)}")
    if bundle.histogram is not None:
        h = bundle.histogram
        lines.append("bin_left,bin_right,count,density")
        for i, c in enumerate(h["counts"]):
            lines.append(",".join(_fmt(v) for v in (h["edges"][i], h["edges"][i + 1], c, h["density"][i])))
    else:
        lines.append(",".join(bundle.columns))
        for row in bundle.rows:
            lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _json_text(bundle: ResultBundle) -> str:
    return json.dumps(bundle.to_dict(), sort_keys=True, indent=1, allow_nan=True) + "\n"


def emit(bundle: ResultBundle, format: str, path) -> None:
    """Write ``bundle`` as CSV or JSON; identical bundles give identical bytes."""
    if format not in ("csv", "json"):
        raise ValidationError("format must be csv or json")
    text = _csv_text(bundle) if format == "csv" else _json_text(bundle)
    with open(Path(path), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def load_bundle(path) -> ResultBundle:
    """Read a bundle written by ``emit(..., "json", path)``."""
    with open(Path(path), encoding="utf-8") as fh:
        d = json.load(fh)
    return ResultBundle(**d)
