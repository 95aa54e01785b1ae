import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmtprod import checks, harness, wishart
from rmtprod.cli import main
from rmtprod.errors import DomainError, ValidationError
from rmtprod.harness import ExperimentConfig, Grid, compare, histogram, run_experiment
from rmtprod.sampling import EnsembleSpec


# -------------------------------------------------------------------- grid


def test_grid_parse():
    g = Grid.parse("0.1:10:5:log")
    np.testing.assert_allclose(g.values(), [0.1, 0.316227766, 1, 3.16227766, 10], rtol=1e-8)
    assert Grid.parse("0:1:3").values().tolist() == [0.0, 0.5, 1.0]


@pytest.mark.parametrize("text", ["1:0:5", "0:1:1", "0:1", "0:1:3:lin", "a:1:3", "0:1:3:log", "0:inf:3"])
def test_grid_parse_rejects(text):
    with pytest.raises(ValidationError):
        Grid.parse(text)


# ------------------------------------------------------------------ config


@pytest.mark.parametrize("kwargs", [dict(experiment="nope"), dict(experiment="spectra", samples=0),
                                    dict(experiment="fc", samples=-1), dict(experiment="fc", seed=-1),
                                    dict(experiment="fc", parallel_width=0), dict(experiment="fc", format="xml")])
def test_config_validation(kwargs):
    with pytest.raises(ValidationError):
        ExperimentConfig(**kwargs)


def test_config_hash_tracks_content_only():
    a = ExperimentConfig("lyapunov", EnsembleSpec(2, 2, (0, 0)), samples=5, seed=1)
    b = ExperimentConfig("lyapunov", EnsembleSpec(2, 2, (0, 0)), samples=5, seed=1, parallel_width=4, output="x")
    c = ExperimentConfig("lyapunov", EnsembleSpec(2, 2, (0, 0)), samples=5, seed=2)
    assert harness.config_hash(a) == harness.config_hash(b) != harness.config_hash(c)
    assert harness.config_hash(a) == harness.config_hash(a.to_dict())


# --------------------------------------------------------------- histogram


def test_histogram_counts_and_drops():
    h = histogram([0.0, 0.5, 0.99, 1.0, 1.5, -1, 2.0], [0.0, 1.0, 2.0])
    assert h.counts == [3, 2] and h.dropped == 2
    assert float(np.sum(np.asarray(h.density) * h.widths)) == pytest.approx(1.0)
    assert not h.empty


def test_histogram_empty_and_errors():
    h = histogram([5.0], [0.0, 1.0])
    assert h.empty and h.counts == [0] and h.dropped == 1
    with pytest.raises(ValidationError):
        histogram([1.0], [1.0, 0.0])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=1, max_size=200), st.integers(2, 20))
def test_histogram_conserves_counts(data, bins):
    h = histogram(data, np.linspace(-5, 5, bins + 1))
    assert sum(h.counts) + h.dropped == len(data)


# ---------------------------------------------------------------- compare


def test_compare_uniform_samples():
    x = np.random.default_rng(0).random(20000)
    assert compare(x, cdf=lambda t: np.clip(t, 0, 1)).ks < 0.015
    h = histogram(x, np.linspace(0, 1, 11))
    assert compare(h, density=lambda t: np.ones_like(t)).sup_norm < 0.1
    assert compare(h, cdf=lambda t: t).sup_norm == pytest.approx(compare(h, density=lambda t: np.ones_like(t)).sup_norm)


def test_compare_ks_exact_small_case():
    # samples 0.25 and 0.75 against U(0,1): sup deviation 0.25
    assert harness.ks_statistic([0.25, 0.75], lambda t: t) == pytest.approx(0.25)


def test_compare_callables_and_errors():
    assert compare(lambda t: t ** 2, cdf=lambda t: t, domain=(0, 1)).ks == pytest.approx(0.25, abs=1e-6)
    with pytest.raises(ValidationError):
        compare(lambda t: t, cdf=lambda t: t)
    with pytest.raises(DomainError):
        compare([2.0], cdf=lambda t: t, domain=(0, 1))
    with pytest.raises(DomainError):
        compare(histogram([5.0], [4.0, 6.0]), density=lambda t: t, domain=(0, 1))
    with pytest.raises(ValidationError):
        compare(histogram([0.5], [0.0, 1.0]))


def test_binomial_z():
    assert harness.binomial_z(50, 100, 0.5) == 0.0
    assert harness.binomial_z(60, 100, 0.5) == pytest.approx(2.0)
    assert harness.binomial_z(10, 10, 1.0) == 0.0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_fc_cdf(n):
    K = wishart.fc_support_edge(n)
    assert harness.fc_cdf(n, 0.0) == 0.0 and harness.fc_cdf(n, K) == 1.0
    x = 0.4 * K
    q = integrate_fc(n, x)
    assert harness.fc_cdf(n, x) == pytest.approx(q, abs=1e-6)
    if n == 1:
        # Marchenko–Pastur CDF at x = 2 is ½ + 1/π
        assert harness.fc_cdf(1, 2.0) == pytest.approx(0.5 + 1 / math.pi, abs=1e-6)


def integrate_fc(n, x):
    from rmtprod.quad import integrate

    u1 = (x / wishart.fc_support_edge(n)) ** (1 / (n + 1))
    K = wishart.fc_support_edge(n)
    return integrate(lambda u: wishart.fc_density(n, K * u ** (n + 1)) * (n + 1) * K * u ** n, 0.0, u1, rtol=1e-11)


# ------------------------------------------------------------- experiments


def test_fc_experiment_value_at_two():
    cfg = ExperimentConfig("fc", EnsembleSpec(2, 2, (0, 0)), grid=Grid(0.0, 6.75, 101))
    b = run_experiment(cfg)
    assert b.columns == ["x", "value"] and len(b.rows) == 101
    x = np.array([r[0] for r in b.rows])
    i = int(np.argmin(np.abs(x - 2.0)))
    assert b.rows[i][1] == pytest.approx(float(wishart.fc_density(2, x[i])), rel=1e-12)
    assert wishart.fc_density(2, 2.0) == pytest.approx(float(wishart.fc_density(2, 2.0, form="trig")), rel=1e-8)


def test_density_and_kernel_experiments():
    spec = EnsembleSpec(2, 3, (0, 1))
    b = run_experiment(ExperimentConfig("density-curve", spec, grid=Grid(0.5, 2.0, 4)))
    m = wishart.WishartModel(3, (0, 1))
    assert [r[1] for r in b.rows] == pytest.approx(list(wishart.kernel(3, np.linspace(0.5, 2, 4),
                                                                       np.linspace(0.5, 2, 4), m)))
    k = run_experiment(ExperimentConfig("kernel-grid", spec, grid=Grid(0.5, 2.0, 3)))
    assert len(k.rows) == 9 and k.columns == ["x", "y", "value"]
    with pytest.raises(ValidationError):
        run_experiment(ExperimentConfig("density-curve", EnsembleSpec(1, 3, (0,))))


def test_mutual_info_experiment():
    b = run_experiment(ExperimentConfig("mutual-info", EnsembleSpec(2, 2, (0, 0)), grid=Grid(1.0, 10.0, 2)))
    assert b.rows[1][1] == pytest.approx(wishart.mutual_info(2, 10.0))


def test_real_prob_experiment():
    b = run_experiment(ExperimentConfig("real-prob", EnsembleSpec(1, 2, (0,)), samples=400, seed=3))
    assert b.stats["analytic"] == pytest.approx(2 ** -0.5)
    assert abs(b.stats["binomial_z"]) < 4
    with pytest.raises(ValidationError):
        run_experiment(ExperimentConfig("real-prob", EnsembleSpec(2, 2, (0,))))


def test_spectra_experiment():
    b = run_experiment(ExperimentConfig("spectra", EnsembleSpec(2, 20, (0, 0)), samples=20, seed=5))
    assert b.stats["values"] == 400
    assert b.stats["ks_singular_fc"] < 0.1 and b.stats["ks_modulus_macro"] < 0.1
    assert sum(b.histogram["counts"]) + b.histogram["dropped"] == 400


def test_lyapunov_experiment_threads_deterministic():
    spec = EnsembleSpec(2, 2, (0,) * 10)
    a = run_experiment(ExperimentConfig("lyapunov", spec, samples=150, seed=9))
    b = run_experiment(ExperimentConfig("lyapunov", spec, samples=150, seed=9, parallel_width=3))
    assert a == b
    assert a.config_hash == b.config_hash
    assert a.columns[:3] == ["k", "lyapunov_mean", "lyapunov_sd"]


def test_spectra_threads_deterministic():
    spec = EnsembleSpec(1, 4, (0, 2))
    a = run_experiment(ExperimentConfig("spectra", spec, samples=6, seed=2))
    b = run_experiment(ExperimentConfig("spectra", spec, samples=6, seed=2, parallel_width=4))
    assert a.samples == b.samples and a.stats == b.stats


# ------------------------------------------------------------------ output


def _bundle():
    return run_experiment(ExperimentConfig("lyapunov", EnsembleSpec(1, 2, (0, 0, 0)), samples=30, seed=4))


def test_emit_is_byte_stable(tmp_path):
    for fmt in ("csv", "json"):
        harness.emit(_bundle(), fmt, tmp_path / f"a.{fmt}")
        harness.emit(_bundle(), fmt, tmp_path / f"b.{fmt}")
        assert (tmp_path / f"a.{fmt}").read_bytes() == (tmp_path / f"b.{fmt}").read_bytes()


def test_json_round_trip(tmp_path):
    b = _bundle()
    harness.emit(b, "json", tmp_path / "r.json")
    back = harness.load_bundle(tmp_path / "r.json")
    assert back == b
    assert json.loads((tmp_path / "r.json").read_text())["config_hash"] == b.config_hash


def test_csv_layout(tmp_path):
    b = run_experiment(ExperimentConfig("fc", EnsembleSpec(2, 2, (0,)), grid=Grid(0.5, 1.0, 2)))
    harness.emit(b, "csv", tmp_path / "f.csv")
    lines = (tmp_path / "f.csv").read_text().splitlines()
    assert lines[0] == "# experiment=fc" and lines[1] == f"# config_hash={b.config_hash}"
    assert lines[3] == "x,value"
    assert float(lines[4].split(",")[1]) == b.rows[0][1]
    h = run_experiment(ExperimentConfig("spectra", EnsembleSpec(2, 3, (0,)), samples=2, seed=1))
    harness.emit(h, "csv", tmp_path / "h.csv")
    assert "bin_left,bin_right,count,density" in (tmp_path / "h.csv").read_text()
    with pytest.raises(ValidationError):
        harness.emit(b, "xml", tmp_path / "f.xml")


# --------------------------------------------------------------------- CLI


def test_cli_fc_stdout(capsys):
    assert main(["fc", "--factors", "2", "--grid", "0:6.75:101"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# experiment=fc")
    assert len(out.strip().splitlines()) == 4 + 101


def test_cli_writes_json(tmp_path):
    path = tmp_path / "o.json"
    assert main(["lyapunov", "--beta", "1", "--dim", "2", "--factors", "3", "--samples", "10",
                 "--seed", "1", "--out", str(path), "--format", "json"]) == 0
    assert harness.load_bundle(path).experiment == "lyapunov"


@pytest.mark.parametrize("argv", [["bogus"], ["fc", "--beta", "3"], ["fc", "--grid", "1:0:3"],
                                  ["fc", "--charges", "a,b"], ["fc", "--charges", "0,1", "--factors", "3"],
                                  ["spectra", "--samples", "0"], ["density", "--beta", "1"],
                                  ["fc", "--charges", "2,1"]])
def test_cli_validation_exit_code(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_cli_verify_failure_exit_code(monkeypatch, capsys):
    bad = checks.Check("always fails", "harness", "tolerance", lambda: (False, "forced"))
    monkeypatch.setattr(checks, "CHECKS", [bad])
    assert main(["verify"]) == 3
    assert "FAIL [tolerance] harness: always fails" in capsys.readouterr().err


def test_run_checks_catches_exceptions(monkeypatch):
    def boom():
        raise RuntimeError("x")

    monkeypatch.setattr(checks, "CHECKS", [checks.Check("boom", "m", "tolerance", boom)])
    out = checks.run_checks()
    assert not out[0].ok and "RuntimeError" in out[0].detail


def test_check_suite_labels():
    kinds = {c.kind for c in checks.CHECKS}
    assert kinds <= {"tolerance", "trend", "statistical"}
    assert {c.module for c in checks.CHECKS} == {"specfun", "sampling", "wishart", "eigen", "asymptotics"}
    names = [c.name for c in checks.CHECKS]
    assert len(names) == len(set(names))
    assert sum(c.kind == "trend" for c in checks.CHECKS) >= 2
