import csv

import numpy as np
import pytest

import atrfs.bench as bench
from atrfs.bench import (
    EvaluationReport,
    RunConfig,
    emit_csv,
    prepare_split,
    run_benchmark,
    time_ranking,
)
from atrfs.errors import ConfigurationError
from atrfs.metrics import METRICS

from conftest import synthetic_xy, write_arff


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def cfg_for(path, **kw):
    kw.setdefault("methods", ["ATR", "SCLS"])
    kw.setdefault("n_max", 4)
    return RunConfig(datasets=[f"{path}:3"], **kw)


class TestRunConfig:
    def test_defaults(self):
        cfg = RunConfig()
        assert (cfg.n_max, cfg.tau, cfg.time_budget_seconds) == (50, 6, 14400.0)

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            RunConfig(n_max=0)
        with pytest.raises(ConfigurationError):
            RunConfig(time_budget_seconds=0)
        with pytest.raises(ValueError):
            RunConfig(methods="ATR,BOGUS")

    def test_from_file(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text("# grid\ndatasets = a.arff:6, b.arff\nmethods = ATR, ppt-mi\nn_max = 7\nknn_s = 0.5\n")
        cfg = RunConfig.from_mapping(RunConfig.read_file(p))
        assert cfg.datasets == ["a.arff:6", "b.arff"]
        assert cfg.methods == ["ATR", "PPT_MI"]
        assert cfg.n_max == 7 and cfg.knn_s == 0.5

    def test_unknown_key(self):
        with pytest.raises(ConfigurationError):
            RunConfig.from_mapping({"nmax": "3"})

    def test_output_dir_env(self, monkeypatch, tmp_path):
        monkeypatch.setenv(bench.OUTPUT_DIR_ENV, str(tmp_path))
        assert RunConfig(output_dir="elsewhere").resolved_output_dir() == tmp_path


class TestRun:
    def test_reports_and_prefix_property(self, synth_arff):
        reports = run_benchmark(cfg_for(synth_arff))
        assert [(r.dataset, r.method, r.status) for r in reports] == [
            ("synth", "ATR", "ok"), ("synth", "SCLS", "ok")]
        for r in reports:
            assert len(r.curves) == 4 and len(r.order) == 4
            assert r.ranking_seconds >= 0

    def test_single_prefix_has_zero_std(self, synth_arff):
        (r,) = run_benchmark(cfg_for(synth_arff, methods=["IGMF"], n_max=1))
        assert all(std == 0.0 for _, std in r.summary().values() if std is not None)

    def test_timeout(self, tmp_path):
        X, Y = synthetic_xy(1, m=100, nf=260, nl=5)
        p = write_arff(tmp_path / "wide.arff", X, Y)
        cfg = RunConfig(datasets=[f"{p}:5"], methods=["PMU"], time_budget_seconds=0.001)
        (r,) = run_benchmark(cfg)
        assert r.status == "timeout" and r.order == []

    def test_bad_dataset_only_fails_its_cells(self, synth_arff, tmp_path):
        cfg = RunConfig(datasets=[str(tmp_path / "missing.arff:3"), f"{synth_arff}:3"],
                        methods=["ATR"], n_max=2)
        reports = run_benchmark(cfg)
        assert [r.status for r in reports] == ["error", "ok"]

    def test_provided_split_used(self, tmp_path):
        X, Y = synthetic_xy(2)
        write_arff(tmp_path / "pair-train.arff", X[:60], Y[:60])
        write_arff(tmp_path / "pair-test.arff", X[60:], Y[60:])
        sp = prepare_split(f"{tmp_path / 'pair-train.arff'}:3", RunConfig())
        assert sp.origin == "provided-split"
        assert (sp.train.n_instances, sp.test.n_instances) == (60, 30)

    def test_seeded_split_is_sixty_forty(self, synth_arff):
        sp = prepare_split(f"{synth_arff}:3", RunConfig(seed=4))
        assert sp.origin == "seeded-random" and sp.test.n_instances == 36

    def test_ranking_reads_only_training_part(self, synth_arff, monkeypatch):
        cfg = cfg_for(synth_arff, methods=["ATR", "PMU", "IGMF"])
        sp = prepare_split(cfg.datasets[0], cfg)
        seen = []
        real_cache, real_ctx = bench.build_cache, bench.SelectorContext

        def spy_cache(ds, **kw):
            seen.append(ds)
            return real_cache(ds, **kw)

        def spy_ctx(ds, *a, **kw):
            seen.append(ds)
            return real_ctx(ds, *a, **kw)

        monkeypatch.setattr(bench, "prepare_split", lambda entry, c: sp)
        monkeypatch.setattr(bench, "build_cache", spy_cache)
        monkeypatch.setattr(bench, "SelectorContext", spy_ctx)
        run_benchmark(cfg)
        assert seen and all(ds is sp.train for ds in seen)


class TestEmit:
    def test_files(self, synth_arff, tmp_path):
        reports = run_benchmark(cfg_for(synth_arff))
        reports.append(EvaluationReport("other", "PMU", "timeout"))
        emit_csv(reports, tmp_path)
        m = rows(tmp_path / "metrics.csv")
        assert len(m) == 3 * len(METRICS)
        timeout = [r for r in m if r["status"] == "timeout"]
        assert timeout and all(r["mean"] == "" and r["std"] == "" for r in timeout)
        t = rows(tmp_path / "timings.csv")
        assert len(t) == 3
        curve = rows(tmp_path / "curves" / "synth_ATR.csv")
        assert [int(r["feature_index"]) for r in curve] == reports[0].order

    def test_two_by_two_timings(self, tmp_path):
        for i, name in enumerate(("a", "b")):
            write_arff(tmp_path / f"{name}.arff", *synthetic_xy(i))
        cfg = RunConfig(datasets=[f"{tmp_path / 'a.arff'}:3", f"{tmp_path / 'b.arff'}:3"],
                        methods=["ATR", "IGMF"], n_max=2)
        emit_csv(run_benchmark(cfg), tmp_path / "out")
        assert len(rows(tmp_path / "out" / "timings.csv")) == 4

    def test_rerun_is_identical(self, synth_arff, tmp_path):
        cfg = cfg_for(synth_arff, methods=["ATR", "LRFS"])
        emit_csv(run_benchmark(cfg), tmp_path / "a")
        emit_csv(run_benchmark(cfg), tmp_path / "b")
        assert (tmp_path / "a" / "metrics.csv").read_bytes() == (tmp_path / "b" / "metrics.csv").read_bytes()

    def test_empty(self, tmp_path):
        with pytest.raises(ValueError):
            emit_csv([], tmp_path)


def test_time_ranking(synth_arff):
    train = prepare_split(f"{synth_arff}:3", RunConfig()).train
    t = time_ranking("ATR", train, repeats=3)
    assert len(t.runs) == 3
    assert t.mean_seconds == pytest.approx(np.mean(t.runs))
    assert 0 < t.cache_seconds <= t.mean_seconds


@pytest.mark.slow
@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_triple_interaction_methods_cost_more_on_birds_shape():
    # same shape as birds (645 x 260, 19 labels) but synthetic values
    from atrfs.dataset import MultiLabelDataset, discretize

    X, Y = synthetic_xy(3, m=645, nf=260, nl=19)
    ds = discretize(MultiLabelDataset("birds-shaped", X, Y), 5)
    atr = time_ranking("ATR", ds, repeats=1).mean_seconds
    d2f = time_ranking("D2F", ds, repeats=1).mean_seconds
    assert d2f >= 5 * atr
