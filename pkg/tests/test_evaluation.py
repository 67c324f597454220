import numpy as np
import pytest

from evsvm.evaluation import REJECTING_RULES, RULES, RunConfig, evaluate, predict
from evsvm.multiclass import train_multiclass


@pytest.fixture(scope="module")
def separated():
    rng = np.random.default_rng(0)
    centres = {"a": [0, 0], "b": [10, 10], "c": [10, -10]}
    X = np.vstack([rng.normal(c, 1.0, (40, 2)) for c in centres.values()])
    y = np.repeat(list(centres), 40)
    model = train_multiclass(X[::2], y[::2], "ovo")
    return model, X[1::2], y[1::2]


@pytest.fixture(scope="module")
def with_outliers():
    rng = np.random.default_rng(1)
    X = np.vstack([rng.normal(c, 1.0, (40, 2)) for c in ([0, 0], [4, 0], [2, 3])])
    y = np.repeat(["a", "b", "c"], 40)
    models = {s: train_multiclass(X, y, s) for s in ("ovo", "ovr")}
    Xt = np.vstack([X, rng.normal([2, 1], 3.0, (30, 2))])
    yt = np.r_[y, ["z"] * 30]
    return models, Xt, yt


class TestRunConfig:
    def test_invalid(self):
        with pytest.raises(ValueError):
            RunConfig("coin")
        with pytest.raises(ValueError):
            RunConfig("appriou", 1.1)


class TestReport:
    @pytest.mark.parametrize("rule", RULES)
    def test_rows_sum_to_100(self, with_outliers, rule):
        models, X, y = with_outliers
        model = models["ovo" if rule == "vote" else "ovr"]
        rep = evaluate(model, X, y, RunConfig(rule, 0.6))
        np.testing.assert_allclose(rep.percentages.sum(axis=1), 100.0, atol=0.1)
        assert ("reject" in rep.column_labels) == (rule in REJECTING_RULES)
        assert rep.column_labels[:3] == ["a", "b", "c"]
        assert rep.rows == ["a", "b", "c", "z"]

    def test_diagonal_on_separated_data(self, separated):
        model, X, y = separated
        for rule in ("pignistic", "vote", "process-12"):
            rep = evaluate(model, X, y, RunConfig(rule, 0.6))
            for lab in "abc":
                assert rep.cell(lab, lab) >= 99.0

    def test_r0_is_whole_frame(self, with_outliers):
        models, X, y = with_outliers
        rep = evaluate(models["ovo"], X, y, RunConfig("appriou", 0.0))
        assert rep.column_labels == ["a", "b", "c", "{a,b,c}"]
        np.testing.assert_allclose(rep.percentages[:, -1], 100.0)

    def test_union_columns_ordered(self, with_outliers):
        models, X, y = with_outliers
        rep = evaluate(models["ovr"], X, y, RunConfig("appriou", 0.3))
        unions = [d for d in rep.columns if d.kind == "union"]
        keys = [(bin(d.mask).count("1"), d.mask) for d in unions]
        assert keys == sorted(keys)

    def test_conflict_nan_for_baselines(self, separated):
        model, X, _ = separated
        _, conf = predict(model, X[:5], RunConfig("vote"))
        assert np.isnan(conf).all()
        _, conf = predict(model, X[:5], RunConfig("pignistic"))
        assert np.all((conf >= 0) & (conf < 1))

    def test_renderings(self, with_outliers):
        models, X, y = with_outliers
        rep = evaluate(models["ovo"], X, y, RunConfig("process-12", 0.6))
        csv_lines = rep.to_csv().splitlines()
        assert csv_lines[0].startswith("true,a,b,c")
        assert csv_lines[0].endswith("reject,count")
        assert len(csv_lines) == 5
        text = rep.to_text()
        assert "r = 0.6" in text and "mean conflict" in text

    def test_baseline_strategy_mismatch(self, with_outliers):
        models, X, y = with_outliers
        with pytest.raises(ValueError):
            evaluate(models["ovr"], X, y, RunConfig("vote"))

    def test_length_mismatch(self, separated):
        model, X, y = separated
        with pytest.raises(ValueError):
            evaluate(model, X, y[:-1], RunConfig())
