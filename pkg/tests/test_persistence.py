import json

import numpy as np
import pytest

from evsvm.errors import ModelFormatError
from evsvm.evaluation import RunConfig, evaluate
from evsvm.multiclass import train_multiclass
from evsvm.persistence import dumps_model, load_model, loads_model, model_to_dict, save_model
from evsvm.svm import Kernel


@pytest.fixture(scope="module")
def trained():
    rng = np.random.default_rng(0)
    X = np.vstack([rng.normal(c, 1.0, (30, 3)) for c in ([0, 0, 0], [3, 0, 0], [0, 3, 0])])
    y = np.repeat(["a", "b", "c"], 30)
    return train_multiclass(X, y, "ovo", Kernel.rbf(0.3)), X, y


def resign(doc):
    """Recompute the checksum so a tampered document reaches field validation."""
    from evsvm.persistence import _checksum
    doc = dict(doc)
    doc.pop("checksum", None)
    doc["checksum"] = _checksum(doc)
    return doc


class TestRoundTrip:
    @pytest.mark.parametrize("strategy,kernel", [("ovo", Kernel.rbf(0.3)), ("ovr", Kernel.polynomial(2)),
                                                 ("ovo", Kernel.linear())])
    def test_decision_values_preserved(self, tmp_path, strategy, kernel):
        rng = np.random.default_rng(1)
        X = np.vstack([rng.normal(c, 1.0, (20, 2)) for c in ([0, 0], [3, 0], [0, 3])])
        y = np.repeat(["a", "b", "c"], 20)
        model = train_multiclass(X, y, strategy, kernel)
        save_model(model, tmp_path / "m.json")
        back = load_model(tmp_path / "m.json")
        pts = rng.normal(1, 2, (100, 2))
        np.testing.assert_allclose(back.decision_values(pts), model.decision_values(pts), rtol=0, atol=1e-12)
        assert back.frame == model.frame and back.strategy == strategy and back.kernel == kernel

    def test_report_bytes(self, trained, tmp_path):
        model, X, y = trained
        save_model(model, tmp_path / "m.json")
        back = load_model(tmp_path / "m.json")
        cfg = RunConfig("process-12", 0.6)
        assert evaluate(back, X, y, cfg).to_csv() == evaluate(model, X, y, cfg).to_csv()

    def test_dumps_stable(self, trained):
        model = trained[0]
        assert dumps_model(model) == dumps_model(loads_model(dumps_model(model)))


class TestCorruption:
    def test_checksum(self, trained):
        doc = model_to_dict(trained[0])
        doc["classifiers"][0]["bias"] += 1.0
        with pytest.raises(ModelFormatError, match="checksum"):
            loads_model(json.dumps(doc))

    def test_version(self, trained):
        doc = resign(model_to_dict(trained[0]))
        doc["version"] = 99
        with pytest.raises(ModelFormatError, match="version"):
            loads_model(json.dumps(doc))

    def test_names_bad_field(self, trained):
        doc = model_to_dict(trained[0])
        doc["classifiers"][1]["bias"] = "oops"
        with pytest.raises(ModelFormatError, match=r"classifiers\[1\]\.bias"):
            loads_model(json.dumps(resign(doc)))

    def test_missing_field(self, trained):
        doc = model_to_dict(trained[0])
        del doc["classifiers"][0]["dual_coefs"]
        with pytest.raises(ModelFormatError, match="dual_coefs"):
            loads_model(json.dumps(resign(doc)))

    def test_truncated(self, trained):
        text = dumps_model(trained[0])
        with pytest.raises(ModelFormatError, match="truncated"):
            loads_model(text[: len(text) // 2])

    def test_wrong_format(self):
        with pytest.raises(ModelFormatError, match="format"):
            loads_model(json.dumps({"format": "other"}))
