"""Datasets: CSV I/O, seeded Gaussian generation and train/test splits.

CSV layout: header ``f0,...,f{d-1},label``, one sample per line, ``.``
decimal separator, labels unquoted.
"""

from __future__ import annotations

import io
import math
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .belief import Frame
from .errors import DataError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    frame: Frame

    def __post_init__(self):
        if self.features.ndim != 2 or self.features.shape[0] < 1:
            raise DataError("dataset needs a non-empty 2-D feature matrix")
        if self.labels.shape != (self.features.shape[0],):
            raise DataError("one label per sample required")

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def __len__(self):
        return self.features.shape[0]

    @property
    def learned(self) -> np.ndarray:
        """Boolean mask of samples whose label belongs to the frame."""
        return np.isin(self.labels, self.frame.labels)

    @property
    def unlearned_labels(self) -> tuple:
        seen = dict.fromkeys(self.labels.tolist())
        return tuple(sorted(lab for lab in seen if lab not in self.frame))

    def subset(self, idx) -> "Dataset":
        return Dataset(self.features[idx], self.labels[idx], self.frame)

    def training_part(self) -> "Dataset":
        return self.subset(self.learned)


def _format_float(v: float) -> str:
    return repr(float(v))


def dataset_to_csv(ds: Dataset) -> str:
    out = io.StringIO()
    out.write(",".join([f"f{i}" for i in range(ds.dim)] + ["label"]) + "\n")
    for row, lab in zip(ds.features, ds.labels):
        out.write(",".join([_format_float(v) for v in row] + [str(lab)]) + "\n")
    return out.getvalue()


def save_dataset(ds: Dataset, path) -> None:
    Path(path).write_text(dataset_to_csv(ds), encoding="utf-8")


def read_frame_file(path) -> Frame:
    """One class label per non-blank line."""
    names = [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines()]
    names = [n for n in names if n and not n.startswith("#")]
    if not names:
        raise DataError(f"{path}: frame file lists no classes")
    return Frame(names)


def parse_dataset(text: str, frame: Optional[Frame] = None, source: str = "<string>") -> Dataset:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise DataError(f"{source}: empty file")
    header = [h.strip() for h in lines[0].split(",")]
    if len(header) < 2 or header[-1] != "label":
        raise DataError(f"{source}:1: header must be f0,...,f{{d-1}},label")
    d = len(header) - 1
    feats, labels = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != d + 1:
            raise DataError(f"{source}:{lineno}: expected {d + 1} fields, got {len(parts)}")
        try:
            row = [float(p) for p in parts[:d]]
        except ValueError:
            raise DataError(f"{source}:{lineno}: non-numeric feature value") from None
        if not all(math.isfinite(v) for v in row):
            raise DataError(f"{source}:{lineno}: non-finite feature value")
        lab = parts[d].strip()
        if not lab:
            raise DataError(f"{source}:{lineno}: empty label")
        feats.append(row)
        labels.append(lab)
    if not feats:
        raise DataError(f"{source}: no data rows")
    labels = np.array(labels, dtype=object).astype(str)
    if frame is None:
        frame = Frame(sorted(set(labels.tolist())))
    return Dataset(np.array(feats), labels, frame)


def load_dataset(path, frame_path=None) -> Dataset:
    """Read a dataset CSV; with ``frame_path`` the learned classes come from that file."""
    frame = read_frame_file(frame_path) if frame_path else None
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError:
        raise DataError(f"{path}: not UTF-8 text") from None
    return parse_dataset(text, frame, str(path))


@dataclass(frozen=True)
class ClassSpec:
    name: str
    mean: tuple
    var: tuple
    count: int
    learned: bool = True


def parse_synth_spec(spec: dict) -> list:
    """Validate a synthetic-data spec (as loaded from TOML)."""
    classes = spec.get("classes")
    if not classes:
        raise DataError("synthetic spec needs a non-empty [[classes]] list")
    out = []
    dim = None
    for k, c in enumerate(classes):
        where = f"classes[{k}]"
        try:
            name = str(c["name"])
            mean = tuple(float(v) for v in c["mean"])
            var = c.get("var", 1.0)
            var = tuple(float(v) for v in var) if isinstance(var, list) else (float(var),) * len(mean)
            count = int(c["count"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"{where}: {exc}") from None
        if dim is None:
            dim = len(mean)
        if len(mean) != dim or len(var) != dim or dim == 0:
            raise DataError(f"{where}: mean/var must all have dimension {dim}")
        if any(not v > 0 for v in var):
            raise DataError(f"{where}: variances must be positive")
        if count <= 0:
            raise DataError(f"{where}: count must be positive")
        out.append(ClassSpec(name, mean, var, count, bool(c.get("learned", True))))
    if len({c.name for c in out}) != len(out):
        raise DataError("class names must be unique")
    return out


def load_synth_spec(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise DataError(f"{path}: {exc}") from None


def benchmark_spec() -> dict:
    """The bundled 4-class benchmark (3 learned Gaussians plus a displaced unlearned one)."""
    text = resources.files("evsvm").joinpath("benchmark.toml").read_text(encoding="utf-8")
    return tomllib.loads(text)


def generate_synthetic(spec: dict, seed: int = 0) -> Dataset:
    """Sample each class from its diagonal Gaussian, in spec order."""
    classes = parse_synth_spec(spec)
    rng = np.random.default_rng(seed)
    feats, labels = [], []
    for c in classes:
        feats.append(rng.normal(c.mean, np.sqrt(c.var), size=(c.count, len(c.mean))))
        labels += [c.name] * c.count
    frame = Frame([c.name for c in classes if c.learned])
    return Dataset(np.vstack(feats), np.array(labels, dtype=str), frame)


def train_test_split(ds: Dataset, ratio: float = 2 / 3, seed: int = 0,
                     train_unlearned: bool = False):
    """Seeded shuffle per class; the first ``ratio`` of each learned class trains.

    Unlearned samples all go to the test set unless ``train_unlearned``.
    """
    if not 0 < ratio < 1:
        raise ValueError(f"ratio must be in (0, 1), got {ratio!r}")
    rng = np.random.default_rng(seed)
    train, test = [], []
    for lab in sorted(set(ds.labels.tolist())):
        idx = np.flatnonzero(ds.labels == lab)
        rng.shuffle(idx)
        if lab not in ds.frame and not train_unlearned:
            test.append(idx)
            continue
        k = int(round(ratio * idx.size))
        train.append(idx[:k])
        test.append(idx[k:])
    tr = np.sort(np.concatenate(train)) if train else np.array([], dtype=int)
    te = np.sort(np.concatenate(test))
    if tr.size == 0 or te.size == 0:
        raise DataError("split leaves an empty part")
    return ds.subset(tr), ds.subset(te)


def benchmark_datasets(seed: int = 0, spec: Optional[dict] = None, ratio: float = 2 / 3):
    """Generate the benchmark and split it; returns ``(train, test)``."""
    ds = generate_synthetic(spec if spec is not None else benchmark_spec(), seed)
    return train_test_split(ds, ratio, seed)
