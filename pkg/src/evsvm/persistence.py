"""Versioned JSON model files with a SHA-256 checksum over the payload."""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .belief import Frame
from .errors import ModelFormatError
from .multiclass import LAMBDA_MODES, BinaryMember, Calibration, EvidentialModel
from .svm import Kernel, SvmModel

FORMAT = "evsvm-model"
VERSION = 1


def _checksum(payload: dict) -> str:
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def model_to_dict(model: EvidentialModel) -> dict:
    payload = {
        "format": FORMAT,
        "version": VERSION,
        "frame": list(model.frame.labels),
        "strategy": model.strategy,
        "kernel": model.kernel.to_dict(),
        "C": model.C,
        "lambda_mode": model.lambda_mode,
        "classifiers": [
            {
                "scope": list(m.scope),
                "support_vectors": m.model.support_vectors.tolist(),
                "dual_coefs": m.model.dual_coefs.tolist(),
                "bias": m.model.bias,
                "lambda_p": m.calibration.lambda_p,
                "lambda_n": m.calibration.lambda_n,
                "alpha": m.calibration.alpha,
            }
            for m in model.members
        ],
    }
    payload["checksum"] = _checksum(payload)
    return payload


def dumps_model(model: EvidentialModel) -> str:
    return json.dumps(model_to_dict(model), indent=1, allow_nan=False) + "\n"


def save_model(model: EvidentialModel, path) -> None:
    Path(path).write_text(dumps_model(model), encoding="utf-8")


def _get(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise ModelFormatError(f"missing field {where}{key}")
    return obj[key]


def _number(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ModelFormatError(f"field {name} must be a finite number, got {value!r}")
    return float(value)


def _kernel(spec) -> Kernel:
    try:
        kind = _get(spec, "kind", "kernel.")
        if kind == "linear":
            return Kernel.linear()
        if kind == "polynomial":
            return Kernel.polynomial(_get(spec, "degree", "kernel."))
        if kind == "rbf":
            return Kernel.rbf(_number(_get(spec, "gamma", "kernel."), "kernel.gamma"))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ModelFormatError):
            raise
        raise ModelFormatError(f"field kernel: {exc}") from None
    raise ModelFormatError(f"field kernel.kind: unknown kernel {kind!r}")


def _member(k: int, c: dict, dim_hint, kernel: Kernel) -> BinaryMember:
    w = f"classifiers[{k}]."
    scope = _get(c, "scope", w)
    if not isinstance(scope, list) or not all(isinstance(s, int) for s in scope):
        raise ModelFormatError(f"field {w}scope must be a list of class indices")
    try:
        sv = np.array(_get(c, "support_vectors", w), dtype=float)
    except (TypeError, ValueError):
        raise ModelFormatError(f"field {w}support_vectors is not a numeric matrix") from None
    try:
        coefs = np.array(_get(c, "dual_coefs", w), dtype=float)
    except (TypeError, ValueError):
        raise ModelFormatError(f"field {w}dual_coefs is not a numeric vector") from None
    if sv.ndim != 2 or sv.shape[0] < 1 or not np.all(np.isfinite(sv)):
        raise ModelFormatError(f"field {w}support_vectors is not a non-empty finite matrix")
    if coefs.shape != (sv.shape[0],) or not np.all(np.isfinite(coefs)):
        raise ModelFormatError(f"field {w}dual_coefs must hold one finite value per support vector")
    if dim_hint is not None and sv.shape[1] != dim_hint:
        raise ModelFormatError(f"field {w}support_vectors has dimension {sv.shape[1]}, expected {dim_hint}")
    bias = _number(_get(c, "bias", w), w + "bias")
    vals = {key: _number(_get(c, key, w), w + key) for key in ("lambda_p", "lambda_n", "alpha")}
    try:
        cal = Calibration(vals["lambda_p"], vals["lambda_n"], vals["alpha"])
    except ValueError as exc:
        raise ModelFormatError(f"field {w}calibration: {exc}") from None
    return BinaryMember(tuple(scope), SvmModel(sv, coefs, bias, kernel), cal)


def model_from_dict(doc) -> EvidentialModel:
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")
    if _get(doc, "format", "") != FORMAT:
        raise ModelFormatError(f"field format: not an {FORMAT} file")
    version = _get(doc, "version", "")
    if version != VERSION:
        raise ModelFormatError(f"field version: unsupported version {version!r} (expected {VERSION})")
    labels = _get(doc, "frame", "")
    if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
        raise ModelFormatError("field frame must be a list of class names")
    try:
        frame = Frame(labels)
    except ValueError as exc:
        raise ModelFormatError(f"field frame: {exc}") from None
    strategy = _get(doc, "strategy", "")
    kernel = _kernel(_get(doc, "kernel", ""))
    C = _number(_get(doc, "C", ""), "C")
    lambda_mode = _get(doc, "lambda_mode", "")
    if lambda_mode not in LAMBDA_MODES:
        raise ModelFormatError(f"field lambda_mode: unknown mode {lambda_mode!r}")
    classifiers = _get(doc, "classifiers", "")
    if not isinstance(classifiers, list) or not classifiers:
        raise ModelFormatError("field classifiers must be a non-empty list")
    members, dim = [], None
    for k, c in enumerate(classifiers):
        m = _member(k, c, dim, kernel)
        dim = m.model.dim
        members.append(m)
    stored = _get(doc, "checksum", "")
    payload = {k: v for k, v in doc.items() if k != "checksum"}
    if stored != _checksum(payload):
        raise ModelFormatError("field checksum: checksum mismatch, file was modified or corrupted")
    try:
        return EvidentialModel(frame, strategy, tuple(members), kernel, C, lambda_mode)
    except ValueError as exc:
        raise ModelFormatError(f"field strategy/classifiers: {exc}") from None


def loads_model(text: str) -> EvidentialModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"truncated or malformed model file: {exc}") from None
    return model_from_dict(doc)


def load_model(path) -> EvidentialModel:
    return loads_model(Path(path).read_text(encoding="utf-8"))
