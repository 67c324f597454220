"""Evidential combination of binary SVMs (one-versus-one / one-versus-rest).

Each binary decision value is turned into a mass function whose positive
side ``A`` and negative side ``B`` share ``alpha`` through the exponential
CDF model, with the remaining ``1 - alpha`` left on the whole frame::

    f >= 0:  m(A) = alpha * (1 - exp(-f / lambda_p) / 2),  m(B) = alpha * exp(-f / lambda_p) / 2
    f <  0:  m(A) = alpha * exp(-f / lambda_n) / 2,        m(B) = alpha * (1 - exp(-f / lambda_n) / 2)

``A`` is ``{w_i}``; ``B`` is ``{w_j}`` for a pair ``(i, j)`` and the
complement of ``{w_i}`` for class-versus-rest.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .belief import Frame, MassFunction, dempster_combine
from .errors import DataError
from .svm import Kernel, SvmModel, train_binary

STRATEGIES = ("ovo", "ovr")
LAMBDA_MODES = ("total", "conditional")
ALPHA_MIN = 0.5
ALPHA_MAX = 1.0 - 1e-6


class CalibrationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Calibration:
    lambda_p: float
    lambda_n: float
    alpha: float

    def __post_init__(self):
        if not self.lambda_p > 0:
            raise ValueError(f"lambda_p must be > 0, got {self.lambda_p!r}")
        if not self.lambda_n < 0:
            raise ValueError(f"lambda_n must be < 0, got {self.lambda_n!r}")
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha!r}")


def calibrate_values(f, y, lambda_mode: str = "total") -> Calibration:
    """Calibration from training decision values ``f`` and binary labels ``y``.

    ``lambda_p`` / ``lambda_n`` are the sums of the non-negative / negative
    decision values divided by the number of training points (``total``) or
    by the number of same-signed values (``conditional``).  ``alpha`` is the
    training accuracy of ``sign(f)``, clamped to ``[0.5, 1 - 1e-6]``.
    """
    f = np.asarray(f, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if f.size == 0:
        raise ValueError("calibration needs at least one training value")
    if f.shape != y.shape:
        raise ValueError(f"{f.size} decision values but {y.size} labels")
    if lambda_mode not in LAMBDA_MODES:
        raise ValueError(f"lambda_mode must be one of {LAMBDA_MODES}, got {lambda_mode!r}")
    nonneg = f >= 0
    l = f.size
    if lambda_mode == "total":
        lam_p = float(np.sum(f[nonneg])) / l
        lam_n = float(np.sum(f[~nonneg])) / l
    else:
        lam_p = float(np.mean(f[nonneg])) if nonneg.any() else 0.0
        lam_n = float(np.mean(f[~nonneg])) if (~nonneg).any() else 0.0
    scale = 1e-3 * float(np.max(np.abs(f)))
    if scale == 0.0:
        scale = 1e-3
    if not lam_p > 0:
        warnings.warn(f"no positive training decision values; lambda_p set to {scale:.3g}",
                      CalibrationWarning, stacklevel=2)
        lam_p = scale
    if not lam_n < 0:
        warnings.warn(f"no negative training decision values; lambda_n set to {-scale:.3g}",
                      CalibrationWarning, stacklevel=2)
        lam_n = -scale
    acc = float(np.mean(np.where(nonneg, 1.0, -1.0) == y))
    alpha = min(max(acc, ALPHA_MIN), ALPHA_MAX)
    return Calibration(lam_p, lam_n, alpha)


def calibrate(model: SvmModel, X, y, lambda_mode: str = "total") -> Calibration:
    return calibrate_values(model.decision_function(np.atleast_2d(X)), y, lambda_mode)


def _sides(scope: tuple, frame: Frame):
    a = 1 << scope[0]
    if len(scope) == 2:
        return a, 1 << scope[1]
    return a, frame.full ^ a


def bba_masses(f: float, cal: Calibration):
    """``(m(A), m(B), m(Theta))`` for one decision value."""
    if not math.isfinite(f):
        raise ValueError(f"decision value must be finite, got {f!r}")
    a = cal.alpha
    if f >= 0:
        tail = 0.5 * math.exp(-f / cal.lambda_p)
        m_a, m_b = a * (1.0 - tail), a * tail
    else:
        tail = 0.5 * math.exp(-f / cal.lambda_n)
        m_a, m_b = a * tail, a * (1.0 - tail)
    return m_a, m_b, 1.0 - a


def bba_from_decision(f: float, cal: Calibration, scope: tuple, frame: Frame) -> MassFunction:
    a_mask, b_mask = _sides(tuple(scope), frame)
    m_a, m_b, m_theta = bba_masses(float(f), cal)
    masses = np.zeros(frame.n_subsets)
    masses[a_mask] += m_a
    masses[b_mask] += m_b
    masses[frame.full] += m_theta
    return MassFunction(frame, masses)


@dataclass(frozen=True)
class BinaryMember:
    """One binary classifier: ``scope`` is ``(i,)`` for ovr or ``(i, j)`` for ovo."""

    scope: tuple
    model: SvmModel
    calibration: Calibration


@dataclass(frozen=True)
class EvidentialModel:
    frame: Frame
    strategy: str
    members: tuple
    kernel: Kernel
    C: float
    lambda_mode: str = "total"

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        n = self.frame.size
        expected = n * (n - 1) // 2 if self.strategy == "ovo" else n
        if len(self.members) != expected:
            raise ValueError(f"{self.strategy} on {n} classes needs {expected} classifiers, "
                             f"got {len(self.members)}")
        scopes = [tuple(m.scope) for m in self.members]
        if len(set(scopes)) != len(scopes):
            raise ValueError("duplicate classifier scopes")
        for s in scopes:
            ok = (len(s) == 2 and 0 <= s[0] < s[1] < n) if self.strategy == "ovo" else \
                 (len(s) == 1 and 0 <= s[0] < n)
            if not ok:
                raise ValueError(f"invalid scope {s} for {self.strategy} on {n} classes")

    @property
    def dim(self) -> int:
        return self.members[0].model.dim

    def decision_values(self, X) -> np.ndarray:
        """Matrix of shape ``(N, n_classifiers)``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dim:
            raise ValueError(f"model expects dimension {self.dim}, got {X.shape[1]}")
        return np.column_stack([m.model.decision_function(X) for m in self.members])

    def bbas(self, values: Sequence[float]) -> list:
        return [bba_from_decision(f, m.calibration, m.scope, self.frame)
                for f, m in zip(values, self.members)]


def fuse_values(values: Sequence[float], model: EvidentialModel):
    """Dempster combination of the BBAs built from one row of decision values."""
    return dempster_combine(model.bbas(values))


def fuse_pattern(x, model: EvidentialModel):
    """``(fused mass, conflict)`` for one pattern."""
    return fuse_values(model.decision_values(x)[0], model)


def _binary_tasks(y_idx: np.ndarray, n: int, strategy: str):
    if strategy == "ovr":
        for i in range(n):
            yield (i,), np.ones(y_idx.size, dtype=bool), np.where(y_idx == i, 1.0, -1.0)
    else:
        for i in range(n):
            for j in range(i + 1, n):
                keep = (y_idx == i) | (y_idx == j)
                yield (i, j), keep, np.where(y_idx[keep] == i, 1.0, -1.0)


def train_multiclass(X, labels, strategy: str = "ovo", kernel: Optional[Kernel] = None,
                     C: float = 1.0, frame: Optional[Frame] = None, tol: float = 1e-3,
                     lambda_mode: str = "total", max_iter: Optional[int] = None) -> EvidentialModel:
    """Train and calibrate every binary member.

    Samples whose label is outside ``frame`` are ignored.  ``kernel``
    defaults to RBF with ``gamma = 1/d``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    labels = np.asarray(labels).astype(str)
    if X.shape[0] != labels.size:
        raise DataError(f"{X.shape[0]} samples but {labels.size} labels")
    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")
    if frame is None:
        frame = Frame(sorted(set(labels.tolist())))
    learned = np.isin(labels, frame.labels)
    X, labels = X[learned], labels[learned]
    if frame.size < 2:
        raise DataError("need at least two classes")
    y_idx = np.array([frame.index(lab) for lab in labels], dtype=int)
    counts = np.bincount(y_idx, minlength=frame.size)
    for i, c in enumerate(counts):
        if c < 1 or (strategy == "ovo" and c < 2):
            raise DataError(f"class {frame.labels[i]!r} has {c} training samples; "
                            f"{strategy} needs at least {2 if strategy == 'ovo' else 1}")
    if kernel is None:
        kernel = Kernel.rbf(1.0 / X.shape[1])
    members = []
    for scope, keep, y in _binary_tasks(y_idx, frame.size, strategy):
        Xb = X[keep]
        svm = train_binary(Xb, y, kernel, C, tol, max_iter)
        members.append(BinaryMember(scope, svm, calibrate(svm, Xb, y, lambda_mode)))
    return EvidentialModel(frame, strategy, tuple(members), kernel, float(C), lambda_mode)


def vote_values(values: Sequence[float], model: EvidentialModel) -> int:
    if model.strategy != "ovo":
        raise ValueError("majority vote needs a one-versus-one model")
    votes = np.zeros(model.frame.size, dtype=int)
    for f, m in zip(values, model.members):
        i, j = m.scope
        votes[i if f >= 0 else j] += 1
    return int(np.argmax(votes))


def vote_ovo(x, model: EvidentialModel) -> int:
    """Majority vote of the pairwise classifiers; ties go to the lowest index."""
    return vote_values(model.decision_values(x)[0], model)


def argmax_values(values: Sequence[float], model: EvidentialModel) -> int:
    if model.strategy != "ovr":
        raise ValueError("argmax of decision values needs a one-versus-rest model")
    order = [m.scope[0] for m in model.members]
    scores = np.full(model.frame.size, -np.inf)
    scores[order] = values
    return int(np.argmax(scores))


def argmax_ovr(x, model: EvidentialModel) -> int:
    return argmax_values(model.decision_values(x)[0], model)
