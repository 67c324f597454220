"""Decisions from a fused mass function: singleton, union of classes, or reject."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from .belief import Frame, MassFunction, betp, bel_all, pl_all, popcount

SINGLETON = "singleton"
UNION = "union"
REJECTED = "rejected"
DEFAULT_R = 0.6
_TIE = 1e-12


@dataclass(frozen=True)
class Decision:
    kind: str
    mask: int = 0

    def __post_init__(self):
        if self.kind == REJECTED:
            if self.mask:
                raise ValueError("a rejection carries no class")
        elif self.kind == SINGLETON:
            if popcount(self.mask) != 1:
                raise ValueError(f"singleton decision needs one class, got mask {self.mask}")
        elif self.kind == UNION:
            if popcount(self.mask) < 2:
                raise ValueError(f"union decision needs at least two classes, got mask {self.mask}")
        else:
            raise ValueError(f"unknown decision kind {self.kind!r}")

    @classmethod
    def of_mask(cls, mask: int) -> "Decision":
        return cls(SINGLETON if popcount(mask) == 1 else UNION, mask)

    @classmethod
    def of_class(cls, index: int) -> "Decision":
        return cls(SINGLETON, 1 << index)

    @classmethod
    def rejected(cls) -> "Decision":
        return cls(REJECTED)

    @property
    def is_rejected(self) -> bool:
        return self.kind == REJECTED

    @property
    def class_index(self) -> Optional[int]:
        return self.mask.bit_length() - 1 if self.kind == SINGLETON else None

    def label(self, frame: Frame) -> str:
        if self.kind == REJECTED:
            return "reject"
        if self.kind == SINGLETON:
            return frame.labels[self.class_index]
        return frame.format(self.mask)


def _argmax_first(values) -> int:
    return int(np.argmax(values))


def decide_pignistic(m: MassFunction) -> int:
    """Index of the class with the largest pignistic probability."""
    return _argmax_first(betp(m))


def decide_maxbel_reject(m: MassFunction) -> Decision:
    """Most credible class, kept only if it is at least as credible as its complement."""
    b = bel_all(m)
    frame = m.frame
    singles = np.array([b[1 << i] for i in range(frame.size)])
    k = _argmax_first(singles)
    if singles[k] >= b[frame.full ^ (1 << k)]:
        return Decision.of_class(k)
    return Decision.rejected()


@dataclass(frozen=True)
class AppriouWeights:
    """Prior weights ``K * lambda_X / |X|**r`` over the non-empty subsets."""

    frame: Frame
    r: float
    weights: np.ndarray
    lambdas: np.ndarray

    def __getitem__(self, subset) -> float:
        return float(self.weights[self.frame.mask(subset)])


@lru_cache(maxsize=64)
def _cardinalities(n: int) -> np.ndarray:
    return np.array([popcount(k) for k in range(1 << n)], dtype=float)


def build_appriou_weights(frame: Frame, r: float = DEFAULT_R,
                          lambdas: Optional[Sequence[float]] = None) -> AppriouWeights:
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"r must be in [0, 1], got {r!r}")
    card = _cardinalities(frame.size)
    if lambdas is None:
        lam = np.ones(frame.n_subsets)
    else:
        lam = np.asarray(lambdas, dtype=float)
        if lam.shape != (frame.n_subsets,) or np.any(lam[1:] < 0) or not np.any(lam[1:] > 0):
            raise ValueError("lambdas need one non-negative weight per subset, not all zero")
    lam = lam.copy()
    lam[0] = 0.0
    raw = np.zeros(frame.n_subsets)
    raw[1:] = lam[1:] / card[1:] ** r
    w = raw / raw.sum()
    w.setflags(write=False)
    lam.setflags(write=False)
    return AppriouWeights(frame, float(r), w, lam)


def appriou_scores(m: MassFunction, weights: AppriouWeights) -> np.ndarray:
    return weights.weights * pl_all(m)


def decide_appriou(m: MassFunction, r: Union[float, AppriouWeights] = DEFAULT_R) -> Decision:
    """Subset maximizing prior weight times plausibility.

    Near-ties go to the smaller subset, then the lower mask.  With ``r = 0``
    and uniform weights the whole frame always attains the maximum (pl is
    monotone under inclusion), so it is returned directly.
    """
    weights = r if isinstance(r, AppriouWeights) else build_appriou_weights(m.frame, r)
    if weights.frame != m.frame:
        raise ValueError("weights and mass function live on different frames")
    full = m.frame.full
    if weights.r == 0.0 and np.all(weights.lambdas[1:] == weights.lambdas[full]):
        return Decision.of_mask(full)
    scores = appriou_scores(m, weights)
    best = scores[1:].max()
    cand = np.flatnonzero(scores >= best - _TIE * max(best, 1e-300))
    cand = cand[cand != 0]
    card = _cardinalities(m.frame.size)
    mask = int(min(cand, key=lambda k: (card[k], k)))
    return Decision.of_mask(mask)


ONETWO = "onetwo"
TWOONE = "twoone"


def decide_process(m: MassFunction, r: Union[float, AppriouWeights] = DEFAULT_R,
                   order: str = ONETWO) -> Decision:
    """Chain the reject test and the subset rule.

    ``onetwo`` rejects first, then applies the subset rule to the survivors.
    ``twoone`` applies the subset rule first and runs the reject test only on
    patterns it assigned to a union.
    """
    if order == ONETWO:
        if decide_maxbel_reject(m).is_rejected:
            return Decision.rejected()
        return decide_appriou(m, r)
    if order == TWOONE:
        first = decide_appriou(m, r)
        if first.kind == SINGLETON:
            return first
        return decide_maxbel_reject(m)
    raise ValueError(f"order must be {ONETWO!r} or {TWOONE!r}, got {order!r}")
