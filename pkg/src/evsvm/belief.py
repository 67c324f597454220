"""Mass functions on a finite frame of discernment.

Subsets of the frame are encoded as bitmasks: bit ``i`` set means
``frame.labels[i]`` belongs to the subset.  A mass function stores a dense
array of ``2**n`` values indexed by mask, so ``masses[0]`` is the mass on the
empty set and ``masses[-1]`` the mass on the whole frame.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import DegenerateMassError, FrameMismatchError, TotalConflictError

MAX_CLASSES = 16
SUM_TOL = 1e-9
CONFLICT_TOL = 1e-12
_CLAMP = 1e-15
_DRIFT = 1e-12


def popcount(mask: int) -> int:
    return bin(mask).count("1")


class Frame:
    """Ordered, immutable set of class labels."""

    __slots__ = ("_labels", "_index")

    def __init__(self, labels: Iterable[str]):
        labels = tuple(str(lab) for lab in labels)
        if not 1 <= len(labels) <= MAX_CLASSES:
            raise ValueError(f"frame size must be in [1, {MAX_CLASSES}], got {len(labels)}")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels in frame: {labels}")
        self._labels = labels
        self._index = {lab: i for i, lab in enumerate(labels)}

    @property
    def labels(self) -> tuple:
        return self._labels

    @property
    def size(self) -> int:
        return len(self._labels)

    @property
    def full(self) -> int:
        """Mask of the whole frame."""
        return (1 << len(self._labels)) - 1

    @property
    def n_subsets(self) -> int:
        return 1 << len(self._labels)

    def __len__(self):
        return len(self._labels)

    def __iter__(self):
        return iter(self._labels)

    def __contains__(self, label):
        return label in self._index

    def __eq__(self, other):
        return isinstance(other, Frame) and other._labels == self._labels

    def __hash__(self):
        return hash(self._labels)

    def __repr__(self):
        return f"Frame({list(self._labels)!r})"

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"label {label!r} not in {self!r}") from None

    def mask(self, subset) -> int:
        """Convert a subset description to its bitmask.

        Accepts an int mask, a single label, a :class:`FocalSet`, or an
        iterable of labels.
        """
        if isinstance(subset, FocalSet):
            if subset.frame != self:
                raise FrameMismatchError(f"{subset!r} does not belong to {self!r}")
            return subset.mask
        if isinstance(subset, (int, np.integer)):
            mask = int(subset)
            if not 0 <= mask <= self.full:
                raise ValueError(f"mask {mask} out of range for {self!r}")
            return mask
        if isinstance(subset, str):
            return 1 << self.index(subset)
        mask = 0
        for lab in subset:
            mask |= 1 << self.index(lab)
        return mask

    def members(self, mask: int) -> tuple:
        return tuple(lab for i, lab in enumerate(self._labels) if mask >> i & 1)

    def complement(self, mask: int) -> int:
        return self.full & ~mask

    def format(self, mask: int) -> str:
        return "{" + ",".join(self.members(mask)) + "}"


@dataclass(frozen=True)
class FocalSet:
    frame: Frame
    mask: int

    def __post_init__(self):
        if not 0 <= self.mask <= self.frame.full:
            raise ValueError(f"mask {self.mask} out of range for {self.frame!r}")

    @property
    def cardinality(self) -> int:
        return popcount(self.mask)

    def __str__(self):
        return self.frame.format(self.mask)


Subset = Union[int, str, FocalSet, Iterable[str]]


class MassFunction:
    """Dense, read-only allocation of belief over the powerset of a frame."""

    __slots__ = ("frame", "masses")

    def __init__(self, frame: Frame, masses):
        masses = np.array(masses, dtype=float)
        if masses.shape != (frame.n_subsets,):
            raise ValueError(f"expected {frame.n_subsets} masses, got shape {masses.shape}")
        masses.setflags(write=False)
        self.frame = frame
        self.masses = masses

    @classmethod
    def from_focal(cls, frame: Frame, focal: Mapping) -> "MassFunction":
        """Build from ``{subset: value}``; unlisted subsets get zero mass."""
        masses = np.zeros(frame.n_subsets)
        for subset, value in focal.items():
            masses[frame.mask(subset)] += value
        return cls(frame, masses)

    @classmethod
    def vacuous(cls, frame: Frame) -> "MassFunction":
        masses = np.zeros(frame.n_subsets)
        masses[frame.full] = 1.0
        return cls(frame, masses)

    def __getitem__(self, subset) -> float:
        return float(self.masses[self.frame.mask(subset)])

    def focal(self) -> dict:
        """Masks with strictly positive mass, mapped to their mass."""
        return {int(k): float(self.masses[k]) for k in np.flatnonzero(self.masses > 0)}

    @property
    def conflict(self) -> float:
        return float(self.masses[0])

    def to_text(self) -> dict:
        """Debug dump keyed by subset notation."""
        return {self.frame.format(k): v for k, v in self.focal().items()}

    def __repr__(self):
        return f"MassFunction({self.to_text()!r})"


@dataclass(frozen=True)
class ValidityReport:
    valid: bool
    violation: str = ""

    def __bool__(self):
        return self.valid


def validate_mass(m: MassFunction, world: str = "closed", tol: float = SUM_TOL) -> ValidityReport:
    """Check non-negativity, unit sum and the world-appropriate empty-set rule."""
    if world not in ("open", "closed"):
        raise ValueError(f"world must be 'open' or 'closed', got {world!r}")
    x = m.masses
    if not np.all(np.isfinite(x)):
        return ValidityReport(False, "non-finite mass")
    if np.any(x < 0):
        k = int(np.flatnonzero(x < 0)[0])
        return ValidityReport(False, f"negative mass on {m.frame.format(k)}")
    total = float(np.sum(x))
    if abs(total - 1.0) > tol:
        return ValidityReport(False, f"masses sum to {total!r}, not 1")
    if world == "closed" and x[0] != 0:
        return ValidityReport(False, f"closed world requires m(empty) = 0, got {x[0]!r}")
    return ValidityReport(True)


def _check_mask(m: MassFunction, X) -> int:
    if isinstance(X, FocalSet) and X.frame != m.frame:
        raise FrameMismatchError(f"{X!r} and mass function live on different frames")
    return m.frame.mask(X)


def _all_masks(frame: Frame) -> np.ndarray:
    return np.arange(frame.n_subsets)


def bel(m: MassFunction, X: Subset) -> float:
    """Credibility: total mass of the non-empty subsets of ``X``."""
    mask = _check_mask(m, X)
    idx = _all_masks(m.frame)
    sel = (idx & ~mask) == 0
    sel[0] = False
    return float(np.sum(m.masses[sel]))


def pl(m: MassFunction, X: Subset) -> float:
    """Plausibility: total mass of the subsets intersecting ``X``."""
    mask = _check_mask(m, X)
    idx = _all_masks(m.frame)
    return float(np.sum(m.masses[(idx & mask) != 0]))


def bel_all(m: MassFunction) -> np.ndarray:
    """bel for every mask at once (fast zeta transform over subsets)."""
    out = m.masses.copy()
    out[0] = 0.0
    n = m.frame.size
    idx = _all_masks(m.frame)
    for i in range(n):
        bit = 1 << i
        has = (idx & bit) != 0
        out[has] += out[idx[has] ^ bit]
    return out


def pl_all(m: MassFunction) -> np.ndarray:
    """pl for every mask, via pl(X) = 1 - m(empty) - bel(complement of X)."""
    b = bel_all(m)
    full = m.frame.full
    out = 1.0 - m.masses[0] - b[full ^ _all_masks(m.frame)]
    out[0] = 0.0
    return out


def betp(m: MassFunction) -> np.ndarray:
    """Pignistic probability of each singleton, in frame order."""
    empty = m.masses[0]
    if empty >= 1.0 - CONFLICT_TOL:
        raise DegenerateMassError("pignistic transform undefined when m(empty) = 1")
    n = m.frame.size
    out = np.zeros(n)
    for mask, value in m.focal().items():
        if mask == 0:
            continue
        share = value / popcount(mask)
        for i in range(n):
            if mask >> i & 1:
                out[i] += share
    return out / (1.0 - empty)


def _same_frame(ms: Sequence[MassFunction]) -> Frame:
    if not ms:
        raise ValueError("need at least one mass function")
    frame = ms[0].frame
    for m in ms[1:]:
        if m.frame != frame:
            raise FrameMismatchError(f"cannot combine masses on {frame!r} and {m.frame!r}")
    return frame


def _conj_pair(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    fa = np.flatnonzero(a)
    fb = np.flatnonzero(b)
    inter = fa[:, None] & fb[None, :]
    weights = np.outer(a[fa], b[fb])
    return np.bincount(inter.ravel(), weights=weights.ravel(), minlength=a.size)


def _tidy(x: np.ndarray) -> np.ndarray:
    x[(x < 0) & (x > -_CLAMP)] = 0.0
    total = x.sum()
    if abs(total - 1.0) > _DRIFT:
        x = x / total
    return x


def conjunctive_combine(ms: Sequence[MassFunction]) -> MassFunction:
    """Unnormalized conjunctive rule; the result may put mass on the empty set."""
    frame = _same_frame(ms)
    out = reduce(_conj_pair, (m.masses for m in ms[1:]), ms[0].masses.copy())
    return MassFunction(frame, _tidy(out))


def dempster_combine(ms: Sequence[MassFunction]):
    """Dempster's normalized rule.

    Returns ``(combined, conflict)`` where ``conflict`` is the mass the
    conjunctive rule put on the empty set before normalization.
    """
    conj = conjunctive_combine(ms)
    conflict = float(conj.masses[0])
    if conflict >= 1.0 - CONFLICT_TOL:
        raise TotalConflictError(conflict)
    x = np.array(conj.masses)
    x[0] = 0.0
    x /= 1.0 - conflict
    return MassFunction(conj.frame, _tidy(x)), conflict
