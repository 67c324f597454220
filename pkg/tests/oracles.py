"""Brute-force reference computations on frozensets.

These deliberately avoid the bitmask machinery of the package so they can
serve as independent checks.
"""

import itertools
import math

import numpy as np


def powerset(labels):
    labels = list(labels)
    return [frozenset(c) for k in range(len(labels) + 1)
            for c in itertools.combinations(labels, k)]


def as_sets(m):
    """Mass function -> {frozenset: value} with non-zero values only."""
    return {frozenset(m.frame.members(k)): v for k, v in m.focal().items()}


def bel(masses, X):
    return sum(v for Y, v in masses.items() if Y and Y <= X)


def pl(masses, X):
    return sum(v for Y, v in masses.items() if Y & X)


def betp(masses, labels):
    empty = masses.get(frozenset(), 0.0)
    return [sum(len({w} & Y) / len(Y) * v / (1 - empty) for Y, v in masses.items() if Y)
            for w in labels]


def conjunctive(sources):
    """Enumerate every tuple of focal elements and accumulate products."""
    out = {}
    for combo in itertools.product(*(list(s.items()) for s in sources)):
        inter = frozenset.intersection(*(Y for Y, _ in combo))
        out[inter] = out.get(inter, 0.0) + math.prod(v for _, v in combo)
    return out


def dempster(sources):
    conj = conjunctive(sources)
    k = conj.get(frozenset(), 0.0)
    return {X: v / (1 - k) for X, v in conj.items() if X}, k


def random_masses(rng, labels, n_focal=None, allow_empty=False):
    subsets = powerset(labels)
    if not allow_empty:
        subsets = subsets[1:]
    if n_focal is None:
        n_focal = rng.integers(1, len(subsets) + 1)
    picks = rng.choice(len(subsets), size=min(n_focal, len(subsets)), replace=False)
    w = rng.random(len(picks))
    w /= w.sum()
    return {subsets[i]: float(x) for i, x in zip(picks, w)}


def to_dense(frame, masses):
    out = np.zeros(frame.n_subsets)
    for Y, v in masses.items():
        out[frame.mask(Y)] += v
    return out


def appriou_argmax(masses, labels, r):
    """Exhaustive scoring of every non-empty subset, ties to smaller then lexicographic."""
    subsets = powerset(labels)[1:]
    raw = {X: 1 / len(X) ** r for X in subsets}
    K = 1 / sum(raw.values())
    scores = {X: K * raw[X] * pl(masses, X) for X in subsets}
    return scores
