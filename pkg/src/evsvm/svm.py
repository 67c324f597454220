"""Binary soft-margin SVM trained in the dual with SMO.

The decision function is ``f(x) = sum_t coef_t K(x, sv_t) + b`` where
``coef_t = y_t * alpha_t``.  Working pairs are chosen by maximal KKT
violation and each pair is optimized analytically.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConvergenceError

KINDS = ("linear", "polynomial", "rbf")
_TAU = 1e-12


@dataclass(frozen=True)
class Kernel:
    kind: str = "rbf"
    degree: int = 3
    gamma: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "polynomial" and (int(self.degree) != self.degree or self.degree < 1):
            raise ValueError(f"polynomial degree must be a positive integer, got {self.degree!r}")
        if self.kind == "rbf" and not self.gamma > 0:
            raise ValueError(f"rbf gamma must be positive, got {self.gamma!r}")

    @classmethod
    def linear(cls):
        return cls("linear")

    @classmethod
    def polynomial(cls, degree: int):
        return cls("polynomial", degree=int(degree))

    @classmethod
    def rbf(cls, gamma: float):
        return cls("rbf", gamma=float(gamma))

    @classmethod
    def parse(cls, text: str, dim: Optional[int] = None) -> "Kernel":
        """Parse ``linear``, ``poly:3`` or ``rbf:0.5``.

        A bare ``rbf`` uses ``gamma = 1/dim``.
        """
        kind, _, arg = text.strip().partition(":")
        kind = kind.lower()
        if kind == "linear" and not arg:
            return cls.linear()
        if kind in ("poly", "polynomial") and arg:
            return cls.polynomial(int(arg))
        if kind == "rbf":
            if arg:
                return cls.rbf(float(arg))
            if dim:
                return cls.rbf(1.0 / dim)
        raise ValueError(f"cannot parse kernel spec {text!r}")

    def __str__(self):
        if self.kind == "linear":
            return "linear"
        if self.kind == "polynomial":
            return f"poly:{self.degree}"
        return f"rbf:{self.gamma!r}"

    def to_dict(self) -> dict:
        if self.kind == "linear":
            return {"kind": "linear"}
        if self.kind == "polynomial":
            return {"kind": "polynomial", "degree": self.degree}
        return {"kind": "rbf", "gamma": self.gamma}

    def matrix(self, X, Y) -> np.ndarray:
        """Gram block ``K[i, j] = K(X[i], Y[j])``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        if X.shape[1] != Y.shape[1]:
            raise ValueError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
        if self.kind == "rbf":
            # direct differences keep K(x, y) == K(y, x) bit-for-bit
            d2 = np.empty((X.shape[0], Y.shape[0]))
            for i, x in enumerate(X):
                diff = Y - x
                d2[i] = np.einsum("ij,ij->i", diff, diff)
            return np.exp(-self.gamma * d2)
        dots = X @ Y.T
        if self.kind == "linear":
            return dots
        return (dots + 1.0) ** self.degree


def kernel_eval(k: Kernel, x, y) -> float:
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    if k.kind == "rbf":
        diff = x - y
        return float(np.exp(-k.gamma * float(np.sum(diff * diff))))
    dot = float(np.sum(x * y))
    if k.kind == "linear":
        return dot
    return (dot + 1.0) ** k.degree


@dataclass(frozen=True)
class SvmModel:
    support_vectors: np.ndarray
    dual_coefs: np.ndarray
    bias: float
    kernel: Kernel

    @property
    def dim(self) -> int:
        return self.support_vectors.shape[1]

    def decision_function(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.dim:
            raise ValueError(f"model expects dimension {self.dim}, got {X.shape[1]}")
        f = self.kernel.matrix(X, self.support_vectors) @ self.dual_coefs + self.bias
        return f[0] if single else f


def decision_function(model: SvmModel, x) -> float:
    return float(model.decision_function(np.asarray(x, dtype=float).ravel()))


class _KernelRows:
    """Kernel rows on demand, LRU-bounded by ``budget`` bytes.

    Small problems get the full Gram matrix up front.
    """

    def __init__(self, kernel: Kernel, X: np.ndarray, budget: int):
        self.kernel = kernel
        self.X = X
        l = X.shape[0]
        self.full = kernel.matrix(X, X) if l * l * 8 <= budget else None
        self.capacity = max(2, budget // (8 * l))
        self.rows: OrderedDict = OrderedDict()
        self.diag = np.array([kernel_eval(kernel, x, x) for x in X])

    def row(self, i: int) -> np.ndarray:
        if self.full is not None:
            return self.full[i]
        r = self.rows.get(i)
        if r is None:
            r = self.kernel.matrix(self.X[i], self.X)[0]
            self.rows[i] = r
            if len(self.rows) > self.capacity:
                self.rows.popitem(last=False)
        else:
            self.rows.move_to_end(i)
        return r


@dataclass
class SmoResult:
    alpha: np.ndarray
    bias: float
    n_iter: int
    gap: float
    converged: bool
    objective: list = field(default_factory=list)


def _bias(alpha, y, grad, C, eps):
    # grad_t = y_t * g_t - 1 with g_t = sum_u y_u alpha_u K_ut, so y_t - g_t = -y_t * grad_t
    e = -y * grad
    free = (alpha > eps) & (alpha < C - eps)
    if np.any(free):
        return float(np.mean(e[free]))
    at_zero = alpha <= eps
    lower = (at_zero & (y > 0)) | (~at_zero & (y < 0))
    upper = ~lower
    lo = np.max(e[lower]) if np.any(lower) else None
    hi = np.min(e[upper]) if np.any(upper) else None
    if lo is None:
        return float(hi)
    if hi is None:
        return float(lo)
    return float((lo + hi) / 2)


def smo_solve(X, y, kernel: Kernel, C: float = 1.0, tol: float = 1e-3,
              max_iter: Optional[int] = None, cache_bytes: int = 256 << 20,
              track_objective: bool = False) -> SmoResult:
    """Maximize the SVM dual with pairwise updates.

    Stops when the maximal KKT violation gap drops below ``tol``.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    l = X.shape[0]
    if max_iter is None:
        max_iter = max(1000, 10 * l * l)
    rows = _KernelRows(kernel, X, cache_bytes)
    alpha = np.zeros(l)
    grad = -np.ones(l)  # gradient of 0.5 a'Qa - sum(a)
    objective = []
    gap = np.inf
    n_iter = 0
    pos = y > 0
    while n_iter < max_iter:
        neg_yg = -y * grad
        up = (pos & (alpha < C)) | (~pos & (alpha > 0))
        low = (pos & (alpha > 0)) | (~pos & (alpha < C))
        if not np.any(up) or not np.any(low):
            gap = 0.0
            break
        i = int(np.argmax(np.where(up, neg_yg, -np.inf)))
        j = int(np.argmin(np.where(low, neg_yg, np.inf)))
        gap = float(neg_yg[i] - neg_yg[j])
        if gap < tol:
            break
        Ki = rows.row(i)
        Kj = rows.row(j)
        eta = max(rows.diag[i] + rows.diag[j] - 2.0 * Ki[j], _TAU)
        room_i = C - alpha[i] if y[i] > 0 else alpha[i]
        room_j = alpha[j] if y[j] > 0 else C - alpha[j]
        t = gap / eta
        if t >= room_i or t >= room_j:
            t = min(room_i, room_j)
            hit_i = room_i <= room_j
            hit_j = room_j <= room_i
        else:
            hit_i = hit_j = False
        alpha[i] += y[i] * t
        alpha[j] -= y[j] * t
        if hit_i:
            alpha[i] = C if y[i] > 0 else 0.0
        if hit_j:
            alpha[j] = 0.0 if y[j] > 0 else C
        grad += y * t * (Ki - Kj)
        n_iter += 1
        if track_objective:
            objective.append(float(np.sum(alpha) - 0.5 * np.dot(alpha, grad + 1.0)))
    converged = gap < tol
    return SmoResult(alpha, _bias(alpha, y, grad, C, 1e-12 * C), n_iter, gap, converged, objective)


def _check_problem(X, y):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim != 2:
        raise ValueError("points must be a 2-D array")
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"{X.shape[0]} points but {y.shape[0]} labels")
    if X.shape[0] < 2:
        raise ValueError("need at least two training points")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    if np.all(y > 0) or np.all(y < 0):
        raise ValueError("both classes must be present")
    return X, y


def train_binary(X, y, kernel: Kernel, C: float = 1.0, tol: float = 1e-3,
                 max_iter: Optional[int] = None, cache_bytes: int = 256 << 20) -> SvmModel:
    """Train a binary SVM; raises ConvergenceError (carrying the model) at the cap."""
    if not C > 0:
        raise ValueError(f"C must be positive, got {C!r}")
    X, y = _check_problem(X, y)
    res = smo_solve(X, y, kernel, C, tol, max_iter, cache_bytes)
    sv = res.alpha > 0
    model = SvmModel(X[sv].copy(), (y * res.alpha)[sv], res.bias, kernel)
    if not res.converged:
        raise ConvergenceError(
            f"SMO stopped after {res.n_iter} iterations with KKT gap {res.gap:.3g} > {tol}",
            model=model, gap=res.gap)
    return model
