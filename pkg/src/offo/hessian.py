"""Bounded symmetric curvature models for the quadratic step model.

Four kinds: ``none`` (zero operator), ``bb`` (spectral diagonal built from
the latest secant pair), ``lbfgsM`` (M direct BFGS updates stacked on the
spectral diagonal) and ``exact`` (the true Hessian, refreshed per iterate).
Every model enforces a spectral-norm cap: when the norm estimate exceeds
``kappa_B`` the whole operator is rescaled by ``kappa_B / estimate``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

Array = np.ndarray

#: secant pairs are accepted only when y's + pair curvature clears this guard
SECANT_GUARD = 1e-15

MODEL_KINDS = ("none", "bb", "lbfgs", "exact")


def power_norm(matvec, n: int, max_iter: int = 300, tol: float = 1e-13) -> float:
    """Spectral-norm estimate of a symmetric operator by power iteration."""
    v = np.ones(n) + 0.5 * np.arange(n) / max(n - 1, 1)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(max_iter):
        w = matvec(v)
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return 0.0
        if abs(nw - est) <= tol * max(nw, 1.0):
            return nw
        est = nw
        v = w / nw
    return est


@dataclass(frozen=True)
class ZeroModel:
    kind = "none"
    kappa_B: float = 1e5
    rejected: int = 0

    def update(self, s: Array, y: Array) -> "ZeroModel":
        return self

    def matvec(self, v: Array) -> Array:
        return np.zeros_like(np.asarray(v, dtype=float))

    def norm_estimate(self) -> float:
        return 0.0

    @property
    def is_zero(self) -> bool:
        return True


def _bb_scale(s: Array, y: Array) -> Optional[float]:
    sts = float(s @ s)
    yts = float(y @ s)
    if sts > 0.0 and yts >= SECANT_GUARD * sts:
        return sts / yts
    return None


@dataclass(frozen=True)
class BBDiagModel:
    kind = "bb"
    kappa_B: float = 1e5
    scale: float = 1.0
    rejected: int = 0

    def update(self, s: Array, y: Array) -> "BBDiagModel":
        scale = _bb_scale(np.asarray(s, float), np.asarray(y, float))
        if scale is None:
            return replace(self, rejected=self.rejected + 1)
        return replace(self, scale=scale)

    def _effective_scale(self) -> float:
        return min(self.scale, self.kappa_B)

    def matvec(self, v: Array) -> Array:
        return self._effective_scale() * np.asarray(v, dtype=float)

    def norm_estimate(self) -> float:
        return self._effective_scale()

    @property
    def is_zero(self) -> bool:
        return False


@dataclass(frozen=True)
class LbfgsModel:
    """Direct (non-inverse) limited-memory BFGS operator on a spectral base.

    The base is scale * I with the usual spectral scalar from the latest
    accepted pair; stored pairs are applied as rank-two BFGS corrections, so
    the most recent accepted pair satisfies the secant equation B s = y.
    """

    kind = "lbfgs"
    kappa_B: float = 1e5
    memory: int = 3
    scale: float = 1.0
    pairs: tuple = ()
    rejected: int = 0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def update(self, s: Array, y: Array) -> "LbfgsModel":
        s = np.asarray(s, dtype=float)
        y = np.asarray(y, dtype=float)
        scale = _bb_scale(s, y)
        if scale is None:
            return replace(self, rejected=self.rejected + 1, _cache={})
        pairs = (self.pairs + ((s.copy(), y.copy()),))[-self.memory :]
        return replace(self, scale=scale, pairs=pairs, _cache={})

    def _raw_matvec(self, v: Array) -> Array:
        terms = self._terms()
        w = self.scale * v
        for u, c, y, d in terms:
            w = w - u * (u @ v) / c + y * (y @ v) / d
        return w

    def _terms(self):
        if "terms" not in self._cache:
            terms = []
            for s, y in self.pairs:
                u = self.scale * s
                for tu, tc, ty, td in terms:
                    u = u - tu * (tu @ s) / tc + ty * (ty @ s) / td
                c = float(s @ u)
                d = float(y @ s)
                if c <= 0.0 or d <= 0.0:
                    # degenerate intermediate curvature: skip this correction
                    continue
                terms.append((u, c, y, d))
            self._cache["terms"] = terms
        return self._cache["terms"]

    def _raw_norm(self) -> float:
        if "norm" not in self._cache:
            if not self.pairs:
                self._cache["norm"] = abs(self.scale)
            else:
                n = self.pairs[0][0].size
                self._cache["norm"] = power_norm(self._raw_matvec, n)
        return self._cache["norm"]

    def _factor(self) -> float:
        raw = self._raw_norm()
        if raw > self.kappa_B:
            return self.kappa_B / raw
        return 1.0

    def matvec(self, v: Array) -> Array:
        return self._factor() * self._raw_matvec(np.asarray(v, dtype=float))

    def norm_estimate(self) -> float:
        return self._factor() * self._raw_norm()

    @property
    def is_zero(self) -> bool:
        return False


@dataclass(frozen=True)
class ExactModel:
    kind = "exact"
    kappa_B: float = 1e5
    H: Optional[Array] = None
    rejected: int = 0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def update(self, s: Array, y: Array) -> "ExactModel":
        return self

    def with_matrix(self, H: Array) -> "ExactModel":
        H = np.asarray(H, dtype=float)
        H = 0.5 * (H + H.T)
        return replace(self, H=H, _cache={})

    def _raw_norm(self) -> float:
        if self.H is None:
            return 0.0
        if "norm" not in self._cache:
            self._cache["norm"] = power_norm(lambda v: self.H @ v, self.H.shape[0])
        return self._cache["norm"]

    def _factor(self) -> float:
        raw = self._raw_norm()
        if raw > self.kappa_B:
            return self.kappa_B / raw
        return 1.0

    def matvec(self, v: Array) -> Array:
        if self.H is None:
            raise RuntimeError("exact model used before a Hessian was bound")
        return self._factor() * (self.H @ np.asarray(v, dtype=float))

    def norm_estimate(self) -> float:
        return self._factor() * self._raw_norm()

    @property
    def is_zero(self) -> bool:
        return False


def make_model(kind: str, kappa_B: float = 1e5, memory: int = 3):
    """Build a curvature model from its selection string (none|bb|lbfgs3|exact)."""
    if kind in ("none", "zero"):
        return ZeroModel(kappa_B=kappa_B)
    if kind == "bb":
        return BBDiagModel(kappa_B=kappa_B)
    if kind.startswith("lbfgs"):
        mem = int(kind[5:]) if len(kind) > 5 else memory
        if mem < 1:
            raise ValueError("lbfgs memory must be positive")
        return LbfgsModel(kappa_B=kappa_B, memory=mem)
    if kind == "exact":
        return ExactModel(kappa_B=kappa_B)
    raise ValueError(f"unknown model kind '{kind}'; known: none, bb, lbfgsM, exact")
