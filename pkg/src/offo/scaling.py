"""Trust-region scaling factors.

A :class:`ScalingRule` fixes the recurrence turning the gradient history into
per-coordinate weights w_k; each iteration divides |g_k| by w_k to obtain the
trust radii.  Three families are provided:

* ``adagrad-like``  -- w = sqrt(vartheta) * theta * (sigma + sum g^2)^mu,
  non-decreasing weights; mu=1/2, theta=vartheta=1 is deterministic Adagrad.
* ``adam-like``     -- exponentially decayed squared-gradient sum,
  w = theta * sqrt(sigma + sum beta2^(k-j) g_j^2).
* ``diminishing-*`` -- w = theta * max(sigma, v_k) * (k+1)^nu with v_k the
  running max (or running average) of |g|, forcing (k+1)^nu growth.

``aggregated`` rules accumulate the Euclidean norm of the whole gradient and
give every coordinate the same weight (the "norm" variants).
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

import numpy as np

Array = np.ndarray

VARIANTS = ("adagrad-like", "adam-like", "diminishing-max", "diminishing-avg")

#: named rules selectable from the command line; the trailing "s" picks
#: theta = sqrt(n)
NAMED_RULES = (
    "adagrad",
    "adagnorm",
    "adam",
    "adamnorm",
    "maxg",
    "maxgnorm",
    "adagrads",
    "adams",
    "maxgs",
)


@dataclass(frozen=True)
class ScalingRule:
    variant: str
    mu: float = 0.5
    nu: float = 0.1
    theta: float = 1.0
    vartheta: float = 1.0
    sigma: Union[float, Array] = 0.01
    beta2: float = 0.9
    aggregated: bool = False
    theta_auto: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown scaling variant '{self.variant}'")
        if not 0.0 < self.mu < 1.0:
            raise ValueError("mu must lie in (0, 1)")
        if not 0.0 < self.vartheta <= 1.0:
            raise ValueError("vartheta must lie in (0, 1]")
        if self.theta <= 0.0:
            raise ValueError("theta must be positive")
        if not 0.0 < self.beta2 < 1.0:
            raise ValueError("beta2 must lie in (0, 1)")
        sig = np.atleast_1d(np.asarray(self.sigma, dtype=float))
        if np.any(sig <= 0.0) or np.any(sig > 1.0):
            raise ValueError("sigma must lie in (0, 1]")
        if self.variant.startswith("diminishing") and not 0.0 < self.nu <= self.mu:
            raise ValueError("diminishing rules need 0 < nu <= mu")

    @property
    def diminishing(self) -> bool:
        return self.variant.startswith("diminishing")

    def sigma_vector(self, width: int) -> Array:
        sig = np.atleast_1d(np.asarray(self.sigma, dtype=float))
        if sig.size == 1:
            return np.full(width, sig[0])
        if self.aggregated:
            return np.full(width, float(sig.min()))
        if sig.size != width:
            raise ValueError(f"sigma has length {sig.size}, expected {width}")
        return sig

    @property
    def sigma_min(self) -> float:
        return float(np.min(np.atleast_1d(np.asarray(self.sigma, dtype=float))))


@dataclass(frozen=True)
class ScalingState:
    """Accumulator state; ``k`` is the index of the last absorbed gradient."""

    k: int
    acc: Array
    n: int
    theta: float


def new_state(rule: ScalingRule, n: int) -> ScalingState:
    width = 1 if rule.aggregated else n
    theta = float(np.sqrt(n)) if rule.theta_auto else rule.theta
    return ScalingState(k=-1, acc=np.zeros(width), n=n, theta=theta)


def update(state: ScalingState, rule: ScalingRule, g_k: Array) -> ScalingState:
    """Absorb the current gradient (the accumulators include g_k itself)."""
    g_k = np.asarray(g_k, dtype=float)
    if not np.all(np.isfinite(g_k)):
        raise FloatingPointError("non-finite gradient passed to scaling update")
    if g_k.shape != (state.n,):
        raise ValueError(f"gradient has shape {g_k.shape}, expected ({state.n},)")
    if rule.aggregated:
        mag = np.array([np.linalg.norm(g_k)])
    else:
        mag = np.abs(g_k)
    if rule.variant == "adagrad-like":
        acc = state.acc + mag**2
    elif rule.variant == "adam-like":
        acc = rule.beta2 * state.acc + mag**2
    elif rule.variant == "diminishing-max":
        acc = np.maximum(state.acc, mag)
    else:  # diminishing-avg
        acc = state.acc + mag
    return replace(state, k=state.k + 1, acc=acc)


def weights(state: ScalingState, rule: ScalingRule) -> Array:
    """Current weight vector w_k (length n; identical entries when aggregated)."""
    if state.k < 0:
        raise ValueError("weights requested before any scaling update")
    sig = rule.sigma_vector(state.acc.size)
    if rule.variant == "adagrad-like":
        w = state.theta * np.sqrt(rule.vartheta) * (sig + state.acc) ** rule.mu
    elif rule.variant == "adam-like":
        w = state.theta * np.sqrt(sig + state.acc)
    else:
        v = state.acc if rule.variant == "diminishing-max" else state.acc / (state.k + 1)
        w = state.theta * np.maximum(sig, v) * (state.k + 1) ** rule.nu
    if rule.aggregated:
        return np.full(state.n, w[0])
    return w


def as4_floor(rule: ScalingRule, n: int = 1) -> float:
    """Analytic positive lower bound on every weight the rule can produce."""
    theta = float(np.sqrt(n)) if rule.theta_auto else rule.theta
    smin = rule.sigma_min
    if rule.variant == "adagrad-like":
        return theta * np.sqrt(rule.vartheta) * smin**rule.mu
    if rule.variant == "adam-like":
        return theta * np.sqrt(smin)
    return theta * smin


def aggregated_twin(rule: ScalingRule) -> ScalingRule:
    """The same rule accumulating ||g||_2 instead of per-coordinate values."""
    return replace(rule, aggregated=True)


def rule_from_name(name: str) -> ScalingRule:
    """Build one of the named rules (adagrad, adagnorm, maxg, adams, ...)."""
    base = name
    auto = False
    if name.endswith("s") and name not in ("adagrads", "adams", "maxgs"):
        raise ValueError(f"unknown scaling rule '{name}'")
    if name in ("adagrads", "adams", "maxgs"):
        base = name[:-1]
        auto = True
    if base == "adagrad":
        return ScalingRule("adagrad-like", theta_auto=auto)
    if base == "adagnorm":
        return ScalingRule("adagrad-like", aggregated=True, theta_auto=auto)
    if base == "adam":
        return ScalingRule("adam-like", theta_auto=auto)
    if base == "adamnorm":
        return ScalingRule("adam-like", aggregated=True, theta_auto=auto)
    if base == "maxg":
        return ScalingRule("diminishing-max", mu=0.1, nu=0.1, theta_auto=auto)
    if base == "maxgnorm":
        return ScalingRule("diminishing-max", mu=0.1, nu=0.1, aggregated=True, theta_auto=auto)
    raise ValueError(f"unknown scaling rule '{name}'; known: {', '.join(NAMED_RULES)}")
