"""Adaptively scaled trust-region iteration and the steepest-descent baseline.

The main loop never evaluates the objective: each iteration scales the
current gradient into per-coordinate radii Delta_i = |g_i| / w_i, minimizes
the quadratic model over the box (or ball) with a truncated conjugate-gradient
solve, and accepts any step achieving at least a tau-fraction of the scaled
Cauchy point's model decrease.  Objective values are evaluated only by the
backtracking baseline (:func:`sdba_run`) and, purely for verification, when
``instrument_f`` is set.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .hessian import MODEL_KINDS, make_model
from .problems import NonFiniteError, base_problem
from .scaling import ScalingRule, new_state, update, weights

Array = np.ndarray

GEOMETRIES = ("box", "ball")


@dataclass(frozen=True)
class Astr1Config:
    scaling: ScalingRule
    model: str = "none"
    geometry: str = "box"
    tau: float = 0.1
    kappa_B: float = 1e5
    eps: float = 1e-6
    max_iter: int = 100_000
    cg_rel: float = 1e-5
    cg_abs: float = 1e-12
    instrument_f: bool = False
    record_vectors: bool = False
    lbfgs_memory: int = 3

    def __post_init__(self):
        if not 0.0 < self.tau <= 1.0:
            raise ValueError("tau must lie in (0, 1]")
        if self.kappa_B < 1.0:
            raise ValueError("kappa_B must be >= 1")
        if self.geometry not in GEOMETRIES:
            raise ValueError(f"geometry must be one of {GEOMETRIES}")
        if self.geometry == "ball" and not self.scaling.aggregated:
            raise ValueError("ball geometry requires an aggregated scaling rule")
        if self.eps <= 0.0:
            raise ValueError("eps must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")


@dataclass
class CauchyStep:
    s_L: Array
    gamma: float
    s_Q: Array
    q_Q: float


class _CountingOracle:
    """Counts every oracle call; the zero-objective-call guarantee reads f_evals."""

    def __init__(self, target):
        self.target = target
        self.f_evals = 0
        self.g_evals = 0
        self.h_evals = 0

    def value(self, x):
        self.f_evals += 1
        return self.target.value(x)

    def grad(self, x):
        self.g_evals += 1
        return self.target.grad(x)

    def hess(self, x):
        self.h_evals += 1
        return self.target.hess(x)


@dataclass
class IterationTrace:
    """Per-iteration diagnostics of one run.

    ``normg``/``f`` have one entry per gradient evaluation; the step-indexed
    arrays (weights, radii, model values, residuals) have one entry per step
    taken.  ``sbound_resid`` is max_i (|s_i| - Delta_i) / (1 + Delta_i) (the
    ball analogue uses norms); ``gcp_resid`` is q(s) - tau * q(s_Q).
    """

    status: str
    eps: float
    normg: Array
    f: Array
    w_min: Array
    w_max: Array
    delta_min: Array
    delta_max: Array
    gamma: Array
    q_step: Array
    q_cauchy: Array
    norm_B: Array
    sbound_resid: Array
    gcp_resid: Array
    step_norm: Array
    x_final: Array
    final_normg: float
    f_evals: int
    g_evals: int
    h_evals: int
    x_hist: Optional[list] = None
    g_hist: Optional[list] = None
    w_hist: Optional[list] = None
    s_hist: Optional[list] = None

    @property
    def steps(self) -> int:
        return len(self.gamma)

    @property
    def iterations(self) -> int:
        return self.g_evals

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["k", "normg", "f", "delta_min", "delta_max", "gamma", "status"])
            last = len(self.normg) - 1
            for k in range(len(self.normg)):
                stepped = k < len(self.gamma)
                wr.writerow(
                    [
                        k,
                        f"{self.normg[k]:.12g}",
                        "" if np.isnan(self.f[k]) else f"{self.f[k]:.12g}",
                        f"{self.delta_min[k]:.12g}" if stepped else "",
                        f"{self.delta_max[k]:.12g}" if stepped else "",
                        f"{self.gamma[k]:.12g}" if stepped else "",
                        self.status if k == last else "",
                    ]
                )


class _TraceBuilder:
    _STEP_COLS = (
        "w_min", "w_max", "delta_min", "delta_max", "gamma", "q_step",
        "q_cauchy", "norm_B", "sbound_resid", "gcp_resid", "step_norm",
    )

    def __init__(self, record_vectors: bool):
        self.normg: list = []
        self.f: list = []
        self.cols = {c: [] for c in self._STEP_COLS}
        self.record_vectors = record_vectors
        self.x_hist: Optional[list] = [] if record_vectors else None
        self.g_hist: Optional[list] = [] if record_vectors else None
        self.w_hist: Optional[list] = [] if record_vectors else None
        self.s_hist: Optional[list] = [] if record_vectors else None

    def add_eval(self, normg, f_val, x=None, g=None):
        self.normg.append(normg)
        self.f.append(np.nan if f_val is None else f_val)
        if self.record_vectors:
            self.x_hist.append(np.array(x, copy=True))
            self.g_hist.append(np.array(g, copy=True))

    def add_step(self, w=None, s=None, **kw):
        for c in self._STEP_COLS:
            self.cols[c].append(kw.get(c, np.nan))
        if self.record_vectors:
            self.w_hist.append(None if w is None else np.array(w, copy=True))
            self.s_hist.append(None if s is None else np.array(s, copy=True))

    def finish(self, status, eps, x_final, oracle) -> IterationTrace:
        return IterationTrace(
            status=status,
            eps=eps,
            normg=np.asarray(self.normg, dtype=float),
            f=np.asarray(self.f, dtype=float),
            x_final=np.array(x_final, copy=True),
            final_normg=self.normg[-1] if self.normg else np.nan,
            f_evals=oracle.f_evals,
            g_evals=oracle.g_evals,
            h_evals=oracle.h_evals,
            x_hist=self.x_hist,
            g_hist=self.g_hist,
            w_hist=self.w_hist,
            s_hist=self.s_hist,
            **{c: np.asarray(v, dtype=float) for c, v in self.cols.items()},
        )


def trust_radius(g: Array, w: Array, geometry: str):
    """Radii from the scaled gradient: per-coordinate (box) or scalar (ball)."""
    if geometry == "box":
        return np.abs(g) / w
    return float(np.linalg.norm(g) / w[0])


def cauchy_step(g: Array, matvec, radii, geometry: str) -> CauchyStep:
    """Scaled steepest-descent step and its model minimizer along that ray."""
    if geometry == "box":
        s_L = -np.sign(g) * radii
    else:
        normg = np.linalg.norm(g)
        s_L = -(radii / normg) * g if normg > 0 else np.zeros_like(g)
    Bs = matvec(s_L)
    curv = float(s_L @ Bs)
    gs = float(g @ s_L)
    if curv > 0.0:
        gamma = min(1.0, abs(gs) / curv)
    else:
        gamma = 1.0
    s_Q = gamma * s_L
    q_Q = gamma * gs + 0.5 * gamma * gamma * curv
    return CauchyStep(s_L=s_L, gamma=gamma, s_Q=s_Q, q_Q=q_Q)


def _max_feasible(s, p, delta, free):
    """Largest step along p keeping |s_i| <= delta_i; returns (alpha, binding mask)."""
    n = s.size
    alphas = np.full(n, np.inf)
    moving = free & (p != 0.0)
    bound = np.where(p > 0.0, delta, -delta)
    alphas[moving] = (bound[moving] - s[moving]) / p[moving]
    alphas = np.maximum(alphas, 0.0)
    a_bd = float(alphas.min()) if moving.any() else np.inf
    binding = moving & (alphas <= a_bd * (1.0 + 1e-12))
    return a_bd, binding, bound


def _cg_box(g, matvec, delta, tol):
    """Truncated conjugate gradients on the quadratic model inside the box.

    Plain CG in the free subspace; when an iterate would leave the box the
    step is truncated, the binding coordinates are frozen at their bounds and
    CG restarts in the reduced subspace (at most n restarts).
    """
    n = g.size
    s = np.zeros(n)
    fixed = delta <= 0.0
    for _ in range(n + 1):
        free = ~fixed
        if not free.any():
            break
        r = -(g + matvec(s))
        r[fixed] = 0.0
        rr = float(r @ r)
        if np.sqrt(rr) <= tol:
            break
        p = r.copy()
        truncated = False
        for _ in range(2 * n + 5):
            Bp = matvec(p)
            Bp[fixed] = 0.0
            pBp = float(p @ Bp)
            a_bd, binding, bound = _max_feasible(s, p, delta, free)
            if pBp <= 0.0:
                # negative curvature: ride p to the boundary
                if not np.isfinite(a_bd):
                    break
                s = s + a_bd * p
                s[binding] = bound[binding]
                fixed = fixed | binding
                truncated = True
                break
            alpha = rr / pBp
            if alpha >= a_bd:
                s = s + a_bd * p
                s[binding] = bound[binding]
                fixed = fixed | binding
                truncated = True
                break
            s = s + alpha * p
            r = r - alpha * Bp
            rr_new = float(r @ r)
            if np.sqrt(rr_new) <= tol:
                break
            p = r + (rr_new / rr) * p
            rr = rr_new
        if not truncated:
            break
    np.clip(s, -delta, delta, out=s)
    return s


def _ball_boundary(s, p, delta):
    ss = float(s @ s)
    sp = float(s @ p)
    pp = float(p @ p)
    disc = max(sp * sp + pp * (delta * delta - ss), 0.0)
    return (-sp + np.sqrt(disc)) / pp


def _cg_ball(g, matvec, delta, tol):
    """Truncated conjugate gradients with boundary exit in the Euclidean ball."""
    n = g.size
    s = np.zeros(n)
    r = -g.copy()
    rr = float(r @ r)
    if np.sqrt(rr) <= tol:
        return s
    p = r.copy()
    for _ in range(2 * n + 5):
        Bp = matvec(p)
        pBp = float(p @ Bp)
        if pBp <= 0.0:
            s = s + _ball_boundary(s, p, delta) * p
            break
        alpha = rr / pBp
        s_try = s + alpha * p
        if np.linalg.norm(s_try) >= delta:
            s = s + _ball_boundary(s, p, delta) * p
            break
        s = s_try
        r = r - alpha * Bp
        rr_new = float(r @ r)
        if np.sqrt(rr_new) <= tol:
            break
        p = r + (rr_new / rr) * p
        rr = rr_new
    nrm = np.linalg.norm(s)
    if nrm > delta and nrm > 0:
        s *= delta / nrm
    return s


def solve_subproblem(g, model, radii, geometry, cauchy: CauchyStep, tau: float, tol: float):
    """Step inside the trust region achieving the required model decrease.

    Returns ``(s, q(s))``; falls back to the scaled Cauchy point whenever the
    iterative solve misses the tau-fraction decrease, which makes the
    decrease contract unconditional.
    """
    if model.is_zero:
        return cauchy.s_L.copy(), float(g @ cauchy.s_L)
    if geometry == "box":
        s = _cg_box(g, model.matvec, radii, tol)
    else:
        s = _cg_ball(g, model.matvec, radii, tol)
    q_s = float(g @ s + 0.5 * (s @ model.matvec(s)))
    if not np.isfinite(q_s) or q_s > tau * cauchy.q_Q:
        return cauchy.s_Q.copy(), cauchy.q_Q
    return s, q_s


def _sbound_residual(s, radii, geometry):
    if geometry == "box":
        return float(np.max((np.abs(s) - radii) / (1.0 + radii)))
    return float((np.linalg.norm(s) - radii) / (1.0 + radii))


def astr1_run(problem, cfg: Astr1Config) -> IterationTrace:
    """Run the adaptively scaled trust-region iteration on a problem or oracle."""
    base = base_problem(problem)
    oracle = _CountingOracle(problem)
    x = np.array(base.x0, dtype=float)
    n = base.n
    rule = cfg.scaling
    state = new_state(rule, n)
    model = make_model(cfg.model, kappa_B=cfg.kappa_B, memory=cfg.lbfgs_memory)
    tr = _TraceBuilder(cfg.record_vectors)
    prev_g = None
    prev_s = None
    status = "max_iter"
    for _ in range(cfg.max_iter):
        try:
            g = oracle.grad(x)
        except NonFiniteError:
            status = "overflow"
            break
        normg = float(np.linalg.norm(g))
        f_val = None
        if cfg.instrument_f:
            try:
                f_val = oracle.value(x)
            except NonFiniteError:
                status = "overflow"
                break
        tr.add_eval(normg, f_val, x=x, g=g)
        if normg <= cfg.eps:
            status = "converged"
            break
        if prev_g is not None:
            model = model.update(prev_s, g - prev_g)
        if cfg.model == "exact":
            try:
                model = model.with_matrix(oracle.hess(x))
            except NonFiniteError:
                status = "overflow"
                break
        state = update(state, rule, g)
        w = weights(state, rule)
        radii = trust_radius(g, w, cfg.geometry)
        cs = cauchy_step(g, model.matvec, radii, cfg.geometry)
        tol = max(cfg.cg_abs, cfg.cg_rel * normg)
        s, q_s = solve_subproblem(g, model, radii, cfg.geometry, cs, cfg.tau, tol)
        if not np.all(np.isfinite(s)):
            status = "overflow"
            break
        tr.add_step(
            w=w,
            s=s,
            w_min=float(w.min()),
            w_max=float(w.max()),
            delta_min=float(np.min(radii)),
            delta_max=float(np.max(radii)),
            gamma=cs.gamma,
            q_step=q_s,
            q_cauchy=cs.q_Q,
            norm_B=model.norm_estimate(),
            sbound_resid=_sbound_residual(s, radii, cfg.geometry),
            gcp_resid=q_s - cfg.tau * cs.q_Q,
            step_norm=float(np.linalg.norm(s)),
        )
        x = x + s
        prev_g, prev_s = g, s
    return tr.finish(status, cfg.eps, x, oracle)


def sdba_run(
    problem,
    eps: float = 1e-6,
    max_iter: int = 100_000,
    c1: float = 1e-4,
    max_backtracks: int = 50,
    record_vectors: bool = False,
) -> IterationTrace:
    """Steepest descent with Armijo backtracking (the objective-using baseline).

    Trial steps halve from an initial stepsize of 1 / ||g(x0)||; exhausting
    the backtracks yields a ``linesearch_failure`` status.
    """
    base = base_problem(problem)
    oracle = _CountingOracle(problem)
    x = np.array(base.x0, dtype=float)
    tr = _TraceBuilder(record_vectors)
    status = "max_iter"
    try:
        g = oracle.grad(x)
        f = oracle.value(x)
    except NonFiniteError:
        return tr.finish("overflow", eps, x, oracle)
    normg0 = float(np.linalg.norm(g))
    alpha0 = 1.0 / normg0 if normg0 > 0 else 1.0
    for _ in range(max_iter):
        normg = float(np.linalg.norm(g))
        tr.add_eval(normg, f, x=x, g=g)
        if normg <= eps:
            status = "converged"
            break
        alpha = alpha0
        accepted = False
        for _ in range(max_backtracks + 1):
            x_try = x - alpha * g
            try:
                f_try = oracle.value(x_try)
            except NonFiniteError:
                f_try = np.inf
            if f_try <= f - c1 * alpha * normg * normg:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            status = "linesearch_failure"
            break
        tr.add_step(step_norm=float(alpha * normg))
        x = x_try
        f = f_try
        try:
            g = oracle.grad(x)
        except NonFiniteError:
            status = "overflow"
            break
    return tr.finish(status, eps, x, oracle)
