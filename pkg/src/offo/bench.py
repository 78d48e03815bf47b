"""Batch harness: method x problem x noise matrix, profiles and aggregates.

Efficiency is measured in oracle effort: gradient evaluations for the
objective-free methods, gradient plus objective evaluations for the
backtracking baseline.  Reliability (rho) is the percentage of runs reaching
the gradient tolerance; pi condenses a method's performance-profile curve on
ratio abscissas [1, 50] into a single number.
"""
from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .problems import NoisyOracle, default_suite, make_problem
from .scaling import rule_from_name
from .solver import Astr1Config, astr1_run, sdba_run


def make_default_problem_list() -> list[tuple]:
    """The desk suite as (name, n) pairs."""
    return default_suite()

#: problems whose Lipschitz constant is known exactly (quadratics)
EXACT_L_PROBLEMS = (("tridia", 10), ("hilbert", 10), ("arglina", 10), ("arglinb", 10))

PROFILE_T_MAX = 50.0


@dataclass(frozen=True)
class MethodSpec:
    name: str
    scaling: Optional[str]
    model: str
    geometry: str

    @property
    def is_sdba(self) -> bool:
        return self.scaling is None


def _table_methods() -> dict:
    out = {}
    for rule_name in ("adagrad", "adagnorm", "adam", "adamnorm", "maxg", "maxgnorm",
                      "adagrads", "adams", "maxgs"):
        geometry = "ball" if "norm" in rule_name else "box"
        out[rule_name] = MethodSpec(rule_name, rule_name, "none", geometry)
    for suffix, model in (("bb", "bb"), ("bfgs3", "lbfgs3"), ("H", "exact")):
        out[f"adag{suffix}"] = MethodSpec(f"adag{suffix}", "adagrad", model, "box")
        out[f"adag{suffix}s"] = MethodSpec(f"adag{suffix}s", "adagrads", model, "box")
    out["sdba"] = MethodSpec("sdba", None, "none", "box")
    return out


METHODS = _table_methods()


@dataclass(frozen=True)
class RunRecord:
    method: str
    problem: str
    n: int
    noise: float
    seed: int
    eps: float
    status: str
    iterations: int
    final_normg: float
    f_evals: int
    g_evals: int
    h_evals: int

    @property
    def converged(self) -> bool:
        return self.status == "converged"


def run_one(
    method: str,
    problem_name: str,
    n: Optional[int],
    noise: float,
    seed: int,
    eps: float,
    max_iter: int = 100_000,
) -> RunRecord:
    """One benchmark run; never raises, failures land in the status field."""
    spec = METHODS[method]
    problem = make_problem(problem_name, n)
    target = problem if noise == 0.0 else NoisyOracle(problem, noise, seed)
    if spec.is_sdba:
        trace = sdba_run(target, eps=eps, max_iter=max_iter)
        effort = trace.g_evals + trace.f_evals
    else:
        cfg = Astr1Config(
            scaling=rule_from_name(spec.scaling),
            model=spec.model,
            geometry=spec.geometry,
            eps=eps,
            max_iter=max_iter,
        )
        trace = astr1_run(target, cfg)
        effort = trace.g_evals
    return RunRecord(
        method=method,
        problem=problem.name,
        n=problem.n,
        noise=noise,
        seed=seed,
        eps=eps,
        status=trace.status,
        iterations=effort,
        final_normg=float(trace.final_normg),
        f_evals=trace.f_evals,
        g_evals=trace.g_evals,
        h_evals=trace.h_evals,
    )


def _run_spec(args):
    return run_one(*args)


def run_matrix(
    methods: Sequence[str],
    problems: Sequence[tuple],
    noise_levels: Sequence[float],
    seeds: Sequence[int],
    eps: float = 1e-6,
    max_iter: int = 100_000,
    jobs: int = 1,
) -> list[RunRecord]:
    """One record per (method, problem, noise, seed), order-independent."""
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method '{m}'; known: {', '.join(sorted(METHODS))}")
    if any(lv > 0 for lv in noise_levels) and not seeds:
        raise ValueError("noisy runs need at least one seed")
    seeds = list(seeds) or [0]
    specs = [
        (m, name, n, noise, seed, eps, max_iter)
        for m in methods
        for (name, n) in problems
        for noise in noise_levels
        for seed in seeds
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_spec, specs, chunksize=1))
    else:
        records = [_run_spec(sp) for sp in specs]
    records.sort(key=lambda r: (r.method, r.problem, r.n, r.noise, r.seed))
    return records


@dataclass
class ProfileReport:
    """Performance profile curves plus the pi / rho aggregates."""

    methods: list
    curves: dict  # method -> (ts, rhos) as lists, right-continuous steps
    pi: dict
    rho: dict

    def to_dict(self) -> dict:
        return {
            "methods": list(self.methods),
            "curves": {m: [list(t), list(r)] for m, (t, r) in self.curves.items()},
            "pi": dict(self.pi),
            "rho": dict(self.rho),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProfileReport":
        return cls(
            methods=list(d["methods"]),
            curves={m: (list(t), list(r)) for m, (t, r) in d["curves"].items()},
            pi=dict(d["pi"]),
            rho=dict(d["rho"]),
        )


def _step_area(ts, rhos, t_max):
    """Area below a right-continuous step curve on [0, t_max], flat before t=1."""
    area = rhos[0] * ts[0]  # constant at the t=1 level down to t=0
    for i in range(len(ts)):
        t_next = ts[i + 1] if i + 1 < len(ts) else t_max
        area += rhos[i] * (min(t_next, t_max) - ts[i])
    return area


def perf_profile(records: Sequence[RunRecord], t_max: float = PROFILE_T_MAX) -> ProfileReport:
    """Classic ratio-to-best profile over (problem, seed) rows.

    rho_m(t) = fraction of rows solved within t times the best effort; rows
    no method solves keep inflating the denominator, so pi <= rho / 100.
    pi is the normalized area of the curve: (1/t_max) * (rho_m(1) +
    integral of rho_m over [1, t_max]).
    """
    records = list(records)
    if not records:
        raise ValueError("empty record set")
    noises = {r.noise for r in records}
    if len(noises) > 1:
        raise ValueError("profile requires records at a single noise level")
    methods = sorted({r.method for r in records})
    rows = sorted({(r.problem, r.n, r.seed) for r in records})
    effort = {}
    for r in records:
        effort[(r.method, r.problem, r.n, r.seed)] = (
            r.iterations if r.converged else np.inf
        )
    best = {
        row: min(effort.get((m,) + row, np.inf) for m in methods) for row in rows
    }
    n_rows = len(rows)
    curves, pis, rhos_pct = {}, {}, {}
    for m in methods:
        ratios = []
        solved = 0
        for row in rows:
            e = effort.get((m,) + row, np.inf)
            if np.isfinite(e):
                solved += 1
                if np.isfinite(best[row]) and best[row] > 0:
                    ratios.append(e / best[row])
        ratios = sorted(t for t in ratios if t <= t_max)
        ts = [1.0]
        vals = [sum(1 for t in ratios if t <= 1.0) / n_rows]
        for t in ratios:
            if t <= 1.0:
                continue
            count = sum(1 for q in ratios if q <= t) / n_rows
            ts.append(t)
            vals.append(count)
        curves[m] = (ts, vals)
        pis[m] = _step_area(ts, vals, t_max) / t_max
        rhos_pct[m] = 100.0 * solved / n_rows
    return ProfileReport(methods=methods, curves=curves, pi=pis, rho=rhos_pct)


def success_rate(records: Sequence[RunRecord], method: str) -> float:
    """Percentage of converged runs of one method in a record set."""
    sel = [r for r in records if r.method == method]
    if not sel:
        raise ValueError(f"no records for method '{method}'")
    return 100.0 * sum(r.converged for r in sel) / len(sel)


def emit(report: ProfileReport, records: Sequence[RunRecord], outdir, fmt: str = "csv"):
    """Write records.csv, profile.csv and aggregate.{csv,json} under outdir."""
    if fmt not in ("csv", "json"):
        raise ValueError("format must be csv or json")
    os.makedirs(outdir, exist_ok=True)
    rec_path = os.path.join(outdir, "records.csv")
    with open(rec_path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(
            ["method", "problem", "n", "noise", "seed", "eps", "status",
             "iterations", "final_normg", "f_evals", "g_evals", "h_evals"]
        )
        for r in records:
            d = asdict(r)
            wr.writerow(
                [d["method"], d["problem"], d["n"], f"{d['noise']:.6g}", d["seed"],
                 f"{d['eps']:.6g}", d["status"], d["iterations"],
                 f"{d['final_normg']:.6g}", d["f_evals"], d["g_evals"], d["h_evals"]]
            )
    prof_path = os.path.join(outdir, "profile.csv")
    with open(prof_path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["method", "t", "rho"])
        for m in report.methods:
            ts, vals = report.curves[m]
            for t, v in zip(ts, vals):
                wr.writerow([m, f"{t:.6g}", f"{v:.6g}"])
    order = sorted(report.methods, key=lambda m: -report.pi[m])
    agg_csv = os.path.join(outdir, "aggregate.csv")
    with open(agg_csv, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["method", "pi", "rho"])
        for m in order:
            wr.writerow([m, f"{report.pi[m]:.6g}", f"{report.rho[m]:.6g}"])
    paths = [rec_path, prof_path, agg_csv]
    if fmt == "json":
        agg_json = os.path.join(outdir, "aggregate.json")
        with open(agg_json, "w") as fh:
            json.dump(report.to_dict(), fh, indent=2)
        paths.append(agg_json)
    return paths
