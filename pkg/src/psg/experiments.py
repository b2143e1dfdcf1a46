"""Seeded Monte Carlo sweeps producing one CSV row per plotted point.

Trial ``t`` of a point keyed by ``k`` always uses the same derived seeds, so
results do not depend on worker count or completion order.
"""

import csv
import io
import json
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from psg.bounds import restricted_lower_bound, restricted_upper_bound
from psg.css import run_css
from psg.greedy import EpsilonRangeWarning, run_selector
from psg.instances import gen_css_instance, gen_instance, sample_size_n
from psg.linalg import as_matrix, best_rank_k_error
from psg.rng import derive_seed

KINDS = ("recovery-sweep", "restricted-sweep", "css-sweep")
R_RULES = ("fixed", "m/sqrt(k)", "m/2", "alpha1*m", "m")

CSV_COLUMNS = (
    "experiment",
    "k",
    "m",
    "n",
    "method",
    "parameter",
    "trials",
    "successes",
    "success_rate",
    "mean_oracle_calls",
    "mean_error",
    "theory_lower",
    "theory_upper",
    "svd_baseline",
    "error_trials",
    "wall_seconds",
)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    kind: str
    k_values: list
    betas: list = field(default_factory=list)
    epsilons: list = field(default_factory=list)
    r_rule: str | None = None
    r: int | None = None
    alpha1: float | None = None
    trials: int = 200
    master_seed: int = 0
    m_rule: str | int = "2k^1.5"
    n_rule: str | int = "sample_size"
    n_beta: float = 0.1
    replacement: bool = False
    n_rows: int = 200
    m_cols: int = 1000
    span_size: int = 20
    perturbation: float = 0.1
    timing: bool = False
    output: str | None = None

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        missing = [key for key in ("kind", "k_values") if key not in data]
        if missing:
            raise ConfigError(f"missing config keys: {', '.join(missing)}")
        config = cls(**data)
        config.validate()
        return config

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: {exc}") from exc
        return cls.from_dict(data)

    def validate(self):
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}")
        if not self.k_values or any(not isinstance(k, int) or k < 1 for k in self.k_values):
            raise ConfigError("k_values must be a non-empty list of positive integers")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError("trials must be a positive integer")
        if not isinstance(self.master_seed, int):
            raise ConfigError("master_seed must be an integer")
        if self.kind == "recovery-sweep":
            if not self.betas or any(not 0 < b < 1 for b in self.betas):
                raise ConfigError("recovery-sweep needs betas in (0, 1)")
        if self.kind == "restricted-sweep":
            if self.r_rule not in R_RULES:
                raise ConfigError(f"restricted-sweep needs r_rule in {R_RULES}")
            if self.r_rule == "fixed" and (not isinstance(self.r, int) or self.r < 1):
                raise ConfigError("r_rule 'fixed' needs a positive integer r")
            if self.r_rule == "alpha1*m" and not (self.alpha1 is not None and 0 < self.alpha1 < 1):
                raise ConfigError("r_rule 'alpha1*m' needs alpha1 in (0, 1)")
            if not 0 < self.n_beta < 1:
                raise ConfigError("n_beta must lie in (0, 1)")
        if self.kind == "css-sweep":
            if any(not 0 < e < 1 for e in self.epsilons):
                raise ConfigError("epsilons must lie in (0, 1)")
            if not 1 <= self.span_size < self.m_cols or self.span_size > self.n_rows:
                raise ConfigError("need 1 <= span_size < m_cols and span_size <= n_rows")
            if self.perturbation < 0:
                raise ConfigError("perturbation must be non-negative")
        else:
            for k in self.k_values:
                m = self.m_for(k)
                if m <= k:
                    raise ConfigError(f"m rule gives m={m} <= k={k}")

    def m_for(self, k):
        if isinstance(self.m_rule, int):
            return self.m_rule
        if self.m_rule == "2k^1.5":
            return int(round(2 * k**1.5))
        raise ConfigError(f"unknown m_rule {self.m_rule!r}")

    def n_for(self, k, m, beta):
        if isinstance(self.n_rule, int):
            return self.n_rule
        if self.n_rule == "sample_size":
            try:
                return sample_size_n(k, m, beta)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        raise ConfigError(f"unknown n_rule {self.n_rule!r}")

    def r_for(self, k, m):
        rule = self.r_rule
        if rule == "fixed":
            r = self.r
        elif rule == "m/sqrt(k)":
            r = round(m / math.sqrt(k))
        elif rule == "m/2":
            r = round(m / 2)
        elif rule == "alpha1*m":
            r = round(self.alpha1 * m)
        else:
            r = m
        return int(min(max(r, 1), m))


@dataclass
class ResultRow:
    experiment: str
    k: int
    m: int
    n: int
    method: str
    parameter: float | int | None = None
    trials: int = 0
    successes: int | None = None
    success_rate: float | None = None
    mean_oracle_calls: float | None = None
    mean_error: float | None = None
    theory_lower: float | None = None
    theory_upper: float | None = None
    svd_baseline: float | None = None
    error_trials: int = 0
    wall_seconds: float | None = None


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        d = asdict(row)
        writer.writerow([_fmt(d[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def write_csv(rows, path):
    with open(path, "w", newline="") as fh:
        fh.write(rows_to_csv(rows))


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _map(fn, tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    chunk = max(1, len(tasks) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))


def _selector_trial(task):
    method, m, n, k, master, t, extra = task
    start = time.perf_counter()
    try:
        inst = gen_instance(m, n, k, derive_seed(master, k, t, 0))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", EpsilonRangeWarning)
            trace = run_selector(method, inst.A, inst.y, k, seed=derive_seed(master, k, t, 1), **extra)
        return {
            "ok": True,
            "success": trace.matches(inst.support),
            "oracle_calls": trace.oracle_calls,
            "seconds": time.perf_counter() - start,
        }
    except Exception as exc:  # one bad trial must not sink the sweep
        return {"ok": False, "error": repr(exc), "seconds": time.perf_counter() - start}


def _aggregate(experiment, k, m, n, method, parameter, results, config):
    good = [r for r in results if r["ok"]]
    successes = sum(1 for r in good if r["success"])
    return ResultRow(
        experiment=experiment,
        k=k,
        m=m,
        n=n,
        method=method,
        parameter=parameter,
        trials=len(results),
        successes=successes,
        success_rate=successes / len(results),
        mean_oracle_calls=float(np.mean([r["oracle_calls"] for r in good])) if good else None,
        error_trials=len(results) - len(good),
        wall_seconds=math.fsum(r["seconds"] for r in results) if config.timing else None,
    )


def _run_points(points, config, workers):
    tasks, spans = [], []
    for point in points:
        start = len(tasks)
        tasks.extend(point["tasks"])
        spans.append((start, len(tasks)))
    results = _map(_selector_trial, tasks, workers)
    return [results[a:b] for a, b in spans]


def run_mc_recovery(config, workers=1):
    """PSG with eps = beta/k for every (beta, k); success is exact support match."""
    if config.kind != "recovery-sweep":
        raise ConfigError("run_mc_recovery needs a recovery-sweep config")
    points = []
    for beta in config.betas:
        for k in config.k_values:
            m = config.m_for(k)
            n = config.n_for(k, m, beta)
            eps = beta / k
            extra = {"epsilon": eps, "replacement": config.replacement}
            tasks = [("psg", m, n, k, config.master_seed, t, extra) for t in range(config.trials)]
            points.append({"beta": beta, "k": k, "m": m, "n": n, "eps": eps, "tasks": tasks})
    rows = []
    for point, results in zip(points, _run_points(points, config, workers)):
        row = _aggregate("recovery", point["k"], point["m"], point["n"], "psg", point["eps"], results, config)
        row.theory_lower = 1 - 2 * point["beta"]
        rows.append(row)
    return rows


def run_mc_restricted(config, workers=1):
    """OMP restricted to a fresh random set of r indices per iteration."""
    if config.kind != "restricted-sweep":
        raise ConfigError("run_mc_restricted needs a restricted-sweep config")
    points = []
    for k in config.k_values:
        m = config.m_for(k)
        n = config.n_for(k, m, config.n_beta)
        r = config.r_for(k, m)
        extra = {"r": r, "replacement": config.replacement}
        tasks = [("restricted", m, n, k, config.master_seed, t, extra) for t in range(config.trials)]
        points.append({"k": k, "m": m, "n": n, "r": r, "tasks": tasks})
    rows = []
    for point, results in zip(points, _run_points(points, config, workers)):
        k, m, r = point["k"], point["m"], point["r"]
        row = _aggregate("restricted", k, m, point["n"], "restricted", r, results, config)
        if r < m:
            row.theory_upper = restricted_upper_bound(m, k, r).value
            row.theory_lower = restricted_lower_bound(k, r / m)
        rows.append(row)
    return rows


def _css_trial(task):
    config_dict, t, matrix = task
    config = ExperimentConfig(**config_dict)
    master = config.master_seed
    start = time.perf_counter()
    try:
        if matrix is None:
            D = gen_css_instance(
                config.n_rows, config.m_cols, config.span_size, config.perturbation, derive_seed(master, t, 0)
            ).D
        else:
            D = matrix
        kmax = max(config.k_values)
        greedy = run_css("greedy", D, kmax)
        rand = run_css("random", D, kmax, seed=derive_seed(master, t, 1))
        out = {"ok": True, "points": {}}
        for k in config.k_values:
            point = {}
            # greedy and random traces at k are prefixes of the kmax traces
            for name, trace, per_step in (("greedy", greedy, D.shape[1]), ("random", rand, 0)):
                steps = min(k, len(trace.errors_by_step))
                point[(name, None)] = (trace.errors_by_step[steps - 1], per_step * steps)
            for e_idx, eps in enumerate(config.epsilons):
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", EpsilonRangeWarning)
                    tr = run_css("psg", D, k, epsilon=eps, seed=derive_seed(master, t, 2, k, e_idx))
                point[("psg", eps)] = (tr.error, tr.oracle_calls)
            point[("svd", None)] = (best_rank_k_error(D, min(k, *D.shape)), 0)
            out["points"][k] = point
        out["seconds"] = time.perf_counter() - start
        return out
    except Exception as exc:
        return {"ok": False, "error": repr(exc), "seconds": time.perf_counter() - start}


def run_css_experiment(config, workers=1, matrix=None):
    """Greedy, PSG (each epsilon) and random column selection per k, with
    the best rank-k error as a baseline."""
    if config.kind != "css-sweep":
        raise ConfigError("run_css_experiment needs a css-sweep config")
    if matrix is not None:
        matrix = as_matrix(matrix, "matrix")
        n_rows, m_cols = matrix.shape
    else:
        n_rows, m_cols = config.n_rows, config.m_cols
    if max(config.k_values) > m_cols:
        raise ConfigError(f"k values exceed the {m_cols} available columns")
    cfg = asdict(config)
    results = _map(_css_trial, [(cfg, t, matrix) for t in range(config.trials)], workers)
    good = [r for r in results if r["ok"]]
    n_err = len(results) - len(good)
    wall = math.fsum(r["seconds"] for r in results) if config.timing else None

    rows = []
    for k in config.k_values:
        keys = [("greedy", None)] + [("psg", e) for e in config.epsilons] + [("random", None)]
        svd = float(np.mean([r["points"][k][("svd", None)][0] for r in good])) if good else None
        for method, param in keys:
            vals = [r["points"][k][(method, param)] for r in good]
            rows.append(
                ResultRow(
                    experiment="css",
                    k=k,
                    m=m_cols,
                    n=n_rows,
                    method=method,
                    parameter=param,
                    trials=len(results),
                    mean_oracle_calls=float(np.mean([v[1] for v in vals])) if vals else None,
                    mean_error=float(np.mean([v[0] for v in vals])) if vals else None,
                    svd_baseline=svd,
                    error_trials=n_err,
                    wall_seconds=wall,
                )
            )
    return rows


def run_experiment(config, workers=1, matrix=None):
    if config.kind == "recovery-sweep":
        return run_mc_recovery(config, workers)
    if config.kind == "restricted-sweep":
        return run_mc_restricted(config, workers)
    return run_css_experiment(config, workers, matrix)
