"""Experiment sweeps over the synthetic protocols.

Two protocols are available:

``"5.2"``  joint cut + matching on one graph. One axis among gamma, sigma,
          mu and rho varies while the others stay at the combined-disturbance
          setting. Solvers: CutMatch for each lambda pair, spectral cut,
          balanced cut and one-graph IBGP.
``"5.1"``  two-graph matching with IBGP: deformation, outlier and density
          tests.

Trial seeds come from ``numpy.random.SeedSequence(seed)``: one child per cell
and one grandchild per trial, so results do not depend on scheduling. Cells
run in a process pool and are merged back in cell order.
"""

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .affinity import build_affinity, build_similarity
from .cut import balanced_cut, sign_discretize, spectral_cut
from .graph import SolverConfig
from .hungarian import solve_assignment
from .ibgp import ibgp_gm
from .metrics import cut_accuracy, inlier_accuracy, matching_accuracy
from .oracle import permutation_matrix
from .solver import cutmatch_solve, discretize, initialize
from .synthetic import (
    DEFORMATION_GRID,
    DENSITY_GRID,
    OUTLIER_GRID,
    GmPairConfig,
    SyntheticConfig,
    generate_gm_pair,
    generate_joint,
)

PROTOCOLS = ("5.1", "5.2")
DEFAULT_TRIALS = {"5.1": 30, "5.2": 80}
LAMBDA_PAIRS = ((200.0, 50.0), (150.0, 30.0), (100.0, 20.0))

JOINT_BASE = {"gamma": 0.2, "sigma": 0.1, "mu": 0.3, "rho": 0.1}
JOINT_AXES = {
    "gamma": (0.0, 0.2, 0.4, 0.6, 0.8),
    "sigma": (0.0, 0.05, 0.1, 0.15, 0.2),
    "mu": (0.0, 0.1, 0.2, 0.3, 0.4),
    "rho": (0.0, 0.05, 0.1, 0.15, 0.2),
}
JOINT_PARAMS = ("axis", "gamma", "sigma", "mu", "rho")
GM_PARAMS = ("test", "deformation", "outliers", "density")
RESULT_COLUMNS = ("solver", "metric", "mean", "std", "n_trials", "mean_runtime_ms")


def joint_grid():
    cells = []
    for axis, values in JOINT_AXES.items():
        for v in values:
            cells.append({"axis": axis, **JOINT_BASE, axis: v})
    return cells


def gm_grid():
    cells = [{"test": "deformation", "deformation": d, "outliers": 0, "density": 1.0} for d in DEFORMATION_GRID]
    cells += [{"test": "outlier", "deformation": 0.0, "outliers": k, "density": 1.0} for k in OUTLIER_GRID]
    cells += [{"test": "density", "deformation": 0.25, "outliers": 5, "density": p} for p in DENSITY_GRID]
    return cells


def grid(protocol):
    if protocol == "5.2":
        return joint_grid()
    if protocol == "5.1":
        return gm_grid()
    raise ValueError(f"unknown protocol {protocol!r}; expected one of {PROTOCOLS}")


def solver_names(protocol, lambdas=LAMBDA_PAIRS):
    if protocol == "5.1":
        return ["ibgp"]
    names = [cutmatch_name(l1, l2) for l1, l2 in lambdas]
    return names + ["spectral_cut", "balanced_cut", "ibgp"]


def cutmatch_name(l1, l2):
    return f"cutmatch_{l1:g}_{l2:g}"


def trial_seeds(seed, n_cells, trials):
    """``seeds[c][t]``: a 32-bit integer seed for trial ``t`` of cell ``c``."""
    root = np.random.SeedSequence(seed)
    return [
        [int(s.generate_state(1)[0]) for s in child.spawn(trials)]
        for child in root.spawn(n_cells)
    ]


def _timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, 1000.0 * (time.perf_counter() - t)


def joint_trial(params, seed, lambdas=LAMBDA_PAIRS, cfg=None):
    """One synthetic joint instance scored by every solver.

    Returns ``{solver: ({metric: value}, runtime_ms)}``. CutMatch runs share
    the one-graph IBGP solve as their raw matching, so its runtime is added
    to theirs.
    """
    cfg = cfg or SolverConfig()
    sc = SyntheticConfig(
        gamma=params["gamma"], sigma=params["sigma"], mu=params["mu"], rho=params["rho"], seed=seed
    )
    g, gt = generate_joint(sc)
    A = build_affinity(g, sc.delta1)
    W = build_similarity(g, sc.delta2, sc.delta3)
    n = g.n
    out = {}

    y, ms = _timed(lambda: spectral_cut(W))
    out["spectral_cut"] = ({"cut_accuracy": cut_accuracy(sign_discretize(y), gt.labels)}, ms)
    lab, ms = _timed(lambda: balanced_cut(W))
    out["balanced_cut"] = ({"cut_accuracy": cut_accuracy(lab, gt.labels)}, ms)

    def vanilla():
        st = ibgp_gm(A, eps=cfg.eps, tol=cfg.tol_step, max_ibgp=cfg.max_ibgp)
        return solve_assignment(st.X, forbidden=np.eye(n, dtype=bool))

    sigma, ibgp_ms = _timed(vanilla)
    out["ibgp"] = ({"matching_accuracy": matching_accuracy(sigma, gt.correspondence)}, ibgp_ms)

    raw = permutation_matrix(sigma)
    for l1, l2 in lambdas:
        c = SolverConfig(
            lambda1=l1, lambda2=l2, eps=cfg.eps, tol_obj=cfg.tol_obj, max_outer=cfg.max_outer,
            max_ibgp=cfg.max_ibgp, projection=cfg.projection,
        )

        def run():
            init = initialize(A, W, c, raw_matching=raw)
            res = cutmatch_solve(A, W, c, init=init)
            return res, discretize(res.X, res.y)

        (res, (s, labels)), ms = _timed(run)
        out[cutmatch_name(l1, l2)] = (
            {
                "cut_accuracy": cut_accuracy(labels, gt.labels),
                "matching_accuracy": matching_accuracy(s, gt.correspondence),
                "outer_iterations": float(len(res.trace.records)),
            },
            ms + ibgp_ms,
        )
    return out


def gm_trial(params, seed, cfg=None):
    cfg = cfg or SolverConfig()
    pair = generate_gm_pair(
        GmPairConfig(
            deformation=params["deformation"], outliers=params["outliers"], density=params["density"], seed=seed
        )
    )

    def run():
        st = ibgp_gm(pair.A, eps=cfg.eps, tol=cfg.tol_step, max_ibgp=cfg.max_ibgp)
        return solve_assignment(st.X)

    sigma, ms = _timed(run)
    x = permutation_matrix(sigma).reshape(-1, order="F")
    score = float(x @ (pair.A @ x))
    return {"ibgp": ({"accuracy": inlier_accuracy(sigma, pair.perm), "score": score}, ms)}


def _run_cell(protocol, params, seeds, lambdas):
    """Per-trial results for one cell; a failing trial becomes ``None``."""
    results = []
    for s in seeds:
        try:
            if protocol == "5.2":
                results.append(joint_trial(params, s, lambdas))
            else:
                results.append(gm_trial(params, s))
        except Exception as exc:  # recorded, not fatal
            results.append({"error": repr(exc)})
    return results


METRICS = {
    "spectral_cut": ("cut_accuracy",),
    "balanced_cut": ("cut_accuracy",),
    "ibgp": ("matching_accuracy",),
}


def _metrics_for(protocol, solver):
    if protocol == "5.1":
        return ("accuracy", "score")
    if solver.startswith("cutmatch_"):
        return ("cut_accuracy", "matching_accuracy", "outer_iterations")
    return METRICS[solver]


@dataclass
class SweepResult:
    protocol: str
    param_names: tuple
    rows: list = field(default_factory=list)
    trials: list = field(default_factory=list)  # per cell: list of per-trial dicts

    @property
    def columns(self):
        return tuple(self.param_names) + RESULT_COLUMNS

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.columns)
            for r in self.rows:
                w.writerow([_fmt(r[c]) for c in self.columns])

    def write_json(self, path):
        doc = {"protocol": self.protocol, "rows": self.rows, "trials": self.trials}
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1, default=_json_default)


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(type(o))


def run_sweep(protocol, trials=None, seed=0, jobs=1, lambdas=LAMBDA_PAIRS, cells=None):
    """Run every cell of ``protocol`` and aggregate mean / std per solver and metric."""
    if protocol not in PROTOCOLS:
        raise ValueError(f"unknown protocol {protocol!r}; expected one of {PROTOCOLS}")
    trials = DEFAULT_TRIALS[protocol] if trials is None else int(trials)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    cells = grid(protocol) if cells is None else list(cells)
    seeds = trial_seeds(seed, len(cells), trials)
    args = [(protocol, p, s, tuple(lambdas)) for p, s in zip(cells, seeds)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            outputs = list(ex.map(_run_cell, *zip(*args)))
    else:
        outputs = [_run_cell(*a) for a in args]

    names = GM_PARAMS if protocol == "5.1" else JOINT_PARAMS
    result = SweepResult(protocol, names)
    for params, per_trial in zip(cells, outputs):
        result.trials.append({"params": params, "results": per_trial})
        for solver in solver_names(protocol, lambdas):
            runtimes = [t[solver][1] for t in per_trial if solver in t]
            for metric in _metrics_for(protocol, solver):
                vals = np.array(
                    [t[solver][0][metric] if solver in t else np.nan for t in per_trial], dtype=float
                )
                row = {k: params[k] for k in names}
                row.update(
                    solver=solver,
                    metric=metric,
                    mean=float(vals.mean()),
                    std=float(vals.std()),
                    n_trials=len(vals),
                    mean_runtime_ms=float(np.mean(runtimes)) if runtimes else float("nan"),
                )
                result.rows.append(row)
    return result
