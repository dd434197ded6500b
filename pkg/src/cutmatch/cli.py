"""Command-line interface: ``cutmatch gen|solve|sweep``.

Exit codes: 0 success, 2 bad arguments, 3 I/O or file-format failure,
4 solver did not converge (the best-so-far solution is still written).
``CUTMATCH_SEED`` in the environment overrides ``--seed``.
"""

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bench
from .affinity import build_affinity, build_similarity, dump_affinity, load_affinity
from .cut import balanced_cut, sign_discretize, spectral_cut
from .graph import GraphError, SolverConfig, load_graph, save_graph
from .hungarian import solve_assignment
from .ibgp import ibgp_gm
from .metrics import cut_accuracy, inlier_accuracy, matching_accuracy
from .solver import cutmatch_solve, discretize, objective
from .synthetic import GmPairConfig, SyntheticConfig, generate_gm_pair, generate_joint

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NOT_CONVERGED = 4


class UsageError(Exception):
    pass


def _seed(args):
    env = os.environ.get("CUTMATCH_SEED")
    if env is not None and env != "":
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"CUTMATCH_SEED must be an integer, got {env!r}") from None
    return args.seed


def _config(ctor, **kw):
    try:
        return ctor(**kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- gen ------------------------------------------------------------------


def cmd_gen_joint(args):
    cfg = _config(
        SyntheticConfig, m=args.m, gamma=args.gamma, sigma=args.sigma, mu=args.mu, rho=args.rho,
        d=args.d, delta1=args.delta1, delta2=args.delta2, delta3=args.delta3, eta=args.eta,
        seed=_seed(args),
    )
    g, gt = generate_joint(cfg)
    save_graph(args.out, g, gt)
    print(f"wrote {args.out}: n={g.n} edges={len(g.edges)} d={g.feature_dim}")
    return EXIT_OK


def cmd_gen_gmpair(args):
    cfg = _config(
        GmPairConfig, inliers=args.inliers, deformation=args.deformation, outliers=args.outliers,
        density=args.density, delta1=args.delta1, seed=_seed(args),
    )
    pair = generate_gm_pair(cfg)
    out = Path(args.out)
    coo = out.with_suffix(".coo")
    dump_affinity(coo, pair.A)
    doc = {"size": pair.size, "affinity_file": coo.name, "perm": pair.perm.tolist()}
    out.write_text(json.dumps(doc))
    print(f"wrote {out} and {coo}: size={pair.size} nnz={pair.A.nnz}")
    return EXIT_OK


# -- solve ----------------------------------------------------------------


def _solver_config(args):
    kw = dict(lambda1=args.lambda1, lambda2=args.lambda2, eps=args.eps, max_outer=args.max_outer)
    if args.tol is not None:
        kw["tol_obj"] = args.tol
    return _config(SolverConfig, **kw)


def _write_json(path, doc):
    if path:
        Path(path).write_text(json.dumps(doc, default=float))


def _load_gm_pair(path):
    doc = json.loads(Path(path).read_text())
    size = int(doc["size"])
    A = load_affinity(Path(path).parent / doc["affinity_file"], size * size)
    return A, np.asarray(doc["perm"], dtype=np.int64)


def cmd_solve(args):
    cfg = _solver_config(args)
    kind = args.solver
    path = Path(args.input)
    if kind == "gm":
        doc = json.loads(path.read_text())
        if "affinity_file" in doc:
            A, perm = _load_gm_pair(path)
            st = ibgp_gm(A, eps=cfg.eps, tol=cfg.tol_step, max_ibgp=cfg.max_ibgp)
            sigma = solve_assignment(st.X)
            print(f"score {st.score:.6g}  accuracy {inlier_accuracy(sigma, perm):.4f}")
            _write_json(args.out, {"assignment": sigma.tolist(), "X": st.X.ravel().tolist()})
            return EXIT_OK if st.converged else EXIT_NOT_CONVERGED

    g, gt = load_graph(path)
    W = build_similarity(g, args.delta2, args.delta3)

    if kind in ("cut", "balanced-cut"):
        labels = sign_discretize(spectral_cut(W)) if kind == "cut" else balanced_cut(W)
        line = f"labels {''.join('+' if v > 0 else '-' for v in labels)}"
        if gt is not None:
            line += f"  cut_accuracy {cut_accuracy(labels, gt.labels):.4f}"
        print(line)
        _write_json(args.out, {"labels": labels.tolist()})
        return EXIT_OK

    A = build_affinity(g, args.delta1)
    if kind == "gm":
        st = ibgp_gm(A, eps=cfg.eps, tol=cfg.tol_step, max_ibgp=cfg.max_ibgp)
        sigma = solve_assignment(st.X, forbidden=np.eye(g.n, dtype=bool))
        line = f"score {st.score:.6g}"
        if gt is not None:
            line += f"  matching_accuracy {matching_accuracy(sigma, gt.correspondence):.4f}"
        print(line)
        _write_json(args.out, {"assignment": sigma.tolist(), "X": st.X.ravel().tolist()})
        return EXIT_OK if st.converged else EXIT_NOT_CONVERGED

    res = cutmatch_solve(A, W, cfg)
    sigma, labels = discretize(res.X, res.y)
    if args.trace:
        for r in res.trace.records:
            print(
                f"iter {r.iteration:3d}  E {r.objective:.10g}  cut {r.cut_term:.6g}  "
                f"match {r.matching_term:.6g}  coupling {r.coupling_term:.6g}  ibgp {r.ibgp_iterations}"
            )
    E = objective(A, W, res.X, res.y, cfg.lambda1, cfg.lambda2)
    line = f"objective {E:.10g}  outer_iterations {len(res.trace.records)}"
    if gt is not None:
        line += (
            f"  cut_accuracy {cut_accuracy(labels, gt.labels):.4f}"
            f"  matching_accuracy {matching_accuracy(sigma, gt.correspondence):.4f}"
        )
    print(line)
    _write_json(
        args.out,
        {
            "labels": labels.tolist(),
            "assignment": sigma.tolist(),
            "X": res.X.ravel().tolist(),
            "y": res.y.tolist(),
            "trace": res.trace.to_rows(),
        },
    )
    if not res.converged:
        print("warning: CutMatch did not converge within --max-outer", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


# -- sweep ----------------------------------------------------------------


def cmd_sweep(args):
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    try:
        res = bench.run_sweep(args.protocol, trials=args.trials, seed=_seed(args), jobs=args.jobs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    res.write_csv(args.out_csv)
    if args.out_json:
        res.write_json(args.out_json)
    print(f"wrote {args.out_csv}: {len(res.rows)} rows")
    return EXIT_OK


# -- parser ---------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="cutmatch", description="Joint graph cut and partition matching.")
    sub = p.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate synthetic instances")
    gsub = gen.add_subparsers(dest="kind", required=True)
    j = gsub.add_parser("joint", help="one graph with two translated partitions")
    d = SyntheticConfig()
    j.add_argument("--m", type=int, default=d.m, help="nodes per partition")
    j.add_argument("--gamma", type=float, default=d.gamma, help="horizontal overlap of the partitions")
    j.add_argument("--sigma", type=float, default=d.sigma, help="position noise on the second partition")
    j.add_argument("--mu", type=float, default=d.mu, help="feature noise on the second partition")
    j.add_argument("--rho", type=float, default=d.rho, help="fraction of nodes whose features are permuted")
    j.add_argument("--d", type=int, default=d.d, help="feature dimension")
    j.add_argument("--delta1", type=float, default=d.delta1)
    j.add_argument("--delta2", type=float, default=d.delta2)
    j.add_argument("--delta3", type=float, default=d.delta3)
    j.add_argument("--eta", type=float, default=d.eta, help="probability of adding each non-edge")
    j.add_argument("--seed", type=int, default=0)
    j.add_argument("--out", required=True)
    j.set_defaults(func=cmd_gen_joint)

    gp = gsub.add_parser("gmpair", help="two-graph matching instance")
    d = GmPairConfig()
    gp.add_argument("--inliers", type=int, default=d.inliers)
    gp.add_argument("--deformation", type=float, default=d.deformation)
    gp.add_argument("--outliers", type=int, default=d.outliers)
    gp.add_argument("--density", type=float, default=d.density)
    gp.add_argument("--delta1", type=float, default=d.delta1)
    gp.add_argument("--seed", type=int, default=0)
    gp.add_argument("--out", required=True, help="JSON path; the affinity goes next to it as .coo")
    gp.set_defaults(func=cmd_gen_gmpair)

    solve = sub.add_parser("solve", help="run a solver on a graph file")
    solve.add_argument("solver", choices=("cutmatch", "gm", "cut", "balanced-cut"))
    c = SolverConfig()
    sc = SyntheticConfig()
    solve.add_argument("--in", dest="input", required=True)
    solve.add_argument("--lambda1", type=float, default=c.lambda1)
    solve.add_argument("--lambda2", type=float, default=c.lambda2)
    solve.add_argument("--eps", type=float, default=c.eps)
    solve.add_argument("--tol", type=float, default=None, help=f"outer objective tolerance (default {c.tol_obj:g})")
    solve.add_argument("--max-outer", type=int, default=c.max_outer)
    solve.add_argument("--delta1", type=float, default=sc.delta1)
    solve.add_argument("--delta2", type=float, default=sc.delta2)
    solve.add_argument("--delta3", type=float, default=sc.delta3)
    solve.add_argument("--out", help="solution JSON path")
    solve.add_argument("--trace", action="store_true", help="print the per-iteration trace")
    solve.set_defaults(func=cmd_solve)

    sw = sub.add_parser("sweep", help="benchmark sweep over a synthetic protocol")
    sw.add_argument("--protocol", choices=bench.PROTOCOLS, required=True)
    sw.add_argument("--trials", type=int, default=None, help="trials per cell (default 30 for 5.1, 80 for 5.2)")
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--out-csv", default="sweep.csv")
    sw.add_argument("--out-json", default=None)
    sw.add_argument("--jobs", type=int, default=1)
    sw.set_defaults(func=cmd_sweep)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, GraphError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
