"""Graph, ground truth, solver configuration, feasibility checks and JSON I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

TOL_FEAS = 1e-6
TOL_OBJ = 1e-8


class GraphError(ValueError):
    """Base class for invalid graph files or graph data."""


class GraphFormatError(GraphError):
    pass


class OddNodeCountError(GraphError):
    pass


class SelfLoopError(GraphError):
    pass


class FeatureDimensionError(GraphError):
    pass


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


def _normalize_edges(edges, n):
    pairs = set()
    for e in edges:
        if len(e) != 2:
            raise GraphFormatError(f"edge {e!r} is not a pair")
        i, j = int(e[0]), int(e[1])
        if i == j:
            raise SelfLoopError(f"self-loop on node {i}")
        if not (0 <= i < n and 0 <= j < n):
            raise GraphFormatError(f"edge ({i}, {j}) out of range for n={n}")
        pairs.add((min(i, j), max(i, j)))
    arr = np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)
    return arr


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected graph with 2-D node positions and feature vectors.

    ``edges`` is stored as a sorted ``(E, 2)`` array with ``i < j``; the
    symmetric counterpart of every pair is implied.
    """

    positions: np.ndarray
    features: np.ndarray
    edges: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        feat = np.asarray(self.features, dtype=float)
        n = pos.shape[0]
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise GraphFormatError(f"positions must be n x 2, got {pos.shape}")
        if n % 2:
            raise OddNodeCountError(f"node count must be even, got {n}")
        if n < 4:
            raise GraphError(f"need at least 4 nodes, got {n}")
        if feat.ndim != 2 or feat.shape[0] != n:
            raise FeatureDimensionError(f"features must be n x d, got {feat.shape}")
        object.__setattr__(self, "positions", _frozen(pos, float))
        object.__setattr__(self, "features", _frozen(feat, float))
        object.__setattr__(self, "edges", _frozen(_normalize_edges(self.edges, n), np.int64))

    @property
    def n(self):
        return self.positions.shape[0]

    @property
    def m(self):
        return self.n // 2

    @property
    def feature_dim(self):
        return self.features.shape[1]

    def adjacency(self):
        adj = np.zeros((self.n, self.n), dtype=bool)
        if len(self.edges):
            adj[self.edges[:, 0], self.edges[:, 1]] = True
            adj[self.edges[:, 1], self.edges[:, 0]] = True
        return adj

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            np.array_equal(self.positions, other.positions)
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.edges, other.edges)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """Partition labels in {-1, +1} and the cross-partition correspondence."""

    labels: np.ndarray
    correspondence: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels)
        corr = np.asarray(self.correspondence)
        n = labels.shape[0]
        if corr.shape != (n,):
            raise GraphError("labels and correspondence lengths differ")
        if not np.all(np.isin(labels, (-1, 1))):
            raise GraphError("labels must be -1 or +1")
        if sorted(corr.tolist()) != list(range(n)):
            raise GraphError("correspondence is not a permutation")
        idx = np.arange(n)
        if np.any(corr[corr] != idx) or np.any(corr == idx):
            raise GraphError("correspondence must be a fixed-point-free involution")
        if np.any(labels == labels[corr]):
            raise GraphError("corresponding nodes must carry opposite labels")
        if (labels == 1).sum() != n // 2:
            raise GraphError("label classes must have equal size")
        object.__setattr__(self, "labels", _frozen(labels, np.int64))
        object.__setattr__(self, "correspondence", _frozen(corr, np.int64))

    def __eq__(self, other):
        if not isinstance(other, GroundTruth):
            return NotImplemented
        return np.array_equal(self.labels, other.labels) and np.array_equal(
            self.correspondence, other.correspondence
        )

    __hash__ = None


@dataclass(frozen=True)
class SolverConfig:
    """Weights, step length, tolerances and iteration caps for the solvers.

    ``projection`` picks the direction-subproblem method (``"newton"``,
    ``"dykstra"`` or ``"alternate"``, see
    :func:`cutmatch.projections.project_direction`). ``safeguard`` enables step halving on an
    objective decrease. ``cut_rule`` is ``"max"`` (ascent on the joint
    objective) or ``"min"`` (the literal argmin reading, for study only).
    """

    lambda1: float = 200.0
    lambda2: float = 50.0
    eps: float = 0.1
    tol_feas: float = TOL_FEAS
    tol_obj: float = TOL_OBJ
    tol_step: float = 1e-8
    tol_proj: float = 1e-8
    max_outer: int = 30
    max_ibgp: int = 200
    max_proj: int = 1000
    max_bregman: int = 10000
    seed: int = 0
    projection: str = "newton"
    safeguard: bool = True
    cut_rule: str = "max"

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "eps", "tol_feas", "tol_obj", "tol_step", "tol_proj"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("max_outer", "max_ibgp", "max_proj", "max_bregman"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.projection not in ("newton", "dykstra", "alternate"):
            raise ValueError(f"unknown projection method {self.projection!r}")
        if self.cut_rule not in ("max", "min"):
            raise ValueError("cut_rule must be 'max' or 'min'")


@dataclass(frozen=True)
class FeasibilityReport:
    """Maximum violation of each constraint defining the relaxed matching set."""

    row_sum: float
    col_sum: float
    box: float
    diagonal: float
    symmetry: float

    @property
    def max_violation(self):
        return max(self.row_sum, self.col_sum, self.box, self.diagonal, self.symmetry)

    def ok(self, tol=TOL_FEAS, *, diagonal=True, symmetry=True):
        checks = [self.row_sum, self.col_sum, self.box]
        if diagonal:
            checks.append(self.diagonal)
        if symmetry:
            checks.append(self.symmetry)
        return max(checks) <= tol


def check_feasible(X, tol=TOL_FEAS):
    """Report how far ``X`` is from being doubly stochastic, symmetric, zero-diagonal.

    ``tol`` is accepted for call-site symmetry with other checks; the report
    itself carries raw violations and ``FeasibilityReport.ok`` applies a tolerance.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError(f"X must be square, got {X.shape}")
    return FeasibilityReport(
        row_sum=float(np.abs(X.sum(axis=1) - 1.0).max()),
        col_sum=float(np.abs(X.sum(axis=0) - 1.0).max()),
        box=float(max(0.0, -X.min(), X.max() - 1.0)),
        diagonal=float(np.abs(np.diag(X)).max()),
        symmetry=float(np.abs(X - X.T).max()),
    )


# -- JSON I/O ---------------------------------------------------------------


def graph_to_dict(graph, ground_truth=None):
    doc = {
        "n": graph.n,
        "feature_dim": graph.feature_dim,
        "nodes": [
            {"id": i, "pos": graph.positions[i].tolist(), "feat": graph.features[i].tolist()}
            for i in range(graph.n)
        ],
        "edges": graph.edges.tolist(),
    }
    if ground_truth is not None:
        doc["ground_truth"] = {
            "labels": ground_truth.labels.tolist(),
            "correspondence": ground_truth.correspondence.tolist(),
        }
    return doc


def graph_from_dict(doc):
    try:
        n = int(doc["n"])
        d = int(doc["feature_dim"])
        nodes = doc["nodes"]
        edges = doc["edges"]
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"missing or malformed field: {exc}") from None
    if n % 2:
        raise OddNodeCountError(f"node count must be even, got {n}")
    if len(nodes) != n:
        raise GraphFormatError(f"expected {n} nodes, found {len(nodes)}")
    pos = np.zeros((n, 2))
    feat = np.zeros((n, d))
    seen = set()
    for node in nodes:
        try:
            i = int(node["id"])
            p, f = node["pos"], node["feat"]
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphFormatError(f"malformed node entry: {exc}") from None
        if not 0 <= i < n or i in seen:
            raise GraphFormatError(f"bad or duplicate node id {i}")
        seen.add(i)
        if len(p) != 2:
            raise GraphFormatError(f"node {i}: position must have 2 coordinates")
        if len(f) != d:
            raise FeatureDimensionError(f"node {i}: feature has {len(f)} entries, expected {d}")
        pos[i] = p
        feat[i] = f
    graph = Graph(pos, feat, edges)
    gt = None
    if doc.get("ground_truth") is not None:
        g = doc["ground_truth"]
        try:
            gt = GroundTruth(np.asarray(g["labels"]), np.asarray(g["correspondence"]))
        except (KeyError, TypeError) as exc:
            raise GraphFormatError(f"malformed ground_truth: {exc}") from None
    return graph, gt


def save_graph(path, graph, ground_truth=None):
    Path(path).write_text(json.dumps(graph_to_dict(graph, ground_truth)))


def load_graph(path):
    """Read a graph JSON file. Returns ``(graph, ground_truth_or_None)``."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise GraphFormatError(f"{path}: top level must be an object")
    return graph_from_dict(doc)
