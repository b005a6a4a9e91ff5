"""Directed graphs, their Laplacian-transpose Hamiltonians and the PageRank baseline."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

TIE_TOLERANCE = 1e-9


class GraphParseError(ValueError):
    """Raised for malformed graph input. ``line`` is 1-based, or None for JSON input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (residual {residual:.3e})")


@dataclass(frozen=True)
class DirectedGraph:
    n: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        edges = frozenset((int(i), int(j)) for i, j in self.edges)
        for i, j in edges:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={self.n}")
        object.__setattr__(self, "edges", edges)
        if any(i == j for i, j in edges):
            warnings.warn("graph contains self-loops; they count toward out-degree", stacklevel=3)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def relabel(self, perm) -> "DirectedGraph":
        """Return the graph with vertex ``v`` renamed to ``perm[v]``."""
        perm = list(perm)
        return DirectedGraph(self.n, frozenset((perm[i], perm[j]) for i, j in self.edges))

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.sorted_edges()]}


def parse_graph(text: str) -> DirectedGraph:
    """Parse the edge-list text format or its JSON form.

    Edge list: the first non-comment line holds the vertex count and every
    following non-empty line is ``src dst`` (0-based). ``#`` starts a comment.
    """
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return _parse_json(stripped)

    n = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if n is None:
            if len(fields) != 1:
                raise GraphParseError("expected the vertex count on its own", lineno)
            n = _parse_int(fields[0], lineno)
            if n < 1:
                raise GraphParseError("vertex count must be positive", lineno)
            continue
        if len(fields) != 2:
            raise GraphParseError(f"expected 'src dst', got {line!r}", lineno)
        i, j = (_parse_int(f, lineno) for f in fields)
        if not (0 <= i < n and 0 <= j < n):
            raise GraphParseError(f"endpoint out of range [0, {n})", lineno)
        edges.append((i, j))
    if n is None:
        raise GraphParseError("missing vertex count")
    return _build(n, edges)


def _parse_json(text: str) -> DirectedGraph:
    try:
        obj = json.loads(text)
        n = obj["n"]
        raw_edges = obj.get("edges", [])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise GraphParseError(f"invalid JSON graph: {exc}") from exc
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise GraphParseError("'n' must be a positive integer")
    edges = []
    for k, e in enumerate(raw_edges):
        if (not isinstance(e, (list, tuple)) or len(e) != 2
                or not all(isinstance(v, int) and not isinstance(v, bool) for v in e)):
            raise GraphParseError(f"edge #{k} must be a pair of integers")
        if not (0 <= e[0] < n and 0 <= e[1] < n):
            raise GraphParseError(f"edge #{k} endpoint out of range [0, {n})")
        edges.append((e[0], e[1]))
    return _build(n, edges)


def _parse_int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise GraphParseError(f"not an integer: {token!r}", lineno) from None


def _build(n: int, edges: list[tuple[int, int]]) -> DirectedGraph:
    unique = frozenset(edges)
    if len(unique) != len(edges):
        warnings.warn(f"{len(edges) - len(unique)} duplicate edge(s) dropped", stacklevel=3)
    return DirectedGraph(n, unique)


def adjacency_matrix(g: DirectedGraph) -> np.ndarray:
    A = np.zeros((g.n, g.n))
    for i, j in g.edges:
        A[i, j] = 1.0
    return A


def laplacian(g: DirectedGraph) -> np.ndarray:
    A = adjacency_matrix(g)
    return np.diag(A.sum(axis=1)) - A


def hamiltonian(g: DirectedGraph) -> np.ndarray:
    """Walk Hamiltonian: the conjugate transpose of the out-degree Laplacian."""
    return laplacian(g).T.copy()


@dataclass(frozen=True)
class CentralityReport:
    method: str
    scores: np.ndarray
    ranking: tuple[tuple[int, ...], ...]
    tie_tolerance: float = TIE_TOLERANCE

    @classmethod
    def from_scores(cls, method: str, scores, tie_tolerance: float = TIE_TOLERANCE) -> "CentralityReport":
        scores = np.asarray(scores, dtype=float)
        total = scores.sum()
        if not np.isfinite(total) or total <= 0:
            raise ValueError("scores must have a positive finite sum")
        scores = scores / total
        scores.setflags(write=False)
        return cls(method, scores, tie_groups(scores, tie_tolerance), tie_tolerance)

    @property
    def order(self) -> list[int]:
        return [v for group in self.ranking for v in group]

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "scores": [float(s) for s in self.scores],
            "ranking": [[v + 1 for v in group] for group in self.ranking],
            "tie_tolerance": self.tie_tolerance,
        }


def tie_groups(scores, tol: float = TIE_TOLERANCE) -> tuple[tuple[int, ...], ...]:
    """Group vertices by descending score; each group spans at most ``tol``."""
    scores = np.asarray(scores, dtype=float)
    order = sorted(range(len(scores)), key=lambda v: (-scores[v], v))
    groups: list[list[int]] = []
    for v in order:
        if groups and scores[groups[-1][0]] - scores[v] <= tol:
            groups[-1].append(v)
        else:
            groups.append([v])
    return tuple(tuple(sorted(g)) for g in groups)


def transition_matrix(g: DirectedGraph) -> np.ndarray:
    """Column-stochastic walk matrix; dangling vertices link to every vertex."""
    A = adjacency_matrix(g)
    out = A.sum(axis=1)
    M = np.empty((g.n, g.n))
    for i in range(g.n):
        M[:, i] = A[i] / out[i] if out[i] > 0 else 1.0 / g.n
    return M


def pagerank(g: DirectedGraph, damping: float = 0.85, tol: float = 1e-12,
             max_iter: int = 100_000) -> CentralityReport:
    if not 0.0 <= damping <= 1.0:
        raise ValueError("damping must lie in [0, 1]")
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = g.n
    G = damping * transition_matrix(g) + (1.0 - damping) / n
    if damping == 1.0:
        # lazy walk: same fixed point, but converges on periodic graphs
        G = 0.5 * (G + np.eye(n))
    r = np.full(n, 1.0 / n)
    residual = np.inf
    for _ in range(max_iter):
        nxt = G @ r
        nxt /= nxt.sum()
        residual = np.abs(nxt - r).sum()
        r = nxt
        if residual < tol:
            return CentralityReport.from_scores("pagerank", r)
    raise ConvergenceError(f"PageRank did not converge in {max_iter} iterations", residual)
