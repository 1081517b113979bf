"""Bipartite multigraphs with stable edge ids, and a small weighted digraph.

Vertices are ``VertexId(side, index)`` pairs.  Edges keep their id for the
whole lifetime of a solver run, so an edge set ``F`` is just a set of ids and
survives any re-pointing of endpoints done while shrinking.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional

PLUS = "+"
MINUS = "-"


class GraphError(ValueError):
    """Raised on malformed graph input (unknown vertex, wrong side, ...)."""


class VertexId(NamedTuple):
    side: str
    index: int

    def __repr__(self) -> str:
        return f"{self.side}{self.index}"


def as_fraction(value) -> Fraction:
    if isinstance(value, float):
        raise TypeError("weights must be exact (int, Fraction or 'p/q' string)")
    return Fraction(value)


@dataclass(frozen=True)
class Edge:
    id: int
    plus: VertexId
    minus: VertexId
    weight: Fraction = Fraction(0)

    def other(self, v: VertexId) -> VertexId:
        return self.minus if v == self.plus else self.plus


class BipartiteMultigraph:
    """Two-sided vertex set with weighted, possibly parallel edges."""

    def __init__(self) -> None:
        self.plus: list[VertexId] = []
        self.minus: list[VertexId] = []
        self.edges: dict[int, Edge] = {}
        self.names: dict[VertexId, str] = {}
        self._incident: dict[VertexId, list[int]] = {}
        self._next_edge = 0

    # construction -----------------------------------------------------

    def add_vertex(self, side: str, name: Optional[str] = None) -> VertexId:
        if side not in (PLUS, MINUS):
            raise GraphError(f"unknown side {side!r}")
        bucket = self.plus if side == PLUS else self.minus
        v = VertexId(side, len(bucket))
        bucket.append(v)
        self._incident[v] = []
        self.names[v] = name if name is not None else repr(v)
        return v

    def add_edge(self, u: VertexId, v: VertexId, weight=0) -> Edge:
        if u.side == MINUS and v.side == PLUS:
            u, v = v, u
        if u.side != PLUS or v.side != MINUS:
            raise GraphError(f"edge {u}-{v} does not join opposite sides")
        for x in (u, v):
            if x not in self._incident:
                raise GraphError(f"unknown vertex {x}")
        e = Edge(self._next_edge, u, v, as_fraction(weight))
        self._next_edge += 1
        self.edges[e.id] = e
        self._incident[u].append(e.id)
        self._incident[v].append(e.id)
        return e

    @classmethod
    def from_pairs(cls, n_plus: int, n_minus: int,
                   pairs: Iterable[tuple], ) -> "BipartiteMultigraph":
        """Build from ``(i, j)`` or ``(i, j, weight)`` index pairs."""
        g = cls()
        for _ in range(n_plus):
            g.add_vertex(PLUS)
        for _ in range(n_minus):
            g.add_vertex(MINUS)
        for p in pairs:
            w = p[2] if len(p) > 2 else 0
            g.add_edge(g.plus[p[0]], g.minus[p[1]], w)
        return g

    @classmethod
    def complete(cls, n_plus: int, n_minus: int) -> "BipartiteMultigraph":
        return cls.from_pairs(n_plus, n_minus,
                              [(i, j) for i in range(n_plus) for j in range(n_minus)])

    # queries ------------------------------------------------------------

    @property
    def vertices(self) -> list[VertexId]:
        return self.plus + self.minus

    def __contains__(self, v) -> bool:
        return v in self._incident

    def incident(self, v: VertexId) -> list[int]:
        try:
            return self._incident[v]
        except KeyError:
            raise GraphError(f"unknown vertex {v}") from None

    def weight(self, eid: int) -> Fraction:
        return self.edges[eid].weight

    def with_weights(self, weights) -> "BipartiteMultigraph":
        """Copy of the graph with ``weights[eid]`` replacing edge weights."""
        g = BipartiteMultigraph()
        g.plus, g.minus = list(self.plus), list(self.minus)
        g.names = dict(self.names)
        g._incident = {v: list(ids) for v, ids in self._incident.items()}
        g._next_edge = self._next_edge
        g.edges = {i: Edge(i, e.plus, e.minus, as_fraction(weights[i]))
                   for i, e in self.edges.items()}
        return g

    def label(self, v: VertexId) -> str:
        return self.names.get(v, repr(v))

    def __repr__(self) -> str:
        return (f"BipartiteMultigraph({len(self.plus)}+{len(self.minus)} vertices, "
                f"{len(self.edges)} edges)")


def _check_vertices(g: BipartiteMultigraph, X) -> None:
    for v in X:
        if v not in g:
            raise GraphError(f"unknown vertex {v}")


def induced_edges(g: BipartiteMultigraph, X) -> set[int]:
    """E[X]: ids of the edges with both endpoints in X."""
    X = set(X)
    _check_vertices(g, X)
    return {e.id for e in g.edges.values() if e.plus in X and e.minus in X}


def cross_edges(g: BipartiteMultigraph, F, X, Y) -> set[int]:
    """F[X, Y]: edges of F with one endpoint in X and the other in Y."""
    X, Y = set(X), set(Y)
    if X & Y:
        raise GraphError("cross_edges needs disjoint vertex sets")
    _check_vertices(g, X | Y)
    out = set()
    for eid in F:
        e = g.edges[eid]
        if (e.plus in X and e.minus in Y) or (e.plus in Y and e.minus in X):
            out.add(eid)
    return out


def degree(g: BipartiteMultigraph, F, v: VertexId) -> int:
    """deg_F(v), counting parallel edges with multiplicity."""
    F = F if isinstance(F, (set, frozenset)) else set(F)
    return sum(1 for eid in g.incident(v) if eid in F)


@dataclass(frozen=True)
class Arc:
    id: int
    tail: int
    head: int
    weight: Fraction = Fraction(0)


class Digraph:
    """Vertices ``0..n-1`` and weighted arcs; loops and parallels allowed."""

    def __init__(self, n: int = 0, names: Optional[list[str]] = None) -> None:
        self.n = n
        self.names = list(names) if names is not None else [str(i) for i in range(n)]
        self.arcs: list[Arc] = []

    def add_vertex(self, name: Optional[str] = None) -> int:
        self.n += 1
        self.names.append(name if name is not None else str(self.n - 1))
        return self.n - 1

    def add_arc(self, tail: int, head: int, weight=0) -> Arc:
        if not (0 <= tail < self.n and 0 <= head < self.n):
            raise GraphError(f"arc ({tail},{head}) has an unknown endpoint")
        a = Arc(len(self.arcs), tail, head, as_fraction(weight))
        self.arcs.append(a)
        return a

    def __repr__(self) -> str:
        return f"Digraph({self.n} vertices, {len(self.arcs)} arcs)"
