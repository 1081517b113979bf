"""Encodings of classical problems as feasible t-matching instances, and decoders."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .families import (DirectedCycleFamily, FamilyOracle, MatroidCircuitFamily,
                       OddSymmetricFamily, TriangleTwinFamily)
from .graph import MINUS, PLUS, BipartiteMultigraph, Digraph, GraphError, as_fraction


class NotOddCycleSymmetric(GraphError):
    """An odd directed cycle lacks its reverse."""


@dataclass
class Reduction:
    kind: str
    graph: BipartiteMultigraph
    family: FamilyOracle
    forward: dict                    # source element -> tuple of encoded edge ids
    twins: dict = field(default_factory=dict)
    factor: int = 1                  # encoded value = factor * source value
    source: object = None

    @property
    def weights(self) -> dict:
        return {eid: e.weight for eid, e in self.graph.edges.items()}

    def decode(self, F) -> dict:
        """Source element -> multiplicity chosen by the encoded edge set F."""
        F = set(F)
        return {key: sum(1 for eid in eids if eid in F) for key, eids in self.forward.items()
                if any(eid in F for eid in eids)}

    def source_value(self, F, weighted: bool = False):
        val = sum((self.graph.edges[eid].weight if weighted else 1) for eid in F)
        return Fraction(val) / self.factor


# matchings -> even factors --------------------------------------------------

def encode_matching_as_even_factor(n: int, edges) -> Digraph:
    """Both orientations of every edge {u, v}, each carrying w(uv)."""
    D = Digraph(n)
    seen = set()
    for item in edges:
        u, v = item[0], item[1]
        w = item[2] if len(item) > 2 else 1
        if u == v:
            raise GraphError("matching instances must not have loops")
        key = frozenset((u, v))
        if key in seen:
            raise GraphError(f"parallel edge {u}-{v}")
        seen.add(key)
        D.add_arc(u, v, w)
        D.add_arc(v, u, w)
    return D


def decode_even_factor_to_matching(D: Digraph, arcs) -> list:
    """A matching of weight at least half the even factor's weight.

    Each component of an even factor is a path or an even cycle; one of its
    two alternating edge classes carries at least half of its weight.
    """
    chosen = [D.arcs[i] for i in sorted(arcs)]
    nxt = {a.tail: a for a in chosen}
    prv = {a.head: a for a in chosen}
    done, matching = set(), []
    for a in chosen:
        if a.id in done:
            continue
        start = a
        while start.tail in prv and prv[start.tail].id != a.id:
            start = prv[start.tail]
            if start.id == a.id:
                break
        comp, cur = [], start
        while cur is not None and cur.id not in done:
            done.add(cur.id)
            comp.append(cur)
            cur = nxt.get(cur.head)
        cycle = len(comp) > 1 and comp[-1].head == comp[0].tail
        if len(comp) == 2 and cycle:
            matching.append((comp[0].tail, comp[0].head))
            continue
        classes = [comp[0::2], comp[1::2]]
        if cycle and len(comp) % 2:
            raise GraphError("odd cycle in an even factor")
        best = max(classes, key=lambda c: (sum(x.weight for x in c), len(c)))
        matching += [(x.tail, x.head) for x in best]
    return matching


# even factors -----------------------------------------------------------------

def odd_cycles_without_reverse(D: Digraph, max_len: Optional[int] = None) -> list:
    """Odd directed cycles (as vertex lists) whose reverse is missing."""
    arcs = {(a.tail, a.head) for a in D.arcs}
    if all((h, t) in arcs for t, h in arcs):
        return []
    out_adj = defaultdict(set)
    for t, h in arcs:
        out_adj[t].add(h)
    bad = []
    limit = max_len or D.n

    def dfs(start, v, path, on):
        for w in sorted(out_adj[v]):
            if w == start:
                if len(path) % 2 == 1:
                    cyc = path
                    if not all((cyc[(i + 1) % len(cyc)], cyc[i]) in arcs for i in range(len(cyc))):
                        bad.append(list(cyc))
            elif w > start and w not in on and len(path) < limit:
                on.add(w)
                path.append(w)
                dfs(start, w, path, on)
                path.pop()
                on.discard(w)

    for s in range(D.n):
        dfs(s, s, [s], {s})
    return bad


def encode_even_factor(D: Digraph, check_symmetry: bool = True) -> Reduction:
    """Vertex v becomes v+ and v-; arc (u, v) becomes the edge {u+, v-}."""
    if check_symmetry:
        bad = odd_cycles_without_reverse(D)
        if bad:
            names = [D.names[i] for i in bad[0]]
            raise NotOddCycleSymmetric(f"odd cycle {' -> '.join(names)} has no reverse")
    g = BipartiteMultigraph()
    plus = [g.add_vertex(PLUS, D.names[i]) for i in range(D.n)]
    minus = [g.add_vertex(MINUS, D.names[i]) for i in range(D.n)]
    forward = {}
    for a in D.arcs:
        e = g.add_edge(plus[a.tail], minus[a.head], a.weight)
        forward[a.id] = (e.id,)
    twins = {plus[i]: minus[i] for i in range(D.n)}
    return Reduction("evenfactor", g, OddSymmetricFamily(g, twins), forward, twins, 1, D)


def encode_matching(n: int, edges) -> Reduction:
    """Nonbipartite matching through even factors; encoded value is twice the matching's."""
    D = encode_matching_as_even_factor(n, edges)
    red = encode_even_factor(D)
    red.kind = "matching"
    red.factor = 2
    red.source = D
    return red


# triangle-free 2-matchings -----------------------------------------------------

def encode_triangle_free(n: int, edges, names=None) -> Reduction:
    """Edge {u, v} becomes {u+, v-} and {v+, u-}; x(uv) counts the chosen copies."""
    g = BipartiteMultigraph()
    names = names or [str(i) for i in range(n)]
    plus = [g.add_vertex(PLUS, names[i]) for i in range(n)]
    minus = [g.add_vertex(MINUS, names[i]) for i in range(n)]
    forward, seen = {}, set()
    for item in edges:
        u, v = item[0], item[1]
        w = item[2] if len(item) > 2 else 1
        key = frozenset((u, v))
        if u == v or key in seen:
            raise GraphError(f"triangle-free instances must be simple (edge {u}-{v})")
        seen.add(key)
        e1 = g.add_edge(plus[u], minus[v], w)
        e2 = g.add_edge(plus[v], minus[u], w)
        forward[(min(u, v), max(u, v))] = (e1.id, e2.id)
    twins = {plus[i]: minus[i] for i in range(n)}
    return Reduction("trianglefree", g, TriangleTwinFamily(g, twins), forward, twins, 1,
                     (n, list(edges)))


# matroids -------------------------------------------------------------------------

def encode_matroid(elements, circuits, weights=None) -> Reduction:
    """One pair e+ e- with a single edge per ground element."""
    g = BipartiteMultigraph()
    weights = weights or {}
    pairs, forward = {}, {}
    for name in elements:
        p = g.add_vertex(PLUS, str(name))
        m = g.add_vertex(MINUS, str(name))
        e = g.add_edge(p, m, weights.get(name, 1))
        pairs[name] = (p, m)
        forward[name] = (e.id,)
    fam = MatroidCircuitFamily(g, pairs, circuits)
    return Reduction("matroid", g, fam, forward, {}, 1, (list(elements), list(circuits)))


def graphic_circuits(n: int, edges) -> list:
    """Edge-index sets of the cycles of an undirected multigraph."""
    adj = defaultdict(list)
    for i, (u, v) in enumerate(edges):
        adj[u].append((v, i))
        adj[v].append((u, i))
    found = set()

    def dfs(start, v, used, visited):
        for w, i in adj[v]:
            if i in used:
                continue
            if w == start:
                found.add(frozenset(used | {i}))
            elif w not in visited and w > start:
                dfs(start, w, used | {i}, visited | {w})

    for s in range(n):
        dfs(s, s, frozenset(), {s})
    return sorted(found, key=lambda c: (len(c), sorted(c)))


# branchings -------------------------------------------------------------------------

def encode_branching(D: Digraph) -> Reduction:
    """Vertex v becomes v+, arc a becomes a-; a- is joined to head(a)+.

    Vertices sit on the plus side so that the weighted solver's plus duals
    are vertex potentials; an arc vertex has a single edge, is only ever
    reached while unmatched, and so keeps dual 0.
    """
    g = BipartiteMultigraph()
    verts = [g.add_vertex(PLUS, D.names[i]) for i in range(D.n)]
    arcs, forward = {}, {}
    for a in D.arcs:
        m = g.add_vertex(MINUS, f"a{a.id}")
        e = g.add_edge(verts[a.head], m, a.weight)
        arcs[m] = (verts[a.tail], verts[a.head])
        forward[a.id] = (e.id,)
    return Reduction("branching", g, DirectedCycleFamily(g, arcs, MINUS), forward, {}, 1, D)


def is_branching(D: Digraph, arc_ids) -> bool:
    arc_ids = set(arc_ids)
    heads = [D.arcs[i].head for i in arc_ids]
    if len(heads) != len(set(heads)):
        return False
    parent = list(range(D.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in arc_ids:
        a, b = find(D.arcs[i].tail), find(D.arcs[i].head)
        if a == b:
            return False
        parent[a] = b
    return True
