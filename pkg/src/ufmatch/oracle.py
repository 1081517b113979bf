"""Exhaustive ground truth for desk-scale instances.

Nothing here uses the solver's shrinking machinery: sets are explicit lists
of original vertices and feasibility is checked edge by edge.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .graph import MINUS, PLUS, BipartiteMultigraph, VertexId


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_edges: int = 24
    max_nodes: int = 5_000_000

    @classmethod
    def from_env(cls) -> "OracleBudget":
        raw = os.environ.get("UFM_ORACLE_BUDGET")
        if not raw:
            return cls()
        parts = [int(x) for x in raw.split(",")]
        return cls(*parts)


@dataclass(frozen=True)
class Violation:
    kind: str  # "degree" or "set"
    witness: object
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.kind} violation at {self.witness}: {self.detail}"


def set_bound(t: int, U) -> int:
    return (t * len(U) - 1) // 2


def verify_solution(g: BipartiteMultigraph, t: int, sets: Iterable, F) -> Optional[Violation]:
    """Direct check of the degree bound and of |F[U]| <= floor((t|U|-1)/2)."""
    F = set(F)
    for v in g.vertices:
        d = sum(1 for eid in g.incident(v) if eid in F)
        if d > t:
            return Violation("degree", v, f"degree {d} > {t}")
    for U in sets:
        U = frozenset(U)
        inside = sum(1 for eid in F if g.edges[eid].plus in U and g.edges[eid].minus in U)
        if inside > set_bound(t, U):
            return Violation("set", U, f"{inside} edges inside, bound {set_bound(t, U)}")
    return None


def _search(g, t, sets, weights, budget):
    # group edges by the endpoint on the smaller side, heaviest first, so that
    # each group can contribute at most t more edges
    side = 0 if len(g.plus) <= len(g.minus) else 1
    key = (lambda e: (g.edges[e].plus, g.edges[e].minus)[side])
    eids = sorted(g.edges, key=lambda e: (key(e), -weights[e], e))
    if len(eids) > budget.max_edges:
        raise BudgetExceeded(f"{len(eids)} edges exceed the oracle budget of {budget.max_edges}")
    sets = [frozenset(U) for U in sets]
    bounds = [set_bound(t, U) for U in sets]
    # only sets that can ever be over-full matter
    cover: list[list[int]] = [[] for _ in eids]
    live = []
    for k, U in enumerate(sets):
        members = [i for i, eid in enumerate(eids)
                   if g.edges[eid].plus in U and g.edges[eid].minus in U]
        if len(members) > bounds[k]:
            live.append(k)
            for i in members:
                cover[i].append(k)
    ends = [(g.edges[e].plus, g.edges[e].minus) for e in eids]
    w = [weights[e] for e in eids]
    suffix = [Fraction(0)] * (len(eids) + 1)
    for i in range(len(eids) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + max(w[i], 0)
    group = [ends[i][side] for i in range(len(eids))]
    first, tops = {}, {}
    for i, x in enumerate(group):
        first.setdefault(x, i)
        if i - first[x] < t:
            tops[x] = tops.get(x, Fraction(0)) + max(w[i], 0)
    later = [Fraction(0)] * (len(eids) + 1)   # what the groups after edge i's group can add
    for i in range(len(eids) - 1, -1, -1):
        nxt = i + 1
        if nxt < len(eids) and group[nxt] == group[i]:
            later[i] = later[nxt]
        else:
            later[i] = suffix[nxt] if nxt == len(eids) else later[nxt] + tops[group[nxt]]
    # head[i][r]: the r heaviest edges left in edge i's group
    head = []
    for i in range(len(eids)):
        sums = [Fraction(0)]
        for j in range(i, min(i + t, len(eids))):
            if group[j] != group[i]:
                break
            sums.append(sums[-1] + max(w[j], 0))
        head.append(sums)
    deg = {v: 0 for v in g.vertices}
    count = [0] * len(sets)
    chosen: list[int] = []
    best = [Fraction(-1), []]
    nodes = [0]

    def rec(i, value):
        nodes[0] += 1
        if nodes[0] > budget.max_nodes:
            raise BudgetExceeded("oracle node budget exhausted")
        if value + suffix[i] <= best[0]:
            return
        if i == len(eids):
            best[0], best[1] = value, list(chosen)
            return
        u, v = ends[i]
        sums = head[i]
        if value + later[i] + sums[min(t - deg[ends[i][side]], len(sums) - 1)] <= best[0]:
            return
        if deg[u] < t and deg[v] < t and all(count[k] < bounds[k] for k in cover[i]):
            deg[u] += 1
            deg[v] += 1
            for k in cover[i]:
                count[k] += 1
            chosen.append(eids[i])
            rec(i + 1, value + w[i])
            chosen.pop()
            for k in cover[i]:
                count[k] -= 1
            deg[u] -= 1
            deg[v] -= 1
        rec(i + 1, value)

    rec(0, Fraction(0))
    return best[0], frozenset(best[1])


def brute_force_max(g: BipartiteMultigraph, t: int, sets, budget: OracleBudget | None = None):
    """Maximum size of a U-feasible t-matching, with a witness edge set."""
    budget = budget or OracleBudget.from_env()
    value, witness = _search(g, t, sets, {e: Fraction(1) for e in g.edges}, budget)
    return int(value), witness


def brute_force_max_weight(g: BipartiteMultigraph, t: int, sets, weights=None,
                           budget: OracleBudget | None = None):
    """Maximum weight of a U-feasible t-matching, with a witness edge set."""
    budget = budget or OracleBudget.from_env()
    if weights is None:
        weights = {e: g.edges[e].weight for e in g.edges}
    return _search(g, t, sets, weights, budget)


def max_inside(g: BipartiteMultigraph, t: int, sets, S, budget: OracleBudget | None = None) -> int:
    """Largest number of edges of E[S] a feasible t-matching can contain.

    Used to check that an inequality x(E[S]) <= c is valid when S is not a
    family member.
    """
    S = frozenset(S)
    sub = BipartiteMultigraph()
    for v in g.plus:
        sub.add_vertex(PLUS, g.label(v))
    for v in g.minus:
        sub.add_vertex(MINUS, g.label(v))
    for e in g.edges.values():
        if e.plus in S and e.minus in S:
            sub.add_edge(e.plus, e.minus, 1)
    value, _ = brute_force_max(sub, t, [U for U in sets if frozenset(U) <= S], budget)
    return value


# explicit set families, built without reference to the solver -------------

def balanced_sets(g: BipartiteMultigraph, k: int, t: int | None = None) -> list[frozenset]:
    """All k+k vertex sets whose induced graph could carry a t-factor."""
    t = k if t is None else t
    adj = {v: set() for v in g.vertices}
    for e in g.edges.values():
        adj[e.plus].add(e.minus)
        adj[e.minus].add(e.plus)
    out = []
    for P in itertools.combinations(g.plus, k):
        common = set().union(*(adj[p] for p in P)) if P else set()
        cands = sorted(common)
        for M in itertools.combinations(cands, k):
            Ms = set(M)
            if all(len(adj[p] & Ms) >= t for p in P) and \
                    all(len(adj[m] & set(P)) >= t for m in M):
                out.append(frozenset(P + M))
    return out


def twin_sets(twins: Sequence[tuple[VertexId, VertexId]], sizes) -> list[frozenset]:
    """Unions of twin pairs, for every number of pairs accepted by ``sizes``."""
    out = []
    for k in range(1, len(twins) + 1):
        if not sizes(k):
            continue
        for combo in itertools.combinations(twins, k):
            out.append(frozenset(v for pair in combo for v in pair))
    return out


def odd_twin_sets(twins) -> list[frozenset]:
    return twin_sets(twins, lambda k: k % 2 == 1)


def triple_twin_sets(twins) -> list[frozenset]:
    return twin_sets(twins, lambda k: k == 3)


def min_max_value(g: BipartiteMultigraph, t: int, X, contains) -> int:
    """t|X| + |E[C]| + sum of floor((t|U|-1)/2) over family components.

    ``contains(U)`` decides membership of a component's vertex set.
    """
    X = set(X)
    rest = [v for v in g.vertices if v not in X]
    rest_set = set(rest)
    parent = {v: v for v in rest}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in g.edges.values():
        if e.plus in rest_set and e.minus in rest_set:
            a, b = find(e.plus), find(e.minus)
            if a != b:
                parent[a] = b
    comps: dict = {}
    for v in rest:
        comps.setdefault(find(v), set()).add(v)
    inside = {}
    for e in g.edges.values():
        if e.plus in rest_set and e.minus in rest_set:
            r = find(e.plus)
            inside[r] = inside.get(r, 0) + 1
    total = t * len(X)
    for r, comp in comps.items():
        if contains(frozenset(comp)):
            total += set_bound(t, comp)
        else:
            total += inside.get(r, 0)
    return total


def brute_force_min_max(g: BipartiteMultigraph, t: int, contains) -> int:
    """Minimum of the min-max formula over every vertex subset (tiny graphs only)."""
    vs = g.vertices
    if len(vs) > 14:
        raise BudgetExceeded("min-max enumeration is limited to 14 vertices")
    best = None
    for mask in range(1 << len(vs)):
        X = [vs[i] for i in range(len(vs)) if mask >> i & 1]
        val = min_max_value(g, t, X, contains)
        best = val if best is None else min(best, val)
    return best


# source problems, solved directly on the original structures ---------------

def brute_force_matching(n: int, edges, weights=None) -> Fraction:
    """Maximum (weight) matching of a general graph by branching on edges."""
    edges = [tuple(e[:2]) for e in edges]
    w = [Fraction(weights[i]) if weights else Fraction(1) for i in range(len(edges))]
    best = [Fraction(0)]
    used = [False] * n

    def rec(i, value):
        if value > best[0]:
            best[0] = value
        if i == len(edges):
            return
        if value + sum(w[i:]) <= best[0]:
            return
        u, v = edges[i]
        if not used[u] and not used[v]:
            used[u] = used[v] = True
            rec(i + 1, value + w[i])
            used[u] = used[v] = False
        rec(i + 1, value)

    rec(0, Fraction(0))
    return best[0]


def brute_force_triangle_free(n: int, edges, weights=None) -> Fraction:
    """Maximum (weight) triangle-free 2-matching: x(e) in {0, 1, 2}, degree <= 2,
    and no triangle whose three edges all have x = 1."""
    edges = [tuple(sorted(e[:2])) for e in edges]
    w = [Fraction(weights[i]) if weights else Fraction(1) for i in range(len(edges))]
    index = {e: i for i, e in enumerate(edges)}
    tri_of = [[] for _ in edges]
    for a, b, c in itertools.combinations(range(n), 3):
        tri = [index.get((a, b)), index.get((b, c)), index.get((a, c))]
        if None not in tri:
            for i in tri:
                tri_of[i].append(tri)
    deg = [0] * n
    x = [0] * len(edges)
    best = [Fraction(0)]

    def rec(i, value):
        if value > best[0]:
            best[0] = value
        if i == len(edges):
            return
        if value + 2 * sum(w[i:]) <= best[0]:
            return
        u, v = edges[i]
        for k in (2, 1, 0):
            if deg[u] + k > 2 or deg[v] + k > 2:
                continue
            if k == 1 and any(all(x[j] == 1 for j in tri if j != i) and max(tri) == i
                              for tri in tri_of[i]):
                continue
            x[i] = k
            deg[u] += k
            deg[v] += k
            rec(i + 1, value + k * w[i])
            deg[u] -= k
            deg[v] -= k
            x[i] = 0

    rec(0, Fraction(0))
    return best[0]


def brute_force_branching(n: int, arcs) -> Fraction:
    """Maximum-weight branching (in-degree <= 1, acyclic) over arcs (tail, head, w)."""
    arcs = [(a[0], a[1], Fraction(a[2]) if len(a) > 2 else Fraction(1)) for a in arcs]
    best = [Fraction(0)]
    parent = [None] * n

    def creates_cycle(tail, head):
        x = tail
        while x is not None:
            if x == head:
                return True
            x = parent[x]
        return False

    def rec(i, value):
        if value > best[0]:
            best[0] = value
        if i == len(arcs):
            return
        if value + sum(max(a[2], 0) for a in arcs[i:]) <= best[0]:
            return
        tail, head, w = arcs[i]
        if parent[head] is None and not creates_cycle(tail, head):
            parent[head] = tail
            rec(i + 1, value + w)
            parent[head] = None
        rec(i + 1, value)

    rec(0, Fraction(0))
    return best[0]
