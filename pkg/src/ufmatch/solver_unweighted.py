"""Maximum-size feasible t-matching by augmenting paths with shrinking."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .families import FamilyOracle, ViolatingSet
from .graph import MINUS, PLUS, BipartiteMultigraph
from .oracle import min_max_value
from .shrinker import ShrunkState, expand_all


class AuxiliaryDigraph(NamedTuple):
    out: dict        # vertex -> sorted list of (head, edge id)
    sources: list
    sinks: frozenset


def build_auxiliary(state: ShrunkState, F, arc_ok=None, sources=None, sinks=None,
                    back_ok=None) -> AuxiliaryDigraph:
    """Non-F edges point plus -> minus, F edges point minus -> plus.

    ``arc_ok(eid)`` restricts the non-F edges that get an arc and ``back_ok``
    the F edges (tightness and q = 0 in the weighted solver).  Default sources and sinks are the unsaturated
    vertices: naturals below t, pseudovertices of degree 0.
    """
    t = state.t
    out = {v: [] for v in state.vertices}
    for eid, (p, m) in state.ends.items():
        if eid in F:
            if back_ok is None or back_ok(eid):
                out[m].append((p, eid))
        elif arc_ok is None or arc_ok(eid):
            out[p].append((m, eid))
    for v in out:
        out[v].sort()

    def unsaturated(v):
        d = state.deg(F, v)
        return d == 0 if v in state.pseudo else d <= t - 1

    if sources is None:
        sources = [v for v in state.plus if unsaturated(v)]
    if sinks is None:
        sinks = [v for v in state.minus if unsaturated(v)]
    return AuxiliaryDigraph(out, sorted(sources), frozenset(sinks))


def reachable(D: AuxiliaryDigraph) -> set:
    seen = set(D.sources)
    queue = deque(D.sources)
    while queue:
        v = queue.popleft()
        for w, _ in D.out[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def find_augmenting_path(D: AuxiliaryDigraph) -> Optional[list]:
    """Shortest source-sink path as a list of edge ids (BFS, smallest ids first)."""
    parent = {s: None for s in D.sources}
    queue = deque(D.sources)
    while queue:
        v = queue.popleft()
        if v in D.sinks:
            path = []
            while parent[v] is not None:
                u, eid = parent[v]
                path.append(eid)
                v = u
            if path:
                return path[::-1]
            continue
        for w, eid in D.out[v]:
            if w not in parent:
                parent[w] = (v, eid)
                queue.append(w)
    return None


def augment(F, P) -> set:
    return set(F) ^ set(P)


def find_violating_set(family: FamilyOracle, state: ShrunkState, F, P):
    """First prefix F_i of the alternation that is infeasible.

    Returns (F_{i*-1}, violating set of F_{i*}).
    """
    F = set(F)
    prev = set(F)
    cur = set(F)
    n = len(P)
    for i in range(0, n, 2):
        cur.add(P[i])
        if i + 1 < n:
            cur.discard(P[i + 1])
        v = family.find_violation(state, cur)
        if v is not None:
            return prev, v
        prev = set(cur)
    raise RuntimeError("every prefix of the path is feasible")


def find_minimizer(state: ShrunkState, F, D: Optional[AuxiliaryDigraph] = None) -> frozenset:
    """Vertex set X (original vertices) attaining the min-max bound."""
    if D is None:
        D = build_auxiliary(state, F)
    if find_augmenting_path(D) is not None:
        raise RuntimeError("find_minimizer called while an augmenting path exists")
    R = reachable(D)
    X = {v for v in state.plus if v not in R} | {v for v in state.minus if v in R}
    for v in state.minus:
        if v in X:
            continue
        k = sum(1 for eid in state.incident[v] if eid in F and state.ends[eid][0] in R)
        if k >= state.cap(v):
            X.add(v)
    return state.hat_set(X)


@dataclass
class MaxResult:
    matching: frozenset      # edge ids on the original graph
    certificate: frozenset   # X, original vertices
    value: int
    bound: int
    augmentations: int = 0
    shrinks: int = 0


class WeakDuality(NamedTuple):
    size: int
    bound: int
    holds: bool
    violation: Optional[frozenset]


def verify_weak_duality(graph: BipartiteMultigraph, family: FamilyOracle, F, X) -> WeakDuality:
    viol = family.violated_original(F)
    for v in graph.vertices:
        if sum(1 for eid in graph.incident(v) if eid in F) > family.t:
            viol = frozenset([v])
    bound = min_max_value(graph, family.t, X, family.contains)
    size = len(set(F))
    return WeakDuality(size, bound, viol is None and size <= bound, viol)


def solve_max(graph: BipartiteMultigraph, family: FamilyOracle, F0=None) -> MaxResult:
    t = family.t
    state = ShrunkState(graph, t)
    F = set(F0 or ())
    if family.violated_original(F) is not None:
        raise ValueError("initial edge set is not feasible")
    n_aug = shrinks = since = 0
    while True:
        D = build_auxiliary(state, F)
        P = find_augmenting_path(D)
        if P is None:
            break
        Fp = augment(F, P)
        if family.find_violation(state, Fp) is None:
            F = expand_all(state, Fp, family)
            state = ShrunkState(graph, t)
            n_aug += 1
            since = 0
            continue
        F, viol = find_violating_set(family, state, F, P)
        size = family.level_size(state, viol.members)
        _, F = state.shrink(viol.members, F, viol.meta, size)
        shrinks += 1
        since += 1
        if since > 2 * len(graph.vertices) + 2:
            raise RuntimeError("too many shrinks without augmentation")
    X = find_minimizer(state, F, D)
    Fh = expand_all(state, F, family) if state.records else set(F)
    bound = min_max_value(graph, t, X, family.contains)
    return MaxResult(frozenset(Fh), X, len(Fh), bound, n_aug, shrinks)
