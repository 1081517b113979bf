"""Families of forbidden vertex sets behind one feasibility/expansion contract.

Every family answers three questions:

* ``contains(U)``: is the original vertex set U a member?
* ``violated_original(F)``: for an edge set on the original graph, some member
  U with |F[U]| > floor((t|U| - 1)/2), or None.
* ``find_violation(state, F)``: the same question for an edge set in a shrunk
  graph, where F is feasible if some completion of the shrunk sets is.

``level_candidates(ctx)`` yields the edge sets a single shrunk level may be
completed with; by default every degree-feasible subset of the right size.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from typing import Iterable, Iterator, NamedTuple, Optional

from .graph import MINUS, PLUS, BipartiteMultigraph, GraphError, VertexId
from .oracle import set_bound
from .shrinker import (ExpansionBudget, ExpansionError, LevelContext, ShrunkState,
                       degree_subsets, expand)


class ViolatingSet(NamedTuple):
    members: frozenset
    meta: object = None


def count_inside(graph: BipartiteMultigraph, F: Iterable[int], U) -> int:
    return sum(1 for eid in F
               if graph.edges[eid].plus in U and graph.edges[eid].minus in U)


class FamilyOracle:
    name = "family"
    alpha = "unspecified"
    exhaustive = False   # decide shrunk feasibility by searching all completions
    search_budget = 5000

    def __init__(self, graph: BipartiteMultigraph, t: int) -> None:
        if t < 1:
            raise ValueError("t must be positive")
        self.graph = graph
        self.t = t

    # membership ----------------------------------------------------------

    def contains(self, U) -> bool:
        raise NotImplementedError

    def members(self) -> Optional[list]:
        """Explicit member list, when it is small enough to enumerate."""
        return None

    # feasibility ---------------------------------------------------------

    def violated_original(self, F) -> Optional[frozenset]:
        raise NotImplementedError

    def is_feasible_original(self, F) -> bool:
        return self.violated_original(F) is None

    def find_violation(self, state: ShrunkState, F) -> Optional[ViolatingSet]:
        F = set(F)
        if not state.records:
            U = self.violated_original(F)
            return None if U is None else self.shrink_target(state, F, U)
        if self.exhaustive:
            try:
                expand(state.copy(), F, self, search=True,
                       max_attempts=self.search_budget,
                       final_ok=lambda s, X: self.violated_original(X) is None)
                return None
            except ExpansionBudget:
                raise
            except ExpansionError:
                pass
        _, Fh = expand(state.copy(), F, self, search=False)
        U = self.violated_original(Fh)
        if U is None:
            return None
        return self.shrink_target(state, F, U)

    def feasible_or_violating(self, state: ShrunkState, F) -> Optional[ViolatingSet]:
        return self.find_violation(state, F)

    def shrink_target(self, state: ShrunkState, F, U) -> ViolatingSet:
        return ViolatingSet(frozenset(U))

    def level_size(self, state: ShrunkState, U) -> Optional[int]:
        """Edges the level of U gets back on expansion; None for the usual count."""
        return None

    # expansion -----------------------------------------------------------

    def level_candidates(self, ctx: LevelContext) -> Iterator[frozenset]:
        return degree_subsets(ctx)

    def expand_set(self, ctx: LevelContext) -> frozenset:
        for cand in self.level_candidates(ctx):
            return cand
        raise ExpansionError("no degree-feasible completion of the shrunk set")


class ExplicitFamily(FamilyOracle):
    """An explicitly listed family; feasibility by exhaustive completion search."""

    name = "explicit"
    alpha = "exponential (oracle scale only)"
    exhaustive = True
    max_vertices = 20

    def __init__(self, graph, t, sets) -> None:
        super().__init__(graph, t)
        if len(graph.vertices) > self.max_vertices:
            raise GraphError(f"explicit family limited to {self.max_vertices} vertices")
        seen, out = set(), []
        for S in sets:
            S = frozenset(S)
            if not S:
                raise GraphError("family sets must be nonempty")
            for v in S:
                if v not in graph:
                    raise GraphError(f"unknown vertex {v!r} in family set")
            if S not in seen:
                seen.add(S)
                out.append(S)
        self.sets = out
        self._set_index = seen

    def contains(self, U) -> bool:
        return frozenset(U) in self._set_index

    def members(self) -> list:
        return list(self.sets)

    def violated_original(self, F) -> Optional[frozenset]:
        for S in self.sets:
            if count_inside(self.graph, F, S) > set_bound(self.t, S):
                return S
        return None


def _find_ktt(t: int, F, ends, natural) -> Optional[frozenset]:
    """A K_{t,t} on natural vertices inside F, found by grouping plus vertices
    with identical natural neighbourhoods of size t."""
    nbrs = defaultdict(set)
    for eid in F:
        p, m = ends[eid]
        if natural(p) and natural(m):
            nbrs[p].add(m)
    groups = defaultdict(list)
    for p in sorted(nbrs):
        if len(nbrs[p]) == t:
            groups[frozenset(nbrs[p])].append(p)
    for ms, ps in groups.items():
        if len(ps) >= t:
            return frozenset(ps[:t]) | ms
    return None


class KttFreeFamily(FamilyOracle):
    """Balanced 2t-vertex sets inducing a complete K_{t,t}: F may not contain one.

    Only a complete K_{t,t} can carry t^2 edges, so restricting membership to
    complete ones leaves feasibility unchanged and keeps the min-max bound tight.
    """

    name = "ktt"
    alpha = "O(1) per added edge"

    def __init__(self, graph, t) -> None:
        super().__init__(graph, t)
        self._adj = defaultdict(set)
        for e in graph.edges.values():
            self._adj[e.plus].add(e.minus)

    def contains(self, U) -> bool:
        U = frozenset(U)
        ps = [v for v in U if v.side == PLUS]
        ms = [v for v in U if v.side == MINUS]
        return (len(ps) == self.t and len(ms) == self.t
                and all(p in self.graph and set(ms) <= self._adj[p] for p in ps))

    def members(self) -> list:
        g, t = self.graph, self.t
        out = []
        for a in itertools.combinations(g.plus, t):
            common = set.intersection(*(self._adj[p] for p in a))
            for b in itertools.combinations(sorted(common), t):
                out.append(frozenset(a) | frozenset(b))
        return out

    def violated_original(self, F) -> Optional[frozenset]:
        ends = {eid: (self.graph.edges[eid].plus, self.graph.edges[eid].minus) for eid in F}
        return _find_ktt(self.t, F, ends, lambda v: True)

    def find_violation(self, state: ShrunkState, F) -> Optional[ViolatingSet]:
        # shrunk members never nest and their completions never close a K_{t,t}
        U = _find_ktt(self.t, F, state.ends, lambda v: v not in state.pseudo)
        return None if U is None else ViolatingSet(U)


class SquareFreeFamily(KttFreeFamily):
    name = "squarefree"

    def __init__(self, graph, t: int = 2) -> None:
        if t != 2:
            raise ValueError("square-free family needs t = 2")
        super().__init__(graph, 2)


class TwinFamily(FamilyOracle):
    """Families over a twin pairing x+ <-> x- of the original vertices."""

    def __init__(self, graph, t, twins) -> None:
        super().__init__(graph, t)
        tw = {}
        for a, b in (twins.items() if isinstance(twins, dict) else twins):
            if a.side == MINUS:
                a, b = b, a
            if a.side != PLUS or b.side != MINUS:
                raise GraphError("a twin pair needs one plus and one minus vertex")
            if a in tw or b in tw:
                raise GraphError(f"vertex paired twice: {a!r}/{b!r}")
            tw[a], tw[b] = b, a
        self.twins = tw

    def twin_closed(self, U) -> bool:
        return all(v in self.twins and self.twins[v] in U for v in U)

    def closure(self, U) -> frozenset:
        U = frozenset(U)
        return U | frozenset(self.twins[v] for v in U if v in self.twins)

    def unit_minus(self, state: ShrunkState, x: VertexId) -> VertexId:
        """The minus vertex of the unit whose plus vertex is x."""
        return state.partner(x) if x in state.pseudo else self.twins[x]

    def unit_plus(self, state: ShrunkState, y: VertexId) -> VertexId:
        return state.partner(y) if y in state.pseudo else self.twins[y]

    def unit_successor(self, state: ShrunkState, F) -> dict:
        """plus vertex of a unit -> (edge id, plus vertex of the unit its F edge enters)."""
        succ = {}
        for eid in sorted(F):
            p, m = state.ends[eid]
            succ[p] = (eid, self.unit_plus(state, m))
        return succ

    def unit_cycles(self, state: ShrunkState, F) -> list[list]:
        """Cycles of the unit map; each cycle is a list of (plus, edge id) steps."""
        succ = self.unit_successor(state, F)
        seen, cycles = set(), []
        for start in sorted(succ):
            if start in seen:
                continue
            path, pos, x = [], {}, start
            while x in succ and x not in seen and x not in pos:
                pos[x] = len(path)
                path.append(x)
                x = succ[x][1]
            if x in pos:
                cyc = path[pos[x]:]
                cycles.append([(u, succ[u][0]) for u in cyc])
            seen.update(path)
        return cycles


class OddSymmetricFamily(TwinFamily):
    """Twin-closed sets with an odd number of twin pairs (even factors)."""

    name = "oddsymmetric"
    alpha = "O(n) per check"

    def __init__(self, graph, twins) -> None:
        super().__init__(graph, 1, twins)

    def contains(self, U) -> bool:
        U = frozenset(U)
        return bool(U) and self.twin_closed(U) and (len(U) // 2) % 2 == 1

    def members(self) -> Optional[list]:
        pairs = sorted(v for v in self.twins if v.side == PLUS)
        if len(pairs) > 12:
            return None
        return [frozenset(c) | frozenset(self.twins[v] for v in c)
                for k in range(1, len(pairs) + 1, 2)
                for c in itertools.combinations(pairs, k)]

    def violated_original(self, F) -> Optional[frozenset]:
        st = ShrunkState(self.graph, 1)
        for cyc in self.unit_cycles(st, F):
            if len(cyc) % 2 == 1:
                return self.closure(u for u, _ in cyc)
        return None

    def find_violation(self, state: ShrunkState, F) -> Optional[ViolatingSet]:
        for cyc in self.unit_cycles(state, F):
            if len(cyc) % 2 == 1:
                units = [(u, self.unit_minus(state, u)) for u, _ in cyc]
                U = state.hat_set(x for pair in units for x in pair)
                return ViolatingSet(U, units)
        return None

    def level_candidates(self, ctx: LevelContext) -> Iterator[frozenset]:
        units = ctx.meta
        level = set(ctx.residual)
        if (units and len(units) % 2 == 1 and all(a in level and b in level for a, b in units)
                and len(units) == len(ctx.plus) == len(ctx.minus)):
            yield from self._formula(ctx, units)
        yield from degree_subsets(ctx)

    def _formula(self, ctx: LevelContext, units: list) -> Iterator[frozenset]:
        k = len(units)
        by_pair = defaultdict(list)
        for eid in (ctx.order or sorted(ctx.edges)):
            by_pair[ctx.edges[eid]].append(eid)
        heads = [i for i in range(k) if ctx.residual[units[i][1]] == 0]
        tails = [i for i in range(k) if ctx.residual[units[i][0]] == 0]
        if len(heads) > 1 or len(tails) > 1:
            return
        heads = heads or list(range(k))
        tails = tails or list(range(k))
        for h in heads:
            order = units[h:] + units[:h]
            for tpos in tails:
                j = (tpos - h) % k + 1          # 1-based position of the plus deficit
                pairs = []
                if j % 2 == 1:
                    pairs += [(order[i][0], order[i + 1][1]) for i in range(j - 1)]
                    for a in range(j, k - 1, 2):
                        pairs += [(order[a][0], order[a + 1][1]), (order[a + 1][0], order[a][1])]
                else:
                    for a in range(1, j - 1, 2):
                        pairs += [(order[a][0], order[a + 1][1]), (order[a + 1][0], order[a][1])]
                    for i in range(j - 1, k):
                        pairs.append((order[(i + 1) % k][0], order[i][1]))
                choices = [by_pair.get(p, []) for p in pairs]
                if not all(choices):
                    continue
                for combo in itertools.product(*choices):
                    yield frozenset(combo)


class TriangleTwinFamily(TwinFamily):
    """Twin triples {a, b, c}+- over triangles abc: no directed triangle in F."""

    name = "triangle"
    alpha = "O(n) per check"

    def __init__(self, graph, twins) -> None:
        super().__init__(graph, 1, twins)
        self._adj = defaultdict(set)
        for e in graph.edges.values():
            if e.plus in self.twins and e.minus in self.twins:
                self._adj[e.plus].add(self.twins[e.minus])

    def _joined(self, a, b) -> bool:
        return b in self._adj[a] and a in self._adj[b]

    def contains(self, U) -> bool:
        U = frozenset(U)
        if len(U) != 6 or not self.twin_closed(U):
            return False
        a, b, c = sorted(v for v in U if v.side == PLUS)
        return self._joined(a, b) and self._joined(b, c) and self._joined(a, c)

    def members(self) -> list:
        pairs = sorted(v for v in self.twins if v.side == PLUS)
        return [self.closure(tr) for tr in itertools.combinations(pairs, 3)
                if self._joined(tr[0], tr[1]) and self._joined(tr[1], tr[2])
                and self._joined(tr[0], tr[2])]

    def violated_original(self, F) -> Optional[frozenset]:
        st = ShrunkState(self.graph, 1)
        for cyc in self.unit_cycles(st, F):
            if len(cyc) == 3:
                return self.closure(u for u, _ in cyc)
        return None

    def find_violation(self, state: ShrunkState, F) -> Optional[ViolatingSet]:
        edges = self.graph.edges
        for cyc in self.unit_cycles(state, F):
            if len(cyc) != 3:
                continue
            ok = True
            for i, (u, out) in enumerate(cyc):
                inc = cyc[i - 1][1]
                if self.twins[edges[out].plus] != edges[inc].minus:
                    ok = False
            if ok:
                return ViolatingSet(self.closure(edges[out].plus for _, out in cyc))
        return None


class C4k2Family(TwinFamily):
    """t = 2; odd symmetric twin sets whose twin edges are all present."""

    name = "c4k2"
    alpha = "exponential (oracle scale only)"
    exhaustive = True

    def __init__(self, graph, twins) -> None:
        super().__init__(graph, 2, twins)
        pairs = set()
        for e in graph.edges.values():
            pairs.add((e.plus, e.minus))
        self._pairs = pairs
        self._members = None

    def contains(self, U) -> bool:
        U = frozenset(U)
        if not U or not self.twin_closed(U):
            return False
        ps = [v for v in U if v.side == PLUS]
        if len(ps) % 2 == 0:
            return False
        if any((a, self.twins[a]) not in self._pairs for a in ps):
            return False
        return all(((a, self.twins[b]) in self._pairs) == ((b, self.twins[a]) in self._pairs)
                   for a in ps for b in ps)

    def members(self) -> list:
        if self._members is None:
            pairs = sorted(v for v in self.twins if v.side == PLUS)
            if len(pairs) > 14:
                raise GraphError("c4k2 family limited to 14 twin pairs")
            out = []
            for k in range(1, len(pairs) + 1, 2):
                for c in itertools.combinations(pairs, k):
                    U = self.closure(c)
                    if self.contains(U):
                        out.append(U)
            self._members = out
        return self._members

    def violated_original(self, F) -> Optional[frozenset]:
        for U in self.members():
            if count_inside(self.graph, F, U) > set_bound(2, U):
                return U
        return None


class MatroidCircuitFamily(FamilyOracle):
    """Element pairs e+ e-; a member is the pair set of a matroid circuit."""

    name = "matroid"
    alpha = "circuit scan"
    exhaustive = True

    def __init__(self, graph, elements: dict, circuits) -> None:
        super().__init__(graph, 1)
        self.elements = dict(elements)            # name -> (plus, minus)
        self._by_plus = {p: name for name, (p, m) in self.elements.items()}
        self.circuits = []
        for C in circuits:
            C = frozenset(C)
            missing = C - set(self.elements)
            if missing or not C:
                raise GraphError(f"circuit over unknown elements: {sorted(missing)}")
            self.circuits.append(C)
        self._member_sets = {self.pair_set(C): C for C in self.circuits}

    def pair_set(self, C) -> frozenset:
        return frozenset(v for name in C for v in self.elements[name])

    def contains(self, U) -> bool:
        return frozenset(U) in self._member_sets

    def members(self) -> list:
        return list(self._member_sets)

    def selected(self, F) -> set:
        return {self._by_plus[self.graph.edges[eid].plus] for eid in F
                if self.graph.edges[eid].plus in self._by_plus}

    def is_independent(self, names) -> bool:
        names = set(names)
        return not any(C <= names for C in self.circuits)

    def rank(self, names) -> int:
        basis: set = set()
        for name in sorted(names):
            if self.is_independent(basis | {name}):
                basis.add(name)
        return len(basis)

    def level_size(self, state: ShrunkState, U) -> Optional[int]:
        # A circuit met by an earlier contraction: the union has rank below
        # |union| - 1, so the level gets back only what the rank leaves over.
        L = state.level_of(U)
        inner = {state.pseudo[v] for v in L if v in state.pseudo}
        if not inner:
            return None
        key = state.hat_set(L)
        names = {self._by_plus[v] for v in key if v in self._by_plus}
        return self.rank(names) - sum(state.records[rid].capacity for rid in inner)

    def violated_original(self, F) -> Optional[frozenset]:
        chosen = self.selected(F)
        for C in self.circuits:
            if C <= chosen:
                return self.pair_set(C)
        return None


class DirectedCycleFamily(FamilyOracle):
    """Branchings: one side holds the arcs, the other the digraph vertices.

    ``arcs`` maps each arc vertex to its (tail, head) vertex pair; its only
    edge joins it to the head.  A member is a directed cycle: its arcs on one
    side and its vertices on the other.
    """

    name = "branching"
    alpha = "O(n) per check"

    def __init__(self, graph, arcs: dict, arc_side: str = PLUS) -> None:
        super().__init__(graph, 1)
        self.arcs = dict(arcs)
        self.arc_side = arc_side

    def contains(self, U) -> bool:
        U = frozenset(U)
        A = [v for v in U if v.side == self.arc_side]
        W = {v for v in U if v.side != self.arc_side}
        if not A or any(a not in self.arcs for a in A):
            return False
        succ = {}
        for a in A:
            tail, head = self.arcs[a]
            if tail not in W or head not in W or tail in succ:
                return False
            succ[tail] = head
        if set(succ) != W or len(set(succ.values())) != len(W):
            return False
        start = next(iter(W))
        x, n = succ[start], 1
        while x != start:
            x, n = succ[x], n + 1
        return n == len(W)

    def members(self) -> list:
        """Every directed cycle, each found once from its smallest vertex."""
        out_arcs = defaultdict(list)
        for a, (tail, head) in sorted(self.arcs.items()):
            out_arcs[tail].append((head, a))
        found = []

        def walk(start, x, verts, arcs):
            for head, a in out_arcs[x]:
                if head == start:
                    found.append(frozenset(verts) | frozenset(arcs + [a]))
                elif head > start and head not in verts:
                    walk(start, head, verts + [head], arcs + [a])

        for s in sorted(out_arcs):
            walk(s, s, [s], [])
        return found

    def violated_original(self, F) -> Optional[frozenset]:
        pred = {}
        for eid in F:
            e = self.graph.edges[eid]
            a = e.plus if self.arc_side == PLUS else e.minus
            if a in self.arcs:
                tail, head = self.arcs[a]
                pred[head] = (tail, a)
        done = set()
        for start in sorted(pred):
            pos, path, x = {}, [], start
            while x in pred and x not in done and x not in pos:
                pos[x] = len(path)
                path.append(x)
                x = pred[x][0]
            if x in pos:
                cyc = path[pos[x]:]
                return frozenset(cyc) | frozenset(pred[v][1] for v in cyc)
            done.update(path)
        return None


class EmptyFamily(FamilyOracle):
    """No forbidden sets: plain bipartite t-matching."""

    name = "none"
    alpha = "O(1)"

    def contains(self, U) -> bool:
        return False

    def members(self) -> list:
        return []

    def violated_original(self, F) -> Optional[frozenset]:
        return None

    def find_violation(self, state, F) -> Optional[ViolatingSet]:
        return None
