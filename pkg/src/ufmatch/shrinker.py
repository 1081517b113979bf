"""The shrunk graph G obtained from the input graph by repeated shrinking.

A shrink replaces the current vertices touched by an original set U (its
natural members plus every pseudovertex pair whose preimage meets U) by one
new plus/minus pseudovertex pair.  Edges of E[U] disappear into the record;
every other edge keeps its id and has the endpoint(s) inside the shrunk level
re-pointed to the pair.  Expansion reverses this one level at a time and asks
the family for the inner edge set F_U.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional

from .graph import MINUS, PLUS, BipartiteMultigraph, VertexId


class ExpansionError(RuntimeError):
    """The family could not complete a shrunk set."""


class ExpansionBudget(ExpansionError):
    """The completion search ran out of attempts."""


@dataclass
class ShrinkRecord:
    rid: int
    members: frozenset          # the original set U that was shrunk
    plus_pseudo: VertexId
    minus_pseudo: VertexId
    level_plus: list
    level_minus: list
    hidden: dict                # edge id -> (plus, minus) endpoints at the level
    repointed: dict             # edge id -> {side: endpoint before the shrink}
    meta: object = None
    key: frozenset = frozenset()  # every original vertex inside the pair
    capacity: int = 0             # edges a completion puts inside ``key``
    size: Optional[int] = None    # edges added at this level; None for the usual count

    @property
    def pair(self) -> tuple:
        return (self.plus_pseudo, self.minus_pseudo)

    @property
    def level(self) -> list:
        return self.level_plus + self.level_minus


class ShrunkState:
    """Current graph, shrink records, natural/pseudo classification, hat map."""

    def __init__(self, graph: BipartiteMultigraph, t: int) -> None:
        self.graph = graph
        self.t = t
        self.ends: dict[int, tuple] = {e.id: (e.plus, e.minus) for e in graph.edges.values()}
        self.plus: dict[VertexId, None] = dict.fromkeys(graph.plus)
        self.minus: dict[VertexId, None] = dict.fromkeys(graph.minus)
        self.records: dict[int, ShrinkRecord] = {}
        self.pseudo: dict[VertexId, int] = {}
        self.hat: dict[VertexId, frozenset] = {v: frozenset([v]) for v in graph.vertices}
        self.where: dict[VertexId, VertexId] = {v: v for v in graph.vertices}
        self.incident: dict[VertexId, set] = {v: set(graph.incident(v)) for v in graph.vertices}
        self._next = {PLUS: len(graph.plus), MINUS: len(graph.minus)}
        self._next_rid = 0
        self.shrink_count = 0

    def copy(self) -> "ShrunkState":
        s = ShrunkState.__new__(ShrunkState)
        s.graph, s.t = self.graph, self.t
        s.ends = dict(self.ends)
        s.plus, s.minus = dict(self.plus), dict(self.minus)
        s.records = dict(self.records)
        s.pseudo = dict(self.pseudo)
        s.hat = dict(self.hat)
        s.where = dict(self.where)
        s.incident = {v: set(ids) for v, ids in self.incident.items()}
        s._next = dict(self._next)
        s._next_rid = self._next_rid
        s.shrink_count = self.shrink_count
        return s

    # classification -----------------------------------------------------

    @property
    def vertices(self) -> list:
        return list(self.plus) + list(self.minus)

    def is_pseudo(self, v: VertexId) -> bool:
        return v in self.pseudo

    def cap(self, v: VertexId) -> int:
        return 1 if v in self.pseudo else self.t

    def record_of(self, v: VertexId) -> ShrinkRecord:
        return self.records[self.pseudo[v]]

    def partner(self, v: VertexId) -> VertexId:
        rec = self.record_of(v)
        return rec.minus_pseudo if v == rec.plus_pseudo else rec.plus_pseudo

    def top_records(self) -> list[ShrinkRecord]:
        """Records whose pseudovertex pair is currently in the graph."""
        return [self.records[self.pseudo[v]] for v in self.plus if v in self.pseudo]

    def deg(self, F, v: VertexId) -> int:
        return sum(1 for eid in self.incident[v] if eid in F)

    def hat_set(self, X: Iterable) -> frozenset:
        out: set = set()
        for v in X:
            out |= self.hat[v]
        return frozenset(out)

    def level_of(self, U) -> list:
        """U_n plus U_p: current vertices whose preimage meets U, closed under pairs."""
        L = dict.fromkeys(self.where[x] for x in sorted(U) if x in self.where)
        for v in list(L):
            if v in self.pseudo:
                L[self.partner(v)] = None
        return list(L)

    # shrink / expand ----------------------------------------------------

    def shrink(self, U, F: set, meta=None, size: Optional[int] = None) -> tuple[ShrinkRecord, set]:
        """Shrink the level of U; ``size`` overrides the number of edges it will get back."""
        U = frozenset(U)
        L = self.level_of(U)
        if not L:
            raise ValueError("shrink: U meets no current vertex")
        Lp = [v for v in L if v.side == PLUS]
        Lm = [v for v in L if v.side == MINUS]
        if not Lp or not Lm:
            raise ValueError("shrink: level must have vertices on both sides")
        Lset = set(L)
        up = VertexId(PLUS, self._next[PLUS])
        vm = VertexId(MINUS, self._next[MINUS])
        self._next[PLUS] += 1
        self._next[MINUS] += 1
        touched = set()
        for v in L:
            touched |= self.incident[v]
        hidden, repointed = {}, {}
        orig = self.graph.edges
        for eid in sorted(touched):
            p, m = self.ends[eid]
            if p in Lset and m in Lset and orig[eid].plus in U and orig[eid].minus in U:
                hidden[eid] = (p, m)
                continue
            old = {}
            if p in Lset:
                old[PLUS] = p
                p = up
            if m in Lset:
                old[MINUS] = m
                m = vm
            repointed[eid] = old
            self.ends[eid] = (p, m)
        inner = {self.pseudo[v] for v in L if v in self.pseudo}
        usual = min(sum(self.cap(v) for v in Lp), sum(self.cap(v) for v in Lm)) - 1
        level_size = usual if size is None else size
        capacity = level_size + sum(self.records[rid].capacity for rid in inner)
        rec = ShrinkRecord(self._next_rid, U, up, vm, Lp, Lm, hidden, repointed, meta,
                           self.hat_set(L), capacity, None if size == usual else size)
        self._next_rid += 1
        self.shrink_count += 1
        for v in L:
            (self.plus if v.side == PLUS else self.minus).pop(v)
            del self.incident[v]
        for eid in hidden:
            del self.ends[eid]
        self.plus[up] = None
        self.minus[vm] = None
        self.records[rec.rid] = rec
        self.pseudo[up] = self.pseudo[vm] = rec.rid
        self.hat[up] = self.hat_set(Lp)
        self.hat[vm] = self.hat_set(Lm)
        for side_v in (up, vm):
            for o in self.hat[side_v]:
                self.where[o] = side_v
        self.incident[up] = {eid for eid in repointed if self.ends[eid][0] == up}
        self.incident[vm] = {eid for eid in repointed if self.ends[eid][1] == vm}
        return rec, set(F) - set(hidden)

    def restore(self, rid: int) -> ShrinkRecord:
        """Undo one shrink whose pair is current; F is left to the caller."""
        rec = self.records[rid]
        up, vm = rec.pair
        if up not in self.plus:
            raise ValueError(f"record {rid} is nested inside another shrunk set")
        del self.plus[up], self.minus[vm]
        del self.incident[up], self.incident[vm]
        del self.pseudo[up], self.pseudo[vm]
        del self.records[rid]
        for v in rec.level_plus:
            self.plus[v] = None
        for v in rec.level_minus:
            self.minus[v] = None
        for v in rec.level:
            self.incident[v] = set()
            for o in self.hat[v]:
                self.where[o] = v
        for eid, old in rec.repointed.items():
            if eid not in self.ends:
                continue
            p, m = self.ends[eid]
            if PLUS in old and p == up:
                p = old[PLUS]
            if MINUS in old and m == vm:
                m = old[MINUS]
            self.ends[eid] = (p, m)
            for x in (p, m):
                if x in self.incident:
                    self.incident[x].add(eid)
        for eid, (p, m) in rec.hidden.items():
            self.ends[eid] = (p, m)
            self.incident[p].add(eid)
            self.incident[m].add(eid)
        return rec


# expansion ------------------------------------------------------------------

@dataclass
class LevelContext:
    """One level being completed: vertices, usable edges, and degree budget.

    ``residual[x]`` is what x may still take; ``size`` is the number of edges
    to choose on each side.  Shrink records supply ``record``; Modify passes
    exact targets with ``record=None``.
    """
    state: ShrunkState
    plus: list
    minus: list
    edges: dict                 # eid -> (plus, minus)
    residual: dict
    size: int
    record: Optional[ShrinkRecord] = None
    meta: object = None
    free_plus: bool = False     # no F edge reached the pair's plus side
    free_minus: bool = False
    order: Optional[list] = None  # preferred edge order for enumeration


def level_context(state: ShrunkState, rec: ShrinkRecord, F) -> LevelContext:
    """Context for completing ``rec`` right after ``state.restore(rec.rid)``."""
    t = state.t
    residual = {x: state.cap(x) - state.deg(F, x) for x in rec.level}
    if any(r < 0 for r in residual.values()):
        raise ExpansionError(f"degree constraint broken at level of record {rec.rid}")
    k_plus = sum(state.cap(x) for x in rec.level_plus)
    k_minus = sum(state.cap(x) for x in rec.level_minus)
    size = min(k_plus, k_minus) - 1 if rec.size is None else rec.size
    used_plus = sum(state.cap(x) - residual[x] for x in rec.level_plus)
    used_minus = sum(state.cap(x) - residual[x] for x in rec.level_minus)
    return LevelContext(state, list(rec.level_plus), list(rec.level_minus),
                        dict(rec.hidden), residual, size, rec, rec.meta,
                        free_plus=used_plus == 0, free_minus=used_minus == 0)


def degree_subsets(ctx: LevelContext, order: Optional[list] = None,
                   limit: int = 20000) -> Iterator[frozenset]:
    """Edge subsets of the level with ``size`` edges and degrees <= residual."""
    if order is None:
        order = ctx.order
    eids = order if order is not None else sorted(ctx.edges)
    ends = [ctx.edges[e] for e in eids]
    res = dict(ctx.residual)
    need = ctx.size
    if need < 0:
        return
    chosen: list = []
    count = [0]

    def rec(i, remaining):
        if remaining == 0:
            count[0] += 1
            yield frozenset(chosen)
            return
        if len(eids) - i < remaining or count[0] >= limit:
            return
        p, m = ends[i]
        if res.get(p, 0) > 0 and res.get(m, 0) > 0:
            res[p] -= 1
            res[m] -= 1
            chosen.append(eids[i])
            yield from rec(i + 1, remaining - 1)
            chosen.pop()
            res[p] += 1
            res[m] += 1
        yield from rec(i + 1, remaining)

    yield from rec(0, need)


def deficits(ctx: LevelContext, cand) -> tuple[list, list]:
    """Level vertices left below their residual by ``cand``, per side."""
    used = {x: 0 for x in ctx.residual}
    for eid in cand:
        p, m = ctx.edges[eid]
        used[p] += 1
        used[m] += 1
    dp = [x for x in ctx.plus if used[x] < ctx.residual[x]]
    dm = [x for x in ctx.minus if used[x] < ctx.residual[x]]
    return dp, dm


class ExpansionPolicy:
    """Hook for the weighted solver: which candidates are acceptable."""

    two_pass = False  # retry with strict=False when the strict pass fails

    def accept(self, ctx: LevelContext, cand: frozenset, strict: bool) -> bool:
        return True

    def edge_order(self, ctx: LevelContext) -> Optional[list]:
        return None


DEFAULT_POLICY = ExpansionPolicy()


def expand(state: ShrunkState, F: set, family, *,
           select: Callable[[ShrinkRecord], bool] = lambda rec: True,
           final_ok: Optional[Callable[[ShrunkState, set], bool]] = None,
           policy: ExpansionPolicy = DEFAULT_POLICY,
           search: bool = True, max_attempts: int = 2000) -> tuple[ShrunkState, set]:
    """Expand current records accepted by ``select``, outermost first.

    Inner records exposed by an expansion are considered in turn.  With
    ``search`` the completions are explored depth first until ``final_ok``
    holds; otherwise the first degree-feasible completion is taken.
    """
    attempts = [0]

    def dfs(st: ShrunkState, F: set, strict: bool):
        tops = [r for r in st.top_records() if select(r)]
        if not tops:
            if final_ok is None or not search or final_ok(st, F):
                return st, F
            return None
        rec = tops[0]
        base = st.copy()
        base.restore(rec.rid)
        ctx = level_context(base, rec, F)
        ctx.order = policy.edge_order(ctx)
        for cand in family.level_candidates(ctx):
            if not policy.accept(ctx, cand, strict):
                continue
            attempts[0] += 1
            if attempts[0] > max_attempts:
                raise ExpansionBudget("expansion search budget exhausted")
            out = dfs(base.copy(), F | cand, strict)
            if out is not None:
                return out
            if not search:
                break
        return None

    for strict in ((True, False) if policy.two_pass else (False,)):
        out = dfs(state, set(F), strict)
        if out is not None:
            return out
    raise ExpansionError("no completion satisfies the degree constraints "
                         "and family feasibility")


def expand_all(state: ShrunkState, F: set, family, *, policy: ExpansionPolicy = DEFAULT_POLICY,
               search: bool = True) -> set:
    """Expand every record; returns the edge set on the original graph."""
    st, Fh = expand(state.copy(), F, family, policy=policy, search=search,
                    final_ok=lambda s, X: family.violated_original(X) is None)
    return Fh


def expand_zero_dual(state: ShrunkState, F: set, family, r: dict, *,
                     policy: ExpansionPolicy = DEFAULT_POLICY) -> tuple[ShrunkState, set]:
    """Expand current records whose set has r = 0 (repeatedly)."""
    if not any(r.get(rec.key, 0) == 0 for rec in state.top_records()):
        return state, F
    return expand(state, F, family, policy=policy,
                  select=lambda rec: r.get(rec.key, 0) == 0,
                  final_ok=lambda s, X: family.find_violation(s, X) is None)
