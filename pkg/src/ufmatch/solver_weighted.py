"""Maximum-weight feasible t-matching by a primal-dual method with shrinking.

Duals: p on original vertices, q on original edges, r on shrunk sets (keyed
by the original vertex set).  The reduced weight of an edge e = {u, v} is
w'(e) = p(u) + p(v) + q(e) + sum of r(U) over sets containing both ends - w(e).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .families import FamilyOracle, ViolatingSet
from .graph import MINUS, PLUS, BipartiteMultigraph, VertexId
from .oracle import set_bound
from .shrinker import (ExpansionError, ExpansionPolicy, LevelContext, ShrunkState,
                       deficits, expand, expand_zero_dual)
from .solver_unweighted import (augment, build_auxiliary, find_augmenting_path,
                                find_violating_set, reachable)

ZERO = Fraction(0)


@dataclass
class DualSolution:
    p: dict
    q: dict
    r: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)   # right-hand sides differing from the set bound

    def bound(self, t: int, U) -> int:
        return self.bounds.get(U, set_bound(t, U))

    def objective(self, t: int) -> Fraction:
        return (t * sum(self.p.values(), ZERO) + sum(self.q.values(), ZERO)
                + sum((self.bound(t, U) * val for U, val in self.r.items()), ZERO))

    def positive_sets(self) -> list:
        return [U for U, val in self.r.items() if val > 0]

    def is_integral(self) -> bool:
        vals = list(self.p.values()) + list(self.q.values()) + list(self.r.values())
        return all(Fraction(v).denominator == 1 for v in vals)


def reduced_weight(graph: BipartiteMultigraph, duals: DualSolution, eid: int,
                   weights=None) -> Fraction:
    e = graph.edges[eid]
    w = e.weight if weights is None else weights[eid]
    total = duals.p[e.plus] + duals.p[e.minus] + duals.q.get(eid, ZERO) - w
    for U, val in duals.r.items():
        if val and e.plus in U and e.minus in U:
            total += val
    return total


def init_duals(graph: BipartiteMultigraph, weights=None) -> DualSolution:
    w = (lambda eid: graph.edges[eid].weight) if weights is None else (lambda eid: weights[eid])
    p = {}
    for v in graph.plus:
        p[v] = max((w(eid) for eid in graph.incident(v)), default=ZERO)
    for v in graph.minus:
        p[v] = ZERO
    return DualSolution(p, {eid: ZERO for eid in graph.edges}, {})


class _TightPolicy(ExpansionPolicy):
    """Completions using tight edges, keeping q > 0 edges, deficits at p = 0."""

    two_pass = True

    def __init__(self, solver: "WeightedSolver") -> None:
        self.solver = solver

    def edge_order(self, ctx: LevelContext):
        tight = self.solver.is_tight
        return sorted(ctx.edges, key=lambda eid: (not tight(eid), eid))

    def zero_capable(self, state: ShrunkState, x) -> bool:
        return any(self.solver.duals.p[o] == 0 for o in state.hat[x])

    def accept(self, ctx: LevelContext, cand, strict: bool) -> bool:
        if not strict:
            return True
        s = self.solver
        if not all(s.is_tight(eid) for eid in cand):
            return False
        if any(s.duals.q.get(eid, ZERO) > 0 and eid not in cand for eid in ctx.edges):
            return False
        dp, dm = deficits(ctx, cand)
        if dm and not all(self.zero_capable(ctx.state, x) for x in dm):
            return False
        if dp and any(self.zero_capable(ctx.state, x) for x in ctx.plus):
            if not all(self.zero_capable(ctx.state, x) for x in dp):
                return False
        return True


@dataclass
class WeightedResult:
    matching: frozenset
    duals: DualSolution
    value: Fraction
    dual_value: Fraction
    iterations: int = 0
    shrinks: int = 0
    modifies: int = 0
    dual_updates: int = 0


class WeightedSolver:
    def __init__(self, graph: BipartiteMultigraph, family: FamilyOracle, weights=None,
                 max_iterations: Optional[int] = None) -> None:
        self.graph = graph
        self.family = family
        self.t = family.t
        self.weights = ({eid: e.weight for eid, e in graph.edges.items()}
                        if weights is None else {eid: Fraction(w) for eid, w in weights.items()})
        if any(w < 0 for w in self.weights.values()):
            raise ValueError("weights must be nonnegative")
        self.duals = init_duals(graph, self.weights)
        self.state = ShrunkState(graph, self.t)
        self.F: set = set()
        self.policy = _TightPolicy(self)
        n = len(graph.vertices)
        self.max_iterations = max_iterations or (self.t * n ** 3 + 50 * (n + len(graph.edges)) + 100)
        self.stats = dict(iterations=0, shrinks=0, modifies=0, dual_updates=0)

    # reduced weights ---------------------------------------------------

    def w_prime(self, eid: int) -> Fraction:
        return reduced_weight(self.graph, self.duals, eid, self.weights)

    def is_tight(self, eid: int) -> bool:
        return self.w_prime(eid) == 0

    # auxiliary digraph ---------------------------------------------------

    def _zero_inside(self, v) -> bool:
        return any(self.duals.p[o] == 0 for o in self.state.hat[v])

    def auxiliary(self):
        st, F, t, p = self.state, self.F, self.t, self.duals.p
        S, T = [], []
        for v in st.plus:
            d = st.deg(F, v)
            if v in st.pseudo:
                if d == 0 and not self._zero_inside(v):
                    S.append(v)
                elif d == 1 and self._zero_inside(v):
                    T.append(v)
            else:
                if d <= t - 1 and p[v] > 0:
                    S.append(v)
                elif d >= 1 and p[v] == 0:
                    T.append(v)
        for v in st.minus:
            d = st.deg(F, v)
            if (d == 0) if v in st.pseudo else (d <= t - 1):
                T.append(v)
        return build_auxiliary(st, F, arc_ok=self.is_tight, sources=S, sinks=T,
                               back_ok=lambda eid: self.duals.q.get(eid, ZERO) == 0)

    # procedures ------------------------------------------------------------

    def modify(self, F: set, viol: ViolatingSet) -> set:
        st, t = self.state, self.t
        U = viol.members
        zero = sorted(u for u in U if u.side == PLUS and self.duals.p[u] == 0)
        L = st.level_of(U)
        Lp = [x for x in L if x.side == PLUS]
        Lm = [x for x in L if x.side == MINUS]
        Ls = set(L)
        edges = {}
        for x in Lp:
            for eid in st.incident[x]:
                pe, me = st.ends[eid]
                if me in Ls and self.graph.edges[eid].plus in U and self.graph.edges[eid].minus in U:
                    edges[eid] = (pe, me)
        inside = {eid for eid in F if eid in edges}
        last_error = None
        for u_star in zero:
            x_star = st.where[u_star]
            target = {}
            for x in Lp:
                if x == x_star:
                    target[x] = t - 1 if x not in st.pseudo else 0
                else:
                    target[x] = st.cap(x)
            for x in Lm:
                target[x] = sum(1 for eid in inside if edges[eid][1] == x)
            size = sum(target[x] for x in Lp)
            if size != sum(target[x] for x in Lm):
                last_error = "degree table is unbalanced"
                continue
            ctx = LevelContext(st, Lp, Lm, edges, target, size, None, viol.meta)
            ctx.order = self.policy.edge_order(ctx)
            base = F - inside
            for strict in (True, False):
                for K in self.family.level_candidates(ctx):
                    if not self.policy.accept(ctx, K, strict):
                        continue
                    cand = base | K
                    if self.family.find_violation(st, cand) is None:
                        return cand
        raise ExpansionError(f"no modification of the violated set exists ({last_error or 'family contract'})")

    def normalize(self, F, vertices) -> None:
        """Move q into p at saturated natural vertices.

        If every F edge at a saturated vertex v has q >= d > 0, raising p(v)
        by d and lowering those q by d keeps all reduced weights of F edges,
        the objective and the slackness conditions.  Done before a shrink so
        that no edge disappears into the shrunk set carrying q > 0.
        """
        st, q, t = self.state, self.duals.q, self.t
        todo = [v for v in vertices if v not in st.pseudo]
        changed = True
        while changed:
            changed = False
            for v in todo:
                fe = [eid for eid in st.incident[v] if eid in F]
                if len(fe) != t:
                    continue
                d = min(q.get(eid, ZERO) for eid in fe)
                if d > 0:
                    self.duals.p[v] += d
                    for eid in fe:
                        q[eid] -= d
                    changed = True

    def update_duals(self, D) -> Fraction:
        st, F, d = self.state, self.F, self.duals
        R = reachable(D)
        Rp = {v for v in st.plus if v in R}
        Rm = {v for v in st.minus if v in R}
        eps = None
        for eid, (pe, me) in st.ends.items():
            if eid not in F and pe in Rp and me not in Rm:
                wp = self.w_prime(eid)
                eps = wp if eps is None else min(eps, wp)
        for eid in F:
            pe, me = st.ends[eid]
            if me in Rm and pe not in Rp:
                val = d.q.get(eid, ZERO)
                eps = val if eps is None else min(eps, val)
        hat_rp = st.hat_set(Rp)
        for u in hat_rp:
            eps = d.p[u] if eps is None else min(eps, d.p[u])
        for rec in st.top_records():
            if rec.plus_pseudo not in R and rec.minus_pseudo in R:
                val = d.r.get(rec.key, ZERO)
                eps = val if eps is None else min(eps, val)
        if eps is None:
            raise RuntimeError("dual update is unbounded")
        if eps < 0:
            raise RuntimeError("negative dual step")
        for u in hat_rp:
            d.p[u] -= eps
        for v in st.hat_set(Rm):
            d.p[v] += eps
        for eid in F:
            pe, me = st.ends[eid]
            if pe in Rp and me not in Rm:
                d.q[eid] = d.q.get(eid, ZERO) + eps
            elif me in Rm and pe not in Rp:
                d.q[eid] = d.q.get(eid, ZERO) - eps
        for rec in st.top_records():
            inp, inm = rec.plus_pseudo in R, rec.minus_pseudo in R
            if inp and not inm:
                d.r[rec.key] = d.r.get(rec.key, ZERO) + eps
            elif inm and not inp:
                d.r[rec.key] = d.r.get(rec.key, ZERO) - eps
        return eps

    def _expand_zero(self) -> None:
        self.state, self.F = expand_zero_dual(self.state, self.F, self.family, self.duals.r,
                                              policy=self.policy)

    def run(self) -> WeightedResult:
        fam, stats = self.family, self.stats
        while True:
            stats["iterations"] += 1
            if stats["iterations"] > self.max_iterations:
                raise RuntimeError("iteration budget exceeded")
            D = self.auxiliary()
            if not D.sources:
                break
            P = find_augmenting_path(D)
            if P is None:
                self.update_duals(D)
                stats["dual_updates"] += 1
                self._expand_zero()
                continue
            Fp = augment(self.F, P)
            if fam.find_violation(self.state, Fp) is None:
                self.F = Fp
                self._expand_zero()
                continue
            F, viol = find_violating_set(fam, self.state, self.F, P)
            if any(u.side == PLUS and self.duals.p[u] == 0 for u in viol.members):
                self.F = self.modify(F, viol)
                stats["modifies"] += 1
                self._expand_zero()
            else:
                self.normalize(F, self.state.level_of(viol.members))
                size = fam.level_size(self.state, viol.members)
                rec, self.F = self.state.shrink(viol.members, F, viol.meta, size)
                self.duals.r.setdefault(rec.key, ZERO)
                if rec.capacity != set_bound(self.t, rec.key):
                    self.duals.bounds[rec.key] = rec.capacity
                stats["shrinks"] += 1
        if self.state.records:
            _, self.F = expand(self.state.copy(), self.F, fam, policy=self.policy,
                               final_ok=lambda s, X: fam.violated_original(X) is None)
            self.state = ShrunkState(self.graph, self.t)
        self.duals.r = {U: val for U, val in self.duals.r.items() if val != 0}
        self.duals.bounds = {U: b for U, b in self.duals.bounds.items() if U in self.duals.r}
        value = sum((self.weights[eid] for eid in self.F), ZERO)
        return WeightedResult(frozenset(self.F), self.duals, value,
                              self.duals.objective(self.t), **stats)


def solve_max_weight(graph: BipartiteMultigraph, family: FamilyOracle, weights=None) -> WeightedResult:
    return WeightedSolver(graph, family, weights).run()


@dataclass
class CertificateReport:
    failures: list            # (check, witness, detail)
    primal_value: Fraction
    dual_value: Fraction

    @property
    def ok(self) -> bool:
        return not self.failures

    def lines(self) -> list[str]:
        return [f"{check}: {witness} ({detail})" for check, witness, detail in self.failures]


def verify_dual_certificate(graph: BipartiteMultigraph, family: FamilyOracle, F,
                            duals: DualSolution, weights=None,
                            max_inside=None) -> CertificateReport:
    """Exact check of primal and dual feasibility, slackness, and equal objectives.

    A positive r(S) must sit on a family member with its usual bound, unless
    ``max_inside(S)`` is given; it then has to show that no feasible solution
    puts more than the stated bound inside S.
    """
    t = family.t
    F = set(F)
    w = ({eid: e.weight for eid, e in graph.edges.items()} if weights is None else weights)
    fails = []
    for eid in F:
        if eid not in graph.edges:
            fails.append(("primal", f"edge {eid}", "not in the graph"))
    F &= set(graph.edges)
    deg = {v: 0 for v in graph.vertices}
    for eid in F:
        deg[graph.edges[eid].plus] += 1
        deg[graph.edges[eid].minus] += 1
    for v, d in deg.items():
        if d > t:
            fails.append(("primal degree", graph.label(v), f"degree {d} > {t}"))
    U = family.violated_original(F)
    if U is not None:
        fails.append(("primal set", _names(graph, U), "too many edges inside"))
    for v in graph.vertices:
        pv = duals.p.get(v)
        if pv is None or pv < 0:
            fails.append(("dual p", graph.label(v), f"p = {pv}"))
    for eid, val in duals.q.items():
        if eid not in graph.edges or val < 0:
            fails.append(("dual q", f"edge {eid}", f"q = {val}"))
    for S, val in duals.r.items():
        if val < 0:
            fails.append(("dual r", _names(graph, S), f"r = {val}"))
        if not val:
            continue
        if family.contains(S) and duals.bound(t, S) == set_bound(t, S):
            continue
        if max_inside is None:
            fails.append(("dual r", _names(graph, S), "not a member of the family"))
            continue
        most = max_inside(S)
        if most > duals.bound(t, S):
            fails.append(("dual r", _names(graph, S),
                          f"x(E[S]) <= {duals.bound(t, S)} is not valid: {most} edges fit"))
    full = DualSolution({v: duals.p.get(v, ZERO) for v in graph.vertices},
                        {eid: duals.q.get(eid, ZERO) for eid in graph.edges}, duals.r, duals.bounds)
    for eid, e in graph.edges.items():
        wp = reduced_weight(graph, full, eid, w)
        if wp < 0:
            fails.append(("dual edge", _edge(graph, eid), f"reduced weight {wp} < 0"))
        if eid in F and wp != 0:
            fails.append(("CS x>0 => w'=0", _edge(graph, eid), f"reduced weight {wp}"))
    for v in graph.vertices:
        if full.p[v] > 0 and deg[v] != t:
            fails.append(("CS p>0 => deg=t", graph.label(v), f"p = {full.p[v]}, degree {deg[v]}"))
    for eid, val in full.q.items():
        if val > 0 and eid not in F:
            fails.append(("CS q>0 => x=1", _edge(graph, eid), f"q = {val}"))
    for S, val in duals.r.items():
        if val > 0:
            inside = sum(1 for eid in F if graph.edges[eid].plus in S and graph.edges[eid].minus in S)
            if inside != duals.bound(t, S):
                fails.append(("CS r>0 => tight set", _names(graph, S),
                              f"{inside} edges inside, bound {duals.bound(t, S)}"))
    primal = sum((w[eid] for eid in F), ZERO)
    dual = full.objective(t)
    if primal != dual:
        fails.append(("objective", "primal/dual", f"{primal} != {dual}"))
    return CertificateReport(fails, primal, dual)


def _names(graph, S) -> str:
    return "{" + " ".join(sorted(graph.label(v) for v in S)) + "}"


def _edge(graph, eid) -> str:
    e = graph.edges[eid]
    return f"{graph.label(e.plus)}-{graph.label(e.minus)} (edge {eid})"
