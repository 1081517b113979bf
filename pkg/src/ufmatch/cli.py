"""Command line: parse instance files, solve, verify, run the oracle, reduce.

Instance files are line based; ``#`` starts a comment.  Vertex references in
solution files carry their side as a prefix (``+a``, ``-a``) because encoded
instances reuse a name on both sides.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .families import (C4k2Family, DirectedCycleFamily, EmptyFamily, ExplicitFamily,
                       FamilyOracle, KttFreeFamily, MatroidCircuitFamily, OddSymmetricFamily,
                       SquareFreeFamily, TriangleTwinFamily)
from .graph import MINUS, PLUS, BipartiteMultigraph, Digraph, GraphError, as_fraction
from .oracle import (BudgetExceeded, OracleBudget, brute_force_branching, brute_force_matching,
                     brute_force_max, brute_force_max_weight, brute_force_triangle_free,
                     max_inside)
from .reductions import (Reduction, decode_even_factor_to_matching, encode_branching,
                         encode_even_factor, encode_matching, encode_matroid,
                         encode_triangle_free)
from .shrinker import ExpansionError
from .solver_unweighted import solve_max, verify_weak_duality
from .solver_weighted import DualSolution, solve_max_weight, verify_dual_certificate

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_CONTRACT = 0, 1, 2, 3

KINDS = ("ufm", "matching", "evenfactor", "trianglefree", "branching", "matroid")
FAMILIES = ("none", "squarefree", "ktt", "explicit", "oddsymmetric", "triangle", "c4k2",
            "branching", "matroid")


class InputError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, source: str = "<input>"):
        where = f"{source}:{line}: " if line else f"{source}: "
        super().__init__(where + message)


@dataclass
class Instance:
    kind: str
    graph: BipartiteMultigraph
    family: FamilyOracle
    reduction: Optional[Reduction] = None
    names: dict = field(default_factory=dict)     # "+a" / "-a" -> VertexId

    @property
    def t(self) -> int:
        return self.family.t

    def vertex(self, ref: str):
        if ref not in self.names:
            raise KeyError(ref)
        return self.names[ref]

    def ref(self, v) -> str:
        return v.side + self.graph.label(v)


def _fraction(tok: str, line: int, source: str) -> Fraction:
    try:
        return as_fraction(tok)
    except (ValueError, ZeroDivisionError, TypeError):
        raise InputError(f"not a rational number: {tok!r}", line, source) from None


def _records(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].split()
        if body:
            yield no, body[0], body[1:]


def parse_instance(text: str, source: str = "<input>") -> Instance:
    recs = list(_records(text))
    kind = "ufm"
    for no, key, args in recs:
        if key == "problem":
            if len(args) != 1 or args[0] not in KINDS:
                raise InputError(f"problem must be one of {', '.join(KINDS)}", no, source)
            kind = args[0]
    body = [r for r in recs if r[1] != "problem"]
    try:
        if kind == "ufm":
            return _parse_ufm(body, source)
        return _parse_source(kind, body, source)
    except GraphError as exc:
        raise InputError(str(exc), None, source) from None


# ufm instances ---------------------------------------------------------------

_UFM_RECORDS = {"t", "vplus", "vminus", "edge", "family", "set", "twin", "arcvertex", "circuit"}


def _parse_ufm(recs, source) -> Instance:
    g = BipartiteMultigraph()
    names: dict = {}
    t, fam, fam_line = 1, "none", None
    sets, twins, arcmap, circuits = [], [], {}, []
    seen_edges: dict = {}

    def lookup(ref, side, no):
        v = names.get(side + ref)
        if v is None:
            other = names.get((MINUS if side == PLUS else PLUS) + ref)
            if other is not None:
                raise InputError(f"vertex {ref!r} is on the {other.side} side, expected {side}",
                                 no, source)
            raise InputError(f"unknown vertex {ref!r}", no, source)
        return v

    def signed(ref, no):
        if ref[:1] in (PLUS, MINUS):
            return lookup(ref[1:], ref[0], no)
        hits = [names[s + ref] for s in (PLUS, MINUS) if s + ref in names]
        if len(hits) != 1:
            raise InputError(f"vertex {ref!r} is unknown or ambiguous; prefix it with + or -",
                             no, source)
        return hits[0]

    for no, key, args in recs:
        if key not in _UFM_RECORDS:
            raise InputError(f"unknown record {key!r}", no, source)
        if key == "t":
            if len(args) != 1 or not args[0].isdigit() or int(args[0]) < 1:
                raise InputError("t needs one positive integer", no, source)
            t = int(args[0])
        elif key in ("vplus", "vminus"):
            side = PLUS if key == "vplus" else MINUS
            for name in args:
                if side + name in names:
                    raise InputError(f"duplicate {side} vertex {name!r}", no, source)
                names[side + name] = g.add_vertex(side, name)
        elif key == "edge":
            if len(args) not in (2, 3):
                raise InputError("edge needs <plus> <minus> [weight]", no, source)
            u, v = lookup(args[0], PLUS, no), lookup(args[1], MINUS, no)
            w = _fraction(args[2], no, source) if len(args) == 3 else Fraction(1)
            if (u, v) in seen_edges and seen_edges[u, v] != w:
                raise InputError(f"parallel edges {args[0]}-{args[1]} need equal weights",
                                 no, source)
            seen_edges[u, v] = w
            g.add_edge(u, v, w)
        elif key == "family":
            if not args or args[0] not in FAMILIES:
                raise InputError(f"family must be one of {', '.join(FAMILIES)}", no, source)
            fam, fam_line = args[0], no
        elif key == "set":
            sets.append((no, frozenset(signed(a, no) for a in args)))
        elif key == "twin":
            if len(args) != 2:
                raise InputError("twin needs <plus> <minus>", no, source)
            twins.append((lookup(args[0], PLUS, no), lookup(args[1], MINUS, no)))
        elif key == "arcvertex":
            if len(args) != 3:
                raise InputError("arcvertex needs <arc> <tail> <head>", no, source)
            a = signed(args[0], no)
            other = PLUS if a.side == MINUS else MINUS
            arcmap[a] = (lookup(args[1], other, no), lookup(args[2], other, no))
        elif key == "circuit":
            circuits.append((no, [lookup(a, PLUS, no) for a in args]))
    family = _build_family(g, t, fam, fam_line, sets, twins, arcmap, circuits, source)
    return Instance("ufm", g, family, None, names)


def _build_family(g, t, fam, no, sets, twins, arcmap, circuits, source) -> FamilyOracle:
    twin_map = {}
    for u, v in twins:
        if u in twin_map or v in set(twin_map.values()):
            raise InputError(f"vertex in two twin pairs: {g.label(u)}/{g.label(v)}", no, source)
        twin_map[u] = v
    needs_t1 = {"oddsymmetric", "triangle", "c4k2", "branching", "matroid"}
    if fam in needs_t1 and t != 1:
        raise InputError(f"family {fam} needs t = 1", no, source)
    if fam == "none":
        return EmptyFamily(g, t)
    if fam == "squarefree":
        if t != 2:
            raise InputError("family squarefree needs t = 2 (use ktt otherwise)", no, source)
        return SquareFreeFamily(g, t)
    if fam == "ktt":
        return KttFreeFamily(g, t)
    if fam == "explicit":
        return ExplicitFamily(g, t, [S for _, S in sets])
    if fam in ("oddsymmetric", "triangle", "c4k2"):
        if not twin_map:
            raise InputError(f"family {fam} needs twin records", no, source)
        cls = {"oddsymmetric": OddSymmetricFamily, "triangle": TriangleTwinFamily,
               "c4k2": C4k2Family}[fam]
        return cls(g, twin_map)
    if fam == "branching":
        if not arcmap:
            raise InputError("family branching needs arcvertex records", no, source)
        sides = {a.side for a in arcmap}
        if len(sides) != 1:
            raise InputError("all arc vertices must lie on one side", no, source)
        return DirectedCycleFamily(g, arcmap, sides.pop())
    # matroid: element pairs come from twin records, circuits name plus vertices
    pairs = {g.label(u): (u, v) for u, v in twin_map.items()}
    circ = []
    for cno, C in circuits:
        missing = [g.label(u) for u in C if u not in twin_map]
        if missing:
            raise InputError(f"circuit uses unpaired vertices {missing}", cno, source)
        circ.append([g.label(u) for u in C])
    return MatroidCircuitFamily(g, pairs, circ)


# source problems ----------------------------------------------------------------

_SOURCE_RECORDS = {
    "matching": {"vertex", "edge"},
    "trianglefree": {"vertex", "edge"},
    "evenfactor": {"vertex", "arc"},
    "branching": {"vertex", "arc"},
    "matroid": {"element", "circuit"},
}


def _parse_source(kind, recs, source) -> Instance:
    allowed = _SOURCE_RECORDS[kind]
    verts: dict = {}
    pairs, elements, weights, circuits = [], [], {}, []
    for no, key, args in recs:
        if key == "t":
            if args != ["1"]:
                raise InputError(f"problem {kind} is encoded with t = 1", no, source)
            continue
        if key not in allowed:
            raise InputError(f"record {key!r} is not allowed for problem {kind}", no, source)
        if key == "vertex":
            for name in args:
                if name in verts:
                    raise InputError(f"duplicate vertex {name!r}", no, source)
                verts[name] = len(verts)
        elif key in ("edge", "arc"):
            if len(args) not in (2, 3):
                raise InputError(f"{key} needs <u> <v> [weight]", no, source)
            for a in args[:2]:
                if a not in verts:
                    raise InputError(f"unknown vertex {a!r}", no, source)
            w = _fraction(args[2], no, source) if len(args) == 3 else Fraction(1)
            if w < 0:
                raise InputError("weights must be nonnegative", no, source)
            pairs.append((verts[args[0]], verts[args[1]], w, no))
        elif key == "element":
            if len(args) not in (1, 2):
                raise InputError("element needs <name> [weight]", no, source)
            if args[0] in weights:
                raise InputError(f"duplicate element {args[0]!r}", no, source)
            elements.append(args[0])
            weights[args[0]] = _fraction(args[1], no, source) if len(args) == 2 else Fraction(1)
        elif key == "circuit":
            unknown = [a for a in args if a not in weights]
            if unknown or not args:
                raise InputError(f"circuit over unknown elements {unknown}", no, source)
            circuits.append(list(args))
    names = list(verts)
    try:
        if kind == "matroid":
            red = encode_matroid(elements, circuits, weights)
        elif kind in ("matching", "trianglefree"):
            edges = [(u, v, w) for u, v, w, _ in pairs]
            red = (encode_matching(len(names), edges) if kind == "matching"
                   else encode_triangle_free(len(names), edges, names))
            if kind == "matching":
                _rename(red, names)
        else:
            D = Digraph(len(names), names)
            for u, v, w, _ in pairs:
                D.add_arc(u, v, w)
            red = encode_even_factor(D) if kind == "evenfactor" else encode_branching(D)
    except GraphError as exc:
        raise InputError(str(exc), None, source) from None
    g = red.graph
    refs = {v.side + g.label(v): v for v in g.vertices}
    return Instance(kind, g, red.family, red, refs)


def _rename(red: Reduction, names) -> None:
    for v in red.graph.vertices:
        red.graph.names[v] = names[v.index]
    red.source.names = list(names)


# solutions ----------------------------------------------------------------------

@dataclass
class Solution:
    matching: frozenset
    value: Fraction
    unit: bool = True
    bound: Optional[int] = None
    cert_x: Optional[frozenset] = None
    duals: Optional[DualSolution] = None
    source_value: Optional[Fraction] = None
    decoded: list = field(default_factory=list)


def instance_weights(inst: Instance, unit: bool) -> dict:
    return {eid: (Fraction(1) if unit else e.weight) for eid, e in inst.graph.edges.items()}


def _parallel_groups(g: BipartiteMultigraph) -> dict:
    groups: dict = {}
    for eid in sorted(g.edges):
        e = g.edges[eid]
        groups.setdefault((e.plus, e.minus), []).append(eid)
    return groups


def decode(inst: Instance, F, unit: bool) -> tuple[Optional[Fraction], list]:
    """Source-problem value and human-readable lines for an encoded solution."""
    red = inst.reduction
    if red is None:
        return None, []
    F = set(F)
    lines = []
    chosen = red.decode(F)
    if red.kind == "matching":
        D = red.source
        arcs = sorted(chosen)
        pairs = decode_even_factor_to_matching(D, arcs)
        weight = {(a.tail, a.head): a.weight for a in D.arcs}
        value = sum((Fraction(1) if unit else weight[p]) for p in pairs)
        lines = [f"edge {D.names[min(u, v)]} {D.names[max(u, v)]}" for u, v in sorted(pairs)]
        return Fraction(value), lines
    if red.kind in ("evenfactor", "branching"):
        D = red.source
        lines = [f"arc {D.names[D.arcs[i].tail]} {D.names[D.arcs[i].head]}" for i in sorted(chosen)]
    elif red.kind == "trianglefree":
        names = [inst.graph.label(v) for v in inst.graph.plus]
        lines = [f"edge {names[u]} {names[v]}" + (f" {k}" if k > 1 else "")
                 for (u, v), k in sorted(chosen.items())]
    elif red.kind == "matroid":
        lines = [f"element {name}" for name in sorted(chosen)]
    return red.source_value(F, weighted=not unit), lines


def format_solution(inst: Instance, sol: Solution) -> str:
    g = inst.graph
    out = [f"problem {inst.kind}", f"weights {'unit' if sol.unit else 'given'}",
           f"value {sol.value}"]
    F = set(sol.matching)
    for (u, v), ids in _parallel_groups(g).items():
        k = sum(1 for eid in ids if eid in F)
        if k:
            out.append(f"edge {g.label(u)} {g.label(v)}" + (f" {k}" if k > 1 else ""))
    if sol.cert_x is not None:
        out.append(f"bound {sol.bound}")
        out.append(" ".join(["certX"] + sorted(inst.ref(v) for v in sol.cert_x)))
    if sol.duals is not None:
        d = sol.duals
        for v in g.vertices:
            if d.p.get(v, 0):
                out.append(f"dual p {inst.ref(v)} {d.p[v]}")
        for (u, v), ids in _parallel_groups(g).items():
            for eid in ids:
                if d.q.get(eid, 0):
                    out.append(f"dual q {g.label(u)} {g.label(v)} {d.q[eid]}")
        for S in sorted(d.r, key=lambda S: sorted(inst.ref(v) for v in S)):
            if d.r[S]:
                refs = sorted(inst.ref(v) for v in S)
                out.append(" ".join(["dual r", str(d.r[S]), str(d.bound(inst.t, S))] + refs))
    if sol.source_value is not None:
        out.append(f"source {sol.source_value}")
        out += [f"decoded {line}" for line in sol.decoded]
    return "\n".join(out) + "\n"


def parse_solution(inst: Instance, text: str, source: str = "<solution>") -> Solution:
    g = inst.graph
    groups = _parallel_groups(g)
    by_label = {(g.label(u), g.label(v)): ids for (u, v), ids in groups.items()}
    F: set = set()
    sol = Solution(frozenset(), Fraction(0))
    p, q, r, bounds = {}, {}, {}, {}
    q_next: dict = {}
    have_duals = False

    def ref(tok, no):
        try:
            return inst.vertex(tok)
        except KeyError:
            raise InputError(f"unknown vertex reference {tok!r} (use +name or -name)",
                             no, source) from None

    def edge_ids(args, no):
        ids = by_label.get((args[0], args[1]))
        if ids is None:
            raise InputError(f"no edge {args[0]}-{args[1]} in the instance", no, source)
        return ids

    for no, key, args in _records(text):
        if key in ("problem", "decoded"):
            continue
        if key == "weights":
            if args not in (["unit"], ["given"]):
                raise InputError("weights must be unit or given", no, source)
            sol.unit = args == ["unit"]
        elif key == "value":
            sol.value = _fraction(args[0] if args else "", no, source)
        elif key == "source":
            sol.source_value = _fraction(args[0] if args else "", no, source)
        elif key == "edge":
            if len(args) not in (2, 3):
                raise InputError("edge needs <plus> <minus> [multiplicity]", no, source)
            ids = edge_ids(args, no)
            k = int(args[2]) if len(args) == 3 and args[2].isdigit() else 1
            free = [eid for eid in ids if eid not in F]
            if k < 1 or k > len(free):
                raise InputError(f"multiplicity {args[2:]} exceeds the parallel edges", no, source)
            F.update(free[:k])
        elif key == "bound":
            sol.bound = int(args[0]) if args and args[0].lstrip("-").isdigit() else None
            if sol.bound is None:
                raise InputError("bound needs an integer", no, source)
        elif key == "certX":
            sol.cert_x = frozenset(ref(a, no) for a in args)
        elif key == "dual":
            have_duals = True
            if len(args) >= 3 and args[0] == "p" and len(args) == 3:
                p[ref(args[1], no)] = _fraction(args[2], no, source)
            elif len(args) == 4 and args[0] == "q":
                ids = edge_ids(args[1:3], no)
                i = q_next.get(tuple(args[1:3]), 0)
                if i >= len(ids):
                    raise InputError("more q values than parallel edges", no, source)
                q_next[tuple(args[1:3])] = i + 1
                q[ids[i]] = _fraction(args[3], no, source)
            elif len(args) >= 4 and args[0] == "r":
                S = frozenset(ref(a, no) for a in args[3:])
                r[S] = _fraction(args[1], no, source)
                if not args[2].isdigit():
                    raise InputError("r needs <value> <bound> <vertices...>", no, source)
                bounds[S] = int(args[2])
            else:
                raise InputError("dual line must be p <v> <x>, q <u> <v> <x> or r <x> <b> <vs...>",
                                 no, source)
        else:
            raise InputError(f"unknown record {key!r}", no, source)
    sol.matching = frozenset(F)
    if have_duals:
        full_p = {v: p.get(v, Fraction(0)) for v in g.vertices}
        full_q = {eid: q.get(eid, Fraction(0)) for eid in g.edges}
        sol.duals = DualSolution(full_p, full_q, r, bounds)
    return sol


# commands -----------------------------------------------------------------------

class ContractError(RuntimeError):
    """The solver ran but could not produce a certified answer."""


def _max_inside(inst: Instance, budget: OracleBudget):
    sets = inst.family.members()

    def check(S):
        if sets is None:
            raise BudgetExceeded(f"family {inst.family.name} has no member list at this size")
        return max_inside(inst.graph, inst.t, sets, S, budget)
    return check


def solve(inst: Instance, weighted: bool = False, budget: Optional[OracleBudget] = None) -> Solution:
    g, fam = inst.graph, inst.family
    budget = budget or OracleBudget.from_env()
    unit = not weighted
    if unit:
        res = solve_max(g, fam)
        if res.bound == res.value:
            src, lines = decode(inst, res.matching, True)
            return Solution(res.matching, Fraction(res.value), True, res.bound,
                            res.certificate, None, src, lines)
        # the min-max bound is not tight for this family; certify by LP duality
        expected = res.value
    weights = instance_weights(inst, unit)
    wres = solve_max_weight(g, fam, weights)
    if unit and wres.value != expected:
        raise ContractError(f"weighted and unweighted solvers disagree ({wres.value} vs {expected})")
    rep = verify_dual_certificate(g, fam, wres.matching, wres.duals, weights,
                                  max_inside=_max_inside(inst, budget))
    if not rep.ok:
        raise ContractError("could not certify the solution:\n  " + "\n  ".join(rep.lines()))
    src, lines = decode(inst, wres.matching, unit)
    return Solution(wres.matching, wres.value, unit, None, None, wres.duals, src, lines)


def check_solution(inst: Instance, sol: Solution, budget: Optional[OracleBudget] = None) -> list:
    """Every failed check as a line naming the violated constraint; empty if valid."""
    g, fam, t = inst.graph, inst.family, inst.t
    budget = budget or OracleBudget.from_env()
    F = set(sol.matching)
    fails = []
    for v in g.vertices:
        d = sum(1 for eid in g.incident(v) if eid in F)
        if d > t:
            fails.append(f"degree: {inst.ref(v)} has degree {d} > {t}")
    U = fam.violated_original(F)
    if U is not None:
        refs = " ".join(sorted(inst.ref(v) for v in U))
        fails.append(f"set: {{{refs}}} holds more than its bound")
    weights = instance_weights(inst, sol.unit)
    total = sum((weights[eid] for eid in F), Fraction(0))
    if total != sol.value:
        fails.append(f"value: stated {sol.value}, edges give {total}")
    if sol.cert_x is not None:
        if not sol.unit:
            fails.append("certX certifies unit weights only")
        wd = verify_weak_duality(g, fam, F, sol.cert_x)
        if sol.bound is not None and sol.bound != wd.bound:
            fails.append(f"bound: stated {sol.bound}, certX gives {wd.bound}")
        if wd.bound != total:
            fails.append(f"certX: bound {wd.bound} does not match value {total}")
    if sol.duals is not None:
        rep = verify_dual_certificate(g, fam, F, sol.duals, weights,
                                      max_inside=_max_inside(inst, budget))
        fails += rep.lines()
    if sol.cert_x is None and sol.duals is None:
        fails.append("certificate: neither certX nor dual lines present")
    if inst.reduction is not None and sol.source_value is not None:
        src, _ = decode(inst, F, sol.unit)
        if src != sol.source_value:
            fails.append(f"source: stated {sol.source_value}, decoding gives {src}")
    return fails


def oracle(inst: Instance, weighted: bool = False, budget: Optional[OracleBudget] = None):
    """Ground truth by enumeration: (encoded value, source value or None)."""
    budget = budget or OracleBudget.from_env()
    g, fam = inst.graph, inst.family
    sets = fam.members()
    if sets is None:
        raise BudgetExceeded(f"family {fam.name} has no member list at this size")
    if weighted:
        value, _ = brute_force_max_weight(g, inst.t, sets, instance_weights(inst, False), budget)
    else:
        value, _ = brute_force_max(g, inst.t, sets, budget)
    red = inst.reduction
    src = None
    if red is not None:
        if red.kind == "matching":
            D = red.source
            arcs = D.arcs[0::2]
            src = brute_force_matching(D.n, [(a.tail, a.head) for a in arcs],
                                       [a.weight for a in arcs] if weighted else None)
        elif red.kind == "trianglefree":
            n, edges = red.source
            src = brute_force_triangle_free(n, [e[:2] for e in edges],
                                            [e[2] for e in edges] if weighted else None)
        elif red.kind == "branching":
            D = red.source
            src = brute_force_branching(D.n, [(a.tail, a.head, a.weight if weighted else 1)
                                              for a in D.arcs])
        else:
            src = Fraction(value)
    return Fraction(value), src


def reduce_instance(inst: Instance) -> str:
    """The encoded instance as a ufm file."""
    g, fam = inst.graph, inst.family
    out = [f"# encoded from problem {inst.kind}", "problem ufm", f"t {inst.t}",
           " ".join(["vplus"] + [g.label(v) for v in g.plus]),
           " ".join(["vminus"] + [g.label(v) for v in g.minus])]
    for eid in sorted(g.edges):
        e = g.edges[eid]
        out.append(f"edge {g.label(e.plus)} {g.label(e.minus)} {e.weight}")
    if isinstance(fam, EmptyFamily):
        out.append("family none")
    elif isinstance(fam, SquareFreeFamily):
        out.append("family squarefree")
    elif isinstance(fam, KttFreeFamily):
        out.append("family ktt")
    elif isinstance(fam, ExplicitFamily):
        out.append("family explicit")
        for S in fam.sets:
            out.append(" ".join(["set"] + sorted(inst.ref(v) for v in S)))
    elif isinstance(fam, MatroidCircuitFamily):
        out.append("family matroid")
        for name, (u, v) in fam.elements.items():
            out.append(f"twin {g.label(u)} {g.label(v)}")
        for C in fam.circuits:
            out.append(" ".join(["circuit"] + sorted(g.label(fam.elements[c][0]) for c in C)))
    elif isinstance(fam, DirectedCycleFamily):
        out.append("family branching")
        for a, (tail, head) in sorted(fam.arcs.items()):
            out.append(f"arcvertex {inst.ref(a)} {g.label(tail)} {g.label(head)}")
    else:
        name = {OddSymmetricFamily: "oddsymmetric", TriangleTwinFamily: "triangle",
                C4k2Family: "c4k2"}[type(fam)]
        out.append(f"family {name}")
        for u, v in sorted(fam.twins.items()):
            if u.side == PLUS:
                out.append(f"twin {g.label(u)} {g.label(v)}")
    return "\n".join(out) + "\n"


# entry point --------------------------------------------------------------------

def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read: {exc.strerror}", None, path) from None


def _write(path: Optional[str], text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ufmatch",
                                 description="Maximum (weighted) U-feasible t-matchings.")
    sub = ap.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", help="solve and write a certified solution")
    s.add_argument("--instance", required=True)
    s.add_argument("--weighted", action="store_true")
    s.add_argument("--out")
    v = sub.add_parser("verify", help="check a solution against its instance")
    v.add_argument("--instance", required=True)
    v.add_argument("--solution", required=True)
    o = sub.add_parser("oracle", help="exhaustive ground truth for small instances")
    o.add_argument("--instance", required=True)
    o.add_argument("--weighted", action="store_true")
    r = sub.add_parser("reduce", help="write the encoded instance as a ufm file")
    r.add_argument("--instance", required=True)
    r.add_argument("--out", required=True)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        inst = parse_instance(_read(args.instance), args.instance)
        if args.command == "solve":
            _write(args.out, format_solution(inst, solve(inst, args.weighted)))
            return EXIT_OK
        if args.command == "verify":
            sol = parse_solution(inst, _read(args.solution), args.solution)
            fails = check_solution(inst, sol)
            for line in fails:
                print(f"FAIL {line}")
            if fails:
                return EXIT_FAILED
            print(f"ok value {sol.value}")
            return EXIT_OK
        if args.command == "oracle":
            value, src = oracle(inst, args.weighted)
            print(f"value {value}")
            if inst.reduction is not None:
                print(f"source {src}")
            return EXIT_OK
        _write(args.out, reduce_instance(inst))
        return EXIT_OK
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (BudgetExceeded, ExpansionError, ContractError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
