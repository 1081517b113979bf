"""Release criteria.  Each test prints one PASS/FAIL line."""

import itertools
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from builders import (STRUCTURED, carries_factor, odd_symmetric_instance, random_bipartite,
                      random_digraph, random_family_instance, random_graph, seeded,
                      structured_instance, vertex_induced)
from ufmatch.cli import check_solution, format_solution, parse_instance, parse_solution, solve
from ufmatch.families import EmptyFamily, SquareFreeFamily
from ufmatch.graph import BipartiteMultigraph
from ufmatch.oracle import (OracleBudget, brute_force_branching, brute_force_matching,
                            brute_force_max, brute_force_max_weight, brute_force_triangle_free,
                            min_max_value, verify_solution)
from ufmatch.reductions import (encode_branching, encode_even_factor,
                                encode_matching, encode_matching_as_even_factor,
                                encode_triangle_free)
from ufmatch.shrinker import ShrunkState, expand_all
from ufmatch.solver_unweighted import solve_max, verify_weak_duality
from ufmatch.solver_weighted import solve_max_weight, verify_dual_certificate

BIG = OracleBudget(64)


@pytest.fixture
def criterion(capsys):
    @contextmanager
    def run(number, title):
        start = time.perf_counter()
        try:
            yield
        except BaseException:
            with capsys.disabled():
                print(f"\nFAIL criterion {number}: {title}")
            raise
        with capsys.disabled():
            print(f"\nPASS criterion {number}: {title} ({time.perf_counter() - start:.1f}s)")
    return run


def bipartite_5x5_classes():
    """Every bipartite graph on 5 + 5 vertices up to permuting each side."""
    perms = list(itertools.permutations(range(5)))
    table = [[sum(1 << p[j] for j in range(5) if m >> j & 1) for m in range(32)] for p in perms]
    level = {()}
    for _ in range(5):
        level = {min(tuple(sorted(tb[r] for r in rows + (m,))) for tb in table)
                 for rows in level for m in range(32)}
    for rows in sorted(level):
        yield BipartiteMultigraph.from_pairs(
            5, 5, [(i, j) for i, r in enumerate(rows) for j in range(5) if r >> j & 1])


def check_min_max(g, fam):
    res = solve_max(g, fam)
    assert fam.violated_original(res.matching) is None
    assert res.value == res.bound == min_max_value(g, fam.t, res.certificate, fam.contains)
    assert res.value == brute_force_max(g, fam.t, fam.members(), BIG)[0]


def test_min_max_equality(criterion):
    with criterion(1, "min-max equality on 5+5 classes and 500 random graphs up to 8+8"):
        start = time.perf_counter()
        classes = 0
        for g in bipartite_5x5_classes():
            check_min_max(g, SquareFreeFamily(g))
            classes += 1
        assert classes == 5624
        rng = seeded(1)
        kinds = ("squarefree", "k22", "explicit")
        for i in range(500):
            check_min_max(*random_family_instance(rng, kinds[i % 3], 8))
        assert time.perf_counter() - start < 120


def test_weak_duality(criterion):
    with criterion(2, "weak duality on 10,000 (F, X) pairs"):
        rng = seeded(2)
        pairs = 0
        while pairs < 10_000:
            g, fam = random_family_instance(rng, rng.choice(("squarefree", "k22", "explicit")), 6)
            for _ in range(10):
                F = set()
                for eid in rng.sample(sorted(g.edges), len(g.edges)):
                    if verify_weak_duality(g, fam, F | {eid}, ()).violation is None:
                        F.add(eid)
                X = [v for v in g.vertices if rng.random() < 0.3]
                wd = verify_weak_duality(g, fam, F, X)
                assert wd.holds, (wd, X)
                pairs += 1


def test_reduction_fidelity(criterion):
    with criterion(3, "reduction chains match the source-problem oracles"):
        rng = seeded(3)
        for _ in range(200):
            n = rng.randint(2, 8)
            edges = random_graph(rng, n, rng.uniform(0.2, 0.7))
            if edges:
                red = encode_matching(n, edges)
                assert solve_max(red.graph, red.family).value == \
                    2 * brute_force_matching(n, edges)
            red = encode_triangle_free(n, edges)
            assert solve_max(red.graph, red.family).value == brute_force_triangle_free(n, edges)
        for _ in range(200):
            n = rng.randint(2, 6)
            D, arcs = random_digraph(rng, n, rng.uniform(0.2, 0.6))
            red = encode_branching(D)
            assert solve_max_weight(red.graph, red.family).value == \
                brute_force_branching(n, arcs)


def test_weighted_optimality(criterion):
    with criterion(4, "weighted optimum, dual certificate and integral duals on 300 instances"):
        rng = seeded(4)
        for i in range(300):
            if i % 2:
                g, fam = odd_symmetric_instance(rng, rng.randint(2, 6))
            else:
                g = random_bipartite(rng, rng.randint(1, 5), rng.randint(1, 5),
                                     rng.uniform(0.3, 0.8))
                fam = SquareFreeFamily(g)
            w = vertex_induced(g, rng)
            res = solve_max_weight(g, fam, w)
            assert res.value == res.dual_value
            rep = verify_dual_certificate(g, fam, res.matching, res.duals, w)
            assert rep.ok, rep.lines()
            assert res.duals.is_integral()
            assert len(res.duals.positive_sets()) <= len(g.vertices) / 2
            assert res.value == brute_force_max_weight(g, fam.t, fam.members(), w, BIG)[0]


def shrink_expand_cycle(rng, kind):
    while True:
        g, fam = structured_instance(rng, kind)
        members = [U for U in fam.members() if carries_factor(g, fam.t, U)]
        if members:
            break
    state = ShrunkState(g, fam.t)
    U = rng.choice(members)
    state.shrink(U, set(), None, fam.level_size(state, U))
    rest = [W for W in members if not W & U]
    if rest and rng.random() < 0.5:
        # a second shrink only where the algorithm could make it: the
        # shrunk graph must still have a feasible completion
        W = rng.choice(rest)
        trial = state.copy()
        trial.shrink(W, set(), None, fam.level_size(trial, W))
        if fam.feasible_or_violating(trial, set()) is None:
            state = trial
    F = set()
    for eid in rng.sample(sorted(state.ends), len(state.ends)):
        p, m = state.ends[eid]
        if state.deg(F, p) >= state.cap(p) or state.deg(F, m) >= state.cap(m):
            continue
        if fam.feasible_or_violating(state, F | {eid}) is None:
            F.add(eid)
    Fh = expand_all(state, F, fam)
    assert verify_solution(g, fam.t, fam.members(), Fh) is None
    assert len(Fh) == len(F) + sum(rec.capacity for rec in state.top_records())


def test_family_contract(criterion):
    with criterion(5, "1,000 shrink/expand cycles per structured family"):
        for kind in STRUCTURED:
            rng = seeded(50 + STRUCTURED.index(kind))
            for _ in range(1000):
                shrink_expand_cycle(rng, kind)


def weighted_files(rng):
    """Instance texts for the mutation run."""
    kind = rng.choice(("squarefree", "matching", "branching"))
    if kind == "squarefree":
        g = random_bipartite(rng, rng.randint(2, 4), rng.randint(2, 4), rng.uniform(0.4, 0.9))
        pi = {v: rng.randint(0, 10) for v in g.vertices}
        lines = ["t 2", "vplus " + " ".join(f"a{i}" for i in range(len(g.plus))),
                 "vminus " + " ".join(f"b{i}" for i in range(len(g.minus)))]
        for e in g.edges.values():
            lines.append(f"edge a{e.plus.index} b{e.minus.index} {pi[e.plus] + pi[e.minus]}")
        return "\n".join(lines + ["family squarefree"]) + "\n"
    n = rng.randint(3, 5)
    head = "vertex " + " ".join(f"n{i}" for i in range(n))
    if kind == "matching":
        body = [f"edge n{u} n{v} {rng.randint(1, 9)}" for u, v in random_graph(rng, n, 0.6)]
    else:
        _, arcs = random_digraph(rng, n, 0.5, (1, 9))
        body = [f"arc n{u} n{v} {w}" for u, v, w in arcs]
    return "\n".join([f"problem {kind}", head] + body) + "\n"


def mutations(text):
    """(description, mutated text) for every single dual change and edge deletion."""
    lines = text.splitlines()
    for i, line in enumerate(lines):
        parts = line.split()
        if parts[0] == "dual":
            k = 2 if parts[1] == "r" else len(parts) - 1
            parts[k] = str(Fraction(parts[k]) + 1)
        elif parts[0] == "edge":
            k = int(parts[3]) - 1 if len(parts) == 4 else 0
            parts = parts[:3] + ([str(k)] if k > 1 else [])
            if not k:
                parts = []
        else:
            continue
        yield line, "\n".join(lines[:i] + [" ".join(parts)] + lines[i + 1:])


def test_mutation_sensitivity(criterion):
    with criterion(6, "every dual perturbation and edge deletion fails verify on 100 instances"):
        rng = seeded(6)
        checked = 0
        for _ in range(100):
            inst = parse_instance(weighted_files(rng))
            text = format_solution(inst, solve(inst, weighted=True))
            assert check_solution(inst, parse_solution(inst, text)) == []
            # zero duals are not written out; perturb them by adding a line
            listed = {ln.split()[2] for ln in text.splitlines() if ln.startswith("dual p")}
            extra = [f"dual p {inst.ref(v)} 1" for v in inst.graph.vertices
                     if inst.ref(v) not in listed]
            cases = list(mutations(text)) + [(ln, text + ln + "\n") for ln in extra]
            for what, bad in cases:
                fails = check_solution(inst, parse_solution(inst, bad))
                assert fails, what
                assert all(": " in f for f in fails)
                checked += 1
        assert checked > 100


def test_named_examples(criterion):
    with criterion(7, "C4 3, K33 6, symmetric triangle 2, Petersen 10, gadget 5 / dual 5"):
        c4 = BipartiteMultigraph.complete(2, 2)
        fam = SquareFreeFamily(c4)
        assert brute_force_max(c4, 2, fam.members())[0] == solve_max(c4, fam).value == 3

        k33 = BipartiteMultigraph.complete(3, 3)
        fam = SquareFreeFamily(k33)
        assert brute_force_max(k33, 2, fam.members())[0] == solve_max(k33, fam).value == 6

        red = encode_even_factor(encode_matching_as_even_factor(3, [(0, 1), (1, 2), (0, 2)]))
        assert brute_force_max(red.graph, 1, red.family.members())[0] == 2
        assert solve_max(red.graph, red.family).value == 2

        petersen = [(i, (i + 1) % 5) for i in range(5)] + [(i, i + 5) for i in range(5)] + \
                   [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        assert 2 * brute_force_matching(10, petersen) == 10
        red = encode_matching(10, petersen)
        assert solve_max(red.graph, red.family).value == 10

        gadget = BipartiteMultigraph.from_pairs(2, 1, [(0, 0, 5), (1, 0, 4)])
        assert brute_force_max_weight(gadget, 1, [])[0] == 5
        res = solve_max_weight(gadget, EmptyFamily(gadget, 1))
        assert res.value == res.dual_value == 5
