import json

import pytest
from hypothesis import assume, given, settings, strategies as st

from effkan import kan, salg
from effkan.delta import compose, degeneracy_map, face_map
from effkan.kan import (LiftingError, SignConstraintError, SignedLiftAssignment, check_degenerate_preferring,
                        check_effective, check_lifts, check_symmetric_effective, count_problems_bruteforce,
                        degenerate_filler, degenerate_preferring_assignment, enumerate_problems,
                        expected_effective_count, expected_problem_count, expected_symmetric_count,
                        fillers, find_degenerate_solutions, horn_pullback_indices, make_problem,
                        malcev_lift, malcev_step, pullback_horn_map, solves, composite_horn_map,
                        symmetric_not_dp_witness, trace_malcev)
from effkan.sieve import HornSpec, horn, pullback_sieve
from conftest import KanInstance


def all_problems(inst, maxdim=3):
    return [p for n in range(1, maxdim + 1) for p in enumerate_problems(inst.alpha, n)]


def test_problem_counts_on_nerve(nerve_z2):
    # the nerve is 2-coskeletal: 1, |G|^2 and |G|^3 horn maps in dimensions 1, 2, 3
    per_m = {1: 1, 2: 4, 3: 8}
    for n, expected in per_m.items():
        for m in range(n + 1):
            assert count_problems_bruteforce(nerve_z2.alpha, n, m) == expected
            assert len(list(enumerate_problems(nerve_z2.alpha, n, m))) == expected
    assert expected_problem_count(nerve_z2.alpha, 3) == 46


def test_make_problem_checks_commutativity():
    alpha, beta = salg.nerve_projection(salg.cyclic_group(2), salg.cyclic_group(2), 3)
    X = alpha.source
    a, b = X.name(1, 1), X.name(1, 2)
    with pytest.raises(LiftingError):
        make_problem(alpha, 2, 1, {0: a, 2: b}, "(0,0)")
    p = make_problem(alpha, 2, 1, {0: a, 2: b}, "(1,0)")
    assert solves(p, malcev_lift(alpha, beta, p))


def test_nerve_triangle_lift(nerve_z2):
    X = nerve_z2.X
    for a in "01":
        for b in "01":
            p = make_problem(nerve_z2.alpha, 2, 1, {0: f"({a})", 2: f"({b})"})
            assert X.name(2, nerve_z2.lift(p)) == f"({b},{a})"
            assert len(fillers(p)) == 1


def test_constant_algebra_lift_is_the_common_value():
    M = salg.symmetric3()
    inst = KanInstance(salg.constant_algebra(M, 3))
    for n in (1, 2, 3):
        for p in enumerate_problems(inst.alpha, n):
            g = next(x for x in p.horn.facets if x is not None)
            assert inst.lift(p) == g


@pytest.mark.parametrize("make", [
    lambda: KanInstance(salg.nerve_abelian(salg.cyclic_group(3), 3)),
    lambda: KanInstance(salg.constant_algebra(salg.heyting2(), 3)),
    lambda: KanInstance(salg.nerve_abelian(salg.parse_group("Z2xZ2"), 3)),
], ids=["nerve-Z3", "constant-heyting2", "nerve-Z2xZ2"])
def test_lift_and_preference_on_more_instances(make):
    inst = make()
    assert check_lifts(inst.alpha, inst.lift, 3).ok
    assert check_degenerate_preferring(inst.alpha, inst.lift, 3).ok


def test_relative_lifts_over_projection():
    alpha, beta = salg.nerve_projection(salg.cyclic_group(2), salg.cyclic_group(2), 3)
    lift = kan.malcev_assignment(alpha, beta)
    assert check_lifts(alpha, lift, 3).ok
    assert check_degenerate_preferring(alpha, lift, 3).ok


def test_lift_needs_malcev_structure():
    X = salg.nerve_abelian(salg.cyclic_group(2), 2)
    bare = salg.TruncatedSimplicialSet(X.names, X.faces, X.degeneracies, None)
    beta = salg.section_from_point(bare)
    p = next(enumerate_problems(beta.alpha, 1))
    with pytest.raises(salg.StructureError):
        malcev_lift(beta.alpha, beta, p)


def test_degenerate_solutions_coincide(nerve_z2, constant_z2, cocycles):
    for inst in (nerve_z2, constant_z2, cocycles):
        X = inst.X
        for p in all_problems(inst):
            sols = find_degenerate_solutions(p)
            fills = {X.act(z, degeneracy_map(p.n - 1, j)) for z, j in sols}
            assert len(fills) <= 1


def test_degenerate_solutions_examples(nerve_z2, constant_z2):
    p = make_problem(constant_z2.alpha, 2, 0, {1: "1", 2: "1"})
    assert sorted(find_degenerate_solutions(p)) == [(1, 0), (1, 1)]
    p = make_problem(nerve_z2.alpha, 2, 1, {0: "(1)", 2: "(1)"})
    assert find_degenerate_solutions(p) == []
    X = nerve_z2.X
    z = X.index(1, "(1)")
    zs = X.degen(1, 0, z)
    p = make_problem(nerve_z2.alpha, 2, 2, {0: int(X.face(2, 0, zs)), 1: int(X.face(2, 1, zs))})
    assert (z, 0) in find_degenerate_solutions(p)
    assert degenerate_filler(p) == zs == nerve_z2.lift(p)


def test_horn_pullback_indices_examples():
    assert horn_pullback_indices(2, 2, 0) == [(3, 0)]
    assert [ms for ms, _ in horn_pullback_indices(2, 1, 1)] == [1, 2]
    assert horn_pullback_indices(3, 1, 3) == [(1, 2)]
    assert compose(degeneracy_map(3, 3), face_map(3, 1)) == compose(face_map(2, 1), degeneracy_map(2, 2))
    with pytest.raises(LiftingError):
        horn_pullback_indices(2, 1, 3)


def test_jstar_identity_exhaustive():
    for n in range(1, 6):
        for m in range(n + 1):
            for j in range(n + 1):
                for mstar, jstar in horn_pullback_indices(n, m, j):
                    if jstar is not None:
                        assert compose(degeneracy_map(n, j), face_map(n, mstar)) == \
                            compose(face_map(n - 1, m), degeneracy_map(n - 1, jstar))


def test_faces_escaping_the_pullback():
    for n in range(1, 5):
        for m in range(n + 1):
            for j in range(n + 1):
                back = pullback_sieve(degeneracy_map(n, j), horn((n, m)))
                top = (1 << (n + 2)) - 1
                missing = {k for k in range(n + 2) if top & ~(1 << k) not in back}
                expected = {j, j + 1} | ({m if m < j else m + 1} if j != m else set())
                assert missing == expected


def test_running_example_faces(nerve_z2):
    for p in enumerate_problems(nerve_z2.alpha, 2, 2):
        h = nerve_z2.lift(p)
        hm = pullback_horn_map(p, h, 0, 3)
        assert hm.spec == HornSpec(3, 3)
        assert hm.facets[0] == hm.facets[1] == h


def test_formulations_agree(nerve_z2, constant_z2, cocycles):
    for inst in (nerve_z2, constant_z2, cocycles):
        for p in all_problems(inst):
            h = inst.lift(p)
            for j in range(p.n + 1):
                for mstar, _ in horn_pullback_indices(p.n, p.m, j):
                    assert pullback_horn_map(p, h, j, mstar) == composite_horn_map(p, h, j, mstar)


def test_pullback_needs_headroom(nerve_z2):
    p = next(enumerate_problems(nerve_z2.alpha, 4, 0))
    with pytest.raises(salg.TruncationError):
        pullback_horn_map(p, nerve_z2.lift, 0, 0)
    with pytest.raises(salg.TruncationError):
        check_symmetric_effective(nerve_z2.alpha, nerve_z2.lift, 4)


def test_trace_behaviour(nerve_z2, constant_z2):
    for inst in (nerve_z2, constant_z2):
        X = inst.X
        for p in all_problems(inst):
            trace = trace_malcev(inst.alpha, inst.beta, p)
            assert trace[0] == (-1, int(inst.beta(p.n, p.y)))
            assert trace[-1][1] == inst.lift(p)
            for z, j in find_degenerate_solutions(p):
                g = X.act(z, degeneracy_map(p.n - 1, j))
                image = set(X.degeneracies[p.n - 1][j].tolist())
                reached = False
                for k, w in trace:
                    reached = reached or k in (j, j + 1)
                    if reached:
                        assert w == g
                    else:
                        assert w in image
            for h in fillers(p):
                for k in range(p.n + 1):
                    if k != p.m:
                        assert malcev_step(inst.alpha, p, k, int(h)) == int(h)


def test_dp_assignment_matches_malcev(nerve_z2, cocycles):
    for inst in (nerve_z2, cocycles):
        dp = degenerate_preferring_assignment(inst.alpha, inst.lift)
        twice = degenerate_preferring_assignment(inst.alpha, dp)
        probs = all_problems(inst)
        assert dp.agrees_with(inst.lift, probs) == []
        assert twice.agrees_with(dp, probs) == []


def test_dp_assignment_repairs_exactly_the_degenerate_problems(nerve_z2):
    alpha = nerve_z2.alpha
    probs = all_problems(nerve_z2)
    solvable = [p for p in probs if degenerate_filler(p) is not None]
    overrides = {}
    for p in solvable:
        other = [int(h) for h in fillers(p) if int(h) != nerve_z2.lift(p)]
        if other:
            overrides[p] = other[0]
    assert overrides, "need at least one problem with a second filler"
    broken = nerve_z2.lift.with_overrides(overrides)
    fixed = degenerate_preferring_assignment(alpha, broken)
    assert {p.key for p in fixed.agrees_with(broken, probs)} == {p.key for p in overrides}


def test_checker_negative_controls(nerve_z2, cocycles):
    alpha = nerve_z2.alpha
    p = make_problem(alpha, 1, 0, {1: "()"})
    assert degenerate_filler(p) == nerve_z2.X.index(1, "(0)")
    broken = nerve_z2.lift.with_overrides({p: nerve_z2.X.index(1, "(1)")})
    report = check_degenerate_preferring(alpha, broken, 3)
    assert [f["horn"] for f in report.failures] == [[1, 0]]

    alpha = cocycles.alpha
    outer = make_problem(alpha, 2, 0, {1: 0, 2: 0})
    other = next(int(h) for h in fillers(outer) if int(h) != cocycles.lift(outer))
    mutated = cocycles.lift.with_overrides({outer: other})
    assert check_lifts(alpha, mutated, 3).ok
    assert not check_symmetric_effective(alpha, mutated, 2).ok
    signed = SignedLiftAssignment(cocycles.lift, mutated)
    report = check_effective(alpha, signed, 2)
    assert not report.ok
    assert {f["sign"] for f in report.failures} == {"-"}


def test_sign_constraints(nerve_z2):
    s = SignedLiftAssignment.duplicated(nerve_z2.lift)
    p = make_problem(nerve_z2.alpha, 1, 0, {1: "()"})
    with pytest.raises(SignConstraintError):
        s("+", p)
    assert s("-", p) == nerve_z2.lift(p)
    assert not kan.sign_allowed(HornSpec(2, 2), "-")
    assert kan.sign_allowed(HornSpec(2, 1), "-") and kan.sign_allowed(HornSpec(2, 1), "+")


def test_implication_chain(nerve_z2, constant_z2, cocycles):
    for inst in (nerve_z2, constant_z2, cocycles):
        dp = degenerate_preferring_assignment(inst.alpha, inst.lift)
        assert check_degenerate_preferring(inst.alpha, dp, 3).ok
        sym = check_symmetric_effective(inst.alpha, dp, 3)
        eff = check_effective(inst.alpha, SignedLiftAssignment.duplicated(dp), 3)
        assert sym.ok and eff.ok
        assert sym.instances == expected_symmetric_count(inst.alpha, 3)
        assert eff.instances == expected_effective_count(inst.alpha, 3)


def test_frozen_instance_counts(nerve_z2):
    assert expected_symmetric_count(nerve_z2.alpha, 3) == 214
    assert expected_effective_count(nerve_z2.alpha, 3) == 310


def test_witness(nerve_z2):
    modified, p = symmetric_not_dp_witness(nerve_z2.alpha, nerve_z2.lift)
    assert p.horn.spec == HornSpec(1, 1)
    assert check_lifts(nerve_z2.alpha, modified, 3).ok
    assert check_symmetric_effective(nerve_z2.alpha, modified, 3).ok
    report = check_degenerate_preferring(nerve_z2.alpha, modified, 3)
    assert len(report.failures) == 1
    assert report.failures[0]["horn"] == [1, 1] and report.failures[0]["lift"] == "(1)"


def test_parallel_sweep_is_deterministic(nerve_z2):
    broken, _ = symmetric_not_dp_witness(nerve_z2.alpha, nerve_z2.lift)
    one = check_degenerate_preferring(nerve_z2.alpha, broken, 3, jobs=1).to_json()
    four = check_degenerate_preferring(nerve_z2.alpha, broken, 3, jobs=4).to_json()
    assert json.dumps(one, sort_keys=True) == json.dumps(four, sort_keys=True)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_random_problems_on_z3_nerve(data):
    inst = _z3()
    n = data.draw(st.integers(1, 3))
    m = data.draw(st.integers(0, n))
    X = inst.X
    facets = {k: data.draw(st.integers(0, X.size(n - 1) - 1)) for k in range(n + 1) if k != m}
    p = kan.LiftingProblem(inst.alpha, kan.HornMap(HornSpec(n, m), tuple(facets.get(k) for k in range(n + 1)), X), 0)
    assume(not p.violations())
    assert solves(p, inst.lift(p))


_Z3 = []


def _z3():
    if not _Z3:
        _Z3.append(KanInstance(salg.nerve_abelian(salg.cyclic_group(3), 3)))
    return _Z3[0]


