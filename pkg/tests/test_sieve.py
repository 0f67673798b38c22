from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from effkan.delta import degeneracy_map, face_map, identity, monotone_maps, mono_from_mask
from effkan.sieve import (HornSpec, Sieve, SieveError, all_sieves, attach_horn, attachable_horns,
                          empty, face_sieve, full, generated, horn, intersect, mask_of,
                          nondegenerate_count, pullback_sieve, union, vertices_of)


def members(*vertex_sets):
    return frozenset(mask_of(v) for v in vertex_sets)


def test_face_sieve_examples():
    assert face_sieve(2, 1).members == members((0,), (2,), (0, 2))
    assert face_sieve(1, 0).members == members((1,))
    assert union(face_sieve(2, 0), face_sieve(2, 2)) == horn(HornSpec(2, 1))
    with pytest.raises(SieveError):
        face_sieve(2, 3)


def test_horn_examples():
    assert horn((2, 1)).members == members((0,), (1,), (2,), (0, 1), (1, 2))
    assert horn((1, 1)).members == members((1,))
    assert horn((2, 0)).members == members((0,), (1,), (2,), (0, 1), (0, 2))
    with pytest.raises(SieveError):
        HornSpec(0, 0)
    with pytest.raises(SieveError):
        HornSpec(2, 3)


def test_horn_sizes_against_enumeration():
    for n in range(1, 6):
        for m in range(n + 1):
            missing_face = tuple(v for v in range(n + 1) if v != m)
            direct = [s for r in range(1, n + 1) for s in combinations(range(n + 1), r) if s != missing_face]
            assert len(horn((n, m))) == len(direct) == 2 ** (n + 1) - 3


def test_union_and_intersection():
    assert intersect(face_sieve(2, 0), face_sieve(2, 2)).members == members((1,))
    s = horn((2, 1))
    assert union(s, s) == s
    assert intersect(full(2), s) == s
    with pytest.raises(SieveError):
        union(full(1), full(2))


def test_downward_closure_enforced():
    with pytest.raises(SieveError):
        Sieve(2, members((0, 1)))
    with pytest.raises(SieveError):
        Sieve(1, members((2,)))


def test_pullback_examples():
    s0 = degeneracy_map(2, 0)
    vertex = generated(2, [mask_of((0,))])
    assert pullback_sieve(s0, vertex).members == members((0,), (1,), (0, 1))
    t = horn((2, 2))
    assert pullback_sieve(identity(2), t) == t
    back = pullback_sieve(s0, t)
    assert back == union(pullback_sieve(s0, face_sieve(2, 0)), pullback_sieve(s0, face_sieve(2, 1)))
    # the faces of the tetrahedron missing from it are d_0, d_1 and d_3
    missing = [k for k in range(4) if (0b1111 & ~(1 << k)) not in back]
    assert missing == [0, 1, 3]


def test_counts():
    assert nondegenerate_count(horn((2, 1))) == 5
    assert nondegenerate_count(full(2)) == 7
    assert nondegenerate_count(empty(3)) == 0


def test_attach_horn_examples():
    s = attach_horn(horn((2, 1)), HornSpec(2, 1), identity(2))
    assert s == full(2)
    # an edge, then a second edge glued at vertex 0 along Lambda^1_0
    base = generated(2, [mask_of((0, 1))])
    grown = attach_horn(base, HornSpec(1, 0), mono_from_mask(mask_of((0, 2)), 2))
    assert nondegenerate_count(grown) == nondegenerate_count(base) + 2
    with pytest.raises(SieveError):
        attach_horn(full(2), HornSpec(2, 1), identity(2))
    with pytest.raises(SieveError):
        attach_horn(horn((2, 1)), HornSpec(2, 0), identity(2))


def test_sieve_count_matches_brute_force():
    # independently counted downward-closed families of nonempty subsets
    assert [len(all_sieves(a)) for a in range(4)] == [2, 5, 19, 167]


def test_closure_and_distribution_exhaustive():
    for a in range(3):
        sieves = all_sieves(a)
        for b in range(3):
            for f in monotone_maps(a, b):
                targets = all_sieves(b)
                for t in targets[::3]:
                    for u in targets[::5]:
                        assert pullback_sieve(f, union(t, u)) == union(pullback_sieve(f, t), pullback_sieve(f, u))
                        assert pullback_sieve(f, intersect(t, u)) == \
                            intersect(pullback_sieve(f, t), pullback_sieve(f, u))
        for s in sieves:
            for t in sieves:
                union(s, t), intersect(s, t)  # construction re-checks closure


def test_pullback_distributes_ambient_three():
    sieves = all_sieves(3)
    for f in [degeneracy_map(2, 1), face_map(2, 0), identity(3)]:
        for t in sieves[::7]:
            for u in sieves[::11]:
                if f.cod != 3:
                    continue
                assert pullback_sieve(f, union(t, u)) == union(pullback_sieve(f, t), pullback_sieve(f, u))


def test_count_law_every_attachment():
    seen = 0
    for a in range(5):
        for s in all_sieves(a) if a < 4 else _sample_sieves(4):
            for spec, e in attachable_horns(s):
                assert nondegenerate_count(attach_horn(s, spec, e)) == nondegenerate_count(s) + 2
                seen += 1
    assert seen > 0


def _sample_sieves(a):
    # sieves of Delta^4 reachable from the empty sieve's vertex sets by a few attachments
    out = {generated(a, [mask_of((v,)) for v in range(a + 1)])}
    frontier = list(out)
    for _ in range(3):
        nxt = []
        for s in frontier:
            for spec, e in attachable_horns(s):
                t = attach_horn(s, spec, e)
                if t not in out:
                    out.add(t)
                    nxt.append(t)
        frontier = nxt
    return sorted(out, key=lambda s: s.sorted_members())


@given(st.integers(0, 4).flatmap(lambda a: st.tuples(st.just(a), st.lists(st.integers(1, 2 ** (a + 1) - 1)))))
def test_generated_is_a_sieve(data):
    a, masks = data
    s = generated(a, masks)
    for m in masks:
        assert m in s
    assert all(len(vertices_of(m)) >= 1 for m in s.members)


def test_json_is_sorted():
    s = horn((2, 0))
    doc = s.to_json()
    assert doc == {"ambient": 2, "members": [[0], [0, 1], [0, 2], [1], [2]]}
    assert Sieve.from_json(doc) == s
