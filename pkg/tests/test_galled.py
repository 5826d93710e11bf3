"""Recognition, cycle extraction, clade indexing, safe contraction rules."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phylocontract import (
    apply_rules,
    build_clade_index,
    cycles,
    has_degree2_node,
    is_isomorphic,
    is_weakly_galled,
    one_clades,
    parse_enewick,
    two_clades,
)
from phylocontract.errors import LeafSetMismatch, NotWeaklyGalled
from tests.conftest import gen_wgt


def bits_of(n, labels):
    uni = n.leaf_universe
    return sum(1 << uni.index(lab) for lab in labels)


def leafparent(n, lab):
    return n.pred[n.leaf_by_label()[lab]][0]


def test_trees_and_g1_are_weakly_galled(t3a, g1):
    assert is_weakly_galled(t3a)
    assert is_weakly_galled(g1)


def test_nested_cycles_are_weakly_galled():
    n = parse_enewick("((((((5)#H2,6),(#H2,7)))#H1,2),(#H1,3));")
    assert is_weakly_galled(n)
    assert len(cycles(n)) == 2


def test_cycles_sharing_an_edge_are_rejected():
    n = parse_enewick("((((1)#H1,2),(#H1,(3)#H2)),(#H2,4));")
    assert not is_weakly_galled(n)
    with pytest.raises(NotWeaklyGalled):
        cycles(n)


def test_ladder_of_stacked_rungs_is_rejected():
    n = parse_enewick("(1,2,(((3,(4)#H1),(#H1)#H2),#H2));")
    assert not is_weakly_galled(n)


def test_indegree_three_is_rejected():
    from phylocontract import validate

    n = validate(
        [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4), (4, 5), (1, 6), (2, 7), (3, 8)],
        {5: "a", 6: "b", 7: "c", 8: "d"},
    )
    assert not is_weakly_galled(n)


def test_degree2_detection(g1):
    assert not has_degree2_node(g1)
    assert has_degree2_node(parse_enewick("((1));"))
    # an out-degree-1 reticulation has in-degree 2, so it does not count
    nested = parse_enewick("((((((5)#H2,6),(#H2,7)))#H1,2),(#H1,3));")
    assert not has_degree2_node(nested)


def test_g1_cycle_orientation(g1):
    (c,) = cycles(g1)
    a = leafparent(g1, "2")
    b = leafparent(g1, "3")
    t = leafparent(g1, "1")
    assert c.root == g1.root
    assert c.reticulation == t
    # side a holds the lexicographically smaller first clade ({1,2} < {1,3})
    assert c.side_a == (a,)
    assert c.side_b == (b,)
    assert c.order == (g1.root, a, t, b)
    assert (g1.root, a) in c.edges() and (b, t) in c.edges()


def test_tree_has_no_cycles(t3a):
    assert cycles(t3a) == []


def test_one_clades_g1(g1):
    ones = one_clades(g1)
    t = leafparent(g1, "1")
    leaf = g1.leaf_by_label()
    assert set(ones[bits_of(g1, ["1", "2", "3"])]) == {g1.root}
    # the reticulation and the leaf below it witness the same value
    assert set(ones[bits_of(g1, ["1"])]) == {t, leaf["1"]}
    assert set(ones[bits_of(g1, ["2"])]) == {leaf["2"]}
    # cycle-side nodes are not 1-clade nodes
    assert bits_of(g1, ["1", "2"]) not in ones


def test_two_clades_g1(g1):
    twos = two_clades(g1)
    a = leafparent(g1, "2")
    b = leafparent(g1, "3")
    t = leafparent(g1, "1")
    as_sets = {val: {frozenset(p) for p in pairs} for val, pairs in twos.items()}
    assert as_sets == {
        bits_of(g1, ["1", "2"]): {frozenset({a, t})},
        bits_of(g1, ["1", "3"]): {frozenset({b, t})},
        bits_of(g1, ["1", "2", "3"]): {frozenset({a, b})},
    }


def test_trees_have_only_one_clades(t3a):
    idx = build_clade_index(t3a)
    assert idx.two_clades == {}
    assert set(idx.one_clades) == {
        bits_of(t3a, ["1", "2", "3"]),
        bits_of(t3a, ["1", "2"]),
        bits_of(t3a, ["1"]),
        bits_of(t3a, ["2"]),
        bits_of(t3a, ["3"]),
    }


def test_clade_index_labels_helper(g1):
    idx = build_clade_index(g1)
    assert idx.labels(bits_of(g1, ["1", "3"])) == ("1", "3")
    assert idx.labels(0) == ()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_clade_unicity_on_random_samples(seed):
    n = gen_wgt(4 + seed % 4, seed % 3, seed)
    idx = build_clade_index(n)
    for val, nodes in idx.one_clades.items():
        assert 1 <= len(nodes) <= 2, (val, nodes)
    for val, pairs in idx.two_clades.items():
        assert len(pairs) == 1, (val, pairs)


def test_rules_reduce_mirrored_trees_to_stars(t3a, t3b):
    r1, r2, count = apply_rules(t3a, t3b)
    assert count == 2
    assert r1.num_internal == 1 and r2.num_internal == 1
    assert is_isomorphic(r1, r2)


def test_rules_fix_point_on_identical_inputs(g1, t3a):
    for n in (g1, t3a):
        r1, r2, count = apply_rules(n, n)
        assert count == 0
        assert is_isomorphic(r1, n) and is_isomorphic(r2, n)


def test_rules_block_on_matching_full_clade(g1, star3):
    # the star's root witnesses {1,2,3}, which is also a 2-clade of the
    # cycle, so neither side fires under the literal blocking sets
    r1, r2, count = apply_rules(g1, star3)
    assert count == 0
    assert is_isomorphic(r1, g1) and is_isomorphic(r2, star3)


def test_rules_require_equal_universes(t3a):
    other = parse_enewick("((1,2),4);")
    with pytest.raises(LeafSetMismatch):
        apply_rules(t3a, other)


def test_rules_never_increase_delta(t3a, t3b, g1, star3):
    from phylocontract import exact_mcc

    for n1, n2 in [(t3a, t3b), (g1, star3), (t3b, star3)]:
        before = exact_mcc(n1, n2)[0]
        r1, r2, count = apply_rules(n1, n2)
        after = exact_mcc(r1, r2)[0]
        assert before == count + after
