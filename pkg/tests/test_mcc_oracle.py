"""Brute-force oracles: connected partitions, exhaustive search, tree case."""

from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phylocontract import (
    exact_mcc,
    is_contraction,
    is_isomorphic,
    parse_enewick,
    tree_mcc,
    validate_witness,
)
from phylocontract.errors import (
    BudgetExhausted,
    Degree2Node,
    LeafSetMismatch,
    NotATree,
    SizeCapExceeded,
)
from phylocontract.mcc_oracle import connected_partitions
from tests.conftest import gen_wgt


def set_partitions(items):
    """All set partitions, smallest-member-first blocks."""
    items = sorted(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for k in range(len(rest) + 1):
        for chosen in itertools.combinations(rest, k):
            block = frozenset({first, *chosen})
            for tail in set_partitions(set(rest) - set(chosen)):
                yield [block, *tail]


def brute_connected_partitions(n):
    internals = set(n.internal_nodes())
    adj = {u: set() for u in internals}
    for u, v in n.edges():
        if u in internals and v in internals:
            adj[u].add(v)
            adj[v].add(u)

    def connected(block):
        block = set(block)
        seen = {min(block)}
        frontier = [min(block)]
        while frontier:
            x = frontier.pop()
            for y in adj[x] & block:
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return seen == block

    return [p for p in set_partitions(internals) if all(connected(b) for b in p)]


@pytest.mark.parametrize(
    "text",
    ["(1,2,3);", "((1,2),3);", "(((1)#H1,2),(#H1,3));", "(((((1,2),3),4),5),6);"],
)
def test_connected_partitions_match_brute_force(text):
    n = parse_enewick(text)
    got = [frozenset(map(frozenset, p)) for p in connected_partitions(n)]
    want = [frozenset(map(frozenset, p)) for p in brute_connected_partitions(n)]
    assert len(got) == len(set(got)), "duplicates emitted"
    assert set(got) == set(want)


def test_connected_partition_counts():
    # path of 5 internal nodes: one partition per subset of the 4 path edges
    caterpillar = parse_enewick("(((((1,2),3),4),5),6);")
    assert sum(1 for _ in connected_partitions(caterpillar)) == 16
    # 4-cycle: 1 whole + C(4,2) + C(4,3) + C(4,4) arc splits
    g1 = parse_enewick("(((1)#H1,2),(#H1,3));")
    assert sum(1 for _ in connected_partitions(g1)) == 12


def test_partition_budget_raises():
    n = parse_enewick("(((((1,2),3),4),5),6);")
    with pytest.raises(BudgetExhausted):
        list(connected_partitions(n, budget=3))


def test_exact_mcc_fixture_values(t3a, t3b, g1, star3):
    assert exact_mcc(t3a, t3b)[0] == 2
    assert exact_mcc(t3a, star3)[0] == 1
    assert exact_mcc(g1, star3)[0] == 3
    assert exact_mcc(g1, g1)[0] == 0
    delta, m, w1, w2 = exact_mcc(t3a, t3b)
    assert m.num_internal == 1
    assert validate_witness(t3a, m, w1)[0]
    assert validate_witness(t3b, m, w2)[0]


def test_exact_mcc_refuses_large_inputs(t3a):
    big = parse_enewick("(((((((((((1,2),3),4),5),6),7),8),9),10),11),12);")
    assert big.num_internal == 11
    with pytest.raises(SizeCapExceeded):
        exact_mcc(big, big)
    assert exact_mcc(big, big, max_internal=11)[0] == 0


def test_exact_mcc_budget(t3a, t3b):
    with pytest.raises(BudgetExhausted):
        exact_mcc(t3a, t3b, budget=1)


def test_exact_mcc_leafset_mismatch(t3a):
    other = parse_enewick("((1,2),4);")
    with pytest.raises(LeafSetMismatch):
        exact_mcc(t3a, other)


def test_tree_mcc_matches_exact_on_fixtures(t3a, t3b, star3):
    for a, b in [(t3a, t3b), (t3a, star3), (t3a, t3a)]:
        got, m, w1, w2 = tree_mcc(a, b)
        assert got == exact_mcc(a, b)[0]
        assert validate_witness(a, m, w1)[0]
        assert validate_witness(b, m, w2)[0]


def test_tree_mcc_shared_clade_formula():
    a = parse_enewick("((((1,2),3),4),5);")
    b = parse_enewick("(((1,2),(3,4)),5);")
    # shared internal clades: {1,2}, {1,2,3,4} and the root
    assert tree_mcc(a, b)[0] == 4 + 4 - 2 * 3


def test_tree_mcc_rejects_networks_and_degree2(g1):
    with pytest.raises(NotATree):
        tree_mcc(g1, g1)
    deg2 = parse_enewick("(((1,2)),3);")
    with pytest.raises(Degree2Node):
        tree_mcc(deg2, deg2)


def test_is_contraction_positive_and_negative(t3a, star3, g1):
    w = is_contraction(t3a, star3)
    assert w is not None
    assert validate_witness(t3a, star3, w)[0]
    assert is_contraction(star3, t3a) is None
    assert is_contraction(g1, star3) is not None
    # identity is a contraction via singleton parts
    w = is_contraction(g1, g1)
    assert w is not None and len(w.parts) == g1.num_internal


def test_is_contraction_of_relabeled_target(t3a):
    renamed = parse_enewick("((1,2),4);")
    with pytest.raises(LeafSetMismatch):
        is_contraction(t3a, renamed)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_exact_mcc_common_is_contraction_of_both(seed):
    n1 = gen_wgt(4, seed % 2, seed)
    n2 = gen_wgt(4, (seed + 1) % 2, seed + 500)
    delta, m, w1, w2 = exact_mcc(n1, n2)
    assert is_contraction(n1, m) is not None
    assert is_contraction(n2, m) is not None
    assert delta == n1.num_internal + n2.num_internal - 2 * m.num_internal
