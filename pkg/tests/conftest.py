"""Shared fixtures: the four hand-checked networks and seeded samplers."""

from __future__ import annotations

from pathlib import Path

import pytest

from phylocontract import contract_admissible, parse_enewick, random_wgt
from phylocontract.errors import GenerationFailed, InadmissibleContraction
from phylocontract.galled import has_degree2_node
from phylocontract.generators import SplitMix64

G1_TEXT = "(((1)#H1,2),(#H1,3));"
T3A_TEXT = "((1,2),3);"
T3B_TEXT = "((1,3),2);"
STAR3_TEXT = "(1,2,3);"


@pytest.fixture
def g1():
    return parse_enewick(G1_TEXT)


@pytest.fixture
def t3a():
    return parse_enewick(T3A_TEXT)


@pytest.fixture
def t3b():
    return parse_enewick(T3B_TEXT)


@pytest.fixture
def star3():
    return parse_enewick(STAR3_TEXT)


@pytest.fixture
def fixture_dir() -> Path:
    return Path(__file__).parent / "fixtures"


def gen_wgt(num_leaves: int, num_reticulations: int, seed: int):
    """random_wgt with seed retries; some (leaves, retics, seed) triples are
    infeasible for the sampled tree and raise GenerationFailed."""
    for s in range(seed, seed + 80):
        try:
            return random_wgt(num_leaves, num_reticulations, s)
        except GenerationFailed:
            continue
    raise GenerationFailed(
        f"no feasible sample near seed {seed} "
        f"for {num_leaves} leaves / {num_reticulations} reticulations"
    )


def perturb(n, k: int, seed: int):
    """Apply up to k random admissible contractions, keeping degree-2-freedom."""
    rng = SplitMix64(seed)
    for _ in range(k):
        edges = sorted(
            (u, v) for u in n.succ for v in n.succ[u] if v not in n.leaf_label
        )
        done = False
        for _attempt in range(40):
            if not edges:
                break
            u, v = rng.choice(edges)
            try:
                cand = contract_admissible(n, u, v)
            except InadmissibleContraction:
                continue
            if has_degree2_node(cand):
                continue
            n = cand
            done = True
            break
        if not done:
            break
    return n
