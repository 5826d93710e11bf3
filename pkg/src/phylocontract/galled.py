"""Weakly galled trees: recognition, reticulation cycles, clades, safe rules.

A reticulation cycle is a pair of directed paths r→…→t meeting only at r
(the cycle root) and t (the reticulation). A network is a weakly galled tree
when no two such cycles share an edge; equivalently its underlying undirected
graph is a cactus and each nontrivial block carries exactly one source and
one sink under the edge orientation.

Clades: D(u) is the set of leaf labels reachable from u. D(u) is a 1-clade
when u is not strictly inside a cycle side; D(u) ∪ D(v) is a 2-clade when
u, v sit on distinct sides of one cycle, or one of them is its reticulation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import LeafSetMismatch, NotWeaklyGalled
from .network_core import Network, NodeId, is_acyclic

__all__ = [
    "ReticulationCycle",
    "CladeIndex",
    "is_weakly_galled",
    "cycles",
    "one_clades",
    "two_clades",
    "build_clade_index",
    "apply_rules",
    "has_degree2_node",
]


@dataclass(frozen=True)
class ReticulationCycle:
    root: NodeId
    reticulation: NodeId
    side_a: tuple[NodeId, ...]  # top-down, excluding root and reticulation
    side_b: tuple[NodeId, ...]

    @property
    def order(self) -> tuple[NodeId, ...]:
        """Cyclic listing r, a1..ap, t, bq..b1 (side b reversed)."""
        return (self.root, *self.side_a, self.reticulation, *reversed(self.side_b))

    def nodes(self) -> set[NodeId]:
        return {self.root, self.reticulation, *self.side_a, *self.side_b}

    def edges(self) -> set[tuple[NodeId, NodeId]]:
        pa = [self.root, *self.side_a, self.reticulation]
        pb = [self.root, *self.side_b, self.reticulation]
        out = set(zip(pa, pa[1:]))
        out |= set(zip(pb, pb[1:]))
        return out


@dataclass
class CladeIndex:
    universe: tuple[str, ...]
    d: dict[NodeId, int]
    one_clades: dict[int, tuple[NodeId, ...]] = field(default_factory=dict)
    two_clades: dict[int, tuple[tuple[NodeId, NodeId], ...]] = field(default_factory=dict)

    def labels(self, bits: int) -> tuple[str, ...]:
        return tuple(lab for i, lab in enumerate(self.universe) if bits >> i & 1)


def has_degree2_node(n: Network) -> bool:
    return any(
        u != n.root and len(n.pred[u]) == 1 and len(n.succ[u]) == 1 for u in n.succ
    )


def _biconnected_components(n: Network) -> list[list[tuple[NodeId, NodeId]]]:
    """Edge sets of the biconnected components of the underlying graph.

    Iterative lowpoint algorithm; undirected edges are recorded in their
    directed orientation (u,v) ∈ E(n).
    """
    adj: dict[NodeId, list[tuple[NodeId, NodeId, NodeId]]] = {u: [] for u in n.succ}
    for u, v in n.edges():
        adj[u].append((v, u, v))
        adj[v].append((u, u, v))

    disc: dict[NodeId, int] = {}
    low: dict[NodeId, int] = {}
    comps: list[list[tuple[NodeId, NodeId]]] = []
    edge_stack: list[tuple[NodeId, NodeId]] = []
    counter = 0

    for start in n.nodes():
        if start in disc:
            continue
        # stack entries: (node, parent_edge, iterator index)
        disc[start] = low[start] = counter
        counter += 1
        stack: list[list] = [[start, None, 0]]
        while stack:
            frame = stack[-1]
            u, parent_edge, idx = frame
            if idx < len(adj[u]):
                frame[2] += 1
                other, eu, ev = adj[u][idx]
                edge = (eu, ev)
                if edge == parent_edge:
                    continue
                if other not in disc:
                    disc[other] = low[other] = counter
                    counter += 1
                    edge_stack.append(edge)
                    stack.append([other, edge, 0])
                elif disc[other] < disc[u]:
                    edge_stack.append(edge)
                    low[u] = min(low[u], disc[other])
            else:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[u])
                    if low[u] >= disc[p]:
                        comp = []
                        while edge_stack:
                            e = edge_stack.pop()
                            comp.append(e)
                            if e == parent_edge:
                                break
                        comps.append(comp)
    return comps


def is_weakly_galled(n: Network) -> bool:
    """No two reticulation cycles share an edge.

    Checked structurally: in-degrees at most 2, every nontrivial biconnected
    block of the underlying graph is a single cycle, and within each block the
    orientation has exactly one source (the cycle root) and one in-degree-2
    node (its reticulation).
    """
    if any(len(n.pred[u]) > 2 for u in n.succ):
        return False
    for comp in _biconnected_components(n):
        if len(comp) <= 1:
            continue
        comp_nodes = {x for e in comp for x in e}
        if len(comp) != len(comp_nodes):
            return False  # not a simple cycle
        indeg: dict[NodeId, int] = {x: 0 for x in comp_nodes}
        for _, v in comp:
            indeg[v] += 1
        counts = sorted(indeg.values())
        if counts != [0] + [1] * (len(comp_nodes) - 2) + [2]:
            return False
    return True


def cycles(n: Network) -> list[ReticulationCycle]:
    """One oriented ReticulationCycle per reticulation.

    Orientation rule: the side whose first node has the lexicographically
    smaller clade (as a label tuple; NodeId tiebreak; an empty side first)
    becomes side_a. Cycles are listed by reticulation NodeId.
    """
    if not is_weakly_galled(n):
        raise NotWeaklyGalled(repr(n))
    d = n.clades()
    universe = n.leaf_universe

    def side_key(side: tuple[NodeId, ...]) -> tuple:
        if not side:
            return ((), -1)
        bits = d[side[0]]
        labels = tuple(lab for i, lab in enumerate(universe) if bits >> i & 1)
        return (labels, side[0])

    out = []
    for t in n.reticulations():
        p1, p2 = n.pred[t]
        chains = []
        for p in (p1, p2):
            chain = [p]
            while len(n.pred[chain[-1]]) == 1:
                chain.append(n.pred[chain[-1]][0])
            chains.append(chain)
        members = set(chains[1])
        root = next(x for x in chains[0] if x in members)
        side1 = tuple(reversed(chains[0][: chains[0].index(root)]))
        side2 = tuple(reversed(chains[1][: chains[1].index(root)]))
        a, b = sorted((side1, side2), key=side_key)
        out.append(ReticulationCycle(root=root, reticulation=t, side_a=a, side_b=b))
    return out


def build_clade_index(n: Network) -> CladeIndex:
    """Σ1 and Σ2 with their witnessing nodes/pairs.

    On degree-2-free inputs the unicity bounds (≤ 2 nodes per 1-clade value,
    ≤ 1 pair per 2-clade value) are asserted while building.
    """
    cyc = cycles(n)  # raises NotWeaklyGalled when inapplicable
    d = n.clades()
    idx = CladeIndex(universe=n.leaf_universe, d=dict(d))
    side_internal: set[NodeId] = set()
    for c in cyc:
        side_internal |= set(c.side_a) | set(c.side_b)

    ones: dict[int, list[NodeId]] = {}
    for u in n.nodes():
        if u not in side_internal:
            ones.setdefault(d[u], []).append(u)
    idx.one_clades = {bits: tuple(sorted(us)) for bits, us in ones.items()}

    twos: dict[int, list[tuple[NodeId, NodeId]]] = {}
    for c in cyc:
        pairs = [(x, y) for x in c.side_a for y in c.side_b]
        pairs += [(x, c.reticulation) for x in c.side_a + c.side_b]
        for x, y in pairs:
            twos.setdefault(d[x] | d[y], []).append(tuple(sorted((x, y))))
    idx.two_clades = {bits: tuple(sorted(set(ps))) for bits, ps in twos.items()}

    if not has_degree2_node(n):
        for bits, us in idx.one_clades.items():
            assert len(us) <= 2, (idx.labels(bits), us)
        for bits, ps in idx.two_clades.items():
            assert len(ps) <= 1, (idx.labels(bits), ps)
    return idx


def one_clades(n: Network) -> dict[int, tuple[NodeId, ...]]:
    """Σ1 as a map from clade value to its witnessing nodes."""
    return build_clade_index(n).one_clades


def two_clades(n: Network) -> dict[int, tuple[tuple[NodeId, NodeId], ...]]:
    """Σ2 as a map from clade value to its witnessing cycle pairs."""
    return build_clade_index(n).two_clades


def _rule_candidates(n: Network):
    """Root children relevant to Rule 1 / Rule 2, with their clade queries.

    Yields (kind, child, queries): kind 1 when the child is a 1-clade node
    (contract if its single query is absent from the other side's clades),
    kind 2 when it is strictly inside a cycle side (contract if every 2-clade
    containing it is absent).
    """
    d = n.clades()
    cyc = cycles(n)
    side_of: dict[NodeId, ReticulationCycle] = {}
    for c in cyc:
        for x in c.side_a + c.side_b:
            side_of[x] = c
    for child in n.succ[n.root]:
        if child in n.leaf_label:
            continue
        if len(n.pred[child]) >= 2:
            continue  # reticulation child: neither rule applies
        if child not in side_of:
            yield 1, child, (d[child],)
        else:
            c = side_of[child]
            others = c.side_b if child in c.side_a else c.side_a
            queries = tuple(d[child] | d[y] for y in (*others, c.reticulation))
            yield 2, child, queries


def apply_rules(n1: Network, n2: Network) -> tuple[Network, Network, int]:
    """Exhaustively apply the two safe contraction rules to both networks.

    Rule 1 contracts a root edge to a 1-clade child whose clade appears
    nowhere among the other network's 1- or 2-clades; Rule 2 does the same
    for a cycle-side child all of whose 2-clades are absent. Scheduling is
    deterministic: Rule 1 before Rule 2, network 1 before network 2,
    candidate children in NodeId order; one contraction per round.
    """
    if n1.leaf_universe != n2.leaf_universe:
        raise LeafSetMismatch(f"{n1.leaf_universe} vs {n2.leaf_universe}")
    nets = [n1, n2]
    count = 0
    from .edit_ops import contract_admissible

    while True:
        fired = False
        for rule in (1, 2):
            if fired:
                break
            for i in (0, 1):
                if fired:
                    break
                other = build_clade_index(nets[1 - i])
                known = set(other.one_clades) | set(other.two_clades)
                for kind, child, queries in sorted(
                    _rule_candidates(nets[i]), key=lambda t: t[1]
                ):
                    if kind != rule:
                        continue
                    if all(q not in known for q in queries):
                        nets[i] = contract_admissible(nets[i], nets[i].root, child)
                        count += 1
                        fired = True
                        break
        if not fired:
            return nets[0], nets[1], count
