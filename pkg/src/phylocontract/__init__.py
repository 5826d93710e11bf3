"""Contraction/expansion edit calculus on phylogenetic networks.

Core objects: rooted labeled DAGs (Network), edge contractions and their
canonical inverse expansions, witness structures certifying contractions,
and maximum common contractions: exact brute force on small instances,
a polynomial dynamic program on weakly galled trees.
"""

from .edit_ops import (
    Contraction,
    EditSequence,
    Expansion,
    WitnessStructure,
    apply_sequence,
    connect,
    contract,
    contract_admissible,
    contract_to_star,
    delta_mcc_from_common,
    expand,
    inverse_expansion,
    is_admissible,
    quotient,
    sequence_to_witness,
    validate_witness,
    witness_to_sequence,
)
from .errors import PhyloError
from .galled import (
    CladeIndex,
    ReticulationCycle,
    apply_rules,
    build_clade_index,
    cycles,
    has_degree2_node,
    is_weakly_galled,
    one_clades,
    two_clades,
)
from .generators import (
    SetSplittingInstance,
    deg_bounded_target,
    diameter_pair,
    five_leaves_target,
    format_set_splitting,
    is_splittable,
    parse_set_splitting,
    random_wgt,
    reduction_deg_bounded,
    reduction_five_leaves,
)
from .io_enewick import parse_edgelist, parse_enewick, write_edgelist, write_enewick
from .mcc_dp import solve, solve_with_stats
from .mcc_oracle import exact_mcc, is_contraction, tree_mcc
from .network_core import (
    Network,
    is_acyclic,
    is_isomorphic,
    reachable_leaves,
    topological_order,
    validate,
)

__all__ = [
    "CladeIndex",
    "Contraction",
    "EditSequence",
    "Expansion",
    "Network",
    "PhyloError",
    "ReticulationCycle",
    "SetSplittingInstance",
    "WitnessStructure",
    "apply_rules",
    "apply_sequence",
    "build_clade_index",
    "connect",
    "contract",
    "contract_admissible",
    "contract_to_star",
    "cycles",
    "deg_bounded_target",
    "delta_mcc_from_common",
    "diameter_pair",
    "exact_mcc",
    "expand",
    "five_leaves_target",
    "format_set_splitting",
    "has_degree2_node",
    "inverse_expansion",
    "is_acyclic",
    "is_admissible",
    "is_contraction",
    "is_isomorphic",
    "is_splittable",
    "is_weakly_galled",
    "one_clades",
    "parse_edgelist",
    "parse_enewick",
    "parse_set_splitting",
    "quotient",
    "random_wgt",
    "reachable_leaves",
    "reduction_deg_bounded",
    "reduction_five_leaves",
    "sequence_to_witness",
    "solve",
    "solve_with_stats",
    "topological_order",
    "tree_mcc",
    "two_clades",
    "validate",
    "validate_witness",
    "witness_to_sequence",
    "write_edgelist",
    "write_enewick",
]
