"""Tensor multiplicativity experiments and the reduction arguments around them."""
from .multiplicativity import (
    MultiplicativityVerdict,
    BalancedPair,
    check_multiplicativity,
    double_dual_product,
    balance,
    reverify_witness,
)
from .theorems import (
    check_filtered_split,
    check_rank_two,
    check_signature_bound,
    check_mixed_signatures,
    check_isodual_reduction,
    check_semistable_reduction,
)

__all__ = [
    "MultiplicativityVerdict",
    "BalancedPair",
    "check_multiplicativity",
    "double_dual_product",
    "balance",
    "reverify_witness",
    "check_filtered_split",
    "check_rank_two",
    "check_signature_bound",
    "check_mixed_signatures",
    "check_isodual_reduction",
    "check_semistable_reduction",
]
