"""Exact arithmetic: rational matrices, integer lattice algebra and exact positive reals."""
from .rational import det_exact, signature_exact, rat, to_matrix
from .posreal import ONE, ExactPosReal, epr_cmp, epr_format, epr_from_rat, epr_mul, epr_pow
from .integer import hnf_rows, integer_kernel, lll_reduce_gram, saturate
from .checks import Check, CheckReport

__all__ = [
    "det_exact",
    "signature_exact",
    "rat",
    "to_matrix",
    "ONE",
    "ExactPosReal",
    "epr_cmp",
    "epr_format",
    "epr_from_rat",
    "epr_mul",
    "epr_pow",
    "hnf_rows",
    "integer_kernel",
    "lll_reduce_gram",
    "saturate",
    "Check",
    "CheckReport",
]
