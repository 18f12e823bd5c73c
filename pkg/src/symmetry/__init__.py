"""Isometries, automorphism groups and isoduality witnesses."""
from .isometry import IsometryList, AutGroup, isometries, are_isometric, automorphisms
from .isoduality import (
    IsodualityWitness,
    isoduality_witness,
    verify_witness,
    verify_tau_square_law,
    verify_isodual_filtration,
    signature_certificate,
    verify_aut_invariance,
    check_multiplicity_free,
    check_witt_index,
)

__all__ = [
    "IsometryList",
    "AutGroup",
    "isometries",
    "are_isometric",
    "automorphisms",
    "IsodualityWitness",
    "isoduality_witness",
    "verify_witness",
    "verify_tau_square_law",
    "verify_isodual_filtration",
    "signature_certificate",
    "verify_aut_invariance",
    "check_multiplicity_free",
    "check_witt_index",
]
