"""Integral polyhedral 1-chains modulo p: representatives, boundary-mass
repair with certificates, grid checks in codimension 0 and a bounded exact
flat-norm oracle."""

from .chain import IntegerChain, boundary, exact_mass, mass, support
from .codim0 import GridChain, check_grid_bound, grid_boundary_mass, grid_pmass_boundary, grid_select
from .complex import GeometricComplex, Refinement, build_complex, refine_overlaps
from .errors import ChainError, InternalError
from .flatnorm import (
    FlatNormDecomposition,
    cone,
    flat_norm,
    flat_norm_mod_p,
    relaxed_flat_norm,
    zero_sum_check,
)
from .modp import (
    equiv_mod_p,
    pmass,
    positive_representative,
    select_representative,
    select_residue,
    verify_congruence,
)
from .repair import RepairCertificate, SegmentPath, extract_chain, flip_along_path, repair, verify_repair
from .rng import SplitMix64

__all__ = [
    "ChainError",
    "FlatNormDecomposition",
    "GeometricComplex",
    "GridChain",
    "IntegerChain",
    "InternalError",
    "Refinement",
    "RepairCertificate",
    "SegmentPath",
    "SplitMix64",
    "boundary",
    "build_complex",
    "check_grid_bound",
    "cone",
    "equiv_mod_p",
    "exact_mass",
    "extract_chain",
    "flat_norm",
    "flat_norm_mod_p",
    "flip_along_path",
    "grid_boundary_mass",
    "grid_pmass_boundary",
    "grid_select",
    "mass",
    "pmass",
    "positive_representative",
    "refine_overlaps",
    "relaxed_flat_norm",
    "repair",
    "select_representative",
    "select_residue",
    "support",
    "verify_congruence",
    "verify_repair",
    "zero_sum_check",
]
