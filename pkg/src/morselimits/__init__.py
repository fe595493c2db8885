"""Exact window homology of Floer triples and the comparison of its double limits."""

from .exact_linalg import GF, QQ, ZZ, Matrix, ModuleMap, PresentedModule, parse_ring, smith_normal_form
from .floer_triple import (
    CriticalPoint, FloerTriple, builtin_family, lazy_family, load, dump, parse, random_triple,
    serialize, validate,
)
from .window_complex import (
    Window, build_complex, chain_inclusion, chain_projection, check_identities, classify_square,
    homology, induced_hom_map,
)
from .tower_limits import (
    build_tower, eventual_images, grid_direct_limit, grid_inverse_limit, lim1, mittag_leffler,
)
from .bidirect_system import build_grid, canonical_kappa, tameness_maps, theorem_a_harness
from .novikov import (
    boundary_obstruction, cycle_check, truncated_novikov_homology, witness_cycle, witness_sequence,
)

__version__ = "0.1.0"

__all__ = [
    "GF",
    "QQ",
    "ZZ",
    "Matrix",
    "ModuleMap",
    "PresentedModule",
    "parse_ring",
    "smith_normal_form",
    "CriticalPoint",
    "FloerTriple",
    "builtin_family",
    "lazy_family",
    "load",
    "dump",
    "parse",
    "random_triple",
    "serialize",
    "validate",
    "Window",
    "build_complex",
    "chain_inclusion",
    "chain_projection",
    "check_identities",
    "classify_square",
    "homology",
    "induced_hom_map",
    "build_tower",
    "eventual_images",
    "grid_direct_limit",
    "grid_inverse_limit",
    "lim1",
    "mittag_leffler",
    "build_grid",
    "canonical_kappa",
    "tameness_maps",
    "theorem_a_harness",
    "boundary_obstruction",
    "cycle_check",
    "truncated_novikov_homology",
    "witness_cycle",
    "witness_sequence",
]
