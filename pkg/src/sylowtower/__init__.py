"""Sylow theory for Postnikov towers with finite homotopy groups.

Towers are given by a finite group pi_1, finite pi_1-modules pi_n and
k-invariants as explicit normalized cocycles; maps carry explicit cochain
witnesses, so every construction can be checked by direct computation.
"""

__version__ = "0.1.0"

from .errors import CapacityError, PreconditionError, SylowTowerError, TheoryViolation, UserInputError
from .groups import FiniteGroup, Subgroup, sylow_subgroups
from .modules import FiniteAbelianGroup, GModule
from .cohomology import Cochain, cohomology_group
from .postnikov import PostnikovTower, Stage, TowerMap, make_BG, make_KAG, validate_map
from .sylow import (are_conjugate_sylow_maps, enumerate_sylow_maps, factor_through_sylow, normality_obstruction,
                    sylow_tower)
from .nilpotent import check_ample, decompose_nilpotent, is_nilpotent_tower, p_completion, trichotomy
from .burnside import finite_gset_fixed_points, homotopy_fixed_point_section

__all__ = [
    "CapacityError", "Cochain", "FiniteAbelianGroup", "FiniteGroup", "GModule", "PostnikovTower",
    "PreconditionError", "Stage", "Subgroup", "SylowTowerError", "TheoryViolation", "TowerMap", "UserInputError",
    "are_conjugate_sylow_maps", "check_ample", "cohomology_group", "decompose_nilpotent", "enumerate_sylow_maps",
    "factor_through_sylow", "finite_gset_fixed_points", "homotopy_fixed_point_section", "is_nilpotent_tower",
    "make_BG", "make_KAG", "normality_obstruction", "p_completion", "sylow_subgroups", "sylow_tower",
    "trichotomy", "validate_map",
]
