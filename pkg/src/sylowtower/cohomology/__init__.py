"""Group cohomology with twisted coefficients on the normalized bar complex."""

from .cochains import Cochain, coboundary, first_cocycle_failure, is_cocycle, pullback, pushforward
from .groups import (CohomologyClass, CohomologyGroup, cohomologous_witness, cohomology_group, restriction,
                     solve_coboundary, transfer, transfer_cochain)
from .resolution import BarModel, MorseModel, PolycyclicSeries, model_for

__all__ = [
    "BarModel", "Cochain", "CohomologyClass", "CohomologyGroup", "MorseModel", "PolycyclicSeries",
    "coboundary", "cohomologous_witness", "cohomology_group", "first_cocycle_failure", "is_cocycle",
    "model_for", "pullback", "pushforward", "restriction", "solve_coboundary", "transfer", "transfer_cochain",
]
