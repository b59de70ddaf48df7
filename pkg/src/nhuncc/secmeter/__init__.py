"""Desk-scale checks of the weak- and strong-eavesdropper security claims."""

from .bounds import advantage_bound, advantage_bound_terms
from .games import run_ind_cca1_game, run_individual_game
from .leakage import bin_concentration, exact_leakage

__all__ = [
    "advantage_bound",
    "advantage_bound_terms",
    "bin_concentration",
    "exact_leakage",
    "run_ind_cca1_game",
    "run_individual_game",
]
