"""Progressive stochastic greedy selection for sparse recovery and column subset selection."""

from psg.linalg import ProjectionState, best_rank_k_error, extend_basis, objective_g, project
from psg.instances import CssInstance, SparseInstance, gen_css_instance, gen_instance, sample_size_n
from psg.greedy import (
    Schedule,
    SearchExhausted,
    SelectionTrace,
    brute_force_support,
    draw_search_set,
    run_selector,
    schedule_size,
    select_step,
)
from psg.css import CssTrace, recon_error, run_css

__version__ = "0.1.0"

__all__ = [
    "ProjectionState",
    "extend_basis",
    "project",
    "objective_g",
    "best_rank_k_error",
    "SparseInstance",
    "CssInstance",
    "gen_instance",
    "gen_css_instance",
    "sample_size_n",
    "Schedule",
    "SelectionTrace",
    "SearchExhausted",
    "schedule_size",
    "draw_search_set",
    "select_step",
    "run_selector",
    "brute_force_support",
    "CssTrace",
    "run_css",
    "recon_error",
]
