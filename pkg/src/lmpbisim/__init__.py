"""Distribution-based bisimulation for finite labelled Markov processes."""

__version__ = "0.1.0"

from .compose import check_composition_bound, compose
from .equivalence import (
    Approx,
    DistanceBounds,
    Partition,
    approx_bisim,
    check_state_implies_dist,
    dbisim_witness,
    decide_dbisim,
    distance,
    equivalence_metric,
    state_bisim_partition,
    truncated_distance,
)
from .model import FiniteLmp, SubDist, dirac, load_model, mix, save_model
from .semantics import lift_step, run_word, trace_mass

__all__ = [
    "Approx", "DistanceBounds", "FiniteLmp", "Partition", "SubDist", "approx_bisim",
    "check_composition_bound", "check_state_implies_dist", "compose", "dbisim_witness",
    "decide_dbisim", "dirac", "distance", "equivalence_metric", "lift_step", "load_model",
    "mix", "run_word", "save_model", "state_bisim_partition", "trace_mass", "truncated_distance",
]
