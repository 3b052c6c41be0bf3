from .exfree import (
    ExResult,
    HeuristicParams,
    brute_force_max_f_free,
    max_f_free,
    max_f_free_exact,
    max_f_free_heuristic,
)
from .predict import ExponentPrediction, predict
from .sampling import sample_bipartite, sample_gnp
from .sweep import SlopeFit, SweepResult, SweepRow, fit_slope, sweep

__all__ = [
    "ExResult",
    "ExponentPrediction",
    "HeuristicParams",
    "SlopeFit",
    "SweepResult",
    "SweepRow",
    "brute_force_max_f_free",
    "fit_slope",
    "max_f_free",
    "max_f_free_exact",
    "max_f_free_heuristic",
    "predict",
    "sample_bipartite",
    "sample_gnp",
    "sweep",
]
