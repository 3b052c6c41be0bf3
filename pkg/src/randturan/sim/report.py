"""Merge sweep output with predicted exponents into plot-ready JSON."""

from __future__ import annotations

from fractions import Fraction

from ..density import frac_str
from .predict import ExponentPrediction
from .sweep import SweepResult


def build_report(result: SweepResult, prediction: ExponentPrediction) -> dict:
    slopes_n = result.slopes_in_n()
    slopes_p = result.slopes_in_p()
    meds = result.medians()
    series = []
    for px in sorted({m["p_exp"] for m in meds if m["p_exp"]}, key=float):
        pts = [m for m in meds if m["p_exp"] == px]
        regime, expo = prediction.n_exponent_at(Fraction(px))
        fit = slopes_n.get(px)
        series.append(
            {
                "p_exp": px,
                "points": [{k: m[k] for k in ("n", "p", "median", "min", "max", "count")} for m in pts],
                "fitted_slope": None if fit is None else fit.to_json(),
                "regime": regime,
                "predicted_n_exponent": None if expo is None else frac_str(expo),
                "predicted_n_exponent_float": None if expo is None else float(expo),
            }
        )
    by_n = []
    for n, fit in sorted(slopes_p.items()):
        by_n.append({"n": n, "fitted_p_slope": fit.to_json()})
    dense = prediction.dense_exponents
    return {
        "prediction": prediction.to_json(),
        "series_by_p_exp": series,
        "series_by_n": by_n,
        "predicted_dense_p_exponent": None if dense is None else frac_str(dense[0]),
        "note": "exponents are compared up to polylog factors; misses within that slack are inconclusive",
    }
