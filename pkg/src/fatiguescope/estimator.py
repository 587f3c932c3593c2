"""Combined linear fatigue estimator over the eight facial-cue rates.

The estimator is the average of eight per-cue linear regressions; each cue
rate lives on a 0-100 axis and the output is the overall fatigue rate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import CUE_FIELDS, CueRatings, FatigueRate, RatingScale

# Per-cue slopes of the averaged model and its intercept. Cue order matches
# core.CUE_FIELDS: hanging eyelids, red eyes, dark circles, pale skin,
# droopy corner mouth, swollen eyes, glazed eyes, wrinkles.
DEFAULT_COEFFICIENTS = (0.037, 0.030, 0.041, 0.014, 0.022, 0.033, 0.027, 0.024)
DEFAULT_INTERCEPT = 44.41

# Rater scores use integers 0-4; the estimator's cue axes run 0-100. The
# bridge multiplies by 25 so rater 4 maps to cue rate 100. Configurable
# because the conversion is a modeling choice, not a measured constant.
RATER_TO_PERCENT_FACTOR = 25.0


class ScaleError(ValueError):
    """Cue ratings were supplied on the wrong scale."""


@dataclass(frozen=True)
class CombinedEstimator:
    """Affine map from eight cue rates (0-100 each) to the overall fatigue rate."""

    coefficients: tuple[float, ...] = DEFAULT_COEFFICIENTS
    intercept: float = DEFAULT_INTERCEPT

    def __post_init__(self) -> None:
        if len(self.coefficients) != len(CUE_FIELDS):
            raise ValueError(
                f"expected {len(CUE_FIELDS)} coefficients, got {len(self.coefficients)}"
            )

    def evaluate(self, cues: CueRatings) -> FatigueRate:
        if cues.scale is not RatingScale.PERCENT_0_100:
            raise ScaleError(
                f"combined estimator requires percent_0_100 cues, got {cues.scale.value}"
            )
        value = self.intercept
        for coef, x in zip(self.coefficients, cues.as_tuple()):
            value += coef * x
        return FatigueRate(value)


def combined_estimator(
    cues: CueRatings, model: CombinedEstimator | None = None
) -> FatigueRate:
    """Overall fatigue rate for cue rates on the 0-100 scale."""
    return (model or CombinedEstimator()).evaluate(cues)


def combine_linear_estimators(
    models: Sequence[tuple[float, float]]
) -> CombinedEstimator:
    """Average eight per-cue (slope, intercept) linear models into one estimator.

    Coefficient i becomes slope_i / 8 (each cue contributes one eighth of the
    averaged prediction); the intercept is the mean of the eight intercepts.
    """
    if len(models) != len(CUE_FIELDS):
        raise ValueError(f"expected {len(CUE_FIELDS)} models, got {len(models)}")
    n = len(models)
    coefficients = tuple(slope / n for slope, _ in models)
    intercept = sum(intercept for _, intercept in models) / n
    return CombinedEstimator(coefficients=coefficients, intercept=intercept)


def rescale_to_percent(
    cues: CueRatings, factor: float = RATER_TO_PERCENT_FACTOR
) -> CueRatings:
    """Map rater-scale (0-4) cue ratings onto the estimator's 0-100 axes."""
    if cues.scale is not RatingScale.RATER_0_4:
        raise ScaleError(f"expected rater_0_4 cues, got {cues.scale.value}")
    return CueRatings.from_values(
        (v * factor for v in cues.as_tuple()), scale=RatingScale.PERCENT_0_100
    )
