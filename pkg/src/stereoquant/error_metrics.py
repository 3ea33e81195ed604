"""Agreement metrics between predicted and observed volume series."""

from __future__ import annotations

import numpy as np

from .errors import EmptySeries, LengthMismatch, NonPositiveValue


def _pair(predicted, observed):
    p = np.asarray(predicted, dtype=float).ravel()
    o = np.asarray(observed, dtype=float).ravel()
    if p.size != o.size:
        raise LengthMismatch(f"{p.size} predicted vs {o.size} observed values")
    if p.size == 0:
        raise EmptySeries("series are empty")
    return p, o


def rms_error(predicted, observed) -> float:
    """Root mean squared difference, in the units of the inputs."""
    p, o = _pair(predicted, observed)
    return float(np.sqrt(np.mean((p - o) ** 2)))


def median_symmetric_accuracy(predicted, observed) -> float:
    """100 * (exp(median |ln(p/o)|) - 1), in percent.

    Symmetric in over- and under-prediction; even-length medians average
    the two central values.
    """
    p, o = _pair(predicted, observed)
    if np.any(p <= 0) or np.any(o <= 0):
        raise NonPositiveValue("MSA needs strictly positive values")
    return float(100.0 * np.expm1(np.median(np.abs(np.log(p / o)))))
