"""Closed-form minimisers of the repulsion energy.

With all-ones weights the minimiser is the uniform grid (i - 1/2)/N taken
in the rank order of the input, independent of the penaliser.  For the
linear flux (n = 1) and arbitrary weights indexed in increasing value
order the minimiser is

    v*_i = (sum_{j<=i} w[i, j] - w[i, i]/2) / sum_j w[i, j],

which, for frequency weights, is exactly the midpoint-cumulative rule of
histogram equalisation.
"""

from __future__ import annotations

import numpy as np

from .weights import GlobalHistogramWeights, WeightProvider

__all__ = [
    "rank_permutation",
    "uniform_steady_state",
    "linear_flux_steady_state",
    "equalisation_lut",
]


def rank_permutation(values) -> np.ndarray:
    """Rank of each entry when sorted ascending, ties broken stably."""
    f = np.asarray(values, dtype=float)
    order = np.argsort(f, kind="stable")
    ranks = np.empty(f.size, dtype=np.int64)
    ranks[order] = np.arange(f.size)
    return ranks


def uniform_steady_state(values) -> np.ndarray:
    """Minimiser under all-ones weights: (rank + 1/2) / N per particle."""
    f = np.asarray(values, dtype=float)
    if f.size == 0:
        raise ValueError("need at least one position")
    return (rank_permutation(f) + 0.5) / f.size


def linear_flux_steady_state(w: WeightProvider) -> np.ndarray:
    """Minimiser for the linear flux, weights indexed in rank order."""
    if isinstance(w, GlobalHistogramWeights):
        c = w.counts
        return (np.cumsum(c) - 0.5 * c) / w.total
    m = w.to_dense()
    row_sums = m.sum(axis=1)
    if np.any(row_sums == 0):
        raise ValueError("weight rows must not sum to zero")
    n = m.shape[0]
    partial = np.cumsum(m, axis=1)[np.arange(n), np.arange(n)]
    return (partial - 0.5 * np.diag(m)) / row_sums


def equalisation_lut(histogram) -> dict[int, float]:
    """Midpoint-cumulative equalisation of an 8-bit histogram.

    Takes counts per level (length up to 256); returns, for each occurring
    level, its target value (CDF(level) - count/2) / total, which is the
    linear-flux steady state of the frequency-weighted global model.
    """
    h = np.asarray(histogram, dtype=float)
    if h.ndim != 1 or h.size > 256:
        raise ValueError("histogram must be a 1-d array of at most 256 counts")
    if np.any(h < 0):
        raise ValueError("counts must be nonnegative")
    total = h.sum()
    if total <= 0:
        raise ValueError("histogram is empty")
    cdf = np.cumsum(h)
    return {
        int(level): float((cdf[level] - 0.5 * h[level]) / total)
        for level in np.nonzero(h > 0)[0]
    }
