"""Small numeric helpers used across modules."""

from __future__ import annotations

import numpy as np

# Cumulative sums that feed 1e-12 exactness checks are run in extended
# precision (80-bit on x86 Linux) so rounding does not accumulate linearly
# with the number of grid intervals.  The order is strictly sequential,
# hence deterministic.


def cumsum_stable(terms: np.ndarray) -> np.ndarray:
    """Sequential cumulative sum in extended precision, returned as float64."""
    acc = np.cumsum(np.asarray(terms, dtype=np.longdouble))
    return acc.astype(np.float64)


def sum_stable(terms: np.ndarray) -> float:
    """Total of ``terms`` accumulated in extended precision."""
    return float(np.sum(np.asarray(terms, dtype=np.longdouble)))
