"""Total variation, Hellinger, and chi-square distances between dense pmfs.

The three satisfy, for any P, Q on the same domain,

    d_H(P,Q)^2  <=  d_TV(P,Q)  <=  sqrt(2) * d_H(P,Q)  <=  sqrt(chi2(P,Q)),

which the test suite verifies on random pairs.  chi2 returns +inf when Q
vanishes somewhere P does not, keeping the chain total.
"""

from __future__ import annotations

import numpy as np

from .dist import DenseDistribution
from .errors import DimensionMismatch


def _check(P: DenseDistribution, Q: DenseDistribution):
    if P.n != Q.n:
        raise DimensionMismatch(f"dimension mismatch: {P.n} vs {Q.n}")


def tv_arrays(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(p - q).sum())


def hellinger_arrays(p: np.ndarray, q: np.ndarray) -> float:
    d2 = 0.5 * float(np.square(np.sqrt(p) - np.sqrt(q)).sum())
    return float(np.sqrt(max(d2, 0.0)))


def chi2_arrays(p: np.ndarray, q: np.ndarray) -> float:
    zero = q <= 0.0
    if np.any(zero & (p > 0.0)):
        return float("inf")
    diff2 = np.square(p - q)
    return float(np.divide(diff2, q, out=np.zeros_like(q), where=~zero).sum())


def tv(P: DenseDistribution, Q: DenseDistribution) -> float:
    """Total variation distance, (1/2) * l1."""
    _check(P, Q)
    return tv_arrays(P.mass, Q.mass)


def hellinger(P: DenseDistribution, Q: DenseDistribution) -> float:
    """Hellinger distance, (1/sqrt(2)) * l2 between root-pmfs."""
    _check(P, Q)
    return hellinger_arrays(P.mass, Q.mass)


def chi2(P: DenseDistribution, Q: DenseDistribution) -> float:
    """Chi-square divergence sum (P-Q)^2 / Q; +inf if Q=0 < P somewhere."""
    _check(P, Q)
    return chi2_arrays(P.mass, Q.mass)
