"""Small numeric helpers shared across modules.

All information quantities in this package are in bits (logs base 2).
Weighted log sums use compensated summation (math.fsum) so that entropy
accumulations do not drift at the 1e-12 tolerances the invariants demand.
"""

from __future__ import annotations

import math

import numpy as np


def freeze(a, dtype=float) -> np.ndarray:
    """Return a read-only float array copy of ``a``."""
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


def fsum_array(a: np.ndarray) -> float:
    """Compensated sum of all entries."""
    return math.fsum(np.asarray(a, dtype=float).ravel().tolist())


def weighted_log2_sum(weights: np.ndarray, numer: np.ndarray, denom: np.ndarray) -> float:
    """Compensated sum of w * log2(numer / denom) over entries with w > 0.

    Entries with zero weight contribute exactly 0, regardless of the log
    argument (the 0 log 0 convention enforced by guard, not by limits).
    """
    w = np.asarray(weights, dtype=float).ravel()
    n = np.asarray(numer, dtype=float).ravel()
    d = np.asarray(denom, dtype=float).ravel()
    mask = w > 0.0
    if not mask.any():
        return 0.0
    terms = w[mask] * (np.log2(n[mask]) - np.log2(d[mask]))
    return math.fsum(terms.tolist())


def log2_guarded(a: np.ndarray) -> np.ndarray:
    """Elementwise log2 with -inf at zeros and no warning noise."""
    a = np.asarray(a, dtype=float)
    out = np.full(a.shape, -np.inf)
    mask = a > 0.0
    out[mask] = np.log2(a[mask])
    return out


def binary_entropy(p: float) -> float:
    """H(p) in bits."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of the last axis of ``v`` onto the probability simplex."""
    v = np.asarray(v, dtype=float)
    n = v.shape[-1]
    u = np.sort(v, axis=-1)[..., ::-1]
    css = np.cumsum(u, axis=-1) - 1.0
    idx = np.arange(1, n + 1, dtype=float)
    cond = u - css / idx > 0.0
    # rho: last index where the condition holds (guaranteed at index 0)
    rho = n - 1 - np.argmax(cond[..., ::-1], axis=-1)
    theta = np.take_along_axis(css, rho[..., None], axis=-1) / (rho[..., None] + 1.0)
    return np.maximum(v - theta, 0.0)
