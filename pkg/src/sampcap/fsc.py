"""Finite-state channel core.

Provides the channel representation P(y, s' | x, s) with an initial state
distribution, validation of its stochastic structure, the structural
predicates used by the bound machinery (no intersymbol interference,
indecomposability, stationary distribution), and the causal channel law

    P(y^N || x^N, s0) = sum over state paths of prod_i P(y_i, s_i | x_i, s_{i-1})

evaluated by a forward state-belief recursion, plus its initial-state-averaged
variant P(y^N || x^N).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._num import freeze

ROW_SUM_TOL = 1e-12
STATIONARY_TOL = 1e-12
STATIONARY_MAX_ITER = 1_000_000
MIXING_POWER_CAP = 64


@dataclass(frozen=True)
class Alphabet:
    """A finite alphabet; labels are for display only."""

    size: int
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("alphabet size must be >= 1")
        if self.labels is not None:
            if len(self.labels) != self.size:
                raise ValueError("labels length must equal alphabet size")
            if len(set(self.labels)) != len(self.labels):
                raise ValueError("labels must be distinct")


@dataclass(frozen=True)
class FscKernel:
    """Finite-state channel P(y, s' | x, s) with initial state distribution.

    kernel is indexed [s][x][y][s_next]; initial_dist is P(s0).
    """

    state_alphabet: Alphabet
    input_alphabet: Alphabet
    output_alphabet: Alphabet
    kernel: np.ndarray
    initial_dist: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "kernel", freeze(self.kernel))
        object.__setattr__(self, "initial_dist", freeze(self.initial_dist))
        expected = (
            self.state_alphabet.size,
            self.input_alphabet.size,
            self.output_alphabet.size,
            self.state_alphabet.size,
        )
        names = ("state", "input", "output", "next-state")
        if self.kernel.ndim != 4:
            raise ValueError("kernel must have 4 axes [s][x][y][s_next]")
        for axis, (got, want) in enumerate(zip(self.kernel.shape, expected)):
            if got != want:
                raise ValueError(
                    f"kernel axis {axis} ({names[axis]}) has size {got}, expected {want}"
                )
        if self.initial_dist.shape != (self.state_alphabet.size,):
            raise ValueError("initial_dist length must equal the state alphabet size")

    @property
    def state_size(self) -> int:
        return self.state_alphabet.size

    @property
    def input_size(self) -> int:
        return self.input_alphabet.size

    @property
    def output_size(self) -> int:
        return self.output_alphabet.size


@dataclass(frozen=True)
class StationaryInfo:
    """Result of the structural analysis of the state chain.

    is_indecomposable is None when the power cap was reached without a
    verdict (undetermined), never silently False in that case.
    """

    is_no_isi: bool
    is_indecomposable: Optional[bool]
    stationary_dist: Optional[np.ndarray] = None
    mixing_index: Optional[int] = None

    def __post_init__(self):
        if self.stationary_dist is not None:
            if not self.is_indecomposable:
                raise ValueError("stationary_dist only present for indecomposable chains")
            object.__setattr__(self, "stationary_dist", freeze(self.stationary_dist))


def validate_kernel(k: FscKernel) -> list[str]:
    """Return all stochasticity violations of the kernel; empty means valid.

    Dimension mismatches raise at construction; this checks row sums within
    1e-12, negative entries, and the initial distribution, reporting indices.
    """
    violations = []
    row_sums = k.kernel.sum(axis=(2, 3))
    for s in range(k.state_size):
        for x in range(k.input_size):
            if abs(row_sums[s, x] - 1.0) > ROW_SUM_TOL:
                violations.append(
                    f"kernel row (s={s}, x={x}) sums to {float(row_sums[s, x])!r}, "
                    "expected 1"
                )
    for idx in zip(*np.nonzero(k.kernel < 0.0)):
        s, x, y, sn = (int(i) for i in idx)
        violations.append(
            f"kernel entry (s={s}, x={x}, y={y}, s_next={sn}) is negative: "
            f"{float(k.kernel[idx])!r}"
        )
    total = k.initial_dist.sum()
    if abs(total - 1.0) > ROW_SUM_TOL:
        violations.append(f"initial_dist sums to {float(total)!r}, expected 1")
    for (s,) in zip(*np.nonzero(k.initial_dist < 0.0)):
        violations.append(f"initial_dist entry (s={int(s)}) is negative")
    return violations


def state_transition_matrix(k: FscKernel, x: int = 0) -> np.ndarray:
    """T[s][s'] = P(s' | s, x); input-independent for no-ISI channels."""
    return k.kernel[:, x, :, :].sum(axis=1)


def is_no_isi(k: FscKernel) -> bool:
    """True iff the state evolution P(s'|s, x) does not depend on x."""
    trans = k.kernel.sum(axis=2)  # [s][x][s_next]
    base = trans[:, :1, :]
    return bool(np.all(np.abs(trans - base) <= ROW_SUM_TOL))


def is_indecomposable(k: FscKernel) -> StationaryInfo:
    """Decide indecomposability of the state chain of a no-ISI channel.

    Criterion: some column of T^n is strictly positive for some
    n <= 2^(|S|^2), capped at 64 absolute. If the cap is reached before the
    theoretical bound is exhausted, the verdict is undetermined (None). On a
    positive verdict the stationary distribution is found by power iteration
    (tolerance 1e-12) and the witnessing power n is recorded.
    """
    if not is_no_isi(k):
        raise ValueError("indecomposability predicate requires a no-ISI channel")
    t = state_transition_matrix(k)
    s = k.state_size
    n_theory = 2 ** (s * s)
    n_cap = min(n_theory, MIXING_POWER_CAP)
    power = np.eye(s)
    witness = None
    for n in range(1, n_cap + 1):
        power = power @ t
        if np.any(np.all(power > 0.0, axis=0)):
            witness = n
            break
    if witness is None:
        verdict = False if n_theory <= MIXING_POWER_CAP else None
        return StationaryInfo(is_no_isi=True, is_indecomposable=verdict)
    pi = stationary_distribution(t)
    return StationaryInfo(
        is_no_isi=True,
        is_indecomposable=True,
        stationary_dist=pi,
        mixing_index=witness,
    )


def stationary_distribution(t: np.ndarray, tol: float = STATIONARY_TOL,
                            max_iter: int = STATIONARY_MAX_ITER) -> np.ndarray:
    """Stationary distribution of a row-stochastic matrix by power iteration."""
    t = np.asarray(t, dtype=float)
    pi = np.full(t.shape[0], 1.0 / t.shape[0])
    for _ in range(max_iter):
        nxt = pi @ t
        nxt = nxt / nxt.sum()
        if np.abs(nxt - pi).sum() <= tol:
            return nxt
        pi = nxt
    raise RuntimeError("power iteration did not converge within the cap")


def causal_channel_prob(k: FscKernel, x_seq: Sequence[int], y_seq: Sequence[int],
                        s0: Optional[int] = None) -> float:
    """Causal channel law P(y^N || x^N, s0), or P(y^N || x^N) when s0 is None.

    Forward recursion over the unnormalized state belief
    b_i[s] = P(y^i, s_i || x^i, start); cost O(N |S|^2). With s0 None the
    recursion starts from the initial distribution, which by linearity yields
    the s0-average sum_s P(s0=s) P(y^N || x^N, s).
    """
    if len(x_seq) != len(y_seq) or len(x_seq) < 1:
        raise ValueError("x_seq and y_seq must have equal length N >= 1")
    if s0 is None:
        belief = k.initial_dist.copy()
    else:
        if not 0 <= s0 < k.state_size:
            raise ValueError("s0 out of range")
        belief = np.zeros(k.state_size)
        belief[s0] = 1.0
    for x, y in zip(x_seq, y_seq):
        belief = belief @ k.kernel[:, x, y, :]
    return float(belief.sum())
