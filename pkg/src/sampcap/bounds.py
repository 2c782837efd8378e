"""Single-letter capacity bounds and the block error-exponent functional.

The single-letter problems live on a stationary state distribution pi and a
per-state channel P(y|x,s). An action a samples the state through z = f(a, s)
at cost Lambda(a) within budget Gamma, and the objective is I(X;Y|S) under
one of three couplings:

  encoder       pi(s) P_A(a) 1{z=f(a,s)} P(x|z,a) P(y|x,s)
  decoder       pi(s) P_{A|S}(a|s) 1{z=f(a,s)} P(x|z,a) P(y|x,s)
  backward_link pi(s) P_{A|S}(a|s) P(x|a) P(y|x,s)

The action distribution is searched on an exhaustive simplex grid; for a
fixed action distribution the objective is concave in the family of input
conditionals, which is maximized by projected-gradient ascent with random
restarts. Zero-cost and unit-cost capacities use the same inner optimizer
with the common-input and per-state-input couplings, and the time-sharing
line between them is the baseline the sampled-feedback bounds beat.

The exponent functional evaluates, for a fixed causal policy and start state,

    E_N(rho) = -(1/N) log2 sum_{y^N} [ sum_{x^N,a^N} Q(x^N,a^N || z^{N-1})
                                       P(y^N || x^N, s0)^{1/(1+rho)} ]^{1+rho},

identically zero at rho = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence

import numpy as np

from ._num import freeze, log2_guarded, project_to_simplex
from .actions import ActionSystem
from .fsc import FscKernel
from .policy import CausalPolicy
from .trajectory import TrajectorySpace

DIST_TOL = 1e-12
ASCENT_TOL = 1e-10
ASCENT_MAX_ITER = 50_000
DEFAULT_RESOLUTION = 101
DEFAULT_RESTARTS = 5
MAX_DEFAULT_FREE_DIMS = 3
FEAS_SLACK = 1e-12


@dataclass(frozen=True)
class SingleLetterProblem:
    """Stationary single-letter setting: pi, per-state channel, sampling, cost.

    per_state_channel is indexed [s][x][y]; sampling [a][s] -> z; cost [a].
    action_mode selects the coupling: 'encoder' (state-independent P_A),
    'decoder' (P_{A|S}), or 'backward_link' (P_{A|S} with the action itself
    fed back, f(a, s) = a).
    """

    stationary_dist: np.ndarray
    per_state_channel: np.ndarray
    sampling: np.ndarray
    cost: np.ndarray
    budget: float
    action_mode: str = "encoder"

    def __post_init__(self):
        object.__setattr__(self, "stationary_dist", freeze(self.stationary_dist))
        object.__setattr__(self, "per_state_channel", freeze(self.per_state_channel))
        object.__setattr__(self, "sampling", freeze(self.sampling, dtype=int))
        object.__setattr__(self, "cost", freeze(self.cost))
        if self.action_mode not in ("encoder", "decoder", "backward_link"):
            raise ValueError(f"unknown action_mode {self.action_mode!r}")
        pi = self.stationary_dist
        if abs(pi.sum() - 1.0) > DIST_TOL or np.any(pi < 0.0):
            raise ValueError("stationary_dist must be a probability vector")
        w = self.per_state_channel
        if w.ndim != 3 or w.shape[0] != pi.shape[0]:
            raise ValueError("per_state_channel must be indexed [s][x][y]")
        sums = w.sum(axis=2)
        if np.any(np.abs(sums - 1.0) > DIST_TOL) or np.any(w < 0.0):
            raise ValueError("per-state channel rows must be normalized")
        if self.sampling.ndim != 2 or self.sampling.shape != (self.cost.shape[0],
                                                              pi.shape[0]):
            raise ValueError("sampling must be indexed [a][s]")
        if np.any(self.cost < 0.0) or not np.all(np.isfinite(self.cost)):
            raise ValueError("costs must be finite and nonnegative")
        if self.budget < 0.0:
            raise ValueError("budget must be nonnegative")

    @property
    def state_size(self) -> int:
        return int(self.stationary_dist.shape[0])

    @property
    def input_size(self) -> int:
        return int(self.per_state_channel.shape[1])

    @property
    def action_size(self) -> int:
        return int(self.cost.shape[0])

    @property
    def feedback_size(self) -> int:
        return int(self.sampling.max()) + 1


@dataclass(frozen=True)
class ExponentQuery:
    """Exponent evaluation request: order rho, policy, start state, block length."""

    rho: float
    policy: CausalPolicy
    s0: int
    n: int

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [0, 1]")
        if self.n != self.policy.block_length:
            raise ValueError("block length must match the policy")


def _objective_and_grad(pi: np.ndarray, w: np.ndarray, mix: np.ndarray,
                        q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched I(X;Y|S) and its gradient in the input slices.

    mix[b, s, k] weights slice k in state s; q[b, k, x] are the slices.
    Returns (value[b], grad[b, k, x]).
    """
    p_xs = np.einsum("bsk,bkx->bsx", mix, q)
    py = np.einsum("bsx,sxy->bsy", p_xs, w)
    logw = log2_guarded(w)
    logpy = log2_guarded(np.maximum(py, 1e-300))
    # d[b, s, x] = sum_y W(y|x,s) log2(W / PY); the per-input information density
    with np.errstate(invalid="ignore"):
        d = np.einsum("sxy,bsxy->bsx", w, np.where(w[None, :, :, :] > 0.0,
                                                   logw[None] - logpy[:, :, None, :],
                                                   0.0))
    value = np.einsum("s,bsx,bsx->b", pi, p_xs, d)
    grad = np.einsum("s,bsk,bsx->bkx", pi, mix, d)
    return value, grad


def _ascend_inputs(pi: np.ndarray, w: np.ndarray, mix: np.ndarray,
                   starts: np.ndarray, tol: float = ASCENT_TOL,
                   max_iter: int = ASCENT_MAX_ITER) -> tuple[np.ndarray, np.ndarray]:
    """Projected-gradient ascent on the concave input-slice objective.

    Batched over instances; per-instance adaptive step with accept/shrink.
    Every operation is row-independent, so converged instances drop out of
    the working batch; their trajectories are unchanged by the compaction.
    Returns (value[b], slices[b, k, x]).
    """
    q = starts.copy()
    value, _ = _objective_and_grad(pi, w, mix, q)
    step = np.full(q.shape[0], 0.5)
    idx = np.arange(q.shape[0])
    for _ in range(max_iter):
        sub_q = q[idx]
        sub_mix = mix[idx]
        sub_value = value[idx]
        sub_step = step[idx]
        _, grad = _objective_and_grad(pi, w, sub_mix, sub_q)
        cand = project_to_simplex(sub_q + sub_step[:, None, None] * grad)
        cand_value, _ = _objective_and_grad(pi, w, sub_mix, cand)
        accept = cand_value >= sub_value
        gain = np.where(accept, cand_value - sub_value, np.inf)
        sub_q = np.where(accept[:, None, None], cand, sub_q)
        sub_value = np.where(accept, cand_value, sub_value)
        sub_step = np.where(accept, sub_step * 1.2, sub_step * 0.5)
        q[idx] = sub_q
        value[idx] = sub_value
        step[idx] = sub_step
        done = (accept & (gain <= tol)) | (sub_step < 1e-13)
        idx = idx[~done]
        if idx.size == 0:
            break
    return value, q


def _action_mixture(prob: SingleLetterProblem, action_dists: np.ndarray) -> np.ndarray:
    """Slice mixture weights mix[b, s, k] for a batch of action distributions.

    Encoder/decoder modes use slices k = (z, a) with weight P(a|.) when
    z = f(a, s); backward_link uses slices k = a directly.
    """
    s_size = prob.state_size
    a_size = prob.action_size
    b = action_dists.shape[0]
    if prob.action_mode == "backward_link":
        # action_dists[b, s, a]
        return action_dists.copy()
    z_size = prob.feedback_size
    mix = np.zeros((b, s_size, z_size * a_size))
    for a in range(a_size):
        for s in range(s_size):
            z = int(prob.sampling[a, s])
            if prob.action_mode == "encoder":
                mix[:, s, z * a_size + a] = action_dists[:, a]
            else:
                mix[:, s, z * a_size + a] = action_dists[:, s, a]
    return mix


def _simplex_grid(dim: int, points_per_axis: int) -> np.ndarray:
    """All probability vectors over `dim` bins with entries on a uniform grid."""
    steps = points_per_axis - 1
    combos = []
    for split in product(range(steps + 1), repeat=dim - 1):
        total = sum(split)
        if total <= steps:
            combos.append(list(split) + [steps - total])
    return np.array(combos, dtype=float) / steps


def _expected_action_cost(prob: SingleLetterProblem, dists: np.ndarray) -> np.ndarray:
    if prob.action_mode == "encoder":
        return dists @ prob.cost
    per_state = dists @ prob.cost  # [b, s]
    return per_state @ prob.stationary_dist


def _candidate_actions(prob: SingleLetterProblem, resolution: int) -> np.ndarray:
    a = prob.action_size
    if prob.action_mode == "encoder":
        free = a - 1
        if free > MAX_DEFAULT_FREE_DIMS and resolution == DEFAULT_RESOLUTION:
            raise ValueError(
                f"{free} free action dimensions need a caller-supplied "
                "coarser resolution"
            )
        return _simplex_grid(a, resolution)
    s = prob.state_size
    free = s * (a - 1)
    if free > MAX_DEFAULT_FREE_DIMS and resolution == DEFAULT_RESOLUTION:
        raise ValueError(
            f"{free} free action dimensions need a caller-supplied coarser resolution"
        )
    rows = _simplex_grid(a, resolution)
    grids = [rows] * s
    out = np.empty((len(rows) ** s, s, a))
    for idx, combo in enumerate(product(range(len(rows)), repeat=s)):
        for st, ri in enumerate(combo):
            out[idx, st] = grids[st][ri]
    return out


def _optimize_slices(prob: SingleLetterProblem, mix: np.ndarray, n_slices: int,
                     restarts: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Inner maximization for every instance in the mixture batch.

    Runs ascent from a uniform start plus seeded random-simplex starts and
    keeps the best value per instance (ties keep the earliest start).
    """
    b = mix.shape[0]
    x = prob.input_size
    rng = np.random.default_rng(seed)
    best_value = np.full(b, -np.inf)
    best_q = np.empty((b, n_slices, x))
    for trial in range(restarts + 1):
        if trial == 0:
            starts = np.full((b, n_slices, x), 1.0 / x)
        else:
            raw = rng.exponential(1.0, size=(b, n_slices, x))
            starts = raw / raw.sum(axis=-1, keepdims=True)
        value, q = _ascend_inputs(prob.stationary_dist, prob.per_state_channel,
                                  mix, starts)
        better = value > best_value
        best_q[better] = q[better]
        best_value = np.where(better, value, best_value)
    return best_value, best_q


def single_letter_lower(prob: SingleLetterProblem,
                        resolution: int = DEFAULT_RESOLUTION,
                        restarts: int = DEFAULT_RESTARTS,
                        seed: int = 0) -> tuple[float, dict]:
    """Best I(X;Y|S) over budget-feasible action distributions on a grid.

    Returns the value in bits and the maximizing distributions (action
    distribution plus input slices); the lowest grid index wins ties.
    """
    if resolution < 10:
        raise ValueError("resolution must be at least 10 grid points per dimension")
    min_cost = float(prob.cost.min())
    if prob.budget < min_cost - FEAS_SLACK:
        raise ValueError(
            f"budget {prob.budget} below the minimum achievable cost {min_cost}"
        )
    candidates = _candidate_actions(prob, resolution)
    costs = _expected_action_cost(prob, candidates)
    feasible = costs <= prob.budget + FEAS_SLACK
    if not feasible.any():
        # grid quantization can miss a feasible corner; fall back to the
        # cheapest deterministic action, which is feasible by the check above
        cheapest = int(np.argmin(prob.cost))
        if prob.action_mode == "encoder":
            fallback = np.zeros((1, prob.action_size))
            fallback[0, cheapest] = 1.0
        else:
            fallback = np.zeros((1, prob.state_size, prob.action_size))
            fallback[0, :, cheapest] = 1.0
        candidates = fallback
        feasible = np.array([True])
    chosen = candidates[feasible]
    mix = _action_mixture(prob, chosen)
    n_slices = mix.shape[2]
    values, slices = _optimize_slices(prob, mix, n_slices, restarts, seed)
    best = int(np.argmax(values))
    action_dist = chosen[best]
    return float(values[best]), {
        "action_dist": action_dist,
        "input_slices": slices[best],
        "mode": prob.action_mode,
    }


def single_letter_curve(prob: SingleLetterProblem, gammas: Sequence[float],
                        resolution: int = DEFAULT_RESOLUTION,
                        restarts: int = DEFAULT_RESTARTS,
                        seed: int = 0) -> np.ndarray:
    """Lower-bound values over a whole budget grid with one optimization pass.

    The inner maximization does not depend on the budget, only feasibility
    does, so every action-grid candidate is optimized once and each budget
    keeps its best feasible value. Budgets with no feasible candidate get
    NaN. The problem's own budget field is ignored here.
    """
    if resolution < 10:
        raise ValueError("resolution must be at least 10 grid points per dimension")
    candidates = _candidate_actions(prob, resolution)
    costs = _expected_action_cost(prob, candidates)
    mix = _action_mixture(prob, candidates)
    values, _ = _optimize_slices(prob, mix, mix.shape[2], restarts, seed)
    out = np.full(len(gammas), np.nan)
    for i, gamma in enumerate(gammas):
        feasible = costs <= gamma + FEAS_SLACK
        if feasible.any():
            out[i] = values[feasible].max()
    return out


def _common_input_value(prob: SingleLetterProblem, restarts: int, seed: int) -> float:
    mix = np.ones((1, prob.state_size, 1))
    values, _ = _optimize_slices(prob, mix, 1, restarts, seed)
    return float(values[0])


def _per_state_value(prob: SingleLetterProblem, restarts: int, seed: int) -> float:
    s = prob.state_size
    mix = np.zeros((1, s, s))
    mix[0, np.arange(s), np.arange(s)] = 1.0
    values, _ = _optimize_slices(prob, mix, s, restarts, seed)
    return float(values[0])


def zero_unit_cost_capacity(prob: SingleLetterProblem,
                            restarts: int = DEFAULT_RESTARTS,
                            seed: int = 0) -> tuple[float, float]:
    """(C(0), C(1)): common-input and per-state-input maxima of I(X;Y|S)."""
    return (_common_input_value(prob, restarts, seed),
            _per_state_value(prob, restarts, seed))


def time_sharing_baseline(c0: float, c1: float, gamma: float) -> float:
    """Linear interpolation (1 - gamma) C(0) + gamma C(1) on gamma in [0, 1]."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    return (1.0 - gamma) * c0 + gamma * c1


def backward_link_capacity_nocost(prob: SingleLetterProblem,
                                  restarts: int = DEFAULT_RESTARTS,
                                  seed: int = 0) -> float:
    """Capacity with a free backward link: per-state-input maximum of I(X;Y|S).

    Requires backward_link mode and an action alphabet at least as large as
    the state alphabet (the actions must be able to announce the state).
    """
    if prob.action_mode != "backward_link":
        raise ValueError("problem must be in backward_link mode")
    if prob.action_size < prob.state_size:
        raise ValueError("needs |A| >= |S| so actions can announce the state")
    return _per_state_value(prob, restarts, seed)


def gallager_exponent(query: ExponentQuery, kernel: FscKernel,
                      sys: ActionSystem) -> float:
    """Literal evaluation of the block exponent for a fixed policy and start state.

    Inner channel powers are taken in the log domain; the value is exactly 0
    at rho = 0 (the bracketed sum is then the total probability mass, 1).
    """
    if query.rho == 0.0:
        return 0.0
    space = TrajectorySpace(kernel, sys, query.n, s0=query.s0)
    if query.policy.u_size != space.u_size or query.policy.z_size != space.z_size:
        raise ValueError("policy alphabets do not match the kernel/action system")
    logs = space.gather_policy_log2(list(query.policy.tables)).sum(axis=0)
    with np.errstate(invalid="ignore"):
        r_prod = np.exp2(logs)
    scaled = np.zeros_like(space.p_full)
    mask = space.p_full > 0.0
    scaled[mask] = np.exp2(space.log2_p_full[mask] / (1.0 + query.rho))
    inner = (r_prod * scaled).sum(axis=0)
    total = float(np.sum(inner ** (1.0 + query.rho)))
    return -math.log2(total) / query.n


def f_n_policy_grid(kernel: FscKernel, sys: ActionSystem, n: int, rho: float,
                    policies: Sequence[CausalPolicy]) -> float:
    """Grid approximation of the max-min exponent over supplied policies only.

    Evaluates min over start states of the exponent for each candidate policy
    and returns the best, shifted by -rho log2|S| / N. This is not a global
    optimizer; it bounds the max-min from below on the supplied set.
    """
    if not policies:
        raise ValueError("need at least one candidate policy")
    s_size = kernel.state_size
    best = -math.inf
    for policy in policies:
        worst = min(
            gallager_exponent(ExponentQuery(rho=rho, policy=policy, s0=s0, n=n),
                              kernel, sys)
            for s0 in range(s_size)
        )
        best = max(best, worst)
    return best - rho * math.log2(s_size) / n
