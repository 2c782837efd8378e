"""Alternating maximization of directed information under Lagrangian action costs.

For a block length N, a channel law p(y^N || x^N), a deterministic feedback
sampler and per-action costs, the algorithm alternates between

  - the reverse conditional q(x^N, a^N | y^N), whose optimum for fixed r is
    the Bayes posterior r * p / sum r * p, and
  - the causal policy factors r_i(x_i, a_i | x^{i-1}, a^{i-1}, z^{i-1}),
    updated backward from step N with a weighted-geometric-mean formula whose
    weights combine the channel law, the already-updated later factors, and
    per-feedback-history sums of past channel products,

maximizing (1/N) I(X^N -> Y^N) - lambda E[Lambda]. Every iteration yields a
monotone lower bound I_L and an anytime upper bound I_U (the value of the
best deterministic causal deviation policy against the current output law,
found by a backward fold over feedback histories); the gap certifies
convergence. Sweeping lambda traces the cost-capacity tradeoff; the envelope
of the sweep's tangent lines bounds the constrained curve from above, and
shifting it by Lambda_max/N gives the computable lower bound of the sandwich

    C_N(Gamma - Lambda_max/N) <= C(Gamma) <= C_N(Gamma).

All quantities are in bits; cost is the per-step average (1/N) sum Lambda.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._num import freeze, fsum_array, log2_guarded, weighted_log2_sum
from .actions import ActionSystem
from .fsc import FscKernel
from .policy import CausalPolicy
from .trajectory import TrajectorySpace

DEFAULT_EPSILON = 1e-6
DEFAULT_MAX_ITERS = 10_000
ENVELOPE_SLACK = 1e-9


def default_lambda_grid() -> np.ndarray:
    """25 geometric points on [1e-3, 10] plus the unconstrained point 0."""
    return np.concatenate([[0.0], np.geomspace(1e-3, 10.0, 25)])


@dataclass
class BaaState:
    """Mutable optimizer state: current policy r, reverse conditional q, bounds.

    compat_sets maps (step, action prefix, feedback prefix) to the output
    prefixes consistent with that feedback; q_unreachable flags output blocks
    with zero probability under (r, p); r_flagged marks policy slices that
    received no weight in the last policy update.
    """

    lam: float
    r: CausalPolicy
    q: np.ndarray
    iteration: int
    lower_bound: float
    upper_bound: float
    compat_sets: dict
    space: TrajectorySpace
    kernel: FscKernel
    sys: ActionSystem
    q_unreachable: np.ndarray = field(default=None)
    r_flagged: tuple = ()

    @classmethod
    def initial(cls, kernel: FscKernel, sys: ActionSystem, n: int,
                lam: float) -> "BaaState":
        """Uniform policy with its induced Bayes posterior (see update_q)."""
        space = TrajectorySpace(kernel, sys, n)
        r = CausalPolicy.uniform(n, space.u_size, space.z_size)
        state = cls(
            lam=lam, r=r, q=None, iteration=0,
            lower_bound=-math.inf, upper_bound=math.inf,
            compat_sets=space.compat_sets(), space=space,
            kernel=kernel, sys=sys,
        )
        state.q, state.q_unreachable = _posterior(space, r)
        return state


def _policy_log_sum(space: TrajectorySpace, r: CausalPolicy) -> np.ndarray:
    """log2 of the causal conditioning product r(u^N || z^{N-1}) per trajectory."""
    return space.gather_policy_log2(list(r.tables)).sum(axis=0)


def _posterior(space: TrajectorySpace, r: CausalPolicy):
    with np.errstate(invalid="ignore"):
        r_prod = np.exp2(_policy_log_sum(space, r))
    joint = r_prod * space.p_full
    den = joint.sum(axis=0)
    unreachable = den <= 0.0
    q = np.empty_like(joint)
    reach = ~unreachable
    q[:, reach] = joint[:, reach] / den[reach]
    q[:, unreachable] = 1.0 / space.rows
    return q, unreachable


def update_q(state: BaaState, p_full: Optional[np.ndarray] = None) -> np.ndarray:
    """Bayes posterior q(u^N | y^N) = r p / sum_u r p for the state's policy.

    Output blocks with zero marginal get a uniform slice and are flagged
    unreachable on the state. The channel law defaults to the state's own.
    """
    space = state.space
    if p_full is None:
        q, unreachable = _posterior(space, state.r)
    else:
        with np.errstate(invalid="ignore"):
            r_prod = np.exp2(_policy_log_sum(space, state.r))
        joint = r_prod * np.asarray(p_full, dtype=float)
        den = joint.sum(axis=0)
        unreachable = den <= 0.0
        q = np.empty_like(joint)
        q[:, ~unreachable] = joint[:, ~unreachable] / den[~unreachable]
        q[:, unreachable] = 1.0 / space.rows
    state.q_unreachable = unreachable
    return q


def update_r(state: BaaState, lam: Optional[float] = None) -> CausalPolicy:
    """Backward policy update (steps N down to 1) for fixed q.

    Step i uses the factors already updated at steps j > i. The new factor is
    the normalized weighted geometric mean

        log r'(u^i, z^{i-1}) = sum w * log[ q 2^(-lambda sum_j Lambda(a_j))
                                            / prod_{j>i} r_j ]

    with weights w = p(y^N || x^N) prod_{j>i} r_j divided by the
    feedback-compatible sum of past channel products; zero-weight terms
    contribute exactly 0 even when the log argument vanishes. Slices that
    receive no weight at all become uniform and are flagged on the state.
    """
    if lam is None:
        lam = state.lam
    space = state.space
    n, u = space.n, space.u_size
    logq = log2_guarded(state.q)
    penalty = lam * space.cost_row  # exponent of 2^(-N lambda Lambda(a^N))
    suffix_log = np.zeros((space.rows, space.cols))
    new_tables: list[np.ndarray] = [None] * n
    flagged: list[np.ndarray] = [None] * n
    for i in range(n, 0, -1):
        with np.errstate(invalid="ignore"):
            w_num = space.p_full * np.exp2(suffix_log)
        denom = space.denom[i - 1]
        w = np.where(denom > 0.0, w_num / np.where(denom > 0.0, denom, 1.0), 0.0)
        with np.errstate(invalid="ignore"):
            logarg = logq - penalty[:, None] - suffix_log
            contrib = np.where(w > 0.0, w * logarg, 0.0)
        n_slots = space.n_hist[i - 1] * u
        acc = np.zeros(n_slots)
        np.add.at(acc, space.slot_index[i - 1], contrib)
        wsum = np.zeros(n_slots)
        np.add.at(wsum, space.slot_index[i - 1], w)
        logr = acc.reshape(space.n_hist[i - 1], u)
        got_weight = wsum.reshape(space.n_hist[i - 1], u).sum(axis=1) > 0.0
        mx = logr.max(axis=1, keepdims=True)
        live = np.isfinite(mx.ravel()) & got_weight
        table = np.empty_like(logr)
        with np.errstate(invalid="ignore"):
            table[live] = np.exp2(logr[live] - mx[live])
        table[~live] = 1.0
        table /= table.sum(axis=1, keepdims=True)
        new_tables[i - 1] = table
        flagged[i - 1] = ~live
        suffix_log = suffix_log + log2_guarded(table.ravel()[space.slot_index[i - 1]])
    policy = CausalPolicy(block_length=n, u_size=u, z_size=space.z_size,
                          tables=tuple(new_tables))
    state.r_flagged = tuple(freeze(f, dtype=bool) for f in flagged)
    return policy


def _expected_cost(space: TrajectorySpace, joint: np.ndarray) -> float:
    """Per-step average action cost under a dense joint on the space."""
    return fsum_array(joint * space.cost_row[:, None]) / space.n


def lower_bound(state: BaaState) -> float:
    """Monotone Lagrangian lower iterate

    I_L = (1/N) sum r p log2(q / r) - lambda E[Lambda] under r p.
    """
    space = state.space
    with np.errstate(invalid="ignore"):
        r_prod = np.exp2(_policy_log_sum(space, state.r))
    joint = r_prod * space.p_full
    info = weighted_log2_sum(joint, state.q, r_prod)
    return info / space.n - state.lam * _expected_cost(space, joint)


def upper_bound(state: BaaState) -> float:
    """Anytime upper iterate: value of the best deterministic deviation policy

    I_U = (1/N) max over deterministic causal maps u_i = g(u^{i-1}, z^{i-1})
          of E_g[ log2( p(y^N || x^N) 2^(-lambda sum_j Lambda(a_j))
                        / sum_u r p ) ].

    Evaluated backward: expectation over y_i per step, with the max over u_i
    taken once per feedback history (u^{i-1}, z^{i-1}), its candidates scored
    by the past-law-weighted sum over the output prefixes the history cannot
    distinguish. Ties resolve to the lowest u index. The deviation policies
    are the extreme points of the causal-policy polytope, so at a maximizing
    policy the fold value meets the Lagrangian maximum and the bracket
    closes; letting the max adapt to y^{i-1} itself would over-inform the
    deviator and leave a permanent gap wherever sampling is priced out.
    """
    space = state.space
    n, u_size, y_size = space.n, space.u_size, space.y_size
    with np.errstate(invalid="ignore"):
        r_prod = np.exp2(_policy_log_sum(space, state.r))
    d = (r_prod * space.p_full).sum(axis=0)
    leaf = (
        space.log2_p_full
        - state.lam * space.cost_row[:, None]
        - log2_guarded(d)[None, :]
    )
    v = leaf.reshape([u_size] * n + [y_size] * n)
    for i in range(n, 0, -1):
        c = space.cond_reduced[i - 1]
        with np.errstate(invalid="ignore"):
            v = np.where(c > 0.0, c * v, 0.0).sum(axis=-1)
        # axes [U]*i + [Y]*(i-1): value-to-go given (u^i, y^{i-1});
        # pick u_i once per history class, weighted by the past law
        v = np.moveaxis(
            v.reshape(u_size ** (i - 1), u_size, y_size ** (i - 1)), 1, 2
        )
        w = space.measure_reduced[i - 1][..., None]
        hist = space.hist_reduced[i - 1]
        scores = np.zeros((space.n_hist[i - 1], u_size))
        with np.errstate(invalid="ignore"):
            np.add.at(scores, hist, np.where(w > 0.0, w * v, 0.0))
        best = scores.argmax(axis=1)
        v = np.take_along_axis(v, best[hist][..., None], axis=2)[..., 0]
        v = v.reshape([u_size] * (i - 1) + [y_size] * (i - 1))
    return float(v) / n


@dataclass(frozen=True)
class TradeoffPoint:
    """One Lagrangian sweep point: penalty, measured cost, value, convergence."""

    lam: float
    gamma: float
    c_lambda: float
    i_lower: float
    i_upper: float
    iterations: int
    final_gap: float
    converged: bool
    history: Optional[tuple[tuple[float, float], ...]] = None


@dataclass(frozen=True)
class TradeoffCurve:
    """Sweep points sorted by lambda plus the reconstructed cost envelope.

    The envelope value at budget g is min over points of (i_upper + lam * g):
    the least tangent line, an upper bound on the constrained optimum at any
    iterate. It is nondecreasing and concave by construction; both are
    validated at build time.
    """

    block_length: int
    max_cost: float
    points: tuple[TradeoffPoint, ...]
    gammas: np.ndarray
    envelope: np.ndarray
    support_lambda: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "gammas", freeze(self.gammas))
        object.__setattr__(self, "envelope", freeze(self.envelope))
        object.__setattr__(self, "support_lambda", freeze(self.support_lambda))
        lams = [p.lam for p in self.points]
        if lams != sorted(lams):
            raise ValueError("points must be sorted by lambda")
        env = self.envelope
        if env.size >= 2 and np.any(np.diff(env) < -ENVELOPE_SLACK):
            raise ValueError("envelope must be nondecreasing")
        if env.size >= 3:
            second = np.diff(env, 2)
            if np.any(second > ENVELOPE_SLACK):
                raise ValueError("envelope must be concave")

    def envelope_at(self, gamma: float) -> float:
        """Exact tangent-line envelope value at an arbitrary budget."""
        return min(p.i_upper + p.lam * gamma for p in self.points)


@dataclass(frozen=True)
class SandwichBounds:
    """Computable capacity brackets on a budget grid.

    lower_shifted[g] = envelope(g - Lambda_max/N), NaN (absent) below the
    shift; upper[g] = envelope(g).
    """

    block_length: int
    gammas: np.ndarray
    upper: np.ndarray
    lower_shifted: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "gammas", freeze(self.gammas))
        object.__setattr__(self, "upper", freeze(self.upper))
        object.__setattr__(self, "lower_shifted", freeze(self.lower_shifted))


def run_baa(kernel: FscKernel, sys: ActionSystem, n: int, lam: float,
            eps: float = DEFAULT_EPSILON, max_iters: int = DEFAULT_MAX_ITERS,
            record_history: bool = False) -> TradeoffPoint:
    """Iterate the two updates until the bound gap closes (or iterations run out).

    Starts from a uniform policy with its Bayes posterior, then repeats
    policy update, posterior update, bound evaluation. Nonconvergence within
    max_iters is reported on the point, not raised. The value C_N(lambda) is
    the final upper iterate; the measured cost is the per-step average action
    cost under the final policy.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if sys.decoder_actions.size != 1:
        raise ValueError(
            "the optimizer handles encoder-side actions; expand decoder "
            "strategies first where that reduction applies"
        )
    state = BaaState.initial(kernel, sys, n, lam)
    history: list[tuple[float, float]] = []
    converged = False
    il = -math.inf
    iu = math.inf
    for k in range(1, max_iters + 1):
        state.r = update_r(state)
        state.q = update_q(state)
        state.iteration = k
        il = lower_bound(state)
        iu = upper_bound(state)
        state.lower_bound = il
        state.upper_bound = iu
        if record_history:
            history.append((il, iu))
        if iu - il <= eps:
            converged = True
            break
    space = state.space
    with np.errstate(invalid="ignore"):
        joint = np.exp2(_policy_log_sum(space, state.r)) * space.p_full
    gamma = _expected_cost(space, joint)
    return TradeoffPoint(
        lam=lam,
        gamma=gamma,
        c_lambda=iu,
        i_lower=il,
        i_upper=iu,
        iterations=state.iteration,
        final_gap=iu - il,
        converged=converged,
        history=tuple(history) if record_history else None,
    )


def sweep_lambda(kernel: FscKernel, sys: ActionSystem, n: int,
                 lam_grid: Optional[Sequence[float]] = None,
                 eps: float = DEFAULT_EPSILON,
                 max_iters: int = DEFAULT_MAX_ITERS,
                 threads: int = 1,
                 gamma_points: int = 101,
                 record_history: bool = False) -> TradeoffCurve:
    """Run the optimizer across a lambda grid and rebuild the cost envelope.

    Points run independently (optionally across a thread pool) and are
    reported sorted by lambda. The envelope is evaluated on a uniform budget
    grid [0, Lambda_max]; each budget records its supporting lambda (lowest
    lambda wins ties). Nonconverged points propagate their flags.
    """
    if lam_grid is None:
        lam_grid = default_lambda_grid()
    lams = sorted(float(v) for v in lam_grid)
    if not lams or lams[0] < 0.0:
        raise ValueError("lambda grid must be nonempty and nonnegative")

    def solve(lam: float) -> TradeoffPoint:
        return run_baa(kernel, sys, n, lam, eps=eps, max_iters=max_iters,
                       record_history=record_history)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            points = tuple(pool.map(solve, lams))
    else:
        points = tuple(solve(lam) for lam in lams)

    max_cost = float(sys.cost_table[:, 0].max())
    if max_cost > 0.0:
        gammas = np.linspace(0.0, max_cost, gamma_points)
    else:
        gammas = np.array([0.0])
    lines = np.array([[p.i_upper + p.lam * g for g in gammas] for p in points])
    envelope = lines.min(axis=0)
    support = np.array([points[int(j)].lam for j in lines.argmin(axis=0)])
    envelope = np.maximum.accumulate(envelope)  # no-op safety clamp
    return TradeoffCurve(
        block_length=n,
        max_cost=max_cost,
        points=points,
        gammas=gammas,
        envelope=envelope,
        support_lambda=support,
    )


def sandwich_bounds(curve: TradeoffCurve, n: Optional[int] = None) -> SandwichBounds:
    """Paired computable bounds from one curve: upper env(g), lower env(g - shift).

    The shift is Lambda_max/N (1/N on the unit-cost scale); the lower bound
    is reported absent (NaN) for budgets below the shift.
    """
    if n is None:
        n = curve.block_length
    shift = curve.max_cost / n
    upper = np.array([curve.envelope_at(g) for g in curve.gammas])
    lower = np.full_like(upper, np.nan)
    for idx, g in enumerate(curve.gammas):
        if g >= shift - 1e-12:
            lower[idx] = curve.envelope_at(g - shift)
    return SandwichBounds(block_length=n, gammas=curve.gammas, upper=upper,
                          lower_shifted=lower)


def bisect_lambda_for_cost(kernel: FscKernel, sys: ActionSystem, n: int,
                           gamma_target: float,
                           lam_lo: float = 0.0, lam_hi: float = 10.0,
                           cost_tol: float = 1e-3,
                           eps: float = DEFAULT_EPSILON,
                           max_iters: int = DEFAULT_MAX_ITERS,
                           max_steps: int = 60) -> TradeoffPoint:
    """Bisect on lambda until the measured cost hits a target within cost_tol.

    Uses the monotone nonincreasing dependence of the measured cost on
    lambda. Returns the closest point found if the bracket cannot reach the
    target.
    """
    lo_point = run_baa(kernel, sys, n, lam_lo, eps=eps, max_iters=max_iters)
    if abs(lo_point.gamma - gamma_target) <= cost_tol or lo_point.gamma <= gamma_target:
        return lo_point
    hi_point = run_baa(kernel, sys, n, lam_hi, eps=eps, max_iters=max_iters)
    if abs(hi_point.gamma - gamma_target) <= cost_tol:
        return hi_point
    if hi_point.gamma > gamma_target:
        return hi_point  # even the strongest penalty spends above target
    best = lo_point
    for _ in range(max_steps):
        mid = 0.5 * (lam_lo + lam_hi)
        point = run_baa(kernel, sys, n, mid, eps=eps, max_iters=max_iters)
        if abs(point.gamma - gamma_target) < abs(best.gamma - gamma_target):
            best = point
        if abs(point.gamma - gamma_target) <= cost_tol:
            return point
        if point.gamma > gamma_target:
            lam_lo = mid
        else:
            lam_hi = mid
    return best
