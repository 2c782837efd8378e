"""Acceptance gate: seven checks the package must pass end to end.

Each test pins one headline guarantee with explicit tolerances:

  1. the memoryless baseline value, its speed, and per-letter stability
  2. bracketing and convergence of the iterates on every bundled instance
  3. block envelopes saturating where the analytic curve saturates
  4. the analytic endpoint values and the strict gain over time sharing
  5. agreement between optimized code paths and brute-force references
  6. structural invariants of policies, joints, exponents, and envelopes
  7. the ordering of the sandwich bounds over the feasible budget range
"""

import time

import numpy as np
import pytest

from sampcap import (
    CausalPolicy,
    ExponentQuery,
    FscKernel,
    build_joint,
    causal_channel_prob,
    conditional_directed_information,
    directed_information,
    gallager_exponent,
    grid_capacity,
    literal_directed_info,
    literal_r_update,
    run_baa,
    sample_feedback,
    sandwich_bounds,
    single_letter_curve,
    single_letter_lower,
    sweep_lambda,
    time_sharing_baseline,
    update_r,
)
from sampcap.baa import BaaState

from conftest import make_random_policy


def all_curves(bsc_sweeps, markovian_sweeps):
    for label, sweeps in (("bsc", bsc_sweeps), ("markovian", markovian_sweeps)):
        for n, curve in sweeps.items():
            yield label, n, curve


def test_1_memoryless_reference_value_and_speed(bsc_kernel, bsc_actions,
                                                bsc_sweeps):
    start = time.perf_counter()
    point = run_baa(bsc_kernel, bsc_actions, 1, 0.0)
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    assert point.i_upper == pytest.approx(0.188722, abs=1e-5)
    for n in (2, 3):
        free = bsc_sweeps[n].points[0]
        assert free.lam == 0.0
        assert free.i_upper == pytest.approx(point.i_upper, abs=1e-4)


def test_2_iterates_bracket_and_converge_everywhere(bsc_sweeps,
                                                    markovian_sweeps):
    for label, n, curve in all_curves(bsc_sweeps, markovian_sweeps):
        for point in curve.points:
            where = f"{label} n={n} lambda={point.lam}"
            assert point.converged, where
            assert point.iterations <= 10_000, where
            assert point.final_gap <= 1e-6, where
            lows = np.array([lo for lo, _ in point.history])
            ups = np.array([up for _, up in point.history])
            assert lows.size == point.iterations
            assert np.all(lows <= ups + 1e-12), where
            assert np.all(np.diff(lows) >= -1e-12), where


def test_3_block_envelopes_saturate_with_the_analytic_curve(
    markovian_single_letter, markovian_sweeps
):
    gammas = np.linspace(0.0, 1.0, 101)
    curve = single_letter_curve(markovian_single_letter("encoder", 1.0), gammas,
                                resolution=101, seed=0)
    saturated = curve >= curve[-1] - 1e-6
    first = int(np.argmax(saturated))
    gamma_star = float(gammas[first])
    assert abs(gamma_star - 0.2034) <= 0.03
    env2 = markovian_sweeps[2]
    env3 = markovian_sweeps[3]
    assert np.allclose(env2.gammas, env3.gammas, atol=1e-12)
    assert np.all(np.array(env3.envelope)
                  <= np.array(env2.envelope) + 1e-6)
    gap = env3.envelope_at(gamma_star) - float(curve[first])
    assert -1e-9 <= gap <= 1e-3


def test_4_analytic_endpoints_beat_time_sharing(markovian_single_letter):
    c0, _ = single_letter_lower(markovian_single_letter("encoder", 0.0), seed=0)
    c1, _ = single_letter_lower(markovian_single_letter("encoder", 1.0), seed=0)
    assert c0 == pytest.approx(0.311278, abs=1e-4)
    assert c1 == pytest.approx(0.321928, abs=1e-4)
    half, _ = single_letter_lower(markovian_single_letter("encoder", 0.5), seed=0)
    assert half - time_sharing_baseline(c0, c1, 0.5) >= 1e-4


def test_5_brute_force_references_agree(bsc_kernel, bsc_actions, markovian_kernel,
                                        markovian_actions, bsc_sweeps):
    # literal product-of-powers policy update vs the log-domain update
    for kernel, sys_ in ((bsc_kernel, bsc_actions), (markovian_kernel, markovian_actions)):
        for n in (1, 2):
            state = BaaState.initial(kernel, sys_, n, 0.5)
            literal = literal_r_update(state)
            main = update_r(state)
            for lit, opt in zip(literal.tables, main.tables):
                assert np.max(np.abs(lit - opt)) <= 1e-10

    # exhaustive policy grid vs the lambda-sweep envelope at the budget
    for n in (1, 2):
        value = grid_capacity(bsc_kernel, bsc_actions, n, grid_step=0.05)
        assert abs(value - bsc_sweeps[n].envelope_at(0.0)) <= 5e-3
    markovian_curve = sweep_lambda(markovian_kernel, markovian_actions, 1)
    value = grid_capacity(markovian_kernel, markovian_actions, 1, grid_step=0.05)
    assert abs(value - markovian_curve.envelope_at(1.0)) <= 5e-3

    # literal directed information vs the chain rule on randomized joints
    rng = np.random.default_rng(20260818)
    worst = 0.0
    for i in range(100):
        if i % 2 == 0:
            joint = build_joint(make_random_policy(rng, 2, 4, 3),
                                markovian_kernel, markovian_actions)
        else:
            joint = build_joint(make_random_policy(rng, 3, 2, 1),
                                bsc_kernel, bsc_actions)
        worst = max(worst, abs(literal_directed_info(joint)
                               - directed_information(joint)))
    assert worst <= 1e-9


def test_6_structural_invariants(bsc_kernel, bsc_actions, markovian_kernel,
                                 markovian_actions, markovian_sweeps):
    rng = np.random.default_rng(17)

    # policies stay normalized to 1e-12 and their joints to 1e-9
    for kernel, sys_, u, z in ((markovian_kernel, markovian_actions, 4, 3),
                               (bsc_kernel, bsc_actions, 2, 1)):
        for _ in range(5):
            policy = make_random_policy(rng, 2, u, z)
            for table in policy.tables:
                assert np.max(np.abs(table.sum(axis=1) - 1.0)) <= 1e-12
            joint = build_joint(policy, kernel, sys_)
            assert abs(float(joint.probs.sum()) - 1.0) <= 1e-9

    # every joint cell factors into policy product times channel law
    policy = make_random_policy(rng, 2, 4, 3)
    joint = build_joint(policy, markovian_kernel, markovian_actions)
    for row in range(joint.probs.shape[0]):
        for col in range(joint.probs.shape[1]):
            u_seq = joint.u_digits[row]
            y_seq = joint.y_digits[col]
            z_seq = [
                sample_feedback(markovian_actions, int(joint.action_digits[row, i]),
                                0, int(y_seq[i]))
                for i in range(2)
            ]
            q = 1.0
            for i in range(2):
                slot = policy.indexer.encode(u_seq[:i], z_seq[:i])
                q *= policy.tables[i][slot, u_seq[i]]
            p = causal_channel_prob(markovian_kernel, joint.x_digits[row], y_seq)
            assert joint.probs[row, col] == pytest.approx(q * p, abs=1e-12)

    # start-state knowledge moves the information by at most log2 |S|
    mixed = FscKernel(
        state_alphabet=markovian_kernel.state_alphabet,
        input_alphabet=markovian_kernel.input_alphabet,
        output_alphabet=markovian_kernel.output_alphabet,
        kernel=markovian_kernel.kernel,
        initial_dist=np.array([0.5, 0.5]),
    )
    joints = [build_joint(policy, mixed, markovian_actions, s0=s) for s in (0, 1)]
    _, average = conditional_directed_information(joints, [0.5, 0.5])
    unconditional = directed_information(build_joint(policy, mixed,
                                                     markovian_actions))
    assert abs(unconditional - average) <= 1.0 + 1e-12

    # the exponent vanishes exactly at order zero and its finite-difference
    # slope at zero stays within the information rate
    uniform = CausalPolicy.uniform(2, 4, 3)
    zero = gallager_exponent(ExponentQuery(rho=0.0, policy=uniform, s0=0, n=2),
                             markovian_kernel, markovian_actions)
    assert zero == 0.0
    small = gallager_exponent(
        ExponentQuery(rho=0.001, policy=uniform, s0=0, n=2),
        markovian_kernel, markovian_actions,
    )
    slope = small / 0.001
    rate = directed_information(build_joint(uniform, markovian_kernel, markovian_actions,
                                            s0=0)) / 2.0
    assert 0.0 < slope <= rate + 1e-4

    # envelopes are nondecreasing and concave in the budget
    for curve in markovian_sweeps.values():
        env = np.array(curve.envelope)
        assert np.all(np.diff(env) >= -1e-9)
        assert np.all(np.diff(env, 2) <= 1e-9)


def test_7_sandwich_bounds_are_ordered(bsc_sweeps, markovian_sweeps):
    for n, curve in markovian_sweeps.items():
        sb = sandwich_bounds(curve)
        gammas = np.asarray(sb.gammas)
        lower = np.asarray(sb.lower_shifted)
        upper = np.asarray(sb.upper)
        feasible = gammas >= curve.max_cost / n - 1e-12
        assert np.all(np.isnan(lower[~feasible]))
        assert np.all(np.isfinite(lower[feasible]))
        assert np.all(lower[feasible] <= upper[feasible] + 1e-12)
    sb = sandwich_bounds(bsc_sweeps[2])
    assert np.allclose(sb.lower_shifted, sb.upper, atol=1e-12)
