"""Shared fixtures: bundled configurations, canonical channels, session sweeps.

The two bundled configurations double as the canonical test instances:

  - bsc.json: one-state crossover channel with singleton actions, the
    classical memoryless reduction whose capacity is known in closed form.
  - markovian.json: two-state channel whose state is an exogenous fair coin
    announced to the receiver through the second output factor; the encoder
    can pay unit cost to sample the upcoming state.

The Lagrangian sweeps over the default lambda grid are expensive for the
two-state channel, so they run once per session with recorded per-iteration
bound histories, and every test that needs sweep data reuses them.
"""

import json
from pathlib import Path

import hypothesis
import numpy as np
import pytest

from sampcap import ActionSystem, Alphabet, CausalPolicy, FscKernel, HistoryIndexer
from sampcap.baa import sweep_lambda
from sampcap.cli import parse_config

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"
BSC_CONFIG_PATH = CONFIG_DIR / "bsc.json"
MARKOVIAN_CONFIG_PATH = CONFIG_DIR / "markovian.json"

hypothesis.settings.register_profile("suite", deadline=None, max_examples=50)
hypothesis.settings.load_profile("suite")


def load_config(path):
    """Parse a bundled configuration; any violation fails the caller."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    config, violations = parse_config(doc)
    assert config is not None, violations
    return config


def make_random_kernel(rng, s_size, x_size, y_size):
    """Random valid channel with a random initial state distribution."""
    raw = rng.random((s_size, x_size, y_size, s_size))
    raw /= raw.sum(axis=(2, 3), keepdims=True)
    init = rng.random(s_size)
    init /= init.sum()
    return FscKernel(
        state_alphabet=Alphabet(s_size),
        input_alphabet=Alphabet(x_size),
        output_alphabet=Alphabet(y_size),
        kernel=raw,
        initial_dist=init,
    )


def make_trivial_actions(y_size):
    """Singleton action system: one zero-cost action, constant feedback."""
    return ActionSystem(
        encoder_actions=Alphabet(1),
        decoder_actions=Alphabet(1),
        feedback_alphabet=Alphabet(1),
        sampling_table=np.zeros((1, 1, y_size), dtype=int),
        cost_table=np.zeros((1, 1)),
        budget=0.0,
    )


def make_random_policy(rng, n, u_size, z_size):
    """Random causal policy with strictly positive conditional slices."""
    indexer = HistoryIndexer(u_size, z_size)
    tables = []
    for i in range(1, n + 1):
        t = rng.random((indexer.n_histories(i), u_size)) + 1e-3
        t /= t.sum(axis=1, keepdims=True)
        tables.append(t)
    return CausalPolicy(block_length=n, u_size=u_size, z_size=z_size,
                        tables=tuple(tables))


@pytest.fixture(scope="session")
def bsc_config():
    return load_config(BSC_CONFIG_PATH)


@pytest.fixture(scope="session")
def markovian_config():
    return load_config(MARKOVIAN_CONFIG_PATH)


@pytest.fixture(scope="session")
def bsc_kernel(bsc_config):
    return bsc_config.kernel


@pytest.fixture(scope="session")
def bsc_actions(bsc_config):
    return bsc_config.actions


@pytest.fixture(scope="session")
def markovian_kernel(markovian_config):
    return markovian_config.kernel


@pytest.fixture(scope="session")
def markovian_actions(markovian_config):
    return markovian_config.actions


@pytest.fixture(scope="session")
def markovian_single_letter(markovian_config):
    """Factory for single-letter problems on the two-state example."""
    spec = markovian_config.single_letter

    def make(mode, budget):
        return spec.problem(mode, budget)

    return make


@pytest.fixture(scope="session")
def bsc_sweeps(bsc_config):
    """Default-grid sweeps with bound histories for the memoryless channel."""
    return {
        n: sweep_lambda(
            bsc_config.kernel, bsc_config.actions, n,
            eps=bsc_config.epsilon, max_iters=bsc_config.max_iters,
            threads=2, record_history=True,
        )
        for n in bsc_config.block_lengths
    }


@pytest.fixture(scope="session")
def markovian_sweeps(markovian_config):
    """Default-grid sweeps with bound histories for the two-state channel."""
    return {
        n: sweep_lambda(
            markovian_config.kernel, markovian_config.actions, n,
            eps=markovian_config.epsilon, max_iters=markovian_config.max_iters,
            threads=4, record_history=True,
        )
        for n in markovian_config.block_lengths
    }
