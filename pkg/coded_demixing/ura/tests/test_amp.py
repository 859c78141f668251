import dataclasses

import numpy as np
import pytest
from numpy.random import default_rng
from scipy.special import expit, logit

from coded_demixing.ura.amp import (amp_decode, beliefs_to_priors, dynamic_denoise, onsager_divergence, pme,
                                    pme_derivative, uninformative_prior)
from coded_demixing.ura.constants import DIVERGENCE_PATIENCE, PRIOR_CLAMP
from coded_demixing.ura.exceptions import DimensionMismatchError, PreconditionError
from coded_demixing.ura.graph import CheckNode, FactorGraph, build_graph, encode
from coded_demixing.ura.harness import synthesize, trial_seed
from coded_demixing.ura.helper import sparse_codeword
from coded_demixing.ura.sensing import GaussianOperator, StackedOperator
from coded_demixing.ura.tests.utils import small_scenario


def test_pme_derivative_matches_finite_differences():
    rng = np.random.default_rng(0)
    size = 10 ** 4
    q = rng.uniform(0.01, 0.99, size)
    d = rng.uniform(0.5, 3.0, size)
    tau = rng.uniform(0.3, 2.0, size)
    # observations chosen so the posterior log-odds stay within [-5, 5]
    log_odds = rng.uniform(-5.0, 5.0, size)
    r = d / 2.0 + tau ** 2 / d * (log_odds - logit(q))
    step = 1e-5 * tau ** 2 / d

    numeric = (pme(q, r + step, d, tau) - pme(q, r - step, d, tau)) / (2 * step)
    exact = pme_derivative(q, r, d, tau)
    assert np.max(np.abs(numeric - exact) / exact) <= 1e-5


def test_pme_is_bounded_and_handles_extremes():
    assert pme(0.5, 1e6, 1.0, 1.0) == 1.0
    assert pme(0.5, -1e6, 1.0, 1.0) == 0.0
    assert pme(0.0, 3.0, 1.0, 1.0) == 0.0
    assert pme(0.3, 0.5, 1.0, 1.0) == pytest.approx(expit(logit(0.3)))


def test_uninformative_prior():
    assert uninformative_prior(1, 4) == pytest.approx(1 / 16)
    assert uninformative_prior(0, 4) == 0.0
    assert uninformative_prior(3, 3) == pytest.approx(1 - (7 / 8) ** 3)


def test_beliefs_to_priors():
    beliefs = np.ones((3, 8))
    beliefs[1] = 0.0
    beliefs[2] = np.array([4.0, 0, 0, 0, 0, 0, 0, 0])
    priors = beliefs_to_priors(beliefs, 2)
    np.testing.assert_allclose(priors[0], uninformative_prior(2, 3))
    assert np.isnan(priors[1]).all()
    assert priors[2, 0] == 1.0 - PRIOR_CLAMP
    assert priors[2, 1] == PRIOR_CLAMP


def test_dynamic_denoise_edge_cases(graph):
    r = np.zeros((graph.num_sections, graph.section_size))
    state, priors, degenerate = dynamic_denoise(r, graph, 0, 1.0, 1.0)
    assert not state.any() and degenerate == 0

    flat, priors, _ = dynamic_denoise(r + 0.3, graph, 2, 1.0, 1.0, bp_enabled=False)
    np.testing.assert_allclose(flat, pme(uninformative_prior(2, graph.section_bits), 0.3, 1.0, 1.0))

    with pytest.raises(PreconditionError):
        dynamic_denoise(r, graph, 1, 1.0, 0.0)
    with pytest.raises(PreconditionError):
        dynamic_denoise(r, graph, -1, 1.0, 1.0)
    with pytest.raises(DimensionMismatchError):
        dynamic_denoise(r[:, :4], graph, 1, 1.0, 1.0)


def test_onsager_divergence_is_additive_over_groups():
    rng = np.random.default_rng(3)
    first, second = rng.uniform(size=(4, 8)), rng.uniform(size=(2, 16))
    together = onsager_divergence([first, second], [1.5, 0.7], 0.8)
    assert together == pytest.approx(onsager_divergence([first], [1.5], 0.8) +
                                     onsager_divergence([second], [0.7], 0.8))


def finite_difference_divergence(r, graph, users, amplitude, tau, step=1e-6):
    """sum_i d * d(eta_i)/d(r_i) by central differences of the full dynamic denoiser."""
    total = 0.0
    for index in np.ndindex(r.shape):
        up, down = r.copy(), r.copy()
        up[index] += step
        down[index] -= step
        total += (dynamic_denoise(up, graph, users, amplitude, tau)[0][index] -
                  dynamic_denoise(down, graph, users, amplitude, tau)[0][index]) / (2 * step)
    return amplitude * total


def test_closed_form_onsager_matches_denoiser_divergence():
    graphs = [build_graph(3, 3, '1/3', seed=0), build_graph(3, 3, '1/3', seed=1)]
    assert all(graph.girth == 4 for graph in graphs)
    amplitudes = [1.2, 0.8]
    tau = 0.9
    rng = np.random.default_rng(17)
    for _ in range(20):
        observations = [amplitude * rng.uniform(0, 1, size=(3, 8)) + tau * rng.normal(size=(3, 8))
                        for amplitude in amplitudes]
        states = [dynamic_denoise(r, graph, 2, amplitude, tau)[0]
                  for r, graph, amplitude in zip(observations, graphs, amplitudes)]
        closed = onsager_divergence(states, amplitudes, tau)
        numeric = sum(finite_difference_divergence(r, graph, 2, amplitude, tau)
                      for r, graph, amplitude in zip(observations, graphs, amplitudes))
        assert abs(closed - numeric) <= 1e-4 * abs(numeric)


def test_noiseless_single_user_is_recovered(graph):
    rng = np.random.default_rng(4)
    op = GaussianOperator(300, graph.section_bits, graph.num_sections, seed=2)
    codeword = encode(graph, rng.integers(0, 2, size=graph.info_bits))
    amplitude = 4.0
    y = amplitude * op.forward(sparse_codeword(codeword, graph.section_size))

    result = amp_decode(y, StackedOperator([(op, amplitude)]), [graph], [1], iterations=10)
    assert not result.diverged
    assert np.array_equal(result.states[0].argmax(axis=1), codeword)
    assert result.tau_trace[-1] < result.tau_trace[0]
    assert result.iterations == len(result.diagnostics) == 10


class RunawayStack:
    """Stand-in operator whose forward map grows on every call, forcing tau upwards."""

    def __init__(self, rows, graph):
        self.rows = rows
        self.amplitudes = np.array([1.0])
        self.graph = graph
        self.calls = 0

    def __len__(self):
        return 1

    def adjoint(self, z):
        return [np.zeros((self.graph.num_sections, self.graph.section_size))]

    def forward(self, states):
        self.calls += 1
        return -10.0 * self.calls * np.ones(self.rows)


def test_divergence_is_flagged_not_raised(graph):
    result = amp_decode(np.ones(50), RunawayStack(50, graph), [graph], [1], iterations=10)
    assert result.diverged
    assert len(result.tau_trace) == DIVERGENCE_PATIENCE + 1


def test_amp_argument_checks(graph):
    op = GaussianOperator(30, graph.section_bits, graph.num_sections, seed=0)
    stack = StackedOperator([(op, 1.0)])
    with pytest.raises(PreconditionError):
        amp_decode(np.zeros(30), stack, [graph], [1], iterations=0)
    with pytest.raises(DimensionMismatchError):
        amp_decode(np.zeros(30), stack, [graph, graph], [1, 1])


def test_dynamic_denoise_matches_a_straight_line_evaluation():
    graph = FactorGraph(2, 3, [CheckNode((0, 1))])
    users, d, tau = 2, 1.3, 0.7
    rng = np.random.default_rng(12)
    r = d * rng.uniform(0, 1, size=(2, 8)) + 0.2 * rng.normal(size=(2, 8))

    flat = 1 - (7 / 8) ** users
    likelihood = np.exp(d * (r - d / 2) / tau ** 2)
    local = flat * likelihood / (flat * likelihood + 1 - flat)
    # x0 = x1, so each section's belief is the other section's local estimate
    belief = local[::-1]
    share = belief / belief.sum(axis=1, keepdims=True)
    prior = 1 - (1 - share) ** users
    expected = prior * likelihood / (prior * likelihood + 1 - prior)

    state, priors, degenerate = dynamic_denoise(r, graph, users, d, tau)
    assert degenerate == 0
    np.testing.assert_allclose(priors, prior, rtol=1e-9, atol=1e-14)
    np.testing.assert_allclose(state, expected, rtol=1e-9, atol=1e-14)


def test_dynamic_denoise_is_lipschitz(graph):
    users, d, tau = 2, 1.0, 1.0
    shape = (graph.num_sections, graph.section_size)
    ratios = {}
    for scale in (1e-3, 1e-5):
        # same points and directions at both step sizes
        rng = np.random.default_rng(21)
        ratios[scale] = []
        for _ in range(50):
            r = 0.5 * d * rng.uniform(0, 1, size=shape) + tau * rng.normal(size=shape)
            direction = rng.normal(size=shape)
            step = scale * direction / np.linalg.norm(direction)
            here = dynamic_denoise(r, graph, users, d, tau)[0]
            there = dynamic_denoise(r + step, graph, users, d, tau)[0]
            assert 0.0 <= here.min() and here.max() <= 1.0
            ratios[scale].append(np.linalg.norm(there - here) / scale)
    coarse, fine = np.array(ratios[1e-3]), np.array(ratios[1e-5])
    assert np.all(np.isfinite(fine))
    assert fine.max() <= 10 * d / tau ** 2
    np.testing.assert_allclose(fine, coarse, rtol=0.05)


def test_tau_settles_without_rising_above_threshold():
    scenario = dataclasses.replace(small_scenario(users=2, noise=True, ebno_db=10.0), trials=40)
    group = scenario.groups[0]
    stack = StackedOperator([(group.operator, scenario.amplitude(group))])
    monotone = 0
    for trial in range(scenario.trials):
        _, _, y, _ = synthesize(scenario, default_rng(trial_seed(scenario.seed, 0, trial)))
        trace = np.array(amp_decode(y, stack, [group.graph], [group.users], iterations=10).tau_trace)
        # plateau jitter once AMP has converged is not a rise
        monotone += bool(np.all(trace[2:] <= trace[1:-1] * (1 + 1e-3)))
    assert monotone >= 0.95 * scenario.trials
