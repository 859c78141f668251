"""
Multi-group approximate message passing with a BP-informed posterior mean
denoiser.

Each iteration forms the effective observation r_g = A_g^T z + d_g s_g, runs
the dynamic denoiser per group (PME under an uninformative prior, one BP round
on the group's factor graph, PME again under the BP-derived prior) and
updates the residual with the closed-form Onsager correction.
"""
import dataclasses
import logging
from typing import List

import numpy as np
from scipy.special import expit, logit

from coded_demixing.ura.bp import section_beliefs
from coded_demixing.ura.constants import DEFAULTS, DIVERGENCE_PATIENCE, PRIOR_CLAMP
from coded_demixing.ura.exceptions import DimensionMismatchError, PreconditionError

LOGGER = logging.getLogger(__name__)


def pme(q, r, d, tau):
    """
    Posterior probability that a section entry is active given the effective
    observation r = d * active + N(0, tau^2), with prior activity q. Evaluated
    in the log-odds domain so large exponents never overflow.
    """
    q = np.asarray(q, dtype=float)
    with np.errstate(divide='ignore', over='ignore'):
        log_odds = logit(q) + d * (np.asarray(r, dtype=float) - d / 2.0) / tau ** 2
    return expit(log_odds)


def pme_derivative(q, r, d, tau):
    estimate = pme(q, r, d, tau)
    return d / tau ** 2 * estimate * (1.0 - estimate)


def uninformative_prior(users, section_bits):
    """Probability that at least one of `users` uniform indices hits a given entry."""
    return -np.expm1(users * np.log1p(-2.0 ** -section_bits))


def beliefs_to_priors(beliefs, users):
    """
    Per-entry activity priors from section beliefs: each of `users` indices
    falls on entry k with probability mu(k) / |mu|_1. Sections whose beliefs
    vanish are reported as NaN rows for the caller to replace.
    """
    beliefs = np.asarray(beliefs, dtype=float)
    totals = beliefs.sum(axis=-1, keepdims=True)
    with np.errstate(invalid='ignore', divide='ignore'):
        shares = beliefs / totals
        priors = -np.expm1(users * np.log1p(-np.minimum(shares, 1.0)))
    bad = ~np.isfinite(totals[:, 0]) | (totals[:, 0] <= 0)
    priors[bad] = np.nan
    return np.clip(priors, PRIOR_CLAMP, 1.0 - PRIOR_CLAMP)


def dynamic_denoise(r, graph, users, amplitude, tau, rounds=DEFAULTS['DENOISER_BP_ROUNDS'], bp_enabled=True):
    """
    Returns (next state, priors, degenerate section count) for one group.
    With `bp_enabled` false the uninformative prior is used throughout.
    """
    r = np.asarray(r, dtype=float)
    if tau <= 0:
        raise PreconditionError("tau must be positive, got %r" % tau)
    if users < 0:
        raise PreconditionError("User count must be nonnegative, got %r" % users)
    if r.shape != (graph.num_sections, graph.section_size):
        raise DimensionMismatchError("Effective observation has shape %s, graph expects %s" %
                                     (r.shape, (graph.num_sections, graph.section_size)))
    if users == 0:
        return np.zeros_like(r), np.zeros_like(r), 0

    flat = uninformative_prior(users, graph.section_bits)
    if not bp_enabled:
        priors = np.full(r.shape, float(np.clip(flat, PRIOR_CLAMP, 1.0 - PRIOR_CLAMP)))
        return pme(priors, r, amplitude, tau), priors, 0

    local = pme(flat, r, amplitude, tau)
    priors = beliefs_to_priors(section_beliefs(graph, local, rounds), users)
    degenerate = np.isnan(priors[:, 0])
    if degenerate.any():
        LOGGER.debug("Degenerate beliefs in %d section(s), using the uninformative prior", degenerate.sum())
        priors[degenerate] = np.clip(flat, PRIOR_CLAMP, 1.0 - PRIOR_CLAMP)
    return pme(priors, r, amplitude, tau), priors, int(degenerate.sum())


def onsager_divergence(states, amplitudes, tau):
    """(1/tau^2) * sum_g d_g^2 (|eta_g|_1 - |eta_g|_2^2) for denoiser outputs eta_g in [0, 1]."""
    total = 0.0
    for state, amplitude in zip(states, amplitudes):
        state = np.asarray(state, dtype=float)
        total += amplitude ** 2 * (state.sum() - np.square(state).sum())
    return total / tau ** 2


@dataclasses.dataclass
class AmpResult:
    states: List[np.ndarray]
    priors: List[np.ndarray]
    tau_trace: List[float]
    diverged: bool = False
    diagnostics: List[dict] = dataclasses.field(default_factory=list)

    @property
    def iterations(self):
        return len(self.tau_trace)


def amp_decode(y, stack, graphs, users, iterations=DEFAULTS['AMP_ITERATIONS'],
               rounds=DEFAULTS['DENOISER_BP_ROUNDS'], bp_enabled=True, tau_floor=DEFAULTS['TAU_FLOOR']):
    """
    Runs `iterations` AMP steps from s = 0, z = y. `users` holds the expected
    user count per group. Stops early, flagging the result, when tau grows
    above its initial value for several iterations in a row.
    """
    if iterations < 1:
        raise PreconditionError("AMP needs at least one iteration")
    if not len(graphs) == len(users) == len(stack):
        raise DimensionMismatchError("Got %d graphs and %d user counts for %d groups" %
                                     (len(graphs), len(users), len(stack)))
    y = np.asarray(y, dtype=float)
    n = stack.rows
    amplitudes = stack.amplitudes

    states = [np.zeros((graph.num_sections, graph.section_size)) for graph in graphs]
    priors = [np.zeros_like(state) for state in states]
    z = y.copy()
    trace = []
    diagnostics = []
    rising = 0
    diverged = False

    for iteration in range(1, iterations + 1):
        tau = max(float(np.sqrt(np.dot(z, z) / n)), tau_floor)
        trace.append(tau)
        if len(trace) > 1 and tau > trace[-2] and tau > trace[0]:
            rising += 1
        else:
            rising = 0
        if rising >= DIVERGENCE_PATIENCE:
            diverged = True
            LOGGER.warning("AMP diverging at iteration %d (tau %.4g, initial %.4g)", iteration, tau, trace[0])
            break

        projections = stack.adjoint(z)
        degenerate = []
        for g, graph in enumerate(graphs):
            effective = projections[g] + amplitudes[g] * states[g]
            states[g], priors[g], count = dynamic_denoise(effective, graph, users[g], amplitudes[g], tau,
                                                          rounds=rounds, bp_enabled=bp_enabled)
            degenerate.append(count)

        divergence = onsager_divergence(states, amplitudes, tau)
        z = y - stack.forward(states) + (z / n) * divergence
        diagnostics.append({'iteration': iteration, 'tau': tau, 'residual_norm': float(np.linalg.norm(z)),
                            'degenerate': degenerate})

    return AmpResult(states=states, priors=priors, tau_trace=trace, diverged=diverged, diagnostics=diagnostics)
