"""
Belief propagation on the outer factor graph.

Check nodes are evaluated in the Walsh-Hadamard domain: a GF(2^v) parity
constraint is an XOR-convolution once each neighbor's message is permuted by
its coefficient, so products of transforms replace the sum over all index
tuples. Messages live in the probability domain and are renormalized after
every update.
"""
import numpy as np

from coded_demixing.ura.constants import MESSAGE_FLOOR
from coded_demixing.ura.exceptions import DegenerateMessageError, PreconditionError


def fwht(values, axis=-1):
    """
    Unnormalized fast Walsh-Hadamard transform (Sylvester ordering) along
    `axis`, whose length must be a power of two. Applying it twice multiplies
    by the length.
    """
    data = np.ascontiguousarray(np.moveaxis(np.array(values, dtype=float), axis, -1))
    size = data.shape[-1]
    if size & (size - 1):
        raise ValueError("Transform length %d is not a power of two" % size)
    lead = data.shape[:-1]
    half = 1
    while half < size:
        blocks = data.reshape(lead + (size // (2 * half), 2, half))
        upper = blocks[..., 0, :] + blocks[..., 1, :]
        lower = blocks[..., 0, :] - blocks[..., 1, :]
        blocks[..., 0, :] = upper
        blocks[..., 1, :] = lower
        half *= 2
    return np.moveaxis(data, -1, axis)


def _coefficient_domain(gf, coefficient, pmf):
    """Distribution of c*x given the distribution of x."""
    scaled = np.empty_like(pmf)
    scaled[..., gf.scaling(coefficient)] = pmf
    return scaled


def _normalize(pmf):
    total = pmf.sum(axis=-1, keepdims=True)
    with np.errstate(invalid='ignore', divide='ignore'):
        return np.where(total > 0, pmf / total, 0.0)


def check_to_variable(check, incoming, target, gf):
    """
    Message from `check` to section `target`: the sum over all neighbor index
    tuples consistent with the parity constraint, of the product of the other
    neighbors' messages. `incoming` maps section -> PMF for every neighbor but
    the target. The result is not normalized.
    """
    others = [s for s in check.neighbor_sections if s != target]
    if target not in check.neighbor_sections:
        raise PreconditionError("Section %d is not a neighbor of %r" % (target, check))
    missing = [s for s in others if s not in incoming]
    if missing:
        raise PreconditionError("No incoming message for sections %s" % missing)

    spectrum = np.ones(gf.order)
    for section in others:
        pmf = np.asarray(incoming[section], dtype=float)
        spectrum = spectrum * fwht(_coefficient_domain(gf, check.coefficient(section), pmf))
    xor_sum = fwht(spectrum) / gf.order
    outgoing = xor_sum[gf.scaling(check.coefficient(target))]
    return np.maximum(outgoing, 0.0)


def variable_to_check(local, other_check_msgs):
    """Normalized product of the local estimate and the other checks' messages."""
    product = np.array(local, dtype=float)
    for message in other_check_msgs:
        product = product * np.asarray(message, dtype=float)
    total = product.sum()
    if not total > 0:
        raise DegenerateMessageError("Variable message vanished everywhere")
    return product / total


class BeliefPropagation:
    """
    Flooding-schedule BP over one factor graph. `locals_` is an (L, 2^v) array
    of per-section local estimates; after `run(rounds)`, `beliefs()` gives the
    product of incoming check messages per section and `marginals()` that
    product times the local estimate.
    """

    def __init__(self, graph, locals_):
        self.graph = graph
        self.gf = graph.field
        self.locals = np.maximum(np.asarray(locals_, dtype=float), MESSAGE_FLOOR)
        self.locals = _normalize(self.locals)
        self.degenerate = 0

        self._permutations = [[self.gf.scaling(c) for c in check.coefficients] for check in graph.checks]
        # var_to_check[a][i]: message from the i-th neighbor of check a; check_to_var likewise
        self.var_to_check = [self.locals[list(check.neighbor_sections)].copy() for check in graph.checks]
        self.check_to_var = [np.ones((len(check), self.gf.order)) for check in graph.checks]

    def _update_checks(self):
        for index, check in enumerate(self.graph.checks):
            permutations = self._permutations[index]
            scaled = np.empty_like(self.var_to_check[index])
            for position, permutation in enumerate(permutations):
                scaled[position, permutation] = self.var_to_check[index][position]
            spectra = fwht(scaled, axis=-1)
            for position, permutation in enumerate(permutations):
                others = np.delete(spectra, position, axis=0)
                xor_sum = fwht(np.prod(others, axis=0)) / self.gf.order
                message = np.maximum(xor_sum[permutation], 0.0)
                self.check_to_var[index][position] = _normalize(np.maximum(message, MESSAGE_FLOOR))

    def _update_variables(self):
        adjacency = self.graph.variable_adjacency
        for index, check in enumerate(self.graph.checks):
            for position, section in enumerate(check.neighbor_sections):
                incoming = [self._message(a, section) for a in adjacency[section] if a != index]
                try:
                    self.var_to_check[index][position] = variable_to_check(self.locals[section], incoming)
                except DegenerateMessageError:
                    self.degenerate += 1
                    self.var_to_check[index][position] = self.locals[section]

    def _message(self, check_index, section):
        position = self.graph.checks[check_index].neighbor_sections.index(section)
        return self.check_to_var[check_index][position]

    def run(self, rounds):
        for _ in range(rounds):
            self._update_checks()
            self._update_variables()
        return self

    def beliefs(self):
        beliefs = np.ones((self.graph.num_sections, self.gf.order))
        for section, checks in enumerate(self.graph.variable_adjacency):
            for index in checks:
                beliefs[section] = beliefs[section] * self._message(index, section)
        return beliefs

    def marginals(self):
        return _normalize(self.locals * self.beliefs())


def section_beliefs(graph, locals_, rounds):
    """
    Runs `rounds` BP sweeps and returns, per section, the unnormalized product
    of incoming check messages. Requires rounds < girth so that no section's
    own local estimate can flow back into its belief.
    """
    if rounds >= graph.girth:
        raise PreconditionError("%d BP rounds is not below the graph girth %s" % (rounds, graph.girth))
    return BeliefPropagation(graph, locals_).run(rounds).beliefs()
