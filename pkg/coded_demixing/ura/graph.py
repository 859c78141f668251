"""
Outer non-binary LDPC code: factor graph construction and systematic encoding.

Sections 0 .. kappa-1 carry information, sections kappa .. L-1 are parity.
Check j is created together with parity section kappa + j and only touches
sections that precede it, so processing checks in order determines one fresh
parity section per check.
"""
import collections
import logging
import math
from fractions import Fraction

import numpy as np

from coded_demixing.ura.constants import DEFAULTS
from coded_demixing.ura.exceptions import GraphConstructionError, LengthMismatchError
from coded_demixing.ura.galois import field
from coded_demixing.ura.helper import bits_to_sections, sections_to_bits

LOGGER = logging.getLogger(__name__)


class CheckNode:
    def __init__(self, neighbor_sections, coefficients=None):
        self.neighbor_sections = tuple(int(s) for s in neighbor_sections)
        if coefficients is None:
            coefficients = [1] * len(self.neighbor_sections)
        self.coefficients = tuple(int(c) for c in coefficients)

        if len(self.neighbor_sections) < 2:
            raise GraphConstructionError("A check needs at least two neighbors")
        if len(set(self.neighbor_sections)) != len(self.neighbor_sections):
            raise GraphConstructionError("Check neighbors must be distinct: %s" % (self.neighbor_sections,))
        if len(self.coefficients) != len(self.neighbor_sections):
            raise GraphConstructionError("One coefficient per neighbor is required")
        if any(c == 0 for c in self.coefficients):
            raise GraphConstructionError("Check coefficients must be nonzero")

    def __len__(self):
        return len(self.neighbor_sections)

    def __repr__(self):
        return "CheckNode(%s, %s)" % (self.neighbor_sections, self.coefficients)

    def coefficient(self, section):
        return self.coefficients[self.neighbor_sections.index(section)]

    def syndrome(self, gf, codeword):
        values = gf.mul(np.asarray(self.coefficients), np.asarray(codeword)[list(self.neighbor_sections)])
        return int(np.bitwise_xor.reduce(values))


class FactorGraph:
    def __init__(self, num_sections, section_bits, checks, encoding_order=None, rate=None, seed=None):
        self.num_sections = int(num_sections)
        self.section_bits = int(section_bits)
        self.checks = list(checks)
        self.encoding_order = list(range(len(self.checks)) if encoding_order is None else encoding_order)
        self.rate = Fraction(rate) if rate is not None else Fraction(self.num_sections - len(self.checks),
                                                                      self.num_sections)
        self.seed = seed
        self.field = field(self.section_bits)

        for check in self.checks:
            if max(check.neighbor_sections) >= self.num_sections or min(check.neighbor_sections) < 0:
                raise GraphConstructionError("Check %r refers to a missing section" % (check,))
            if max(check.coefficients) >= self.field.order:
                raise GraphConstructionError("Check %r has coefficients outside GF(2^%d)" % (check,
                                                                                           self.section_bits))

        self.variable_adjacency = [[] for _ in range(self.num_sections)]
        for index, check in enumerate(self.checks):
            for section in check.neighbor_sections:
                self.variable_adjacency[section].append(index)

        self.parity_sections = self._parity_sections()
        self.info_sections = [s for s in range(self.num_sections) if s not in set(self.parity_sections.values())]
        self.girth = self._girth()
        if self.girth < 4:
            raise GraphConstructionError("Girth %s is below 4" % self.girth)

    def __repr__(self):
        return "FactorGraph(L=%d, v=%d, rate=%s, checks=%d, girth=%s)" % (
            self.num_sections, self.section_bits, self.rate, len(self.checks), self.girth)

    @property
    def section_size(self):
        return 1 << self.section_bits

    @property
    def info_count(self):
        return len(self.info_sections)

    @property
    def info_bits(self):
        return self.info_count * self.section_bits

    def _parity_sections(self):
        """Maps each check to the section it determines, validating the encoding order."""
        if sorted(self.encoding_order) != list(range(len(self.checks))):
            raise GraphConstructionError("Encoding order must be a permutation of the checks")

        parity_count = len(self.checks)
        determined = set(range(self.num_sections - parity_count))
        parity = {}
        for index in self.encoding_order:
            fresh = [s for s in self.checks[index].neighbor_sections if s not in determined]
            if len(fresh) != 1:
                raise GraphConstructionError("Check %d has %d undetermined sections in encoding order" %
                                             (index, len(fresh)))
            parity[index] = fresh[0]
            determined.add(fresh[0])
        if len(determined) != self.num_sections:
            raise GraphConstructionError("Encoding order leaves sections undetermined")
        return parity

    def _girth(self):
        """Length of the shortest cycle of the bipartite graph (inf for a forest)."""
        offset = self.num_sections
        adjacency = [[offset + a for a in checks] for checks in self.variable_adjacency]
        adjacency += [list(check.neighbor_sections) for check in self.checks]

        girth = math.inf
        for root in range(len(adjacency)):
            distance = {root: 0}
            parent = {root: None}
            queue = collections.deque([root])
            while queue:
                node = queue.popleft()
                for neighbor in adjacency[node]:
                    if neighbor not in distance:
                        distance[neighbor] = distance[node] + 1
                        parent[neighbor] = node
                        queue.append(neighbor)
                    elif parent[node] != neighbor:
                        girth = min(girth, distance[node] + distance[neighbor] + 1)
        return girth

    def is_connected(self):
        seen = {0}
        stack = [0]
        while stack:
            section = stack.pop()
            for index in self.variable_adjacency[section]:
                for other in self.checks[index].neighbor_sections:
                    if other not in seen:
                        seen.add(other)
                        stack.append(other)
        return len(seen) == self.num_sections

    def is_codeword(self, codeword):
        return all(check.syndrome(self.field, codeword) == 0 for check in self.checks)

    def info_to_message(self, codeword):
        """Strip parity sections and reassemble the information bits."""
        return sections_to_bits(np.asarray(codeword)[self.info_sections], self.section_bits)


def build_graph(num_sections, section_bits, rate, seed, max_check_degree=DEFAULTS['GRAPH_MAX_CHECK_DEGREE'],
                min_girth=4, random_coefficients=False, max_tries=1000):
    """
    Randomized construction with rejection: every check joins its fresh parity
    section to 1..max_check_degree-1 earlier sections; a candidate is accepted
    when it is connected, covers every section and meets `min_girth`.
    """
    rate = Fraction(rate)
    if not 0 < rate < 1:
        raise GraphConstructionError("Rate must lie in (0, 1), got %s" % rate)
    info_count = num_sections * rate
    if info_count.denominator != 1:
        raise GraphConstructionError("L * rate = %s is not an integer" % info_count)
    info_count = int(info_count)
    if max_check_degree < 2:
        raise GraphConstructionError("Check degree must be at least 2")

    gf = field(section_bits)
    rng = np.random.default_rng(seed)

    for attempt in range(max_tries):
        checks = []
        covered = set()
        for parity in range(info_count, num_sections):
            width = min(max_check_degree - 1, parity)
            count = int(rng.integers(min(2, width), width + 1))
            uncovered = [s for s in range(parity) if s not in covered]
            chosen = [int(rng.choice(uncovered))] if uncovered else []
            rest = [s for s in range(parity) if s not in chosen]
            chosen += [int(s) for s in rng.choice(rest, size=count - len(chosen), replace=False)]
            neighbors = sorted(chosen) + [parity]
            if random_coefficients:
                coefficients = [int(c) for c in rng.integers(1, gf.order, size=len(neighbors))]
            else:
                coefficients = None
            checks.append(CheckNode(neighbors, coefficients))
            covered.update(neighbors)

        graph = FactorGraph(num_sections, section_bits, checks, rate=rate, seed=seed)
        if graph.is_connected() and len(covered) == num_sections and graph.girth >= min_girth:
            LOGGER.debug("Built %r after %d attempt(s)", graph, attempt + 1)
            return graph

    raise GraphConstructionError("No encodable graph with girth >= %d after %d attempts (L=%d, rate=%s)" %
                                 (min_girth, max_tries, num_sections, rate))


def encode(graph, info):
    """Systematic encoding of `graph.info_bits` bits into L section values."""
    info = np.asarray(info, dtype=np.int64).ravel()
    if info.size != graph.info_bits:
        raise LengthMismatchError("Expected %d information bits, got %d" % (graph.info_bits, info.size))

    gf = graph.field
    codeword = np.zeros(graph.num_sections, dtype=np.int64)
    codeword[graph.info_sections] = bits_to_sections(info, graph.section_bits)
    for index in graph.encoding_order:
        check = graph.checks[index]
        parity = graph.parity_sections[index]
        others = [s for s in check.neighbor_sections if s != parity]
        coefficients = np.asarray([check.coefficient(s) for s in others])
        accumulated = int(np.bitwise_xor.reduce(gf.mul(coefficients, codeword[others])))
        codeword[parity] = int(gf.div(accumulated, check.coefficient(parity)))
    return codeword
