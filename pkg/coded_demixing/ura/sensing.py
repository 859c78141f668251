"""
Sensing operators A_g mapping sectioned sparse vectors (arrays of shape
(L, 2^v)) to length-n channel vectors, and the amplitude-scaled stack of
several such operators.
"""
import logging

import numpy as np

from coded_demixing.ura.bp import fwht
from coded_demixing.ura.constants import MAX_DENSE_ENTRIES, SENSING_KINDS
from coded_demixing.ura.exceptions import DimensionMismatchError, OperatorError

LOGGER = logging.getLogger(__name__)


class SensingOperator:
    kind = None

    def __init__(self, rows, section_bits, sections, seed):
        self.rows = int(rows)
        self.section_bits = int(section_bits)
        self.sections = int(sections)
        self.seed = seed
        if self.rows < 1:
            raise OperatorError("An operator needs at least one row")

    def __repr__(self):
        return "%s(n=%d, v=%d, L=%d, seed=%s)" % (self.__class__.__name__, self.rows, self.section_bits,
                                                  self.sections, self.seed)

    @property
    def section_size(self):
        return 1 << self.section_bits

    @property
    def cols(self):
        return self.sections * self.section_size

    @property
    def shape(self):
        return self.sections, self.section_size

    def spec(self):
        return {'kind': self.kind, 'n': self.rows, 'v': self.section_bits, 'L': self.sections, 'seed': self.seed}

    def _check_state(self, m):
        m = np.asarray(m, dtype=float)
        if m.shape != self.shape:
            if m.size != self.cols:
                raise DimensionMismatchError("Expected a %s sectioned vector, got shape %s" % (self.shape, m.shape))
            m = m.reshape(self.shape)
        return m

    def _check_channel(self, z):
        z = np.asarray(z, dtype=float).ravel()
        if z.size != self.rows:
            raise DimensionMismatchError("Expected a length-%d channel vector, got %d" % (self.rows, z.size))
        return z

    def forward(self, m):
        raise NotImplementedError

    def adjoint(self, z):
        raise NotImplementedError

    def dense(self):
        """Explicit n x (L 2^v) matrix, built column by column from `forward`."""
        matrix = np.empty((self.rows, self.cols))
        basis = np.zeros(self.cols)
        for column in range(self.cols):
            basis[column] = 1.0
            matrix[:, column] = self.forward(basis)
            basis[column] = 0.0
        return matrix


class GaussianOperator(SensingOperator):
    kind = 'gaussian'

    def __init__(self, rows, section_bits, sections, seed):
        super(GaussianOperator, self).__init__(rows, section_bits, sections, seed)
        if self.rows * self.cols > MAX_DENSE_ENTRIES:
            raise OperatorError("A %d x %d Gaussian operator is too large to store, use the hadamard kind" %
                                (self.rows, self.cols))
        rng = np.random.default_rng(seed)
        self.matrix = rng.normal(0.0, 1.0 / np.sqrt(self.rows), size=(self.rows, self.cols))

    def forward(self, m):
        return self.matrix @ self._check_state(m).ravel()

    def adjoint(self, z):
        return (self.matrix.T @ self._check_channel(z)).reshape(self.shape)

    def dense(self):
        return self.matrix.copy()


class HadamardOperator(SensingOperator):
    """
    Each section owns n rows and 2^v columns of a W x W Sylvester Hadamard
    matrix, both sampled without replacement from indices 1..W-1, so neither
    the all-ones row nor the constant column is ever used. W is the smallest
    power of two above 2^v and n. Entries are +-1/sqrt(n), giving unit-norm
    columns. Without `embed`, n is limited to 2^v - 1.
    """
    kind = 'hadamard'

    def __init__(self, rows, section_bits, sections, seed, embed=False):
        super(HadamardOperator, self).__init__(rows, section_bits, sections, seed)
        self.embed = bool(embed)
        if self.rows > self.section_size - 1 and not self.embed:
            raise OperatorError("n = %d exceeds the %d usable rows of a %d x %d Hadamard matrix" %
                                (self.rows, self.section_size - 1, self.section_size, self.section_size))
        self.order = 1 << int(np.ceil(np.log2(max(self.section_size, self.rows) + 1)))

        rng = np.random.default_rng(seed)
        row_draws, column_draws = [], []
        for _ in range(self.sections):
            row_draws.append(rng.choice(self.order - 1, size=self.rows, replace=False) + 1)
            column_draws.append(rng.choice(self.order - 1, size=self.section_size, replace=False) + 1)
        self.row_selection = np.stack(row_draws)
        self.column_selection = np.stack(column_draws)
        self.row_selection.flags.writeable = False
        self.column_selection.flags.writeable = False
        self._scale = 1.0 / np.sqrt(self.rows)

    def spec(self):
        spec = super(HadamardOperator, self).spec()
        spec['embed'] = self.embed
        return spec

    def forward(self, m):
        m = self._check_state(m)
        padded = np.zeros((self.sections, self.order))
        np.put_along_axis(padded, self.column_selection, m, axis=-1)
        transformed = fwht(padded, axis=-1)
        picked = np.take_along_axis(transformed, self.row_selection, axis=-1)
        return picked.sum(axis=0) * self._scale

    def adjoint(self, z):
        z = self._check_channel(z)
        scattered = np.zeros((self.sections, self.order))
        np.put_along_axis(scattered, self.row_selection, np.broadcast_to(z, self.row_selection.shape), axis=-1)
        transformed = fwht(scattered, axis=-1)
        return np.take_along_axis(transformed, self.column_selection, axis=-1) * self._scale


def make_operator(kind, rows, section_bits, sections, seed, embed=False):
    if kind == 'gaussian':
        return GaussianOperator(rows, section_bits, sections, seed)
    if kind == 'hadamard':
        return HadamardOperator(rows, section_bits, sections, seed, embed=embed)
    raise OperatorError("Unknown sensing kind %r, expected one of %s" % (kind, SENSING_KINDS))


def operator_from_spec(spec):
    return make_operator(spec['kind'], spec['n'], spec['v'], spec['L'], spec['seed'], embed=spec.get('embed', False))


class StackedOperator:
    """The demixing operator [d_1 A_1, ..., d_G A_G] acting on per-group states."""

    def __init__(self, groups):
        self.groups = [(op, float(amplitude)) for op, amplitude in groups]
        if not self.groups:
            raise OperatorError("A stacked operator needs at least one group")
        rows = {op.rows for op, _ in self.groups}
        if len(rows) != 1:
            raise DimensionMismatchError("Member operators disagree on n: %s" % sorted(rows))
        self.rows = rows.pop()

    def __len__(self):
        return len(self.groups)

    @property
    def operators(self):
        return [op for op, _ in self.groups]

    @property
    def amplitudes(self):
        return np.array([amplitude for _, amplitude in self.groups])

    def forward(self, states):
        if len(states) != len(self.groups):
            raise DimensionMismatchError("Expected %d group states, got %d" % (len(self.groups), len(states)))
        total = np.zeros(self.rows)
        for (op, amplitude), state in zip(self.groups, states):
            if amplitude:
                total += amplitude * op.forward(state)
        return total

    def adjoint(self, z):
        """Per-group A_g^T z; amplitudes are applied by the caller."""
        return [op.adjoint(z) for op in self.operators]


def max_cross_coherence(first, second, section=0):
    """Largest |<a, b>| between unit-norm columns of one section of two operators."""
    if first.rows != second.rows:
        raise DimensionMismatchError("Operators disagree on n")
    blocks = []
    for op in (first, second):
        states = np.zeros((op.section_size,) + op.shape)
        states[np.arange(op.section_size), section, np.arange(op.section_size)] = 1.0
        block = np.stack([op.forward(state) for state in states], axis=1)
        blocks.append(block / np.linalg.norm(block, axis=0, keepdims=True))
    return float(np.abs(blocks[0].T @ blocks[1]).max())


def forward(op, m):
    return op.forward(m)


def adjoint(op, z):
    return op.adjoint(z)


def stacked_forward(stack, states):
    return stack.forward(states)


def stacked_adjoint(stack, z):
    return stack.adjoint(z)
