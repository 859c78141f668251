import functools

import numpy as np

from coded_demixing.ura.constants import PRIMITIVE_POLYNOMIALS, MIN_SECTION_BITS, MAX_SECTION_BITS
from coded_demixing.ura.exceptions import FieldError


class GaloisField:
    """
    GF(2^v) with log/antilog tables built from a fixed primitive polynomial.
    Elements are integers in [0, 2^v); addition is XOR.
    """

    def __init__(self, bits):
        if bits not in PRIMITIVE_POLYNOMIALS:
            raise FieldError("GF(2^%s) is not supported, use %d <= v <= %d" % (bits, MIN_SECTION_BITS,
                                                                              MAX_SECTION_BITS))
        self.bits = bits
        self.order = 1 << bits
        self.primitive_poly = PRIMITIVE_POLYNOMIALS[bits]

        group_order = self.order - 1
        self.exp_table = np.zeros(2 * group_order, dtype=np.int64)
        self.log_table = np.full(self.order, -1, dtype=np.int64)
        element = 1
        for power in range(group_order):
            if self.log_table[element] != -1:
                raise FieldError("Polynomial %#x is not primitive" % self.primitive_poly)
            self.exp_table[power] = element
            self.log_table[element] = power
            element <<= 1
            if element & self.order:
                element ^= self.primitive_poly
        self.exp_table[group_order:] = self.exp_table[:group_order]
        self.exp_table.flags.writeable = False
        self.log_table.flags.writeable = False

    def __repr__(self):
        return "GaloisField(2^%d, poly=%#x)" % (self.bits, self.primitive_poly)

    def add(self, a, b):
        return np.bitwise_xor(a, b)

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        product = self.exp_table[(self.log_table[a] + self.log_table[b]) % (self.order - 1)]
        return np.where((a == 0) | (b == 0), 0, product)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise FieldError("Zero has no multiplicative inverse")
        return self.exp_table[(self.order - 1 - self.log_table[a]) % (self.order - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def scaling(self, coefficient):
        """Permutation x -> coefficient * x over all field elements."""
        if coefficient == 1:
            return np.arange(self.order)
        return self.mul(coefficient, np.arange(self.order))


@functools.lru_cache(maxsize=None)
def field(bits):
    return GaloisField(bits)


class FieldElement:
    __slots__ = ('value', 'bits')

    def __init__(self, value, bits):
        value = int(value)
        if not 0 <= value < (1 << bits):
            raise FieldError("%d is not an element of GF(2^%d)" % (value, bits))
        self.value = value
        self.bits = bits

    @property
    def field(self):
        return field(self.bits)

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.bits != self.bits:
                raise FieldError("Mixed fields GF(2^%d) and GF(2^%d)" % (self.bits, other.bits))
            return other.value
        return int(other)

    def __add__(self, other):
        return FieldElement(self.value ^ self._coerce(other), self.bits)

    __radd__ = __add__
    __sub__ = __add__

    def __mul__(self, other):
        return FieldElement(self.field.mul(self.value, self._coerce(other)), self.bits)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field.div(self.value, self._coerce(other)), self.bits)

    def inverse(self):
        return FieldElement(self.field.inv(self.value), self.bits)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.value == other.value and self.bits == other.bits
        return self.value == other

    def __hash__(self):
        return hash((self.value, self.bits))

    def __int__(self):
        return self.value

    def __repr__(self):
        return "FieldElement(%d, v=%d)" % (self.value, self.bits)
