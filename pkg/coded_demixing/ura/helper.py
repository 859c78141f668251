import numpy as np

from coded_demixing.ura.exceptions import LengthMismatchError


def bits_to_sections(bits, section_bits):
    """
    Fragment a bit string into integers of `section_bits` bits each, most
    significant bit first.
    """
    bits = np.asarray(bits, dtype=np.int64).ravel()
    if bits.size % section_bits:
        raise LengthMismatchError("%d bits do not split into %d-bit sections" % (bits.size, section_bits))
    weights = 1 << np.arange(section_bits - 1, -1, -1, dtype=np.int64)
    return bits.reshape(-1, section_bits) @ weights


def sections_to_bits(values, section_bits):
    values = np.asarray(values, dtype=np.int64).ravel()
    shifts = np.arange(section_bits - 1, -1, -1, dtype=np.int64)
    return ((values[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def bits_to_int(bits):
    value = 0
    for bit in bits:
        value = (value << 1) | int(bit)
    return value


def int_to_bits(value, width):
    return tuple((value >> shift) & 1 for shift in range(width - 1, -1, -1))


def bit_string(bits):
    return ''.join(str(int(bit)) for bit in bits)


def sparse_codeword(codeword, section_size):
    """One-hot (L, 2^v) representation of a codeword, one unit entry per section."""
    codeword = np.asarray(codeword, dtype=np.int64)
    m = np.zeros((codeword.size, section_size))
    m[np.arange(codeword.size), codeword] = 1.0
    return m
