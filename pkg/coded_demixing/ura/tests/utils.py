import os

from coded_demixing.ura.access import AmpSettings, GroupConfig, Scenario
from coded_demixing.ura.constants import PRIMITIVE_POLYNOMIALS

SCENARIOS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.dirname(os.path.dirname(
    os.path.abspath(__file__))))), 'scenarios')


def scenario_path(name):
    return os.path.join(SCENARIOS_DIR, name)


def small_scenario(classes=1, users=1, noise=False, ebno_db=6.0, mode='coded_demixing', n=400, section_bits=6,
                   sections=8, iterations=10, seed=3):
    """Independent classes of Gaussian-sensed groups, small enough for unit tests."""
    groups = [GroupConfig(group_id=g, users=users, section_bits=section_bits, sections=sections, rows=n,
                          sensing_seed=10 + g, graph_seed=g) for g in range(classes)]
    return Scenario(groups=groups, n=n, ebno_db=ebno_db, amp=AmpSettings(iterations=iterations), mode=mode,
                    noise=noise, trials=4, seed=seed, name='small')


def carryless_product(a, b, bits):
    """GF(2^bits) product by shift-and-add with reduction, independent of the field tables."""
    modulus = PRIMITIVE_POLYNOMIALS[bits]
    product = 0
    for _ in range(bits):
        if b & 1:
            product ^= a
        b >>= 1
        a <<= 1
        if a & (1 << bits):
            a ^= modulus
    return product
