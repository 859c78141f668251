# Primitive polynomials for GF(2^v), bit i is the coefficient of x^i.
# Degree 16 follows the 0x1002D convention (x^16 + x^5 + x^3 + x^2 + 1).
PRIMITIVE_POLYNOMIALS = {
    3: 0x000B,
    4: 0x0013,
    5: 0x0025,
    6: 0x0043,
    7: 0x0089,
    8: 0x011D,
    9: 0x0211,
    10: 0x0409,
    11: 0x0805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1002D,
}

MIN_SECTION_BITS = 3
MAX_SECTION_BITS = 16

# Weights are floored before message products so hard beliefs never cancel out.
MESSAGE_FLOOR = 1e-30
PRIOR_CLAMP = 1e-12
# Section marginals this close (relative) to the largest one count as tied.
TIE_TOLERANCE = 1e-9

SENSING_KINDS = ('gaussian', 'hadamard')
# Dense Gaussian operators above this many entries are refused.
MAX_DENSE_ENTRIES = 2 ** 26

RECEIVER_MODES = ('coded_demixing', 'tin', 'sic')
OCCUPANCY_METHODS = ('lmmse', 'round', 'oracle')
SWEEP_AXES = ('ebno', 'k')

MAX_BINID_POWER_FRACTION = 0.05

DEFAULTS = {
    'AMP_ITERATIONS': 15,
    'LIST_SLACK': 10,
    'EXTRACTION_BP_ROUNDS': 10,
    'DENOISER_BP_ROUNDS': 1,
    'BINID_POWER_FRACTION': 0.002,
    'TAU_FLOOR': 1e-12,
    'WORKERS': 1,
    'GRAPH_MAX_CHECK_DEGREE': 4,
}

# AMP is flagged as diverging after this many consecutive increases of tau.
DIVERGENCE_PATIENCE = 3

CSV_COLUMNS = ['axis_value', 'group_id', 'pupe', 'md', 'fa', 'trials', 'ci_lo', 'ci_hi', 'mode', 'G']

CONFIDENCE_LEVEL = 0.95


FILTER_FIELDS = {
    'sweeps': {'mode': 'mode__iexact', 'bins': 'bins', 'axis': 'axis__iexact', 'name': 'name__icontains'},
    'thresholds': {'mode': 'mode__iexact', 'bins': 'bins', 'name': 'name__icontains'},
}
