"""
Access-protocol layer: per-group configuration, power bookkeeping, user
encoding with optional stochastic binning, occupancy estimation and the
receivers (coded demixing with an optional SIC outer loop, and the TIN/SIC
baselines for independent classes).
"""
import dataclasses
import functools
import logging
import math
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from coded_demixing.ura.amp import amp_decode
from coded_demixing.ura.constants import (DEFAULTS, MAX_BINID_POWER_FRACTION, OCCUPANCY_METHODS, RECEIVER_MODES,
                                          SENSING_KINDS)
from coded_demixing.ura.exceptions import (LengthMismatchError, OccupancyMethodError, PreconditionError,
                                           ReceiverModeError)
from coded_demixing.ura.extraction import DecodedList, ExtractionConfig, extract_group, merge_and_truncate
from coded_demixing.ura.graph import build_graph, encode
from coded_demixing.ura.helper import bits_to_int, sparse_codeword
from coded_demixing.ura.sensing import StackedOperator, make_operator

LOGGER = logging.getLogger(__name__)


def power_from_ebno(ebno_db, n, w):
    """Per-channel-use power P from Eb/N0 = n P / (2 w)."""
    return 2.0 * w * 10 ** (ebno_db / 10.0) / n


def amplitude_from_ebno(ebno_db, n, w, power_fraction, sections):
    """Per-section amplitude d so that L columns of unit norm carry power_fraction * n P."""
    power = power_from_ebno(ebno_db, n, w)
    return math.sqrt(power_fraction * n * power / sections)


@dataclasses.dataclass(frozen=True)
class GroupConfig:
    """
    One codebook: outer graph, sensing operator and user count. The graph and
    the operator are rebuilt from their seeds on demand and never pickled.
    """
    group_id: int
    users: int
    section_bits: int
    sections: int
    rows: int
    rate: Fraction = Fraction(1, 2)
    sensing: str = 'gaussian'
    sensing_seed: int = 0
    graph_seed: int = 0
    max_check_degree: int = DEFAULTS['GRAPH_MAX_CHECK_DEGREE']
    max_tries: int = 1000
    embed: bool = False
    amplitude: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, 'rate', Fraction(self.rate))
        if self.sensing not in SENSING_KINDS:
            raise PreconditionError("Unknown sensing kind %r" % self.sensing)
        if self.users < 0:
            raise PreconditionError("User count must be nonnegative")

    def __getstate__(self):
        state = dict(self.__dict__)
        state.pop('graph', None)
        state.pop('operator', None)
        return state

    @functools.cached_property
    def graph(self):
        return build_graph(self.sections, self.section_bits, self.rate, self.graph_seed,
                           max_check_degree=self.max_check_degree, max_tries=self.max_tries)

    @functools.cached_property
    def operator(self):
        return make_operator(self.sensing, self.rows, self.section_bits, self.sections, self.sensing_seed,
                             embed=self.embed)

    @property
    def message_bits(self):
        return self.graph.info_bits

    def codeword(self, message):
        return encode(self.graph, message)

    def transmit(self, codeword):
        """Unscaled A_g m for the sparse image of `codeword`."""
        return self.operator.forward(sparse_codeword(codeword, self.graph.section_size))


@dataclasses.dataclass(frozen=True)
class BinningConfig:
    bins: int = 1
    binid_power_fraction: float = DEFAULTS['BINID_POWER_FRACTION']
    occupancy_estimator: str = 'lmmse'
    known_total: bool = True
    binid_uses_count: bool = False

    def __post_init__(self):
        if self.bins < 1 or self.bins & (self.bins - 1):
            raise PreconditionError("Bin count must be a power of two, got %r" % self.bins)
        if not 0 <= self.binid_power_fraction <= MAX_BINID_POWER_FRACTION:
            raise PreconditionError("Bin-ID power fraction %r outside [0, %s]" %
                                    (self.binid_power_fraction, MAX_BINID_POWER_FRACTION))
        if self.occupancy_estimator not in OCCUPANCY_METHODS:
            raise OccupancyMethodError("Unknown occupancy estimator %r" % self.occupancy_estimator)
        if self.occupancy_estimator == 'lmmse' and not self.known_total:
            raise OccupancyMethodError("The LMMSE estimator needs a known user count")

    @property
    def enabled(self):
        return self.bins > 1

    @property
    def bin_bits(self):
        return self.bins.bit_length() - 1


@dataclasses.dataclass(frozen=True)
class AmpSettings:
    iterations: int = DEFAULTS['AMP_ITERATIONS']
    list_slack: int = DEFAULTS['LIST_SLACK']
    bp_rounds: int = DEFAULTS['DENOISER_BP_ROUNDS']
    extraction_rounds: int = DEFAULTS['EXTRACTION_BP_ROUNDS']
    bp_enabled: bool = True
    tau_floor: float = DEFAULTS['TAU_FLOOR']
    sic_keep_fraction: float = 0.7

    @property
    def extraction(self):
        return ExtractionConfig(delta=self.list_slack, bp_rounds=self.extraction_rounds)


@dataclasses.dataclass(frozen=True)
class OccupancyEstimate:
    counts: Tuple[int, ...]
    method: str = 'lmmse'

    @property
    def total(self):
        return int(sum(self.counts))


@dataclasses.dataclass
class TransmitFrame:
    group: int
    codeword: np.ndarray
    binid_part: np.ndarray
    payload_part: np.ndarray

    @property
    def energy(self):
        return float(np.dot(self.binid_part, self.binid_part) + np.dot(self.payload_part, self.payload_part))


@dataclasses.dataclass(frozen=True)
class Scenario:
    """
    A complete simulation setup. With binning, `groups` holds one group per
    bin, each carrying the total user count K; otherwise each group is
    an independent class with its own user count.
    """
    groups: Tuple[GroupConfig, ...]
    n: int
    ebno_db: float = 2.5
    binning: BinningConfig = BinningConfig()
    amp: AmpSettings = AmpSettings()
    mode: str = 'coded_demixing'
    sic_outer: bool = False
    noise: bool = True
    trials: int = 100
    seed: int = 0
    name: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'groups', tuple(self.groups))
        if self.mode not in RECEIVER_MODES:
            raise ReceiverModeError("Unknown receiver mode %r" % self.mode)
        if self.binning.enabled and len(self.groups) != self.binning.bins:
            raise PreconditionError("%d bins need %d groups, got %d" % (self.binning.bins, self.binning.bins,
                                                                         len(self.groups)))
        if any(group.rows != self.n for group in self.groups):
            raise PreconditionError("Every group must use n = %d channel uses" % self.n)
        if [group.group_id for group in self.groups] != list(range(len(self.groups))):
            raise PreconditionError("Group ids must be 0 .. G-1 in order")

    @property
    def total_users(self):
        if self.binning.enabled:
            return self.groups[0].users
        return sum(group.users for group in self.groups)

    @property
    def accounted_uses(self):
        if self.binning.enabled and self.binning.binid_uses_count:
            return self.n + self.binning.bins
        return self.n

    def power(self, group):
        return power_from_ebno(self.ebno_db, self.accounted_uses, group.message_bits)

    @property
    def payload_fraction(self):
        return 1.0 - self.binning.binid_power_fraction if self.binning.enabled else 1.0

    def amplitude(self, group):
        if group.amplitude is not None:
            return float(group.amplitude)
        return math.sqrt(self.payload_fraction * self.n * self.power(group) / group.sections)

    def amplitudes(self):
        return [self.amplitude(group) for group in self.groups]

    @property
    def binid_power(self):
        """Energy of the single bin-ID symbol each user sends."""
        if not self.binning.enabled:
            return 0.0
        return self.binning.binid_power_fraction * self.n * self.power(self.groups[0])

    def encode(self, message, group=None):
        """
        Transmit frame for one user. With binning the bin is the integer value
        of the first bin bits; otherwise `group` names the class (0 if omitted).
        """
        message = np.asarray(message, dtype=np.int64).ravel()
        if self.binning.enabled:
            if message.size < self.binning.bin_bits:
                raise LengthMismatchError("Message shorter than the %d bin bits" % self.binning.bin_bits)
            group = bits_to_int(message[:self.binning.bin_bits])
        elif group is None:
            group = 0
        config = self.groups[group]
        return encode_user(message, config, self.binning, amplitude=self.amplitude(config),
                           binid_amplitude=math.sqrt(self.binid_power))

    def with_ebno(self, ebno_db):
        return dataclasses.replace(self, ebno_db=float(ebno_db))

    def with_users(self, users):
        groups = [dataclasses.replace(group, users=int(users)) for group in self.groups]
        return dataclasses.replace(self, groups=tuple(groups))

    def with_mode(self, mode):
        return dataclasses.replace(self, mode=mode)

    def to_dict(self):
        data = dataclasses.asdict(self)
        for group in data['groups']:
            group['rate'] = str(group['rate'])
        return data


def encode_user(message, group, binning, amplitude=None, binid_amplitude=0.0):
    """
    Maps a user's message to its transmit frame in `group`. The payload is
    scaled by `amplitude` (the group's own by default). With binning the
    leading bin bits must name `group`, and the bin-ID part carries
    `binid_amplitude` at that bin.
    """
    message = np.asarray(message, dtype=np.int64).ravel()
    if message.size != group.message_bits:
        raise LengthMismatchError("Group %d expects %d message bits, got %d" % (group.group_id, group.message_bits,
                                                                                 message.size))
    if amplitude is None:
        amplitude = 1.0 if group.amplitude is None else group.amplitude

    codeword = group.codeword(message)
    payload = amplitude * group.transmit(codeword)
    binid = np.zeros(binning.bins if binning.enabled else 0)
    if binning.enabled:
        target = bits_to_int(message[:binning.bin_bits])
        if target != group.group_id:
            raise PreconditionError("Message belongs to bin %d, not group %d" % (target, group.group_id))
        binid[target] = binid_amplitude
    return TransmitFrame(group=group.group_id, codeword=codeword, binid_part=binid, payload_part=payload)


def estimate_occupancy(y_binid, total, binid_power, method='lmmse', true_counts=None):
    """
    Per-bin user counts from the bin-ID observation y = sqrt(P) k + N(0, I).
    `lmmse` uses the multinomial prior of uniformly chosen bins and needs the
    total; `round` scales and rounds each entry; `oracle` returns `true_counts`.
    """
    y_binid = np.asarray(y_binid, dtype=float).ravel()
    bins = y_binid.size
    if method not in OCCUPANCY_METHODS:
        raise OccupancyMethodError("Unknown occupancy estimator %r" % method)

    if method == 'oracle':
        if true_counts is None:
            raise OccupancyMethodError("The oracle estimator needs the true counts")
        return OccupancyEstimate(counts=tuple(int(k) for k in true_counts), method=method)

    gain = math.sqrt(binid_power)
    if gain <= 0:
        raise PreconditionError("Bin-ID power must be positive to estimate occupancy")

    if method == 'round':
        counts = np.maximum(0, np.rint(y_binid / gain))
        return OccupancyEstimate(counts=tuple(int(k) for k in counts), method=method)

    if total is None:
        raise OccupancyMethodError("The LMMSE estimator needs a known user count")
    share = np.full(bins, 1.0 / bins)
    mean = total * share
    covariance = total * (np.diag(share) - np.outer(share, share))
    gram = gain ** 2 * covariance + np.eye(bins)
    estimate = mean + gain * covariance @ linalg.solve(gram, y_binid - gain * mean, assume_a='pos')
    counts = np.maximum(0, np.rint(estimate))
    return OccupancyEstimate(counts=tuple(int(k) for k in counts), method=method)


def prune_bins(candidates, graph, bin_id, bin_bits):
    """Drops candidates whose leading message bits do not name `bin_id`."""
    if not bin_bits:
        return list(candidates)
    kept = []
    for candidate in candidates:
        message = graph.info_to_message(candidate.codeword)
        if bits_to_int(message[:bin_bits]) == bin_id:
            kept.append(candidate)
    return kept


def _decode(y, scenario, indices, users, total, diagnostics):
    """AMP over the groups in `indices` jointly, then extraction, pruning and merge."""
    groups = [scenario.groups[g] for g in indices]
    graphs = [group.graph for group in groups]
    stack = StackedOperator([(group.operator, scenario.amplitude(group)) for group in groups])
    settings = scenario.amp
    result = amp_decode(y, stack, graphs, users, iterations=settings.iterations, rounds=settings.bp_rounds,
                        bp_enabled=settings.bp_enabled, tau_floor=settings.tau_floor)

    extraction = settings.extraction
    lists = []
    for position, group in enumerate(groups):
        candidates = extract_group(result.states[position], result.priors[position], group.graph,
                                   users[position], extraction, diagnostics)
        if scenario.binning.enabled:
            candidates = prune_bins(candidates, group.graph, group.group_id, scenario.binning.bin_bits)
        lists.append(candidates)

    diagnostics.setdefault('passes', []).append({
        'groups': [group.group_id for group in groups],
        'users': [int(k) for k in users],
        'tau_trace': result.tau_trace,
        'iterations': result.diagnostics,
        'diverged': result.diverged,
    })
    bins = [group.group_id if scenario.binning.enabled else 0 for group in groups]
    return merge_and_truncate(lists, total, graphs, group_ids=[group.group_id for group in groups], bins=bins)


def _cancel(y, scenario, entries):
    """Subtracts the re-encoded contributions of decoded entries from y."""
    residual = np.array(y, dtype=float)
    for entry in entries:
        group = scenario.groups[entry.group]
        residual -= scenario.amplitude(group) * group.transmit(entry.codeword)
    return residual


def _ordered(entries, total):
    unique = {}
    for entry in entries:
        if entry.key not in unique or entry.score > unique[entry.key].score:
            unique[entry.key] = entry
    ordered = sorted(unique.values(), key=lambda e: (-e.score, e.group, e.message))
    return DecodedList(entries=ordered[:total])


def run_receiver(y, scenario, y_binid=None, mode=None, sic_outer=None, true_counts=None, diagnostics=None):
    """
    Decodes the payload observation `y` (and, with binning, the bin-ID
    observation `y_binid`) into a list of at most K messages.
    """
    mode = scenario.mode if mode is None else mode
    sic_outer = scenario.sic_outer if sic_outer is None else sic_outer
    diagnostics = {} if diagnostics is None else diagnostics
    binning = scenario.binning
    count = len(scenario.groups)

    if mode not in RECEIVER_MODES:
        raise ReceiverModeError("Unknown receiver mode %r" % mode)
    if sic_outer and mode != 'coded_demixing':
        raise ReceiverModeError("The SIC outer loop only applies to coded demixing")
    if mode != 'coded_demixing' and binning.enabled:
        raise ReceiverModeError("The %s baseline decodes independent classes, not bins" % mode)
    if mode == 'sic' and count != 2:
        raise ReceiverModeError("The SIC baseline needs exactly two classes, got %d" % count)

    if binning.enabled:
        if y_binid is None and binning.occupancy_estimator != 'oracle':
            raise PreconditionError("Binning needs the bin-ID observation")
        known = scenario.total_users if binning.known_total else None
        occupancy = estimate_occupancy(y_binid if y_binid is not None else np.zeros(binning.bins), known,
                                       scenario.binid_power, binning.occupancy_estimator, true_counts)
        users = list(occupancy.counts)
        total = known if known is not None else occupancy.total
        diagnostics['occupancy'] = list(occupancy.counts)
    else:
        users = [group.users for group in scenario.groups]
        total = sum(users)

    indices = list(range(count))
    if mode == 'tin':
        entries = []
        for g in indices:
            entries += _decode(y, scenario, [g], [users[g]], users[g], diagnostics).entries
        return _ordered(entries, total)

    if mode == 'sic':
        first = _decode(y, scenario, [0], [users[0]], users[0], diagnostics)
        second = _decode(_cancel(y, scenario, first), scenario, [1], [users[1]], users[1], diagnostics)
        return _ordered(first.entries + second.entries, total)

    decoded = _decode(y, scenario, indices, users, total, diagnostics)
    if not sic_outer:
        return decoded

    keep = math.ceil(scenario.amp.sic_keep_fraction * total)
    kept = decoded.entries[:keep]
    remaining = list(users)
    for entry in kept:
        remaining[entry.group] = max(0, remaining[entry.group] - 1)
    LOGGER.debug("SIC outer loop keeps %d of %d messages", len(kept), len(decoded))
    second = _decode(_cancel(y, scenario, kept), scenario, indices, remaining, total - len(kept), diagnostics)
    return _ordered(kept + second.entries, total)
