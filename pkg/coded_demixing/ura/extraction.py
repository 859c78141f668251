"""
Codeword extraction from final AMP states and cross-group list assembly.
"""
import dataclasses
import logging
from typing import List, Tuple

import numpy as np

from coded_demixing.ura.bp import BeliefPropagation
from coded_demixing.ura.constants import DEFAULTS, TIE_TOLERANCE
from coded_demixing.ura.exceptions import PreconditionError

LOGGER = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class ExtractionConfig:
    delta: int = DEFAULTS['LIST_SLACK']
    bp_rounds: int = DEFAULTS['EXTRACTION_BP_ROUNDS']
    likelihood_kind: str = 'product_of_normalized_beliefs'

    def __post_init__(self):
        if self.delta < 0:
            raise PreconditionError("List slack must be nonnegative, got %r" % self.delta)
        if self.bp_rounds < 0:
            raise PreconditionError("Extraction BP rounds must be nonnegative, got %r" % self.bp_rounds)


@dataclasses.dataclass(frozen=True)
class Candidate:
    codeword: Tuple[int, ...]
    score: float
    root: int = 0


@dataclasses.dataclass(frozen=True)
class DecodedEntry:
    message: Tuple[int, ...]
    group: int
    bin: int
    score: float
    codeword: Tuple[int, ...] = ()

    @property
    def key(self):
        return self.group, self.message


@dataclasses.dataclass
class DecodedList:
    entries: List[DecodedEntry] = dataclasses.field(default_factory=list)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def messages(self):
        return {entry.message for entry in self.entries}

    def for_group(self, group):
        return [entry for entry in self.entries if entry.group == group]


def _extraction_locals(state, priors):
    """AMP output per section, with the prior standing in for sections the state left empty."""
    local = np.array(state, dtype=float)
    if priors is not None:
        empty = ~(local > 0).any(axis=1)
        local[empty] = np.asarray(priors, dtype=float)[empty]
    return local


def hard_decisions(marginals, local):
    """
    Per-section argmax of the BP marginals. Values within TIE_TOLERANCE of a
    section's maximum are tied; a tie goes to the larger local AMP value and
    then to the lower index.
    """
    marginals = np.asarray(marginals, dtype=float)
    top = marginals.max(axis=1, keepdims=True)
    tied = marginals >= top * (1.0 - TIE_TOLERANCE)
    return np.where(tied, np.asarray(local, dtype=float), -np.inf).argmax(axis=1)


def extract_group(state, priors, graph, users, config=None, diagnostics=None):
    """
    Root enumeration over the `users + delta` largest entries of the first
    section. Each root is pinned to its basis vector, BP spreads it across
    the graph and the per-section hard decision (see `hard_decisions`) is
    kept when every check holds.
    Returns candidates sorted by decreasing score, one per distinct codeword.
    """
    config = config or ExtractionConfig()
    if users < 0:
        raise PreconditionError("User count must be nonnegative, got %r" % users)
    if users == 0:
        return []

    state = np.asarray(state, dtype=float)
    base = _extraction_locals(state, priors)
    count = min(users + config.delta, graph.section_size)
    roots = np.argsort(-state[0], kind='stable')[:count]

    best = {}
    inconsistent = 0
    for root in roots:
        local = base.copy()
        local[0] = 0.0
        local[0, root] = 1.0
        marginals = BeliefPropagation(graph, local).run(config.bp_rounds).marginals()
        codeword = hard_decisions(marginals, local)
        if not graph.is_codeword(codeword):
            inconsistent += 1
            continue
        with np.errstate(divide='ignore'):
            score = float(np.log(marginals[np.arange(graph.num_sections), codeword]).sum())
        key = tuple(int(c) for c in codeword)
        if key not in best or score > best[key].score:
            best[key] = Candidate(codeword=key, score=score, root=int(root))

    if inconsistent:
        LOGGER.debug("Dropped %d parity-inconsistent candidate(s) of %d roots", inconsistent, len(roots))
    if diagnostics is not None:
        diagnostics['inconsistent'] = diagnostics.get('inconsistent', 0) + inconsistent
    return sorted(best.values(), key=lambda c: (-c.score, c.codeword))


def merge_and_truncate(lists, total, graphs, group_ids=None, bins=None):
    """
    Pools per-group candidate lists, keeps the `total` best by score (ties
    broken by group, then message) and maps codewords back to message bits.
    """
    group_ids = list(range(len(lists))) if group_ids is None else list(group_ids)
    bins = list(group_ids) if bins is None else list(bins)
    entries = {}
    for position, (candidates, graph) in enumerate(zip(lists, graphs)):
        for candidate in candidates:
            message = tuple(int(bit) for bit in graph.info_to_message(candidate.codeword))
            entry = DecodedEntry(message=message, group=group_ids[position], bin=bins[position],
                                 score=candidate.score, codeword=tuple(candidate.codeword))
            if entry.key not in entries or entry.score > entries[entry.key].score:
                entries[entry.key] = entry

    ordered = sorted(entries.values(), key=lambda e: (-e.score, e.group, e.message))
    return DecodedList(entries=ordered[:max(int(total), 0)])
