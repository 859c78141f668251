"""
Monte-Carlo machinery: trial synthesis over the Gaussian multiple access
channel, error metrics, parallel sweeps with binomial confidence intervals,
CSV output and threshold search.

Every trial draws its randomness from
SeedSequence(entropy=seed, spawn_key=(point, trial)), so results do not
depend on how trials are spread over worker processes.
"""
import csv
import dataclasses
import logging
import multiprocessing
from typing import Dict, List, Optional

import numpy as np
from numpy.random import SeedSequence, default_rng
from scipy.stats import binomtest

from coded_demixing.ura.access import run_receiver
from coded_demixing.ura.constants import CONFIDENCE_LEVEL, CSV_COLUMNS, SWEEP_AXES
from coded_demixing.ura.exceptions import PreconditionError

LOGGER = logging.getLogger(__name__)

# Scenarios for the current sweep, set once per worker process by the pool initializer
WORKER_SCENARIOS = None
WORKER_SEED = None

OVERALL = 'all'


@dataclasses.dataclass
class TrialOutcome:
    sent_counts: Dict[int, int]
    missed: Dict[int, int]
    false_alarms: Dict[int, int]
    recovered_counts: Dict[int, int]
    sent: Optional[Dict[int, list]] = None
    recovered: Optional[object] = None
    diagnostics: dict = dataclasses.field(default_factory=dict)

    @property
    def diverged(self):
        if 'diverged' in self.diagnostics:
            return self.diagnostics['diverged']
        return any(p['diverged'] for p in self.diagnostics.get('passes', []))

    def summary(self):
        """Counts only, for shipping back from worker processes."""
        return dataclasses.replace(self, sent=None, recovered=None,
                                   diagnostics={'diverged': self.diverged})


def trial_seed(seed, point=0, trial=0):
    return SeedSequence(entropy=seed, spawn_key=(point, trial))


def draw_messages(scenario, rng):
    """
    Uniform messages per class, or K uniform messages whose leading bits pick
    the bin. Duplicate messages are redrawn.
    """
    if scenario.binning.enabled:
        plan = [(None, scenario.groups[0].message_bits, scenario.total_users)]
    else:
        plan = [(group.group_id, group.message_bits, group.users) for group in scenario.groups]

    messages = []
    for group, width, users in plan:
        seen = set()
        while len(seen) < users:
            bits = tuple(int(b) for b in rng.integers(0, 2, size=width))
            if bits in seen:
                LOGGER.info("Duplicate message drawn in group %s, resampling", group)
                continue
            seen.add(bits)
            messages.append((group, bits))
    return messages


def synthesize(scenario, rng):
    """Returns (messages, frames, y, y_binid) for one channel realization."""
    messages = draw_messages(scenario, rng)
    frames = [scenario.encode(bits, group) for group, bits in messages]
    y = np.zeros(scenario.n)
    y_binid = np.zeros(scenario.binning.bins if scenario.binning.enabled else 0)
    for frame in frames:
        y += frame.payload_part
        y_binid += frame.binid_part
    if scenario.noise:
        y += rng.standard_normal(y.size)
        y_binid += rng.standard_normal(y_binid.size)
    return messages, frames, y, y_binid


def run_trial(scenario, seed):
    """One full transmit/receive cycle, scored against the sent messages."""
    rng = default_rng(seed)
    messages, frames, y, y_binid = synthesize(scenario, rng)

    sent = {group.group_id: [] for group in scenario.groups}
    for (_, bits), frame in zip(messages, frames):
        sent[frame.group].append(bits)
    true_counts = [len(sent[g]) for g in sorted(sent)]

    diagnostics = {}
    recovered = run_receiver(y, scenario, y_binid=y_binid, true_counts=true_counts, diagnostics=diagnostics)

    recovered_keys = {entry.key for entry in recovered}
    sent_keys = {(group, bits) for group, messages_ in sent.items() for bits in messages_}
    missed = {group: sum((group, bits) not in recovered_keys for bits in messages_)
              for group, messages_ in sent.items()}
    false_alarms = {group: 0 for group in sent}
    recovered_counts = {group: 0 for group in sent}
    for entry in recovered:
        recovered_counts[entry.group] += 1
        false_alarms[entry.group] += entry.key not in sent_keys
    return TrialOutcome(sent_counts={group: len(m) for group, m in sent.items()}, missed=missed,
                        false_alarms=false_alarms, recovered_counts=recovered_counts, sent=sent,
                        recovered=recovered, diagnostics=diagnostics)


@dataclasses.dataclass
class ErrorCount:
    errors: int = 0
    total: int = 0

    @property
    def rate(self):
        return self.errors / self.total if self.total else 0.0

    def interval(self, level=CONFIDENCE_LEVEL):
        return confidence_interval(self.errors, self.total, level)


def confidence_interval(errors, total, level=CONFIDENCE_LEVEL):
    """Wilson score interval for errors out of total Bernoulli draws."""
    if total <= 0:
        return 0.0, 1.0
    result = binomtest(k=int(errors), n=int(total)).proportion_ci(confidence_level=level, method='wilson')
    return float(result.low), float(result.high)


def compute_pupe(outcomes):
    """Missed-message counts per group and overall (key `OVERALL`)."""
    counts = {}
    overall = ErrorCount()
    for outcome in outcomes:
        for group, sent in outcome.sent_counts.items():
            entry = counts.setdefault(group, ErrorCount())
            entry.errors += outcome.missed[group]
            entry.total += sent
            overall.errors += outcome.missed[group]
            overall.total += sent
    counts[OVERALL] = overall
    return counts


def md_fa_counts(outcomes, group=OVERALL):
    """Missed-detection and false-alarm counts, for one group or all of them."""
    missed = ErrorCount()
    false_alarms = ErrorCount()
    for outcome in outcomes:
        groups = list(outcome.sent_counts) if group == OVERALL else [group]
        for g in groups:
            missed.errors += outcome.missed.get(g, 0)
            missed.total += outcome.sent_counts.get(g, 0)
            false_alarms.errors += outcome.false_alarms.get(g, 0)
            false_alarms.total += outcome.recovered_counts.get(g, 0)
    return missed, false_alarms


def compute_md_fa(outcomes):
    """(Pr(MD), Pr(FA)); an empty recovered list counts every message as missed."""
    missed, false_alarms = md_fa_counts(outcomes)
    return missed.rate, false_alarms.rate


@dataclasses.dataclass
class SweepRow:
    axis_value: float
    group_id: object
    pupe: float
    md: float
    fa: float
    trials: int
    ci_lo: float
    ci_hi: float
    mode: str
    G: int
    errors: int = 0
    sent: int = 0

    def as_row(self):
        return [self.axis_value, self.group_id, self.pupe, self.md, self.fa, self.trials, self.ci_lo,
                self.ci_hi, self.mode, self.G]


@dataclasses.dataclass
class SweepResult:
    scenario: object
    axis: str
    points: List[float]
    rows: List[SweepRow] = dataclasses.field(default_factory=list)
    diverged: int = 0

    def overall(self):
        return [row for row in self.rows if row.group_id == OVERALL]


def point_scenario(scenario, axis, value):
    if axis == 'ebno':
        return scenario.with_ebno(value)
    return scenario.with_users(int(value))


def summarize_point(scenario, value, outcomes):
    """Rows for one sweep point, per group then overall, with CIs from raw counts."""
    rows = []
    pupe = compute_pupe(outcomes)
    groups = sorted(key for key in pupe if key != OVERALL) + [OVERALL]
    for group in groups:
        counts = pupe[group]
        missed, false_alarms = md_fa_counts(outcomes, group)
        low, high = counts.interval()
        rows.append(SweepRow(axis_value=value, group_id=group, pupe=counts.rate, md=missed.rate,
                             fa=false_alarms.rate, trials=len(outcomes), ci_lo=low, ci_hi=high,
                             mode=scenario.mode, G=scenario.binning.bins, errors=counts.errors,
                             sent=counts.total))
    return rows


def init_worker(scenarios, seed):
    global WORKER_SCENARIOS, WORKER_SEED
    WORKER_SCENARIOS = scenarios
    WORKER_SEED = seed


def single_run(job):
    point, trial = job
    return run_trial(WORKER_SCENARIOS[point], trial_seed(WORKER_SEED, point, trial)).summary()


def run_jobs(scenarios, seed, jobs, workers=1):
    """Runs (point, trial) jobs and returns their summaries in job order."""
    if workers <= 1:
        init_worker(scenarios, seed)
        return [single_run(job) for job in jobs]

    LOGGER.info('Pool created with %d workers.', workers)
    with multiprocessing.Pool(processes=workers, initializer=init_worker, initargs=(scenarios, seed)) as pool:
        results = pool.map(single_run, jobs, chunksize=max(1, len(jobs) // (4 * workers)))
    LOGGER.info('Pool closed.')
    return results


def sweep(scenario, axis, points, trials=None, seed=None, workers=1):
    if axis not in SWEEP_AXES:
        raise PreconditionError("Unknown sweep axis %r, expected one of %s" % (axis, SWEEP_AXES))
    trials = scenario.trials if trials is None else int(trials)
    seed = scenario.seed if seed is None else seed
    points = [float(value) if axis == 'ebno' else int(value) for value in points]
    scenarios = [point_scenario(scenario, axis, value) for value in points]

    jobs = [(p, t) for p in range(len(points)) for t in range(trials)]
    outcomes = run_jobs(scenarios, seed, jobs, workers)

    result = SweepResult(scenario=scenario, axis=axis, points=points)
    for p, value in enumerate(points):
        chunk = outcomes[p * trials:(p + 1) * trials]
        result.rows += summarize_point(scenarios[p], value, chunk)
        result.diverged += sum(outcome.diagnostics.get('diverged', False) for outcome in chunk)
        overall = result.rows[-1]
        LOGGER.info("%s=%s: PUPE %.4g [%.4g, %.4g] over %d trials", axis, value, overall.pupe, overall.ci_lo,
                    overall.ci_hi, trials)
    return result


def write_csv(result, stream):
    """Fixed column order; floats through repr so reruns are byte-identical."""
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(CSV_COLUMNS)
    for row in result.rows:
        writer.writerow([repr(value) if isinstance(value, float) else value for value in row.as_row()])


@dataclasses.dataclass
class ThresholdResult:
    ebno_db: float
    low: float
    high: float
    target: float
    resolved: bool
    evaluations: List[dict] = dataclasses.field(default_factory=list)


def pupe_estimator(scenario, trials=None, seed=None, workers=1):
    """Estimator for `find_threshold`: overall (missed, sent) counts at one Eb/N0."""
    def estimate(ebno_db):
        overall = sweep(scenario, 'ebno', [ebno_db], trials=trials, seed=seed, workers=workers).overall()[0]
        return overall.errors, overall.sent
    return estimate


def find_threshold(scenario, target=0.05, tolerance_db=0.1, low=0.0, high=6.0, estimator=None, trials=None,
                   seed=None, workers=1):
    """
    Bisection on Eb/N0 for the point where PUPE crosses `target`. A midpoint
    moves a bracket end only when its confidence interval lies entirely on
    one side of the target; otherwise the search stops unresolved.
    """
    estimator = estimator or pupe_estimator(scenario, trials=trials, seed=seed, workers=workers)
    evaluations = []

    def evaluate(ebno_db):
        errors, total = estimator(ebno_db)
        ci_lo, ci_hi = confidence_interval(errors, total)
        record = {'ebno_db': ebno_db, 'pupe': errors / total if total else 0.0, 'ci_lo': ci_lo, 'ci_hi': ci_hi}
        evaluations.append(record)
        LOGGER.info("Threshold search: %.4f dB -> PUPE %.4g [%.4g, %.4g]", ebno_db, record['pupe'], ci_lo, ci_hi)
        return record

    if evaluate(high)['ci_lo'] > target:
        raise PreconditionError("PUPE stays above %s at %.2f dB" % (target, high))
    if evaluate(low)['ci_hi'] < target:
        raise PreconditionError("PUPE is already below %s at %.2f dB" % (target, low))

    while high - low > tolerance_db:
        middle = (low + high) / 2.0
        record = evaluate(middle)
        if record['ci_lo'] > target:
            low = middle
        elif record['ci_hi'] < target:
            high = middle
        else:
            return ThresholdResult(ebno_db=middle, low=low, high=high, target=target, resolved=False,
                                   evaluations=evaluations)
    return ThresholdResult(ebno_db=(low + high) / 2.0, low=low, high=high, target=target, resolved=True,
                           evaluations=evaluations)
