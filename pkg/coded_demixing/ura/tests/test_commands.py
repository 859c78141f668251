import json
from io import StringIO

import pytest
from django.core.management import CommandError, call_command

from coded_demixing.ura.constants import CSV_COLUMNS
from coded_demixing.ura.models import Sweep, ThresholdRun


def run(*args):
    stdout, stderr = StringIO(), StringIO()
    call_command(*args, stdout=stdout, stderr=stderr)
    return stdout.getvalue(), stderr.getvalue()


def test_simulate_writes_csv_to_stdout(scenario_file):
    out, _ = run('simulate', '--config', scenario_file, '--points', '4', '6', '--workers', '1')
    lines = out.splitlines()
    assert lines[0] == ','.join(CSV_COLUMNS)
    assert len(lines) == 1 + 2 * 2
    assert [line.split(',')[0] for line in lines[1:]] == ['4.0', '4.0', '6.0', '6.0']


def test_simulate_writes_csv_file(scenario_file, tmp_path):
    target = tmp_path / 'results' / 'sweep.csv'
    out, _ = run('simulate', '--config', scenario_file, '--points', '6', '--trials', '1', '--out', str(target))
    assert out == ''
    assert target.read_text().splitlines()[0] == ','.join(CSV_COLUMNS)


@pytest.mark.django_db
def test_simulate_can_save(scenario_file):
    _, err = run('simulate', '--config', scenario_file, '--axis', 'k', '--points', '1', '--save')
    sweep = Sweep.objects.get()
    assert sweep.axis == 'k'
    assert sweep.name == 'tiny'
    assert sweep.points.count() == 2
    assert 'Saved sweep #%d.' % sweep.pk in err


def test_simulate_rejects_missing_config(tmp_path):
    with pytest.raises(CommandError):
        run('simulate', '--config', str(tmp_path / 'absent.json'), '--points', '1')


def test_simulate_rejects_invalid_scenario(tmp_path, scenario_data):
    scenario_data['binning'] = {'bins': 3}
    path = tmp_path / 'bad.json'
    path.write_text(json.dumps(scenario_data))
    with pytest.raises(CommandError):
        run('simulate', '--config', str(path), '--points', '1')


@pytest.mark.django_db
def test_threshold_stops_when_the_interval_straddles_the_target(scenario_file):
    # two error-free trials leave the Wilson interval far wider than the target
    out, _ = run('threshold', '--config', scenario_file, '--save')
    assert out.strip() == '3.0000 dB in [0.0000, 6.0000] at PUPE 0.05, unresolved (CI straddles the target)'
    run_ = ThresholdRun.objects.get()
    assert not run_.resolved
    assert [record['ebno_db'] for record in run_.evaluations] == [6.0, 0.0, 3.0]


def test_threshold_target_must_be_a_rate(scenario_file):
    with pytest.raises(CommandError):
        run('threshold', '--config', scenario_file, '--target', '1.5')


def test_trial_prints_the_outcome(scenario_file):
    out, _ = run('trial', '--config', scenario_file, '--seed', '2')
    records = [json.loads(line) for line in out.splitlines()]
    assert len(records) == 1
    assert records[0]['event'] == 'outcome'
    assert records[0]['missed'] == {'0': 0}
    assert 'diagnostics' not in records[0]


def test_trial_verbose_emits_json_lines(scenario_file):
    out, _ = run('trial', '--config', scenario_file, '--verbose')
    records = [json.loads(line) for line in out.splitlines()]
    events = [record['event'] for record in records]
    assert events[0] == 'amp'
    assert events[-2:] == ['extraction', 'outcome']
    assert 'pass' in events

    steps = [record for record in records if record['event'] == 'amp']
    assert [step['iteration'] for step in steps] == list(range(1, len(steps) + 1))
    assert all(step['tau'] > 0 and step['pass'] == 0 and step['groups'] == [0] for step in steps)
