import pytest
from rest_framework.test import APIClient

from coded_demixing.ura.exceptions import LengthMismatchError
from coded_demixing.ura.harness import ThresholdResult, sweep
from coded_demixing.ura.models import Sweep, ThresholdRun
from coded_demixing.ura.response import api_exception_handler, envelope
from coded_demixing.ura.tests.utils import small_scenario

pytestmark = pytest.mark.django_db


@pytest.fixture
def client():
    return APIClient()


@pytest.fixture
def saved_sweep():
    result = sweep(small_scenario(users=1), 'ebno', [4.0, 6.0], trials=2, seed=1)
    return Sweep.from_result(result)


def test_sweep_is_persisted_with_its_rows(saved_sweep):
    assert saved_sweep.points.count() == 4
    assert set(saved_sweep.points.values_list('group_id', flat=True)) == {'0', 'all'}
    assert saved_sweep.scenario['groups'][0]['rate'] == '1/2'
    assert saved_sweep.trials == 2
    assert str(saved_sweep).startswith('small')


def test_list_sweeps(client, saved_sweep):
    response = client.get('/v1/sweeps/')
    assert response.status_code == 200
    body = response.json()
    assert body['status'] == 200
    assert [item['id'] for item in body['data']['sweeps']] == [saved_sweep.pk]

    assert client.get('/v1/sweeps/', {'mode': 'tin'}).json()['data']['sweeps'] == []
    assert len(client.get('/v1/sweeps/', {'mode': 'all', 'axis': 'EBNO'}).json()['data']['sweeps']) == 1


def test_sweep_detail_lists_points(client, saved_sweep):
    body = client.get('/v1/sweeps/%d/' % saved_sweep.pk).json()
    points = body['data']['sweep']['points']
    assert len(points) == 4
    assert {point['axis_value'] for point in points} == {4.0, 6.0}
    assert all(0.0 <= point['ci_lo'] <= point['pupe'] <= point['ci_hi'] <= 1.0 for point in points)


def test_missing_sweep_uses_error_envelope(client):
    response = client.get('/v1/sweeps/999/')
    assert response.status_code == 404
    body = response.json()
    assert body['status'] == 404
    assert body['errors']['general_errors']


def test_list_thresholds(client):
    scenario = small_scenario()
    ThresholdRun.from_result(scenario, ThresholdResult(ebno_db=2.4, low=2.3, high=2.5, target=0.05, resolved=True,
                                                       evaluations=[{'ebno_db': 2.4, 'pupe': 0.05}]))
    runs = client.get('/v1/thresholds/', {'mode': 'coded_demixing'}).json()['data']['thresholds']
    assert len(runs) == 1
    assert runs[0]['ebno_db'] == 2.4
    assert runs[0]['evaluations'][0]['pupe'] == 0.05


def test_run_a_trial(client, scenario_data):
    response = client.post('/v1/trials/', {'scenario': scenario_data, 'seed': 3}, format='json')
    assert response.status_code == 201, response.content
    trial = response.json()['data']['trial']
    assert trial['missed'] == {'0': 0}
    assert trial['sent_counts'] == {'0': 1}
    assert len(trial['recovered']) == 1
    assert set(trial['recovered'][0]['message']) <= {'0', '1'}
    assert trial['diagnostics']['passes'][0]['groups'] == [0]


def test_invalid_trial_request_reports_form_errors(client, scenario_data):
    scenario_data['groups'][0]['rate'] = 'half'
    response = client.post('/v1/trials/', {'scenario': scenario_data}, format='json')
    assert response.status_code == 400
    body = response.json()
    assert 'scenario' in body['errors']['form_errors']


def test_unknown_url_uses_error_envelope(client):
    response = client.get('/v2/nowhere/')
    assert response.status_code == 404
    body = response.json()
    assert body['status'] == 404
    assert body['errors'] == {'general_errors': ['Not found.'], 'form_errors': {}}
    assert body['data'] == {}


def test_decoding_errors_become_bad_requests():
    response = api_exception_handler(LengthMismatchError("Group 0 expects 24 message bits, got 23"), {})
    assert response.status_code == 400
    assert response.data == envelope(status_code=400, general_errors=["Group 0 expects 24 message bits, got 23"])

    assert api_exception_handler(ValueError("not ours"), {}) is None
