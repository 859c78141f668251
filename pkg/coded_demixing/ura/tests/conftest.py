import json

import pytest

from coded_demixing.ura.graph import build_graph


@pytest.fixture
def graph():
    return build_graph(8, 4, '1/2', seed=1)


@pytest.fixture
def scenario_data():
    return {
        'name': 'tiny',
        'n': 400,
        'ebno_db': 6.0,
        'noise': False,
        'groups': [{'users': 1, 'section_bits': 6, 'sections': 8, 'rate': '1/2', 'sensing_seed': 4}],
        'amp': {'iterations': 10},
        'trials': 2,
        'seed': 5,
    }


@pytest.fixture
def scenario_file(tmp_path, scenario_data):
    path = tmp_path / 'scenario.json'
    path.write_text(json.dumps(scenario_data))
    return str(path)
