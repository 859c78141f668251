import numpy as np
import pytest

from coded_demixing.ura.exceptions import PreconditionError
from coded_demixing.ura.extraction import (Candidate, ExtractionConfig, extract_group, hard_decisions,
                                           merge_and_truncate)
from coded_demixing.ura.graph import CheckNode, FactorGraph, build_graph, encode
from coded_demixing.ura.helper import sparse_codeword


def codewords(graph, count, seed):
    rng = np.random.default_rng(seed)
    return [encode(graph, rng.integers(0, 2, size=graph.info_bits)) for _ in range(count)]


def tree_graph():
    # info sections 0-2, parity 3-5, no cycles so BP marginals are exact
    return FactorGraph(6, 4, [CheckNode((0, 1, 3), (1, 3, 5)), CheckNode((3, 2, 4), (2, 7, 1)),
                              CheckNode((4, 5), (6, 1))])


def test_clean_states_give_back_every_codeword():
    graph = tree_graph()
    seed = 0
    sent = codewords(graph, 2, seed=seed)
    # with every section distinct, any mix of the two users violates some check
    while np.any(sent[0] == sent[1]):
        seed += 1
        sent = codewords(graph, 2, seed=seed)
    state = np.clip(sum(sparse_codeword(c, graph.section_size) for c in sent), 0, 1)
    priors = np.full(state.shape, 0.1)

    diagnostics = {}
    candidates = extract_group(state, priors, graph, 2, ExtractionConfig(delta=3), diagnostics)
    found = {candidate.codeword for candidate in candidates}
    assert {tuple(int(v) for v in c) for c in sent} <= found
    assert all(graph.is_codeword(candidate.codeword) for candidate in candidates)
    assert [c.score for c in candidates] == sorted((c.score for c in candidates), reverse=True)
    assert 'inconsistent' in diagnostics


def test_hard_decisions_break_ties_by_local_value_then_index():
    marginals = np.array([[0.5, 0.5, 0.0, 0.0],
                          [0.2, 0.4, 0.4 * (1 - 1e-12), 0.0],
                          [0.25, 0.25, 0.25, 0.25],
                          [0.1, 0.6, 0.3, 0.0]])
    local = np.array([[0.3, 0.7, 0.0, 0.0],
                      [0.9, 0.1, 0.5, 0.0],
                      [0.0, 0.0, 0.0, 0.0],
                      [0.0, 0.0, 1.0, 0.0]])
    assert hard_decisions(marginals, local).tolist() == [1, 2, 0, 1]


def test_best_candidate_for_one_user(graph):
    sent = codewords(graph, 1, seed=5)[0]
    state = 0.9 * sparse_codeword(sent, graph.section_size) + 0.01
    candidates = extract_group(state, None, graph, 1)
    assert candidates[0].codeword == tuple(int(v) for v in sent)
    assert -0.5 < candidates[0].score <= 0.0


def test_no_users_means_no_candidates(graph):
    state = np.ones((graph.num_sections, graph.section_size))
    assert extract_group(state, None, graph, 0) == []
    with pytest.raises(PreconditionError):
        extract_group(state, None, graph, -1)


def test_extraction_config_validation():
    with pytest.raises(PreconditionError):
        ExtractionConfig(delta=-1)
    with pytest.raises(PreconditionError):
        ExtractionConfig(bp_rounds=-2)


def test_merge_orders_deduplicates_and_truncates():
    first_graph = build_graph(8, 4, '1/2', seed=1)
    second_graph = build_graph(8, 4, '1/2', seed=2)
    a, b = codewords(first_graph, 2, seed=1)
    c, = codewords(second_graph, 1, seed=2)
    lists = [
        [Candidate(tuple(a), -0.5), Candidate(tuple(b), -3.0), Candidate(tuple(a), -0.1)],
        [Candidate(tuple(c), -1.0)],
    ]
    merged = merge_and_truncate(lists, 2, [first_graph, second_graph], group_ids=[4, 7])
    assert len(merged) == 2
    assert [entry.group for entry in merged] == [4, 7]
    assert merged.entries[0].score == -0.1
    assert merged.entries[0].message == tuple(int(v) for v in first_graph.info_to_message(a))
    assert merged.for_group(7)[0].codeword == tuple(c)

    assert len(merge_and_truncate(lists, 10, [first_graph, second_graph])) == 3
    assert len(merge_and_truncate(lists, 0, [first_graph, second_graph])) == 0


def test_merge_breaks_score_ties_by_group_then_message():
    first_graph = build_graph(8, 4, '1/2', seed=1)
    second_graph = build_graph(8, 4, '1/2', seed=2)
    first = [Candidate(tuple(word), -1.0) for word in codewords(first_graph, 3, seed=5)]
    second = [Candidate(tuple(word), -1.0) for word in codewords(second_graph, 3, seed=6)]
    graphs = [first_graph, second_graph]

    merged = merge_and_truncate([first, second], 4, graphs, group_ids=[9, 2])
    assert [entry.group for entry in merged] == [2, 2, 2, 9]
    assert [entry.message for entry in merged.entries[:3]] == sorted(entry.message for entry in merged.entries[:3])
    shuffled = merge_and_truncate([first[::-1], second[::-1]], 4, graphs, group_ids=[9, 2])
    assert shuffled.entries == merged.entries
    assert merged.entries[3].message == min(
        tuple(int(v) for v in first_graph.info_to_message(candidate.codeword)) for candidate in first)
