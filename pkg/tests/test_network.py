from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curricula.bitdata import BitMatrix, bitmatrix_from_rows
from curricula.errors import ParseError
from curricula.network import (
    Move,
    NetworkStructure,
    check_feedforward,
    evaluate,
    format_network,
    parse_network,
    propose_move,
    random_network,
)
from curricula.problems import all_patterns


def naive_outputs(net, row):
    """Per-example recursive evaluation, one node at a time."""
    l = net.n_inputs

    @lru_cache(maxsize=None)
    def node(k):
        if k < l:
            return int(row[k])
        a, b = net.sources[k - l]
        return 1 - (node(int(a)) & node(int(b)))

    return [node(l + g) for g in range(net.n_gates - net.n_outputs, net.n_gates)]


def test_single_gate_truth_table():
    net = NetworkStructure(2, 1, [[0, 1]])
    out = evaluate(net, bitmatrix_from_rows([[1, 1], [1, 0], [0, 0]]))
    assert out.to_rows() == [[0], [1], [1]]


def test_zero_rows():
    net = random_network(3, 2, 10, seed=0)
    out = evaluate(net, BitMatrix.zeros(0, 3))
    assert out.shape == (0, 2)


def test_column_mismatch():
    net = random_network(3, 1, 4, seed=0)
    with pytest.raises(ValueError):
        evaluate(net, BitMatrix.zeros(2, 4))


def test_random_net_matches_naive_all_patterns():
    net = random_network(6, 3, 20, seed=11)
    x = all_patterns(6)
    out = evaluate(net, BitMatrix.from_array(x)).to_array()
    expected = np.array([naive_outputs(net, r) for r in x])
    assert np.array_equal(out, expected)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(1, 4), st.integers(0, 40), st.integers(0, 2**32))
def test_bit_parallel_equals_naive(l, m, extra, seed):
    net = random_network(l, m, m + extra, seed)
    x = all_patterns(l)
    out = evaluate(net, BitMatrix.from_array(x)).to_array()
    expected = np.array([naive_outputs(net, r) for r in x])
    assert np.array_equal(out, expected)


def test_random_network_single_gate():
    for seed in range(20):
        net = random_network(2, 1, 1, seed)
        assert set(net.sources[0]) <= {0, 1}


def test_random_network_default_sizing_and_determinism():
    a = random_network(4, 2, 42, seed=5)
    b = random_network(4, 2, 42, seed=5)
    assert a == b and a.n_gates == 42
    assert check_feedforward(a)


def test_random_network_source_distribution():
    # gate 2 of a 3-input net draws each source from 0..4 uniformly
    draws = np.concatenate([random_network(3, 1, 3, s).sources[2] for s in range(3000)])
    freq = np.bincount(draws, minlength=5) / len(draws)
    assert np.allclose(freq, 0.2, atol=0.02)


@pytest.mark.parametrize("l, m, n_g", [(0, 1, 3), (2, 3, 2)])
def test_random_network_argument_errors(l, m, n_g):
    with pytest.raises(ValueError):
        random_network(l, m, n_g, seed=0)


def test_check_feedforward_cases():
    assert not check_feedforward(NetworkStructure(2, 1, [[0, 2]]))
    assert check_feedforward(NetworkStructure(2, 1, [[0, 1], [2, 0]]))
    assert not check_feedforward(NetworkStructure(2, 1, [[0, -1]]))
    assert not check_feedforward(NetworkStructure(2, 3, [[0, 1], [2, 0]]))


def test_gate0_moves_stay_on_inputs():
    net = NetworkStructure(3, 1, [[0, 1]])
    rng = np.random.default_rng(0)
    for _ in range(200):
        mv = propose_move(net, rng)
        assert mv.gate == 0 and mv.new_source < 3
        assert mv.new_source != mv.old_source


def test_apply_then_revert_is_identity():
    net = random_network(4, 2, 30, seed=1)
    rng = np.random.default_rng(1)
    for _ in range(50):
        mv = propose_move(net, rng)
        moved = mv.apply(net)
        assert moved != net
        assert mv.revert(moved) == net


def test_ten_thousand_moves_stay_feedforward():
    net = random_network(5, 3, 40, seed=2)
    rng = np.random.default_rng(2)
    for _ in range(10_000):
        net = propose_move(net, rng).apply(net)
        assert check_feedforward(net)


def test_move_choice_is_uniform():
    # two gates over two inputs: (gate, slot) uniform, new source uniform over the others
    net = NetworkStructure(2, 1, [[0, 0], [0, 0]])
    rng = np.random.default_rng(3)
    seen = {}
    n = 20_000
    for _ in range(n):
        mv = propose_move(net, rng)
        seen[(mv.gate, mv.slot, mv.new_source)] = seen.get((mv.gate, mv.slot, mv.new_source), 0) + 1
    # gate 0 has one alternative, gate 1 has two
    expect = {(0, s, 1): 0.25 for s in (0, 1)}
    expect.update({(1, s, k): 0.125 for s in (0, 1) for k in (1, 2)})
    assert set(seen) == set(expect)
    for key, p in expect.items():
        assert abs(seen[key] / n - p) < 0.015


def test_single_input_skips_gate0():
    net = NetworkStructure(1, 1, [[0, 0], [0, 1]])
    rng = np.random.default_rng(4)
    for _ in range(100):
        mv = propose_move(net, rng)
        assert mv.gate == 1
    with pytest.raises(ValueError):
        propose_move(NetworkStructure(1, 1, [[0, 0]]), rng)


def test_network_text_roundtrip():
    net = random_network(5, 2, 12, seed=9)
    text = format_network(net)
    assert text.splitlines()[0] == "5 2 12"
    assert parse_network(text) == net


def test_network_parse_errors():
    with pytest.raises(ParseError):
        parse_network("2 1 2\n0 1\n")
    with pytest.raises(ParseError):
        parse_network("2 1 1\n0,1\n")


def test_move_is_value():
    mv = Move(1, 0, 2, 3)
    assert mv == Move(1, 0, 2, 3)
