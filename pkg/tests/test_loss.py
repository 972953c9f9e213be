from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curricula.bitdata import bitmatrix_from_rows
from curricula.loss import (
    Curriculum,
    error_summary,
    error_summary_from_array,
    get_loss,
    loss_l1,
    loss_lgh,
    loss_llh,
    loss_lw,
)

ALL = (loss_l1, loss_lw, loss_llh, loss_lgh)


def es(rows):
    return error_summary_from_array(rows)


def error_matrices(max_n=32, max_m=8):
    return st.tuples(st.integers(1, max_n), st.integers(1, max_m), st.integers(0, 2**32), st.floats(0, 1)).map(
        lambda t: (np.random.default_rng(t[2]).random((t[0], t[1])) < t[3]).astype(np.uint8)
    )


# Independent oracles written straight from the definitions, in exact arithmetic.


def oracle_lw(e):
    n, m = e.shape
    w = [m - j for j in range(m)]
    return Fraction(sum(w[j] * int(e[i, j]) for i in range(n) for j in range(m)), n * sum(w))


def oracle_llh(e):
    n, m = e.shape
    total = 0
    for i in range(n):
        a = int(e[i, 0])
        total += a
        for k in range(1, m):
            a = int(e[i, k]) if a == 0 else 1
            total += a
    return Fraction(total, n * m)


def oracle_lgh(e):
    n, m = e.shape
    delta = [Fraction(int(e[:, j].sum()), n) for j in range(m)]
    b = [delta[0]]
    for k in range(1, m):
        b.append(delta[k] if b[-1] == 0 else Fraction(1))
    return sum(b) / m


def test_error_summary_perfect_and_worst():
    y = bitmatrix_from_rows([[0, 1, 1], [1, 0, 0]])
    s = error_summary(y, y)
    assert s.error_matrix.popcount() == 0
    assert np.all(s.per_target_error == 0)
    s = error_summary(y, y.complement())
    assert np.all(s.per_target_error == 1)


def test_error_summary_xor_example():
    y = bitmatrix_from_rows([[0, 1], [1, 0]])
    yp = bitmatrix_from_rows([[0, 0], [1, 1]])
    s = error_summary(y, yp, Curriculum.identity(2))
    assert s.error_matrix.to_rows() == [[0, 1], [0, 1]]
    assert s.per_target_error.tolist() == [0, 1]


def test_error_summary_permutes_columns():
    y = bitmatrix_from_rows([[0, 0, 0]])
    yp = bitmatrix_from_rows([[1, 0, 0]])
    s = error_summary(y, yp, Curriculum([2, 0, 1]))
    assert s.error_matrix.to_rows() == [[0, 1, 0]]


def test_error_summary_shape_checks():
    y = bitmatrix_from_rows([[0, 1]])
    with pytest.raises(ValueError):
        error_summary(y, bitmatrix_from_rows([[0, 1, 1]]))
    with pytest.raises(ValueError):
        error_summary(y, y, Curriculum([0, 1, 2]))


def test_curriculum_must_be_permutation():
    with pytest.raises(ValueError):
        Curriculum([0, 0, 1])


def test_l1_examples():
    assert loss_l1(es([[0, 0], [0, 0]])) == 0
    assert loss_l1(es([[0, 1], [1, 0]])) == 0.5
    assert loss_l1(es([[1, 1, 0]])) == pytest.approx(2 / 3)


def test_lw_examples():
    assert loss_lw(es([[1, 1]])) == 1.0
    assert loss_lw(es([[1, 0]])) == pytest.approx(2 / 3)
    assert loss_lw(es([[0, 1]])) == pytest.approx(1 / 3)


def test_llh_examples():
    assert loss_llh(es([[0, 1, 0]])) == pytest.approx(2 / 3)
    assert loss_llh(es([[1, 0, 0]])) == 1.0
    assert loss_llh(es([[0, 0, 0]])) == 0


def test_lgh_examples():
    assert loss_lgh(es([[0, 1], [0, 0]])) == 0.25
    assert loss_lgh(es([[1, 0], [0, 0]])) == 0.75
    assert loss_lgh(es([[0, 0], [0, 0]])) == 0


def test_empty_examples_rejected():
    empty = error_summary_from_array(np.zeros((0, 3), dtype=np.uint8))
    for f in ALL:
        with pytest.raises(ValueError):
            f(empty)


def test_get_loss():
    assert get_loss("lgh") is loss_lgh
    with pytest.raises(ValueError):
        get_loss("l2")


@settings(max_examples=200, deadline=None)
@given(error_matrices())
def test_losses_match_definitions(e):
    s = es(e)
    assert loss_lw(s) == float(oracle_lw(e))
    assert loss_llh(s) == float(oracle_llh(e))
    assert loss_lgh(s) == float(oracle_lgh(e))
    assert loss_l1(s) == float(Fraction(int(e.sum()), e.size))


@settings(max_examples=200, deadline=None)
@given(error_matrices())
def test_dominance_chain_and_range(e):
    s = es(e)
    l1, lw, llh, lgh = (f(s) for f in ALL)
    assert lgh >= llh >= l1
    for v in (l1, lw, llh, lgh):
        assert 0 <= v <= 1
        assert (v == 0) == (not e.any())


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 32), st.integers(1, 8))
def test_all_one_and_all_zero(n, m):
    for f in ALL:
        assert f(es(np.ones((n, m), dtype=np.uint8))) == 1
        assert f(es(np.zeros((n, m), dtype=np.uint8))) == 0
    # the chain is an equality at both extremes
    for fill in (0, 1):
        vals = {f(es(np.full((n, m), fill, dtype=np.uint8))) for f in (loss_l1, loss_llh, loss_lgh)}
        assert len(vals) == 1


@settings(max_examples=150, deadline=None)
@given(error_matrices(), st.data())
def test_clearing_an_error_never_increases(e, data):
    ones = np.argwhere(e)
    if len(ones) == 0:
        return
    i, j = ones[data.draw(st.integers(0, len(ones) - 1))]
    cleared = e.copy()
    cleared[i, j] = 0
    for f in ALL:
        assert f(es(cleared)) <= f(es(e))


@settings(max_examples=100, deadline=None)
@given(error_matrices(), st.integers(0, 2**32))
def test_permutation_invariances(e, seed):
    rng = np.random.default_rng(seed)
    rows = e[rng.permutation(e.shape[0])]
    cols = e[:, rng.permutation(e.shape[1])]
    for f in ALL:
        assert f(es(rows)) == f(es(e))
    assert loss_l1(es(cols)) == loss_l1(es(e))
