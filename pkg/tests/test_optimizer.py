from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curricula.bitdata import Dataset
from curricula.loss import LOSS_NAMES, Curriculum
from curricula.network import NetworkStructure, check_feedforward, evaluate, propose_move, random_network
from curricula.optimizer import (
    LahcConfig,
    PackedProblem,
    default_gates,
    default_history,
    guiding_cost,
    lahc,
    lahc_accepts,
    lahc_train,
)
from curricula.problems import gen_add, gen_cpar


def test_acceptance_rule_examples():
    assert lahc_accepts(5, 5, 5)
    # 4 < 3 fails but 4 <= 5 holds
    assert lahc_accepts(4, 3, 5)
    assert lahc_accepts(6, 7, 5)
    assert not lahc_accepts(6, 6, 5)


def test_config_validation():
    with pytest.raises(ValueError):
        LahcConfig(history_length=0)
    with pytest.raises(ValueError):
        LahcConfig(iteration_limit=0)
    with pytest.raises(ValueError):
        LahcConfig(restart_limit=-1)
    with pytest.raises(ValueError):
        LahcConfig(loss="hinge")


def test_defaults():
    assert default_history("cpar") == 1000
    assert default_history("add") == 250
    assert default_gates(2) == 42


def test_history_bounds_cost_during_first_pass():
    # while every history slot still holds the initial cost, no accepted cost exceeds it
    rng = np.random.default_rng(0)
    trail = []

    def neighbour(s):
        return int(rng.integers(0, 100))

    L = 500
    start = 60

    def tracked_cost(x):
        trail.append(x)
        return x

    s, c, total, _ = lahc(lambda: start, neighbour, tracked_cost, L, L, 0)
    accepted = [start]
    for cand in trail[1:]:
        if cand < start or cand <= accepted[-1]:
            accepted.append(cand)
        else:
            accepted.append(accepted[-1])
        assert accepted[-1] <= start
    assert c == accepted[-1]


def test_generic_lahc_reaches_zero_on_a_ladder():
    rng = np.random.default_rng(1)
    s, c, total, restarts = lahc(lambda: 50, lambda x: max(0, x + int(rng.integers(-2, 2))), abs, 10, 10_000, 0)
    assert c == 0 and restarts == 0 and total <= 10_000


def test_generic_lahc_counts_restarts():
    calls = []
    s, c, total, restarts = lahc(lambda: calls.append(1) or 1, lambda x: x, lambda x: x, 3, 7, 2)
    assert (c, total, restarts, len(calls)) == (1, 21, 2, 3)


def naive_l1(net, ds):
    pred = evaluate(net, ds.inputs).to_array()
    return Fraction(int((pred != ds.targets.to_array()).sum()), pred.size)


def test_guiding_cost_constant_net():
    # gate 0 = NAND(x0, x0) = NOT x0; gate 1 = NAND(g0, g0) = x0; gate 2 = NAND(x0, g0) = 1
    net = NetworkStructure(1, 1, [[0, 0], [1, 1], [0, 1]])
    ds = Dataset.from_arrays([[0], [1]], [[1], [1]])
    for loss in LOSS_NAMES:
        assert guiding_cost(net, ds, loss) == 0


def test_guiding_cost_l1_matches_recount():
    ds = gen_add(2)
    for seed in range(20):
        net = random_network(4, 2, 42, seed)
        assert guiding_cost(net, ds, "l1") == float(naive_l1(net, ds))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(LOSS_NAMES), st.integers(0, 2**32), st.integers(1, 128))
def test_kernel_cost_matches_python_losses(loss, seed, n):
    rng = np.random.default_rng(seed)
    ds = gen_cpar(7).subset(np.sort(rng.choice(128, size=n, replace=False)))
    curriculum = Curriculum(rng.permutation(7))
    net = random_network(7, 7, int(rng.integers(7, 60)), rng)
    prob = PackedProblem(ds, loss, curriculum)
    num = prob.numerator(net.sources, prob.values(net.sources))
    assert num / prob.denominator == guiding_cost(net, ds, loss, curriculum)


def reference_run(ds, config, n_g, seed):
    """The generic procedure wired to the same random stream as lahc_train."""
    rng = np.random.default_rng(seed)
    l, m = ds.n_inputs, ds.n_targets

    def initialise():
        return random_network(l, m, n_g, rng)

    def neighbour(net):
        return propose_move(net, rng).apply(net)

    def cost(net):
        return Fraction(guiding_cost(net, ds, config.loss, config.curriculum)).limit_denominator(10**9)

    return lahc(initialise, neighbour, cost, config.history_length, config.iteration_limit,
                config.restart_limit)


@pytest.mark.parametrize("loss", LOSS_NAMES)
def test_compiled_trajectory_matches_reference(loss):
    ds = gen_add(2)
    config = LahcConfig(history_length=20, iteration_limit=400, restart_limit=2, loss=loss,
                        curriculum=Curriculum([1, 0]))
    res = lahc_train(ds, config, 12, seed=5)
    net, c, total, restarts = reference_run(ds, config, 12, seed=5)
    assert res.network == net
    assert res.iterations_used == total
    assert res.restarts_used == restarts
    assert res.final_training_loss == pytest.approx(float(c))


def test_one_bit_adder_converges():
    ds = gen_add(1)
    res = lahc_train(ds, LahcConfig(history_length=250), 21, seed=0)
    assert res.reached_zero and res.final_training_loss == 0


@pytest.mark.parametrize("loss", LOSS_NAMES)
def test_zero_cost_means_perfect_training_accuracy(loss):
    ds = gen_add(2)
    res = lahc_train(ds, LahcConfig(history_length=250, loss=loss), 42, seed=1)
    assert res.reached_zero
    assert check_feedforward(res.network)
    assert np.array_equal(evaluate(res.network, ds.inputs).to_array(), ds.targets.to_array())


def test_training_is_deterministic():
    ds = gen_cpar(5)
    cfg = LahcConfig(history_length=100, iteration_limit=20_000, restart_limit=1, loss="lgh")
    a = lahc_train(ds, cfg, 40, seed=9)
    b = lahc_train(ds, cfg, 40, seed=9)
    assert a == b


def test_return_best_across_restarts():
    ds = gen_cpar(7)
    cfg = LahcConfig(history_length=50, iteration_limit=300, restart_limit=4, return_best=True)
    res = lahc_train(ds, cfg, 30, seed=2)
    assert res.restarts_used == 4
    assert res.network == res.best_network
    assert res.final_training_loss == res.best_training_loss
    last = lahc_train(ds, LahcConfig(history_length=50, iteration_limit=300, restart_limit=4), 30, seed=2)
    assert last.best_training_loss == res.best_training_loss
    assert last.final_training_loss >= res.final_training_loss


def test_train_argument_errors():
    ds = gen_add(2)
    with pytest.raises(ValueError):
        lahc_train(ds, LahcConfig(), 1, seed=0)
    with pytest.raises(ValueError):
        lahc_train(ds.subset([]), LahcConfig(), 42, seed=0)
