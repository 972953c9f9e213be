"""Late-acceptance hill climbing over network structures.

:func:`lahc` is the plain black-box procedure and is kept as the readable
reference. :func:`lahc_train` runs the same procedure on NAND networks with
the inner loop compiled; it consumes random numbers in the same order, so on a
single restart both produce the same trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .bitdata import Dataset, padding_mask
from .loss import Curriculum, error_summary, get_loss
from .network import NetworkStructure, column_words, evaluate, random_network

DEFAULT_HISTORY = 250
PARITY_HISTORY = 1000
DEFAULT_ITERATIONS = 2_000_000
DEFAULT_RESTARTS = 9
GATES_PER_TARGET = 21

_CHUNK = 4096


def default_history(kind: str | None) -> int:
    return PARITY_HISTORY if kind == "cpar" else DEFAULT_HISTORY


def default_gates(m: int) -> int:
    return GATES_PER_TARGET * m


@dataclass(frozen=True)
class LahcConfig:
    history_length: int = DEFAULT_HISTORY
    iteration_limit: int = DEFAULT_ITERATIONS
    restart_limit: int = DEFAULT_RESTARTS
    loss: str = "l1"
    curriculum: Curriculum | None = None
    return_best: bool = False

    def __post_init__(self):
        if self.history_length <= 0:
            raise ValueError("history_length must be positive")
        if self.iteration_limit <= 0:
            raise ValueError("iteration_limit must be positive")
        if self.restart_limit < 0:
            raise ValueError("restart_limit must be non-negative")
        get_loss(self.loss)


@dataclass(frozen=True)
class TrainResult:
    network: NetworkStructure
    final_training_loss: float
    iterations_used: int
    restarts_used: int
    reached_zero: bool
    best_network: NetworkStructure = field(repr=False, default=None)
    best_training_loss: float = None


def lahc_accepts(candidate_cost, history_cost, current_cost) -> bool:
    """Late-acceptance rule: beat the recorded cost or do no worse than now."""
    return candidate_cost < history_cost or candidate_cost <= current_cost


def lahc(initialise, neighbour, cost, history_length, iteration_limit, restart_limit):
    """Minimise ``cost`` by late-acceptance hill climbing with restarts.

    Returns ``(solution, cost, total_iterations, restarts_used)`` where the
    solution is the final state of the last restart.
    """
    restarts = 0
    total = 0
    while True:
        s = initialise()
        c = cost(s)
        history = [c] * history_length
        i = 0
        while True:
            cand = neighbour(s)
            cc = cost(cand)
            v = i % history_length
            if lahc_accepts(cc, history[v], c):
                s, c = cand, cc
            history[v] = c
            i += 1
            if i == iteration_limit or c == 0:
                break
        total += i
        if restarts == restart_limit or c == 0:
            return s, c, total, restarts
        restarts += 1


def guiding_cost(net: NetworkStructure, train: Dataset, loss: str, curriculum=None) -> float:
    """Selected loss of ``net`` on ``train`` with targets arranged by ``curriculum``."""
    predictions = evaluate(net, train.inputs)
    return get_loss(loss)(error_summary(train.targets, predictions, curriculum))


class PackedProblem:
    """Training data laid out for the compiled kernels."""

    def __init__(self, train: Dataset, loss: str, curriculum=None):
        if train.n_examples < 1:
            raise ValueError("training set is empty")
        m = train.n_targets
        if curriculum is None:
            curriculum = Curriculum.identity(m)
        if len(curriculum) != m:
            raise ValueError(f"curriculum has {len(curriculum)} entries for {m} targets")
        self.n = train.n_examples
        self.l = train.n_inputs
        self.m = m
        self.kind = _kernels.LOSS_CODES[loss]
        self.denominator = _kernels.loss_denominator(self.kind, self.n, m)
        self.inputs = column_words(train.inputs)
        self.targets = column_words(train.targets)
        self.order = np.asarray(curriculum, dtype=np.int64)
        self.lastmask = padding_mask(self.n)

    def values(self, sources: np.ndarray) -> np.ndarray:
        vals = np.zeros((self.l + sources.shape[0], self.inputs.shape[1]), dtype=np.uint64)
        vals[: self.l] = self.inputs
        _kernels.eval_from(sources, vals, self.l, 0)
        return vals

    def numerator(self, sources: np.ndarray, vals: np.ndarray) -> int:
        out_base = self.l + sources.shape[0] - self.m
        return int(_kernels.cost_numerator(vals, self.targets, self.order, out_base,
                                           self.lastmask, self.n, self.kind))


def lahc_train(train: Dataset, config: LahcConfig, n_g: int, seed) -> TrainResult:
    """Train a NAND network on ``train`` until zero cost or the limits run out."""
    l, m = train.n_inputs, train.n_targets
    if n_g < m:
        raise ValueError(f"n_g={n_g} gates cannot hold m={m} outputs")
    if l == 1 and n_g == 1:
        raise ValueError("a single gate over a single input has no neighbours")
    prob = PackedProblem(train, config.loss, config.curriculum)
    rng = np.random.default_rng(seed)
    hlen = config.history_length
    limit = config.iteration_limit
    total = 0
    restarts = 0
    best_net, best_cost = None, None
    while True:
        sources = random_network(l, m, n_g, rng).sources.copy()
        vals = prob.values(sources)
        cost = prob.numerator(sources, vals)
        history = np.full(hlen, cost, dtype=np.int64)
        state = np.array([cost, 0, 0], dtype=np.int64)
        while not state[2]:
            draws = rng.random((min(_CHUNK, limit - int(state[1])), 3))
            _kernels.lahc_steps(sources, vals, l, prob.targets, prob.order, prob.lastmask,
                                prob.n, prob.kind, history, state, draws, limit)
        cost = int(state[0])
        total += int(state[1])
        net = NetworkStructure(l, m, sources)
        if best_cost is None or cost < best_cost:
            best_net, best_cost = net, cost
        if restarts == config.restart_limit or cost == 0:
            break
        restarts += 1
    final = best_net if config.return_best else net
    final_cost = best_cost if config.return_best else cost
    return TrainResult(
        network=final,
        final_training_loss=final_cost / prob.denominator,
        iterations_used=total,
        restarts_used=restarts,
        reached_zero=final_cost == 0,
        best_network=best_net,
        best_training_loss=best_cost / prob.denominator,
    )
