"""From a Boolean state trajectory to a learned update rule.

We simulate a small synchronous regulatory network, turn the trajectory into
(state, next state) examples, look at which nodes each node depends on, and
fit a NAND network to the transitions.
"""
import numpy as np

from curricula.minfs import estimate_curriculum
from curricula.network import evaluate
from curricula.optimizer import LahcConfig, lahc_train
from curricula.problems import timeseries_to_pairs


def step(s):
    a, b, c, d, e, f = s
    return [1 - e, a, b, c ^ a, d, 1]  # node f is stuck on


# one long trajectory; some states are sampled twice, as slow measurements would
rng = np.random.default_rng(3)
states = []
s = [0, 0, 0, 0, 0, 1]
for _ in range(40):
    states.append(s)
    if rng.random() < 0.3:
        states.append(s)
    s = step(s)

ds, removed = timeseries_to_pairs(states)
print(f"{len(states)} samples -> {ds.n_examples} distinct transitions")
print("constant targets removed:", removed)

est = estimate_curriculum(ds, seed=0)
kept = [j for j in range(6) if j not in removed]
for j, r in zip(kept, est.per_target):
    print(f"node {j} depends on nodes {r.features}")

cfg = LahcConfig(history_length=250, loss="lgh", curriculum=est.order)
res = lahc_train(ds, cfg, n_g=21 * ds.n_targets, seed=0)
fit = (evaluate(res.network, ds.inputs).to_array() == ds.targets.to_array()).mean()
print(f"training accuracy {fit:.3f} after {res.iterations_used} iterations")
