"""Estimating a target order from minimum feature sets.

A target that can be computed from few inputs is taken to be easy. For each
target we find the smallest set of input columns that still separates every
pair of examples with different target values, then sort targets by that size.
"""
import numpy as np

from curricula.bitdata import sample_split
from curricula.minfs import estimate_curriculum
from curricula.problems import gen_add, gen_cmaj, gen_cpar
from curricula.stats import kendall_tau

for name, ds in (("cpar7", gen_cpar(7)), ("cmaj7", gen_cmaj(7)), ("add3", gen_add(3))):
    est = estimate_curriculum(ds, seed=0)
    print(f"{name}: sizes {est.sizes}, order {tuple(est.order)}, nestedness {est.nestedness:.2f}")
    for j, r in enumerate(est.per_target):
        print(f"   target {j}: inputs {r.features}")

# On parity the sets are perfectly nested prefixes, so the overlap matrix is all ones.
print(np.round(estimate_curriculum(gen_cpar(5), 0).overlap_matrix(), 2))

# With only part of the truth table the estimate can go wrong. Count how
# often the order matches the true one as the training set shrinks.
ds = gen_cpar(7)
for size in (16, 32, 48, 64, 96):
    taus = []
    for rep in range(20):
        split = sample_split(ds, size, seed=rep)
        est = estimate_curriculum(ds.subset(split.train_indices), seed=rep)
        taus.append(kendall_tau(range(7), est.order).value)
    print(f"size {size:3d}: mean tau {np.mean(taus):+.3f}, exact order in {np.mean(np.array(taus) == 1):.0%} of splits")
