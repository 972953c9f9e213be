"""Rank correlation between target orders, tau-stratified permutation sampling and CIs."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np
from scipy import stats as _st


@dataclass(frozen=True)
class TauValue:
    """Kendall's tau as exact concordant (``p``) and discordant (``q``) pair counts."""

    concordant: int
    discordant: int

    @property
    def numerator(self) -> int:
        return self.concordant - self.discordant

    @property
    def denominator(self) -> int:
        return self.concordant + self.discordant

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def value(self) -> float:
        return self.numerator / self.denominator

    def __float__(self):
        return self.value


def _check_perm(p, name):
    p = [int(x) for x in p]
    if sorted(p) != list(range(len(p))):
        raise ValueError(f"{name} is not a permutation of 0..{len(p) - 1}: {p}")
    return p


def kendall_tau(a, b) -> TauValue:
    """Tau between two orderings, each listing item indices from first to last."""
    a = _check_perm(a, "a")
    b = _check_perm(b, "b")
    if len(a) != len(b):
        raise ValueError(f"orderings differ in length: {len(a)} vs {len(b)}")
    if len(a) < 2:
        raise ValueError("tau needs at least two items")
    pos_a = np.argsort(a)
    pos_b = np.argsort(b)
    i, j = np.triu_indices(len(a), k=1)
    agree = np.sign(pos_a[i] - pos_a[j]) == np.sign(pos_b[i] - pos_b[j])
    p = int(agree.sum())
    return TauValue(p, len(i) - p)


def inversions(perm) -> int:
    perm = list(perm)
    return sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])


@lru_cache(maxsize=None)
def mahonian_row(m: int) -> tuple[int, ...]:
    """Number of permutations of ``m`` items with ``q`` inversions, for ``q = 0..C(m,2)``."""
    row = [1]
    for k in range(2, m + 1):
        # inserting the k-th largest item adds 0..k-1 inversions
        nxt = [0] * (len(row) + k - 1)
        for q, c in enumerate(row):
            for extra in range(k):
                nxt[q + extra] += c
        row = nxt
    return tuple(row)


def tau_for_inversions(m: int, q: int) -> Fraction:
    pairs = comb(m, 2)
    return Fraction(pairs - 2 * q, pairs)


def achievable_taus(m: int) -> list[Fraction]:
    """Every tau value an ``m``-permutation can take against a fixed order, from +1 down to -1."""
    return [tau_for_inversions(m, q) for q in range(comb(m, 2) + 1)]


def inversions_for_tau(m: int, tau) -> int:
    """Inversion count whose tau against the identity equals ``tau`` (floats matched to 1e-9)."""
    if m < 2:
        raise ValueError("tau needs at least two items")
    for q, t in enumerate(achievable_taus(m)):
        if t == tau or abs(float(t) - float(tau)) < 1e-9:
            return q
    options = ", ".join(str(t) for t in achievable_taus(m))
    raise ValueError(f"tau={tau} is not achievable for m={m}; choose from {options}")


def sample_permutation_with_inversions(m: int, q: int, rng) -> tuple[int, ...]:
    """Uniform permutation of ``0..m-1`` with exactly ``q`` inversions."""
    rng = np.random.default_rng(rng)
    if not 0 <= q <= comb(m, 2):
        raise ValueError(f"q={q} outside 0..{comb(m, 2)}")
    # choose each item's inversion contribution from the largest down,
    # weighting by how many completions remain
    contrib = [0] * m
    remaining = q
    for k in range(m, 1, -1):
        below = mahonian_row(k - 1)
        weights = [below[remaining - c] if 0 <= remaining - c < len(below) else 0 for c in range(k)]
        total = sum(weights)
        pick = int(rng.integers(total)) if total < 2**63 else int(rng.random() * total)
        c = 0
        while pick >= weights[c]:
            pick -= weights[c]
            c += 1
        contrib[k - 1] = c
        remaining -= c
    perm: list[int] = []
    for item in range(m):
        # the new item is the largest so far; placing it before c items adds c inversions
        perm.insert(len(perm) - contrib[item], item)
    return tuple(perm)


def sample_permutation_with_tau(m: int, target_tau, seed) -> tuple[int, ...]:
    """Uniform permutation whose tau against the identity is exactly ``target_tau``."""
    return sample_permutation_with_inversions(m, inversions_for_tau(m, target_tau), seed)


def mean_ci(values, level: float = 0.95) -> tuple[float, float]:
    """Sample mean and Student-t half-width of its confidence interval."""
    x = np.asarray(values, dtype=float)
    if len(x) < 2:
        raise ValueError("need at least two values for a confidence interval")
    if np.ptp(x) == 0:
        return float(x[0]), 0.0
    mean = float(x.mean())
    sem = float(x.std(ddof=1)) / np.sqrt(len(x))
    return mean, float(_st.t.ppf(0.5 + level / 2, len(x) - 1) * sem)
