"""Minimum feature sets and the curricula derived from them.

A target's minimum feature set is the smallest set of input columns on which
the target is still a well-defined function of the examples. Every pair of
examples with different target values must differ on at least one chosen
feature, so the problem is a set cover over example pairs: each pair
contributes the bitmask of features on which its two inputs differ.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bitdata import BitMatrix, Dataset
from .errors import InfeasibleInstanceError
from .loss import Curriculum

# above this many (class-0, class-1) code pairs the sumset goes through a
# Walsh-Hadamard transform instead of explicit broadcasting
_PAIR_BROADCAST_LIMIT = 1 << 22
_FWHT_MAX_FEATURES = 20


@dataclass(frozen=True)
class CoverInstance:
    """Feature bitmasks (bit ``f`` set = feature ``f`` separates the pair)."""

    n_features: int
    pair_masks: tuple[int, ...]

    def __len__(self):
        return len(self.pair_masks)


@dataclass(frozen=True)
class FeatureSetResult:
    features: tuple[int, ...]
    proven_optimal: bool

    @property
    def cardinality(self) -> int:
        return len(self.features)


@dataclass(frozen=True)
class CurriculumEstimate:
    per_target: tuple[FeatureSetResult, ...]
    order: Curriculum
    sizes: tuple[int, ...]
    nestedness: float | None
    tie_groups: tuple[tuple[int, ...], ...] = field(default=())

    def overlap_matrix(self) -> np.ndarray:
        sets = [r.features for r in self.per_target]
        m = len(sets)
        out = np.zeros((m, m))
        for i in range(m):
            for j in range(m):
                out[i, j] = overlap_coefficient(sets[i], sets[j])
        return out


def _row_codes(bits: np.ndarray) -> np.ndarray:
    """Integer code of each row (bit ``f`` = column ``f``)."""
    n, p = bits.shape
    if p <= 62:
        weights = np.left_shift(np.int64(1), np.arange(p, dtype=np.int64))
        return bits.astype(np.int64) @ weights
    codes = np.empty(n, dtype=object)
    for i, row in enumerate(bits):
        codes[i] = int("".join("1" if b else "0" for b in row[::-1]), 2)
    return codes


def _fwht(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    h = 1
    size = len(a)
    while h < size:
        a = a.reshape(-1, 2, h)
        x = a[:, 0, :].copy()
        y = a[:, 1, :]
        a[:, 0, :] = x + y
        a[:, 1, :] = x - y
        a = a.reshape(size)
        h *= 2
    return a


def _xor_sumset(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Distinct values of ``x ^ y`` for ``x`` in ``a`` and ``y`` in ``b``."""
    if a.dtype != object and len(a) * len(b) > _PAIR_BROADCAST_LIMIT and p <= _FWHT_MAX_FEATURES:
        fa = np.zeros(1 << p, dtype=np.int64)
        fb = np.zeros(1 << p, dtype=np.int64)
        fa[a] = 1
        fb[b] = 1
        counts = _fwht(_fwht(fa) * _fwht(fb))
        return np.flatnonzero(counts).astype(np.int64)
    chunk = max(1, _PAIR_BROADCAST_LIMIT // max(1, len(b)))
    parts = [np.unique(a[i:i + chunk, None] ^ b[None, :]) for i in range(0, len(a), chunk)]
    if not parts:
        return np.zeros(0, dtype=a.dtype)
    return np.unique(np.concatenate(parts))


def _popcounts(masks: np.ndarray) -> np.ndarray:
    if masks.dtype == object:
        return np.array([m.bit_count() for m in masks], dtype=np.int64)
    return np.bitwise_count(masks.astype(np.uint64)).astype(np.int64)


def reduce_masks(masks) -> list[int]:
    """Drop duplicates and any mask that contains another mask.

    Covering the minimal masks covers their supersets, so the reduced
    instance has exactly the same feasible sets.
    """
    masks = np.unique(np.asarray(masks))
    if len(masks) == 0:
        return []
    counts = _popcounts(masks)
    kept = masks[:0]
    for c in np.unique(counts):
        group = masks[counts == c]
        if len(kept):
            dominated = ((group[:, None] & kept[None, :]) == kept[None, :]).any(axis=1)
            group = group[~dominated]
        # equal-size distinct masks never contain one another
        kept = np.concatenate([kept, group])
    return sorted(int(m) for m in kept)


def _target_column(target, n: int) -> np.ndarray:
    if isinstance(target, BitMatrix):
        target = target.to_array()
    t = np.asarray(target, dtype=np.uint8).reshape(-1)
    if len(t) != n:
        raise ValueError(f"target has {len(t)} entries for {n} examples")
    return t


def build_cover_instance(inputs: BitMatrix, target) -> CoverInstance:
    """Set-cover instance separating every pair of examples with different target values."""
    n, p = inputs.shape
    if n < 1:
        raise ValueError("need at least one example")
    t = _target_column(target, n)
    codes = _row_codes(inputs.to_array())
    zeros = np.unique(codes[t == 0])
    ones = np.unique(codes[t == 1])
    if len(zeros) == 0 or len(ones) == 0:
        return CoverInstance(p, ())
    clash = np.intersect1d(zeros, ones)
    if len(clash):
        raise InfeasibleInstanceError(
            "identical inputs carry different target values; no feature set can separate them"
        )
    diffs = _xor_sumset(zeros, ones, p)
    return CoverInstance(p, tuple(reduce_masks(diffs)))


def _bits(mask: int):
    f = 0
    while mask:
        if mask & 1:
            yield f
        mask >>= 1
        f += 1


def solve_minfs_greedy(instance: CoverInstance) -> FeatureSetResult:
    """Repeatedly take the feature separating the most remaining pairs (lowest index on ties)."""
    uncovered = list(instance.pair_masks)
    chosen = []
    while uncovered:
        cover = np.zeros(instance.n_features, dtype=np.int64)
        for m in uncovered:
            for f in _bits(m):
                cover[f] += 1
        best = int(np.argmax(cover))
        chosen.append(best)
        bit = 1 << best
        uncovered = [m for m in uncovered if not m & bit]
    return FeatureSetResult(tuple(sorted(chosen)), proven_optimal=False)


def _packing_bound(uncovered, allowed: int) -> int:
    """Number of pairwise-disjoint masks (over allowed features); each needs its own feature."""
    used = 0
    count = 0
    for m in sorted(uncovered, key=lambda m: ((m & allowed).bit_count(), m)):
        a = m & allowed
        if not a & used:
            used |= a
            count += 1
    return count


def _search(uncovered, allowed: int, budget: int, n_features: int):
    if not uncovered:
        return []
    if budget == 0:
        return None
    if _packing_bound(uncovered, allowed) > budget:
        return None
    # branch on the most constrained pair
    pivot = min(uncovered, key=lambda m: ((m & allowed).bit_count(), m))
    candidates = list(_bits(pivot & allowed))
    if not candidates:
        return None
    cover = {f: sum(1 for m in uncovered if (m >> f) & 1) for f in candidates}
    candidates.sort(key=lambda f: (-cover[f], f))
    for f in candidates:
        bit = 1 << f
        rest = [m for m in uncovered if not m & bit]
        found = _search(rest, allowed & ~bit, budget - 1, n_features)
        if found is not None:
            return [f] + found
        # later siblings need not consider f again
        allowed &= ~bit
    return None


def solve_minfs_exact(instance: CoverInstance) -> FeatureSetResult:
    """Minimum-cardinality separating feature set by iterative-deepening branch and bound."""
    masks = list(instance.pair_masks)
    if not masks:
        return FeatureSetResult((), proven_optimal=True)
    if any(m == 0 for m in masks):
        raise InfeasibleInstanceError("instance contains an unseparable pair")
    greedy = solve_minfs_greedy(instance)
    everything = (1 << instance.n_features) - 1
    lower = _packing_bound(masks, everything)
    for k in range(lower, greedy.cardinality):
        found = _search(masks, everything, k, instance.n_features)
        if found is not None:
            return FeatureSetResult(tuple(sorted(found)), proven_optimal=True)
    return FeatureSetResult(greedy.features, proven_optimal=True)


def separates(inputs: BitMatrix, target, features) -> bool:
    """Check directly on the data that ``features`` leave no contradictory pair."""
    bits = inputs.to_array()
    t = _target_column(target, inputs.rows)
    seen = {}
    cols = list(features)
    for row, y in zip(bits[:, cols], t):
        key = row.tobytes()
        if seen.setdefault(key, y) != y:
            return False
    return True


def overlap_coefficient(a, b) -> float:
    """``|a & b| / min(|a|, |b|)``; zero when either set is empty."""
    a, b = set(a), set(b)
    if not a or not b:
        return 0.0
    return len(a & b) / min(len(a), len(b))


def nestedness(ordered_sets) -> float:
    """Mean overlap coefficient between successive sets."""
    sets = list(ordered_sets)
    if len(sets) < 2:
        raise ValueError("nestedness needs at least two sets")
    return sum(overlap_coefficient(sets[i], sets[i - 1]) for i in range(1, len(sets))) / (len(sets) - 1)


def estimate_curriculum(dataset: Dataset, seed=None) -> CurriculumEstimate:
    """Order targets by the size of their minimum feature set, ties shuffled under ``seed``."""
    results = []
    for j in range(dataset.n_targets):
        try:
            inst = build_cover_instance(dataset.inputs, dataset.targets.take_cols([j]))
        except InfeasibleInstanceError as exc:
            raise InfeasibleInstanceError(f"target {j}: {exc}", target=j) from None
        results.append(solve_minfs_exact(inst))
    sizes = np.array([r.cardinality for r in results], dtype=np.int64)
    rng = np.random.default_rng(seed)
    shuffled = rng.permutation(len(sizes))
    order = shuffled[np.argsort(sizes[shuffled], kind="stable")]
    groups = []
    for s in np.unique(sizes):
        members = tuple(int(j) for j in order if sizes[j] == s)
        if len(members) > 1:
            groups.append(members)
    eta = nestedness([results[j].features for j in order]) if len(order) >= 2 else None
    return CurriculumEstimate(
        per_target=tuple(results),
        order=Curriculum(order),
        sizes=tuple(int(s) for s in sizes),
        nestedness=eta,
        tie_groups=tuple(groups),
    )
