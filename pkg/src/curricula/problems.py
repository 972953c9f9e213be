"""Benchmark problems, dataset files and time-series preprocessing.

Generated problems are full truth tables. Row ``r`` assigns bit ``c`` of
``r`` to input column ``c``, so rows enumerate every input pattern once.
Targets are ordered from easiest (index 0) to hardest.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bitdata import BitMatrix, Dataset, format_dataset, parse_dataset
from .errors import EmptyProblemError, InfeasibleInstanceError, ParseError

PROBLEM_KINDS = ("add", "sub", "cpar", "cmaj", "cmux", "file")


def all_patterns(l: int) -> np.ndarray:
    """``2**l x l`` array whose row ``r`` is the binary expansion of ``r``, LSB first."""
    r = np.arange(1 << l, dtype=np.int64)
    return ((r[:, None] >> np.arange(l)) & 1).astype(np.uint8)


def gen_add(n: int) -> Dataset:
    """n-bit addition without carry-in or carry-out; inputs ``x_0..x_{n-1}, y_0..y_{n-1}``."""
    if n < 1:
        raise ValueError("bit width must be positive")
    x = all_patterns(2 * n)
    a, b = x[:, :n], x[:, n:]
    z = np.zeros_like(a)
    carry = np.zeros(len(x), dtype=np.uint8)
    for i in range(n):
        z[:, i] = a[:, i] ^ b[:, i] ^ carry
        carry = (a[:, i] & b[:, i]) | (carry & (a[:, i] ^ b[:, i]))
    return Dataset.from_arrays(x, z)


def gen_sub(n: int) -> Dataset:
    """n-bit subtraction ``x - y`` with a ripple borrow and no borrow-in."""
    if n < 1:
        raise ValueError("bit width must be positive")
    x = all_patterns(2 * n)
    a, b = x[:, :n], x[:, n:]
    z = np.zeros_like(a)
    borrow = np.zeros(len(x), dtype=np.uint8)
    for i in range(n):
        diff = a[:, i] ^ b[:, i]
        z[:, i] = diff ^ borrow
        borrow = ((1 - a[:, i]) & b[:, i]) | (borrow & (1 - diff))
    return Dataset.from_arrays(x, z)


def gen_cpar(n: int) -> Dataset:
    """Prefix parities: ``z_i`` is the parity of ``x_0..x_i``."""
    if n < 1:
        raise ValueError("width must be positive")
    x = all_patterns(n)
    return Dataset.from_arrays(x, np.bitwise_xor.accumulate(x, axis=1))


def gen_cmaj(n: int) -> Dataset:
    """Prefix majorities over odd prefixes: ``z_i`` is 1 iff more than ``i`` of ``x_0..x_{2i}`` are set."""
    if n < 1 or n % 2 == 0:
        raise ValueError(f"cascaded majority needs an odd width, got {n}")
    x = all_patterns(n)
    m = (n + 1) // 2
    prefix = np.cumsum(x, axis=1)
    z = np.stack([prefix[:, 2 * i] > i for i in range(m)], axis=1).astype(np.uint8)
    return Dataset.from_arrays(x, z)


def gen_cmux(n: int) -> Dataset:
    """Chain of 2:1 multiplexers.

    Inputs are ``d_0..d_{n-1}`` then ``s_0..s_{n-2}``. Stage 0 selects between
    ``d_0`` and ``d_1``; stage ``i`` selects between the previous stage and
    ``d_{i+1}``.
    """
    if n < 2:
        raise ValueError("cascaded multiplexer needs at least two data lines")
    x = all_patterns(2 * n - 1)
    d, s = x[:, :n], x[:, n:]
    z = np.zeros((len(x), n - 1), dtype=np.uint8)
    z[:, 0] = (d[:, 0] & (1 - s[:, 0])) | (d[:, 1] & s[:, 0])
    for i in range(1, n - 1):
        z[:, i] = (z[:, i - 1] & (1 - s[:, i])) | (d[:, i + 1] & s[:, i])
    return Dataset.from_arrays(x, z)


GENERATORS = {
    "add": gen_add,
    "sub": gen_sub,
    "cpar": gen_cpar,
    "cmaj": gen_cmaj,
    "cmux": gen_cmux,
}


def problem_dimensions(kind: str, n: int) -> tuple[int, int]:
    """(inputs, targets) of a generated problem."""
    dims = {
        "add": (2 * n, n),
        "sub": (2 * n, n),
        "cpar": (n, n),
        "cmaj": (n, (n + 1) // 2),
        "cmux": (2 * n - 1, n - 1),
    }
    try:
        return dims[kind]
    except KeyError:
        raise ValueError(f"unknown problem kind {kind!r}") from None


@dataclass(frozen=True)
class ProblemSpec:
    """A benchmark (``kind`` + size ``n``) or a dataset file (``kind='file'``).

    ``pool_size`` subsamples the example pool uniformly under ``pool_seed``.
    ``known_order`` is the easiest-first target order when one is known; the
    generated circuits default to the identity.
    """

    kind: str
    n: int | None = None
    path: str | None = None
    pool_size: int | None = None
    pool_seed: int = 0
    known_order: tuple[int, ...] | None = None

    @property
    def name(self) -> str:
        if self.kind == "file":
            return Path(self.path).stem
        return f"{self.kind}{self.n}"

    def load(self) -> Dataset:
        if self.kind == "file":
            if self.path is None:
                raise ValueError("file problems need a path")
            ds = load_dataset(self.path)
        elif self.kind in GENERATORS:
            ds = GENERATORS[self.kind](self.n)
        else:
            raise ValueError(f"unknown problem kind {self.kind!r}; choose from {PROBLEM_KINDS}")
        if self.pool_size is not None and self.pool_size < ds.n_examples:
            ds = subsample(ds, self.pool_size, self.pool_seed)
        return ds

    def resolved_known_order(self, m: int):
        if self.known_order is not None:
            return tuple(self.known_order)
        if self.kind in GENERATORS:
            return tuple(range(m))
        return None


def subsample(dataset: Dataset, size: int, seed) -> Dataset:
    """Uniform example pool of ``size`` rows drawn without replacement."""
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(dataset.n_examples, size=size, replace=False))
    return dataset.subset(idx)


def load_dataset(path) -> Dataset:
    path = Path(path)
    return parse_dataset(path.read_text(), path=str(path))


def save_dataset(dataset: Dataset, path) -> None:
    Path(path).write_text(format_dataset(dataset))


def timeseries_to_pairs(states) -> tuple[Dataset, list[int]]:
    """Turn a state sequence into (state_t -> state_{t+1}) examples.

    Consecutive repeated states are collapsed first, identical pairs are then
    merged, and target columns that are constant over all pairs are dropped.
    Returns the dataset and the dropped column indices.
    """
    arr = np.asarray([list(s) for s in states], dtype=np.uint8)
    if arr.ndim != 2 or len(arr) < 2:
        raise ValueError("need at least two states of equal width")
    keep = np.ones(len(arr), dtype=bool)
    keep[1:] = (arr[1:] != arr[:-1]).any(axis=1)
    arr = arr[keep]
    if len(arr) < 2:
        raise EmptyProblemError("every state is a repeat of the first; no transitions remain")
    pairs = np.hstack([arr[:-1], arr[1:]])
    _, first = np.unique(pairs, axis=0, return_index=True)
    pairs = pairs[np.sort(first)]
    width = arr.shape[1]
    x, y = pairs[:, :width], pairs[:, width:]
    constant = [j for j in range(width) if (y[:, j] == y[0, j]).all()]
    varying = [j for j in range(width) if j not in constant]
    if not varying:
        raise EmptyProblemError("all targets are constant after preprocessing")
    try:
        ds = Dataset(BitMatrix.from_array(x), BitMatrix.from_array(y[:, varying]))
    except InfeasibleInstanceError as exc:
        raise InfeasibleInstanceError(f"time series is contradictory: {exc}") from None
    return ds, constant


def load_timeseries(path) -> list[list[int]]:
    """One state per line as a string of 0/1 characters."""
    lines = Path(path).read_text().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    width = None
    states = []
    for k, line in enumerate(lines, start=1):
        if set(line) - {"0", "1"} or not line:
            raise ParseError(f"state must be a non-empty string of 0/1, got {line!r}", k, str(path))
        if width is None:
            width = len(line)
        elif len(line) != width:
            raise ParseError(f"expected {width} characters, got {len(line)}", k, str(path))
        states.append([int(c) for c in line])
    return states
