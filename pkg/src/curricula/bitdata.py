"""Packed binary matrices, datasets and train/test splits.

A :class:`BitMatrix` stores one bit per cell in rows of 64-bit words. Bit
``i`` of word ``w`` in row ``r`` holds cell ``(r, 64*w + i)`` and any padding
bits past the last column are kept at zero, so word-level popcounts are exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleInstanceError, ParseError, StructuralError

WORD_BITS = 64


def n_words(n_bits: int) -> int:
    return (n_bits + WORD_BITS - 1) // WORD_BITS


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a 2-D 0/1 array into little-endian uint64 words along axis 1."""
    bits = np.asarray(bits, dtype=np.uint8)
    rows, cols = bits.shape
    nw = n_words(cols)
    if rows == 0 or nw == 0:
        return np.zeros((rows, nw), dtype=np.uint64)
    packed = np.packbits(bits, axis=1, bitorder="little")
    padded = np.zeros((rows, nw * 8), dtype=np.uint8)
    padded[:, : packed.shape[1]] = packed
    return padded.view("<u8").astype(np.uint64, copy=False)


def unpack_bits(words: np.ndarray, cols: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype="<u8")
    rows = words.shape[0]
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=np.uint8)
    as_bytes = words.view(np.uint8).reshape(rows, -1)
    return np.unpackbits(as_bytes, axis=1, count=cols, bitorder="little")


def padding_mask(cols: int) -> np.uint64:
    """Mask of the valid bits in the final word of a row of ``cols`` bits."""
    rem = cols % WORD_BITS
    if rem == 0:
        return np.uint64(0xFFFFFFFFFFFFFFFF)
    return np.uint64((1 << rem) - 1)


class BitMatrix:
    """Immutable packed binary matrix.

    Build one with :func:`bitmatrix_from_rows` or :meth:`from_array`.
    """

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: np.ndarray):
        words = np.ascontiguousarray(words, dtype=np.uint64)
        if words.shape != (rows, n_words(cols)):
            raise StructuralError(
                f"word array shape {words.shape} does not fit a {rows}x{cols} matrix"
            )
        if rows and cols % WORD_BITS:
            # keep the popcount invariant no matter where the words came from
            words = words.copy()
            words[:, -1] &= padding_mask(cols)
        words.flags.writeable = False
        self.rows = rows
        self.cols = cols
        self.words = words

    @classmethod
    def from_array(cls, array) -> "BitMatrix":
        arr = np.asarray(array)
        if arr.ndim != 2:
            raise StructuralError(f"expected a 2-D array, got {arr.ndim}-D")
        if arr.size and (arr.min() < 0 or arr.max() > 1 or (arr.dtype.kind == "f" and (arr % 1).any())):
            raise StructuralError("cell values must be 0 or 1")
        return cls(arr.shape[0], arr.shape[1], pack_bits(arr.astype(np.uint8)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, np.zeros((rows, n_words(cols)), dtype=np.uint64))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def get(self, r: int, c: int) -> int:
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(f"cell ({r}, {c}) outside {self.rows}x{self.cols}")
        return int((int(self.words[r, c // WORD_BITS]) >> (c % WORD_BITS)) & 1)

    def to_array(self) -> np.ndarray:
        """Unpacked ``uint8`` copy of the matrix."""
        return unpack_bits(self.words, self.cols)

    def row(self, r: int) -> tuple[int, ...]:
        return tuple(int(b) for b in self.to_array()[r])

    def to_rows(self) -> list[list[int]]:
        return self.to_array().tolist()

    def popcount(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def row_popcounts(self) -> np.ndarray:
        return np.bitwise_count(self.words).sum(axis=1, dtype=np.int64)

    def column_popcounts(self) -> np.ndarray:
        return self.to_array().sum(axis=0, dtype=np.int64)

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_array(self.to_array().T)

    def take_rows(self, indices) -> "BitMatrix":
        idx = np.asarray(indices, dtype=np.intp)
        return BitMatrix(len(idx), self.cols, self.words[idx])

    def take_cols(self, indices) -> "BitMatrix":
        idx = np.asarray(indices, dtype=np.intp)
        return BitMatrix.from_array(self.to_array()[:, idx])

    def __xor__(self, other: "BitMatrix") -> "BitMatrix":
        if self.shape != other.shape:
            raise StructuralError(f"shape mismatch {self.shape} vs {other.shape}")
        return BitMatrix(self.rows, self.cols, self.words ^ other.words)

    def complement(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, ~self.words)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.words, other.words)

    def __hash__(self):
        return hash((self.rows, self.cols, self.words.tobytes()))

    def __repr__(self):
        return f"BitMatrix({self.rows}x{self.cols})"


def bitmatrix_from_rows(rows) -> BitMatrix:
    """Build a matrix from a sequence of equal-length bit sequences."""
    rows = [list(r) for r in rows]
    if not rows:
        return BitMatrix.zeros(0, 0)
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise StructuralError(f"row {i} has length {len(r)}, expected {width}")
    return BitMatrix.from_array(np.array(rows, dtype=np.int64).reshape(len(rows), width))


class Dataset:
    """Paired input and target matrices over the same examples.

    Construction rejects examples with identical inputs and different targets
    unless ``allow_inconsistent`` is set.
    """

    __slots__ = ("inputs", "targets", "allow_inconsistent")

    def __init__(self, inputs: BitMatrix, targets: BitMatrix, allow_inconsistent: bool = False):
        if inputs.rows != targets.rows:
            raise StructuralError(
                f"{inputs.rows} input rows but {targets.rows} target rows"
            )
        self.inputs = inputs
        self.targets = targets
        self.allow_inconsistent = allow_inconsistent
        if not allow_inconsistent:
            clash = find_contradiction(inputs, targets)
            if clash is not None:
                i, j = clash
                raise InfeasibleInstanceError(
                    f"examples {i} and {j} have identical inputs but different targets"
                )

    @classmethod
    def from_arrays(cls, inputs, targets, allow_inconsistent: bool = False) -> "Dataset":
        return cls(BitMatrix.from_array(inputs), BitMatrix.from_array(targets), allow_inconsistent)

    @property
    def n_examples(self) -> int:
        return self.inputs.rows

    @property
    def n_inputs(self) -> int:
        return self.inputs.cols

    @property
    def n_targets(self) -> int:
        return self.targets.cols

    def subset(self, indices) -> "Dataset":
        # rows of a consistent dataset stay consistent
        return _unchecked(
            self.inputs.take_rows(indices), self.targets.take_rows(indices), self.allow_inconsistent
        )

    def select_targets(self, columns) -> "Dataset":
        """Dataset whose target ``k`` is this dataset's target ``columns[k]``."""
        return _unchecked(self.inputs, self.targets.take_cols(columns), self.allow_inconsistent)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.inputs == other.inputs and self.targets == other.targets

    def __repr__(self):
        return f"Dataset(n={self.n_examples}, l={self.n_inputs}, m={self.n_targets})"


def _unchecked(inputs: BitMatrix, targets: BitMatrix, allow_inconsistent: bool = False) -> Dataset:
    ds = object.__new__(Dataset)
    ds.inputs = inputs
    ds.targets = targets
    ds.allow_inconsistent = allow_inconsistent
    return ds


def find_contradiction(inputs: BitMatrix, targets: BitMatrix):
    """Return a pair of example indices with equal inputs and unequal targets, or None."""
    seen: dict[bytes, int] = {}
    for i in range(inputs.rows):
        key = inputs.words[i].tobytes()
        j = seen.setdefault(key, i)
        if j != i and not np.array_equal(targets.words[i], targets.words[j]):
            return (j, i)
    return None


@dataclass(frozen=True)
class SampleSplit:
    train_indices: np.ndarray
    test_indices: np.ndarray
    fraction: float

    @property
    def n_train(self) -> int:
        return len(self.train_indices)

    @property
    def n_test(self) -> int:
        return len(self.test_indices)


def sample_split(dataset, train_size: int, seed) -> SampleSplit:
    """Draw ``train_size`` rows uniformly without replacement; the rest form the test set.

    ``dataset`` may be a :class:`Dataset` or a plain row count.
    """
    n = dataset if isinstance(dataset, (int, np.integer)) else dataset.n_examples
    if not 0 < train_size <= n:
        raise ValueError(f"train_size must be in [1, {n}], got {train_size}")
    rng = np.random.default_rng(seed)
    chosen = np.zeros(n, dtype=bool)
    chosen[rng.choice(n, size=train_size, replace=False)] = True
    train = np.flatnonzero(chosen)
    test = np.flatnonzero(~chosen)
    return SampleSplit(train, test, train_size / n)


# -- text format -----------------------------------------------------------
#
# line 1: "l m"; then one line per example holding l+m characters from {0,1},
# inputs first. LF-terminated, no separators, no trailing whitespace.


def format_dataset(dataset: Dataset) -> str:
    bits = np.hstack([dataset.inputs.to_array(), dataset.targets.to_array()])
    lines = [f"{dataset.n_inputs} {dataset.n_targets}"]
    lines.extend("".join("1" if b else "0" for b in row) for row in bits)
    return "\n".join(lines) + "\n"


def parse_dataset(text: str, path=None, allow_inconsistent: bool = False) -> Dataset:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError("empty file, expected header 'l m'", 1, path)
    header = lines[0]
    if header != header.rstrip():
        raise ParseError("trailing whitespace", 1, path)
    parts = header.split(" ")
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise ParseError(f"malformed header {header!r}, expected 'l m'", 1, path)
    l, m = int(parts[0]), int(parts[1])
    width = l + m
    rows = np.zeros((len(lines) - 1, width), dtype=np.uint8)
    for k, line in enumerate(lines[1:]):
        lineno = k + 2
        if line != line.rstrip():
            raise ParseError("trailing whitespace", lineno, path)
        if len(line) != width:
            raise ParseError(f"expected {width} characters, got {len(line)}", lineno, path)
        bad = set(line) - {"0", "1"}
        if bad:
            raise ParseError(f"invalid character {sorted(bad)[0]!r}", lineno, path)
        rows[k] = np.frombuffer(line.encode("ascii"), dtype=np.uint8) - ord("0")
    return Dataset.from_arrays(rows[:, :l], rows[:, l:], allow_inconsistent=allow_inconsistent)
