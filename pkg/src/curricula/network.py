"""Feedforward NAND networks.

Nodes ``0..l-1`` are the network inputs and node ``l + g`` is gate ``g``.
Every gate computes NAND of its two sources, and a gate may only read nodes
that precede it, so the gate order is a topological order. The outputs are the
last ``m`` gates: output ``j`` is gate ``n_g - m + j``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .bitdata import BitMatrix, padding_mask
from .errors import ParseError


class NetworkStructure:
    """Gate wiring of a NAND network.

    ``sources`` has shape ``(n_gates, 2)``; row ``g`` holds the two source
    nodes of gate ``g``. Structures are treated as values: moves return new
    instances.
    """

    __slots__ = ("n_inputs", "n_outputs", "sources")

    def __init__(self, n_inputs: int, n_outputs: int, sources):
        src = np.array(sources, dtype=np.int64).reshape(-1, 2)
        self.n_inputs = int(n_inputs)
        self.n_outputs = int(n_outputs)
        self.sources = src

    @property
    def n_gates(self) -> int:
        return self.sources.shape[0]

    @property
    def output_gates(self) -> np.ndarray:
        return np.arange(self.n_gates - self.n_outputs, self.n_gates)

    def copy(self) -> "NetworkStructure":
        return NetworkStructure(self.n_inputs, self.n_outputs, self.sources.copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, NetworkStructure):
            return NotImplemented
        return (
            self.n_inputs == other.n_inputs
            and self.n_outputs == other.n_outputs
            and np.array_equal(self.sources, other.sources)
        )

    def __hash__(self):
        return hash((self.n_inputs, self.n_outputs, self.sources.tobytes()))

    def __repr__(self):
        return f"NetworkStructure(l={self.n_inputs}, m={self.n_outputs}, n_g={self.n_gates})"


def check_feedforward(net: NetworkStructure) -> bool:
    """True iff every gate reads only inputs or earlier gates."""
    if net.n_outputs > net.n_gates:
        return False
    limit = net.n_inputs + np.arange(net.n_gates)[:, None]
    src = net.sources
    return bool(((src >= 0) & (src < limit)).all())


def random_network(l: int, m: int, n_g: int, seed) -> NetworkStructure:
    """Uniformly random feedforward structure.

    Each source of gate ``g`` is drawn independently from ``{0, ..., l+g-1}``.
    ``seed`` may be anything accepted by :func:`numpy.random.default_rng`,
    including an existing generator.
    """
    if l < 1:
        raise ValueError(f"need at least one input, got l={l}")
    if n_g < m:
        raise ValueError(f"n_g={n_g} gates cannot hold m={m} outputs")
    rng = np.random.default_rng(seed)
    ranges = l + np.arange(n_g)
    sources = np.floor(rng.random((n_g, 2)) * ranges[:, None]).astype(np.int64)
    np.minimum(sources, ranges[:, None] - 1, out=sources)
    return NetworkStructure(l, m, sources)


def column_words(inputs: BitMatrix) -> np.ndarray:
    """Input features packed across examples: row ``f`` is feature ``f`` of every example."""
    return inputs.transpose().words


def gate_values(net: NetworkStructure, inputs: BitMatrix) -> np.ndarray:
    """Packed value buffer of every node, shape ``(l + n_g, W)``."""
    if inputs.cols != net.n_inputs:
        raise ValueError(f"network expects {net.n_inputs} inputs, data has {inputs.cols}")
    cols = column_words(inputs)
    vals = np.zeros((net.n_inputs + net.n_gates, cols.shape[1]), dtype=np.uint64)
    vals[: net.n_inputs] = cols
    if cols.shape[1]:
        _kernels.eval_from(net.sources, vals, net.n_inputs, 0)
    return vals


def evaluate(net: NetworkStructure, inputs: BitMatrix) -> BitMatrix:
    """Network outputs for every example (``n x m``), computed bit-parallel."""
    vals = gate_values(net, inputs)
    out = vals[net.n_inputs + net.output_gates]
    if out.shape[1]:
        out[:, -1] &= padding_mask(inputs.rows)
    return BitMatrix(net.n_outputs, inputs.rows, out).transpose()


@dataclass(frozen=True)
class Move:
    """Rewire one input slot of one gate."""

    gate: int
    slot: int
    old_source: int
    new_source: int

    def apply(self, net: NetworkStructure) -> NetworkStructure:
        out = net.copy()
        out.sources[self.gate, self.slot] = self.new_source
        return out

    def revert(self, net: NetworkStructure) -> NetworkStructure:
        out = net.copy()
        out.sources[self.gate, self.slot] = self.old_source
        return out


def propose_move(net: NetworkStructure, rng) -> Move:
    """Pick a (gate, slot) uniformly and a different legal source for it."""
    if net.n_inputs == 1 and net.n_gates == 1:
        raise ValueError("a single gate over a single input has no alternative wiring")
    rng = np.random.default_rng(rng)
    u = rng.random(3)
    g, slot, new = _kernels.move_from_uniforms(net.sources, net.n_inputs, u[0], u[1], u[2])
    return Move(int(g), int(slot), int(net.sources[g, slot]), int(new))


def format_network(net: NetworkStructure) -> str:
    lines = [f"{net.n_inputs} {net.n_outputs} {net.n_gates}"]
    lines.extend(f"{a} {b}" for a, b in net.sources.tolist())
    return "\n".join(lines) + "\n"


def parse_network(text: str, path=None) -> NetworkStructure:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError("empty file, expected header 'l m n_g'", 1, path)
    try:
        l, m, ng = (int(x) for x in lines[0].split(" "))
    except ValueError:
        raise ParseError(f"malformed header {lines[0]!r}, expected 'l m n_g'", 1, path) from None
    if len(lines) - 1 != ng:
        raise ParseError(f"header declares {ng} gates, found {len(lines) - 1}", len(lines), path)
    sources = []
    for k, line in enumerate(lines[1:]):
        try:
            a, b = (int(x) for x in line.split(" "))
        except ValueError:
            raise ParseError(f"malformed gate line {line!r}", k + 2, path) from None
        sources.append((a, b))
    return NetworkStructure(l, m, np.array(sources, dtype=np.int64).reshape(ng, 2))
