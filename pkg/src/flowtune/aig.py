"""And-Inverter Graphs with structural hashing, metrics, bit-parallel
simulation and equivalence checking.

Literals are plain ints packed as ``literal = 2 * node_id + complement``.
Node 0 is the constant-false node, so literal 0 is constant false and
literal 1 is constant true.  Input nodes occupy ids ``1 .. num_inputs``;
AND nodes follow in creation order, which is therefore always a
topological order.

Graphs are cheap to copy and transforms build fresh graphs instead of
mutating, so a graph that has been handed out for reading (simulation,
metrics, equivalence) is never written concurrently.
"""

from __future__ import annotations

import random
from array import array
from dataclasses import dataclass
from enum import Enum

CONST_FALSE = 0
CONST_TRUE = 1

EXHAUSTIVE_INPUT_LIMIT = 16


class MalformedLiteralError(ValueError):
    """A literal references a node id outside the graph."""


def lit(node: int, complemented: bool = False) -> int:
    """Pack a node id and a complement flag into a literal."""
    return (node << 1) | int(complemented)


def lit_node(literal: int) -> int:
    return literal >> 1


def lit_is_compl(literal: int) -> bool:
    return bool(literal & 1)


def lit_not(literal: int) -> int:
    return literal ^ 1


class Objective(str, Enum):
    """Technology-independent optimization targets."""

    NODE_COUNT = "nodes"
    DEPTH = "depth"
    NODE_DEPTH_PRODUCT = "product"


@dataclass
class QoR:
    """Quality-of-results snapshot: reachable AND count and AND depth."""

    and_count: int
    depth: int
    objective_value: int

    @staticmethod
    def value_of(and_count: int, depth: int, objective: Objective) -> int:
        if objective is Objective.NODE_COUNT:
            return and_count
        if objective is Objective.DEPTH:
            return depth
        return and_count * depth


class Aig:
    """Structurally hashed And-Inverter Graph.

    The constant node and all inputs are created up front; AND nodes are
    appended through :meth:`add_and`, which simplifies trivially reducible
    gates and deduplicates by fanin pair before allocating.
    """

    __slots__ = ("num_inputs", "_fan0", "_fan1", "outputs", "name_map",
                 "_strash", "_levels", "_compact", "token")

    def __init__(self, num_inputs: int = 0):
        self.num_inputs = num_inputs
        self._fan0 = array("q")
        self._fan1 = array("q")
        self.outputs: list[int] = []
        self.name_map: dict[str, str] = {}
        self._strash: dict[int, int] | None = {}
        self._levels: list[int] | None = None
        # set by compact(); treat compacted graphs as immutable
        self._compact = False
        # opaque identity used by flow caches; assigned on first use
        self.token: int | None = None

    # ----- structure queries -------------------------------------------------

    @property
    def num_ands(self) -> int:
        return len(self._fan0)

    @property
    def num_nodes(self) -> int:
        """Total node count including the constant node."""
        return 1 + self.num_inputs + len(self._fan0)

    @property
    def inputs(self) -> list[int]:
        """Input node ids, in creation order."""
        return list(range(1, self.num_inputs + 1))

    def input_literals(self) -> list[int]:
        return [i << 1 for i in range(1, self.num_inputs + 1)]

    def is_input(self, node: int) -> bool:
        return 1 <= node <= self.num_inputs

    def is_and(self, node: int) -> bool:
        return node > self.num_inputs and node < self.num_nodes

    def fanins(self, node: int) -> tuple[int, int]:
        k = node - self.num_inputs - 1
        return self._fan0[k], self._fan1[k]

    def and_nodes(self) -> range:
        return range(self.num_inputs + 1, self.num_nodes)

    # ----- construction ------------------------------------------------------

    def add_input(self) -> int:
        """Append an input node; only legal before any AND exists."""
        if self._fan0:
            raise ValueError("inputs must be created before AND nodes")
        self.num_inputs += 1
        return self.num_inputs << 1

    def add_and(self, a: int, b: int) -> int:
        """Return a literal implementing AND(a, b).

        Constant propagation, idempotence and complement annihilation are
        applied first, then the structural hash table; a node is allocated
        only when no simpler form exists.
        """
        top = ((self.num_inputs + len(self._fan0)) << 1) | 1
        if not (0 <= a <= top) or not (0 <= b <= top):
            raise MalformedLiteralError(
                f"literal out of range: AND({a}, {b}) with max literal {top}")
        if a > b:
            a, b = b, a
        if a == 0:
            return 0
        if a == 1:
            return b
        if a == b:
            return a
        if a ^ b == 1:
            return 0
        strash = self._strash
        if strash is None:
            strash = self._rebuild_strash()
        key = (a << 32) | b
        node = strash.get(key)
        if node is None:
            node = self.num_inputs + 1 + len(self._fan0)
            self._fan0.append(a)
            self._fan1.append(b)
            strash[key] = node
            self._levels = None
            self._compact = False
        return node << 1

    def find_and(self, a: int, b: int) -> int | None:
        """Literal AND(a, b) would evaluate to without allocating, or None.

        Returns the simplified or hashed literal when one already exists.
        """
        if a > b:
            a, b = b, a
        if a == 0:
            return 0
        if a == 1:
            return b
        if a == b:
            return a
        if a ^ b == 1:
            return 0
        strash = self._strash
        if strash is None:
            strash = self._rebuild_strash()
        node = strash.get((a << 32) | b)
        return None if node is None else node << 1

    def add_or(self, a: int, b: int) -> int:
        return self.add_and(a ^ 1, b ^ 1) ^ 1

    def _rebuild_strash(self) -> dict[int, int]:
        strash = {}
        base = self.num_inputs + 1
        f0, f1 = self._fan0, self._fan1
        for k in range(len(f0)):
            strash[(f0[k] << 32) | f1[k]] = base + k
        self._strash = strash
        return strash

    def checkpoint(self) -> int:
        return len(self._fan0)

    def rollback(self, mark: int) -> None:
        """Discard every AND allocated after :meth:`checkpoint`."""
        strash = self._strash
        f0, f1 = self._fan0, self._fan1
        if strash is not None:
            for k in range(mark, len(f0)):
                del strash[(f0[k] << 32) | f1[k]]
        del f0[mark:]
        del f1[mark:]
        self._levels = None
        self._compact = False

    def copy(self) -> "Aig":
        other = Aig(self.num_inputs)
        other._fan0 = array("q", self._fan0)
        other._fan1 = array("q", self._fan1)
        other.outputs = list(self.outputs)
        other.name_map = dict(self.name_map)
        other._strash = None
        other._compact = self._compact
        return other

    # ----- derived data ------------------------------------------------------

    def levels(self) -> list[int]:
        """AND level per node id; inverters are free, inputs are level 0."""
        if self._levels is not None:
            return self._levels
        lev = [0] * (self.num_inputs + 1)
        f0, f1 = self._fan0, self._fan1
        for k in range(len(f0)):
            a = lev[f0[k] >> 1]
            b = lev[f1[k] >> 1]
            lev.append((a if a > b else b) + 1)
        self._levels = lev
        return lev

    def reachable(self) -> bytearray:
        """Flags per node id: in the transitive fanin cone of some output."""
        flags = bytearray(self.num_nodes)
        flags[0] = 1
        stack = [l >> 1 for l in self.outputs]
        ni = self.num_inputs
        f0, f1 = self._fan0, self._fan1
        while stack:
            n = stack.pop()
            if flags[n]:
                continue
            flags[n] = 1
            if n > ni:
                k = n - ni - 1
                stack.append(f0[k] >> 1)
                stack.append(f1[k] >> 1)
        return flags

    def compact(self) -> "Aig":
        """Garbage-collected copy: only nodes reachable from outputs survive.

        Input count and order are preserved; AND creation order is kept for
        the survivors, so node ids stay topological.
        """
        flags = self.reachable()
        out = Aig(self.num_inputs)
        ni = self.num_inputs
        remap = array("q", bytes(8 * self.num_nodes))
        for i in range(1, ni + 1):
            remap[i] = i << 1
        f0, f1 = self._fan0, self._fan1
        for k in range(len(f0)):
            node = ni + 1 + k
            if not flags[node]:
                continue
            a = f0[k]
            b = f1[k]
            remap[node] = out.add_and(remap[a >> 1] ^ (a & 1),
                                      remap[b >> 1] ^ (b & 1))
        out.outputs = [remap[l >> 1] ^ (l & 1) for l in self.outputs]
        out.name_map = dict(self.name_map)
        out._compact = True
        return out

    def structurally_equal(self, other: "Aig") -> bool:
        return (self.num_inputs == other.num_inputs
                and self._fan0 == other._fan0
                and self._fan1 == other._fan1
                and self.outputs == other.outputs)

    def __repr__(self) -> str:
        return (f"Aig(inputs={self.num_inputs}, ands={self.num_ands}, "
                f"outputs={len(self.outputs)})")


# ----- metrics ----------------------------------------------------------------


def metrics(aig: Aig, objective: Objective = Objective.NODE_COUNT) -> QoR:
    """Reachable AND count and output depth (dangling nodes excluded)."""
    if aig._compact:
        and_count = aig.num_ands  # garbage-collected already
    else:
        flags = aig.reachable()
        and_count = sum(flags[aig.num_inputs + 1:])
    lev = aig.levels()
    depth = 0
    for l in aig.outputs:
        d = lev[l >> 1]
        if d > depth:
            depth = d
    return QoR(and_count, depth, QoR.value_of(and_count, depth, objective))


# ----- simulation -------------------------------------------------------------


def _eval_nodes(aig: Aig, input_vals: list[int], mask: int) -> list[int]:
    """Bit-parallel evaluation; returns one packed bit-vector per node id."""
    vals = [0] * (aig.num_inputs + 1)
    for i, v in enumerate(input_vals):
        vals[i + 1] = v & mask
    f0, f1 = aig._fan0, aig._fan1
    for k in range(len(f0)):
        a = f0[k]
        b = f1[k]
        va = vals[a >> 1]
        if a & 1:
            va ^= mask
        vb = vals[b >> 1]
        if b & 1:
            vb ^= mask
        vals.append(va & vb)
    return vals


def _output_vals(aig: Aig, vals: list[int], mask: int) -> list[int]:
    return [vals[l >> 1] ^ (mask if l & 1 else 0) for l in aig.outputs]


def _bits_from_str(s: str) -> int:
    v = 0
    for k, ch in enumerate(s):
        if ch == "1":
            v |= 1 << k
        elif ch != "0":
            raise ValueError(f"invalid pattern character {ch!r}")
    return v


def _bits_to_str(v: int, width: int) -> str:
    return "".join("1" if v >> k & 1 else "0" for k in range(width))


def simulate(aig: Aig, patterns, width: int | None = None):
    """Evaluate the network on per-input bit-vectors.

    Patterns may be equal-length '0'/'1' strings (one per input, position k
    is assignment k) or ints with an explicit ``width``.  The return value
    mirrors the input style.  Complemented literals invert bitwise.
    """
    patterns = list(patterns)
    if len(patterns) != aig.num_inputs:
        raise ValueError(
            f"expected {aig.num_inputs} patterns, got {len(patterns)}")
    as_str = bool(patterns) and isinstance(patterns[0], str)
    if as_str:
        widths = {len(p) for p in patterns}
        if len(widths) > 1:
            raise ValueError("pattern width mismatch")
        width = widths.pop()
        vals_in = [_bits_from_str(p) for p in patterns]
    else:
        if width is None:
            raise ValueError("width is required for integer patterns")
        vals_in = [int(p) for p in patterns]
        for p in vals_in:
            if p < 0 or p >> width:
                raise ValueError("pattern wider than declared width")
    mask = (1 << width) - 1
    outs = _output_vals(aig, _eval_nodes(aig, vals_in, mask), mask)
    if as_str:
        return [_bits_to_str(v, width) for v in outs]
    return outs


def input_patterns(n: int) -> list[int]:
    """Exhaustive bit-parallel patterns: bit j of pattern i is (j >> i) & 1."""
    width = 1 << n
    pats = []
    for i in range(n):
        bits = 1 << i
        block = ((1 << bits) - 1) << bits
        period = bits << 1
        while period < width:
            block |= block << period
            period <<= 1
        pats.append(block)
    return pats


def equivalent(a: Aig, b: Aig, mode: str = "exhaustive", *,
               count: int = 4096, seed: int = 1) -> bool:
    """Check functional equality of two graphs with matching I/O arity.

    ``mode="exhaustive"`` compares all 2^n assignments bit-parallel and is
    refused above 16 inputs; ``mode="random"`` compares ``count`` seeded
    patterns.
    """
    if a.num_inputs != b.num_inputs or len(a.outputs) != len(b.outputs):
        raise ValueError("input/output arity mismatch")
    if mode == "exhaustive":
        if a.num_inputs > EXHAUSTIVE_INPUT_LIMIT:
            raise ValueError(
                f"exhaustive equivalence refused beyond "
                f"{EXHAUSTIVE_INPUT_LIMIT} inputs; use mode='random'")
        pats = input_patterns(a.num_inputs)
        width = 1 << a.num_inputs
    elif mode == "random":
        rng = random.Random(seed)
        pats = [rng.getrandbits(count) for _ in range(a.num_inputs)]
        width = count
    else:
        raise ValueError(f"unknown equivalence mode {mode!r}")
    mask = (1 << width) - 1
    va = _output_vals(a, _eval_nodes(a, pats, mask), mask)
    vb = _output_vals(b, _eval_nodes(b, pats, mask), mask)
    return va == vb
