"""Pruned SC decoding tree and the constituent-code cycle model."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from .reliability import BitLayout, log2_exact


class NodeClass(enum.Enum):
    N0 = "N0"
    N1 = "N1"
    REP = "REP"
    SPC = "SPC"
    MIXED = "Mixed"


ALL_CONSTITUENTS = frozenset({NodeClass.N0, NodeClass.N1, NodeClass.REP, NodeClass.SPC})
RATE01_ONLY = frozenset({NodeClass.N0, NodeClass.N1})
# no pruning above size 1: the full-depth SC tree
LEAVES_ONLY = frozenset()


class OverheadMode(enum.Enum):
    """How internal (Mixed) nodes and N0/N1 leaves are charged.

    SUM_OF_LEAVES
        Only pruned leaves cost cycles: N0, N1 -> 1, REP -> log2 s, SPC -> log2 s + 1.
    PLUS_TWO_PER_MIXED
        As above plus 2 cycles (one f pass, one g pass) per Mixed node.
    ONE_PER_MIXED
        One cycle per Mixed node; N0/N1 leaves fold into their parent's cycle
        and cost nothing unless they are the root. REP/SPC as above. This is
        the convention that reproduces the published latency table.
    """

    SUM_OF_LEAVES = "sum-of-leaves"
    PLUS_TWO_PER_MIXED = "plus-two-per-mixed"
    ONE_PER_MIXED = "one-per-mixed"


@dataclass(frozen=True)
class Node:
    start: int
    size: int
    cls: NodeClass
    children: tuple[int, int] | None = None

    @property
    def stage(self) -> int:
        return self.size.bit_length() - 1


@dataclass(frozen=True, eq=False)
class PrunedTree:
    layout: BitLayout
    nodes: tuple[Node, ...]
    allowed: frozenset = ALL_CONSTITUENTS

    @property
    def n(self) -> int:
        return self.layout.n

    @property
    def root(self) -> Node:
        return self.nodes[0]

    def leaves(self) -> list[Node]:
        return [nd for nd in self.nodes if nd.children is None]

    def mixed(self) -> list[Node]:
        return [nd for nd in self.nodes if nd.cls is NodeClass.MIXED]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "kinds": self.layout.kinds,
            "nodes": [
                {
                    "id": i,
                    "stage": nd.stage,
                    "start": nd.start,
                    "size": nd.size,
                    "class": nd.cls.value,
                    "children": list(nd.children) if nd.children else None,
                }
                for i, nd in enumerate(self.nodes)
            ],
        }

    def to_text(self) -> str:
        lines: list[str] = []

        def walk(i: int, depth: int) -> None:
            nd = self.nodes[i]
            lines.append(f"{'  ' * depth}{nd.cls.value}({nd.size}) [{nd.start}, {nd.start + nd.size})")
            if nd.children:
                for c in nd.children:
                    walk(c, depth + 1)

        walk(0, 0)
        return "\n".join(lines)


def _classify_span(info: np.ndarray, ones: int, start: int, size: int, allowed) -> NodeClass:
    if ones == 0:
        return NodeClass.N0
    if ones == size:
        return NodeClass.N1
    if size >= 2:
        if ones == 1 and info[start + size - 1] and NodeClass.REP in allowed:
            return NodeClass.REP
        if ones == size - 1 and not info[start] and NodeClass.SPC in allowed:
            return NodeClass.SPC
    return NodeClass.MIXED


def build_pruned_tree(layout: BitLayout, allowed=ALL_CONSTITUENTS) -> PrunedTree:
    """Greedy top-down pruning: a node matching an allowed pattern becomes a leaf.

    Patterns are tried in the order N0, N1, REP, SPC (a size-2 ``FI`` node is
    REP). Size-1 nodes always terminate as N0/N1 whatever ``allowed`` says.
    """
    info = layout.info
    n = layout.n
    log2_exact(n)
    allowed = frozenset(allowed)
    csum = np.concatenate(([0], np.cumsum(info, dtype=np.int64)))
    nodes: list[Node | None] = []

    def visit(start: int, size: int) -> int:
        ones = int(csum[start + size] - csum[start])
        cls = _classify_span(info, ones, start, size, allowed)
        if cls in (NodeClass.N0, NodeClass.N1) and size > 1 and cls not in allowed:
            cls = NodeClass.MIXED
        me = len(nodes)
        nodes.append(None)
        if cls is NodeClass.MIXED:
            half = size // 2
            left = visit(start, half)
            right = visit(start + half, half)
            nodes[me] = Node(start, size, cls, (left, right))
        else:
            nodes[me] = Node(start, size, cls)
        return me

    visit(0, n)
    return PrunedTree(layout, tuple(nodes), allowed)


def constituent_latency(cls: NodeClass, size: int) -> int:
    """Cycles to decode one constituent node of ``size`` bits."""
    m = log2_exact(size)
    if cls in (NodeClass.N0, NodeClass.N1):
        return 1
    if cls is NodeClass.MIXED:
        raise ValueError("Mixed nodes have no closed-form cost")
    if size < 2:
        raise ValueError(f"{cls.value} needs at least 2 bits")
    if cls is NodeClass.REP:
        return m
    return m + 1


def conventional_latency(n: int) -> int:
    """Cycle count of a conventional tree/line SC decoder: 2n - 2."""
    if log2_exact(n) < 1:
        raise ValueError("n must be at least 2")
    return 2 * n - 2


# comparison constants from the fastest non-constituent decoder in the
# published table, 3n/4 - 1 cycles
TWO_BIT_LAST_STAGE_CYCLES = {1024: 767, 2048: 1535, 16384: 12287}


def two_bit_last_stage_latency(n: int) -> int:
    return 3 * n // 4 - 1


def _node_cost(tree: PrunedTree, idx: int, mode: OverheadMode) -> int:
    nd = tree.nodes[idx]
    if nd.cls is NodeClass.MIXED:
        return {
            OverheadMode.SUM_OF_LEAVES: 0,
            OverheadMode.PLUS_TWO_PER_MIXED: 2,
            OverheadMode.ONE_PER_MIXED: 1,
        }[mode]
    if mode is OverheadMode.ONE_PER_MIXED and nd.cls in (NodeClass.N0, NodeClass.N1) and idx != 0:
        return 0
    return constituent_latency(nd.cls, nd.size)


@dataclass(frozen=True)
class LatencyReport:
    total_cycles: int
    baseline_cycles: int
    mode: OverheadMode
    per_class: dict = field(default_factory=dict)  # class name -> (count, cycles)

    @property
    def reduction_percent(self) -> float:
        if self.baseline_cycles == 0:
            return 0.0
        return 100.0 * (1.0 - self.total_cycles / self.baseline_cycles)

    def to_json(self) -> dict:
        return {
            "mode": self.mode.value,
            "total_cycles": self.total_cycles,
            "baseline_cycles": self.baseline_cycles,
            "reduction_percent": self.reduction_percent,
            "per_class": {k: list(v) for k, v in self.per_class.items()},
        }

    def csv_row(self, n: int, rate: float, threshold: float) -> dict:
        return {
            "n": n,
            "rate": rate,
            "T_h": threshold,
            "mode": self.mode.value,
            "cycles": self.total_cycles,
            "reduction_percent": round(self.reduction_percent, 4),
        }


LATENCY_CSV_COLUMNS = ["n", "rate", "T_h", "mode", "cycles", "reduction_percent"]


def _cycles(tree: PrunedTree, mode: OverheadMode) -> tuple[int, dict]:
    per: dict[str, list[int]] = {c.value: [0, 0] for c in NodeClass}
    total = 0
    for i, nd in enumerate(tree.nodes):
        cost = _node_cost(tree, i, mode)
        per[nd.cls.value][0] += 1
        per[nd.cls.value][1] += cost
        total += cost
    return total, {k: tuple(v) for k, v in per.items()}


def total_latency(
    tree: PrunedTree,
    mode: OverheadMode = OverheadMode.SUM_OF_LEAVES,
    baseline: PrunedTree | None = None,
) -> LatencyReport:
    """Modeled decode cycles of ``tree``; ``baseline`` sets the reduction reference."""
    mode = OverheadMode(mode)
    total, per = _cycles(tree, mode)
    base = _cycles(baseline, mode)[0] if baseline is not None else total
    return LatencyReport(total, base, mode, per)


def dump_tree(path, tree: PrunedTree) -> None:
    with open(path, "w") as fh:
        json.dump(tree.to_json(), fh, indent=1)
