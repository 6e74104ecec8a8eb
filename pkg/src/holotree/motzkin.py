"""Uniform unary-binary (Motzkin) trees by grafting.

G1 acts on the colored point itself: a red or blue leaf gets a new unary
parent and keeps its color; a green unary node becomes binary with a new red
right leaf.  G2 puts a green unary node above a plain point.  G3, G4 and G5
put a binary node above a plain point with a new leaf that is right/blue,
left/red and left/blue respectively.

Branch probabilities 1/3, 1/3, 1/9, 1/9, 1/9 come from two uniform trits:
the first picks G1, G2 or "binary", the second picks G3, G4 or G5.
A try grows until the size reaches ``n``; overshooting to ``n + 1`` or
repointing to bottom makes ``sample_motzkin`` start over.
"""

from __future__ import annotations

import time
from enum import IntEnum

import numpy as np
from numba import njit

from holotree.arena import (
    LEAF, LEFT, NIL, ONLY, RIGHT, TreeArena, _encode,
    _insert_binary_above, _insert_unary_above, _unary_to_binary,
)
from holotree.bitsource import choose
from holotree.pointing import BLUE, GREEN, RED, Color, ColorPoint, _repoint
from holotree.report import FAIL, NEED, OK, Run, SampleReport


class GCase(IntEnum):
    G1 = 1
    G2 = 2
    G3 = 3
    G4 = 4
    G5 = 5


# G3, G4, G5 rows: (leaf on the left?, color of the new leaf)
GBINARY = np.array([[0, BLUE], [1, RED], [1, BLUE]], dtype=np.int64)


def graft_G1(t: TreeArena, cp: ColorPoint) -> ColorPoint:
    cp.check(t)
    if cp.color == Color.GREEN:
        return ColorPoint(Color.RED, t.unary_to_binary(cp.node))
    t.insert_unary_above(cp.node)
    return cp


def graft_G2(t: TreeArena, v: int) -> ColorPoint:
    return ColorPoint(Color.GREEN, t.insert_unary_above(v))


def graft_G345(t: TreeArena, v: int, case: GCase) -> ColorPoint:
    case = GCase(case)
    if case < GCase.G3:
        raise ValueError(f"{case.name} is not a binary graft")
    leaf_left, color = GBINARY[case - GCase.G3]
    _, leaf = t.insert_binary_above(v, 0 if leaf_left else 1)
    return ColorPoint(Color(int(color)), leaf)


def graft_G_inverse(t: TreeArena, cp: ColorPoint):
    """Undo G.  Returns ``(case, point)``: a ColorPoint after undoing G1, a
    plain node otherwise."""
    if t.size < 2:
        raise ValueError("G is only inverted on trees of size 2 or more")
    cp.check(t)
    v = cp.node
    if cp.color == Color.GREEN:
        return GCase.G2, t.delete_unary(v)
    kind = t.child_kind(v)
    if kind == ONLY:
        t.delete_unary(t.parent_of(v))
        return GCase.G1, cp
    b = t.parent_of(v)
    if kind == RIGHT and cp.color == Color.RED:
        t.binary_to_unary(b)
        return GCase.G1, ColorPoint(Color.GREEN, b)
    case = {(RIGHT, BLUE): GCase.G3, (LEFT, RED): GCase.G4, (LEFT, BLUE): GCase.G5}[
        (int(kind), int(cp.color))
    ]
    return case, t.delete_binary_leaf(v)


@njit(cache=True, _nrt=False, inline="always")
def _graft_g1(arity, parent, child1, child2, color, node, slot):
    if color == GREEN:
        _unary_to_binary(arity, parent, child1, child2, node, slot)
        return RED, slot
    _insert_unary_above(arity, parent, child1, child2, node, slot)
    return color, node


@njit(cache=True, _nrt=False, nogil=True)
def _grow_motzkin(arity, parent, child1, child2, n, rng, script):
    arity[0] = LEAF
    parent[0] = NIL
    child1[0] = NIL
    child2[0] = NIL
    root = 0
    size = 1
    node = 0
    travel = 0
    c = choose(rng, script, 2)
    if c < 0:
        return NEED, size, root, RED, node, travel
    color = RED if c == 1 else BLUE
    while size < n:
        t = choose(rng, script, 3)
        if t < 0:
            return NEED, size, root, color, node, travel
        if t == 0:
            color, node = _graft_g1(arity, parent, child1, child2, color, node, size)
            grown = 1
        else:
            v, d = _repoint(arity, parent, child1, color, node)
            travel += d
            if v < 0:
                return FAIL, size, root, color, node, travel
            if t == 1:
                _insert_unary_above(arity, parent, child1, child2, v, size)
                color = GREEN
                node = size
                grown = 1
            else:
                k = choose(rng, script, 3)
                if k < 0:
                    return NEED, size, root, color, node, travel
                _insert_binary_above(arity, parent, child1, child2, v, size, size + 1, GBINARY[k, 0] == 1)
                color = GBINARY[k, 1]
                node = size + 1
                grown = 2
        if parent[size] < 0:
            root = size
        size += grown
    return OK, size, root, color, node, travel


@njit(cache=True, _nrt=False, nogil=True)
def _sample_motzkin(arity, parent, child1, child2, n, rng, script):
    restarts = 0
    while True:
        st, size, root, color, node, travel = _grow_motzkin(arity, parent, child1, child2, n, rng, script)
        if st == NEED or (st == OK and size == n):
            return st, size, root, color, node, travel, restarts
        restarts += 1


@njit(cache=True, nogil=True)
def _batch_motzkin(n, retry, count, rng, script, codes, bits, restarts, sizes):
    """Like the binary batch; ``sizes`` records the final size (0 on FAIL)."""
    m = n + 1
    arity = np.empty(m, dtype=np.int8)
    parent = np.empty(m, dtype=np.int32)
    child1 = np.empty(m, dtype=np.int32)
    child2 = np.empty(m, dtype=np.int32)
    scratch = np.empty(m, dtype=np.int64)
    want_codes = len(codes) == count
    for i in range(count):
        before = rng[6]
        if retry:
            st, size, root, color, node, travel, rs = _sample_motzkin(
                arity, parent, child1, child2, n, rng, script
            )
        else:
            st, size, root, color, node, travel = _grow_motzkin(arity, parent, child1, child2, n, rng, script)
            rs = 0
        bits[i] = rng[6] - before
        restarts[i] = rs
        sizes[i] = size if st == OK else 0
        if want_codes:
            codes[i] = _encode(arity, child1, child2, root, scratch) if st == OK else 0
    return 0


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError(f"Motzkin trees have at least one node, got {n}")
    if n + 1 >= 2**31:
        raise ValueError("trees are limited to 2**31 - 1 nodes")


def _arrays(capacity: int):
    return (
        np.empty(capacity, dtype=np.int8),
        np.empty(capacity, dtype=np.int32),
        np.empty(capacity, dtype=np.int32),
        np.empty(capacity, dtype=np.int32),
    )


def run_motzkin(n: int, src, retry: bool = False) -> Run:
    _check_n(n)
    arrays = _arrays(n + 1)
    if retry:
        st, size, root, color, node, travel, rs = _sample_motzkin(*arrays, n, src.rng, src.script)
    else:
        st, size, root, color, node, travel = _grow_motzkin(*arrays, n, src.rng, src.script)
        rs = 0
    if st != OK:
        return Run(int(st), None, None, int(travel), 0, int(rs))
    tree = TreeArena.from_arrays(*arrays, int(size), int(root))
    return Run(OK, tree, ColorPoint(Color(int(color)), int(node)), int(travel), 0, int(rs))


def try_sample_motzkin(n: int, src) -> TreeArena | None:
    """One try: a tree of size ``n`` or ``n + 1``, or ``None`` for FAIL."""
    return run_motzkin(n, src).tree


def sample_motzkin(n: int, src) -> tuple[TreeArena, SampleReport]:
    before = src.bits_consumed
    t0 = time.perf_counter_ns()
    run = run_motzkin(n, src, retry=True)
    elapsed = time.perf_counter_ns() - t0
    return run.tree, SampleReport(
        size=run.tree.size,
        bits_consumed=src.bits_consumed - before,
        restarts=run.restarts,
        wall_time_ns=elapsed,
        travel=run.travel,
    )


def sample_batch(n: int, count: int, src, retry: bool = True, codes: bool = True):
    """Many samples in one compiled loop; see ``catalan.sample_batch``."""
    _check_n(n)
    if codes and n + 1 > 31:
        raise ValueError("packed codes hold at most 31 nodes")
    out = {
        "codes": np.zeros(count if codes else 0, dtype=np.int64),
        "bits": np.zeros(count, dtype=np.int64),
        "restarts": np.zeros(count, dtype=np.int64),
        "sizes": np.zeros(count, dtype=np.int64),
    }
    _batch_motzkin(n, retry, count, src.rng, src.script, out["codes"], out["bits"], out["restarts"], out["sizes"])
    return out
