"""Uniform binary trees by grafting.

The four F grafts put a new binary node ``b`` in place of the pointed node
and hang a fresh colored leaf on one side of it:

    F1 right/red   F2 right/blue   F3 left/red   F4 left/blue

A run starts from a pointed leaf and alternates repointing with a graft
chosen by two fair bits (``00 -> F1 ... 11 -> F4``).  ``try_sample_binary``
fails when repointing yields bottom; ``sample_binary_rejection`` retries
until success; ``sample_binary_efficient`` instead repoints to a uniformly
drawn node and never fails.  ``sample_binary_remy_classic`` is the textbook
Rémy growth used as a bit-cost baseline.

Sizes are given as the number ``n`` of internal nodes; trees have ``2n + 1``
nodes.
"""

from __future__ import annotations

import time
from enum import IntEnum

import numpy as np
from numba import njit

from holotree.arena import LEAF, NIL, TreeArena, _encode, _insert_binary_above
from holotree.bitsource import choose
from holotree.pointing import BLUE, RED, Color, ColorPoint, _repoint
from holotree.report import FAIL, NEED, OK, Run, SampleReport

TRY, TRY_FAITHFUL, EFFICIENT, REMY = 0, 1, 2, 3


class FCase(IntEnum):
    F1 = 0
    F2 = 1
    F3 = 2
    F4 = 3


# rows: (leaf on the left?, color of the new leaf)
FCASES = np.array([[0, RED], [0, BLUE], [1, RED], [1, BLUE]], dtype=np.int64)


def graft_F(t: TreeArena, v: int, case: FCase) -> ColorPoint:
    leaf_left, color = FCASES[FCase(case)]
    _, leaf = t.insert_binary_above(v, 0 if leaf_left else 1)
    return ColorPoint(Color(int(color)), leaf)


def f_case_of(t: TreeArena, cp: ColorPoint) -> FCase:
    if cp.color == Color.GREEN or t.parent_of(cp.node) is None:
        raise ValueError(f"{cp} is not a colored non-root leaf")
    left = t.children(t.parent_of(cp.node))[0] == cp.node
    return FCase(2 * left + (cp.color == Color.BLUE))


def graft_F_inverse(t: TreeArena, cp: ColorPoint) -> int:
    """Undo F: remove the pointed leaf and its parent; returns the sibling."""
    if t.size < 3:
        raise ValueError("F is only inverted on trees of size 3 or more")
    if cp.color == Color.GREEN:
        raise ValueError("binary trees carry no green points")
    cp.check(t)
    return t.delete_binary_leaf(cp.node)


@njit(cache=True, _nrt=False, nogil=True)
def _grow_binary(arity, parent, child1, child2, n, mode, fcases, rng, script):
    arity[0] = LEAF
    parent[0] = NIL
    child1[0] = NIL
    child2[0] = NIL
    root = 0
    size = 1
    color = RED
    node = 0
    travel = 0
    fallbacks = 0
    if mode == TRY_FAITHFUL:
        c = choose(rng, script, 2)
        if c < 0:
            return NEED, size, root, color, node, travel, fallbacks
        color = RED if c == 1 else BLUE
    for _ in range(n):
        if mode == REMY:
            v = choose(rng, script, size)
            if v < 0:
                return NEED, size, root, color, node, travel, fallbacks
            side = choose(rng, script, 2)
            if side < 0:
                return NEED, size, root, color, node, travel, fallbacks
            _insert_binary_above(arity, parent, child1, child2, v, size, size + 1, side == 0)
        else:
            v, d = _repoint(arity, parent, child1, color, node)
            travel += d
            if v < 0:
                if mode != EFFICIENT:
                    return FAIL, size, root, color, node, travel, fallbacks
                v = choose(rng, script, size)
                if v < 0:
                    return NEED, size, root, color, node, travel, fallbacks
                fallbacks += 1
            c = choose(rng, script, 4)
            if c < 0:
                return NEED, size, root, color, node, travel, fallbacks
            _insert_binary_above(arity, parent, child1, child2, v, size, size + 1, fcases[c, 0] == 1)
            color = fcases[c, 1]
            node = size + 1
        if parent[size] < 0:
            root = size
        size += 2
    return OK, size, root, color, node, travel, fallbacks


@njit(cache=True, _nrt=False, nogil=True)
def _sample_binary(arity, parent, child1, child2, n, mode, fcases, rng, script):
    """Retry failed runs; returns the final run's result plus the restart count."""
    restarts = 0
    while True:
        st, size, root, color, node, travel, fallbacks = _grow_binary(
            arity, parent, child1, child2, n, mode, fcases, rng, script
        )
        if st != FAIL:
            return st, size, root, color, node, travel, fallbacks, restarts
        restarts += 1


@njit(cache=True, nogil=True)
def _batch_binary(n, mode, retry, count, fcases, rng, script, codes, bits, restarts, fallbacks):
    """``count`` independent samples from one stream.

    With ``retry`` false the array ``restarts`` holds 0 for a successful try
    and 1 for a failed one.  ``codes`` (packed preorder words) are filled
    when it has length ``count``.
    """
    m = 2 * n + 1
    arity = np.empty(m, dtype=np.int8)
    parent = np.empty(m, dtype=np.int32)
    child1 = np.empty(m, dtype=np.int32)
    child2 = np.empty(m, dtype=np.int32)
    scratch = np.empty(m, dtype=np.int64)
    want_codes = len(codes) == count
    for i in range(count):
        before = rng[6]
        if retry:
            st, size, root, color, node, travel, fb, rs = _sample_binary(
                arity, parent, child1, child2, n, mode, fcases, rng, script
            )
        else:
            st, size, root, color, node, travel, fb = _grow_binary(
                arity, parent, child1, child2, n, mode, fcases, rng, script
            )
            rs = 0 if st == OK else 1
        bits[i] = rng[6] - before
        restarts[i] = rs
        fallbacks[i] = fb
        if want_codes:
            codes[i] = _encode(arity, child1, child2, root, scratch) if st == OK else 0
    return 0


def _arrays(capacity: int):
    return (
        np.empty(capacity, dtype=np.int8),
        np.empty(capacity, dtype=np.int32),
        np.empty(capacity, dtype=np.int32),
        np.empty(capacity, dtype=np.int32),
    )


def _check_n(n: int) -> None:
    if n < 0:
        raise ValueError(f"size must be nonnegative, got {n}")
    if 2 * n + 1 >= 2**31:
        raise ValueError("trees are limited to 2**31 - 1 nodes")


def run_binary(n: int, src, mode: int = TRY, retry: bool = False, fcases=FCASES) -> Run:
    """Single kernel run on ``src`` (a bit source or a choice script)."""
    _check_n(n)
    arrays = _arrays(2 * n + 1)
    if retry:
        st, size, root, color, node, travel, fb, rs = _sample_binary(
            *arrays, n, mode, fcases, src.rng, src.script
        )
    else:
        st, size, root, color, node, travel, fb = _grow_binary(
            *arrays, n, mode, fcases, src.rng, src.script
        )
        rs = 0
    if st != OK:
        return Run(int(st), None, None, int(travel), int(fb), int(rs))
    tree = TreeArena.from_arrays(*arrays, int(size), int(root))
    point = None if mode == REMY else ColorPoint(Color(int(color)), int(node))
    return Run(OK, tree, point, int(travel), int(fb), int(rs))


def try_sample_binary(n: int, src, faithful: bool = False) -> TreeArena | None:
    """One try; ``None`` signals FAIL.

    ``faithful`` draws the starting color with one bit; otherwise the start
    leaf is red, which saves the bit and halves the failures.
    """
    return run_binary(n, src, TRY_FAITHFUL if faithful else TRY).tree


def _timed(n: int, src, mode: int, retry: bool) -> tuple[TreeArena, SampleReport]:
    before = src.bits_consumed
    t0 = time.perf_counter_ns()
    run = run_binary(n, src, mode, retry)
    elapsed = time.perf_counter_ns() - t0
    report = SampleReport(
        size=run.tree.size,
        bits_consumed=src.bits_consumed - before,
        restarts=run.restarts,
        repoint_fallbacks=run.fallbacks,
        wall_time_ns=elapsed,
        travel=run.travel,
    )
    return run.tree, report


def sample_binary_rejection(n: int, src, faithful: bool = False):
    return _timed(n, src, TRY_FAITHFUL if faithful else TRY, retry=True)


def sample_binary_efficient(n: int, src):
    return _timed(n, src, EFFICIENT, retry=False)


def sample_binary_remy_classic(n: int, src):
    return _timed(n, src, REMY, retry=False)


ALGORITHMS = {
    "rejection": sample_binary_rejection,
    "efficient": sample_binary_efficient,
    "remy-classic": sample_binary_remy_classic,
}

_BATCH_MODES = {
    "rejection": (TRY, True),
    "rejection-faithful": (TRY_FAITHFUL, True),
    "efficient": (EFFICIENT, False),
    "remy-classic": (REMY, False),
    "try": (TRY, False),
    "try-faithful": (TRY_FAITHFUL, False),
}


def sample_batch(n: int, count: int, src, algorithm: str = "efficient", codes: bool = True):
    """Many samples in one compiled loop, for statistics.

    Returns a dict of arrays: ``codes`` (packed preorder words, 0 for a
    failed try), ``bits``, ``restarts`` and ``fallbacks``.
    """
    _check_n(n)
    mode, retry = _BATCH_MODES[algorithm]
    if codes and 2 * n + 1 > 31:
        raise ValueError("packed codes hold at most 31 nodes")
    out = {
        "codes": np.zeros(count if codes else 0, dtype=np.int64),
        "bits": np.zeros(count, dtype=np.int64),
        "restarts": np.zeros(count, dtype=np.int64),
        "fallbacks": np.zeros(count, dtype=np.int64),
    }
    _batch_binary(
        n, mode, retry, count, FCASES, src.rng, src.script,
        out["codes"], out["bits"], out["restarts"], out["fallbacks"],
    )
    return out
