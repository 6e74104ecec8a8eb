"""Unary-binary trees weighted by ``u ** (number of unary nodes)``.

Grafts H1..H7 mirror the Motzkin grafts without the green-to-binary move:

    H1/H2  unary parent above the red/blue pointed leaf, color kept
    H3     green unary node above a plain point
    H4     binary above a plain point, new right leaf, blue
    H5     ... new left leaf, red
    H6     ... new left leaf, blue
    H7     ... new right leaf, red

A try picks branch H1/H2 with mass ``u*c`` (and fails if the point is
green), H3 with mass ``u*c``, each of H4..H7 with mass ``c*c`` and aborts
with the leftover mass.  Every colored tree of size ``n`` with ``k`` unary
nodes is then reached with probability ``u**k * c**(n-1) / 2``, so the
accepted trees of size ``n`` follow the weighted law.  ``c`` is the largest
dyadic step with ``2uc + 4c^2 <= 1``; all masses are dyadic and drawn exactly
from fair bits.

This branch plan is one valid choice, not a tuned one: the expected cost
grows exponentially with ``n``, so sampling is capped at desk sizes.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction

import numpy as np
from numba import njit

from holotree.arena import LEAF, LEFT, NIL, ONLY, RIGHT, TreeArena, _encode, _insert_binary_above, _insert_unary_above
from holotree.bitsource import choose, choose_dyadic
from holotree.pointing import BLUE, GREEN, RED, Color, ColorPoint, _repoint
from holotree.report import FAIL, NEED, OK, Run, SampleReport

DEFAULT_MAX_SIZE = 64


class HCase(IntEnum):
    H1 = 1
    H2 = 2
    H3 = 3
    H4 = 4
    H5 = 5
    H6 = 6
    H7 = 7


# H4..H7 rows: (leaf on the left?, color of the new leaf)
HBINARY = np.array([[0, BLUE], [1, RED], [1, BLUE], [0, RED]], dtype=np.int64)

# branch indices of the categorical draw
UNARY_ON_LEAF, GREEN_NEW, ABORT = 0, 1, 6


@dataclass(frozen=True)
class UnaryWeight:
    """Dyadic weight ``numerator / 2**exponent``."""

    numerator: int
    exponent: int = 0

    def __post_init__(self):
        if self.numerator < 0 or self.exponent < 0:
            raise ValueError("weight must be a nonnegative dyadic rational")

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    @classmethod
    def parse(cls, text: str) -> UnaryWeight:
        """Accepts ``a``, ``a/2^k`` and ``a/b`` with ``b`` a power of two."""
        s = text.strip().replace(" ", "")
        m = re.fullmatch(r"(\d+)(?:/2\^(\d+))?", s)
        if m:
            return cls(int(m.group(1)), int(m.group(2) or 0))
        m = re.fullmatch(r"(\d+)/(\d+)", s)
        if m:
            d = int(m.group(2))
            if d > 0 and d & (d - 1) == 0:
                return cls(int(m.group(1)), d.bit_length() - 1)
        raise ValueError(f"weight {text!r} is not of the form a/2^k")

    def __str__(self) -> str:
        return f"{self.numerator}/2^{self.exponent}"


@dataclass(frozen=True)
class BranchPlan:
    """Branch masses as integers over ``2**exponent``.

    ``masses`` lists H1/H2, H3, H4, H5, H6, H7, abort.
    """

    weight: UnaryWeight
    c: Fraction
    masses: tuple[int, ...]
    exponent: int

    @property
    def p_unary(self) -> Fraction:
        return Fraction(self.masses[0], 1 << self.exponent)

    @property
    def p_green(self) -> Fraction:
        return Fraction(self.masses[1], 1 << self.exponent)

    @property
    def p_binary(self) -> Fraction:
        return Fraction(self.masses[2], 1 << self.exponent)

    @property
    def p_abort(self) -> Fraction:
        return Fraction(self.masses[6], 1 << self.exponent)

    def probabilities(self) -> list[Fraction]:
        return [Fraction(m, 1 << self.exponent) for m in self.masses]

    def cumulative(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.masses)]).astype(np.int64)


def make_branch_plan(u: UnaryWeight, precision: int = 16) -> BranchPlan:
    """Largest ``c = m / 2**precision`` with ``2uc + 4c^2 <= 1``."""
    if u.numerator == 0:
        raise ValueError("unary weight must be positive")
    a, k, p = u.numerator, u.exponent, precision
    exponent = k + 2 * p
    if exponent > 62:
        raise ValueError("weight exponent plus twice the precision must not exceed 62")

    def fits(m: int) -> bool:
        # 2 * (a / 2^k) * (m / 2^p) + 4 * m^2 / 2^(2p) <= 1, scaled by 2^(k + 2p)
        return 2 * a * m * (1 << p) + 4 * m * m * (1 << k) <= 1 << exponent

    lo, hi = 0, 1 << p
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if fits(mid):
            lo = mid
        else:
            hi = mid - 1
    if lo == 0:
        raise ValueError(f"weight {u} too large for precision {precision}")
    uc = a * lo * (1 << p)
    cc = lo * lo * (1 << k)
    abort = (1 << exponent) - 2 * uc - 4 * cc
    return BranchPlan(u, Fraction(lo, 1 << p), (uc, uc, cc, cc, cc, cc, abort), exponent)


def graft_H(t: TreeArena, point, case: HCase) -> ColorPoint:
    """Apply ``case``; H1/H2 take a ColorPoint, H3..H7 a plain node."""
    case = HCase(case)
    if case in (HCase.H1, HCase.H2):
        want = Color.RED if case == HCase.H1 else Color.BLUE
        if not isinstance(point, ColorPoint) or point.color != want:
            raise ValueError(f"{case.name} needs a {want.name.lower()} leaf, got {point}")
        point.check(t)
        t.insert_unary_above(point.node)
        return point
    if isinstance(point, ColorPoint) or point is None:
        raise ValueError(f"{case.name} needs a plain node, got {point}")
    if case == HCase.H3:
        return ColorPoint(Color.GREEN, t.insert_unary_above(point))
    leaf_left, color = HBINARY[case - HCase.H4]
    _, leaf = t.insert_binary_above(point, 0 if leaf_left else 1)
    return ColorPoint(Color(int(color)), leaf)


def graft_H_inverse(t: TreeArena, cp: ColorPoint):
    """Undo H; returns ``(case, point)`` like ``graft_G_inverse``."""
    if t.size < 2:
        raise ValueError("H is only inverted on trees of size 2 or more")
    cp.check(t)
    v = cp.node
    if cp.color == Color.GREEN:
        return HCase.H3, t.delete_unary(v)
    kind = int(t.child_kind(v))
    if kind == ONLY:
        t.delete_unary(t.parent_of(v))
        return (HCase.H1 if cp.color == Color.RED else HCase.H2), cp
    case = {
        (RIGHT, BLUE): HCase.H4,
        (LEFT, RED): HCase.H5,
        (LEFT, BLUE): HCase.H6,
        (RIGHT, RED): HCase.H7,
    }[(kind, int(cp.color))]
    return case, t.delete_binary_leaf(v)


@njit(cache=True, _nrt=False, nogil=True)
def _grow_weighted(arity, parent, child1, child2, n, cum, exponent, rng, script):
    arity[0] = LEAF
    parent[0] = NIL
    child1[0] = NIL
    child2[0] = NIL
    root = 0
    size = 1
    node = 0
    c = choose(rng, script, 2)
    if c < 0:
        return NEED, size, root, RED, node
    color = RED if c == 1 else BLUE
    while size < n:
        k = choose_dyadic(rng, script, cum, exponent)
        if k < 0:
            return NEED, size, root, color, node
        if k == ABORT:
            return FAIL, size, root, color, node
        if k == UNARY_ON_LEAF:
            if color == GREEN:
                return FAIL, size, root, color, node
            _insert_unary_above(arity, parent, child1, child2, node, size)
            grown = 1
        else:
            v, d = _repoint(arity, parent, child1, color, node)
            if v < 0:
                return FAIL, size, root, color, node
            if k == GREEN_NEW:
                _insert_unary_above(arity, parent, child1, child2, v, size)
                color = GREEN
                node = size
                grown = 1
            else:
                _insert_binary_above(arity, parent, child1, child2, v, size, size + 1, HBINARY[k - 2, 0] == 1)
                color = HBINARY[k - 2, 1]
                node = size + 1
                grown = 2
        if parent[size] < 0:
            root = size
        size += grown
    return OK, size, root, color, node


@njit(cache=True, _nrt=False, nogil=True)
def _sample_weighted(arity, parent, child1, child2, n, cum, exponent, rng, script):
    restarts = 0
    while True:
        st, size, root, color, node = _grow_weighted(arity, parent, child1, child2, n, cum, exponent, rng, script)
        if st == NEED or (st == OK and size == n):
            return st, size, root, color, node, restarts
        restarts += 1


@njit(cache=True, nogil=True)
def _batch_weighted(n, count, cum, exponent, rng, script, codes, bits, restarts):
    m = n + 1
    arity = np.empty(m, dtype=np.int8)
    parent = np.empty(m, dtype=np.int32)
    child1 = np.empty(m, dtype=np.int32)
    child2 = np.empty(m, dtype=np.int32)
    scratch = np.empty(m, dtype=np.int64)
    for i in range(count):
        before = rng[6]
        st, size, root, color, node, rs = _sample_weighted(
            arity, parent, child1, child2, n, cum, exponent, rng, script
        )
        bits[i] = rng[6] - before
        restarts[i] = rs
        codes[i] = _encode(arity, child1, child2, root, scratch)
    return 0


def _check_n(n: int, max_size: int | None) -> None:
    if n < 1:
        raise ValueError(f"trees have at least one node, got {n}")
    if max_size is not None and n > max_size:
        raise ValueError(
            f"size {n} exceeds the cap of {max_size}; the weighted sampler's "
            "expected cost is exponential in the size (pass max_size=None to override)"
        )


def _arrays(capacity: int):
    return (
        np.empty(capacity, dtype=np.int8),
        np.empty(capacity, dtype=np.int32),
        np.empty(capacity, dtype=np.int32),
        np.empty(capacity, dtype=np.int32),
    )


def run_weighted(n: int, plan: BranchPlan, src, retry: bool = False, max_size: int | None = DEFAULT_MAX_SIZE) -> Run:
    _check_n(n, max_size)
    arrays = _arrays(n + 1)
    args = (*arrays, n, plan.cumulative(), plan.exponent, src.rng, src.script)
    if retry:
        st, size, root, color, node, rs = _sample_weighted(*args)
    else:
        st, size, root, color, node = _grow_weighted(*args)
        rs = 0
    if st != OK:
        return Run(int(st), None, None, 0, 0, int(rs))
    tree = TreeArena.from_arrays(*arrays, int(size), int(root))
    return Run(OK, tree, ColorPoint(Color(int(color)), int(node)), 0, 0, int(rs))


def try_sample_weighted(n: int, plan: BranchPlan, src, max_size: int | None = DEFAULT_MAX_SIZE) -> TreeArena | None:
    """One try: a tree of size ``n`` or ``n + 1``, or ``None`` for FAIL."""
    return run_weighted(n, plan, src, max_size=max_size).tree


def sample_weighted(n: int, u: UnaryWeight, src, precision: int = 16, max_size: int | None = DEFAULT_MAX_SIZE):
    plan = make_branch_plan(u, precision)
    before = src.bits_consumed
    t0 = time.perf_counter_ns()
    run = run_weighted(n, plan, src, retry=True, max_size=max_size)
    elapsed = time.perf_counter_ns() - t0
    return run.tree, SampleReport(
        size=run.tree.size,
        bits_consumed=src.bits_consumed - before,
        restarts=run.restarts,
        wall_time_ns=elapsed,
    )


def sample_batch(n: int, count: int, u: UnaryWeight, src, precision: int = 16):
    """``count`` accepted samples of size ``n`` (codes, bits, restarts)."""
    _check_n(n, 31)
    plan = make_branch_plan(u, precision)
    out = {
        "codes": np.zeros(count, dtype=np.int64),
        "bits": np.zeros(count, dtype=np.int64),
        "restarts": np.zeros(count, dtype=np.int64),
    }
    _batch_weighted(n, count, plan.cumulative(), plan.exponent, src.rng, src.script,
                    out["codes"], out["bits"], out["restarts"])
    return out
