"""Colored points and the repointing bijection.

A colored point is a blue leaf, a red leaf or a green unary node.  Repointing
turns it into a plain pointed node, or into ``BOTTOM`` (no point), without
touching the tree:

* blue leaf: first ancestor, the leaf included, that is a left child;
* red leaf: first ancestor, the leaf included, that is a right child (the
  root counts as a right child, so this always exists);
* green unary node: its only child.

Plain points are node ints; ``BOTTOM`` is ``None``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import IntEnum

from numba import njit

from holotree.arena import BINARY, LEAF, LEFT, NIL, ONLY, RIGHT, UNARY, TreeArena, _child_kind

BLUE, RED, GREEN = 0, 1, 2
BOTTOM = None


class Color(IntEnum):
    BLUE = BLUE
    RED = RED
    GREEN = GREEN


@dataclass(frozen=True)
class ColorPoint:
    color: Color
    node: int

    def __str__(self) -> str:
        return f"{self.color.name.lower()}@{self.node}"

    @classmethod
    def parse(cls, text: str) -> ColorPoint:
        m = re.fullmatch(r"(blue|red|green)@(\d+)", text.strip())
        if not m:
            raise ValueError(f"bad color point {text!r}")
        return cls(Color[m.group(1).upper()], int(m.group(2)))

    def check(self, t: TreeArena) -> None:
        if not t.is_live(self.node):
            raise ValueError(f"{self}: node not in tree")
        want = UNARY if self.color == GREEN else LEAF
        if t.arity[self.node] != want:
            raise ValueError(f"{self}: wrong arity for this color")


def blue(v: int) -> ColorPoint:
    return ColorPoint(Color.BLUE, v)


def red(v: int) -> ColorPoint:
    return ColorPoint(Color.RED, v)


def green(v: int) -> ColorPoint:
    return ColorPoint(Color.GREEN, v)


@njit(cache=True, _nrt=False)
def _repoint(arity, parent, child1, color, node):
    """Returns ``(target, distance)``; target is NIL for bottom."""
    if color == GREEN:
        return child1[node], 0
    want = LEFT if color == BLUE else RIGHT
    v = node
    d = 0
    while True:
        if _child_kind(arity, parent, child1, v) == want:
            return v, d
        p = parent[v]
        if p < 0:
            return NIL, d
        v = p
        d += 1


@njit(cache=True, _nrt=False)
def _repoint_inverse(arity, parent, child1, child2, root, v):
    """Returns ``(color, node)`` of the unique colored point mapping to ``v``."""
    if v < 0:
        w = root
        while arity[w] != LEAF:
            w = child2[w] if arity[w] == BINARY else child1[w]
        return BLUE, w
    k = _child_kind(arity, parent, child1, v)
    if k == ONLY:
        return GREEN, parent[v]
    w = v
    if k == LEFT:
        while arity[w] != LEAF:
            w = child2[w] if arity[w] == BINARY else child1[w]
        return BLUE, w
    while arity[w] != LEAF:
        w = child1[w]
    return RED, w


def repoint(t: TreeArena, cp: ColorPoint, with_distance: bool = False):
    """Plain point (node int or ``BOTTOM``) for the colored point ``cp``.

    With ``with_distance`` returns ``(point, number of upward steps)``.
    """
    cp.check(t)
    v, d = _repoint(t.arity, t.parent, t.child1, int(cp.color), cp.node)
    v = None if v == NIL else int(v)
    return (v, int(d)) if with_distance else v


def repoint_inverse(t: TreeArena, v: int | None) -> ColorPoint:
    if v is not None and not t.is_live(v):
        raise ValueError(f"node {v} is not in the tree")
    c, w = _repoint_inverse(*t.arrays, t.root, NIL if v is None else v)
    return ColorPoint(Color(int(c)), int(w))


def color_points(t: TreeArena) -> list[ColorPoint]:
    """All 2*leaves + unary colored points of ``t``."""
    out = []
    for v in t.nodes():
        if t.arity[v] == LEAF:
            out += [blue(v), red(v)]
        elif t.arity[v] == UNARY:
            out.append(green(v))
    return out


def plain_points(t: TreeArena) -> list[int | None]:
    return [*t.nodes(), BOTTOM]
