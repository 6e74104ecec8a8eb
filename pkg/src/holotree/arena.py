"""Array-backed plane trees.

A tree is four parallel arrays indexed by node: ``arity`` (int8), ``parent``,
``child1`` and ``child2`` (int32).  The root's parent is ``NIL`` (-1).  A
unary node keeps its only child in ``child1``.  Deleted nodes are marked
``DEAD`` and skipped; trailing dead slots are trimmed so that undoing the
most recent insertion restores the arrays exactly.

The ``_``-prefixed functions are compiled primitives shared by the Python
wrappers and the sampling kernels.  Callers pass the slot indices of new
nodes, so the primitives never allocate.
"""

from __future__ import annotations

import json
from enum import IntEnum

import numpy as np
from numba import njit

NIL = -1
LEAF, UNARY, BINARY, DEAD = 0, 1, 2, -1
LEFT, RIGHT, ONLY = 0, 1, 2

_LETTER = {LEAF: "L", UNARY: "U", BINARY: "B"}
_ARITY = {"L": LEAF, "U": UNARY, "B": BINARY}


class Arity(IntEnum):
    LEAF = LEAF
    UNARY = UNARY
    BINARY = BINARY


class ChildKind(IntEnum):
    LEFT = LEFT
    RIGHT = RIGHT
    ONLY = ONLY


class Side(IntEnum):
    LEFT = 0
    RIGHT = 1


class WordError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class InvariantError(AssertionError):
    pass


@njit(cache=True, _nrt=False, inline="always")
def _child_kind(arity, parent, child1, v):
    p = parent[v]
    if p < 0:
        return RIGHT
    if arity[p] == UNARY:
        return ONLY
    if child1[p] == v:
        return LEFT
    return RIGHT


@njit(cache=True, _nrt=False, inline="always")
def _take_place(parent, child1, child2, old, new):
    """Put ``new`` where ``old`` hangs (same parent slot, or root)."""
    p = parent[old]
    parent[new] = p
    if p >= 0:
        if child1[p] == old:
            child1[p] = new
        else:
            child2[p] = new


@njit(cache=True, _nrt=False)
def _insert_unary_above(arity, parent, child1, child2, v, u):
    _take_place(parent, child1, child2, v, u)
    arity[u] = UNARY
    child1[u] = v
    child2[u] = NIL
    parent[v] = u


@njit(cache=True, _nrt=False)
def _insert_binary_above(arity, parent, child1, child2, v, b, leaf, leaf_left):
    _take_place(parent, child1, child2, v, b)
    arity[b] = BINARY
    arity[leaf] = LEAF
    child1[leaf] = NIL
    child2[leaf] = NIL
    parent[leaf] = b
    parent[v] = b
    if leaf_left:
        child1[b] = leaf
        child2[b] = v
    else:
        child1[b] = v
        child2[b] = leaf


@njit(cache=True, _nrt=False)
def _unary_to_binary(arity, parent, child1, child2, u, leaf):
    """Turn unary ``u`` into a binary node with a new right leaf."""
    arity[u] = BINARY
    child2[u] = leaf
    arity[leaf] = LEAF
    parent[leaf] = u
    child1[leaf] = NIL
    child2[leaf] = NIL


@njit(cache=True, _nrt=False)
def _delete_unary(arity, parent, child1, child2, u):
    c = child1[u]
    _take_place(parent, child1, child2, u, c)
    arity[u] = DEAD
    return c


@njit(cache=True, _nrt=False)
def _delete_binary_leaf(arity, parent, child1, child2, leaf):
    b = parent[leaf]
    s = child2[b] if child1[b] == leaf else child1[b]
    _take_place(parent, child1, child2, b, s)
    arity[b] = DEAD
    arity[leaf] = DEAD
    return s


@njit(cache=True, _nrt=False)
def _binary_to_unary(arity, parent, child1, child2, b):
    """Drop the right leaf of binary ``b``; ``b`` becomes unary."""
    leaf = child2[b]
    arity[leaf] = DEAD
    arity[b] = UNARY
    child2[b] = NIL
    return leaf


@njit(cache=True)
def _preorder(arity, child1, child2, root, out):
    """Fill ``out`` with node indices in preorder; returns the count."""
    stack = np.empty(len(out) + 1, dtype=np.int64)
    top = 0
    stack[0] = root
    top = 1
    k = 0
    while top > 0:
        top -= 1
        v = stack[top]
        out[k] = v
        k += 1
        a = arity[v]
        if a == BINARY:
            stack[top] = child2[v]
            stack[top + 1] = child1[v]
            top += 2
        elif a == UNARY:
            stack[top] = child1[v]
            top += 1
    return k


@njit(cache=True)
def _encode(arity, child1, child2, root, scratch):
    """Preorder word packed base 4 (L=1, U=2, B=3); trees up to 31 nodes."""
    k = _preorder(arity, child1, child2, root, scratch)
    code = np.int64(0)
    for i in range(k):
        code = code * 4 + arity[scratch[i]] + 1
    return code


def decode(code: int) -> str:
    letters = []
    while code:
        letters.append("LUB"[code % 4 - 1])
        code //= 4
    return "".join(reversed(letters))


@njit(cache=True, _nrt=False)
def _validate(arity, parent, child1, child2, n_slots, root):
    """0 if consistent, else a negative error code; second value is the node."""
    if root < 0 or root >= n_slots or arity[root] == DEAD or parent[root] != NIL:
        return -1, root
    for v in range(n_slots):
        a = arity[v]
        if a == DEAD:
            continue
        p = parent[v]
        if p == NIL and v != root:
            return -2, v
        if p != NIL:
            if p < 0 or p >= n_slots or arity[p] == DEAD:
                return -3, v
            if arity[p] == UNARY and child1[p] != v:
                return -3, v
            if arity[p] == BINARY and child1[p] != v and child2[p] != v:
                return -3, v
            if arity[p] == LEAF:
                return -3, v
        if a == LEAF:
            if child1[v] != NIL or child2[v] != NIL:
                return -4, v
        elif a == UNARY:
            c = child1[v]
            if c < 0 or c >= n_slots or parent[c] != v or child2[v] != NIL:
                return -4, v
        elif a == BINARY:
            c = child1[v]
            d = child2[v]
            if c < 0 or d < 0 or c >= n_slots or d >= n_slots or c == d:
                return -4, v
            if parent[c] != v or parent[d] != v:
                return -4, v
        else:
            return -5, v
    return 0, 0


_VALIDATE_MESSAGES = {
    -1: "bad root",
    -2: "second root",
    -3: "parent does not list node as child",
    -4: "children inconsistent with arity",
    -5: "unknown arity flag",
}


class TreeArena:
    """A mutable plane tree stored as parallel arrays.

    Node references are plain ints.  ``size`` counts live nodes; slots are
    allocated at the end and never move.
    """

    __slots__ = ("arity", "parent", "child1", "child2", "n_slots", "n_dead", "root")

    def __init__(self, capacity: int = 16):
        capacity = max(capacity, 1)
        self.arity = np.full(capacity, DEAD, dtype=np.int8)
        self.parent = np.full(capacity, NIL, dtype=np.int32)
        self.child1 = np.full(capacity, NIL, dtype=np.int32)
        self.child2 = np.full(capacity, NIL, dtype=np.int32)
        self.n_slots = 0
        self.n_dead = 0
        self.root = NIL

    @classmethod
    def leaf(cls, capacity: int = 16) -> TreeArena:
        t = cls(capacity)
        t.arity[0] = LEAF
        t.n_slots = 1
        t.root = 0
        return t

    @classmethod
    def from_arrays(cls, arity, parent, child1, child2, n_slots: int, root: int) -> TreeArena:
        t = cls.__new__(cls)
        t.arity, t.parent, t.child1, t.child2 = arity, parent, child1, child2
        t.n_slots = n_slots
        t.n_dead = int(np.count_nonzero(arity[:n_slots] == DEAD))
        t.root = root
        return t

    @property
    def arrays(self):
        return self.arity, self.parent, self.child1, self.child2

    @property
    def size(self) -> int:
        return self.n_slots - self.n_dead

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        w = self.to_word() if self.size <= 40 else f"<{self.size} nodes>"
        return f"TreeArena({w!r})"

    def copy(self) -> TreeArena:
        t = TreeArena.__new__(TreeArena)
        t.arity, t.parent, t.child1, t.child2 = (a.copy() for a in self.arrays)
        t.n_slots, t.n_dead, t.root = self.n_slots, self.n_dead, self.root
        return t

    def memory_bytes(self) -> int:
        return sum(a.nbytes for a in self.arrays)

    # -- queries ---------------------------------------------------------

    def is_live(self, v: int) -> bool:
        return 0 <= v < self.n_slots and self.arity[v] != DEAD

    def arity_of(self, v: int) -> Arity:
        return Arity(int(self.arity[v]))

    def parent_of(self, v: int) -> int | None:
        p = int(self.parent[v])
        return None if p == NIL else p

    def children(self, v: int) -> tuple[int, ...]:
        a = self.arity[v]
        if a == BINARY:
            return int(self.child1[v]), int(self.child2[v])
        if a == UNARY:
            return (int(self.child1[v]),)
        return ()

    def child_kind(self, v: int) -> ChildKind:
        return ChildKind(_child_kind(self.arity, self.parent, self.child1, v))

    def nodes(self) -> list[int]:
        return [v for v in range(self.n_slots) if self.arity[v] != DEAD]

    def counts(self) -> tuple[int, int, int]:
        """(leaves, unary, binary)."""
        a = self.arity[: self.n_slots]
        return (
            int(np.count_nonzero(a == LEAF)),
            int(np.count_nonzero(a == UNARY)),
            int(np.count_nonzero(a == BINARY)),
        )

    def preorder(self) -> np.ndarray:
        out = np.empty(self.size, dtype=np.int64)
        k = _preorder(self.arity, self.child1, self.child2, self.root, out)
        if k != self.size:
            raise InvariantError(f"preorder reached {k} of {self.size} nodes")
        return out

    def positions(self) -> dict[int, int]:
        """Map from slot index to preorder position."""
        return {int(v): i for i, v in enumerate(self.preorder())}

    def leftmost_leaf(self, v: int) -> int:
        while self.arity[v] != LEAF:
            v = int(self.child1[v])
        return v

    def rightmost_leaf(self, v: int) -> int:
        while self.arity[v] != LEAF:
            v = int(self.child2[v] if self.arity[v] == BINARY else self.child1[v])
        return v

    def validate(self, binary: bool = False) -> None:
        """Full audit of links, arities and node counts; raises InvariantError."""
        code, v = _validate(*self.arrays, self.n_slots, self.root)
        if code:
            raise InvariantError(f"{_VALIDATE_MESSAGES[code]} (node {v})")
        if len(self.preorder()) != self.size:
            raise InvariantError("tree is not connected")
        leaves, unary, binary_nodes = self.counts()
        if leaves != binary_nodes + 1 or self.size != 2 * binary_nodes + unary + 1:
            raise InvariantError("node counts violate leaves = binary + 1")
        if binary and (unary or self.size % 2 == 0):
            raise InvariantError("binary tree has unary nodes")

    # -- mutation --------------------------------------------------------

    def _alloc(self, k: int) -> int:
        first = self.n_slots
        need = first + k
        if need > len(self.arity):
            cap = max(need, 2 * len(self.arity))
            for name, fill in (("arity", DEAD), ("parent", NIL), ("child1", NIL), ("child2", NIL)):
                old = getattr(self, name)
                new = np.full(cap, fill, dtype=old.dtype)
                new[: len(old)] = old
                setattr(self, name, new)
        self.n_slots = need
        return first

    def _trim(self) -> None:
        while self.n_slots and self.arity[self.n_slots - 1] == DEAD:
            self.n_slots -= 1
            self.n_dead -= 1
            i = self.n_slots
            self.parent[i] = self.child1[i] = self.child2[i] = NIL

    def _fix_root(self, v: int) -> None:
        if self.parent[v] == NIL:
            self.root = v

    def _check_live(self, v: int) -> None:
        if not self.is_live(v):
            raise IndexError(f"node {v} is not in the tree")

    def insert_unary_above(self, v: int) -> int:
        self._check_live(v)
        u = self._alloc(1)
        _insert_unary_above(*self.arrays, v, u)
        self._fix_root(u)
        return u

    def insert_binary_above(self, v: int, leaf_side: Side) -> tuple[int, int]:
        """New binary ``b`` takes ``v``'s place; returns ``(b, new_leaf)``."""
        self._check_live(v)
        b = self._alloc(2)
        leaf = b + 1
        _insert_binary_above(*self.arrays, v, b, leaf, Side(leaf_side) == Side.LEFT)
        self._fix_root(b)
        return b, leaf

    def unary_to_binary(self, u: int) -> int:
        if self.arity[u] != UNARY:
            raise ValueError(f"node {u} is not unary")
        leaf = self._alloc(1)
        _unary_to_binary(*self.arrays, u, leaf)
        return leaf

    def delete_unary(self, u: int) -> int:
        self._check_live(u)
        if self.arity[u] != UNARY:
            raise ValueError(f"node {u} is not unary")
        c = int(_delete_unary(*self.arrays, u))
        self.n_dead += 1
        self._fix_root(c)
        self._trim()
        return c

    def delete_binary_leaf(self, leaf: int) -> int:
        """Remove ``leaf`` and its binary parent; returns the surviving sibling."""
        self._check_live(leaf)
        if self.arity[leaf] != LEAF:
            raise ValueError(f"node {leaf} is not a leaf")
        p = self.parent[leaf]
        if p == NIL or self.arity[p] != BINARY:
            raise ValueError(f"leaf {leaf} has no binary parent")
        s = int(_delete_binary_leaf(*self.arrays, leaf))
        self.n_dead += 2
        self._fix_root(s)
        self._trim()
        return s

    def binary_to_unary(self, b: int) -> int:
        """Drop the right leaf of ``b``; returns the removed slot."""
        if self.arity[b] != BINARY or self.arity[self.child2[b]] != LEAF:
            raise ValueError(f"node {b} has no right leaf")
        leaf = int(_binary_to_unary(*self.arrays, b))
        self.n_dead += 1
        self._trim()
        return leaf

    # -- serialization ---------------------------------------------------

    def to_word(self) -> str:
        order = self.preorder()
        return self.arity[order].astype(np.uint8).tobytes().translate(_WORD_TABLE).decode()

    @classmethod
    def from_word(cls, word: str) -> TreeArena:
        """Parse a preorder word over {B, U, L}; node i is the i-th letter."""
        if not word:
            raise WordError("empty word", 0)
        need = 1
        for i, ch in enumerate(word):
            if ch not in _ARITY:
                raise WordError(f"unexpected {ch!r}", i)
            if need == 0:
                raise WordError("trailing nodes after a complete tree", i)
            need += _ARITY[ch] - 1
        if need:
            raise WordError(f"word ends with {need} missing subtree(s)", len(word))
        t = cls(len(word))
        t.n_slots = len(word)
        t.root = 0
        stack: list[int] = []
        for i, ch in enumerate(word):
            a = _ARITY[ch]
            t.arity[i] = a
            if stack:
                p = stack[-1]
                t.parent[i] = p
                if t.child1[p] == NIL:
                    t.child1[p] = i
                    if t.arity[p] == UNARY:
                        stack.pop()
                else:
                    t.child2[p] = i
                    stack.pop()
            if a != LEAF:
                stack.append(i)
        return t

    def canonical(self) -> TreeArena:
        return TreeArena.from_word(self.to_word())

    def to_json(self) -> str:
        return json.dumps({"size": self.size, "word": self.to_word()})

    def to_dot(self, name: str = "tree") -> str:
        """Graphviz digraph; nodes named by preorder position, left child first."""
        pos = self.positions()
        lines = [f"digraph {name} {{"]
        for v in self.preorder():
            v = int(v)
            lines.append(f'  n{pos[v]} [label="{_LETTER[int(self.arity[v])]}"];')
        for v in self.preorder():
            for c in self.children(int(v)):
                lines.append(f"  n{pos[int(v)]} -> n{pos[c]};")
        lines.append("}")
        return "\n".join(lines)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TreeArena):
            return NotImplemented
        return self.to_word() == other.to_word()

    __hash__ = None


_WORD_TABLE = bytes.maketrans(bytes([LEAF, UNARY, BINARY]), b"LUB")


def new_leaf_tree() -> TreeArena:
    return TreeArena.leaf()
