import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from holotree.arena import (
    Arity, ChildKind, InvariantError, Side, TreeArena, WordError, decode, new_leaf_tree,
)
from holotree.oracle import enumerate_binary, enumerate_motzkin, motzkin_words_upto

SMALL_WORDS = motzkin_words_upto(9)


def node_at(t, pos):
    return int(t.preorder()[pos])


def same_arrays(a, b):
    """Exact slot-level equality, so undo restores indices too."""
    k = a.n_slots
    return (
        k == b.n_slots
        and a.root == b.root
        and all((x[:k] == y[:k]).all() for x, y in zip(a.arrays, b.arrays))
    )


def test_new_leaf_tree():
    t = new_leaf_tree()
    assert t.to_word() == "L"
    assert t.size == 1
    assert t.child_kind(t.root) == ChildKind.RIGHT
    assert t.arity_of(t.root) == Arity.LEAF
    t.validate(binary=True)


def test_insert_unary_above_examples():
    t = new_leaf_tree()
    u = t.insert_unary_above(0)
    assert t.to_word() == "UL" and t.root == u
    assert t.child_kind(0) == ChildKind.ONLY
    t = TreeArena.from_word("BLL")
    t.insert_unary_above(node_at(t, 1))
    assert t.to_word() == "BULL"
    t.validate()


def test_insert_binary_above_examples():
    t = new_leaf_tree()
    b, leaf = t.insert_binary_above(0, Side.RIGHT)
    assert t.to_word() == "BLL" and t.children(b) == (0, leaf)
    t = new_leaf_tree()
    b, leaf = t.insert_binary_above(0, Side.LEFT)
    assert t.to_word() == "BLL" and t.children(b) == (leaf, 0)
    t = TreeArena.from_word("UL")
    t.insert_binary_above(node_at(t, 1), Side.RIGHT)
    assert t.to_word() == "UBLL"
    t.validate()


def test_delete_examples():
    t = TreeArena.from_word("UL")
    assert t.delete_unary(t.root) == 1
    assert t.to_word() == "L"
    t = TreeArena.from_word("BULL")
    t.delete_unary(node_at(t, 1))
    assert t.to_word() == "BLL"
    t = TreeArena.from_word("BLL")
    t.delete_binary_leaf(node_at(t, 2))
    assert t.to_word() == "L"
    t = TreeArena.from_word("BBLLL")
    t.delete_binary_leaf(node_at(t, 4))
    assert t.to_word() == "BLL"


def test_delete_rejects_bad_nodes():
    t = TreeArena.from_word("BLL")
    with pytest.raises(ValueError):
        t.delete_unary(t.root)
    with pytest.raises(ValueError):
        t.delete_binary_leaf(t.root)
    t = TreeArena.from_word("UL")
    with pytest.raises(ValueError):
        t.delete_binary_leaf(node_at(t, 1))


def test_insert_delete_roundtrip():
    for word in SMALL_WORDS:
        check_insert_delete(TreeArena.from_word(word))


def check_insert_delete(t0):
    for v in t0.nodes():
        t = t0.copy()
        u = t.insert_unary_above(v)
        t.validate()
        assert t.delete_unary(u) == v
        assert same_arrays(t, t0)
        for side in Side:
            t = t0.copy()
            b, leaf = t.insert_binary_above(v, side)
            t.validate()
            assert t.delete_binary_leaf(leaf) == v
            assert same_arrays(t, t0)


def test_unary_binary_toggle():
    t = TreeArena.from_word("UL")
    leaf = t.unary_to_binary(t.root)
    assert t.to_word() == "BLL" and t.children(t.root)[1] == leaf
    assert t.binary_to_unary(t.root) == leaf
    assert t.to_word() == "UL"


def test_counts_and_sizes():
    for n in range(6):
        for w in enumerate_binary(n):
            t = TreeArena.from_word(w)
            leaves, unary, binary = t.counts()
            assert (leaves, unary, binary) == (n + 1, 0, n)
            assert t.size == 2 * n + 1
            t.validate(binary=True)
    for w in enumerate_motzkin(7):
        leaves, unary, binary = TreeArena.from_word(w).counts()
        assert leaves == binary + 1 and 2 * binary + unary + 1 == 7


def test_word_roundtrip():
    for word in motzkin_words_upto(11):
        t = TreeArena.from_word(word)
        assert t.to_word() == word
        # node index equals preorder position for parsed trees
        assert list(t.preorder()) == list(range(len(word)))


@pytest.mark.parametrize(
    "word,pos",
    [("", 0), ("B", 1), ("BL", 2), ("LL", 1), ("BULLL", 4), ("UX", 1), ("BLLB", 3)],
)
def test_from_word_rejects(word, pos):
    with pytest.raises(WordError) as e:
        TreeArena.from_word(word)
    assert e.value.position == pos


def test_from_word_accepts_bull():
    assert TreeArena.from_word("BULL").size == 4


def test_json_and_dot():
    t = TreeArena.from_word("BULL")
    assert json.loads(t.to_json()) == {"size": 4, "word": "BULL"}
    dot = t.to_dot()
    assert dot.startswith("digraph")
    edges = [line.strip() for line in dot.splitlines() if "->" in line]
    assert edges == ["n0 -> n1;", "n0 -> n3;", "n1 -> n2;"]


def test_validate_catches_corruption():
    t = TreeArena.from_word("BLL")
    arity, parent, child1, child2 = t.arrays
    parent[1] = 2
    with pytest.raises(InvariantError):
        t.validate()
    t = TreeArena.from_word("UL")
    with pytest.raises(InvariantError):
        t.validate(binary=True)


def test_decode_inverts_packed_code():
    from holotree.arena import _encode
    import numpy as np

    for w in motzkin_words_upto(7):
        t = TreeArena.from_word(w)
        code = _encode(*[t.arrays[i] for i in (0, 2, 3)], t.root, np.empty(t.size, dtype=np.int64))
        assert decode(int(code)) == w


def test_memory_is_compact():
    t = TreeArena.from_word("B" * 50 + "L" * 51)
    assert t.memory_bytes() / t.size <= 36


@given(st.lists(st.tuples(st.integers(0, 10**6), st.sampled_from(["u", "l", "r"])), max_size=40))
def test_random_growth_stays_valid(ops):
    t = new_leaf_tree()
    for k, op in ops:
        v = t.nodes()[k % t.size]
        if op == "u":
            t.insert_unary_above(v)
        else:
            t.insert_binary_above(v, Side.LEFT if op == "l" else Side.RIGHT)
        t.validate()
    assert TreeArena.from_word(t.to_word()) == t
