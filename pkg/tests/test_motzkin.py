from fractions import Fraction

import pytest

from holotree import motzkin, oracle
from holotree.arena import TreeArena
from holotree.bitsource import MeteredBitSource
from holotree.motzkin import GCase, graft_G1, graft_G2, graft_G345, graft_G_inverse
from holotree.pointing import blue, green, red


def key(t, p):
    return oracle.canonical_key(t, p)


@pytest.mark.parametrize(
    "word,cp,expected",
    [("L", red(0), ("UL", "red@1")), ("UL", green(0), ("BLL", "red@2")), ("L", blue(0), ("UL", "blue@1"))],
)
def test_graft_G1_examples(word, cp, expected):
    t = TreeArena.from_word(word)
    assert key(t, graft_G1(t, cp)) == expected


def test_graft_G2_examples():
    t = TreeArena.from_word("L")
    assert key(t, graft_G2(t, 0)) == ("UL", "green@0")
    t = TreeArena.from_word("BLL")
    assert key(t, graft_G2(t, 0)) == ("UBLL", "green@0")
    assert t.size == 4


@pytest.mark.parametrize(
    "case,expected", [(GCase.G3, "blue@2"), (GCase.G4, "red@1"), (GCase.G5, "blue@1")]
)
def test_graft_G345_examples(case, expected):
    t = TreeArena.from_word("L")
    assert key(t, graft_G345(t, 0, case)) == ("BLL", expected)


def test_graft_G345_rejects_unary_cases():
    with pytest.raises(ValueError):
        graft_G345(TreeArena.leaf(), 0, GCase.G2)


def test_graft_G_inverse_examples():
    t = TreeArena.from_word("UL")
    case, p = graft_G_inverse(t, red(1))
    assert case == GCase.G1 and key(t, p) == ("L", "red@0")
    t = TreeArena.from_word("BLL")
    case, p = graft_G_inverse(t, red(2))
    assert case == GCase.G1 and key(t, p) == ("UL", "green@0")
    t = TreeArena.from_word("BLL")
    case, p = graft_G_inverse(t, blue(2))
    assert case == GCase.G3 and key(t, p) == ("L", "0")
    with pytest.raises(ValueError):
        graft_G_inverse(TreeArena.leaf(), red(0))


def test_G_roundtrip_to_size_7():
    res = oracle.battery_G(7)
    assert res.ok, res.failures[:5]


def test_n1_uses_only_the_start_bit():
    for seed in range(20):
        src = MeteredBitSource(seed)
        assert motzkin.try_sample_motzkin(1, src).to_word() == "L"
        assert src.bits_consumed == 1
        t, rep = motzkin.sample_motzkin(1, MeteredBitSource(seed))
        assert t.to_word() == "L" and rep.restarts == 0


def test_reach_probability_exact():
    for n in range(1, 6):
        audit = oracle.exhaustive_path_audit("motzkin", n)
        assert audit.values() == {Fraction(1, 2 * 3 ** (n - 1))}
        assert set(audit.reach) == set(oracle.colored_motzkin_trees(n))
        assert audit.success == Fraction((n + 1) * oracle.count_motzkin(n), 2 * 3 ** (n - 1))


def test_try_sizes_and_travel():
    for seed in range(1000):
        run = motzkin.run_motzkin(9, MeteredBitSource(seed))
        if run.status == 0:
            assert run.tree.size in (9, 10)
            run.tree.validate()
            assert run.travel <= run.tree.size - 1


def test_success_rate_n5():
    out = motzkin.sample_batch(5, 200_000, MeteredBitSource(6), retry=False, codes=False)
    assert abs((out["sizes"] == 5).mean() - 1 / 3) < 0.01


def test_sampler_reports():
    src = MeteredBitSource(3)
    t, rep = motzkin.sample_motzkin(200, src)
    t.validate()
    assert t.size == rep.size == 200
    assert rep.bits_consumed == src.bits_consumed


@pytest.mark.parametrize("n", [5, 6])
def test_chi_square(n):
    law = oracle.uniform_law(oracle.enumerate_motzkin(n))
    codes = motzkin.sample_batch(n, 100_000, MeteredBitSource(n))["codes"]
    res = oracle.chi_square_test(oracle.TreeClassTable.from_codes(codes, law))
    assert res.passed, str(res)
