from collections import Counter
from fractions import Fraction

import pytest

from holotree import oracle
from holotree.oracle import (
    TreeClassTable, chi_square_quantile, chi_square_test, count_binary, count_motzkin,
    enumerate_binary, enumerate_motzkin, weighted_mass,
)


def test_enumerate_binary():
    assert enumerate_binary(0) == ["L"]
    assert enumerate_binary(2) == ["BBLLL", "BLBLL"]
    assert len(enumerate_binary(3)) == 5
    with pytest.raises(ValueError):
        enumerate_binary(13)


def test_enumerate_motzkin():
    assert enumerate_motzkin(1) == ["L"]
    assert enumerate_motzkin(3) == ["BLL", "UUL"]
    assert len(enumerate_motzkin(5)) == 9
    with pytest.raises(ValueError):
        enumerate_motzkin(13)
    with pytest.raises(ValueError):
        enumerate_motzkin(0)


def test_enumerations_are_sorted_and_distinct():
    for n in range(8):
        ws = enumerate_binary(n)
        assert ws == sorted(set(ws))
    for n in range(1, 10):
        ws = enumerate_motzkin(n)
        assert ws == sorted(set(ws)) and all(len(w) == n for w in ws)


def test_counts_match_enumeration():
    assert count_binary(0) == 1
    for k in range(11):
        assert count_binary(k) == len(enumerate_binary(k))
    for n in range(1, 12):
        assert count_motzkin(n) == len(enumerate_motzkin(n))
    assert count_motzkin(6) == 21
    assert count_motzkin(0) == 0
    assert count_binary(30) == 3814986502092304
    # central binomial identity for the Catalan numbers
    from math import comb

    assert all(count_binary(k) == comb(2 * k, k) // (k + 1) for k in range(60))


def test_weighted_mass():
    assert weighted_mass(1, 5) == 1
    assert weighted_mass(4, 2) == 14
    for n in range(1, 10):
        assert weighted_mass(n, 1) == count_motzkin(n)
    for n in range(1, 8):
        direct = sum(Fraction(1, 2) ** w.count("U") for w in enumerate_motzkin(n))
        assert weighted_mass(n, Fraction(1, 2)) == direct


def test_chi_square_exact_fit_passes():
    law = oracle.uniform_law(enumerate_binary(4))
    table = TreeClassTable(law, Counter({w: 100 for w in law}))
    res = chi_square_test(table)
    assert res.statistic == 0 and res.passed and res.dof == 13


def test_chi_square_degenerate_fails():
    law = oracle.uniform_law(enumerate_binary(4))
    table = TreeClassTable(law, Counter({enumerate_binary(4)[0]: 1400}))
    res = chi_square_test(table)
    assert not res.passed and res.statistic > 10 * res.threshold


def test_chi_square_preconditions():
    law = oracle.uniform_law(enumerate_binary(4))
    with pytest.raises(ValueError):
        chi_square_test(TreeClassTable(law, Counter({w: 1 for w in law})))
    with pytest.raises(ValueError):
        chi_square_test(TreeClassTable(law, Counter({"UL": 1000})))
    with pytest.raises(ValueError):
        chi_square_test(TreeClassTable({"L": Fraction(1)}, Counter({"L": 100})))


@pytest.mark.parametrize(
    "dof,exact", [(4, 18.4668), (8, 26.1245), (13, 34.5282), (20, 45.3147), (41, 74.7448)]
)
def test_wilson_hilferty_close_to_tables(dof, exact):
    # tabulated 0.999 quantiles
    assert abs(chi_square_quantile(dof, 0.999) - exact) / exact < 0.02


def test_csv_report():
    law = oracle.uniform_law(["BLL"])
    table = TreeClassTable(law, Counter({"BLL": 10}))
    assert table.to_csv().splitlines() == ["class,expected,observed,contribution", "BLL,10.000,10,0.0000"]


def test_audit_examples():
    a = oracle.exhaustive_path_audit("binary", 1)
    assert len(a.reach) == 4 and a.values() == {Fraction(1, 8)}
    a = oracle.exhaustive_path_audit("binary", 2)
    assert len(a.reach) == 12 and a.success == Fraction(12, 32)
    a = oracle.exhaustive_path_audit("motzkin", 2)
    assert a.values() == {Fraction(1, 6)}
    with pytest.raises(ValueError):
        oracle.exhaustive_path_audit("binary", 50)
    with pytest.raises(ValueError):
        oracle.exhaustive_path_audit("weighted", 3)


def test_audit_mass_is_conserved():
    for family, n in [("binary", 3), ("motzkin", 4)]:
        a = oracle.exhaustive_path_audit(family, n)
        assert a.success + a.fail + a.overshoot == 1


def test_batteries_report():
    res = oracle.battery_repoint(oracle.binary_words_upto(5))
    assert res.ok and res.checked > 0 and "0 failures" in str(res)
