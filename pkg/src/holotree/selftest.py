"""Built-in checks run by ``holotree selftest``.

``quick`` runs the bijection batteries and the exact path audits; ``full``
adds chi-square uniformity suites on small sizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from holotree import catalan, motzkin, oracle, weighted
from holotree.bitsource import MeteredBitSource


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""

    def __str__(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}" + (f": {self.detail}" if self.detail else "")


def battery_checks() -> list[Check]:
    runs = [
        ("repoint binary <= 11", oracle.battery_repoint(oracle.binary_words_upto(11))),
        ("repoint motzkin <= 9", oracle.battery_repoint(oracle.motzkin_words_upto(9))),
        ("F <= 11", oracle.battery_F(11)),
        ("G <= 8", oracle.battery_G(8)),
        ("H <= 6", oracle.battery_H(6)),
    ]
    return [Check(f"battery {name}", b.ok, f"{b.checked} checks, {len(b.failures)} failures") for name, b in runs]


def audit_checks(fcases=None) -> list[Check]:
    out = []
    for n in range(4):
        a = oracle.exhaustive_path_audit("binary", n, fcases=fcases)
        want = Fraction(1, 2 * 4**n)
        keys = set(oracle.colored_binary_trees(n))
        ok = set(a.reach) == keys and a.values() == {want}
        out.append(Check(f"audit binary n={n}", ok, f"{len(a.reach)}/{len(keys)} trees, values {sorted(a.values())[:3]}"))
    for n in range(1, 4):
        a = oracle.exhaustive_path_audit("binary-efficient", n, fcases=fcases)
        keys = set(oracle.colored_binary_trees(n))
        ok = set(a.reach) == keys and a.values() == {Fraction(1, len(keys))}
        out.append(Check(f"audit efficient n={n}", ok, f"{len(a.reach)}/{len(keys)} trees"))
    for n in range(1, 5):
        a = oracle.exhaustive_path_audit("motzkin", n)
        want = Fraction(1, 2 * 3 ** (n - 1))
        keys = set(oracle.colored_motzkin_trees(n))
        ok = set(a.reach) == keys and a.values() == {want}
        out.append(Check(f"audit motzkin n={n}", ok, f"{len(a.reach)}/{len(keys)} trees"))
    plan = weighted.make_branch_plan(weighted.UnaryWeight(2), 4)
    for n in range(1, 5):
        a = oracle.exhaustive_path_audit("weighted", n, plan=plan)
        keys = set(oracle.colored_motzkin_trees(n))
        base = plan.c ** (n - 1) / 2
        ok = set(a.reach) == keys and all(v == base * 2 ** w.count("U") for (w, _), v in a.reach.items())
        out.append(Check(f"audit weighted u=2 n={n}", ok, f"{len(a.reach)}/{len(keys)} trees"))
    return out


def chi_square_checks(samples: int = 100_000, seed: int = 1) -> list[Check]:
    out = []
    for algorithm in ("rejection", "efficient", "remy-classic"):
        for n in range(2, 6):
            law = oracle.uniform_law(oracle.enumerate_binary(n))
            codes = catalan.sample_batch(n, samples, MeteredBitSource(seed), algorithm)["codes"]
            res = oracle.chi_square_test(oracle.TreeClassTable.from_codes(codes, law))
            out.append(Check(f"chi2 binary {algorithm} n={n}", res.passed, str(res)))
    for n in range(3, 8):
        law = oracle.uniform_law(oracle.enumerate_motzkin(n))
        codes = motzkin.sample_batch(n, samples, MeteredBitSource(seed))["codes"]
        res = oracle.chi_square_test(oracle.TreeClassTable.from_codes(codes, law))
        out.append(Check(f"chi2 motzkin n={n}", res.passed, str(res)))
    return out


def run_selftest(level: str = "quick", fcases=None) -> list[Check]:
    if level not in ("quick", "full"):
        raise ValueError(f"unknown level {level!r}")
    checks = battery_checks() + audit_checks(fcases)
    if level == "full":
        checks += chi_square_checks()
    return checks
