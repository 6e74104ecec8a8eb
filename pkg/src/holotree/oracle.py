"""Ground truth for the samplers.

Exhaustive enumeration of small trees, exact counts from the holonomic
recurrences, weighted masses, a Pearson chi-square test, an exact
path audit that enumerates every run of a sampler kernel, and round-trip
batteries for all bijections.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from statistics import NormalDist

from holotree import catalan, motzkin, weighted
from holotree.arena import TreeArena, decode
from holotree.bitsource import ChoiceScript
from holotree.pointing import ColorPoint, color_points, plain_points, repoint, repoint_inverse
from holotree.report import NEED, OK

MAX_ENUM = 12


# -- enumeration and counting -------------------------------------------------

@lru_cache(maxsize=None)
def _binary_words(n: int) -> tuple[str, ...]:
    if n == 0:
        return ("L",)
    out = []
    for k in range(n):
        for left in _binary_words(k):
            for right in _binary_words(n - 1 - k):
                out.append("B" + left + right)
    return tuple(out)


@lru_cache(maxsize=None)
def _motzkin_words(n: int) -> tuple[str, ...]:
    if n == 1:
        return ("L",)
    out = ["U" + w for w in _motzkin_words(n - 1)]
    for k in range(1, n - 1):
        for left in _motzkin_words(k):
            for right in _motzkin_words(n - 1 - k):
                out.append("B" + left + right)
    return tuple(out)


def enumerate_binary(n: int) -> list[str]:
    """All binary trees with ``n`` internal nodes, as sorted preorder words."""
    if not 0 <= n <= MAX_ENUM:
        raise ValueError(f"enumeration is limited to 0 <= n <= {MAX_ENUM}")
    return sorted(_binary_words(n))


def enumerate_motzkin(n: int) -> list[str]:
    """All unary-binary trees with ``n`` nodes, as sorted preorder words."""
    if not 1 <= n <= MAX_ENUM:
        raise ValueError(f"enumeration is limited to 1 <= n <= {MAX_ENUM}")
    return sorted(_motzkin_words(n))


def count_binary(n: int) -> int:
    """Catalan number C_n: C_0 = 1, C_{k+1} = C_k * 2(2k+1) / (k+2)."""
    c = 1
    for k in range(n):
        c = c * 2 * (2 * k + 1) // (k + 2)
    return c


def motzkin_number(k: int) -> int:
    """M_0 = M_1 = 1, (k+2) M_k = (2k+1) M_{k-1} + 3(k-1) M_{k-2}."""
    a, b = 1, 1
    for j in range(2, k + 1):
        a, b = b, ((2 * j + 1) * b + 3 * (j - 1) * a) // (j + 2)
    return b if k >= 1 else a


def count_motzkin(n: int) -> int:
    """Number of unary-binary trees with ``n`` nodes (``M_{n-1}``)."""
    return motzkin_number(n - 1) if n >= 1 else 0


def weighted_mass(n: int, u) -> Fraction:
    """Sum over unary-binary trees of size ``n`` of ``u ** (#unary nodes)``."""
    u = Fraction(u)
    w = [Fraction(0), Fraction(1)]
    for m in range(2, n + 1):
        w.append(u * w[m - 1] + sum(w[i] * w[m - 1 - i] for i in range(1, m - 1)))
    return w[n] if n >= 1 else Fraction(0)


def weighted_law(n: int, u) -> dict[str, Fraction]:
    u = Fraction(u)
    total = weighted_mass(n, u)
    return {w: u ** w.count("U") / total for w in enumerate_motzkin(n)}


def uniform_law(words) -> dict[str, Fraction]:
    words = list(words)
    return {w: Fraction(1, len(words)) for w in words}


# -- chi-square -------------------------------------------------------------

@dataclass
class TreeClassTable:
    """Observed counts per canonical word against an expected law."""

    expected: dict[str, Fraction]
    counts: Counter = field(default_factory=Counter)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def add(self, word: str, k: int = 1) -> None:
        self.counts[word] += k

    @classmethod
    def from_codes(cls, codes, expected) -> TreeClassTable:
        t = cls(dict(expected))
        for code, k in Counter(codes.tolist()).items():
            t.add(decode(code), k)
        return t

    def rows(self):
        n = self.total
        for w in sorted(self.expected):
            e = float(self.expected[w]) * n
            o = self.counts.get(w, 0)
            yield w, e, o, (o - e) ** 2 / e if e else math.inf

    def to_csv(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["class", "expected", "observed", "contribution"])
        for w, e, o, c in self.rows():
            out.writerow([w, f"{e:.3f}", o, f"{c:.4f}"])
        return buf.getvalue()


@dataclass
class ChiSquareResult:
    statistic: float
    threshold: float
    dof: int
    passed: bool

    def __str__(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        return f"chi2={self.statistic:.2f} < {self.threshold:.2f} (dof {self.dof}): {verdict}"


def chi_square_quantile(dof: int, q: float) -> float:
    """Wilson-Hilferty approximation of the chi-square ``q`` quantile."""
    z = NormalDist().inv_cdf(q)
    h = 2.0 / (9.0 * dof)
    return dof * (1.0 - h + z * math.sqrt(h)) ** 3


def chi_square_test(table: TreeClassTable, significance: float = 0.001) -> ChiSquareResult:
    unknown = set(table.counts) - set(table.expected)
    if unknown:
        raise ValueError(f"observed classes outside the expected law: {sorted(unknown)[:5]}")
    rows = list(table.rows())
    if len(rows) < 2:
        raise ValueError("a chi-square test needs at least two classes")
    if any(e < 5 for _, e, _, _ in rows):
        raise ValueError("every expected class count must be at least 5")
    stat = sum(c for *_, c in rows)
    dof = len(rows) - 1
    threshold = chi_square_quantile(dof, 1.0 - significance)
    return ChiSquareResult(stat, threshold, dof, stat < threshold)


# -- exhaustive path audit ----------------------------------------------------

def canonical_key(t: TreeArena, point=None) -> tuple[str, str]:
    """Word plus the point renamed to its preorder position."""
    pos = t.positions()
    if isinstance(point, ColorPoint):
        p = str(ColorPoint(point.color, pos[point.node]))
    elif point is None:
        p = "bottom"
    else:
        p = str(pos[point])
    return t.to_word(), p


@dataclass
class AuditResult:
    reach: dict[tuple[str, str], Fraction]
    fail: Fraction
    overshoot: Fraction
    runs: int

    @property
    def success(self) -> Fraction:
        return sum(self.reach.values(), Fraction(0))

    def values(self) -> set[Fraction]:
        return set(self.reach.values())


def walk_choices(run, branch_weights):
    """Depth-first walk over every sequence of choices a kernel can request.

    ``run(src)`` executes the kernel on a :class:`ChoiceScript`; when the
    script runs out the kernel reports the arity of the pending choice and
    the walk branches over it with weights ``branch_weights(arity)``.
    Yields ``(probability, run result)`` for every completed run.
    """
    stack = [((), Fraction(1))]
    while stack:
        choices, prob = stack.pop()
        src = ChoiceScript(choices)
        result = run(src)
        if result.status == NEED:
            for j, w in enumerate(branch_weights(src.pending)):
                if w:
                    stack.append((choices + (j,), prob * w))
        else:
            yield prob, result


def _uniform_weights(m: int) -> list[Fraction]:
    return [Fraction(1, m)] * m


def exhaustive_path_audit(family: str, n: int, plan=None, fcases=None) -> AuditResult:
    """Exact reach probability of every colored tree a single try ends on.

    ``family`` is ``binary`` (faithful first try), ``binary-red`` (red
    start), ``binary-efficient`` (the never-failing sampler after ``n``
    steps), ``motzkin`` or ``weighted`` (needs ``plan``).
    """
    limits = {"binary": 6, "binary-red": 6, "binary-efficient": 5, "motzkin": 8, "weighted": 7}
    if family not in limits:
        raise ValueError(f"unknown family {family!r}")
    if n > limits[family]:
        raise ValueError(f"{family} audit is limited to n <= {limits[family]}")
    weights = _uniform_weights
    target = None
    if family.startswith("binary"):
        mode = {"binary": catalan.TRY_FAITHFUL, "binary-red": catalan.TRY, "binary-efficient": catalan.EFFICIENT}[family]
        table = catalan.FCASES if fcases is None else fcases

        def run(src):
            return catalan.run_binary(n, src, mode, fcases=table)
    elif family == "motzkin":
        target = n

        def run(src):
            return motzkin.run_motzkin(n, src)
    else:
        if plan is None:
            raise ValueError("the weighted audit needs a branch plan")
        target = n
        probs = plan.probabilities()

        def weights(m):
            return probs if m < 0 else _uniform_weights(m)

        def run(src):
            return weighted.run_weighted(n, plan, src)

    reach: dict = {}
    fail = overshoot = Fraction(0)
    runs = 0
    for prob, result in walk_choices(run, weights):
        runs += 1
        if result.status != OK:
            fail += prob
        elif target is not None and result.tree.size != target:
            overshoot += prob
        else:
            result.tree.validate(binary=family.startswith("binary"))
            key = canonical_key(result.tree, result.point)
            reach[key] = reach.get(key, Fraction(0)) + prob
    return AuditResult(reach, fail, overshoot, runs)


def colored_binary_trees(n: int) -> list[tuple[str, str]]:
    out = []
    for w in enumerate_binary(n):
        t = TreeArena.from_word(w)
        out += [canonical_key(t, cp) for cp in color_points(t)]
    return out


def colored_motzkin_trees(n: int) -> list[tuple[str, str]]:
    out = []
    for w in enumerate_motzkin(n):
        t = TreeArena.from_word(w)
        out += [canonical_key(t, cp) for cp in color_points(t)]
    return out


# -- bijection batteries -------------------------------------------------------

@dataclass
class BatteryResult:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def check(self, cond: bool, what) -> None:
        self.checked += 1
        if not cond:
            self.failures.append(what)

    def __str__(self) -> str:
        return f"{self.name}: {self.checked} checks, {len(self.failures)} failures"


def binary_words_upto(size: int) -> list[str]:
    return [w for k in range((size - 1) // 2 + 1) for w in enumerate_binary(k)]


def motzkin_words_upto(size: int) -> list[str]:
    return [w for k in range(1, size + 1) for w in enumerate_motzkin(k)]


def battery_repoint(words) -> BatteryResult:
    res = BatteryResult("repoint")
    for w in words:
        t = TreeArena.from_word(w)
        bottoms = 0
        for cp in color_points(t):
            v = repoint(t, cp)
            bottoms += v is None
            res.check(repoint_inverse(t, v) == cp, (w, str(cp)))
        for v in plain_points(t):
            res.check(repoint(t, repoint_inverse(t, v)) == v, (w, v))
        rl = t.rightmost_leaf(t.root)
        res.check(bottoms == 1 and repoint(t, ColorPoint(0, rl)) is None, (w, "bottom"))
        res.check(t.to_word() == w, (w, "tree modified"))
    return res


def battery_F(max_size: int = 11) -> BatteryResult:
    """F^-1 then F on all colored trees of size 3..max_size, and F then F^-1
    on all plain-pointed trees of size up to max_size - 2, every case."""
    res = BatteryResult("F")
    for w in binary_words_upto(max_size):
        t0 = TreeArena.from_word(w)
        if t0.size >= 3:
            for cp in color_points(t0):
                t = t0.copy()
                case = catalan.f_case_of(t, cp)
                v = catalan.graft_F_inverse(t, cp)
                t.validate(binary=True)
                back = catalan.graft_F(t, v, case)
                t.validate(binary=True)
                res.check(canonical_key(t, back) == canonical_key(t0, cp), (w, str(cp)))
        if t0.size + 2 <= max_size:
            for v in t0.nodes():
                for case in catalan.FCase:
                    t = t0.copy()
                    cp = catalan.graft_F(t, v, case)
                    t.validate(binary=True)
                    ok = catalan.f_case_of(t, cp) == case
                    back = catalan.graft_F_inverse(t, cp)
                    res.check(ok and back == v and t.to_word() == w, (w, v, case.name))
    return res


def _apply_G(t: TreeArena, case, point):
    if case == motzkin.GCase.G1:
        return motzkin.graft_G1(t, point)
    if case == motzkin.GCase.G2:
        return motzkin.graft_G2(t, point)
    return motzkin.graft_G345(t, point, case)


def _apply_H(t: TreeArena, case, point):
    return weighted.graft_H(t, point, case)


def _battery_graft(name, words, max_size, inverse, apply, forward_cases) -> BatteryResult:
    res = BatteryResult(name)
    for w in words:
        t0 = TreeArena.from_word(w)
        if t0.size >= 2:
            for cp in color_points(t0):
                t = t0.copy()
                case, point = inverse(t, cp)
                t.validate()
                back = apply(t, case, point)
                t.validate()
                res.check(canonical_key(t, back) == canonical_key(t0, cp), (w, str(cp)))
        for case, grow, colored in forward_cases:
            if t0.size + grow > max_size:
                continue
            points = color_points(t0) if colored else t0.nodes()
            for point in points:
                if colored and not _colored_ok(case, point):
                    continue
                t = t0.copy()
                cp = apply(t, case, point)
                t.validate()
                case2, back = inverse(t, cp)
                res.check(case2 == case and back == point and t.to_word() == w, (w, str(point), case.name))
    return res


def _colored_ok(case, cp: ColorPoint) -> bool:
    if case == weighted.HCase.H1:
        return cp.color == 1
    if case == weighted.HCase.H2:
        return cp.color == 0
    return True


def battery_G(max_size: int = 8) -> BatteryResult:
    G = motzkin.GCase
    forward = [(G.G1, 1, True), (G.G2, 1, False), (G.G3, 2, False), (G.G4, 2, False), (G.G5, 2, False)]
    return _battery_graft("G", motzkin_words_upto(max_size), max_size, motzkin.graft_G_inverse, _apply_G, forward)


def battery_H(max_size: int = 6) -> BatteryResult:
    H = weighted.HCase
    forward = [(H.H1, 1, True), (H.H2, 1, True), (H.H3, 1, False)] + [(h, 2, False) for h in (H.H4, H.H5, H.H6, H.H7)]
    return _battery_graft("H", motzkin_words_upto(max_size), max_size, weighted.graft_H_inverse, _apply_H, forward)
