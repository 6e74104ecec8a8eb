import csv
import json
import subprocess
import sys

import pytest

from holotree import catalan, motzkin
from holotree.bitsource import MeteredBitSource, derive_seed
from holotree.cli import main
from holotree.selftest import audit_checks


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sample_single_leaf(capsys):
    code, out, _ = run(["sample", "--family", "binary", "--size", "0", "--count", "1"], capsys)
    assert code == 0 and out == "L\n"


def test_sample_is_deterministic(capsys):
    args = ["sample", "--family", "binary", "--size", "2", "--count", "3", "--seed", "7"]
    _, a, _ = run(args, capsys)
    _, b, _ = run(args, capsys)
    _, c, _ = run(args + ["--threads", "3"], capsys)
    assert a == b == c and len(a.splitlines()) == 3


def test_sample_matches_library(capsys):
    _, out, _ = run(["sample", "--family", "motzkin", "--size", "12", "--count", "4", "--seed", "99"], capsys)
    expected = [motzkin.sample_motzkin(12, MeteredBitSource(derive_seed(99, i)))[0].to_word() for i in range(4)]
    assert out.split() == expected


def test_json_and_dot_formats(capsys):
    _, out, _ = run(["sample", "--family", "weighted", "--weight", "2", "--size", "4", "--count", "2",
                     "--format", "json"], capsys)
    records = [json.loads(line) for line in out.splitlines()]
    assert all(r["size"] == 4 and len(r["word"]) == 4 for r in records)
    _, out, _ = run(["sample", "--size", "1", "--count", "2", "--format", "dot"], capsys)
    assert out.count("digraph") == 2 and out.count("// sample") == 2


def test_stats_csv(tmp_path, capsys):
    path = tmp_path / "s.csv"
    code, _, _ = run(["sample", "--family", "motzkin", "--size", "5", "--count", "2000", "--seed", "3",
                      "--stats", str(path)], capsys)
    assert code == 0
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["index", "size", "bits", "restarts", "time_ns"]
    assert len(rows) == 2001
    assert {r[1] for r in rows[1:]} == {"5"}
    # bits column equals the counter of an independent source
    for i in (0, 17, 1999):
        src = MeteredBitSource(derive_seed(3, i))
        motzkin.sample_motzkin(5, src)
        assert int(rows[i + 1][2]) == src.bits_consumed


@pytest.mark.parametrize(
    "args",
    [
        ["sample", "--size", "-1"],
        ["sample", "--size", "3", "--family", "motzkin", "--algorithm", "efficient"],
        ["sample", "--size", "3", "--family", "weighted"],
        ["sample", "--size", "3", "--weight", "1/3", "--family", "weighted"],
        ["sample", "--size", "100", "--weight", "1", "--family", "weighted"],
        ["sample", "--size", "0", "--family", "motzkin"],
        ["sample", "--size", "3", "--format", "xml"],
        ["sample"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_2(args, capsys):
    with pytest.raises(SystemExit) as e:
        main(args)
    assert e.value.code == 2


def test_bench_csv(capsys):
    code, out, _ = run(["bench", "--size", "100,1000", "--count", "50"], capsys)
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 0 and len(rows) == 4
    assert {r["algorithm"] for r in rows} == {"efficient", "remy-classic"}
    eff = [r for r in rows if r["algorithm"] == "efficient"]
    assert float(eff[0]["excess_bits"]) == pytest.approx(float(eff[0]["mean_bits"]) - 200)
    code, out, _ = run(["bench", "--family", "motzkin", "--size", "500", "--count", "20"], capsys)
    assert code == 0 and "grafting" in out
    code, out, _ = run(["bench", "--family", "weighted", "--weight", "2", "--size", "6", "--count", "20"], capsys)
    assert code == 0


def test_selftest_quick(capsys):
    code, out, _ = run(["selftest", "--level", "quick"], capsys)
    assert code == 0 and "FAIL" not in out


def test_selftest_detects_flipped_cases():
    broken = catalan.FCASES.copy()
    broken[1] = broken[3]  # F2 now duplicates F4
    assert not all(c.ok for c in audit_checks(broken))


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "holotree", "sample", "--size", "3", "--seed", "1"],
                         capture_output=True, text=True, check=True)
    assert len(out.stdout.strip()) == 7
