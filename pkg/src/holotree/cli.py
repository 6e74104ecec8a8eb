"""Command line: ``holotree sample | bench | selftest``.

Sample ``i`` of a run with seed ``s`` draws from its own bit source seeded
with ``derive_seed(s, i)``, so output does not depend on ``--threads``.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from holotree import catalan, motzkin, weighted
from holotree.arena import InvariantError
from holotree.bitsource import MASK64, MeteredBitSource, derive_seed
from holotree.selftest import run_selftest

FAMILIES = ("binary", "motzkin", "weighted")
FORMATS = ("word", "json", "dot")
STATS_HEADER = ["index", "size", "bits", "restarts", "time_ns"]


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= value <= MASK64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _nonneg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return value


def _positive(text: str) -> int:
    value = _nonneg(text)
    if value == 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _weight(text: str) -> weighted.UnaryWeight:
    try:
        w = weighted.UnaryWeight.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None
    if w.numerator == 0:
        raise argparse.ArgumentTypeError("weight must be positive")
    return w


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(float(s)) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid size list {text!r}") from None
    if not sizes or min(sizes) < 0:
        raise argparse.ArgumentTypeError("sizes must be nonnegative")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="holotree", description="Exact random tree sampling with metered random bits.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="draw random trees")
    s.add_argument("--family", choices=FAMILIES, default="binary")
    s.add_argument("--size", type=_nonneg, required=True,
                   help="internal nodes for binary trees, total nodes otherwise")
    s.add_argument("--count", type=_nonneg, default=1)
    s.add_argument("--seed", type=_seed, default=0)
    s.add_argument("--algorithm", choices=tuple(catalan.ALGORITHMS), default=None,
                   help="binary only (default: efficient)")
    s.add_argument("--weight", type=_weight, default=None, help="unary weight a or a/2^k (weighted only)")
    s.add_argument("--format", choices=FORMATS, default="word")
    s.add_argument("--stats", metavar="PATH", default=None, help="write per-sample CSV here")
    s.add_argument("--threads", type=_positive, default=1)

    b = sub.add_parser("bench", help="bit and time cost per size, as CSV")
    b.add_argument("--family", choices=FAMILIES, default="binary")
    b.add_argument("--size", type=_sizes, required=True, help="comma-separated sizes, e.g. 1e3,1e4")
    b.add_argument("--count", type=_positive, default=100)
    b.add_argument("--seed", type=_seed, default=0)
    b.add_argument("--weight", type=_weight, default=None)

    t = sub.add_parser("selftest", help="round-trip batteries, exact audits, chi-square suites")
    t.add_argument("--level", choices=("quick", "full"), default="quick")
    return p


def _validate_config(parser, args) -> None:
    if args.family != "binary" and args.algorithm is not None:
        parser.error("--algorithm applies to the binary family only")
    if args.family != "weighted" and args.weight is not None:
        parser.error("--weight applies to the weighted family only")
    if args.family == "weighted" and args.weight is None:
        parser.error("the weighted family needs --weight")
    if args.family != "binary" and args.size < 1:
        parser.error("motzkin and weighted trees have at least one node")
    if args.family == "weighted" and args.size > weighted.DEFAULT_MAX_SIZE:
        parser.error(f"weighted sizes are capped at {weighted.DEFAULT_MAX_SIZE}")


def _sampler(args):
    if args.family == "binary":
        fn = catalan.ALGORITHMS[args.algorithm or "efficient"]
        return lambda src: fn(args.size, src)
    if args.family == "motzkin":
        return lambda src: motzkin.sample_motzkin(args.size, src)
    plan_weight = args.weight
    return lambda src: weighted.sample_weighted(args.size, plan_weight, src)


def _render(tree, fmt: str, index: int) -> str:
    if fmt == "word":
        return tree.to_word()
    if fmt == "json":
        return tree.to_json()
    return f"// sample {index}\n{tree.to_dot()}"


def cmd_sample(args) -> int:
    draw = _sampler(args)
    binary = args.family == "binary"

    def one(i: int):
        tree, report = draw(MeteredBitSource(derive_seed(args.seed, i)))
        tree.validate(binary=binary)
        return _render(tree, args.format, i), report

    with ThreadPoolExecutor(max_workers=args.threads) as pool:
        results = pool.map(one, range(args.count), chunksize=64) if args.threads > 1 else map(one, range(args.count))
        out = sys.stdout
        rows = []
        for i, (text, report) in enumerate(results):
            out.write(text + "\n")
            rows.append((i, report.size, report.bits_consumed, report.restarts, report.wall_time_ns))
    out.flush()
    if args.stats:
        with open(args.stats, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(STATS_HEADER)
            w.writerows(rows)
    return 0


def entropy_proxy(family: str, n: int) -> float:
    """Rough information content of one sample: 2n bits for binary trees,
    n log2(3) for unary-binary ones."""
    if family == "binary":
        return 2.0 * n
    if family == "motzkin":
        return n * math.log2(3)
    return math.nan


def bench_rows(family: str, sizes, count: int, seed: int, weight=None):
    if family == "binary":
        configs = [("efficient", lambda n, c, src: catalan.sample_batch(n, c, src, "efficient", codes=False)),
                   ("remy-classic", lambda n, c, src: catalan.sample_batch(n, c, src, "remy-classic", codes=False))]
    elif family == "motzkin":
        configs = [("grafting", lambda n, c, src: motzkin.sample_batch(n, c, src, codes=False))]
    else:
        configs = [(f"u={weight}", lambda n, c, src: weighted.sample_batch(n, c, weight, src))]
    for n in sizes:
        for name, run in configs:
            src = MeteredBitSource(seed)
            t0 = time.perf_counter_ns()
            out = run(n, count, src)
            elapsed = time.perf_counter_ns() - t0
            mean_bits = float(out["bits"].mean())
            nodes = 2 * n + 1 if family == "binary" else n
            yield {
                "family": family,
                "algorithm": name,
                "size": n,
                "count": count,
                "mean_bits": round(mean_bits, 3),
                "excess_bits": round(mean_bits - entropy_proxy(family, n), 3),
                "mean_time_ns": elapsed // count,
                "nodes_per_s": round(nodes * count / (elapsed * 1e-9)) if elapsed else 0,
            }


def cmd_bench(args) -> int:
    if args.family == "weighted":
        if args.weight is None:
            raise SystemExit("bench: the weighted family needs --weight")
        if max(args.size) > 31:
            raise SystemExit("bench: weighted sizes are limited to 31")
    rows = list(bench_rows(args.family, args.size, args.count, args.seed, args.weight))
    w = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return 0


def cmd_selftest(args) -> int:
    checks = run_selftest(args.level)
    for c in checks:
        print(c)
    failed = sum(not c.ok for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "sample":
            _validate_config(parser, args)
            return cmd_sample(args)
        if args.command == "bench":
            return cmd_bench(args)
        return cmd_selftest(args)
    except SystemExit as e:
        if isinstance(e.code, str):
            print(e.code, file=sys.stderr)
            return 2
        raise
    except InvariantError as e:
        print(f"invariant violation: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
