"""``qkbench`` command line: single runs, suites, tables and dataset dumps."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import bench
from .data import DATASETS, gen_adhoc_zz, write_split_csv
from .errors import ConfigurationError, DataFormatError

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


def _cmd_run(args) -> int:
    config = bench.RunConfig(
        dataset=args.dataset, method=args.method, param=args.param, qkt=args.qkt,
        max_iterations=args.iters, C=args.C, seed=args.seed, budget_seconds=args.budget_seconds,
    )
    record = bench.run_benchmark(config)
    print(bench.summarize(record))
    if args.out:
        out = Path(args.out)
        bench.write_records([record], out)
        if record.qkt is not None:
            report_path = out.with_name(out.stem + ".qkt.json")
            report_path.write_text(json.dumps(record.qkt))
    return EXIT_OK


def _cmd_suite(args) -> int:
    return bench.run_suite(args.manifest, args.out, jobs=args.jobs,
                           progress=lambda r: print(bench.summarize(r), flush=True))


def _cmd_table(args) -> int:
    records = bench.read_records(args.input)
    datasets = DATASETS if args.dataset == "all" else [args.dataset]
    print("\n".join(bench.emit_table(records, d, fmt=args.format, reference=args.reference)
                    for d in datasets), end="")
    return EXIT_OK


def _cmd_gen_data(args) -> int:
    split = gen_adhoc_zz(n_per_class=args.n_per_class, gap=args.gap, seed=args.seed)
    write_split_csv(split, args.out)
    print(f"wrote {len(split.y_train) + len(split.y_test)} points to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qkbench", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one benchmark configuration")
    run.add_argument("--dataset", required=True, choices=DATASETS)
    run.add_argument("--method", required=True, choices=bench.METHODS)
    run.add_argument("--param", choices=bench.PARAMETERIZATIONS)
    run.add_argument("--qkt", action="store_true", help="train the fiducial layer with 2-SPSA")
    run.add_argument("--iters", type=int, default=400, help="QKT iterations (default 400)")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--C", type=float, default=1.0)
    run.add_argument("--budget-seconds", type=float, help="stop QKT after this much wall time")
    run.add_argument("--out", help="JSON-lines record file; the QKT report goes next to it")
    run.set_defaults(func=_cmd_run)

    suite = sub.add_parser("suite", help="run every entry of a JSON manifest")
    suite.add_argument("--manifest", required=True)
    suite.add_argument("--out", default="results", help="output directory (default: results)")
    suite.add_argument("--jobs", type=int, default=1)
    suite.set_defaults(func=_cmd_suite)

    table = sub.add_parser("table", help="render a result table from a records file")
    table.add_argument("--in", dest="input", required=True)
    table.add_argument("--dataset", required=True, choices=DATASETS + ("all",))
    table.add_argument("--format", choices=("text", "csv"), default="text")
    table.add_argument("--reference", action="store_true", help="append published reference values")
    table.set_defaults(func=_cmd_table)

    gen = sub.add_parser("gen-data", help="generate and dump a synthetic dataset")
    gen.add_argument("--dataset", required=True, choices=("adhoc-zz",))
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--gap", type=float, default=0.3)
    gen.add_argument("--n-per-class", type=int, default=100)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen_data)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigurationError, DataFormatError, FileNotFoundError) as exc:
        print(f"qkbench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
