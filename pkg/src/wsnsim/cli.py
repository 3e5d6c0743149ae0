"""Command-line interface.

Subcommands: run, bench-scale, sweep-energy, report, describe.
The WSNSIM_OUT environment variable overrides the default output directory.
"""

from __future__ import annotations

import argparse
import sys

from .energy import MODEL_KINDS
from .evalkit import DescriptorError, comparison_table, load_descriptor
from .harness import (
    SweepGrid,
    bench_scale,
    default_output_dir,
    emit_report,
    report_from_dir,
    run_scenario,
    sweep_energy,
)
from .scenario import BC_COUNTS, ScenarioError


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part]


def _float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part]


def _str_list(text: str) -> list[str]:
    return [part for part in text.split(",") if part]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wsnsim",
        description="Deterministic WSN simulator and benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario file")
    p_run.add_argument("scenario", help="scenario YAML file")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--model", choices=MODEL_KINDS, default="sm")
    p_run.add_argument("--out", default=None, help="output directory for CSV files")

    p_bench = sub.add_parser("bench-scale", help="mesh scaling benchmark")
    p_bench.add_argument("--bc", type=_int_list, default=list(BC_COUNTS),
                         help="comma-separated basic-component counts")
    p_bench.add_argument("--seed", type=int, default=1)
    p_bench.add_argument("--out", default=None)

    p_sweep = sub.add_parser("sweep-energy", help="protocol x payload x frequency sweep")
    p_sweep.add_argument("--protocols", type=_str_list,
                         default=list(SweepGrid().protocols))
    p_sweep.add_argument("--payloads", type=_int_list,
                         default=list(SweepGrid().payloads))
    p_sweep.add_argument("--freqs", type=_float_list,
                         default=list(SweepGrid().frequencies))
    p_sweep.add_argument("--model", choices=MODEL_KINDS, default="sm")
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--seed", type=int, default=1)
    p_sweep.add_argument("--out", default=None)

    p_report = sub.add_parser("report", help="render a report from emitted CSV files")
    p_report.add_argument("dir", help="directory containing runs.csv / energy.csv")

    p_desc = sub.add_parser("describe", help="simulator descriptor tools")
    desc_sub = p_desc.add_subparsers(dest="describe_command", required=True)
    p_validate = desc_sub.add_parser("validate", help="validate a descriptor file")
    p_validate.add_argument("file")
    p_compare = desc_sub.add_parser("compare", help="criteria matrix for descriptors")
    p_compare.add_argument("files", nargs="+")
    p_compare.add_argument("--out", default=None, help="write the matrix to a file")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            out = default_output_dir(args.out)
            report = run_scenario(args.scenario, seed=args.seed, model=args.model,
                                  out_dir=out)
            emit_report([report], out / "report.txt")
            print(f"run {report.run_id}: {report.events} events, "
                  f"{report.total_j():.6g} J total, wall {report.wall_ms:.1f} ms")
            print(f"wrote {out / 'runs.csv'}, {out / 'energy.csv'}, {out / 'report.txt'}")
        elif args.command == "bench-scale":
            out = default_output_dir(args.out)
            reports = bench_scale(args.bc, seed=args.seed, out_dir=out)
            emit_report(reports, out / "report.txt")
            for r in reports:
                print(f"bc={r.nodes // 4:>4} nodes={r.nodes:>4} events={r.events:>10} "
                      f"wall={r.wall_ms:>10.1f} ms")
            print(f"wrote {out / 'runs.csv'}, {out / 'report.txt'}")
        elif args.command == "sweep-energy":
            out = default_output_dir(args.out)
            grid = SweepGrid(protocols=tuple(args.protocols),
                             payloads=tuple(args.payloads),
                             frequencies=tuple(args.freqs))
            reports = sweep_energy(grid, seed=args.seed, model=args.model,
                                   workers=args.workers, out_dir=out)
            emit_report(reports, out / "report.txt")
            print(f"{len(reports)} runs; wrote {out / 'runs.csv'}, "
                  f"{out / 'energy.csv'}, {out / 'report.txt'}")
        elif args.command == "report":
            print(report_from_dir(args.dir), end="")
        elif args.command == "describe":
            if args.describe_command == "validate":
                descriptor = load_descriptor(args.file)
                print(f"OK: {args.file} describes {descriptor.name}")
            else:
                descriptors = [load_descriptor(f) for f in args.files]
                matrix = comparison_table(descriptors)
                if args.out:
                    with open(args.out, "w", encoding="utf-8") as fh:
                        fh.write(matrix.text())
                    print(f"wrote {args.out}")
                else:
                    print(matrix.text(), end="")
        return 0
    except (ScenarioError, DescriptorError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
