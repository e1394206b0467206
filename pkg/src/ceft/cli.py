"""Command-line entry point: ``ceft <subcommand> ...``.

Exit codes: 0 on success, 1 on a validation or parse error (message on
stderr), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bench, formats
from .core import critical_path
from .errors import CeftError
from .graph import validate
from .schedulers import ALGORITHMS, schedule
from .workloads import (DEFAULT_SEED, FAMILIES, CostParams, RggParams, beta_from_percent,
                        generate_fft, generate_gaussian_elimination, generate_rgg, standard_machine)


def _label(task: int, proc: int) -> str:
    return f"T{task + 1}@P{proc + 1}"


def _emit(text: str, out) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _cost_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=FAMILIES, default="classic")
    p.add_argument("--procs", type=int, default=4, help="processor count of the generated machine")
    p.add_argument("--beta", type=float, default=50.0, help="heterogeneity, percent")
    p.add_argument("--ccr", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("-o", "--output", help="graph file (default: stdout)")
    p.add_argument("--machine-out", help="also write the matching machine file")


def _header(args, kind: str, extra: str = "") -> str:
    return (f"# {kind} family={args.family} procs={args.procs} beta={args.beta:g} "
            f"ccr={args.ccr:g} gamma={args.gamma:g}{extra} seed={args.seed}\n")


def _write_generated(args, g, m, header: str) -> None:
    _emit(header + formats.format_graph(g), args.output)
    if args.machine_out:
        Path(args.machine_out).write_text(
            f"# machine procs={m.num_procs} seed={DEFAULT_SEED}\n" + formats.format_machine(m))


def cmd_gen_rgg(args) -> int:
    params = RggParams(n=args.n, o=args.outdeg, c=args.ccr, alpha=args.alpha,
                       beta=beta_from_percent(args.beta), gamma=args.gamma, seed=args.seed,
                       family=args.family)
    g, m = generate_rgg(params, args.procs)
    extra = f" n={args.n} outdeg={args.outdeg:g} alpha={args.alpha:g}"
    _write_generated(args, g, m, _header(args, "rgg", extra))
    return 0


def _costs(args) -> CostParams:
    return CostParams(args.family, args.procs, beta_from_percent(args.beta), args.ccr, args.gamma,
                      args.seed)


def cmd_gen_ge(args) -> int:
    costs = _costs(args)
    g = generate_gaussian_elimination(args.m, costs)
    _write_generated(args, g, standard_machine(args.procs), _header(args, "ge", f" m={args.m}"))
    return 0


def cmd_gen_fft(args) -> int:
    costs = _costs(args)
    g = generate_fft(args.m, costs)
    _write_generated(args, g, standard_machine(args.procs), _header(args, "fft", f" m={args.m}"))
    return 0


def _load(args):
    g = formats.load_graph(args.graph)
    m = formats.load_machine(args.machine)
    validate(g, m)
    return g, m


def cmd_critpath(args) -> int:
    g, m = _load(args)
    cp = critical_path(g, m, use_classes=args.classes)
    print(format(cp.length, ".12g"))
    print(" ".join(_label(t, p) for t, p in cp.steps))
    return 0


def cmd_schedule(args) -> int:
    g, m = _load(args)
    s = schedule(args.algo, g, m)
    print(f"makespan {s.makespan:.12g}")
    if args.output:
        Path(args.output).write_text(formats.format_schedule(s, args.algo))
    return 0


def cmd_validate(args) -> int:
    g, m = _load(args)
    print(f"ok: {g.num_tasks} tasks, {g.num_edges} edges, {m.num_procs} processors")
    return 0


def cmd_bench(args) -> int:
    unknown = [a for a in args.algos if a not in ALGORITHMS]
    if unknown:
        raise _UsageError(f"unknown algorithm(s) {unknown}; choose from {sorted(ALGORITHMS)}")
    config = bench.BenchConfig(families=tuple(args.families), n_values=tuple(args.n),
                               p_values=tuple(args.procs), graphs=args.graphs, seed=args.seed,
                               algorithms=tuple(args.algos), jobs=args.jobs, timing=args.timing)
    result = bench.run_benchmark(config)
    text = (f"# seed={args.seed} graphs={args.graphs} slr_denominator=ceft_critical_path\n"
            + bench.format_csv(result.rows))
    _emit(text, args.output)
    summary = bench.format_summary(result.summaries)
    # Keep stdout clean when the CSV goes there.
    (sys.stderr if args.output in (None, "-") else sys.stdout).write(summary)
    for f in result.failures:
        print(f"failed cell {f.workload}/{f.graph_id}/p={f.p}/{f.algo}: {f.error}", file=sys.stderr)
    if args.svg:
        bench.write_svg(result.summaries, args.svg)
    return 0


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ceft", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")

    p = sub.add_parser("gen-rgg", help="random layered task graph")
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--outdeg", type=float, default=2)
    p.add_argument("--alpha", type=float, default=1.0)
    _cost_flags(p)
    p.set_defaults(func=cmd_gen_rgg)

    p = sub.add_parser("gen-ge", help="Gaussian elimination task graph")
    p.add_argument("--m", type=int, required=True, help="matrix dimension")
    _cost_flags(p)
    p.set_defaults(func=cmd_gen_ge)

    p = sub.add_parser("gen-fft", help="FFT task graph")
    p.add_argument("--m", type=int, required=True, help="input vector size, a power of two")
    _cost_flags(p)
    p.set_defaults(func=cmd_gen_fft)

    for name, func, helptext in (("critpath", cmd_critpath, "CEFT critical path"),
                                 ("validate", cmd_validate, "check a graph/machine pair")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("graph")
        p.add_argument("machine")
        if name == "critpath":
            p.add_argument("--classes", action="store_true",
                           help="run on processor classes instead of processors")
        p.set_defaults(func=func)

    p = sub.add_parser("schedule", help="schedule a graph on a machine")
    p.add_argument("graph")
    p.add_argument("machine")
    p.add_argument("--algo", required=True, choices=sorted(ALGORITHMS))
    p.add_argument("-o", "--output", help="write placements here")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("bench", help="run the comparison grid and emit CSV")
    p.add_argument("--families", nargs="+", choices=FAMILIES, default=["classic", "high"])
    p.add_argument("--n", nargs="+", type=int, default=[128, 256])
    p.add_argument("--procs", nargs="+", type=int, default=[4, 16])
    p.add_argument("--graphs", type=int, default=200, help="graphs per family")
    p.add_argument("--algos", nargs="+", default=list(bench.DEFAULT_ALGORITHMS))
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="fill runtime_ms (breaks byte-identical reruns)")
    p.add_argument("-o", "--output", help="CSV file (default: stdout)")
    p.add_argument("--svg", help="write a summary bar chart (needs matplotlib)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"ceft: error: {exc}", file=sys.stderr)
        return 2
    except (CeftError, OSError) as exc:
        print(f"ceft: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
