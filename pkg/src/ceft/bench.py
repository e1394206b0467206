"""Batch experiment harness: generate graphs, run schedulers, collect metrics.

A cell is one (family, graph, processor count) triple.  Within a cell the
CEFT critical path is computed once and shared by every algorithm: it is the
CPL reported for CEFT-CPOP and supplies the task set in every SLR denominator.
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

import numpy as np

from . import metrics
from .core import critical_path
from .schedulers import ALGORITHMS, schedule_cpop
from .workloads import (DEFAULT_SEED, GRID_ALPHA, GRID_BETA_PERCENT, GRID_CCR, GRID_GAMMA, GRID_O,
                        RggParams, beta_from_percent, generate_rgg)

CSV_HEADER = ("workload,graph_id,n,p,alpha,beta,gamma,ccr,outdeg,seed,algo,cpl,makespan,"
              "speedup,slr,slack,runtime_ms").split(",")

DEFAULT_ALGORITHMS = ("heft", "cpop", "ceft-cpop")

# The CSV's cpl column:
#   ceft-cpop: CEFT critical-path length
#   cpop:      CPOP's path summed on its single chosen processor
#   others:    empty, these schedulers have no critical path of their own


@dataclass(frozen=True)
class GraphSpec:
    graph_id: int
    n: int
    alpha: float
    beta_percent: float
    gamma: float
    ccr: float
    outdeg: int
    seed: int

    def params(self, family: str) -> RggParams:
        return RggParams(n=self.n, o=self.outdeg, c=self.ccr, alpha=self.alpha,
                         beta=beta_from_percent(self.beta_percent), gamma=self.gamma,
                         seed=self.seed, family=family)


@dataclass
class BenchConfig:
    families: tuple = ("classic", "high")
    n_values: tuple = (128, 256)
    p_values: tuple = (4, 16)
    graphs: int = 200  # per family
    seed: int = DEFAULT_SEED
    algorithms: tuple = DEFAULT_ALGORITHMS
    jobs: int = 1
    timing: bool = False


@dataclass
class MetricRow:
    workload: str
    graph_id: int
    n: int
    p: int
    alpha: float
    beta: float  # percent, as on the command line
    gamma: float
    ccr: float
    outdeg: int
    seed: int
    algo: str
    cpl: Optional[float]
    makespan: float
    speedup: float
    slr: float
    slack: float
    runtime_ms: Optional[float] = None


@dataclass(frozen=True)
class CellFailure:
    workload: str
    graph_id: int
    p: int
    algo: str
    error: str


@dataclass
class BenchResult:
    rows: list
    failures: list
    summaries: list = field(default_factory=list)

    def summary(self, algo_a, algo_b, metric):
        for s in self.summaries:
            if (s.algo_a, s.algo_b, s.metric) == (algo_a, algo_b, metric):
                return s
        raise KeyError((algo_a, algo_b, metric))


def sample_graph_specs(config: BenchConfig) -> list:
    """Draw one parameter set per graph id from the experiment grids.

    The draw depends only on (seed, graph id), so every family sees the same
    structure for a given graph id.
    """
    specs = []
    for gid in range(config.graphs):
        rng = np.random.default_rng([config.seed, gid])
        specs.append(GraphSpec(
            graph_id=gid,
            n=int(config.n_values[gid % len(config.n_values)]),
            alpha=float(rng.choice(GRID_ALPHA)),
            beta_percent=float(rng.choice(GRID_BETA_PERCENT)),
            gamma=float(rng.choice(GRID_GAMMA)),
            ccr=float(rng.choice(GRID_CCR)),
            outdeg=int(rng.choice(GRID_O)),
            seed=int(rng.integers(2**31 - 1)),
        ))
    return specs


def run_cell(family: str, spec: GraphSpec, procs: int, algorithms, timing: bool = False):
    """All algorithms on one generated instance; returns (rows, failures)."""
    rows, failures = [], []
    base = dict(workload=family, graph_id=spec.graph_id, n=spec.n, p=procs, alpha=spec.alpha,
                beta=spec.beta_percent, gamma=spec.gamma, ccr=spec.ccr, outdeg=spec.outdeg,
                seed=spec.seed)
    try:
        g, m = generate_rgg(spec.params(family), procs)
        cp = critical_path(g, m)
    except Exception as exc:  # noqa: BLE001 - recorded, not fatal
        return [], [CellFailure(family, spec.graph_id, procs, "*", repr(exc))]
    for algo in algorithms:
        try:
            t0 = time.perf_counter()
            if algo == "cpop":
                s, cpop_path = schedule_cpop(g, m)
                cpl = cpop_path.length
            else:
                s = ALGORITHMS[algo](g, m)
                cpl = cp.length if algo == "ceft-cpop" else None
            elapsed = (time.perf_counter() - t0) * 1e3
            rows.append(MetricRow(
                **base, algo=algo, cpl=cpl, makespan=s.makespan,
                speedup=metrics.speedup(g, m, s), slr=metrics.slr(g, m, s, cp),
                slack=metrics.slack(g, m, s), runtime_ms=elapsed if timing else None,
            ))
        except Exception as exc:  # noqa: BLE001
            failures.append(CellFailure(family, spec.graph_id, procs, algo, repr(exc)))
    return rows, failures


def _run_unit(args):
    return run_cell(*args)


def summarize(rows, algorithms) -> list:
    """Pairwise longer/equal/shorter tallies of each algorithm against every earlier one.

    With the default order this yields ceft-cpop vs cpop, the headline pair.
    """
    by_cell = {}
    for r in rows:
        by_cell.setdefault((r.workload, r.graph_id, r.p), {})[r.algo] = r
    summaries = []
    for metric in ("cpl", "makespan", "speedup", "slr", "slack"):
        for ia, a in enumerate(algorithms):
            for b in algorithms[:ia]:
                pairs = []
                for cell in by_cell.values():
                    if a in cell and b in cell:
                        va, vb = getattr(cell[a], metric), getattr(cell[b], metric)
                        if va is not None and vb is not None:
                            pairs.append((va, vb))
                if pairs:
                    summaries.append(metrics.pairwise(pairs, a, b, metric))
    return summaries


def run_benchmark(config: BenchConfig) -> BenchResult:
    unknown = [a for a in config.algorithms if a not in ALGORITHMS]
    if unknown:
        raise ValueError(f"unknown algorithms {unknown}; choose from {sorted(ALGORITHMS)}")
    specs = sample_graph_specs(config)
    units = [(family, spec, p, tuple(config.algorithms), config.timing)
             for family in config.families for spec in specs for p in config.p_values]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_run_unit, units, chunksize=4))
    else:
        results = [_run_unit(u) for u in units]
    rows, failures = [], []
    for r, f in results:
        rows.extend(r)
        failures.extend(f)
    order = {a: i for i, a in enumerate(config.algorithms)}
    rows.sort(key=lambda r: (config.families.index(r.workload), r.graph_id, r.p, order[r.algo]))
    return BenchResult(rows, failures, summarize(rows, config.algorithms))


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".9g")
    return str(value)


def format_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    names = [f.name for f in fields(MetricRow)]
    assert names == CSV_HEADER
    for r in rows:
        writer.writerow([_cell(v) for v in asdict(r).values()])
    return buf.getvalue()


def format_summary(summaries) -> str:
    lines = []
    for s in summaries:
        pct = s.percentages()
        lines.append(f"{s.metric:8s} {s.algo_a:>15s} vs {s.algo_b:<15s} "
                     f"longer {pct['longer']:6.2f}%  equal {pct['equal']:6.2f}%  "
                     f"shorter {pct['shorter']:6.2f}%  (n={s.total})")
    return "\n".join(lines) + ("\n" if lines else "")


def write_svg(summaries, path, metric: str = "makespan", baseline: str = "cpop") -> None:
    """Stacked longer/equal/shorter bars of each algorithm against ``baseline``."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "ceft"

    chosen = [s for s in summaries if s.metric == metric and s.algo_b == baseline
              and s.algo_a != baseline]
    fig, ax = plt.subplots(figsize=(6, 0.6 * max(1, len(chosen)) + 1))
    left = np.zeros(len(chosen))
    labels = [s.algo_a for s in chosen]
    for outcome, colour in zip(metrics.OUTCOMES, ("#d62728", "#7f7f7f", "#2ca02c")):
        widths = np.array([s.percent(outcome) for s in chosen])
        ax.barh(labels, widths, left=left, color=colour, label=outcome)
        left += widths
    ax.set_xlim(0, 100)
    ax.set_xlabel(f"% of cells, {metric} vs {baseline}")
    ax.legend(loc="lower right", fontsize="small")
    fig.tight_layout()
    # Fixed metadata keeps the file byte-identical across runs.
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
