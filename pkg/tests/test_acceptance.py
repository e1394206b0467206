"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line that is printed in the terminal summary
under "acceptance criteria", then asserts on the same condition.
"""

import statistics
import time

import numpy as np
import pytest

from ceft.bench import BenchConfig, run_benchmark
from ceft.core import compute_ceft, critical_path
from ceft.costs import exec_matrix, group_processor_classes, reduce_to_classes
from ceft.graph import Machine, sources_and_sinks
from ceft.metrics import slack, slr, speedup
from ceft.schedulers import ALGORITHMS, check_schedule, compute_ranks, cpop_critical_path, schedule, schedule_cpop
from ceft.workloads import (FAMILIES, CostParams, RggParams, assign_costs, generate_fft,
                            generate_gaussian_elimination, generate_rgg, scale_costs, standard_machine)

from conftest import duplicated_machine, make_graph, random_instance, record
from oracles import duplication_critical_path, exhaustive_critical_path


def rel_err(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def test_oracle_equivalence():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst, mismatches, dup_mismatches = 0.0, 0, 0
    for _ in range(500):
        g, m = random_instance(rng, v_max=8, p_max=3)
        length = critical_path(g, m).length
        err = rel_err(length, exhaustive_critical_path(g, m))
        worst = max(worst, err)
        mismatches += err > 1e-9
        dup_mismatches += rel_err(length, duplication_critical_path(g, m)) > 1e-9
    elapsed = time.perf_counter() - t0
    ok = record("1 oracle equivalence", worst <= 1e-9 and elapsed < 60,
                f"{mismatches}/500 differ from the per-path oracle (worst rel err {worst:.3g}); "
                f"{dup_mismatches}/500 differ from the duplication oracle; {elapsed:.1f}s")
    assert ok


def test_chain_fixture(chain):
    g, m = chain
    table = compute_ceft(g, m).values
    cp = critical_path(g, m)
    expected = np.array([[6, 35.25], [66.18, 26], [45.5, 41.8]])
    err = float(np.max(np.abs(table - expected) / expected))
    ok = record("2 chain fixture",
                err <= 1e-9 and cp.steps == ((0, 0), (1, 1), (2, 1)) and rel_err(cp.length, 41.8) <= 1e-9,
                f"table max rel err {err:.3g}, path {cp.steps}, length {cp.length!r}")
    assert ok


def generated_instance(rng):
    p = int(rng.choice([2, 3, 4, 8]))
    family = str(rng.choice(FAMILIES))
    seed = int(rng.integers(2**31 - 1))
    kind = rng.integers(3)
    if kind == 0:
        params = RggParams(n=int(rng.integers(5, 60)), o=int(rng.choice([1, 2, 4])),
                           c=float(rng.choice([0.1, 1.0, 5.0])), alpha=float(rng.choice([0.5, 1.0, 2.0])),
                           beta=float(rng.uniform(0, 1)), seed=seed, family=family)
        return generate_rgg(params, p)
    costs = CostParams(family=family, procs=p, beta=float(rng.uniform(0, 1)),
                       ccr=float(rng.choice([0.1, 1.0, 5.0])), seed=seed)
    if kind == 1:
        return generate_gaussian_elimination(int(rng.integers(3, 9)), costs), standard_machine(p)
    return generate_fft(int(rng.choice([2, 4, 8])), costs), standard_machine(p)


def test_schedule_validity():
    rng = np.random.default_rng(7)
    bad, min_slr, checked = [], np.inf, 0
    for idx in range(1000):
        g, m = generated_instance(rng)
        cp = critical_path(g, m)
        for name in ALGORITHMS:
            s = schedule(name, g, m)
            problems = check_schedule(s, g, m)
            ratio = slr(g, m, s, cp)
            min_slr = min(min_slr, ratio)
            checked += 1
            if problems or ratio < 1 - 1e-12:
                bad.append((idx, name, problems[:1], ratio))
    ok = record("3 schedule validity", not bad,
                f"{checked} schedules, {len(bad)} invalid, min SLR {min_slr:.6g}")
    assert ok, bad[:5]


def test_class_grouping_invariance():
    rng = np.random.default_rng(31)
    unequal = 0
    for _ in range(50):
        base, copies = int(rng.integers(2, 4)), int(rng.integers(2, 5))
        m, kind = duplicated_machine(rng, base, copies)
        g0, _ = random_instance(rng, v_max=30, p_max=base, p_min=base)
        g = make_graph(exec_matrix(g0, Machine.uniform(base))[:, kind], g0.edges)
        classes = group_processor_classes(g, m)
        assert classes.class_count == base
        unequal += critical_path(g, m, use_classes=True).length != critical_path(g, m).length
        # the reduction really ran on fewer processors
        assert reduce_to_classes(g, m, classes)[1].num_procs == base

    # runtime against e at fixed processor count
    v, p = 600, 8
    rows = rng.uniform(1, 50, (v, p))
    m = Machine.uniform(p)
    medians = []
    for e in (3000, 6000):
        pairs = set()
        while len(pairs) < e:
            a, b = sorted(int(x) for x in rng.integers(0, v, 2))
            if a != b:
                pairs.add((a, b))
        g = make_graph(rows, [(a, b, float(rng.uniform(0, 40))) for a, b in sorted(pairs)])
        times = []
        for _ in range(7):
            t0 = time.perf_counter()
            compute_ceft(g, m)
            times.append(time.perf_counter() - t0)
        medians.append(statistics.median(times))
    growth = medians[1] / medians[0]
    ok = record("4 class-grouping invariance", unequal == 0 and growth <= 2.5,
                f"{unequal}/50 reduced lengths differ; doubling e grew runtime x{growth:.2f}")
    assert ok


def test_cpop_consistency():
    rng = np.random.default_rng(5)
    instances = [(generate_gaussian_elimination(int(rng.integers(3, 10)),
                                                CostParams(procs=3, seed=int(rng.integers(1000)))),
                  standard_machine(3)) for _ in range(50)]
    while len(instances) < 500:
        g, m = random_instance(rng, v_max=12, p_max=4)
        if len(sources_and_sinks(g)[0]) == 1:
            instances.append((g, m))
    worst_entry, worst_member = 0.0, 0.0
    for g, m in instances:
        ranks = compute_ranks(g, m)
        path = cpop_critical_path(g, m, ranks)
        entry = sources_and_sinks(g)[0][0]
        worst_entry = max(worst_entry, rel_err(path.estimate, ranks.priority[entry]))
        for t in path.tasks:
            worst_member = max(worst_member, rel_err(ranks.priority[t], path.estimate))
    ok = record("5 CPOP consistency", worst_entry == 0.0 and worst_member <= 1e-9,
                f"{len(instances)} single-entry instances; |CP| vs priority(entry) max rel err "
                f"{worst_entry:.3g}; SET_CP priority max rel err {worst_member:.3g}")
    assert ok


@pytest.fixture(scope="module")
def desk_grid():
    t0 = time.perf_counter()
    result = run_benchmark(BenchConfig(families=("classic", "high"), n_values=(128, 256),
                                       p_values=(4, 16), graphs=200, seed=42))
    return result, time.perf_counter() - t0


def _tally(result, family, metric, outcome):
    by_cell = {}
    for r in result.rows:
        if r.workload == family:
            by_cell.setdefault((r.graph_id, r.p), {})[r.algo] = getattr(r, metric)
    cells = [c for c in by_cell.values() if "ceft-cpop" in c and "cpop" in c]
    hits = sum(outcome(c["ceft-cpop"], c["cpop"]) for c in cells)
    return hits, len(cells)


def test_directional_classic(desk_grid):
    result, elapsed = desk_grid
    hits, cells = _tally(result, "classic", "cpl", lambda ceft, cpop: ceft >= cpop)
    ok = record("6a classic: CEFT CPL >= CPOP CPL in >= 95% of cells",
                cells >= 400 and hits >= 0.95 * cells and elapsed < 600 and not result.failures,
                f"{hits}/{cells} = {100 * hits / cells:.2f}%; grid ran in {elapsed:.0f}s")
    assert ok


def test_directional_high(desk_grid):
    result, elapsed = desk_grid
    cpl, cells = _tally(result, "high", "cpl", lambda ceft, cpop: ceft < cpop)
    mk, _ = _tally(result, "high", "makespan", lambda ceft, cpop: ceft < cpop)
    ok = record("6b high: CPL shorter >= 65% and makespan shorter >= 70% of cells",
                cells >= 400 and cpl >= 0.65 * cells and mk >= 0.70 * cells and elapsed < 600
                and not result.failures,
                f"CPL shorter {100 * cpl / cells:.2f}%, makespan shorter {100 * mk / cells:.2f}% "
                f"of {cells} cells; grid ran in {elapsed:.0f}s")
    assert ok


def test_generator_counts():
    ge = generate_gaussian_elimination(5).num_tasks
    fft = generate_fft(4).num_tasks
    rng = np.random.default_rng(99)
    n = 100_000
    g = assign_costs(n, [], np.zeros(n, dtype=int), CostParams(family="classic", beta=1.0, procs=8), rng)
    times = exec_matrix(g, Machine.uniform(8))
    ratio = float((times.max(axis=1) / times.min(axis=1)).max())
    ok = record("7 generator counts", ge == 14 and fft == 15 and ratio <= 3.0,
                f"GE(5) = {ge} tasks, FFT(4) = {fft} tasks, max exec ratio {ratio:.4f} over {n} tasks")
    assert ok


def test_metric_scale_invariance():
    rng = np.random.default_rng(73)
    k = 7.3
    worst = 0.0
    for _ in range(100):
        g, m = random_instance(rng, v_max=20, p_max=4)
        g2, m2 = scale_costs(g, m, k)
        cp, cp2 = critical_path(g, m), critical_path(g2, m2)
        worst = max(worst, rel_err(cp2.length, k * cp.length))
        s, path = schedule_cpop(g, m)
        s2, path2 = schedule_cpop(g2, m2)
        worst = max(worst, rel_err(path2.length, k * path.length))
        for name in ALGORITHMS:
            s, s2 = schedule(name, g, m), schedule(name, g2, m2)
            worst = max(worst, rel_err(speedup(g2, m2, s2), speedup(g, m, s)),
                        rel_err(slr(g2, m2, s2, cp2), slr(g, m, s, cp)),
                        rel_err(s2.makespan, k * s.makespan))
            sl, sl2 = slack(g, m, s), slack(g2, m2, s2)
            worst = max(worst, abs(sl2 - k * sl) / (k * s.makespan))
    ok = record("8 metric scale invariance", worst <= 1e-9, f"max rel err {worst:.3g} over 100 instances")
    assert ok
