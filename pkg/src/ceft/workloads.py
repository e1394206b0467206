"""Seeded generators for random layered DAGs and structured application graphs.

Four cost families share one DAG structure per seed:

* ``classic``: each task gets a base weight ``w_i`` and per-processor times
  drawn from ``[w_i(1 - beta/2), w_i(1 + beta/2)]``.
* ``low`` / ``medium`` / ``high``: tasks and processors carry two weights each,
  drawn from a pair of intervals (swapped with probability ``1 - beta``), and
  execution time is ``w1/W1 + w0/W0``.

Machines come from one seeded set shared by every workload, so the same
processor graph of a given size is reused across graphs and families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .costs import exec_matrix
from .errors import InvalidParams, NotPowerOfTwo
from .graph import Edge, ExplicitRow, Machine, Processor, TaskGraph, TaskNode, TwoPart, levels

FAMILIES = ("classic", "low", "medium", "high")

I1 = (1e2, 1e3)
INTERVALS = {
    "low": (I1, (1e3, 1e4)),
    "medium": (I1, (1e4, 1e5)),
    "high": (I1, (1e5, 1e6)),
}
RESOURCE_INTERVALS = (I1, (1e3, 1e4))
MACHINE_SIZES = (2, 4, 8, 16, 32, 64)
MACHINE_BETA = 0.5
BANDWIDTH_RANGE = (0.5, 1.5)
DEFAULT_SEED = 42

# Grids used by the experiment harness.
GRID_O = (2, 4, 8)
GRID_CCR = (0.001, 0.01, 0.1, 1, 5, 10)
GRID_ALPHA = (0.1, 0.25, 0.75, 1.0)
GRID_BETA_PERCENT = (10, 25, 50, 75, 95)
GRID_GAMMA = (0.1, 0.25, 0.5, 0.75, 0.95)


def beta_from_percent(percent: float) -> float:
    if not 0 <= percent <= 100:
        raise InvalidParams(f"heterogeneity must be a percentage in [0, 100], got {percent}")
    return percent / 100.0


@dataclass(frozen=True)
class CostParams:
    """How task and edge weights are drawn for a given structure."""

    family: str = "classic"
    procs: int = 4
    beta: float = 0.5
    ccr: float = 1.0
    gamma: float = 0.1
    seed: int = DEFAULT_SEED
    w_dag: Optional[float] = None
    machine_seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParams(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.procs < 1:
            raise InvalidParams("procs must be >= 1")
        if not 0 <= self.beta <= 1:
            raise InvalidParams(f"beta must be a fraction in [0, 1], got {self.beta}")
        if not self.ccr > 0:
            raise InvalidParams(f"ccr must be > 0, got {self.ccr}")
        if not 0 < self.gamma < 1:
            raise InvalidParams(f"gamma must lie in (0, 1), got {self.gamma}")
        if self.w_dag is not None and not self.w_dag > 0:
            raise InvalidParams("w_dag must be > 0")


@dataclass(frozen=True)
class RggParams:
    n: int = 128
    o: float = 2
    c: float = 1.0
    alpha: float = 1.0
    beta: float = 0.5
    gamma: float = 0.1
    seed: int = DEFAULT_SEED
    family: str = "classic"
    w_dag: Optional[float] = None
    machine_seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParams("n must be >= 1")
        if self.o < 1:
            raise InvalidParams("o must be >= 1")
        if not self.alpha > 0:
            raise InvalidParams("alpha must be > 0")
        self.cost_params(1)  # validates the cost fields

    def cost_params(self, procs: int) -> CostParams:
        return CostParams(self.family, procs, self.beta, self.c, self.gamma, self.seed,
                          self.w_dag, self.machine_seed)


def _uniform_open_low(rng, lo, hi, size=None):
    """Uniform on (lo, hi]; keeps weights strictly positive when lo == 0."""
    return hi - rng.uniform(0.0, hi - lo, size)


def _weight_pair(rng, intervals, beta, size):
    """Two weights per item; with probability beta weight0 in I1 and weight1 in I2."""
    (a_lo, a_hi), (b_lo, b_hi) = intervals
    first = rng.uniform(a_lo, a_hi, size)
    second = rng.uniform(b_lo, b_hi, size)
    keep = rng.random(size) < beta
    w0 = np.where(keep, first, second)
    w1 = np.where(keep, second, first)
    return w0, w1


def standard_machine(procs: int, seed: int = DEFAULT_SEED) -> Machine:
    """Seeded machine of ``procs`` processors with capability weights.

    Links are all-pairs with bandwidths uniform on [0.5, 1.5] (mean 1), so a
    data volume ``d`` costs ``d`` on an average link.  Startup latency is 0.
    """
    if procs < 1:
        raise InvalidParams("procs must be >= 1")
    rng = np.random.default_rng([seed, procs])
    w0, w1 = _weight_pair(rng, RESOURCE_INTERVALS, MACHINE_BETA, procs)
    bw = np.ones((procs, procs))
    upper = np.triu_indices(procs, 1)
    bw[upper] = rng.uniform(*BANDWIDTH_RANGE, len(upper[0]))
    bw = np.triu(bw, 1) + np.triu(bw, 1).T
    np.fill_diagonal(bw, 0.0)
    if procs == 1:
        bw[0, 0] = 1.0
    processors = [Processor(j, 0.0, (float(w0[j]), float(w1[j]))) for j in range(procs)]
    return Machine(processors, bw)


def standard_machines(seed: int = DEFAULT_SEED) -> dict:
    return {p: standard_machine(p, seed) for p in MACHINE_SIZES}


def machine_for(costs: CostParams) -> Machine:
    return standard_machine(costs.procs, costs.machine_seed)


def layered_structure(n: int, alpha: float, o: float, rng):
    """Level-by-level random DAG.

    Height is about sqrt(n)/alpha and level widths average n/height (about
    alpha*sqrt(n)).  Each non-final task sends 1..2o-1 edges (mean o) to
    tasks in the following levels, and every task below the first level has
    a parent in the level directly above, so the height is exact.
    """
    height = max(1, min(n, round(math.sqrt(n) / alpha)))
    shares = rng.uniform(0.0, 2.0, height)
    extra = rng.multinomial(n - height, shares / shares.sum()) if n > height else np.zeros(height, int)
    widths = 1 + extra
    level_tasks = []
    start = 0
    for w in widths:
        level_tasks.append(list(range(start, start + int(w))))
        start += int(w)

    edges = set()
    max_out = max(1, round(2 * o - 1))
    for lvl in range(height - 1):
        for task in level_tasks[lvl]:
            k = int(rng.integers(1, max_out + 1))
            pool = []
            nxt = lvl + 1
            while nxt < height and len(pool) < k:
                pool.extend(level_tasks[nxt])
                nxt += 1
            k = min(k, len(pool))
            for target in rng.choice(pool, size=k, replace=False):
                edges.add((task, int(target)))
    for lvl in range(1, height):
        above = level_tasks[lvl - 1]
        above_set = set(above)
        for task in level_tasks[lvl]:
            if not any((a, task) in edges for a in above_set):
                edges.add((int(rng.choice(above)), task))
    return level_tasks, sorted(edges)


def _skewed_base_weights(rng, level_of, w_dag, gamma):
    """Classic base weights; a level is 'heavy' with probability gamma.

    Heavy levels draw from (w_dag, 2*w_dag], light ones from (0, w_dag].
    """
    num_levels = max(level_of) + 1
    heavy = rng.random(num_levels) < gamma
    lo = np.where(heavy[level_of], w_dag, 0.0)
    hi = np.where(heavy[level_of], 2 * w_dag, w_dag)
    return _uniform_open_low(rng, lo, hi)


def assign_costs(num_tasks: int, edges, level_of, costs: CostParams, rng) -> TaskGraph:
    """Attach execution costs and edge data volumes to a bare structure."""
    level_of = np.asarray(level_of)
    beta = costs.beta
    spread = (1 - beta / 2, 1 + beta / 2)
    if costs.family == "classic":
        w_dag = costs.w_dag if costs.w_dag is not None else float(rng.uniform(10.0, 100.0))
        base = _skewed_base_weights(rng, level_of, w_dag, costs.gamma)
        rows = base[:, None] * rng.uniform(*spread, (num_tasks, costs.procs))
        tasks = [TaskNode(i, ExplicitRow(rows[i])) for i in range(num_tasks)]
        reference = base
    else:
        w0, w1 = _weight_pair(rng, INTERVALS[costs.family], beta, num_tasks)
        tasks = [TaskNode(i, TwoPart(float(w0[i]), float(w1[i]))) for i in range(num_tasks)]
        reference = exec_matrix(TaskGraph(tasks, []), machine_for(costs)).min(axis=1)
    noise = rng.uniform(*spread, len(edges))
    data = [reference[s] * costs.ccr * noise[k] for k, (s, _) in enumerate(edges)]
    return TaskGraph(tasks, [Edge(s, d, float(x)) for (s, d), x in zip(edges, data)])


def generate_rgg(params: RggParams, procs: int):
    """Random layered DAG plus the matching standard machine."""
    if procs < 1:
        raise InvalidParams("procs must be >= 1")
    rng = np.random.default_rng(params.seed)
    level_tasks, edges = layered_structure(params.n, params.alpha, params.o, rng)
    level_of = np.empty(params.n, dtype=int)
    for lvl, tasks in enumerate(level_tasks):
        level_of[tasks] = lvl
    costs = params.cost_params(procs)
    g = assign_costs(params.n, edges, level_of, costs, rng)
    return g, machine_for(costs)


def _with_costs(num_tasks, edges, costs: CostParams) -> TaskGraph:
    rng = np.random.default_rng(costs.seed)
    bare = TaskGraph([TaskNode(i, TwoPart(1.0, 1.0)) for i in range(num_tasks)], [(s, d, 0.0) for s, d in edges])
    return assign_costs(num_tasks, edges, levels(bare), costs, rng)


def gaussian_elimination_structure(m_dim: int):
    """Column-wise GE DAG: pivot task of column k feeds that column's updates.

    The update of column k+1 feeds the next pivot and every other update feeds
    the update of the same target column at the next step.
    """
    if m_dim < 2:
        raise InvalidParams("Gaussian elimination needs a matrix dimension >= 2")
    ids = {}
    for k in range(1, m_dim):
        ids[("pivot", k)] = len(ids)
        for j in range(k + 1, m_dim + 1):
            ids[("update", k, j)] = len(ids)
    edges = []
    for k in range(1, m_dim):
        pivot = ids[("pivot", k)]
        for j in range(k + 1, m_dim + 1):
            edges.append((pivot, ids[("update", k, j)]))
        if k + 1 < m_dim:
            edges.append((ids[("update", k, k + 1)], ids[("pivot", k + 1)]))
            for j in range(k + 2, m_dim + 1):
                edges.append((ids[("update", k, j)], ids[("update", k + 1, j)]))
    return len(ids), sorted(edges)


def generate_gaussian_elimination(m_dim: int, costs: CostParams = CostParams()) -> TaskGraph:
    n, edges = gaussian_elimination_structure(m_dim)
    return _with_costs(n, edges, costs)


def fft_structure(m_vec: int):
    """Recursive-call binary tree (2m-1 tasks) above log2(m) butterfly layers of m tasks."""
    if m_vec < 2 or m_vec & (m_vec - 1):
        raise NotPowerOfTwo(f"FFT input size must be a power of two >= 2, got {m_vec}")
    stages = m_vec.bit_length() - 1
    # Heap numbering: node x has children 2x+1, 2x+2; leaves are the last m.
    tree = 2 * m_vec - 1
    edges = [(x, c) for x in range(m_vec - 1) for c in (2 * x + 1, 2 * x + 2)]
    leaves = list(range(m_vec - 1, tree))

    def butterfly(stage, i):
        return tree + stage * m_vec + i

    for i in range(m_vec):
        for src in (i, i ^ 1):
            edges.append((leaves[src], butterfly(0, i)))
    for stage in range(1, stages):
        for i in range(m_vec):
            for src in (i, i ^ (1 << stage)):
                edges.append((butterfly(stage - 1, src), butterfly(stage, i)))
    return tree + stages * m_vec, sorted(set(edges))


def generate_fft(m_vec: int, costs: CostParams = CostParams()) -> TaskGraph:
    n, edges = fft_structure(m_vec)
    return _with_costs(n, edges, costs)


def scale_costs(g: TaskGraph, m: Machine, k: float):
    """Multiply every execution time, data volume and startup by ``k``."""
    tasks = []
    for t in g.tasks:
        if isinstance(t.cost, ExplicitRow):
            tasks.append(TaskNode(t.id, ExplicitRow([x * k for x in t.cost.times])))
        else:
            tasks.append(TaskNode(t.id, TwoPart(t.cost.w0 * k, t.cost.w1 * k)))
    g2 = TaskGraph(tasks, [Edge(e.src, e.dst, e.data * k) for e in g.edges])
    m2 = Machine([replace(p, startup=p.startup * k) for p in m.processors], m.bandwidth)
    return g2, m2
