"""Schedule quality metrics and pairwise win/loss tallies."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .costs import exec_matrix
from .errors import EmptyCriticalPath
from .graph import Machine, TaskGraph, topological_order

EQUAL_RTOL = 1e-9


def sequential_time(g: TaskGraph, m: Machine) -> float:
    """Whole graph on the single processor that runs it fastest."""
    return float(exec_matrix(g, m).sum(axis=0).min())


def speedup(g: TaskGraph, m: Machine, s) -> float:
    return sequential_time(g, m) / s.makespan


def slr_denominator(g: TaskGraph, m: Machine, cp_tasks) -> float:
    cp_tasks = list(cp_tasks)
    if not cp_tasks:
        raise EmptyCriticalPath("SLR needs a non-empty critical path")
    return float(exec_matrix(g, m)[cp_tasks].min(axis=1).sum())


def slr(g: TaskGraph, m: Machine, s, cp) -> float:
    """Makespan over the summed fastest execution times of the path's tasks.

    ``cp`` is a ``CriticalPath`` or any iterable of task ids.
    """
    tasks = cp.tasks if hasattr(cp, "tasks") else cp
    return s.makespan / slr_denominator(g, m, tasks)


def scheduled_levels(g: TaskGraph, m: Machine, s):
    """Top and bottom levels under the costs fixed by ``s``'s mapping.

    t-level: longest path from any entry to the task, excluding the task.
    b-level: longest path from the task to any exit, including the task.
    """
    times = exec_matrix(g, m)
    proc = s.assignment
    w = np.array([times[i, proc[i]] for i in range(g.num_tasks)])

    def comm(a, b):
        pa, pb = proc[a], proc[b]
        if pa == pb:
            return 0.0
        return m.startup[pa] + g.data(a, b) / m.bandwidth[pa, pb]

    order = topological_order(g)
    t_level = np.zeros(g.num_tasks)
    for i in order:
        for k in g.parents[i]:
            t_level[i] = max(t_level[i], t_level[k] + w[k] + comm(k, i))
    b_level = w.copy()
    for i in reversed(order):
        for c in g.children[i]:
            b_level[i] = max(b_level[i], w[i] + comm(i, c) + b_level[c])
    return t_level, b_level


def slack(g: TaskGraph, m: Machine, s) -> float:
    t_level, b_level = scheduled_levels(g, m, s)
    return float(np.mean(s.makespan - b_level - t_level))


def compare(a: float, b: float, rtol: float = EQUAL_RTOL) -> str:
    """'longer', 'equal' or 'shorter' for ``a`` relative to ``b``."""
    if abs(a - b) <= rtol * max(abs(a), abs(b)):
        return "equal"
    return "longer" if a > b else "shorter"


OUTCOMES = ("longer", "equal", "shorter")


@dataclass
class PairwiseSummary:
    algo_a: str
    algo_b: str
    metric: str
    counts: dict = field(default_factory=lambda: dict.fromkeys(OUTCOMES, 0))

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def percent(self, outcome: str) -> float:
        return 100.0 * self.counts[outcome] / self.total if self.total else 0.0

    def percentages(self) -> dict:
        return {k: self.percent(k) for k in OUTCOMES}


def pairwise(pairs, algo_a: str, algo_b: str, metric: str, rtol: float = EQUAL_RTOL) -> PairwiseSummary:
    """Tally ``a`` versus ``b`` over an iterable of ``(a_value, b_value)`` pairs."""
    summary = PairwiseSummary(algo_a, algo_b, metric)
    for a, b in pairs:
        summary.counts[compare(a, b, rtol)] += 1
    return summary
