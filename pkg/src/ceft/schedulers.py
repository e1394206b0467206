"""List schedulers: HEFT and its rank variants, CPOP, and CEFT-CPOP.

Every scheduler here is the same priority-driven loop: keep a queue of ready
tasks, pop the one with the highest priority (lowest id on ties), and place it
either on a pinned processor or on the processor giving the earliest finish
time.  Placement uses the insertion policy: a task may fill an idle gap left
between tasks already on a processor.
"""

from __future__ import annotations

import heapq
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .core import CriticalPath, ceft_rank_down, ceft_rank_up, critical_path
from .costs import comm_terms, exec_matrix, exec_time, mean_bandwidth
from .errors import UnplacedParent
from .graph import Machine, TaskGraph, sources_and_sinks, topological_order

INSERTION = "insertion"
APPEND = "append"

# Relative tolerance for "same priority" when walking CPOP's critical path.
CP_RTOL = 1e-9


@dataclass(frozen=True)
class Placement:
    proc: int
    start: float
    finish: float


@dataclass(frozen=True)
class Schedule:
    placements: tuple

    @property
    def makespan(self) -> float:
        return max(p.finish for p in self.placements)

    @property
    def assignment(self) -> list:
        return [p.proc for p in self.placements]

    def __getitem__(self, task) -> Placement:
        return self.placements[task]

    def __len__(self):
        return len(self.placements)


class PartialSchedule:
    """Mutable schedule under construction."""

    def __init__(self, num_procs: int):
        self.placements = {}
        self._starts = [[] for _ in range(num_procs)]
        self._finishes = [[] for _ in range(num_procs)]

    def place(self, task: int, proc: int, start: float, finish: float) -> None:
        starts, finishes = self._starts[proc], self._finishes[proc]
        index = bisect_right(starts, start)
        starts.insert(index, start)
        finishes.insert(index, finish)
        self.placements[task] = Placement(proc, start, finish)

    def earliest_slot(self, proc: int, ready: float, duration: float,
                      policy: str = INSERTION) -> float:
        starts, finishes = self._starts[proc], self._finishes[proc]
        if not starts:
            return ready
        if policy == APPEND:
            return max(ready, finishes[-1])
        # Intervals on one processor never overlap, so finishes are sorted too.
        index = bisect_right(finishes, ready)
        prev_end = finishes[index - 1] if index else 0.0
        for s, f in zip(starts[index:], finishes[index:]):
            candidate = max(ready, prev_end)
            if candidate + duration <= s:
                return candidate
            prev_end = f
        return max(ready, prev_end)

    def freeze(self, num_tasks: int) -> Schedule:
        return Schedule(tuple(self.placements[t] for t in range(num_tasks)))


def est_eft(task: int, proc: int, partial: PartialSchedule, g: TaskGraph, m: Machine,
            policy: str = INSERTION):
    """Earliest start and finish of ``task`` on ``proc`` given ``partial``."""
    ready = 0.0
    for parent in g.parents[task]:
        placed = partial.placements.get(parent)
        if placed is None:
            raise UnplacedParent(task, parent)
        arrival = placed.finish
        if placed.proc != proc:
            arrival += m.startup[placed.proc] + g.data(parent, task) / m.bandwidth[placed.proc, proc]
        ready = max(ready, arrival)
    cost = exec_time(g.tasks[task], proc, m)
    start = partial.earliest_slot(proc, ready, cost, policy)
    return start, start + cost


@dataclass(frozen=True)
class RankVectors:
    rank_u: np.ndarray
    rank_d: np.ndarray

    @property
    def priority(self) -> np.ndarray:
        return self.rank_d + self.rank_u


def compute_ranks(g: TaskGraph, m: Machine) -> RankVectors:
    """Upward and downward ranks over mean execution and communication costs."""
    v = g.num_tasks
    mean_exec = exec_matrix(g, m).mean(axis=1)
    if m.num_procs > 1:
        mean_startup, mean_bw = float(m.startup.mean()), mean_bandwidth(m)

        def comm(src, dst):
            return mean_startup + g.data(src, dst) / mean_bw
    else:
        def comm(src, dst):
            return 0.0

    order = topological_order(g)
    rank_u = np.zeros(v)
    for i in reversed(order):
        tail = max((comm(i, k) + rank_u[k] for k in g.children[i]), default=0.0)
        rank_u[i] = mean_exec[i] + tail
    rank_d = np.zeros(v)
    for i in order:
        rank_d[i] = max((rank_d[k] + mean_exec[k] + comm(k, i) for k in g.parents[i]), default=0.0)
    return RankVectors(rank_u, rank_d)


def list_schedule(g: TaskGraph, m: Machine, priority, pinned=None) -> Schedule:
    """Priority-queue list scheduling with insertion-based EFT placement.

    ``pinned`` maps task -> processor for tasks that bypass EFT selection.
    """
    v, p = g.num_tasks, m.num_procs
    pinned = pinned or {}
    times = exec_matrix(g, m)
    startup, inv_bw = comm_terms(m)
    partial = PartialSchedule(p)
    waiting = [len(par) for par in g.parents]
    ready_queue = [(-priority[i], i) for i in range(v) if waiting[i] == 0]
    heapq.heapify(ready_queue)

    while ready_queue:
        _, task = heapq.heappop(ready_queue)
        arrival = np.zeros(p)
        for parent in g.parents[task]:
            placed = partial.placements[parent]
            q = placed.proc
            arrival = np.maximum(
                arrival, placed.finish + startup[q] + g.data(parent, task) * inv_bw[q]
            )
        procs = [pinned[task]] if task in pinned else range(p)
        best = None
        for j in procs:
            start = partial.earliest_slot(j, float(arrival[j]), times[task, j])
            finish = start + times[task, j]
            if best is None or finish < best[2]:
                best = (j, start, finish)
        partial.place(task, *best)
        for child in g.children[task]:
            waiting[child] -= 1
            if waiting[child] == 0:
                heapq.heappush(ready_queue, (-priority[child], child))
    return partial.freeze(v)


def schedule_heft(g: TaskGraph, m: Machine, ranks=None) -> Schedule:
    """HEFT.  ``ranks`` defaults to the mean-cost upward rank.

    Tasks are taken in decreasing rank among those whose parents are placed,
    which for upward ranks is the classic sorted order and keeps downward
    ranks valid too.
    """
    if ranks is None:
        ranks = compute_ranks(g, m).rank_u
    return list_schedule(g, m, np.asarray(ranks, dtype=float))


@dataclass(frozen=True)
class CpopPath:
    tasks: tuple
    estimate: float  # |CP|: priority of the entry task
    processor: int  # p_cp
    length: float  # sum of execution times of the path on p_cp


def cpop_critical_path(g: TaskGraph, m: Machine, ranks: RankVectors = None) -> CpopPath:
    """Mean-cost critical path found by matching priorities, mapped to one processor.

    Several sources are handled as children of a zero-cost virtual entry, so
    the walk starts at the lowest-id source whose priority equals |CP|.
    """
    ranks = ranks or compute_ranks(g, m)
    priority = ranks.priority
    sources, _ = sources_and_sinks(g)
    estimate = max(priority[s] for s in sources)
    tol = CP_RTOL * abs(estimate)

    def pick(candidates):
        for c in candidates:
            if abs(priority[c] - estimate) <= tol:
                return c
        return max(candidates, key=lambda c: (priority[c], -c))

    path = [pick(sources)]
    while g.children[path[-1]]:
        path.append(pick(g.children[path[-1]]))
    times = exec_matrix(g, m)
    sums = times[path].sum(axis=0)
    proc = int(np.argmin(sums))
    return CpopPath(tuple(path), float(estimate), proc, float(sums[proc]))


def schedule_cpop(g: TaskGraph, m: Machine):
    """CPOP: returns the schedule and the path it pinned to one processor."""
    ranks = compute_ranks(g, m)
    cp = cpop_critical_path(g, m, ranks)
    pinned = {t: cp.processor for t in cp.tasks}
    return list_schedule(g, m, ranks.priority, pinned), cp


def schedule_ceft_cpop(g: TaskGraph, m: Machine, cp: CriticalPath = None) -> Schedule:
    """CPOP with the CEFT critical path, each path task pinned to its own processor."""
    if cp is None:
        cp = critical_path(g, m)
    ranks = compute_ranks(g, m)
    return list_schedule(g, m, ranks.priority, cp.assignment)


ALGORITHMS = {
    "heft": lambda g, m: schedule_heft(g, m),
    "heft-down": lambda g, m: schedule_heft(g, m, compute_ranks(g, m).rank_d),
    "cpop": lambda g, m: schedule_cpop(g, m)[0],
    "ceft-cpop": lambda g, m: schedule_ceft_cpop(g, m),
    "ceft-heft-up": lambda g, m: schedule_heft(g, m, ceft_rank_up(g, m)),
    "ceft-heft-down": lambda g, m: schedule_heft(g, m, ceft_rank_down(g, m)),
}


def schedule(name: str, g: TaskGraph, m: Machine) -> Schedule:
    try:
        algo = ALGORITHMS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}") from None
    return algo(g, m)


def check_schedule(s: Schedule, g: TaskGraph, m: Machine, rtol: float = 1e-9) -> list:
    """Independent validity check; returns a list of human-readable violations."""
    problems = []
    if len(s) != g.num_tasks:
        return [f"schedule covers {len(s)} tasks, graph has {g.num_tasks}"]
    times = exec_matrix(g, m)
    scale = max(1.0, max(pl.finish for pl in s.placements))
    eps = rtol * scale
    for task, pl in enumerate(s.placements):
        if not 0 <= pl.proc < m.num_procs:
            problems.append(f"task {task} on unknown processor {pl.proc}")
            continue
        if pl.start < -eps:
            problems.append(f"task {task} starts before time 0")
        if abs(pl.finish - (pl.start + times[task, pl.proc])) > eps:
            problems.append(f"task {task} finish {pl.finish} != start + exec")
    for edge in g.edges:
        a, b = s.placements[edge.src], s.placements[edge.dst]
        comm = 0.0
        if a.proc != b.proc:
            comm = m.startup[a.proc] + edge.data / m.bandwidth[a.proc, b.proc]
        if b.start + eps < a.finish + comm:
            problems.append(
                f"edge ({edge.src}, {edge.dst}): start {b.start} < {a.finish} + comm {comm}"
            )
    by_proc = {}
    for task, pl in enumerate(s.placements):
        by_proc.setdefault(pl.proc, []).append((pl.start, pl.finish, task))
    for proc, intervals in by_proc.items():
        intervals.sort()
        for (s0, f0, t0), (s1, f1, t1) in zip(intervals, intervals[1:]):
            if s1 + eps < f0:
                problems.append(f"tasks {t0} and {t1} overlap on processor {proc}")
    return problems
