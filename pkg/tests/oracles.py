"""Brute-force reference implementations used only by the tests.

These deliberately share no code with the package beyond the data types, and
favour obviousness over speed.
"""

import heapq

import numpy as np

from ceft.graph import ExplicitRow, Machine, TaskGraph


def exec_table(g: TaskGraph, m: Machine) -> np.ndarray:
    rows = []
    for t in g.tasks:
        if isinstance(t.cost, ExplicitRow):
            rows.append(list(t.cost.times))
        else:
            rows.append([t.cost.w1 / p.caps[1] + t.cost.w0 / p.caps[0] for p in m.processors])
    return np.array(rows, dtype=float)


def comm(g, m, a, pa, b, pb):
    if pa == pb:
        return 0.0
    return m.processors[pa].startup + g.data(a, b) / m.bandwidth[pa][pb]


def all_paths(g: TaskGraph):
    """Every source-to-sink path as a list of task ids."""
    sources = [i for i in range(g.num_tasks) if not g.parents[i]]
    out = []

    def walk(path):
        kids = g.children[path[-1]]
        if not kids:
            out.append(list(path))
            return
        for c in kids:
            path.append(c)
            walk(path)
            path.pop()

    for s in sources:
        walk([s])
    return out


def path_assignment_costs(g, m, path, times=None):
    """Vectorised cost of ``path`` under every processor assignment (p ** len)."""
    if times is None:
        times = exec_table(g, m)
    p = m.num_procs
    grid = np.indices((p,) * len(path)).reshape(len(path), -1)
    total = times[path[0], grid[0]].copy()
    startup = np.array([proc.startup for proc in m.processors])
    bw = np.array(m.bandwidth, dtype=float)
    for k in range(1, len(path)):
        a, b = path[k - 1], path[k]
        pa, pb = grid[k - 1], grid[k]
        diff = pa != pb
        link = np.where(diff, bw[pa, pb], 1.0)
        total += times[b, pb] + np.where(diff, startup[pa] + g.data(a, b) / link, 0.0)
    return total


def exhaustive_critical_path(g: TaskGraph, m: Machine) -> float:
    """max over source-to-sink paths of the cheapest assignment of that path."""
    times = exec_table(g, m)
    return max(float(path_assignment_costs(g, m, path, times).min()) for path in all_paths(g))


def ceft_by_enumeration(g, m, task, proc):
    """Max over paths ending at ``task`` of the cheapest assignment of that path with ``task`` on ``proc``.

    Equals the CEFT cell whenever the paths never join (a chain, a tree).
    """
    times = exec_table(g, m)
    best = -np.inf
    for path in all_paths_to(g, task):
        costs = path_assignment_costs(g, m, path, times)
        grid = np.indices((m.num_procs,) * len(path)).reshape(len(path), -1)
        best = max(best, float(costs[grid[-1] == proc].min()))
    return best


def all_paths_to(g, task):
    if not g.parents[task]:
        return [[task]]
    return [p + [task] for k in g.parents[task] for p in all_paths_to(g, k)]


def longest_path_to(g, weights):
    """Node-weighted longest path ending at each task (inclusive)."""
    out = [0.0] * g.num_tasks
    for i in kahn(g):
        out[i] = weights[i] + max((out[k] for k in g.parents[i]), default=0.0)
    return out


def kahn(g):
    indeg = [len(p) for p in g.parents]
    heap = [i for i in range(g.num_tasks) if indeg[i] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        i = heapq.heappop(heap)
        order.append(i)
        for c in g.children[i]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(heap, c)
    return order


def lpt_list_schedule(g, durations, p, priority):
    """Homogeneous list schedule: highest priority ready task onto the earliest-free processor.

    Zero communication; ``durations`` is one time per task.  Tasks are placed
    with insertion into idle gaps, matching an EFT scheduler on identical
    processors.
    """
    busy = [[] for _ in range(p)]
    finish = {}
    waiting = [len(x) for x in g.parents]
    ready = [(-priority[i], i) for i in range(g.num_tasks) if waiting[i] == 0]
    heapq.heapify(ready)
    while ready:
        _, t = heapq.heappop(ready)
        r = max((finish[k] for k in g.parents[t]), default=0.0)
        best = None
        for j in range(p):
            start = earliest_gap(busy[j], r, durations[t])
            if best is None or start + durations[t] < best[1] + durations[t]:
                best = (j, start)
        j, start = best
        busy[j].append((start, start + durations[t]))
        busy[j].sort()
        finish[t] = start + durations[t]
        for c in g.children[t]:
            waiting[c] -= 1
            if waiting[c] == 0:
                heapq.heappush(ready, (-priority[c], c))
    return max(finish.values())


def earliest_gap(intervals, ready, dur):
    t = ready
    for s, f in intervals:
        if t + dur <= s:
            return t
        t = max(t, f)
    return t


def duplication_finish(g, m, task, proc, times=None):
    """Earliest finish of ``task`` on ``proc`` with unlimited processors and free duplication.

    Each parent may be (re)computed on whichever processor gets its data to
    ``proc`` soonest, independently for every consumer; ``task`` still has to
    wait for all of its parents.  Plain recursion, no memo.
    """
    if times is None:
        times = exec_table(g, m)
    arrival = 0.0
    for k in g.parents[task]:
        arrival = max(arrival, min(duplication_finish(g, m, k, l, times) + comm(g, m, k, l, task, proc)
                                   for l in range(m.num_procs)))
    return arrival + times[task, proc]


def duplication_critical_path(g, m):
    """Largest over sinks of the sink's earliest duplicated finish on its best processor."""
    times = exec_table(g, m)
    sinks = [i for i in range(g.num_tasks) if not g.children[i]]
    return max(min(duplication_finish(g, m, s, j, times) for j in range(m.num_procs)) for s in sinks)


def bottom_levels(g, weights):
    """Node-weighted longest path from each task to any exit (inclusive)."""
    out = [0.0] * g.num_tasks
    for i in reversed(kahn(g)):
        out[i] = weights[i] + max((out[c] for c in g.children[i]), default=0.0)
    return out
