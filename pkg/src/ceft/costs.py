"""Execution and communication costs, plus processor-class grouping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CostArityMismatch
from .graph import Edge, ExplicitRow, Machine, Processor, TaskGraph, TaskNode, TwoPart


def exec_time(task: TaskNode, proc: int, m: Machine) -> float:
    """Execution time of ``task`` on processor ``proc``.

    Explicit rows are returned verbatim.  Two-part weights use
    ``w1/W1 + w0/W0`` against the processor's capability pair.
    """
    cost = task.cost
    if isinstance(cost, ExplicitRow):
        if len(cost.times) != m.num_procs:
            raise CostArityMismatch(
                f"task {task.id} has {len(cost.times)} execution times for {m.num_procs} processors"
            )
        return cost.times[proc]
    caps = m.processors[proc].caps
    if caps is None:
        raise CostArityMismatch(f"processor {proc} has no capability weights")
    return cost.w1 / caps[1] + cost.w0 / caps[0]


def exec_matrix(g: TaskGraph, m: Machine) -> np.ndarray:
    """v x p array of execution times."""
    p = m.num_procs
    out = np.empty((g.num_tasks, p))
    caps = None
    for task in g.tasks:
        cost = task.cost
        if isinstance(cost, ExplicitRow):
            if len(cost.times) != p:
                raise CostArityMismatch(
                    f"task {task.id} has {len(cost.times)} execution times for {p} processors"
                )
            out[task.id] = cost.times
        else:
            if caps is None:
                if not m.has_caps:
                    raise CostArityMismatch("machine has no capability weights for two-part tasks")
                caps = np.array([proc.caps for proc in m.processors], dtype=float)
            out[task.id] = cost.w1 / caps[:, 1] + cost.w0 / caps[:, 0]
    return out


def comm_cost(src_task: int, src_proc: int, dst_task: int, dst_proc: int,
              g: TaskGraph, m: Machine) -> float:
    data = g.data(src_task, dst_task)
    if src_proc == dst_proc:
        return 0.0
    return m.startup[src_proc] + data / m.bandwidth[src_proc, dst_proc]


def comm_terms(m: Machine):
    """Matrices ``(S, IB)`` with ``comm = S[l, j] + data * IB[l, j]``.

    Both are zero on the diagonal, so co-located tasks communicate for free.
    """
    p = m.num_procs
    off = ~np.eye(p, dtype=bool)
    startup = np.where(off, m.startup[:, None], 0.0)
    inv_bw = np.zeros((p, p))
    inv_bw[off] = 1.0 / m.bandwidth[off]
    return startup, inv_bw


def mean_exec_time(task: TaskNode, m: Machine) -> float:
    return float(np.mean([exec_time(task, j, m) for j in range(m.num_procs)]))


def mean_bandwidth(m: Machine) -> float:
    p = m.num_procs
    if p < 2:
        return float("inf")
    return float(m.bandwidth[~np.eye(p, dtype=bool)].mean())


def mean_comm_cost(edge: Edge, m: Machine) -> float:
    """Average startup plus data over average link bandwidth.

    A single-processor machine has no links, so the mean cost is 0.
    """
    if m.num_procs < 2:
        return 0.0
    return float(m.startup.mean()) + edge.data / mean_bandwidth(m)


@dataclass(frozen=True)
class ProcessorClassMap:
    class_of: tuple
    representative: tuple

    @property
    def class_count(self) -> int:
        return len(self.representative)

    def members(self, cls: int) -> list:
        return [j for j, c in enumerate(self.class_of) if c == cls]


def _close(a, b, rtol):
    if rtol == 0:
        return np.array_equal(a, b)
    return np.allclose(a, b, rtol=rtol, atol=0.0)


def group_processor_classes(g: TaskGraph, m: Machine, rtol: float = 0.0) -> ProcessorClassMap:
    """Partition processors into classes of interchangeable processors.

    Two processors ``a`` and ``b`` are interchangeable when their execution
    columns and startups match and ``bw[a][x] == bw[b][x]`` for every other
    processor ``x``.  A candidate joins a class only if it matches every
    current member, which also forces equal links inside the class.
    """
    p = m.num_procs
    times = exec_matrix(g, m)
    bw = m.bandwidth

    def same(a, b):
        if not _close(times[:, a], times[:, b], rtol):
            return False
        if not _close(m.startup[a], m.startup[b], rtol):
            return False
        others = [x for x in range(p) if x != a and x != b]
        return _close(bw[a, others], bw[b, others], rtol)

    classes = []
    class_of = [0] * p
    for j in range(p):
        for index, members in enumerate(classes):
            if all(same(j, other) for other in members):
                members.append(j)
                class_of[j] = index
                break
        else:
            class_of[j] = len(classes)
            classes.append([j])
    return ProcessorClassMap(tuple(class_of), tuple(members[0] for members in classes))


def reduce_to_classes(g: TaskGraph, m: Machine, classes: ProcessorClassMap):
    """Graph and machine restricted to one representative per class."""
    reps = list(classes.representative)
    procs = [
        Processor(new, m.processors[old].startup, m.processors[old].caps)
        for new, old in enumerate(reps)
    ]
    machine = Machine(procs, m.bandwidth[np.ix_(reps, reps)])
    if all(isinstance(t.cost, TwoPart) for t in g.tasks):
        return g, machine
    tasks = [
        TaskNode(t.id, ExplicitRow([t.cost.times[j] for j in reps]))
        if isinstance(t.cost, ExplicitRow) else t
        for t in g.tasks
    ]
    return TaskGraph(tasks, g.edges), machine
