"""Critical earliest finish times and the critical path they induce.

For every task ``i`` and processor ``j`` the table holds the length of the
longest dependence chain ending with ``i`` on ``j`` when every task on that
chain is mapped to its best processor:

    CEFT(i, j) = w(i, j)                                          (source)
    CEFT(i, j) = max_k min_l [w(i, j) + CEFT(k, l) + comm(k@l -> i@j)]

where ``k`` ranges over the parents of ``i``.  Each chain is optimised
independently, so a task shared by two chains may get two processors; this
is the duplication-permitted critical path.  Ties in the min go to the lowest
processor id, ties in the max to the lowest parent id.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .costs import (
    ProcessorClassMap,
    comm_terms,
    exec_matrix,
    group_processor_classes,
    reduce_to_classes,
)
from .graph import Machine, TaskGraph, sources_and_sinks, topological_order, transpose


@dataclass(frozen=True)
class CeftTable:
    values: np.ndarray
    # Back-pointers to the maximising parent and its minimising processor;
    # -1 for sources.  None when built in frontier mode.
    parent_task: Optional[np.ndarray]
    parent_proc: Optional[np.ndarray]
    # Frontier mode keeps only the chains that end at sinks.
    sink_paths: Optional[dict] = None

    @property
    def shape(self):
        return self.values.shape


@dataclass(frozen=True)
class CriticalPath:
    steps: tuple
    length: float

    @property
    def tasks(self) -> list:
        return [task for task, _ in self.steps]

    @property
    def assignment(self) -> dict:
        return dict(self.steps)

    def __len__(self):
        return len(self.steps)


def _parent_data(g: TaskGraph):
    return [np.array([g.data(k, i) for k in g.parents[i]], dtype=float) for i in range(g.num_tasks)]


def compute_ceft(g: TaskGraph, m: Machine, frontier: bool = False) -> CeftTable:
    """Fill the CEFT table in topological order.

    ``frontier=True`` drops per-cell chains once every child of a task has
    been processed and keeps only the chains ending at sinks; results are
    identical to the default mode.
    """
    v, p = g.num_tasks, m.num_procs
    times = exec_matrix(g, m)
    startup, inv_bw = comm_terms(m)
    pdata = _parent_data(g)
    cols = np.arange(p)

    values = np.empty((v, p))
    parent_task = np.full((v, p), -1, dtype=np.int64)
    parent_proc = np.full((v, p), -1, dtype=np.int64)

    live = {}
    pending = [len(c) for c in g.children]
    sink_paths = {}

    for i in topological_order(g):
        parents = g.parents[i]
        if not parents:
            values[i] = times[i]
            if frontier:
                live[i] = [((i, j), None) for j in range(p)]
        else:
            par = np.asarray(parents)
            # cost[k, l, j]: parent k on l, task i on j
            cost = (times[i][None, None, :] + values[par][:, :, None]) + (
                startup[None] + pdata[i][:, None, None] * inv_bw[None]
            )
            lmin = cost.argmin(axis=1)
            best = np.take_along_axis(cost, lmin[:, None, :], axis=1)[:, 0, :]
            kmax = best.argmax(axis=0)
            values[i] = best[kmax, cols]
            parent_task[i] = par[kmax]
            parent_proc[i] = lmin[kmax, cols]
            if frontier:
                live[i] = [
                    ((i, j), live[parents[kmax[j]]][lmin[kmax[j], j]]) for j in range(p)
                ]
                for k in parents:
                    pending[k] -= 1
                    if pending[k] == 0 and g.children[k]:
                        del live[k]
        if frontier and not g.children[i]:
            sink_paths[i] = live.pop(i)

    values.setflags(write=False)
    if frontier:
        return CeftTable(values, None, None, sink_paths)
    parent_task.setflags(write=False)
    parent_proc.setflags(write=False)
    return CeftTable(values, parent_task, parent_proc)


def _unwind(chain) -> list:
    steps = []
    while chain is not None:
        step, chain = chain
        steps.append(step)
    steps.reverse()
    return steps


def extract_critical_path(table: CeftTable, g: TaskGraph, m: Machine = None) -> CriticalPath:
    """Pick the sink whose best finish time is largest and walk back to a source."""
    _, sinks = sources_and_sinks(g)
    values = table.values
    best_sink, best_proc, best_len = None, None, -np.inf
    for s in sinks:
        proc = int(np.argmin(values[s]))
        if values[s, proc] > best_len:
            best_sink, best_proc, best_len = s, proc, values[s, proc]

    if table.sink_paths is not None:
        steps = _unwind(table.sink_paths[best_sink][best_proc])
    else:
        steps = []
        task, proc = best_sink, best_proc
        while task >= 0:
            steps.append((task, proc))
            task, proc = int(table.parent_task[task, proc]), int(table.parent_proc[task, proc])
        steps.reverse()
    return CriticalPath(tuple((int(t), int(q)) for t, q in steps), float(best_len))


def path_cost(steps, g: TaskGraph, m: Machine) -> float:
    """Execution plus communication cost of a chain under its own mapping."""
    times = exec_matrix(g, m)
    total = 0.0
    prev = None
    for task, proc in steps:
        if prev is not None:
            ptask, pproc = prev
            if pproc != proc:
                total += m.startup[pproc] + g.data(ptask, task) / m.bandwidth[pproc, proc]
        total += times[task, proc]
        prev = (task, proc)
    return total


def critical_path(g: TaskGraph, m: Machine, use_classes: bool = False,
                  frontier: bool = False) -> CriticalPath:
    """CEFT critical path of ``g`` on ``m``.

    With ``use_classes`` the table is built over one representative per
    processor class; the returned steps name representative processors.
    """
    if not use_classes:
        return extract_critical_path(compute_ceft(g, m, frontier=frontier), g, m)
    classes = group_processor_classes(g, m)
    g2, m2 = reduce_to_classes(g, m, classes)
    cp = extract_critical_path(compute_ceft(g2, m2, frontier=frontier), g2, m2)
    reps = classes.representative
    return CriticalPath(tuple((t, reps[q]) for t, q in cp.steps), cp.length)


def expand_classes(table: CeftTable, classes: ProcessorClassMap) -> np.ndarray:
    """Values of a class-reduced table spread back over every processor."""
    return table.values[:, list(classes.class_of)]


def ceft_rank_down(g: TaskGraph, m: Machine) -> np.ndarray:
    return compute_ceft(g, m).values.min(axis=1)


def ceft_rank_up(g: TaskGraph, m: Machine) -> np.ndarray:
    return ceft_rank_down(transpose(g), m)
