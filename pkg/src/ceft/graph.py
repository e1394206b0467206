"""Task graphs, machines and the structural operations on them.

Task and processor ids are dense 0-based integers.  Every ordering tie in the
package is broken by ascending id, so all results are deterministic.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import (
    AsymmetricBandwidth,
    CostArityMismatch,
    CycleDetected,
    DanglingEdge,
    DuplicateEdge,
    NonPositiveCost,
    NoSuchEdge,
    ValidationError,
)


@dataclass(frozen=True)
class ExplicitRow:
    """One execution time per processor."""

    times: tuple

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))


@dataclass(frozen=True)
class TwoPart:
    """Task weights for the two-part cost model (see ``costs.exec_time``)."""

    w0: float
    w1: float


CostDescriptor = Union[ExplicitRow, TwoPart]


@dataclass(frozen=True)
class TaskNode:
    id: int
    cost: CostDescriptor


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    data: float


def _check_cost(task: TaskNode) -> None:
    cost = task.cost
    if isinstance(cost, ExplicitRow):
        values = cost.times
        if not values:
            raise CostArityMismatch(f"task {task.id} has an empty execution-time row")
    elif isinstance(cost, TwoPart):
        values = (cost.w0, cost.w1)
    else:
        raise ValidationError(f"task {task.id} has unknown cost descriptor {cost!r}")
    for value in values:
        if not (value > 0 and np.isfinite(value)):
            raise NonPositiveCost(f"task {task.id} has non-positive cost {value!r}")


class TaskGraph:
    """Immutable weighted DAG of tasks.

    Structural invariants (dense ids, valid endpoints, no duplicate edges,
    acyclicity, strictly positive costs) are checked on construction.
    """

    __slots__ = ("tasks", "edges", "parents", "children", "_data", "_topo")

    def __init__(self, tasks: Sequence[TaskNode], edges: Iterable):
        tasks = tuple(tasks)
        for index, task in enumerate(tasks):
            if task.id != index:
                raise ValidationError(
                    f"task ids must be dense 0..v-1 in order; position {index} holds id {task.id}"
                )
            _check_cost(task)
        v = len(tasks)
        if v == 0:
            raise ValidationError("task graph must contain at least one task")

        normalized = []
        data = {}
        for edge in edges:
            if not isinstance(edge, Edge):
                edge = Edge(int(edge[0]), int(edge[1]), float(edge[2]))
            if not (0 <= edge.src < v and 0 <= edge.dst < v):
                raise DanglingEdge(edge.src, edge.dst, v)
            if (edge.src, edge.dst) in data:
                raise DuplicateEdge(edge.src, edge.dst)
            if not (edge.data >= 0 and np.isfinite(edge.data)):
                raise NonPositiveCost(
                    f"edge ({edge.src}, {edge.dst}) has invalid data volume {edge.data!r}"
                )
            data[(edge.src, edge.dst)] = float(edge.data)
            normalized.append(Edge(edge.src, edge.dst, float(edge.data)))

        parents = [[] for _ in range(v)]
        children = [[] for _ in range(v)]
        for edge in normalized:
            parents[edge.dst].append(edge.src)
            children[edge.src].append(edge.dst)

        self.tasks = tasks
        self.edges = tuple(normalized)
        self.parents = tuple(tuple(sorted(p)) for p in parents)
        self.children = tuple(tuple(sorted(c)) for c in children)
        self._data = data
        self._topo = tuple(_kahn(self))

    @property
    def num_tasks(self) -> int:
        return len(self.tasks)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def data(self, src: int, dst: int) -> float:
        try:
            return self._data[(src, dst)]
        except KeyError:
            raise NoSuchEdge(src, dst) from None

    def has_edge(self, src: int, dst: int) -> bool:
        return (src, dst) in self._data

    def edge_key(self):
        """Canonical, hashable description of the graph (used for equality)."""
        return (self.tasks, tuple(sorted((e.src, e.dst, e.data) for e in self.edges)))

    def __eq__(self, other):
        if not isinstance(other, TaskGraph):
            return NotImplemented
        return self.edge_key() == other.edge_key()

    def __hash__(self):
        return hash(self.edge_key())

    def __repr__(self):
        return f"TaskGraph(v={self.num_tasks}, e={self.num_edges})"


def _kahn(g: TaskGraph) -> list:
    indegree = [len(p) for p in g.parents]
    heap = [i for i, d in enumerate(indegree) if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        task = heapq.heappop(heap)
        order.append(task)
        for child in g.children[task]:
            indegree[child] -= 1
            if indegree[child] == 0:
                heapq.heappush(heap, child)
    if len(order) != g.num_tasks:
        raise CycleDetected(i for i, d in enumerate(indegree) if d > 0)
    return order


def topological_order(g: TaskGraph) -> list:
    """Kahn's algorithm, always releasing the lowest ready id first."""
    return list(g._topo)


def transpose(g: TaskGraph) -> TaskGraph:
    return TaskGraph(g.tasks, [Edge(e.dst, e.src, e.data) for e in g.edges])


def sources_and_sinks(g: TaskGraph):
    sources = [i for i in range(g.num_tasks) if not g.parents[i]]
    sinks = [i for i in range(g.num_tasks) if not g.children[i]]
    return sources, sinks


def levels(g: TaskGraph) -> list:
    """Hop depth of each task: 0 for sources, 1 + max parent depth otherwise."""
    depth = [0] * g.num_tasks
    for task in g._topo:
        for parent in g.parents[task]:
            depth[task] = max(depth[task], depth[parent] + 1)
    return depth


def width(g: TaskGraph) -> int:
    """Largest number of tasks sharing one hop depth."""
    counts = {}
    for d in levels(g):
        counts[d] = counts.get(d, 0) + 1
    return max(counts.values())


@dataclass(frozen=True)
class Processor:
    id: int
    startup: float = 0.0
    caps: tuple = None  # (W0, W1) for the two-part cost model


class Machine:
    """Processors plus a symmetric bandwidth matrix (diagonal unused)."""

    __slots__ = ("processors", "bandwidth", "startup")

    def __init__(self, processors: Sequence[Processor], bandwidth):
        processors = tuple(processors)
        p = len(processors)
        if p == 0:
            raise ValidationError("machine must have at least one processor")
        for index, proc in enumerate(processors):
            if proc.id != index:
                raise ValidationError(
                    f"processor ids must be dense 0..p-1 in order; position {index} holds id {proc.id}"
                )
            if not (proc.startup >= 0 and np.isfinite(proc.startup)):
                raise NonPositiveCost(f"processor {proc.id} has invalid startup {proc.startup!r}")
            if proc.caps is not None:
                if len(proc.caps) != 2:
                    raise CostArityMismatch(f"processor {proc.id} caps must be a pair")
                if not all(c > 0 and np.isfinite(c) for c in proc.caps):
                    raise NonPositiveCost(f"processor {proc.id} has non-positive capability")

        bw = np.array(bandwidth, dtype=float)
        if bw.shape != (p, p):
            raise CostArityMismatch(f"bandwidth matrix must be {p}x{p}, got {bw.shape}")
        off = ~np.eye(p, dtype=bool)
        if np.any(~np.isfinite(bw[off])) or np.any(bw[off] <= 0):
            raise NonPositiveCost("off-diagonal bandwidths must be positive and finite")
        if not np.array_equal(bw[off], bw.T[off]):
            bad = np.argwhere((bw != bw.T) & off)[0]
            raise AsymmetricBandwidth(
                f"bandwidth[{bad[0]}][{bad[1]}]={bw[bad[0], bad[1]]} differs from "
                f"bandwidth[{bad[1]}][{bad[0]}]={bw[bad[1], bad[0]]}"
            )
        bw.setflags(write=False)
        startup = np.array([proc.startup for proc in processors], dtype=float)
        startup.setflags(write=False)
        self.processors = processors
        self.bandwidth = bw
        self.startup = startup

    @property
    def num_procs(self) -> int:
        return len(self.processors)

    @property
    def has_caps(self) -> bool:
        return all(proc.caps is not None for proc in self.processors)

    @classmethod
    def uniform(cls, p: int, bandwidth: float = 1.0, startup: float = 0.0):
        procs = [Processor(j, startup) for j in range(p)]
        return cls(procs, np.full((p, p), float(bandwidth)))

    def __eq__(self, other):
        if not isinstance(other, Machine):
            return NotImplemented
        off = ~np.eye(self.num_procs, dtype=bool)
        return (
            self.processors == other.processors
            and self.bandwidth.shape == other.bandwidth.shape
            and np.array_equal(self.bandwidth[off], other.bandwidth[off])
        )

    def __repr__(self):
        return f"Machine(p={self.num_procs})"


def validate(g: TaskGraph, m: Machine) -> None:
    """Re-check every invariant of ``g`` and ``m`` and their compatibility."""
    # Re-running construction re-checks the structural invariants.
    TaskGraph(g.tasks, g.edges)
    Machine(m.processors, m.bandwidth)
    p = m.num_procs
    for task in g.tasks:
        cost = task.cost
        if isinstance(cost, ExplicitRow):
            if len(cost.times) != p:
                raise CostArityMismatch(
                    f"task {task.id} has {len(cost.times)} execution times but the machine has {p} processors"
                )
        elif not m.has_caps:
            raise CostArityMismatch(
                f"task {task.id} uses two-part weights but the machine lacks capability weights"
            )
