"""Line-oriented text formats for task graphs, machines and schedules.

Graph file::

    tasks <v>
    task <id> row <t_0> ... <t_{p-1}>      # or: task <id> weights <w0> <w1>
    edges <e>
    edge <src> <dst> <data>

Machine file::

    procs <p>
    proc <id> startup <L> [caps <W0> <W1>]
    bw
    <p rows of p reals>

``#`` starts a comment.  Floats are written with ``repr`` so a written file
loads back bit-exactly.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .errors import ParseError
from .graph import Edge, ExplicitRow, Machine, Processor, TaskGraph, TaskNode, TwoPart


def _lines(text):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line.split()


def _num(token, number, what, cast=float):
    try:
        value = cast(token)
    except ValueError:
        raise ParseError(f"bad {what} {token!r}", number) from None
    if cast is float and not math.isfinite(value):
        raise ParseError(f"non-finite {what} {token!r}", number)
    return value


@contextmanager
def _located(path):
    """Attach ``path`` to any ParseError raised inside the block."""
    try:
        yield
    except ParseError as exc:
        if path is None or exc.path is not None:
            raise
        raise ParseError(exc.reason, exc.line, path) from None


def _fmt(x: float) -> str:
    return repr(float(x))


def format_graph(g: TaskGraph) -> str:
    out = [f"tasks {g.num_tasks}"]
    for t in g.tasks:
        if isinstance(t.cost, ExplicitRow):
            out.append(f"task {t.id} row " + " ".join(_fmt(x) for x in t.cost.times))
        else:
            out.append(f"task {t.id} weights {_fmt(t.cost.w0)} {_fmt(t.cost.w1)}")
    out.append(f"edges {g.num_edges}")
    for e in g.edges:
        out.append(f"edge {e.src} {e.dst} {_fmt(e.data)}")
    return "\n".join(out) + "\n"


def parse_graph(text: str, path=None) -> TaskGraph:
    declared_tasks = declared_edges = None
    tasks = {}
    edges = []
    with _located(path):
        for number, words in _lines(text):
            key = words[0]
            if key == "tasks" and len(words) == 2:
                declared_tasks = _num(words[1], number, "task count", int)
            elif key == "task" and len(words) >= 3:
                tid = _num(words[1], number, "task id", int)
                if tid in tasks:
                    raise ParseError(f"task {tid} defined twice", number)
                kind = words[2]
                values = [_num(w, number, "cost") for w in words[3:]]
                if kind == "row" and values:
                    tasks[tid] = TaskNode(tid, ExplicitRow(values))
                elif kind == "weights" and len(values) == 2:
                    tasks[tid] = TaskNode(tid, TwoPart(*values))
                else:
                    raise ParseError(f"malformed task line: {' '.join(words)}", number)
            elif key == "edges" and len(words) == 2:
                declared_edges = _num(words[1], number, "edge count", int)
            elif key == "edge":
                if len(words) != 4:
                    raise ParseError(f"malformed edge line: {' '.join(words)}", number)
                edges.append(Edge(_num(words[1], number, "edge source", int),
                                  _num(words[2], number, "edge target", int),
                                  _num(words[3], number, "data volume")))
            else:
                raise ParseError(f"unrecognised line: {' '.join(words)}", number)
    if declared_tasks is None:
        raise ParseError("missing 'tasks <v>' header", path=path)
    if declared_tasks != len(tasks) or sorted(tasks) != list(range(declared_tasks)):
        raise ParseError(f"expected tasks 0..{declared_tasks - 1}, found {sorted(tasks)}", path=path)
    if declared_edges is not None and declared_edges != len(edges):
        raise ParseError(f"header declares {declared_edges} edges, found {len(edges)}", path=path)
    return TaskGraph([tasks[i] for i in range(declared_tasks)], edges)


def format_machine(m: Machine) -> str:
    out = [f"procs {m.num_procs}"]
    for proc in m.processors:
        line = f"proc {proc.id} startup {_fmt(proc.startup)}"
        if proc.caps is not None:
            line += f" caps {_fmt(proc.caps[0])} {_fmt(proc.caps[1])}"
        out.append(line)
    out.append("bw")
    for row in m.bandwidth:
        out.append(" ".join(_fmt(x) for x in row))
    return "\n".join(out) + "\n"


def parse_machine(text: str, path=None) -> Machine:
    declared = None
    procs = {}
    rows = []
    in_bw = False
    with _located(path):
        for number, words in _lines(text):
            if in_bw:
                rows.append([_num(w, number, "bandwidth") for w in words])
                if len(rows[-1]) != declared:
                    raise ParseError(f"bandwidth row has {len(rows[-1])} entries, expected {declared}", number)
                continue
            key = words[0]
            if key == "procs" and len(words) == 2:
                declared = _num(words[1], number, "processor count", int)
            elif key == "proc" and len(words) in (4, 7) and words[2] == "startup":
                pid = _num(words[1], number, "processor id", int)
                if pid in procs:
                    raise ParseError(f"processor {pid} defined twice", number)
                caps = None
                if len(words) == 7:
                    if words[4] != "caps":
                        raise ParseError(f"malformed proc line: {' '.join(words)}", number)
                    caps = (_num(words[5], number, "capability"), _num(words[6], number, "capability"))
                procs[pid] = Processor(pid, _num(words[3], number, "startup"), caps)
            elif key == "bw" and len(words) == 1:
                if declared is None:
                    raise ParseError("'bw' before 'procs <p>' header", number)
                in_bw = True
            else:
                raise ParseError(f"unrecognised line: {' '.join(words)}", number)
    if declared is None:
        raise ParseError("missing 'procs <p>' header", path=path)
    if sorted(procs) != list(range(declared)):
        raise ParseError(f"expected processors 0..{declared - 1}, found {sorted(procs)}", path=path)
    if len(rows) != declared:
        raise ParseError(f"expected {declared} bandwidth rows, found {len(rows)}", path=path)
    return Machine([procs[j] for j in range(declared)], np.array(rows))


def load_graph(path) -> TaskGraph:
    path = Path(path)
    return parse_graph(path.read_text(), path=str(path))


def load_machine(path) -> Machine:
    path = Path(path)
    return parse_machine(path.read_text(), path=str(path))


def write_graph(g: TaskGraph, path) -> None:
    Path(path).write_text(format_graph(g))


def write_machine(m: Machine, path) -> None:
    Path(path).write_text(format_machine(m))


def format_schedule(s, algo: str = None) -> str:
    out = []
    if algo:
        out.append(f"# algo {algo}")
    out.append(f"makespan {_fmt(s.makespan)}")
    for task, pl in enumerate(s.placements):
        out.append(f"place {task} {pl.proc} {_fmt(pl.start)} {_fmt(pl.finish)}")
    return "\n".join(out) + "\n"


def parse_schedule(text: str, path=None):
    from .schedulers import Placement, Schedule

    placements = {}
    with _located(path):
        for number, words in _lines(text):
            if words[0] == "makespan" and len(words) == 2:
                continue
            if words[0] != "place" or len(words) != 5:
                raise ParseError(f"unrecognised line: {' '.join(words)}", number)
            task = _num(words[1], number, "task id", int)
            placements[task] = Placement(_num(words[2], number, "processor id", int),
                                         _num(words[3], number, "start"), _num(words[4], number, "finish"))
    if sorted(placements) != list(range(len(placements))):
        raise ParseError("placements must cover tasks 0..v-1", path=path)
    return Schedule(tuple(placements[t] for t in range(len(placements))))
