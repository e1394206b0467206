from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from ceft.graph import Edge, ExplicitRow, Machine, Processor, TaskGraph, TaskNode

FIXTURES = Path(__file__).parent / "fixtures"

# (criterion, passed, detail) lines collected by the acceptance suite.
ACCEPTANCE = []

# Execution times of the three-task chain used across the suite.
CHAIN_ROWS = [[6, 35.25], [60.18, 10], [9.5, 15.8]]


def make_graph(rows, edges):
    tasks = [TaskNode(i, ExplicitRow(r)) for i, r in enumerate(rows)]
    return TaskGraph(tasks, [e if isinstance(e, Edge) else Edge(*e) for e in edges])


def chain_instance():
    g = make_graph(CHAIN_ROWS, [(0, 1, 10.0), (1, 2, 10.0)])
    return g, Machine.uniform(2)


@pytest.fixture
def chain():
    return chain_instance()


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def random_instance(rng, v_max=8, p_max=3, p_min=1, edge_prob=None, startup=True):
    """Small random DAG on a random fully connected machine."""
    v = int(rng.integers(1, v_max + 1))
    p = int(rng.integers(p_min, p_max + 1))
    density = rng.uniform(0.1, 0.9) if edge_prob is None else edge_prob
    rows = rng.uniform(1.0, 50.0, (v, p))
    edges = [(a, b, float(rng.uniform(0.0, 40.0)))
             for a in range(v) for b in range(a + 1, v) if rng.random() < density]
    g = make_graph(rows, edges)
    bw = rng.uniform(0.2, 3.0, (p, p))
    bw = np.triu(bw, 1) + np.triu(bw, 1).T + np.eye(p)
    lat = rng.uniform(0.0, 5.0, p) if startup else np.zeros(p)
    m = Machine([Processor(j, float(lat[j])) for j in range(p)], bw)
    return g, m


@st.composite
def instances(draw, v_max=8, p_max=3, p_min=1):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_instance(np.random.default_rng(seed), v_max, p_max, p_min)


def duplicated_machine(rng, base, copies):
    """Machine whose processors are ``copies`` clones of ``base`` distinct ones."""
    p = base * copies
    kind = np.repeat(np.arange(base), copies)
    base_bw = rng.uniform(0.5, 2.0, (base, base))
    base_bw = base_bw + base_bw.T
    bw = base_bw[np.ix_(kind, kind)]
    lat = rng.uniform(0, 3, base)[kind]
    return Machine([Processor(j, float(lat[j])) for j in range(p)], bw), kind


def record(criterion: str, passed: bool, detail: str) -> bool:
    ACCEPTANCE.append((criterion, passed, detail))
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}")
