"""Critical paths and list scheduling for task graphs on heterogeneous machines."""

from .core import CeftTable, CriticalPath, ceft_rank_down, ceft_rank_up, compute_ceft, critical_path, extract_critical_path
from .errors import CeftError, ParseError, ValidationError
from .formats import load_graph, load_machine, write_graph, write_machine
from .graph import Edge, ExplicitRow, Machine, Processor, TaskGraph, TaskNode, TwoPart
from .schedulers import ALGORITHMS, Schedule, schedule

__all__ = [
    "ALGORITHMS", "CeftError", "CeftTable", "CriticalPath", "Edge", "ExplicitRow", "Machine",
    "ParseError", "Processor", "Schedule", "TaskGraph", "TaskNode", "TwoPart", "ValidationError",
    "ceft_rank_down", "ceft_rank_up", "compute_ceft", "critical_path", "extract_critical_path",
    "load_graph", "load_machine", "schedule", "write_graph", "write_machine",
]
