"""Exception hierarchy shared by every module in the package."""


class CeftError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(CeftError, ValueError):
    """A task graph or machine violates one of its invariants."""


class CycleDetected(ValidationError):
    def __init__(self, remaining):
        self.remaining = sorted(remaining)
        super().__init__(f"task graph has a cycle through tasks {self.remaining}")


class DanglingEdge(ValidationError):
    def __init__(self, src, dst, num_tasks):
        self.src, self.dst = src, dst
        super().__init__(
            f"edge ({src}, {dst}) references a task outside 0..{num_tasks - 1}"
        )


class DuplicateEdge(ValidationError):
    def __init__(self, src, dst):
        self.src, self.dst = src, dst
        super().__init__(f"duplicate edge ({src}, {dst})")


class CostArityMismatch(ValidationError):
    pass


class NonPositiveCost(ValidationError):
    pass


class AsymmetricBandwidth(ValidationError):
    pass


class NoSuchEdge(CeftError, KeyError):
    def __init__(self, src, dst):
        self.src, self.dst = src, dst
        super().__init__(f"no edge ({src}, {dst}) in task graph")

    def __str__(self):
        return self.args[0]


class UnplacedParent(CeftError):
    def __init__(self, task, parent):
        self.task, self.parent = task, parent
        super().__init__(f"task {task} cannot be placed before its parent {parent}")


class EmptyCriticalPath(CeftError, ValueError):
    pass


class InvalidParams(CeftError, ValueError):
    pass


class NotPowerOfTwo(InvalidParams):
    pass


class ParseError(CeftError, ValueError):
    def __init__(self, message, line=None, path=None):
        self.reason = message
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
