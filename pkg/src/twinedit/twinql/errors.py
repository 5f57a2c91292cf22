"""Error types raised by the query language."""


class QlError(Exception):
    """Base class for all query-language errors."""


class QlSyntaxError(QlError):
    def __init__(self, line: int, col: int, expected: str):
        super().__init__(f"syntax error at {line}:{col}: expected {expected}")
        self.line = line
        self.col = col
        self.expected = expected


class BudgetExceeded(QlError):
    """Evaluation step budget or list cap exhausted."""


class QlTypeError(QlError):
    def __init__(self, node: str, expected: str, got: str):
        super().__init__(f"{node}: expected {expected}, got {got}")
        self.node = node
        self.expected = expected
        self.got = got


class UnknownIdentifier(QlError):
    pass


class FrameOutOfRange(QlError):
    pass


class NoSuchObject(QlError):
    pass
