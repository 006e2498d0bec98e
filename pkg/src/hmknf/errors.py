"""Exception types shared across the package."""


class HmknfError(Exception):
    pass


class ParseError(HmknfError, ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class GateExceeded(HmknfError):
    """A brute-force or exact computation would exceed its configured size gate."""

    def __init__(self, gate: str, limit: int, actual: int | None = None, hint: str = ""):
        msg = f"gate '{gate}' exceeded (limit {limit}"
        msg += f", got {actual})" if actual is not None else ")"
        if hint:
            msg += f": {hint}"
        super().__init__(msg)
        self.gate = gate
        self.limit = limit
        self.actual = actual


class ContractError(HmknfError, ValueError):
    """A precondition that guards soundness was violated by the caller."""
