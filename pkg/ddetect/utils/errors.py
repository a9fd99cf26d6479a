from typing import Optional


class DetectabilityError(Exception):
    """Base error for the toolkit; carries the process exit code and a detail message."""

    exit_code = 2

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class InputError(DetectabilityError):
    exit_code = 2


class DesfParseError(InputError):
    def __init__(self, detail: str, line: int, column: int = 1, source: Optional[str] = None):
        prefix = f"{source}: " if source else ""
        super().__init__(f"{prefix}line {line}, column {column}: {detail}")
        self.reason = detail
        self.line = line
        self.column = column


class ConfigError(InputError):
    pass


class AssumptionError(InputError):
    pass


class BudgetExceeded(DetectabilityError):
    exit_code = 3

    def __init__(self, budget_name: str, budget: int):
        super().__init__(f"{budget_name} budget of {budget} exceeded")
        self.budget_name = budget_name
        self.budget = budget


class InvariantViolation(DetectabilityError):
    exit_code = 4
