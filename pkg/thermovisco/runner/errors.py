from typing import Any, Optional

__all__ = ["ScenarioValidationError", "InvariantViolationError"]


class ScenarioValidationError(ValueError):
    def __init__(self, message: str, report: Optional[dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.report = report or {}

    @property
    def details(self) -> dict[str, Any]:
        return self.report

    def __str__(self):
        if not self.report:
            return self.message
        return f"{self.message}: {self.report}"


class InvariantViolationError(RuntimeError):
    def __init__(self, message: str, step: int, t: float, checks: dict[str, Any]):
        super().__init__(message)
        self.message = message
        self.step = step
        self.t = t
        self.checks = checks

    @property
    def details(self) -> dict[str, Any]:
        return {"step": self.step, "t": self.t, **self.checks}

    def __str__(self):
        return f"{self.message} at step {self.step} (t={self.t:.6g}): {self.checks}"
