from typing import Optional

__all__ = [
    "StepRejectedError",
    "PositivityGuardError",
    "CouplingError",
    "StepFailedError",
    "PositivityBoundError",
]


class StepRejectedError(RuntimeError):
    """A step attempt that must be retried with a smaller dt; the state is untouched."""

    def __init__(self, message: str, dt: float, details: Optional[dict] = None):
        super().__init__(message)
        self.message = message
        self.dt = dt
        self.details = details or {}

    def __str__(self):
        return f"{self.message} (dt={self.dt:.6g}, details={self.details})"


class PositivityGuardError(StepRejectedError):
    def __init__(self, dt: float, allowed_dt: float, node: tuple[int, int]):
        super().__init__(
            "time step exceeds the temperature positivity guard",
            dt,
            {"allowed_dt": allowed_dt, "node": node},
        )
        self.allowed_dt = allowed_dt
        self.node = node


class CouplingError(StepRejectedError):
    def __init__(self, dt: float, change: float, iterations: int):
        super().__init__(
            "velocity/temperature coupling did not converge",
            dt,
            {"change": change, "iterations": iterations},
        )


class StepFailedError(RuntimeError):
    def __init__(self, message: str, t: float, dt: float, cause: Optional[Exception] = None):
        super().__init__(message)
        self.message = message
        self.t = t
        self.dt = dt
        self.cause = cause

    @property
    def details(self) -> dict:
        details = {"t": self.t, "dt": self.dt}
        if isinstance(self.cause, StepRejectedError):
            details.update(self.cause.details)
        return details

    def __str__(self):
        return f"{self.message} at t={self.t:.6g} with dt={self.dt:.3g}: {self.cause}"


class PositivityBoundError(StepFailedError):
    """No admissible step exists: the temperature positivity bound is already below dt_min."""

    def __init__(self, t: float, bound: float, node: tuple[int, int], dt_min: float):
        super().__init__("temperature positivity bound fell below dt_min", t, bound)
        self.bound = bound
        self.node = node
        self.dt_min = dt_min

    @property
    def details(self) -> dict:
        return {"t": self.t, "bound": self.bound, "node": self.node, "dt_min": self.dt_min}

    def __str__(self):
        return f"{self.message} at t={self.t:.6g}: bound {self.bound:.3g} < {self.dt_min:.3g} at node {self.node}"
