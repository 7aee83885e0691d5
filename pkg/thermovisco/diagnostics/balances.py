from typing import NamedTuple

import numpy as np

from thermovisco.diagnostics.config import DiagnosticsTolerances
from thermovisco.diagnostics.records import DiagnosticsRecord
from thermovisco.integrator import StepReport
from thermovisco.materials import E4
from thermovisco.tensors import ElasticityTensors

__all__ = [
    "BalanceCheck",
    "CornerReport",
    "StepChecks",
    "energy_balance_residual",
    "entropy_balance_residual",
    "corner_constants",
    "corner_inequality_check",
    "check_step",
]


class BalanceCheck(NamedTuple):
    residual: float
    tolerance: float
    passed: bool


class CornerReport(NamedTuple):
    lhs: float
    diffusion_term: float
    dissipation_term: float
    kinetic_term: float
    constant_term: float
    rhs: float
    c1: float
    c2: float
    tolerance: float

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs + self.tolerance

    @property
    def passed(self) -> bool:
        return self.slack >= 0


class StepChecks(NamedTuple):
    t: float
    positivity: bool
    energy: BalanceCheck
    entropy: BalanceCheck
    corner: CornerReport

    @property
    def violations(self) -> list[str]:
        failed = []
        if not self.positivity:
            failed.append("positivity")
        if not self.energy.passed:
            failed.append("energy")
        if not self.entropy.passed:
            failed.append("entropy")
        if not self.corner.passed:
            failed.append("corner")
        return failed

    def as_dict(self) -> dict:
        return {
            "t": self.t,
            "positivity": self.positivity,
            "energy_residual": self.energy.residual,
            "entropy_residual": self.entropy.residual,
            "corner_slack": self.corner.slack,
            "violations": self.violations,
        }


def energy_balance_residual(
    rec_k: DiagnosticsRecord,
    rec_k1: DiagnosticsRecord,
    work_f: float,
    work_g: float,
    eps_dissipation: float = 0.0,
) -> float:
    """F(t_k+1) - F(t_k) + eps-dissipation - (dt int f.v_new + dt int g); nonpositive up to round-off."""
    return rec_k1.F - rec_k.F + eps_dissipation - (work_f + work_g)


def entropy_balance_residual(rec_k: DiagnosticsRecord, rec_k1: DiagnosticsRecord, dt: float) -> float:
    """S(t_k+1) - S(t_k) - dt (P_diff + k_D-bounded P_visc + P_src), productions at t_k+1."""
    production = rec_k1.P_diff + rec_k1.P_visc_lower + rec_k1.P_src
    return rec_k1.S - rec_k.S - dt * production


def corner_constants(tensors: ElasticityTensors, diffusivity: float, area: float, log_shift: float = E4) -> tuple[float, float]:
    """c1 = 4|B|^2 / D and c2 = 2 M^2 |B|^2 |Omega| / (e^2 k_D)."""
    b2 = tensors.coupling_norm**2
    c1 = 4.0 * b2 / diffusivity if diffusivity > 0 else (0.0 if b2 == 0 else np.inf)
    c2 = 2.0 * log_shift**2 * b2 * area / (np.e**2 * tensors.k_viscosity)
    return float(c1), float(c2)


def corner_inequality_check(
    rec_k: DiagnosticsRecord,
    rec_k1: DiagnosticsRecord,
    dt: float,
    tensors: ElasticityTensors,
    diffusivity: float,
    area: float,
    log_shift: float = E4,
    tolerance: float = 1e-8,
) -> CornerReport:
    """S_hat(t_k+1) - S_hat(t_k) >= dt [(D/4) T1 + (k_D/2) T2 - c1 int|v|^2 - c2] - tol."""
    c1, c2 = corner_constants(tensors, diffusivity, area, log_shift)

    diffusion_term = 0.25 * diffusivity * rec_k1.T1
    dissipation_term = 0.5 * tensors.k_viscosity * rec_k1.T2
    kinetic_term = c1 * rec_k1.v_l2sq if c1 > 0 else 0.0
    rhs = dt * (diffusion_term + dissipation_term - kinetic_term - c2)
    tol = tolerance * (1.0 + abs(rec_k1.S_hat))

    return CornerReport(
        lhs=rec_k1.S_hat - rec_k.S_hat,
        diffusion_term=diffusion_term,
        dissipation_term=dissipation_term,
        kinetic_term=kinetic_term,
        constant_term=c2,
        rhs=rhs,
        c1=c1,
        c2=c2,
        tolerance=tol,
    )


def check_step(
    rec_k: DiagnosticsRecord,
    rec_k1: DiagnosticsRecord,
    report: StepReport,
    f0: float,
    tensors: ElasticityTensors,
    diffusivity: float,
    area: float,
    log_shift: float = E4,
    tolerances: DiagnosticsTolerances = DiagnosticsTolerances(),
) -> StepChecks:
    energy = energy_balance_residual(rec_k, rec_k1, report.work_f, report.work_g, report.eps_dissipation)
    energy_tol = tolerances.energy * abs(f0)

    entropy = entropy_balance_residual(rec_k, rec_k1, report.dt)
    entropy_tol = tolerances.entropy * (1.0 + abs(rec_k1.S))

    return StepChecks(
        t=rec_k1.t,
        positivity=rec_k1.theta_min > 0,
        energy=BalanceCheck(energy, energy_tol, energy <= energy_tol),
        entropy=BalanceCheck(entropy, entropy_tol, entropy >= -entropy_tol),
        corner=corner_inequality_check(
            rec_k, rec_k1, report.dt, tensors, diffusivity, area, log_shift, tolerances.corner
        ),
    )
