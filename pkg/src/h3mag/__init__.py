"""Geodesics and Killing magnetic curves in the Heisenberg group H3."""

from .closedform import ClosedFormSpec, DomainViolation, FamilyId, families, to_initial_state
from .closedform import eval as eval_curve
from .dynamics import State, SystemKind, first_integral, lorentz_rhs
from .geometry import KillingFieldId, ModelParams, PointH3
from .integrate import BACKEND, IntegrationError, IntegratorConfig, integrate, sweep
from .verify import (compare_with_integration, errata_ledger, ode_residual,
                     structure_selftest)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ClosedFormSpec", "DomainViolation", "FamilyId", "IntegrationError",
    "IntegratorConfig", "KillingFieldId", "ModelParams", "PointH3", "State", "SystemKind",
    "compare_with_integration", "errata_ledger", "eval_curve", "families", "first_integral",
    "integrate", "lorentz_rhs", "ode_residual", "structure_selftest", "sweep",
    "to_initial_state",
]
