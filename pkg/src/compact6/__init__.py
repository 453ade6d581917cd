"""Sixth-order compact finite differences for Sobolev-type equations

    u_t + f(u)_x - gamma u_xx - delta u_xxt = g

with forward-Euler time stepping, in one and two space dimensions.
"""

from .banded import BandedLU, BandedMatrix, SingularMatrixError, banded_lu
from .diagnostics import (
    BoreMetrics,
    ErrorReport,
    InvariantReport,
    bore_rates,
    error_norms,
    invariants,
    leading_undulation,
    observed_order,
    simpson,
)
from .grid import Field1D, Field2D, Grid1D, Grid2D, GridError, make_grid, make_grid_2d, sample
from .models import EquationSpec, LinearSpec2D
from .operators import ClosureKind, DerivativeOperator, apply, build_first_derivative, build_second_derivative
from .stepper import RunResult, SimState, Status, TimeConfig, make_plan, run, run_2d, step_1d, step_2d

__version__ = "0.1.0"
