"""Pseudospectral solver and estimate auditor for u_t + (u^n (I u)_x)_x = 0 on (0, 1)
with Neumann walls, where I = -(-Delta_N)^{alpha/2}."""

from ._kernels import HAS_NUMBA
from .diagnostics import (HolderFit, RunReport, StepDiagnostics, audit_trajectory,
                          holder_fit_space, holder_fit_time, positivity_check,
                          step_diagnostics, theoretical_time_exponent)
from .entropy import EntropyFn, MobilitySpec, entropy_total, entropy_value, mobility
from .kernel import KernelParams, apply_I_integral, kernel_eval
from .spectral import (GridField, SpectralField, analyze, apply_dx, apply_I, invert_I,
                       seminorm_sq, shifted_invert_I, synthesize)
from .stepper import (ModelParams, SolverError, StationarySolveResult, Trajectory,
                      epsilon_continuation, implicit_euler_run, project_initial, residual,
                      stationary_solve)

__version__ = "0.1.0"
