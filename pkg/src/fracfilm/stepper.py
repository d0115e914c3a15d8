"""Implicit Euler for u_t + (f_eps(u) (I u)_x)_x = 0 with Neumann walls.

Each step solves the stationary Galerkin problem

    R_k(u) = c_k(u) - tau <f_eps(u) (I u)_x, (phi_k)_x> - c_k(g) = 0,   k < N,

with the inner product taken by the midpoint rule on M = 2N nodes.  Testing
against I(u) shows the discrete energy inequality holds exactly at a root, so
audits of it measure the solver, not the discretization.
"""

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import linalg

from . import spectral as sp
from .entropy import EntropyFn, MobilitySpec, entropy_total, mobility, mobility_prime
from .spectral import GridField, SpectralField

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    """The stationary solve did not converge.

    ``step`` is the 1-based time level that failed (None for a lone solve),
    ``partial`` the trajectory accepted so far, if any.
    """

    def __init__(self, message, residual_norm=math.nan, step=None, partial=None, eps=None):
        super().__init__(message)
        self.residual_norm = residual_norm
        self.step = step
        self.partial = partial
        self.eps = eps


@dataclass(frozen=True)
class ModelParams:
    alpha: float
    mobility: MobilitySpec
    n_modes: int
    grid_points: int = None
    newton_tol: float = 1e-10
    newton_max_iter: int = 50
    damping_min: float = 1.0 / 1024

    def __post_init__(self):
        if not (0.0 < self.alpha < 2.0):
            raise ValueError(f"alpha must lie in (0, 2), got {self.alpha}")
        if int(self.n_modes) < 4:
            raise ValueError(f"need at least 4 modes, got {self.n_modes}")
        object.__setattr__(self, "n_modes", int(self.n_modes))
        if self.grid_points is None:
            object.__setattr__(self, "grid_points", 2 * self.n_modes)
        if self.grid_points < 2 * self.n_modes:
            raise ValueError("grid_points must be at least 2 * n_modes (dealiasing)")
        if not self.newton_tol > 0:
            raise ValueError("newton_tol must be positive")
        if int(self.newton_max_iter) < 1:
            raise ValueError("newton_max_iter must be >= 1")
        if not (0.0 < self.damping_min <= 1.0):
            raise ValueError("damping_min must lie in (0, 1]")

    @property
    def n(self):
        return self.mobility.n

    @property
    def eps(self):
        return self.mobility.eps

    @property
    def audit_tol(self):
        return 10.0 * self.newton_tol

    def with_eps(self, eps):
        return replace(self, mobility=MobilitySpec(self.mobility.n, eps))

    def entropy_fn(self):
        return EntropyFn.for_mobility(self.mobility)


@dataclass(frozen=True)
class StationarySolveResult:
    u: SpectralField
    residual_norm: float
    iterations: int
    converged: bool
    picard_steps: int = 0


@dataclass
class Trajectory:
    times: list
    states: list
    params: ModelParams
    tau: float
    solves: list = field(default_factory=list)

    @property
    def n_steps(self):
        return len(self.states) - 1

    def coeff_array(self):
        return np.array([s.coeffs for s in self.states])

    @property
    def final(self):
        return self.states[-1]


# ---------------------------------------------------------------------------
# Residual and Jacobian
# ---------------------------------------------------------------------------

def _check_shapes(u, g, p):
    if u.n_modes != p.n_modes or g.n_modes != p.n_modes:
        raise ValueError(
            f"fields carry {u.n_modes} and {g.n_modes} modes, params expect {p.n_modes}"
        )


def flux(u, p):
    """Nodal values of f_eps(u) (I u)_x on the fine grid."""
    m = p.grid_points
    vals = sp.synthesize(u, m).values
    return mobility(vals, p.mobility) * sp.dx_I(u, p.alpha, m).values


def residual(u, g, tau, p):
    _check_shapes(u, g, p)
    r = u.coeffs - tau * sp.project_dx(flux(u, p), p.n_modes) - g.coeffs
    return SpectralField(r)


def jacobian(u, tau, p):
    """Exact derivative of the residual map with respect to the coefficients."""
    n, m = p.n_modes, p.grid_points
    S = sp.synthesis_matrix(n, m)
    D = sp.dx_synthesis_matrix(n, m)
    DI = D * (-sp.multiplier(n, p.alpha / 2.0))[None, :]
    vals = S @ u.coeffs
    dIx = DI @ u.coeffs
    inner = (mobility_prime(vals, p.mobility) * dIx)[:, None] * S + mobility(vals, p.mobility)[:, None] * DI
    return np.eye(n) - tau * (D.T / m) @ inner


def fd_jacobian(u, tau, p, g=None, rel_step=1e-7):
    """Column-by-column finite-difference Jacobian (oracle for ``jacobian``)."""
    g = g if g is not None else SpectralField(np.zeros(p.n_modes))
    base = residual(u, g, tau, p).coeffs
    scale = max(1.0, float(np.max(np.abs(u.coeffs))))
    h = rel_step * scale
    J = np.empty((p.n_modes, p.n_modes))
    for j in range(p.n_modes):
        e = np.zeros(p.n_modes)
        e[j] = h
        J[:, j] = (residual(u + SpectralField(e), g, tau, p).coeffs - base) / h
    return J


def _picard_matrix(u, tau, p):
    """Linearization with the mobility frozen at u."""
    n, m = p.n_modes, p.grid_points
    S = sp.synthesis_matrix(n, m)
    D = sp.dx_synthesis_matrix(n, m)
    DI = D * (-sp.multiplier(n, p.alpha / 2.0))[None, :]
    f = mobility(S @ u.coeffs, p.mobility)
    return np.eye(n) - tau * (D.T / m) @ (f[:, None] * DI)


def _norm(r):
    return float(np.max(np.abs(r)))


def stationary_solve(g, tau, p, u_init=None):
    """Damped Newton on the Galerkin residual, Picard (relaxation 0.5) as fallback."""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    u = g if u_init is None else u_init
    _check_shapes(u, g, p)
    r = residual(u, g, tau, p).coeffs
    rn = _norm(r)
    it = 0
    picard = 0
    while rn > p.newton_tol:
        if it >= p.newton_max_iter:
            raise SolverError(
                f"no convergence after {it} iterations (residual {rn:.3e})", residual_norm=rn
            )
        it += 1
        step = None
        try:
            step = linalg.solve(jacobian(u, tau, p), -r, check_finite=True)
        except (linalg.LinAlgError, ValueError):
            step = None
        accepted = False
        if step is not None:
            lam = 1.0
            while lam >= p.damping_min:
                trial = u + SpectralField(lam * step)
                tr = residual(trial, g, tau, p).coeffs
                tn = _norm(tr)
                if tn <= (1.0 - 1e-4 * lam) * rn or tn <= p.newton_tol:
                    u, r, rn = trial, tr, tn
                    accepted = True
                    break
                lam *= 0.5
        if not accepted:
            # Picard: solve with mobility frozen at the current iterate, relax by 0.5
            try:
                target = linalg.solve(_picard_matrix(u, tau, p), g.coeffs)
            except (linalg.LinAlgError, ValueError) as exc:
                raise SolverError(f"singular Picard system: {exc}", residual_norm=rn) from exc
            u = SpectralField(0.5 * u.coeffs + 0.5 * target)
            r = residual(u, g, tau, p).coeffs
            rn = _norm(r)
            picard += 1
            log.debug("picard fallback at iteration %d, residual %.3e", it, rn)
    return StationarySolveResult(u=u, residual_norm=rn, iterations=it, converged=True,
                                 picard_steps=picard)


# ---------------------------------------------------------------------------
# Time stepping
# ---------------------------------------------------------------------------

def energy_dissipation(u, p):
    """Midpoint-rule int f_eps(u) (I u)_x^2, matching the residual's quadrature."""
    m = p.grid_points
    vals = sp.synthesize(u, m).values
    dIx = sp.dx_I(u, p.alpha, m).values
    return float(np.mean(mobility(vals, p.mobility) * dIx ** 2))


def entropy_of(u, p, fn=None):
    fn = fn or p.entropy_fn()
    return entropy_total(sp.synthesize(u, p.grid_points), fn)


def implicit_euler_run(u0, T, n_steps, p, warm_states=None, strict=False):
    """Advance u0 by ``n_steps`` implicit Euler steps of size T / n_steps.

    ``warm_states`` (same length as the run) supplies Newton initial guesses,
    e.g. the neighbouring eps of a continuation.  The cumulative energy and
    entropy estimates are checked as the run proceeds; ``strict`` turns a
    breach into an ``ArithmeticError`` instead of a log warning.
    """
    n_steps = int(n_steps)
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if not T > 0:
        raise ValueError("T must be positive")
    if u0.n_modes != p.n_modes:
        u0 = u0.padded(p.n_modes) if u0.n_modes < p.n_modes else u0.truncate(p.n_modes)
    tau = T / n_steps
    traj = Trajectory(times=[0.0], states=[u0], params=p, tau=tau)
    fn = p.entropy_fn()
    e0 = sp.seminorm_sq(u0, p.alpha / 2.0)
    h0 = entropy_of(u0, p, fn)
    e_diss = 0.0
    h_diss = 0.0
    u = u0
    for k in range(1, n_steps + 1):
        guess = u
        if warm_states is not None and k < len(warm_states):
            w = warm_states[k]
            if w.n_modes == p.n_modes:
                guess = w
        try:
            try:
                res = stationary_solve(u, tau, p, u_init=guess)
            except SolverError:
                if guess is u:
                    raise
                res = stationary_solve(u, tau, p, u_init=u)
        except SolverError as exc:
            raise SolverError(f"step {k}: {exc}", exc.residual_norm, step=k,
                              partial=traj) from exc
        u = res.u
        traj.times.append(k * tau)
        traj.states.append(u)
        traj.solves.append(res)
        e_diss += 2.0 * tau * energy_dissipation(u, p)
        h_diss += tau * sp.seminorm_sq(u, p.alpha / 2.0 + 1.0)
        energy_slack = e0 - (sp.seminorm_sq(u, p.alpha / 2.0) + e_diss)
        breach = energy_slack < -k * p.audit_tol
        if math.isfinite(h0):
            entropy_slack = h0 - (entropy_of(u, p, fn) + h_diss)
            breach = breach or entropy_slack < -k * p.audit_tol
        if breach:
            msg = f"step {k}: cumulative energy/entropy estimate violated"
            if strict:
                raise ArithmeticError(msg)
            log.warning(msg)
    return traj


@dataclass
class ContinuationResult:
    eps_schedule: list
    trajectories: list
    distances: list  # L2 coefficient distance between successive final states


def epsilon_continuation(u0, T, n_steps, base, eps_schedule, callback=None):
    """Runs for each eps of a strictly decreasing schedule, each warm-started
    from the previous one; ``callback(eps, trajectory)`` fires as runs finish."""
    sched = [float(e) for e in eps_schedule]
    if not sched:
        raise ValueError("empty eps schedule")
    if any(e <= 0 for e in sched):
        raise ValueError("eps schedule entries must be positive")
    if any(b >= a for a, b in zip(sched, sched[1:])):
        raise ValueError("eps schedule must be strictly decreasing")
    trajs = []
    warm = None
    for eps in sched:
        p = base.with_eps(eps)
        try:
            traj = implicit_euler_run(u0, T, n_steps, p, warm_states=warm)
        except SolverError as exc:
            exc.eps = eps
            raise
        trajs.append(traj)
        if callback is not None:
            callback(eps, traj)
        warm = traj.states
    dists = [float(np.linalg.norm(b.final.coeffs - a.final.coeffs))
             for a, b in zip(trajs, trajs[1:])]
    return ContinuationResult(sched, trajs, dists)


@dataclass(frozen=True)
class ProjectedInitial:
    field: SpectralField
    min_before: float
    min_after: float
    tail_l2: float  # L2 norm of the discarded coefficients

    @property
    def undershoot(self):
        """How far projection pushed the minimum below zero (0 if it did not)."""
        return max(0.0, -self.min_after) if self.min_after < 0 <= self.min_before else 0.0

    @property
    def sign_changed(self):
        return (self.min_before >= 0) != (self.min_after >= 0)


def project_initial(values, p):
    """Project nodal initial data onto the first N modes."""
    v = np.asarray(values.values if isinstance(values, GridField) else values, dtype=float)
    full = sp.analyze(v)
    if full.n_modes >= p.n_modes:
        field = full.truncate(p.n_modes)
        tail = float(np.linalg.norm(full.coeffs[p.n_modes:]))
    else:
        field = full.padded(p.n_modes)
        tail = 0.0
    after = sp.synthesize(field, max(v.size, p.n_modes)).values
    out = ProjectedInitial(field, float(v.min()), float(after.min()), tail)
    if out.sign_changed:
        log.warning("projection moved the minimum from %.3e to %.3e", out.min_before, out.min_after)
    return out
