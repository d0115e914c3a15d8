"""Per-step functionals, cumulative estimate audits, positivity and Hölder fits."""

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from . import spectral as sp
from .entropy import entropy_total, mobility
from .stepper import energy_dissipation


@dataclass(frozen=True)
class StepDiagnostics:
    t: float
    mass: float
    energy: float
    entropy: float
    energy_dissip: float
    entropy_dissip: float
    min_value: float
    flux_l1: float

    COLUMNS = ("t", "mass", "energy", "entropy", "energy_dissip",
               "entropy_dissip", "min_value", "flux_l1")

    def row(self):
        return [getattr(self, c) for c in self.COLUMNS]


def step_diagnostics(u, p, fn=None, t=0.0):
    fn = fn or p.entropy_fn()
    m = p.grid_points
    vals = sp.synthesize(u, m).values
    flux = mobility(vals, p.mobility) * sp.dx_I(u, p.alpha, m).values
    return StepDiagnostics(
        t=float(t),
        mass=u.mean,
        energy=sp.seminorm_sq(u, p.alpha / 2.0),
        entropy=entropy_total(vals, fn),
        energy_dissip=energy_dissipation(u, p),
        entropy_dissip=sp.seminorm_sq(u, p.alpha / 2.0 + 1.0),
        min_value=float(vals.min()),
        flux_l1=float(np.mean(np.abs(flux))),
    )


def trajectory_diagnostics(traj, fn=None):
    fn = fn or traj.params.entropy_fn()
    return [step_diagnostics(u, traj.params, fn, t) for t, u in zip(traj.times, traj.states)]


# ---------------------------------------------------------------------------
# Audits
# ---------------------------------------------------------------------------

@dataclass
class AuditVerdict:
    name: str
    passed: bool
    worst_slack: float
    worst_index: int
    first_failure: int = None  # step index, None when passed
    slacks: list = field(default_factory=list, repr=False)
    skipped: bool = False
    note: str = ""

    def summary(self):
        d = asdict(self)
        d.pop("slacks")
        return d


def _verdict(name, slacks, tol):
    slacks = np.asarray(slacks, dtype=float)
    bad = np.flatnonzero(slacks < -tol)
    # index 0 is the initial state, where every slack is 0 by definition
    i = int(np.argmin(slacks[1:])) + 1 if slacks.size > 1 else 0
    return AuditVerdict(name, bad.size == 0, float(slacks[i]), i,
                        None if bad.size == 0 else int(bad[0]), slacks.tolist())


@dataclass
class RunReport:
    mass: AuditVerdict
    energy: AuditVerdict
    entropy: AuditVerdict
    diagnostics: list
    positivity: dict = None
    holder_space: dict = None
    holder_time: dict = None

    @property
    def passed(self):
        return self.mass.passed and self.energy.passed and self.entropy.passed


def audit_trajectory(traj, fn=None, audit_tol=None, diagnostics=None):
    """Check mass conservation and the cumulative energy / entropy estimates.

    Slack at step k is (right side) - (left side), with the dissipation summed
    over the solved levels j = 1..k times tau.  Mass is checked against
    k * newton_tol, the inequalities against ``audit_tol`` (default
    10 * newton_tol).
    """
    if not traj.states:
        raise ValueError("empty trajectory")
    p = traj.params
    fn = fn or p.entropy_fn()
    tol = p.audit_tol if audit_tol is None else audit_tol
    diags = diagnostics or trajectory_diagnostics(traj, fn)
    tau = traj.tau
    d0 = diags[0]

    mass_dev = np.array([abs(d.mass - d0.mass) for d in diags])
    k = np.arange(len(diags))
    mass_slack = k * p.newton_tol - mass_dev
    mass = _verdict("mass", mass_slack, 0.0)

    e_cum = 2.0 * tau * np.cumsum([0.0] + [d.energy_dissip for d in diags[1:]])
    energy = _verdict("energy", [d0.energy - (d.energy + e) for d, e in zip(diags, e_cum)], tol)

    if math.isfinite(d0.entropy):
        h_cum = tau * np.cumsum([0.0] + [d.entropy_dissip for d in diags[1:]])
        h_slack = [d0.entropy - (d.entropy + h) if math.isfinite(d.entropy) else -math.inf
                   for d, h in zip(diags, h_cum)]
        entropy = _verdict("entropy", h_slack, tol)
    else:
        entropy = AuditVerdict("entropy", True, math.nan, 0, skipped=True,
                               note="initial entropy is infinite")
    return RunReport(mass=mass, energy=energy, entropy=entropy, diagnostics=diags)


def positivity_threshold(alpha):
    return 2.0 + 2.0 / (alpha + 1.0)


@dataclass
class PositivityVerdict:
    hypothesis: bool
    threshold: float
    min_value: float
    min_index: int
    floor: float
    above_floor: bool
    initial_positive: bool
    initial_entropy_finite: bool
    suspected_defect: bool

    @property
    def status(self):
        if not self.hypothesis:
            return "informational"
        return "pass" if self.above_floor else "fail"

    def summary(self):
        d = asdict(self)
        d["status"] = self.status
        return d


def positivity_check(traj, p=None, floor=None, diagnostics=None):
    p = p or traj.params
    diags = diagnostics or trajectory_diagnostics(traj)
    mins = np.array([d.min_value for d in diags])
    if floor is None:
        floor = 1e-8 * abs(diags[0].mass)
    thr = positivity_threshold(p.alpha)
    hyp = p.n > thr
    i = int(np.argmin(mins))
    above = bool(mins[i] > floor)
    init_pos = bool(mins[0] > 0)
    init_h = math.isfinite(diags[0].entropy)
    return PositivityVerdict(
        hypothesis=bool(hyp), threshold=thr, min_value=float(mins[i]), min_index=i,
        floor=float(floor), above_floor=above, initial_positive=init_pos,
        initial_entropy_finite=init_h,
        suspected_defect=bool(hyp and init_pos and init_h and not above),
    )


# ---------------------------------------------------------------------------
# Hölder exponents
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HolderFit:
    exponent_est: float
    constant_est: float
    pairs_used: int
    direction: str
    fitted: bool = True
    theoretical: float = None

    @classmethod
    def not_a_fit(cls, direction, theoretical=None):
        return cls(0.0, 0.0, 0, direction, fitted=False, theoretical=theoretical)

    def summary(self):
        return asdict(self)


def theoretical_space_exponent(alpha):
    return (alpha - 1.0) / 2.0


def theoretical_time_exponent(alpha):
    """mu = gamma / (2 gamma + 3) with gamma = (alpha - 1) / 2."""
    gamma = theoretical_space_exponent(alpha)
    return gamma / (2.0 * gamma + 3.0)


def _loglog_fit(seps, incr, direction, theoretical, min_pairs=8, rel_floor=1e-13):
    incr = np.asarray(incr, dtype=float)
    scale = float(np.max(incr)) if incr.size else 0.0
    ok = incr > rel_floor * max(scale, 1e-300)
    if scale == 0.0 or not np.any(ok):
        return HolderFit.not_a_fit(direction, theoretical)
    if ok.sum() < min_pairs:
        raise ValueError(f"only {int(ok.sum())} usable separations, need {min_pairs}")
    slope, intercept = np.polyfit(np.log(seps[ok]), np.log(incr[ok]), 1)
    return HolderFit(float(slope), float(np.exp(intercept)), int(ok.sum()), direction,
                     theoretical=theoretical)


def holder_fit_space(u, alpha, m=None, n_lags=10):
    """Fit max |u(x + d) - u(x)| ~ C d^gamma over the first ``n_lags`` node spacings."""
    m = m or 2 * u.n_modes
    vals = sp.synthesize(u, m).values
    theo = theoretical_space_exponent(alpha)
    if n_lags < 8 or n_lags >= m:
        raise ValueError(f"need 8 <= n_lags < {m}, got {n_lags}")
    incr = _kernels.max_lag_increments(vals, n_lags)[:, 0]
    seps = np.arange(1, n_lags + 1) / m
    return _loglog_fit(seps, incr, "space", theo)


def holder_fit_time(traj, x_samples=16, n_lags=None):
    """Worst-case (largest constant) fit of |u(t2, x) - u(t1, x)| ~ M |t2 - t1|^mu."""
    theo = theoretical_time_exponent(traj.params.alpha)
    n_states = len(traj.states)
    if n_states - 1 < 8:
        raise ValueError("time fit needs at least 8 steps")
    n_lags = n_lags or min(10, n_states - 1)
    m = traj.params.grid_points
    idx = np.unique(np.linspace(0, m - 1, int(x_samples)).round().astype(int))
    S = sp.synthesis_matrix(traj.params.n_modes, m)[idx]
    series = traj.coeff_array() @ S.T  # (time, x)
    incr = _kernels.max_lag_increments(series, n_lags)
    seps = np.arange(1, n_lags + 1) * traj.tau
    best = None
    for col in range(incr.shape[1]):
        try:
            fit = _loglog_fit(seps, incr[:, col], "time", theo)
        except ValueError:
            continue
        if fit.fitted and (best is None or fit.constant_est > best.constant_est):
            best = fit
    return best or HolderFit.not_a_fit("time", theo)
