"""Operator verification suite: quadrature identities and kernel cross-checks."""

import numpy as np

from . import spectral as sp
from .kernel import KernelParams, apply_I_integral

IDENTITY_TOL = 1e-10
KERNEL_TOL = 1e-2


def random_field(n_modes, rng, decay=2.0):
    """Band-limited field with coefficients ~ N(0, 1) / (1 + k)^decay."""
    k = np.arange(n_modes)
    return sp.SpectralField(rng.standard_normal(n_modes) / (1.0 + k) ** decay)


def _rel(a, b):
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def identity_values(u, alpha, v=None):
    """(quadrature value, spectral value) for each identity on the 2N grid."""
    m = 2 * u.n_modes
    U = sp.synthesize(u, m).values
    IU = sp.synthesize(sp.apply_I(u, alpha), m).values
    dU = sp.apply_dx(u, m).values
    dIU = sp.dx_I(u, alpha, m).values
    out = {
        "energy_identity": (-np.mean(U * IU), sp.seminorm_sq(u, alpha / 2.0)),
        "l2_identity": (np.mean(IU ** 2), sp.seminorm_sq(u, alpha)),
        "entropy_dissipation_identity": (-np.mean(dIU * dU), sp.seminorm_sq(u, alpha / 2.0 + 1.0)),
        "flux_identity": (np.mean(dIU ** 2), sp.seminorm_sq(u, alpha + 1.0)),
    }
    if v is not None:
        V = sp.synthesize(v, m).values
        IV = sp.synthesize(sp.apply_I(v, alpha), m).values
        out["self_adjointness"] = (np.mean(IU * V), np.mean(U * IV))
    return {k: (float(a), float(b)) for k, (a, b) in out.items()}


def kernel_error(u, alpha, k_max, quad_points, n_points=16):
    """max |kernel - spectral| / max |spectral| at n_points interior midpoints."""
    xs = sp.nodes(n_points)
    ref = sp.synthesize(sp.apply_I(u, alpha), n_points).values
    val = apply_I_integral(u, xs, KernelParams(alpha, k_max), quad_points)
    return float(np.max(np.abs(val - ref)) / np.max(np.abs(ref)))


def verify_operator(alpha, n_modes=64, k_max=10_000, quad_points=10_000, seed=0):
    """Rows of (check, alpha, value, reference, rel_error, tolerance, passed)."""
    rng = np.random.default_rng(seed)
    u = random_field(n_modes, rng)
    v = random_field(n_modes, rng)
    rows = []
    for name, (a, b) in identity_values(u, alpha, v).items():
        err = _rel(a, b)
        rows.append(dict(check=name, alpha=alpha, value=a, reference=b, rel_error=err,
                         tolerance=IDENTITY_TOL, passed=err <= IDENTITY_TOL))
    low = u.truncate(min(9, n_modes))
    e1 = kernel_error(low, alpha, k_max, quad_points)
    e2 = kernel_error(low, alpha, 2 * k_max, 2 * quad_points)
    rows.append(dict(check=f"kernel_vs_spectral[k_max={k_max},quad={quad_points}]", alpha=alpha,
                     value=e1, reference=0.0, rel_error=e1, tolerance=KERNEL_TOL,
                     passed=e1 <= KERNEL_TOL))
    rows.append(dict(check=f"kernel_vs_spectral[k_max={2 * k_max},quad={2 * quad_points}]",
                     alpha=alpha, value=e2, reference=0.0, rel_error=e2, tolerance=KERNEL_TOL,
                     passed=e2 <= KERNEL_TOL))
    rows.append(dict(check="kernel_refinement_decreases", alpha=alpha, value=e2, reference=e1,
                     rel_error=e2 / e1 if e1 > 0 else 0.0, tolerance=1.0, passed=e2 < e1))
    return rows
