"""Functions on (0, 1) in the Neumann cosine eigenbasis.

Basis: phi_0 = 1, phi_k(x) = sqrt(2) cos(k pi x), eigenvalues lambda_k = (k pi)^2,
orthonormal in L^2(0, 1).  Nodal data live on the midpoint grid
x_j = (2j + 1) / (2M), where the cosine/sine transforms are exact DCT/DST
pairs and the M-point midpoint rule integrates trigonometric polynomials of
degree < 2M exactly.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import fft

SQRT2 = np.sqrt(2.0)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Coefficients c_0..c_{N-1} of sum_k c_k phi_k."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", _frozen(c))

    @property
    def n_modes(self):
        return self.coeffs.size

    @property
    def mean(self):
        return float(self.coeffs[0])

    def truncate(self, n_modes):
        return SpectralField(self.coeffs[:n_modes])

    def padded(self, n_modes):
        if n_modes < self.n_modes:
            raise ValueError(f"cannot pad {self.n_modes} modes down to {n_modes}")
        out = np.zeros(n_modes)
        out[: self.n_modes] = self.coeffs
        return SpectralField(out)

    def __add__(self, other):
        return SpectralField(self.coeffs + _coeffs(other))

    def __sub__(self, other):
        return SpectralField(self.coeffs - _coeffs(other))

    def __mul__(self, scalar):
        return SpectralField(self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return SpectralField(-self.coeffs)

    def __eq__(self, other):
        return isinstance(other, SpectralField) and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None

    @classmethod
    def constant(cls, value, n_modes):
        c = np.zeros(n_modes)
        c[0] = value
        return cls(c)

    @classmethod
    def mode(cls, k, n_modes, amplitude=1.0):
        c = np.zeros(n_modes)
        c[k] = amplitude
        return cls(c)


def _coeffs(other):
    if not isinstance(other, SpectralField):
        raise TypeError("expected a SpectralField")
    return other.coeffs


@dataclass(frozen=True, eq=False)
class GridField:
    """Nodal values on the midpoint grid x_j = (2j + 1) / (2M)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ValueError("grid values must be 1-D")
        object.__setattr__(self, "values", _frozen(v))

    @property
    def n_points(self):
        return self.values.size

    @property
    def nodes(self):
        return nodes(self.n_points)

    def integral(self):
        """Midpoint-rule integral over (0, 1)."""
        return float(self.values.mean())


def nodes(m):
    return (2.0 * np.arange(m) + 1.0) / (2.0 * m)


def eigenvalues(n_modes):
    return (np.pi * np.arange(n_modes)) ** 2


def multiplier(n_modes, s):
    """lambda_k^s with the k = 0 entry pinned to 0 (also for s = 0)."""
    m = np.zeros(n_modes)
    m[1:] = (np.pi * np.arange(1, n_modes)) ** (2.0 * s)
    return m


def basis(k, x):
    x = np.asarray(x, dtype=float)
    if k == 0:
        return np.ones_like(x)
    return SQRT2 * np.cos(k * np.pi * x)


def basis_dx(k, x):
    x = np.asarray(x, dtype=float)
    if k == 0:
        return np.zeros_like(x)
    return -SQRT2 * k * np.pi * np.sin(k * np.pi * x)


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------

def analyze(g):
    """Grid values -> coefficients (M nodes give M coefficients)."""
    v = np.asarray(g.values if isinstance(g, GridField) else g, dtype=float)
    m = v.size
    if m == 0:
        raise ValueError("cannot analyze an empty grid")
    y = fft.dct(v, type=2)
    c = y / (SQRT2 * m)
    c[0] = y[0] / (2.0 * m)
    return SpectralField(c)


def _cos_synth(c, m):
    n = c.size
    if m < n:
        raise ValueError(f"grid of {m} points cannot carry {n} modes")
    y = np.zeros(m)
    y[0] = c[0]
    y[1:n] = c[1:] / SQRT2
    return fft.dct(y, type=3)


def _sin_synth(b, m):
    """sum_{k>=1} b_k sin(k pi x_j) for b = (b_1, ..., b_{N-1}), N <= M."""
    y = np.zeros(m)
    y[: b.size] = b
    # the DST-III carries the last mode with weight 1 instead of 2
    y[m - 1] *= 2.0
    return 0.5 * fft.dst(y, type=3)


def _sin_project(v, n_modes):
    """(1/M) sum_j v_j sin(k pi x_j) for k = 1..n_modes-1."""
    m = v.size
    y = fft.dst(v, type=2) / (2.0 * m)
    return y[: n_modes - 1]


def synthesize(u, m):
    """Coefficients -> values at the m midpoint nodes."""
    return GridField(_cos_synth(u.coeffs, int(m)))


def apply_dx(u, m):
    """Nodal values of d/dx of the series (sine series, zero slope at the walls)."""
    c = u.coeffs
    k = np.arange(1, c.size)
    return GridField(_sin_synth(-SQRT2 * np.pi * k * c[1:], int(m)))


def project_dx(values, n_modes):
    """Midpoint-rule inner products <v, d phi_k/dx>, k = 0..N-1 (entry 0 is 0)."""
    v = np.asarray(values.values if isinstance(values, GridField) else values, dtype=float)
    if v.size < n_modes:
        raise ValueError(f"grid of {v.size} points cannot resolve {n_modes} modes")
    out = np.zeros(n_modes)
    k = np.arange(1, n_modes)
    out[1:] = -SQRT2 * np.pi * k * _sin_project(v, n_modes)
    return out


# ---------------------------------------------------------------------------
# The operator I = -(-Delta_N)^{alpha/2} and its relatives
# ---------------------------------------------------------------------------

def _check_alpha(alpha, lo=0.0, hi=2.0):
    if not (lo <= alpha <= hi):
        raise ValueError(f"alpha must lie in [{lo}, {hi}], got {alpha}")


def apply_I(u, alpha):
    _check_alpha(alpha)
    return SpectralField(-multiplier(u.n_modes, alpha / 2.0) * u.coeffs)


def seminorm_sq(u, s):
    """Homogeneous seminorm sum_{k>=1} c_k^2 lambda_k^s."""
    if s < 0:
        raise ValueError(f"seminorm order must be nonnegative, got {s}")
    return float(np.sum(multiplier(u.n_modes, s) * u.coeffs ** 2))


def invert_I(g, alpha, mean_tol=None):
    """Zero-mean solution of -I(u) = g; g must have (numerically) zero mean."""
    _check_alpha(alpha)
    c = g.coeffs
    if mean_tol is None:
        mean_tol = 1e-12 * (1.0 + float(np.max(np.abs(c))))
    if abs(c[0]) > mean_tol:
        raise ValueError(
            f"-I(u) = g needs a mean-zero right-hand side; mean is {c[0]:.3e}"
        )
    out = np.zeros_like(c)
    out[1:] = c[1:] / multiplier(c.size, alpha / 2.0)[1:]
    return SpectralField(out)


def shifted_invert_I(g, alpha):
    """The unique v with -I(v) + mean(v) = g."""
    _check_alpha(alpha)
    c = g.coeffs
    out = np.empty_like(c)
    out[0] = c[0]
    out[1:] = c[1:] / multiplier(c.size, alpha / 2.0)[1:]
    return SpectralField(out)


def dx_I(u, alpha, m):
    """Nodal values of d/dx I(u)."""
    return apply_dx(apply_I(u, alpha), m)


# ---------------------------------------------------------------------------
# Dense matrices of the same maps (Jacobians, oracles)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def synthesis_matrix(n_modes, m):
    """S with S @ c = synthesize(c, m).values."""
    x = nodes(m)
    mat = np.column_stack([basis(k, x) for k in range(n_modes)])
    mat.setflags(write=False)
    return mat


@lru_cache(maxsize=64)
def dx_synthesis_matrix(n_modes, m):
    """D with D @ c = apply_dx(c, m).values."""
    x = nodes(m)
    mat = np.column_stack([basis_dx(k, x) for k in range(n_modes)])
    mat.setflags(write=False)
    return mat


def quadrature_weights(m):
    return np.full(m, 1.0 / m)
