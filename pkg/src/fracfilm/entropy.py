"""Regularized mobility f_eps and the entropy functions G, G_eps.

G_eps is the convex function with G_eps'' = 1 / f_eps and G_eps(1) = G_eps'(1) = 0.
At eps = 0 the closed forms below are used; for eps > 0 the defining double
integral is collapsed to the single integral int_1^s (s - t) / f_eps(t) dt and
evaluated by graded Gauss-Legendre quadrature (see ``_kernels``).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .spectral import GridField

# Within this distance of n = 1 or n = 2 the neighbouring closed form is used.
CASE_SNAP = 1e-8


@dataclass(frozen=True)
class MobilitySpec:
    n: float
    eps: float = 0.0

    def __post_init__(self):
        if not self.n >= 1.0:
            raise ValueError(f"mobility exponent must be >= 1, got {self.n}")
        if not self.eps >= 0.0:
            raise ValueError(f"regularization must be >= 0, got {self.eps}")


@dataclass(frozen=True)
class EntropyFn:
    n: float
    eps: float = 0.0
    method: str = "auto"  # "auto" | "closed-form" | "quadrature"

    def __post_init__(self):
        MobilitySpec(self.n, self.eps)
        if self.method not in ("auto", "closed-form", "quadrature"):
            raise ValueError(f"unknown entropy evaluation method {self.method!r}")
        if self.method == "closed-form" and self.eps > 0:
            raise ValueError("no closed form is available for eps > 0")

    @classmethod
    def for_mobility(cls, spec, method="auto"):
        return cls(spec.n, spec.eps, method)


def mobility(s, spec):
    """f_eps(s) = max(s, 0)^n + eps, elementwise."""
    s = np.asarray(s, dtype=float)
    return np.maximum(s, 0.0) ** spec.n + spec.eps


def mobility_prime(s, spec):
    s = np.asarray(s, dtype=float)
    return np.where(s > 0.0, spec.n * np.maximum(s, 0.0) ** (spec.n - 1.0), 0.0)


def _closed_form(s, n):
    """G at eps = 0 for s >= 0 (s < 0 handled by the caller)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        if abs(n - 1.0) < CASE_SNAP:
            return np.where(s > 0.0, s * np.log(np.where(s > 0, s, 1.0)) - s + 1.0, 1.0)
        if n < 2.0 - CASE_SNAP:
            return -(s ** (2.0 - n)) / ((2.0 - n) * (n - 1.0)) + s / (n - 1.0) + 1.0 / (2.0 - n)
        if abs(n - 2.0) < CASE_SNAP:
            return np.where(s > 0.0, -np.log(np.where(s > 0, s, 1.0)) + s - 1.0, np.inf)
        return np.where(
            s > 0.0,
            1.0 / ((n - 2.0) * (n - 1.0)) / np.where(s > 0, s, 1.0) ** (n - 2.0)
            + s / (n - 1.0) - 1.0 / (n - 2.0),
            np.inf,
        )


def entropy_values(s, fn):
    """G_eps elementwise; +inf where the entropy is infinite (eps = 0 only)."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.empty_like(s)
    if fn.eps == 0.0:
        neg = s < 0.0
        out[neg] = np.inf
        pos = ~neg
        use_quad = fn.method == "quadrature"
        if use_quad:
            # the graded quadrature needs s > 0 when eps = 0
            quad = pos & (s > 0.0)
            out[quad] = _kernels.entropy_quadrature(s[quad], fn.n, 0.0)
            rest = pos & ~quad
            out[rest] = _closed_form(s[rest], fn.n)
        else:
            out[pos] = _closed_form(s[pos], fn.n)
        out[s == 1.0] = 0.0  # exact zero; the closed forms cancel only to rounding
        return out
    out[:] = _kernels.entropy_quadrature(s, fn.n, fn.eps)
    if not np.all(np.isfinite(out)):
        raise ArithmeticError("entropy quadrature produced a non-finite value")
    return out


def entropy_value(s, fn):
    """Scalar G_eps(s) (may be +inf)."""
    return float(entropy_values([s], fn)[0])


def entropy_total(u, fn):
    """Midpoint-rule integral of G_eps over the grid; +inf propagates."""
    v = np.asarray(u.values if isinstance(u, GridField) else u, dtype=float)
    g = entropy_values(v, fn)
    if np.any(np.isinf(g)):
        return math.inf
    return float(g.mean())
