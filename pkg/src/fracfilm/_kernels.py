"""Hot inner loops, each with a numba and a pure-numpy implementation.

The numba path is used when numba imports cleanly and the environment
variable ``FRACFILM_DISABLE_NUMBA`` is unset (or ``0``).  Both paths compute
the same quantities with the same arithmetic; ``tests/test_kernels.py`` holds
them against each other and ``benchmarks/bench_kernels.py`` times them.
"""

import os

import numpy as np

_flag = os.environ.get("FRACFILM_DISABLE_NUMBA", "0").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError("numba disabled by FRACFILM_DISABLE_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


GL_ORDER = 20
GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)

# Below this many panel halvings the graded entropy quadrature stops refining.
_MAX_LEVELS = 200


# ---------------------------------------------------------------------------
# Truncated image sums of the periodized kernel
# ---------------------------------------------------------------------------

@njit(cache=True)
def _image_sum_numba(x, y, alpha, k_max, skip_direct):
    s = 1.0 + alpha
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        d = x[i] - y[i]
        p = x[i] + y[i]
        acc = 0.0
        # sum from the outside in so the large terms are added last
        for k in range(k_max, 0, -1):
            acc += abs(d - 2.0 * k) ** -s + abs(d + 2.0 * k) ** -s
            acc += abs(p - 2.0 * k) ** -s + abs(p + 2.0 * k) ** -s
        acc += abs(p) ** -s
        if not skip_direct:
            acc += abs(d) ** -s
        out[i] = acc
    return out


def _image_sum_numpy(x, y, alpha, k_max, skip_direct, chunk=4096):
    s = 1.0 + alpha
    out = np.zeros(x.shape[0])
    d = (x - y)[:, None]
    p = (x + y)[:, None]
    # same outside-in order as the compiled loop
    for hi in range(k_max, 0, -chunk):
        k = 2.0 * np.arange(hi, max(hi - chunk, 0), -1, dtype=float)[None, :]
        terms = (np.abs(d - k) ** -s + np.abs(d + k) ** -s
                 + np.abs(p - k) ** -s + np.abs(p + k) ** -s)
        out += terms.sum(axis=1)
    out += np.abs(p[:, 0]) ** -s
    if not skip_direct:
        out += np.abs(d[:, 0]) ** -s
    return out


def image_sum(x, y, alpha, k_max, skip_direct=False, use_numba=None):
    """Sum over |k| <= k_max of |x-y-2k|^-(1+a) + |x+y-2k|^-(1+a), elementwise."""
    x = np.ascontiguousarray(x, dtype=float).ravel()
    y = np.ascontiguousarray(y, dtype=float).ravel()
    if use_numba is None:
        use_numba = HAS_NUMBA
    if use_numba:
        return _image_sum_numba(x, y, float(alpha), int(k_max), bool(skip_direct))
    return _image_sum_numpy(x, y, float(alpha), int(k_max), bool(skip_direct))


# ---------------------------------------------------------------------------
# Entropy G_eps(s) = int_1^s int_1^r dt dr / (t_+^n + eps)
#                  = int over [min(s,1), max(s,1)] of |s - t| / f_eps(t) dt
# ---------------------------------------------------------------------------

@njit(cache=True)
def _entropy_one_numba(s, n, eps, nodes, weights):
    if s == 1.0:
        return 0.0
    lo = min(s, 1.0)
    hi = max(s, 1.0)
    total = 0.0
    if lo < 0.0:
        # f_eps = eps on the negative axis and s = lo there
        total += 0.5 * s * s / eps
        lo = 0.0
    a = lo
    b = hi
    if a > 0.0:
        stop = a
    else:
        stop = (1e-17 * eps) ** (1.0 / n)
    right = b
    for _ in range(_MAX_LEVELS):
        left = 0.5 * right
        if left <= stop:
            left = a
        c = 0.5 * (right + left)
        h = 0.5 * (right - left)
        for q in range(nodes.shape[0]):
            t = c + h * nodes[q]
            total += h * weights[q] * abs(s - t) / (t ** n + eps)
        if left == a:
            break
        right = left
    return total


@njit(cache=True)
def _entropy_numba(s_arr, n, eps, nodes, weights):
    out = np.empty(s_arr.shape[0])
    for i in range(s_arr.shape[0]):
        out[i] = _entropy_one_numba(s_arr[i], n, eps, nodes, weights)
    return out


def _panel_edges(a, b, eps, n):
    stop = a if a > 0.0 else (1e-17 * eps) ** (1.0 / n)
    edges = [b]
    right = b
    for _ in range(_MAX_LEVELS):
        left = 0.5 * right
        if left <= stop:
            left = a
        edges.append(left)
        if left == a:
            break
        right = left
    return np.array(edges)


def _entropy_numpy(s_arr, n, eps, nodes, weights):
    out = np.empty(s_arr.shape[0])
    for i, s in enumerate(s_arr):
        if s == 1.0:
            out[i] = 0.0
            continue
        lo, hi = min(s, 1.0), max(s, 1.0)
        total = 0.0
        if lo < 0.0:
            total += 0.5 * s * s / eps
            lo = 0.0
        edges = _panel_edges(lo, hi, eps, n)
        right, left = edges[:-1, None], edges[1:, None]
        c = 0.5 * (right + left)
        h = 0.5 * (right - left)
        t = c + h * nodes[None, :]
        vals = h * weights[None, :] * np.abs(s - t) / (t ** n + eps)
        # accumulate in the same panel-major order as the compiled loop
        for row in vals:
            for v in row:
                total += v
        out[i] = total
    return out


def entropy_quadrature(s, n, eps, use_numba=None):
    """G_eps at each entry of ``s`` by graded composite Gauss-Legendre.

    Requires ``eps > 0`` or all ``s > 0`` (otherwise the integral diverges or
    the integrand is unbounded; callers route those cases to closed forms).
    """
    s_arr = np.ascontiguousarray(s, dtype=float).ravel()
    if use_numba is None:
        use_numba = HAS_NUMBA
    if use_numba:
        return _entropy_numba(s_arr, float(n), float(eps), GL_NODES, GL_WEIGHTS)
    return _entropy_numpy(s_arr, float(n), float(eps), GL_NODES, GL_WEIGHTS)


# ---------------------------------------------------------------------------
# Largest increment at each lag (Hölder fits)
# ---------------------------------------------------------------------------

@njit(cache=True)
def _max_lag_numba(values, max_lag):
    m = values.shape[0]
    ncol = values.shape[1]
    out = np.zeros((max_lag, ncol))
    for lag in range(1, max_lag + 1):
        for col in range(ncol):
            best = 0.0
            for j in range(m - lag):
                d = abs(values[j + lag, col] - values[j, col])
                if d > best:
                    best = d
            out[lag - 1, col] = best
    return out


def _max_lag_numpy(values, max_lag):
    out = np.zeros((max_lag, values.shape[1]))
    for lag in range(1, max_lag + 1):
        out[lag - 1] = np.abs(values[lag:] - values[:-lag]).max(axis=0)
    return out


def max_lag_increments(values, max_lag, use_numba=None):
    """For lag = 1..max_lag, the largest |v[j+lag] - v[j]| along axis 0.

    ``values`` is 1-D or 2-D; the result has shape (max_lag, n_columns).
    """
    v = np.asarray(values, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    v = np.ascontiguousarray(v)
    max_lag = int(max_lag)
    if max_lag < 1 or max_lag >= v.shape[0]:
        raise ValueError(f"max_lag must lie in [1, {v.shape[0] - 1}], got {max_lag}")
    if use_numba is None:
        use_numba = HAS_NUMBA
    if use_numba:
        return _max_lag_numba(v, max_lag)
    return _max_lag_numpy(v, max_lag)
