"""Compiled recursions for path simulation.

Perturbation functions are identified by integer codes so the loop stays
in nopython mode; ``dgp.PERTURBATIONS`` holds the matching numpy versions.
"""
import math

from numba import njit

ZERO, RATIONAL, GAUSS, TANH, ONE = 0, 1, 2, 3, 4

# scale modes: multiplier applied to the innovation
SCALE_NONE, SCALE_SQRT, SCALE_LINEAR = 0, 1, 2


@njit(cache=True)
def perturb(code, x):
    if code == ZERO:
        return 0.0
    if code == RATIONAL:
        return 1.0 / (1.0 + x * x)
    if code == GAUSS:
        return math.exp(-0.5 * x * x)
    if code == TANH:
        return math.tanh(x)
    return 1.0


@njit(cache=True)
def recurse(theta, eps, alpha, g_code, g_scale, beta, s_code, s_scale, scale_mode, out):
    """Fill ``out`` with the perturbed AR(m) recursion driven by ``eps``.

    The first ``m`` entries are initialized with the first ``m`` draws.
    Returns the index where the conditional scale became non-positive,
    or -1 when the whole path is valid.
    """
    m = theta.shape[0]
    T = eps.shape[0]
    for t in range(m):
        out[t] = eps[t]
    for t in range(m, T):
        acc = 0.0
        for j in range(m):
            acc += theta[j] * out[t - 1 - j]
        prev = out[t - 1]
        acc += alpha * (g_scale * perturb(g_code, prev))
        if scale_mode == SCALE_NONE:
            acc += eps[t]
        else:
            h = s_scale * perturb(s_code, prev)
            if scale_mode == SCALE_SQRT:
                arg = 1.0 + beta * h
                if arg <= 0.0:
                    return t
                acc += math.sqrt(arg) * eps[t]
            else:
                sc = 1.0 + beta * h
                if sc <= 0.0:
                    return t
                acc += sc * eps[t]
        out[t] = acc
    return -1
