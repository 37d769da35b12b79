"""Small numerical kernels shared by the field, observer and derivative code."""
from __future__ import annotations

import numpy as np

from .spacetime import EvaluationDomainError

DEFAULT_FD_H = 1e-5
DEFAULT_STEP = 1e-3


def fd_steps(y, h=DEFAULT_FD_H):
    # h scales with the coordinate magnitude, never below the absolute h
    return h * np.maximum(1.0, np.abs(y))


def central_jacobian(fn, y, h=DEFAULT_FD_H):
    """Central-difference derivative of ``fn`` at ``y``.

    Returns an array of shape ``fn(y).shape + y.shape`` whose last axis holds
    the partial derivatives.
    """
    y = np.asarray(y, dtype=float)
    steps = fd_steps(y, h)
    cols = []
    for i, hi in enumerate(steps):
        yp = y.copy()
        ym = y.copy()
        yp[i] += hi
        ym[i] -= hi
        # use the exact distance between the perturbed abscissae
        with np.errstate(invalid="ignore", over="ignore"):
            cols.append((np.asarray(fn(yp)) - np.asarray(fn(ym))) / (yp[i] - ym[i]))
    out = np.stack(cols, axis=-1)
    if not np.all(np.isfinite(out)):
        raise EvaluationDomainError("non-finite finite-difference derivative")
    return out


def central_time_derivative(fn, t, h=DEFAULT_FD_H):
    ht = h * max(1.0, abs(t))
    tp, tm = t + ht, t - ht
    return (np.asarray(fn(tp)) - np.asarray(fn(tm))) / (tp - tm)


def n_steps(span, step):
    if step <= 0:
        raise ValueError("integration step must be positive")
    n = int(np.ceil(abs(span) / step - 1e-9))
    return max(n, 1)


def nearest_orthogonal(m):
    """Polar projection onto the orthogonal group."""
    u, _, vt = np.linalg.svd(m)
    return u @ vt


def loglog_slope(hs, errors):
    """Least-squares slope of ``log(errors)`` against ``log(hs)``."""
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if np.any(errors <= 0):
        return float("nan")
    return float(np.polyfit(np.log(hs), np.log(errors), 1)[0])
