"""Material and Lie derivatives along a continuum, in absolute and relative form.

Closed forms are evaluated in the inertial chart, where chart partials are
the correct absolute components (no connection terms).  Spacelike inputs are
embedded with zero time components; their Lie derivatives are returned as
full four-dimensional objects because they need not stay spacelike.

The relative formulas (``*_rel``) take observer-relative fields as callables
``(t, q) -> components`` and differentiate them by central differences in
observer coordinates.  They share nothing with the absolute path beyond the
field values, so agreement between the two is a real test.

The oracle (:func:`lie_oracle`) is the definitional limit: a central
difference of the kind-correct flow pullback.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._numerics import (DEFAULT_FD_H, DEFAULT_STEP, central_jacobian,
                        central_time_derivative, loglog_slope)
from .fields import (Field, FieldKind, deformation_gradient, derivative, flow,
                     wedge_derivative)
from .observers import corotating_observer
from .spacetime import Variance, as_point

_FOUR_KIND = {
    FieldKind.SCALAR: FieldKind.SCALAR,
    FieldKind.FOUR_VECTOR: FieldKind.FOUR_VECTOR,
    FieldKind.SPACE_VECTOR: FieldKind.FOUR_VECTOR,
    FieldKind.FOUR_COVECTOR: FieldKind.FOUR_COVECTOR,
    FieldKind.SPACE_COVECTOR: FieldKind.FOUR_COVECTOR,
    FieldKind.TENSOR2_CON: FieldKind.TENSOR2_CON,
    FieldKind.TENSOR2_COV: FieldKind.TENSOR2_COV,
    FieldKind.TENSOR2_MIX: FieldKind.TENSOR2_MIX,
}

_TENSOR_BY_VARIANCE = {
    Variance.CONTRAVARIANT: FieldKind.TENSOR2_CON,
    Variance.COVARIANT: FieldKind.TENSOR2_COV,
    Variance.MIXED: FieldKind.TENSOR2_MIX,
}


@dataclass(frozen=True)
class OracleConfig:
    s_step: float = 1e-4
    flow_step: float = 1e-5
    fd_h: float = DEFAULT_FD_H

    def __post_init__(self):
        for name in ("s_step", "flow_step", "fd_h"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.s_step < 10 * self.flow_step * (1 - 1e-12):
            raise ValueError("s_step must be at least 10 flow steps")

    @classmethod
    def for_step(cls, s, fd_h=DEFAULT_FD_H):
        return cls(s_step=s, flow_step=s / 10, fd_h=fd_h)


# --------------------------------------------------------------------------
# embedding of spacelike kinds


def four_kind(f):
    """The four-dimensional kind a field embeds into."""
    if f.kind is FieldKind.SPACE_TENSOR2:
        return _TENSOR_BY_VARIANCE[f.variance]
    return _FOUR_KIND[f.kind]


def embed_value(kind, value):
    kind = FieldKind(kind)
    if kind in (FieldKind.SPACE_VECTOR, FieldKind.SPACE_COVECTOR):
        out = np.zeros(4)
        out[1:] = value
        return out
    if kind is FieldKind.SPACE_TENSOR2:
        out = np.zeros((4, 4))
        out[1:, 1:] = value
        return out
    return np.asarray(value, dtype=float)


def embed_derivative(kind, dvalue):
    kind = FieldKind(kind)
    if kind in (FieldKind.SPACE_VECTOR, FieldKind.SPACE_COVECTOR):
        out = np.zeros((4, 4))
        out[1:] = dvalue
        return out
    if kind is FieldKind.SPACE_TENSOR2:
        out = np.zeros((4, 4, 4))
        out[1:, 1:] = dvalue
        return out
    return np.asarray(dvalue, dtype=float)


def as_four_field(f):
    """Spacelike field re-expressed as a four-dimensional field (zero time slots)."""
    if _FOUR_KIND.get(f.kind) is f.kind:
        return f
    jac = None
    if f.jacobian is not None:
        jac = lambda x: embed_derivative(f.kind, f.jacobian(x))  # noqa: E731
    four = Field(four_kind(f), lambda x: embed_value(f.kind, f.evaluate(x)), jac,
                 name=f"embed[{f.name}]")
    if jac is None:
        four.jacobian = lambda x: embed_derivative(f.kind, derivative(f, x))
    return four


# --------------------------------------------------------------------------
# closed forms


def lie_formula(kind, value, dvalue, u, du):
    """Chart Lie derivative from a value, its derivative, ``u`` and ``Du``.

    ``kind`` is one of the four-dimensional kinds; all arrays are in the
    inertial chart (or any rigid observer's relative coordinates).
    """
    kind = FieldKind(kind)
    md = dvalue @ u
    if kind is FieldKind.SCALAR:
        return md
    if kind is FieldKind.FOUR_VECTOR:
        return md - du @ value
    if kind is FieldKind.FOUR_COVECTOR:
        return md + du.T @ value
    if kind is FieldKind.TENSOR2_CON:
        return md - du @ value - value @ du.T
    if kind is FieldKind.TENSOR2_COV:
        return md + du.T @ value + value @ du
    if kind is FieldKind.TENSOR2_MIX:
        return md - du @ value + value @ du
    raise ValueError(f"no Lie formula for kind {kind.value!r}")


def material_derivative(f, u, x, fd_h=DEFAULT_FD_H):
    """``(DA)(x) . u(x)``; same shape as the field value."""
    x = as_point(x)
    out = derivative(f, x, fd_h) @ u(x)
    return float(out) if np.ndim(out) == 0 else out


def lie_derivative(f, u, x, fd_h=DEFAULT_FD_H):
    """Closed-form Lie derivative ``L_u f`` at ``x``.

    Returns a float for scalars, a 4-array for (spacelike) vectors and
    covectors and a 4x4 array for (spacelike) second-order tensors.
    """
    x = as_point(x)
    if f.kind is FieldKind.SCALAR:
        return material_derivative(f, u, x, fd_h)
    value = embed_value(f.kind, f(x))
    dvalue = embed_derivative(f.kind, derivative(f, x, fd_h))
    return lie_formula(four_kind(f), value, dvalue, u(x), derivative(u, x, fd_h))


def jaumann_derivative(c, u, x, fd_h=DEFAULT_FD_H):
    """``D_u c + 1/2 (grad ^ u) c`` for a spacelike vector field."""
    if c.kind is not FieldKind.SPACE_VECTOR:
        raise TypeError("the Jaumann derivative is defined for spacelike vector fields")
    x = as_point(x)
    return material_derivative(c, u, x, fd_h) + 0.5 * wedge_derivative(u, x, fd_h) @ c(x)


# --------------------------------------------------------------------------
# flow-pullback oracle


def pullback(f, res):
    """Kind-correct pullback of ``f(Y_s(x))`` to ``x`` for a flow result."""
    kind = four_kind(f)
    val = embed_value(f.kind, f(res.point))
    j = res.jacobian
    if kind is FieldKind.SCALAR:
        return val
    if kind is FieldKind.FOUR_VECTOR:
        return np.linalg.solve(j, val)
    if kind is FieldKind.FOUR_COVECTOR:
        return j.T @ val
    jinv = np.linalg.inv(j)
    if kind is FieldKind.TENSOR2_CON:
        return jinv @ val @ jinv.T
    if kind is FieldKind.TENSOR2_COV:
        return j.T @ val @ j
    return jinv @ val @ j


def probe_flows(u, x, cfg):
    return (flow(u, x, cfg.s_step, cfg.flow_step),
            flow(u, x, -cfg.s_step, cfg.flow_step))


def lie_oracle(f, u, x, cfg=OracleConfig(), flows=None):
    """Central difference of the pullback over ``+-cfg.s_step``.

    ``flows`` may pass precomputed ``(forward, backward)`` flow results so
    several fields can share one pair of integrations.
    """
    plus, minus = flows if flows is not None else probe_flows(u, x, cfg)
    s = plus.s
    return (pullback(f, plus) - pullback(f, minus)) / (2.0 * s)


def material_oracle(f, u, x, cfg=OracleConfig(), flows=None):
    """Central difference of ``f`` along the particle line (no pullback)."""
    plus, minus = flows if flows is not None else probe_flows(u, x, cfg)
    return (f(plus.point) - f(minus.point)) / (2.0 * plus.s)


def oracle_convergence(f, u, x, s_values=(1e-2, 1e-3, 1e-4), fd_h=DEFAULT_FD_H):
    """Oracle errors against the closed form and their log-log slope."""
    exact = lie_derivative(f, u, x, fd_h)
    errors = []
    for s in s_values:
        approx = lie_oracle(f, u, x, OracleConfig.for_step(s, fd_h))
        errors.append(float(np.max(np.abs(approx - exact))))
    return np.array(errors), loglog_slope(s_values, errors)


# --------------------------------------------------------------------------
# relative forms


def rel_partials(fn, t, q, fd_h=DEFAULT_FD_H):
    """Central-difference partials of a relative field; last axis = (t, q)."""
    y = np.concatenate(([float(t)], np.asarray(q, dtype=float)))
    return central_jacobian(lambda z: fn(z[0], z[1:]), y, fd_h)


def _velocity_parts(v_U, t, q, fd_h):
    v = np.asarray(v_U(t, q), dtype=float)
    dv = rel_partials(v_U, t, q, fd_h)
    return v, dv[:, 0], dv[:, 1:]


def _substantial(fn, v, t, q, fd_h):
    d = rel_partials(fn, t, q, fd_h)
    return np.asarray(fn(t, q), dtype=float), d[..., 0] + d[..., 1:] @ v


def material_rel(obs, c_U, v_U, t, q, fd_h=DEFAULT_FD_H):
    """``(d0 + omega + v_U . grad) c_U`` in the observer's coordinates."""
    v = np.asarray(v_U(t, q), dtype=float)
    c, dot = _substantial(c_U, v, t, q, fd_h)
    return dot + obs.omega_rel(t) @ c


def upper_convected_rel(v_U, c_U, t, q, fd_h=DEFAULT_FD_H):
    """``(d0 + v.grad) c - c.(grad v)^T``, i.e. ``... - (grad v) c``."""
    v, _, g = _velocity_parts(v_U, t, q, fd_h)
    c, dot = _substantial(c_U, v, t, q, fd_h)
    return dot - g @ c


def lower_convected_rel(v_U, k_U, t, q, fd_h=DEFAULT_FD_H):
    """``(d0 + v.grad) k + (grad v)^T k``."""
    v, _, g = _velocity_parts(v_U, t, q, fd_h)
    k, dot = _substantial(k_U, v, t, q, fd_h)
    return dot + g.T @ k


def jaumann_rel(v_U, c_U, t, q, fd_h=DEFAULT_FD_H):
    """``(d0 + v.grad) c + 1/2 (grad ^ v) c``."""
    v, _, g = _velocity_parts(v_U, t, q, fd_h)
    c, dot = _substantial(c_U, v, t, q, fd_h)
    return dot + 0.5 * (g.T - g) @ c


def upper_convected_tensor_rel(v_U, t_U, t, q, fd_h=DEFAULT_FD_H):
    """Space-space contravariant tensor: ``dot t - t (grad v)^T - (grad v) t``."""
    v, _, g = _velocity_parts(v_U, t, q, fd_h)
    tt, dot = _substantial(t_U, v, t, q, fd_h)
    return dot - tt @ g.T - g @ tt


def lower_convected_tensor_rel(v_U, w_U, t, q, fd_h=DEFAULT_FD_H):
    """Space-space block of a cotensor's Lie derivative: ``dot w + (grad v)^T w + w grad v``."""
    v, _, g = _velocity_parts(v_U, t, q, fd_h)
    w, dot = _substantial(w_U, v, t, q, fd_h)
    return dot + g.T @ w + w @ g


def mixed_convected_tensor_rel(v_U, a_U, t, q, fd_h=DEFAULT_FD_H):
    """Space-space block for a mixed tensor: ``dot a - (grad v) a + a grad v``."""
    v, _, g = _velocity_parts(v_U, t, q, fd_h)
    a, dot = _substantial(a_U, v, t, q, fd_h)
    return dot - g @ a + a @ g


def lie_derivative_rel(kind, f_U, v_U, t, q, fd_h=DEFAULT_FD_H):
    """Relative Lie derivative from relative fields, by the chart formulas.

    ``f_U`` returns four-dimensional relative components (time slot first);
    for spacelike fields pass the relative form of :func:`as_four_field`.
    """
    kind = FieldKind(kind)
    v, d0v, g = _velocity_parts(v_U, t, q, fd_h)
    u = np.concatenate(([1.0], v))
    du = np.zeros((4, 4))
    du[1:, 0] = d0v
    du[1:, 1:] = g
    value = np.asarray(f_U(t, q), dtype=float)
    return lie_formula(kind, value, rel_partials(f_U, t, q, fd_h), u, du)


# --------------------------------------------------------------------------
# identities as residual checks


def jaumann_corotating_check(u, o, c, times=None, fd_h=DEFAULT_FD_H, step=DEFAULT_STEP):
    """Residuals of ``d0 c_Uo(t, 0) = (J_u c)_Uo(t, 0)`` for the corotating observer.

    ``times`` are absolute instants (default: ``tau(o) + {0, 0.5, 1}``).
    Returns one max-norm residual per instant.
    """
    o = as_point(o)
    obs = corotating_observer(u, o, step=step)
    if times is None:
        times = o[0] + np.array([0.0, 0.5, 1.0])
    c_rel = obs.relative(c)
    zero = np.zeros(3)
    out = []
    for t in np.atleast_1d(times):
        lhs = central_time_derivative(lambda s: c_rel(s, zero), float(t), fd_h)
        x = obs.unsplit(t, zero)
        rhs = obs.rel_space_vector(jaumann_derivative(c, u, x, fd_h), x).components
        out.append(float(np.max(np.abs(lhs - rhs))))
    return np.array(out)


def deformation_lie_check(u, obs, t0, X, s, ds=1e-4, step=DEFAULT_STEP, fd_h=DEFAULT_FD_H):
    """Residual of ``dF/ds = (grad v_U) F`` at duration ``s``.

    ``dF/ds`` is a central difference in ``s``; ``grad v_U`` is a
    finite-difference derivative of the relative velocity at the image point.
    """
    f_plus = deformation_gradient(u, obs, t0, X, s + ds, step)
    f_minus = deformation_gradient(u, obs, t0, X, s - ds, step)
    f_now = deformation_gradient(u, obs, t0, X, s, step)
    fdot = (f_plus - f_minus) / (2.0 * ds)
    image = flow(u, obs.unsplit(t0, X), s, step).point
    t1, Q = obs.split(image)
    grad_v = rel_partials(obs.relative_velocity(u), t1, Q, fd_h)[:, 1:]
    return float(np.max(np.abs(fdot - grad_v @ f_now)))


__all__ = [
    "OracleConfig", "four_kind", "embed_value", "embed_derivative", "as_four_field",
    "lie_formula", "material_derivative", "lie_derivative", "jaumann_derivative",
    "pullback", "probe_flows", "lie_oracle", "material_oracle", "oracle_convergence",
    "rel_partials", "material_rel", "upper_convected_rel", "lower_convected_rel",
    "jaumann_rel", "upper_convected_tensor_rel", "lower_convected_tensor_rel",
    "mixed_convected_tensor_rel", "lie_derivative_rel", "jaumann_corotating_check",
    "deformation_lie_check",
]
