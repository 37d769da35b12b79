"""Smooth fields on space-time, their derivatives, and continuum flows.

A field is a callable on chart points ``x = [t, q1, q2, q3]``.  Derivatives
are returned as arrays whose trailing axis runs over the four chart
directions ``(t, q1, q2, q3)``; a scalar field's derivative is therefore a
four-covector ``(k0, k)`` and a vector field's derivative a 4x4 mixed tensor.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._numerics import DEFAULT_FD_H, DEFAULT_STEP, central_jacobian, n_steps
from .spacetime import (EvaluationDomainError, Variance, as_point, as_space,
                        check_finite)


class FieldKind(str, Enum):
    SCALAR = "scalar"
    FOUR_VECTOR = "four_vector"
    SPACE_VECTOR = "space_vector"
    FOUR_COVECTOR = "four_covector"
    SPACE_COVECTOR = "space_covector"
    TENSOR2_CON = "tensor2_con"
    TENSOR2_COV = "tensor2_cov"
    TENSOR2_MIX = "tensor2_mix"
    SPACE_TENSOR2 = "space_tensor2"


VALUE_SHAPE = {
    FieldKind.SCALAR: (),
    FieldKind.FOUR_VECTOR: (4,),
    FieldKind.SPACE_VECTOR: (3,),
    FieldKind.FOUR_COVECTOR: (4,),
    FieldKind.SPACE_COVECTOR: (3,),
    FieldKind.TENSOR2_CON: (4, 4),
    FieldKind.TENSOR2_COV: (4, 4),
    FieldKind.TENSOR2_MIX: (4, 4),
    FieldKind.SPACE_TENSOR2: (3, 3),
}

_TENSOR_VARIANCE = {
    FieldKind.TENSOR2_CON: Variance.CONTRAVARIANT,
    FieldKind.TENSOR2_COV: Variance.COVARIANT,
    FieldKind.TENSOR2_MIX: Variance.MIXED,
}


class CatalogError(ValueError):
    """Unknown catalog entry or invalid parameters."""


class IntegrationError(EvaluationDomainError):
    """The flow left the evaluation domain."""


class Field:
    """A smooth field ``M -> V`` of a fixed kind.

    Parameters
    ----------
    kind : FieldKind or str
    evaluate : callable
        Maps a chart point (array of 4) to the field value.
    jacobian : callable, optional
        Analytic derivative; same layout as :func:`derivative`.  Without it
        derivatives fall back to central differences.
    variance : Variance, optional
        Only for ``space_tensor2`` fields (defaults to mixed).  Four-tensor
        kinds carry their variance in the kind itself.
    """

    def __init__(self, kind, evaluate, jacobian=None, *, variance=None, name=None):
        self.kind = FieldKind(kind)
        self.evaluate = evaluate
        self.jacobian = jacobian
        if self.kind in _TENSOR_VARIANCE:
            implied = _TENSOR_VARIANCE[self.kind]
            if variance is not None and Variance(variance) is not implied:
                raise ValueError(f"{self.kind.value} fields are {implied.value}")
            variance = implied
        elif self.kind is FieldKind.SPACE_TENSOR2:
            variance = Variance(variance or Variance.MIXED)
        elif variance is not None:
            raise ValueError(f"{self.kind.value} fields carry no variance")
        self.variance = variance
        self.name = name or self.kind.value

    @property
    def value_shape(self):
        return VALUE_SHAPE[self.kind]

    def __call__(self, x):
        return check_finite(self.evaluate(as_point(x)), f"value of field {self.name!r}")

    def __repr__(self):
        return f"{type(self).__name__}({self.kind.value!r}, name={self.name!r})"


class VelocityField(Field):
    """Continuum velocity ``u = (1, v(t, q))``.

    ``spatial(t, q)`` returns the 3 velocity components in m/s and
    ``spatial_jacobian(t, q)``, when given, the 3x4 array
    ``[dv/dt | dv/dq]``.
    """

    def __init__(self, spatial, spatial_jacobian=None, *, name="velocity", params=None):
        self.spatial = spatial
        self.spatial_jacobian = spatial_jacobian
        self.params = dict(params or {})
        super().__init__(FieldKind.FOUR_VECTOR, self._evaluate,
                         self._jacobian if spatial_jacobian is not None else None,
                         name=name)

    def _evaluate(self, x):
        out = np.empty(4)
        out[0] = 1.0
        out[1:] = self.spatial(x[0], x[1:])
        return out

    def _jacobian(self, x):
        out = np.zeros((4, 4))
        out[1:] = self.spatial_jacobian(x[0], x[1:])
        return out

    def velocity(self, t, q):
        return np.asarray(self.spatial(float(t), as_space(q)), dtype=float)

    def velocity_jacobian(self, t, q):
        """3x4 array ``[dv/dt | grad v]`` at ``(t, q)``."""
        q = as_space(q)
        if self.spatial_jacobian is not None:
            return np.asarray(self.spatial_jacobian(float(t), q), dtype=float)
        return central_jacobian(lambda y: self.spatial(y[0], y[1:]),
                                np.concatenate(([t], q)))

    def grad(self, t, q):
        return self.velocity_jacobian(t, q)[:, 1:]


# --------------------------------------------------------------------------
# differentiation


def derivative(f, x, fd_h=DEFAULT_FD_H):
    """Absolute derivative ``DA(x)``; trailing axis = (t, q1, q2, q3)."""
    x = as_point(x)
    if f.jacobian is not None:
        return check_finite(f.jacobian(x), f"derivative of {f.name!r}")
    try:
        return central_jacobian(f.evaluate, x, fd_h)
    except EvaluationDomainError as exc:
        raise EvaluationDomainError(f"field {f.name!r} is not finite near {x}") from exc


def spacelike_derivative(f, x, fd_h=DEFAULT_FD_H):
    """Restriction of the derivative to spacelike directions.

    For a velocity field only the spatial rows are returned (the time
    component of ``u`` is pinned to 1), giving the 3x3 ``grad u``.
    """
    d = derivative(f, x, fd_h)[..., 1:]
    if isinstance(f, VelocityField):
        return d[1:]
    return d


def wedge_derivative(c, x, fd_h=DEFAULT_FD_H):
    """Antisymmetric spacelike derivative ``(grad c)^T - grad c``."""
    if not (isinstance(c, VelocityField) or c.kind is FieldKind.SPACE_VECTOR):
        raise TypeError("the antisymmetric derivative needs a spacelike vector "
                        "or velocity field")
    g = spacelike_derivative(c, x, fd_h)
    return g.T - g


def vorticity(u, x, fd_h=DEFAULT_FD_H):
    """Angular velocity of the continuum, ``-1/2 (grad ^ u)``."""
    return -0.5 * wedge_derivative(u, x, fd_h)


# --------------------------------------------------------------------------
# flow


@dataclass(frozen=True)
class FlowResult:
    point: np.ndarray
    jacobian: np.ndarray
    s: float


def flow(u, x, s, step=DEFAULT_STEP):
    """Integrate the particle through ``x`` for a duration ``s``.

    Classical RK4 on the joint state (position, flow derivative); the
    derivative obeys ``d(DY)/ds = Du(Y) DY`` with ``DY_0 = 1``.  Time is
    advanced exactly, so the time row of the derivative stays ``(1,0,0,0)``.
    """
    x = as_point(x)
    s = float(s)
    if step <= 0:
        raise ValueError("step must be positive")
    if s == 0.0:
        return FlowResult(x.copy(), np.eye(4), 0.0)
    n = n_steps(s, step)
    h = s / n
    t0 = x[0]
    q = x[1:].copy()
    jsp = np.eye(4)[1:].copy()  # spatial rows of DY

    vel = u.spatial
    vjac = u.velocity_jacobian

    def rhs(t, q, jsp):
        a = vjac(t, q)
        dj = a[:, 1:] @ jsp
        dj[:, 0] += a[:, 0]
        return vel(t, q), dj

    # overflow is detected below and reported as an IntegrationError
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(n):
            t = t0 + i * h
            k1q, k1j = rhs(t, q, jsp)
            k2q, k2j = rhs(t + 0.5 * h, q + 0.5 * h * k1q, jsp + 0.5 * h * k1j)
            k3q, k3j = rhs(t + 0.5 * h, q + 0.5 * h * k2q, jsp + 0.5 * h * k2j)
            k4q, k4j = rhs(t + h, q + h * k3q, jsp + h * k3j)
            q = q + (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
            jsp = jsp + (h / 6.0) * (k1j + 2.0 * k2j + 2.0 * k3j + k4j)
            if i % 64 == 63 and not np.all(np.isfinite(q)):
                break
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(jsp))):
        raise IntegrationError(f"flow from {x} over s={s} left the evaluation domain")
    point = np.empty(4)
    point[0] = t0 + s
    point[1:] = q
    jac = np.zeros((4, 4))
    jac[0, 0] = 1.0
    jac[1:] = jsp
    return FlowResult(point, jac, s)


def deformation_gradient(u, obs, t0, X, s, step=DEFAULT_STEP):
    """Observer-relative deformation gradient ``F_s = grad chi_s(X)``.

    Space block of ``DH(Y_s(x)) DY_s(x) DP(t0, X)`` with ``x = P(t0, X)``.
    """
    x = obs.unsplit(t0, X)
    res = flow(u, x, s, step)
    m = obs.split_jacobian(res.point) @ res.jacobian @ obs.unsplit_jacobian(t0, X)
    return m[1:, 1:]


# --------------------------------------------------------------------------
# catalog


def hat(a):
    """Antisymmetric matrix of the cross product with ``a``."""
    a1, a2, a3 = a
    return np.array([[0.0, -a3, a2], [a3, 0.0, -a1], [-a2, a1, 0.0]])


def _number(params, key, default=None):
    val = params.get(key, default)
    if val is None:
        raise CatalogError(f"missing parameter {key!r}")
    try:
        val = float(val)
    except (TypeError, ValueError):
        raise CatalogError(f"parameter {key!r} must be a number") from None
    if not np.isfinite(val):
        raise CatalogError(f"parameter {key!r} must be finite")
    return val


def _vector(params, key, default):
    val = params.get(key, default)
    try:
        arr = np.array(val, dtype=float)
    except (TypeError, ValueError):
        raise CatalogError(f"parameter {key!r} must be a 3-vector") from None
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise CatalogError(f"parameter {key!r} must be a finite 3-vector")
    return arr


def _constant(p):
    w0 = _vector(p, "w0", (0.0, 0.0, 0.0))
    jac = np.zeros((3, 4))
    return VelocityField(lambda t, q: w0.copy(), lambda t, q: jac.copy(),
                         name="constant", params={"w0": w0.tolist()})


def _rigid_rotation(p):
    omega0 = _number(p, "omega0", 1.0)
    axis = _vector(p, "axis", (0.0, 0.0, 1.0))
    norm = np.linalg.norm(axis)
    if norm == 0.0:
        raise CatalogError("rotation axis must be nonzero")
    om = omega0 * hat(axis / norm)
    jac = np.zeros((3, 4))
    jac[:, 1:] = om
    return VelocityField(lambda t, q: om @ q, lambda t, q: jac.copy(),
                         name="rigid_rotation",
                         params={"omega0": omega0, "axis": axis.tolist()})


def _simple_shear(p):
    kappa = _number(p, "kappa", 1.0)

    def v(t, q):
        return np.array([kappa * q[1], 0.0, 0.0])

    jac = np.zeros((3, 4))
    jac[0, 2] = kappa
    return VelocityField(v, lambda t, q: jac.copy(), name="simple_shear",
                         params={"kappa": kappa})


def _time_ramped_shear(p):
    a = _number(p, "a", 1.0)

    def v(t, q):
        return np.array([a * t, 0.0, 0.0])

    jac = np.zeros((3, 4))
    jac[0, 0] = a
    return VelocityField(v, lambda t, q: jac.copy(), name="time_ramped_shear",
                         params={"a": a})


def _planar_vortex(p):
    omega0 = _number(p, "omega0", 1.0)
    ell = _number(p, "ell", 1.0)
    if ell <= 0.0:
        raise CatalogError("vortex length scale ell must be positive")
    ez = hat((0.0, 0.0, 1.0))

    def v(t, q):
        return omega0 * np.exp(-(q @ q) / ell**2) * (ez @ q)

    def jac(t, q):
        g = np.exp(-(q @ q) / ell**2)
        out = np.zeros((3, 4))
        out[:, 1:] = omega0 * g * (ez - (2.0 / ell**2) * np.outer(ez @ q, q))
        return out

    return VelocityField(v, jac, name="planar_vortex",
                         params={"omega0": omega0, "ell": ell})


def _uniform_expansion(p):
    alpha = _number(p, "alpha", 1.0)
    jac = np.zeros((3, 4))
    jac[:, 1:] = alpha * np.eye(3)
    return VelocityField(lambda t, q: alpha * q, lambda t, q: jac.copy(),
                         name="uniform_expansion", params={"alpha": alpha})


CATALOG = {
    "constant": _constant,
    "rigid_rotation": _rigid_rotation,
    "simple_shear": _simple_shear,
    "time_ramped_shear": _time_ramped_shear,
    "planar_vortex": _planar_vortex,
    "uniform_expansion": _uniform_expansion,
}

INCOMPRESSIBLE = ("rigid_rotation", "simple_shear", "planar_vortex")


def catalog(name, params=None, **kwargs):
    """Analytic velocity field by name.

    ``constant(w0)``, ``rigid_rotation(omega0, axis)``, ``simple_shear(kappa)``,
    ``time_ramped_shear(a)``, ``planar_vortex(omega0, ell)`` and
    ``uniform_expansion(alpha)``.
    """
    try:
        build = CATALOG[name]
    except KeyError:
        raise CatalogError(f"unknown catalog field {name!r}; "
                           f"choose from {sorted(CATALOG)}") from None
    p = dict(params or {})
    p.update(kwargs)
    return build(p)


# --------------------------------------------------------------------------
# test fields


def _exponents(degree, nvars=4):
    exps = [e for d in range(degree + 1)
            for e in itertools.combinations_with_replacement(range(nvars), d)]
    out = np.zeros((len(exps), nvars), dtype=int)
    for row, combo in enumerate(exps):
        for var in combo:
            out[row, var] += 1
    return out


class _Polynomial:
    def __init__(self, coeffs, degree, shape):
        self.exps = _exponents(degree)
        self.coeffs = coeffs  # (ncomp, nmonomials)
        self.degree = degree
        self.shape = shape

    def _powers(self, x):
        p = np.ones((4, self.degree + 1))
        for d in range(1, self.degree + 1):
            p[:, d] = p[:, d - 1] * x
        return p

    def __call__(self, x):
        p = self._powers(x)
        mono = np.prod(p[np.arange(4), self.exps], axis=1)
        return (self.coeffs @ mono).reshape(self.shape)

    def jacobian(self, x):
        p = self._powers(x)
        terms = p[np.arange(4), self.exps]  # (M, 4)
        grads = np.empty((len(self.exps), 4))
        for j in range(4):
            e = self.exps[:, j]
            others = np.prod(np.delete(terms, j, axis=1), axis=1)
            grads[:, j] = e * p[j, np.maximum(e - 1, 0)] * others
        return (self.coeffs @ grads).reshape(self.shape + (4,))


def polynomial_field(kind, seed=0, degree=3, scale=1.0, variance=None, rng=None,
                     length=1.0):
    """Seeded random polynomial field of total degree <= ``degree`` in (t, q).

    Coefficients are uniform in ``[-scale, scale]`` for monomials in the
    variables ``(t, q) / length``, so with ``length`` set to the half-width
    of an evaluation box every monomial stays within ``[-1, 1]`` there.
    The derivative is exact.
    """
    kind = FieldKind(kind)
    shape = VALUE_SHAPE[kind]
    if not length > 0:
        raise ValueError("length must be positive")
    rng = np.random.default_rng(seed) if rng is None else rng
    ncomp = int(np.prod(shape)) if shape else 1
    exps = _exponents(degree)
    coeffs = scale * rng.uniform(-1.0, 1.0, size=(ncomp, len(exps)))
    coeffs = coeffs * float(length) ** -exps.sum(axis=1)
    poly = _Polynomial(coeffs, degree, shape)
    return Field(kind, poly, poly.jacobian, variance=variance,
                 name=f"poly{degree}[{kind.value}]")


def constant_field(kind, value, variance=None):
    kind = FieldKind(kind)
    val = np.array(value, dtype=float)
    if val.shape != VALUE_SHAPE[kind]:
        raise ValueError(f"{kind.value} value must have shape {VALUE_SHAPE[kind]}")
    zero = np.zeros(val.shape + (4,))
    return Field(kind, lambda x: val.copy(), lambda x: zero.copy(),
                 variance=variance, name=f"const[{kind.value}]")
