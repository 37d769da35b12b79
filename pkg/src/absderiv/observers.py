"""Rigid observers and the space-time splittings they induce.

A rigid observer is fixed by an origin world line ``q_o(t)``, its angular
velocity ``Omega(t)`` and the rotation ``R(t)`` solving ``dR/dt = Omega R``
with ``R(t_o) = 1``.  Its vectorized splitting is

    H(x) = (t, R(t)^T (x - q_o(t))),   P(t, q) = q_o(t) + R(t) q.

Relative forms follow from ``DH`` on vector slots and ``DP`` on covector
slots.  Everything is computed from the observer's rotation and origin; no
chart changes are applied to stored data.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from ._numerics import DEFAULT_STEP, nearest_orthogonal
from .fields import FieldKind, VelocityField, hat
from .spacetime import as_point, as_space, check_finite

ANTISYMMETRY_TOL = 1e-12


# --------------------------------------------------------------------------
# motion providers


class _InertialMotion:
    def __init__(self, o, w0):
        self.t_o = o[0]
        self.q_o = o[1:].copy()
        self.w0 = w0
        self._zero = np.zeros((3, 3))
        self._eye = np.eye(3)

    def state(self, t):
        return self.q_o + (t - self.t_o) * self.w0, self.w0, self._zero, self._eye


class _IntegratedMotion:
    """RK4 integration of the origin and of ``dR/dt = Omega R``.

    Nodes sit on the grid ``t_o + n*step`` (both directions) and are added on
    demand; a query between nodes takes one RK4 step from the node below.
    Every ``reorth_every`` nodes ``R`` is projected back onto the rotations.
    """

    def __init__(self, t_o, q_o, origin_velocity, omega, step, reorth_every):
        self.t_o = float(t_o)
        self.step = float(step)
        self.reorth_every = int(reorth_every)
        self.origin_velocity = origin_velocity
        self.omega = omega
        start = (np.array(q_o, dtype=float), np.eye(3))
        self._forward = [start]
        self._backward = [start]
        self._lock = threading.Lock()
        # finite differences hit the same instant many times in a row
        self._last = (None, None)

    def _rhs(self, t, q, r):
        return self.origin_velocity(t, q), self.omega(t, q) @ r

    def _rk4(self, t, q, r, h):
        k1q, k1r = self._rhs(t, q, r)
        k2q, k2r = self._rhs(t + 0.5 * h, q + 0.5 * h * k1q, r + 0.5 * h * k1r)
        k3q, k3r = self._rhs(t + 0.5 * h, q + 0.5 * h * k2q, r + 0.5 * h * k2r)
        k4q, k4r = self._rhs(t + h, q + h * k3q, r + h * k3r)
        return (q + (h / 6.0) * (k1q + 2 * k2q + 2 * k3q + k4q),
                r + (h / 6.0) * (k1r + 2 * k2r + 2 * k3r + k4r))

    def _node(self, n):
        nodes, sign = (self._forward, 1) if n >= 0 else (self._backward, -1)
        idx = abs(n)
        if idx >= len(nodes):
            with self._lock:
                while idx >= len(nodes):
                    k = len(nodes) - 1
                    q, r = nodes[k]
                    q, r = self._rk4(self.t_o + sign * k * self.step, q, r,
                                     sign * self.step)
                    if (k + 1) % self.reorth_every == 0:
                        r = nearest_orthogonal(r)
                    check_finite(q, "observer origin")
                    check_finite(r, "observer rotation")
                    nodes.append((q, r))
        return nodes[idx]

    def state(self, t):
        last_t, last = self._last
        if last_t == t:
            return last
        n = math.floor((t - self.t_o) / self.step)
        q, r = self._node(n)
        dt = t - (self.t_o + n * self.step)
        if dt != 0.0:
            q, r = self._rk4(self.t_o + n * self.step, q, r, dt)
        out = (q, self.origin_velocity(t, q), self.omega(t, q), r)
        self._last = (t, out)
        return out


# --------------------------------------------------------------------------
# relative forms


@dataclass(frozen=True)
class RelForm:
    """An observer-split quantity.

    ``components`` is in the split basis: index 0 is the time slot (when
    present), indices 1..3 the observer-space slots.
    """
    kind: str
    components: np.ndarray

    @property
    def time_part(self):
        c = self.components
        if self.kind in ("space_vector", "space_tensor", "scalar"):
            return None
        if self.kind == "mixed_EM":
            return c[:, 0]
        if c.ndim == 1:
            return float(c[0])
        return float(c[0, 0])

    @property
    def space_part(self):
        c = self.components
        if self.kind in ("space_vector", "space_tensor", "scalar"):
            return c
        if self.kind == "mixed_EM":
            return c[:, 1:]
        if c.ndim == 1:
            return c[1:]
        return c[1:, 1:]

    @property
    def blocks(self):
        """``(t00, t0s, ts0, tss)`` for second-order four-tensors."""
        c = self.components
        if c.shape != (4, 4):
            raise AttributeError("blocks exist only for second-order four-tensors")
        return float(c[0, 0]), c[0, 1:], c[1:, 0], c[1:, 1:]


class RigidObserver:
    """Rigid observer: origin world line, angular velocity and rotation.

    Build with :func:`make_inertial`, :func:`make_rotating` or
    :func:`corotating_observer`.  Queries are pure; the rotation cache is
    filled lazily under a lock.
    """

    def __init__(self, motion, anchor, name="observer"):
        self._motion = motion
        self.anchor = float(anchor)
        self.name = name

    def __repr__(self):
        return f"RigidObserver({self.name!r}, anchor={self.anchor!r})"

    # -- state ---------------------------------------------------------------

    def rotation(self, t):
        return self._motion.state(float(t))[3]

    def omega(self, t):
        return self._motion.state(float(t))[2]

    def omega_rel(self, t):
        """Relative angular velocity ``R^T Omega R``."""
        _, _, om, r = self._motion.state(float(t))
        return r.T @ om @ r

    def origin(self, t):
        """World point of the origin at instant ``t``."""
        q = self._motion.state(float(t))[0]
        return np.concatenate(([float(t)], q))

    def origin_velocity(self, t):
        return self._motion.state(float(t))[1]

    def velocity(self, x):
        """Four-velocity of the observer at ``x``: ``U(q_o) + Omega (x - q_o)``."""
        x = as_point(x)
        q_o, w, om, _ = self._motion.state(x[0])
        out = np.empty(4)
        out[0] = 1.0
        out[1:] = w + om @ (x[1:] - q_o)
        return out

    def velocity_field(self):
        """The observer as a velocity field (derivatives by finite differences)."""
        return VelocityField(lambda t, q: self.velocity(np.concatenate(([t], q)))[1:],
                             name=f"{self.name}.U")

    # -- splitting -----------------------------------------------------------

    def split(self, x):
        """``(t, R(t)^T (q - q_o(t)))``."""
        x = as_point(x)
        q_o, _, _, r = self._motion.state(x[0])
        return float(x[0]), r.T @ (x[1:] - q_o)

    def unsplit(self, t, q):
        """World point ``q_o(t) + R(t) q`` as a chart array."""
        q_o, _, _, r = self._motion.state(float(t))
        return np.concatenate(([float(t)], q_o + r @ as_space(q)))

    def split_jacobian(self, x):
        """``DH(x)``: rows ``(tau ; R^T (1 - U (x) tau))`` as a 4x4 array."""
        x = as_point(x)
        q_o, w, om, r = self._motion.state(x[0])
        u_sp = w + om @ (x[1:] - q_o)
        out = np.zeros((4, 4))
        out[0, 0] = 1.0
        out[1:, 0] = -r.T @ u_sp
        out[1:, 1:] = r.T
        return out

    def unsplit_partials(self, t, q):
        """``(d0 P, grad P) = (U(P(t, q)), R(t))``."""
        q = as_space(q)
        q_o, w, om, r = self._motion.state(float(t))
        rq = r @ q
        d0 = np.empty(4)
        d0[0] = 1.0
        d0[1:] = w + om @ rq
        return d0, r

    def unsplit_jacobian(self, t, q):
        """``DP(t, q)`` as a 4x4 array (columns: d/dt, d/dq)."""
        d0, r = self.unsplit_partials(t, q)
        out = np.zeros((4, 4))
        out[:, 0] = d0
        out[1:, 1:] = r
        return out

    # -- relative forms (values sitting at world point x) --------------------

    def rel_scalar(self, value, x=None):
        return RelForm("scalar", np.asarray(value, dtype=float))

    def rel_vector(self, value, x):
        """``(tau C, R^T (C - U tau C))``."""
        return RelForm("vector", self.split_jacobian(x) @ np.asarray(value, dtype=float))

    def rel_space_vector(self, value, x):
        return RelForm("space_vector", self.rotation(as_point(x)[0]).T @ as_space(value))

    def rel_space_tensor(self, value, x):
        """``R^T f R`` for a spacelike second-order tensor of any variance."""
        r = self.rotation(as_point(x)[0])
        return RelForm("space_tensor", r.T @ np.asarray(value, dtype=float) @ r)

    def rel_covector(self, value, x):
        """``(K.U, (K.i) R)``."""
        t, q = self.split(x)
        return RelForm("covector", np.asarray(value, dtype=float) @ self.unsplit_jacobian(t, q))

    def rel_mixed_EM(self, value, x):
        """Mixed ``E (x) M*`` tensor: ``(R^T F.U, R^T (F.i) R)``."""
        t, q = self.split(x)
        r = self.rotation(t)
        return RelForm("mixed_EM", r.T @ np.asarray(value, dtype=float)
                       @ self.unsplit_jacobian(t, q))

    def rel_tensor2_con(self, value, x):
        dh = self.split_jacobian(x)
        return RelForm("tensor2_con", dh @ np.asarray(value, dtype=float) @ dh.T)

    def rel_tensor2_cov(self, value, x):
        t, q = self.split(x)
        dp = self.unsplit_jacobian(t, q)
        return RelForm("tensor2_cov", dp.T @ np.asarray(value, dtype=float) @ dp)

    def rel_tensor2_mix(self, value, x):
        """Vector slot (rows) by ``DH``, covector slot (columns) by ``DP``."""
        t, q = self.split(x)
        dp = self.unsplit_jacobian(t, q)
        dh = self.split_jacobian(x)
        return RelForm("tensor2_mix", dh @ np.asarray(value, dtype=float) @ dp)

    # -- relative fields ------------------------------------------------------

    def rel_velocity(self, u, t, q):
        """Observer-relative velocity ``R^T (u(P) - U(P))``."""
        t = float(t)
        q_o, w, om, r = self._motion.state(t)
        rq = r @ as_space(q)
        return r.T @ (u.velocity(t, q_o + rq) - w - om @ rq)

    def relative_velocity(self, u):
        return lambda t, q: self.rel_velocity(u, t, q)

    def relative(self, f):
        """Relative form of field ``f`` as a callable ``(t, q) -> components``."""
        kind = FieldKind(f.kind)
        method = _REL_BY_KIND[kind]

        def rel(t, q):
            x = self.unsplit(t, q)
            return method(self, f(x), x).components

        return rel


_REL_BY_KIND = {
    FieldKind.SCALAR: RigidObserver.rel_scalar,
    FieldKind.FOUR_VECTOR: RigidObserver.rel_vector,
    FieldKind.SPACE_VECTOR: RigidObserver.rel_space_vector,
    FieldKind.FOUR_COVECTOR: RigidObserver.rel_covector,
    FieldKind.SPACE_COVECTOR: RigidObserver.rel_space_vector,
    FieldKind.TENSOR2_CON: RigidObserver.rel_tensor2_con,
    FieldKind.TENSOR2_COV: RigidObserver.rel_tensor2_cov,
    FieldKind.TENSOR2_MIX: RigidObserver.rel_tensor2_mix,
    FieldKind.SPACE_TENSOR2: RigidObserver.rel_space_tensor,
}

_REL_BY_NAME = {
    "scalar": RigidObserver.rel_scalar,
    "vector": RigidObserver.rel_vector,
    "space_vector": RigidObserver.rel_space_vector,
    "space_covector": RigidObserver.rel_space_vector,
    "space_tensor": RigidObserver.rel_space_tensor,
    "covector": RigidObserver.rel_covector,
    "mixed_EM": RigidObserver.rel_mixed_EM,
    "tensor2_con": RigidObserver.rel_tensor2_con,
    "tensor2_cov": RigidObserver.rel_tensor2_cov,
    "tensor2_mix": RigidObserver.rel_tensor2_mix,
}


def rel_form(obs, value, kind, x):
    """Relative form of an absolute ``value`` of the given ``kind`` at ``x``."""
    try:
        method = _REL_BY_NAME[kind]
    except KeyError:
        raise ValueError(f"unknown quantity kind {kind!r}") from None
    return method(obs, value, x)


# --------------------------------------------------------------------------
# construction


def make_inertial(U0=(0.0, 0.0, 0.0), o=(0.0, 0.0, 0.0, 0.0)):
    """Inertial observer moving with constant velocity ``U0`` through ``o``.

    ``U0`` is the spatial velocity (3 components) or a full four-velocity
    whose time component must be 1.
    """
    w = np.asarray(U0, dtype=float)
    if w.shape == (4,):
        if w[0] != 1.0:
            raise ValueError("an absolute velocity has time component 1")
        w = w[1:]
    w = check_finite(as_space(w), "observer velocity")
    o = as_point(o)
    return RigidObserver(_InertialMotion(o, w), o[0], name="inertial")


def _as_omega(omega):
    if callable(omega):
        return lambda t, q: np.asarray(omega(t), dtype=float)
    m = np.array(omega, dtype=float)
    if m.shape != (3, 3):
        raise ValueError("omega must be a 3x3 antisymmetric matrix or a callable")
    return lambda t, q: m


def _as_origin_velocity(v):
    if v is None:
        zero = np.zeros(3)
        return lambda t, q: zero
    if isinstance(v, VelocityField):
        return v.velocity
    if callable(v):
        return lambda t, q: np.asarray(v(t, q), dtype=float)
    w = as_space(v)
    return lambda t, q: w


def make_rotating(o, origin_velocity=None, omega=None, *, step=DEFAULT_STEP,
                  reorth_every=100, name="rotating"):
    """Rigid observer with prescribed angular velocity ``omega(t)``.

    ``origin_velocity`` drives the origin world line from ``o``: ``None`` for
    a static origin, a constant 3-vector, a :class:`VelocityField` or a
    callable ``(t, q)``.  ``omega`` is a constant antisymmetric 3x3 matrix or
    a callable ``t -> 3x3``.  The rotation is anchored at ``R(t_o) = 1`` with
    ``t_o`` the time of ``o``.
    """
    o = as_point(o)
    om = _as_omega(np.zeros((3, 3)) if omega is None else omega)
    for dt in (0.0, 0.5, 1.0, 2.5):
        sample = om(o[0] + dt, o[1:])
        if np.max(np.abs(sample + sample.T)) > ANTISYMMETRY_TOL * max(1.0, np.max(np.abs(sample))):
            raise ValueError(f"omega is not antisymmetric at t={o[0] + dt}")
    motion = _IntegratedMotion(o[0], o[1:], _as_origin_velocity(origin_velocity), om,
                               step, reorth_every)
    return RigidObserver(motion, o[0], name=name)


def rotating_about(omega0, axis=(0.0, 0.0, 1.0), o=(0.0, 0.0, 0.0, 0.0), **kwargs):
    """Observer spinning at constant rate ``omega0`` about ``axis`` through ``o``."""
    axis = as_space(axis)
    return make_rotating(o, None, omega0 * hat(axis / np.linalg.norm(axis)), **kwargs)


def corotating_observer(u, o, *, step=DEFAULT_STEP, reorth_every=100):
    """Rigid observer riding the particle through ``o`` and spinning with it.

    The origin follows the particle line ``r_o``; the angular velocity is the
    continuum's vorticity ``-1/2 (grad ^ u)`` at ``r_o(t)``.
    """
    o = as_point(o)

    def omega(t, q):
        g = u.grad(t, q)
        return 0.5 * (g - g.T)

    motion = _IntegratedMotion(o[0], o[1:], u.velocity, omega, step, reorth_every)
    return RigidObserver(motion, o[0], name=f"corotating[{u.name}]")
