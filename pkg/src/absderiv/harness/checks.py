"""The invariant suite as a registry of named residual checks.

Every check draws its points from its own generator, seeded by the suite
seed and a hash of the check id, so filtering never changes what a check
sees.  A check returns an array of non-negative residuals; it passes when
the largest is within its tolerance.
"""
from __future__ import annotations

import re
import time
import zlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .._numerics import central_jacobian
from ..derivatives import (OracleConfig, as_four_field, deformation_lie_check, embed_value,
                           jaumann_corotating_check, jaumann_derivative, lie_derivative,
                           lie_derivative_rel, lie_oracle, lower_convected_rel,
                           lower_convected_tensor_rel, material_derivative, material_rel,
                           mixed_convected_tensor_rel, oracle_convergence,
                           rel_partials, upper_convected_rel, upper_convected_tensor_rel)
from ..fields import (INCOMPRESSIBLE, Field, FieldKind, catalog, constant_field,
                      deformation_gradient, derivative, flow, hat, polynomial_field)
from ..observers import make_inertial, make_rotating, rotating_about
from ..spacetime import Variance
from .scenario import make_report

BOX_T = (0.0, 2.0)
BOX_Q = 2.0

# parameter sets used wherever a check sweeps the catalog
FIELD_PARAMS = {
    "constant": {"w0": [0.3, -0.2, 0.1]},
    "rigid_rotation": {"omega0": 1.0},
    "simple_shear": {"kappa": 1.0},
    "time_ramped_shear": {"a": 1.0},
    "planar_vortex": {"omega0": 1.0, "ell": 1.0},
    "uniform_expansion": {"alpha": 0.5},
}
ORACLE_FIELDS = ("rigid_rotation", "simple_shear", "time_ramped_shear", "planar_vortex")
CONVECTED_FIELDS = ("simple_shear", "planar_vortex", "time_ramped_shear", "rigid_rotation")

# (check-id suffix, field kind, variance of a spacelike tensor)
ORACLE_KINDS = (
    ("scalar", FieldKind.SCALAR, None),
    ("vector", FieldKind.FOUR_VECTOR, None),
    ("covector", FieldKind.FOUR_COVECTOR, None),
    ("space_vector", FieldKind.SPACE_VECTOR, None),
    ("space_covector", FieldKind.SPACE_COVECTOR, None),
    ("tensor_con", FieldKind.TENSOR2_CON, None),
    ("tensor_cov", FieldKind.TENSOR2_COV, None),
    ("tensor_mix", FieldKind.TENSOR2_MIX, None),
    ("space_tensor", FieldKind.SPACE_TENSOR2, Variance.MIXED),
)
SLOPE_KINDS = ("vector", "covector", "tensor_con", "tensor_cov", "tensor_mix")


@dataclass(frozen=True)
class Check:
    check_id: str
    tolerance: float
    fn: Callable[[np.random.Generator], np.ndarray]
    doc: str = ""


REGISTRY: dict[str, Check] = {}


def register(check_id, tolerance):
    def wrap(fn):
        if check_id in REGISTRY:
            raise ValueError(f"duplicate check id {check_id!r}")
        REGISTRY[check_id] = Check(check_id, tolerance, fn, (fn.__doc__ or "").strip())
        return fn
    return wrap


def check_rng(seed, check_id):
    return np.random.default_rng([int(seed), zlib.crc32(check_id.encode())])


def select(pattern=None):
    if pattern is None:
        return list(REGISTRY.values())
    rx = re.compile(pattern)
    return [c for c in REGISTRY.values() if rx.search(c.check_id)]


def run_check(check, seed=0, tolerance=None):
    tol = check.tolerance if tolerance is None else tolerance
    start = time.perf_counter()
    residuals = check.fn(check_rng(seed, check.check_id))
    return make_report(check.check_id, residuals, tol, time.perf_counter() - start)


def run_checks(pattern=None, seed=0, tolerance=None):
    """Run the selected checks in registry order and return their reports."""
    return [run_check(c, seed, tolerance) for c in select(pattern)]


# --------------------------------------------------------------------------
# shared fixtures


def random_points(rng, n, t=BOX_T, q=BOX_Q):
    out = np.empty((n, 4))
    out[:, 0] = rng.uniform(t[0], t[1], size=n)
    out[:, 1:] = rng.uniform(-q, q, size=(n, 3))
    return out


def field(name):
    return catalog(name, FIELD_PARAMS[name])


def wobbling_omega(t):
    """A time-dependent angular velocity with unit mean spin about z."""
    return hat((0.3 * np.sin(t), 0.2 * np.cos(2.0 * t), 1.0))


def observers():
    """An inertial and a rotating (unit spin) observer, both off-origin."""
    inertial = make_inertial((0.3, -0.2, 0.1), (0.0, 0.5, -0.4, 0.2))
    rotating = make_rotating((0.0, 0.4, 0.3, -0.2), (0.2, 0.0, -0.1),
                             hat((0.0, 0.0, 1.0)), name="rotating")
    return {"inertial": inertial, "rotating": rotating}


def wobbling_observer():
    return make_rotating((0.0, 0.1, -0.2, 0.3), (0.1, 0.2, 0.0), wobbling_omega,
                         name="wobbling")


def poly_field(kind, rng, variance=None):
    # monomials normalized to the evaluation box, so fields are O(1) there
    return polynomial_field(kind, rng=rng, variance=variance, length=BOX_Q)


def maxabs(a):
    return float(np.max(np.abs(a)))


def copy_without_jacobian(f):
    """The same field with its derivative left to finite differences."""
    return Field(f.kind, f.evaluate, None, variance=f.variance, name=f"fd[{f.name}]")


# --------------------------------------------------------------------------
# observers and splittings


@register("split_roundtrip", 1e-9)
def _split_roundtrip(rng):
    """split(unsplit) and unsplit(split) are identities, t in [0, 10]."""
    out = []
    for obs in (*observers().values(), rotating_about(1.0)):
        for x in random_points(rng, 100, t=(0.0, 10.0)):
            t, Q = obs.split(x)
            back = obs.unsplit(t, Q)
            t2, Q2 = obs.split(obs.unsplit(x[0], x[1:]))
            out.append(max(maxabs(back - x), abs(t2 - x[0]), maxabs(Q2 - x[1:])))
    return np.array(out)


@register("split_dhp", 1e-9)
def _split_dhp(rng):
    """DH(P(t, q)) . DP(t, q) is the identity."""
    out = []
    for obs in (*observers().values(), rotating_about(1.0)):
        for x in random_points(rng, 100, t=(0.0, 10.0)):
            p = obs.unsplit(x[0], x[1:])
            out.append(maxabs(obs.split_jacobian(p) @ obs.unsplit_jacobian(x[0], x[1:])
                              - np.eye(4)))
    return np.array(out)


@register("observer_orthogonality", 1e-9)
def _observer_orthogonality(rng):
    """R^T R = 1 over 10 s of integration at step 1e-3."""
    out = []
    for obs in (observers()["rotating"], wobbling_observer()):
        times = np.concatenate((np.linspace(0.0, 10.0, 41), rng.uniform(0.0, 10.0, 40)))
        for t in times:
            r = obs.rotation(t)
            out.append(maxabs(r.T @ r - np.eye(3)))
    return np.array(out)


@register("observer_rigidity", 1e-8)
def _observer_rigidity(rng):
    """Distances between observer space points do not change over 10 s.

    The space points' world lines are integrated independently (RK4 on the
    implied observer velocity), not reconstructed from the rotation.
    """
    obs = wobbling_observer()
    starts = random_points(rng, 4, t=(0.0, 0.0))
    q = starts[:, 1:].copy()
    d0 = np.linalg.norm(q[:, None] - q[None], axis=-1)

    def vel(t, qs):
        return np.array([obs.velocity(np.concatenate(([t], p)))[1:] for p in qs])

    h = 1e-2
    out = []
    for i in range(1000):
        t = i * h
        k1 = vel(t, q)
        k2 = vel(t + h / 2, q + h / 2 * k1)
        k3 = vel(t + h / 2, q + h / 2 * k2)
        k4 = vel(t + h, q + h * k3)
        q = q + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if (i + 1) % 50 == 0:
            t1 = (i + 1) * h
            d = np.linalg.norm(q[:, None] - q[None], axis=-1)
            out.append(maxabs(d - d0))
            # and through the splitting: fixed observer coordinates
            ps = np.array([obs.unsplit(t1, s[1:])[1:] for s in starts])
            out.append(maxabs(np.linalg.norm(ps[:, None] - ps[None], axis=-1) - d0))
    return np.array(out)


@register("observer_angvel", 1e-7)
def _observer_angvel(rng):
    """Spacelike derivative of the implied observer field equals Omega."""
    out = []
    for obs in (observers()["rotating"], wobbling_observer()):
        uf = obs.velocity_field()
        for x in random_points(rng, 25, t=(0.0, 10.0)):
            om = obs.omega(x[0])
            out.append(maxabs(uf.grad(x[0], x[1:]) - om))
            # affine construction: U(x + q) - U(x) = Omega q
            dq = rng.uniform(-1.0, 1.0, 3)
            shifted = x + np.concatenate(([0.0], dq))
            out.append(maxabs(obs.velocity(shifted) - obs.velocity(x)
                              - np.concatenate(([0.0], om @ dq))))
    return np.array(out)


@register("nabu_identity", 1e-6)
def _nabu_identity(rng):
    """Relative form of grad u equals grad v_U + omega."""
    out = []
    for obs in observers().values():
        for name in CONVECTED_FIELDS:
            u = field(name)
            v_U = obs.relative_velocity(u)
            for x in random_points(rng, 5):
                t, Q = obs.split(x)
                lhs = obs.rel_space_tensor(u.grad(t, x[1:]), x).components
                rhs = rel_partials(v_U, t, Q)[:, 1:] + obs.omega_rel(t)
                out.append(maxabs(lhs - rhs))
    return np.array(out)


@register("dcsp_identity", 1e-6)
def _dcsp_identity(rng):
    """Split of Dc: time part (d0 + omega) c_U, space part grad c_U."""
    out = []
    for obs in (*observers().values(), wobbling_observer()):
        c = poly_field(FieldKind.SPACE_VECTOR, rng)
        c_U = obs.relative(c)
        for x in random_points(rng, 10):
            t, Q = obs.split(x)
            split = obs.rel_mixed_EM(derivative(c, x), x).components
            d = rel_partials(c_U, t, Q)
            out.append(maxabs(split[:, 0] - (d[:, 0] + obs.omega_rel(t) @ c_U(t, Q))))
            out.append(maxabs(split[:, 1:] - d[:, 1:]))
    return np.array(out)


# --------------------------------------------------------------------------
# fields and flows


@register("field_jacobian_fd", 1e-7)
def _field_jacobian_fd(rng):
    """Analytic velocity jacobians against central differences."""
    out = []
    for name in FIELD_PARAMS:
        u = field(name)
        for x in random_points(rng, 100):
            fd = central_jacobian(lambda y: u.spatial(y[0], y[1:]), x)
            out.append(maxabs(u.velocity_jacobian(x[0], x[1:]) - fd))
    return np.array(out)


@register("flow_semigroup", 1e-8)
def _flow_semigroup(rng):
    """Y_{s+r} = Y_s o Y_r for s, r in {0.1, 0.3}."""
    out = []
    for name in FIELD_PARAMS:
        u = field(name)
        for x in random_points(rng, 2):
            for s, r in ((0.1, 0.3), (0.3, 0.1), (0.3, 0.3)):
                direct = flow(u, x, s + r).point
                composed = flow(u, flow(u, x, r).point, s).point
                out.append(maxabs(direct - composed))
    return np.array(out)


@register("flow_jacobian_fd", 1e-6)
def _flow_jacobian_fd(rng):
    """Variational-equation DY_s against central differences of Y_s."""
    out = []
    for name in FIELD_PARAMS:
        u = field(name)
        x = random_points(rng, 1)[0]
        res = flow(u, x, 0.3)
        fd = central_jacobian(lambda y: flow(u, y, 0.3).point, x)
        out.append(maxabs(res.jacobian - fd))
    return np.array(out)


@register("flow_time_row", 0.0)
def _flow_time_row(rng):
    """Time row of DY_s is exactly (1, 0, 0, 0) and time advances by exactly s."""
    out = []
    for name in FIELD_PARAMS:
        u = field(name)
        for x in random_points(rng, 2):
            s = float(rng.uniform(-0.5, 0.5))
            res = flow(u, x, s)
            out.append(maxabs(res.jacobian[0] - np.array([1.0, 0.0, 0.0, 0.0])))
            out.append(abs(res.point[0] - (x[0] + s)))
    return np.array(out)


@register("flow_incompressible", 1e-7)
def _flow_incompressible(rng):
    """Space block of DY_s has unit determinant for incompressible fields."""
    out = []
    for name in INCOMPRESSIBLE:
        u = field(name)
        for x in random_points(rng, 4):
            for s in (0.5, -1.0):
                out.append(abs(np.linalg.det(flow(u, x, s).jacobian[1:, 1:]) - 1.0))
    return np.array(out)


@register("deformation_rate", 1e-6)
def _deformation_rate(rng):
    """dF/ds = (grad v_U) F along shear and rigid rotation, s in [0, 1]."""
    out = []
    obs_set = observers()
    for name in ("simple_shear", "rigid_rotation"):
        u = field(name)
        for obs in obs_set.values():
            x = random_points(rng, 1, q=1.0)[0]
            t0, X = obs.split(x)
            for s in (0.0, 0.5, 1.0):
                out.append(deformation_lie_check(u, obs, t0, X, s))
    return np.array(out)


@register("deformation_det", 1e-7)
def _deformation_det(rng):
    """det F = 1 for incompressible flows seen by rigid observers."""
    out = []
    obs_set = observers()
    for name in INCOMPRESSIBLE:
        u = field(name)
        for obs in obs_set.values():
            x = random_points(rng, 1)[0]
            t0, X = obs.split(x)
            for s in (0.5, 1.0):
                out.append(abs(np.linalg.det(deformation_gradient(u, obs, t0, X, s)) - 1.0))
    return np.array(out)


# --------------------------------------------------------------------------
# Lie derivatives against the oracle


@register("lie_u_u", 1e-8)
def _lie_u_u(rng):
    """L_u u = 0 for every catalog field.

    Closed form with u's derivative taken by finite differences (so the
    formula is not cancelling identical arrays), and the pullback
    (DY_s)^-1 u(Y_s) compared against u itself.
    """
    out = []
    for name in FIELD_PARAMS:
        u = field(name)
        f = copy_without_jacobian(u)
        for x in random_points(rng, 100):
            out.append(maxabs(lie_derivative(f, u, x)))
        for x in random_points(rng, 5):
            for s in (0.2, -0.2):
                res = flow(u, x, s)
                out.append(maxabs(np.linalg.solve(res.jacobian, u(res.point)) - u(x)))
    return np.array(out)


def _oracle_check(kind, variance):
    def run(rng):
        cfg = OracleConfig()
        out = []
        for name in FIELD_PARAMS:
            u = field(name)
            f = poly_field(kind, rng, variance)
            for x in random_points(rng, 50 if name in ORACLE_FIELDS else 10):
                out.append(maxabs(lie_derivative(f, u, x) - lie_oracle(f, u, x, cfg)))
        return np.array(out)
    run.__doc__ = f"Closed-form Lie derivative of a {kind.value} field against the oracle."
    return run


def _slope_check(kind):
    def run(rng):
        out = []
        for name in ORACLE_FIELDS:
            u = field(name)
            f = poly_field(kind, rng)
            for x in random_points(rng, 3):
                _, slope = oracle_convergence(f, u, x)
                out.append(abs(slope - 2.0))
        return np.array(out)
    run.__doc__ = f"Oracle error slope for {kind.value} fields is 2 in log-log."
    return run


for _suffix, _kind, _variance in ORACLE_KINDS:
    register(f"oracle_{_suffix}", 1e-6)(_oracle_check(_kind, _variance))
for _suffix, _kind, _variance in ORACLE_KINDS:
    if _suffix in SLOPE_KINDS:
        register(f"oracle_slope_{_suffix}", 0.1)(_slope_check(_kind))


# --------------------------------------------------------------------------
# relative formulas against split absolute results


@register("material_objectivity", 1e-6)
def _material_objectivity(rng):
    """(d0 + omega + v_U . grad) c_U equals the split absolute material derivative."""
    out = []
    for obs in (observers()["rotating"], wobbling_observer()):
        for name in CONVECTED_FIELDS:
            u = field(name)
            c = poly_field(FieldKind.SPACE_VECTOR, rng)
            c_U, v_U = obs.relative(c), obs.relative_velocity(u)
            for x in random_points(rng, 5):
                t, Q = obs.split(x)
                absolute = obs.rel_space_vector(material_derivative(c, u, x), x).components
                out.append(maxabs(material_rel(obs, c_U, v_U, t, Q) - absolute))
    return np.array(out)


def _convected_check(kind, variance, rel_formula, rel_split, doc):
    def run(rng):
        out = []
        for obs in observers().values():
            for name in CONVECTED_FIELDS:
                u = field(name)
                f = poly_field(kind, rng, variance)
                f_U, v_U = obs.relative(f), obs.relative_velocity(u)
                for x in random_points(rng, 4):
                    t, Q = obs.split(x)
                    split = rel_split(obs, lie_derivative(f, u, x), x)
                    out.append(maxabs(rel_formula(v_U, f_U, t, Q) - split))
        return np.array(out)
    run.__doc__ = doc
    return run


register("convected_upper", 1e-6)(_convected_check(
    FieldKind.SPACE_VECTOR, None, upper_convected_rel,
    lambda obs, lie, x: obs.rel_vector(lie, x).components[1:],
    "Upper convected rate in observer coordinates against the split Lie derivative."))
register("convected_lower", 1e-6)(_convected_check(
    FieldKind.SPACE_COVECTOR, None, lower_convected_rel,
    lambda obs, lie, x: obs.rel_covector(lie, x).components[1:],
    "Lower convected rate in observer coordinates against the split Lie derivative."))
register("convected_tensor_con", 1e-6)(_convected_check(
    FieldKind.SPACE_TENSOR2, Variance.CONTRAVARIANT, upper_convected_tensor_rel,
    lambda obs, lie, x: obs.rel_tensor2_con(lie, x).components[1:, 1:],
    "Space block of the contravariant tensor Lie derivative, relative formula vs split."))
register("convected_tensor_cov", 1e-6)(_convected_check(
    FieldKind.SPACE_TENSOR2, Variance.COVARIANT, lower_convected_tensor_rel,
    lambda obs, lie, x: obs.rel_tensor2_cov(lie, x).components[1:, 1:],
    "Space block of the covariant tensor Lie derivative, relative formula vs split."))
register("convected_tensor_mix", 1e-6)(_convected_check(
    FieldKind.SPACE_TENSOR2, Variance.MIXED, mixed_convected_tensor_rel,
    lambda obs, lie, x: obs.rel_tensor2_mix(lie, x).components[1:, 1:],
    "Space block of the mixed tensor Lie derivative, relative formula vs split."))


@register("lie_frame_general", 1e-6)
def _lie_frame_general(rng):
    """Chart Lie formulas in rotating-observer coordinates, every four-kind."""
    out = []
    obs = wobbling_observer()
    kinds = (FieldKind.SCALAR, FieldKind.FOUR_VECTOR, FieldKind.FOUR_COVECTOR,
             FieldKind.TENSOR2_CON, FieldKind.TENSOR2_COV, FieldKind.TENSOR2_MIX)
    for kind in kinds:
        for name in ("planar_vortex", "time_ramped_shear"):
            u = field(name)
            f = poly_field(kind, rng)
            f_U, v_U = obs.relative(f), obs.relative_velocity(u)
            split = obs.relative(Field(kind, lambda x, f=f, u=u: lie_derivative(f, u, x)))
            for x in random_points(rng, 3):
                t, Q = obs.split(x)
                out.append(maxabs(lie_derivative_rel(kind, f_U, v_U, t, Q) - split(t, Q)))
    return np.array(out)


@register("nonspacelike_covector", 1e-8)
def _nonspacelike_covector(rng):
    """Time component of L_u k equals k_j d0 u^j under time-ramped shear."""
    out = []
    u = field("time_ramped_shear")
    k = poly_field(FieldKind.SPACE_COVECTOR, rng)
    for x in random_points(rng, 20):
        d0u = u.velocity_jacobian(x[0], x[1:])[:, 0]
        kv = k(x)
        expected = sum(kv[j] * d0u[j] for j in range(3))
        out.append(abs(lie_derivative(k, u, x)[0] - expected))
    return np.array(out)


@register("nonspacelike_mixed", 1e-8)
def _nonspacelike_mixed(rng):
    """Lower-left block of L_u a equals a^i_k d0 u^k under time-ramped shear."""
    out = []
    u = field("time_ramped_shear")
    a = poly_field(FieldKind.SPACE_TENSOR2, rng, Variance.MIXED)
    for x in random_points(rng, 20):
        d0u = u.velocity_jacobian(x[0], x[1:])[:, 0]
        av = a(x)
        expected = [sum(av[i, j] * d0u[j] for j in range(3)) for i in range(3)]
        out.append(maxabs(lie_derivative(a, u, x)[1:, 0] - np.array(expected)))
    return np.array(out)


# --------------------------------------------------------------------------
# algebraic properties


@register("leibniz", 1e-7)
def _leibniz(rng):
    """L_u (k . c) = (L_u k) . c + k . (L_u c)."""
    out = []
    for name in FIELD_PARAMS:
        u = field(name)
        k = poly_field(FieldKind.FOUR_COVECTOR, rng)
        c = poly_field(FieldKind.FOUR_VECTOR, rng)
        pairing = Field(FieldKind.SCALAR, lambda x, k=k, c=c: float(k(x) @ c(x)),
                        lambda x, k=k, c=c: c(x) @ derivative(k, x) + k(x) @ derivative(c, x),
                        name="k.c")
        for x in random_points(rng, 10):
            lhs = lie_derivative(pairing, u, x)
            rhs = lie_derivative(k, u, x) @ c(x) + k(x) @ lie_derivative(c, u, x)
            out.append(abs(lhs - rhs))
    return np.array(out)


@register("jaumann_decomposition", 1e-9)
def _jaumann_decomposition(rng):
    """J_u c = 1/2 (L_u c + sharp((L_u flat c) restricted to space))."""
    out = []
    for name in FIELD_PARAMS:
        u = field(name)
        c = poly_field(FieldKind.SPACE_VECTOR, rng)
        flat_c = Field(FieldKind.SPACE_COVECTOR, c.evaluate, c.jacobian, name="flat[c]")
        for x in random_points(rng, 10):
            upper = lie_derivative(c, u, x)[1:]
            lower = lie_derivative(flat_c, u, x)[1:]
            out.append(maxabs(jaumann_derivative(c, u, x) - 0.5 * (upper + lower)))
    return np.array(out)


@register("jaumann_corotating_rigid", 1e-6)
def _jaumann_corotating_rigid(rng):
    """d0 c_Uo(t, 0) = (J_u c)_Uo(t, 0) for a corotating observer in rigid rotation."""
    u = field("rigid_rotation")
    out = [jaumann_corotating_check(u, (0.0, 0.0, 0.0, 0.0),
                                    constant_field(FieldKind.SPACE_VECTOR, [1.0, 0.0, 0.0]))]
    for o in random_points(rng, 2, q=1.0):
        out.append(jaumann_corotating_check(u, o, poly_field(FieldKind.SPACE_VECTOR, rng)))
    return np.concatenate(out)


@register("jaumann_corotating_vortex", 1e-5)
def _jaumann_corotating_vortex(rng):
    """The corotating identity for the planar vortex (omega0 = 1, ell = 1)."""
    u = field("planar_vortex")
    out = [jaumann_corotating_check(u, (0.0, 0.5, 0.0, 0.0),
                                    poly_field(FieldKind.SPACE_VECTOR, rng))]
    for o in random_points(rng, 2, q=1.0):
        out.append(jaumann_corotating_check(u, o, poly_field(FieldKind.SPACE_VECTOR, rng)))
    return np.concatenate(out)


def _correction_terms(kind, a, du):
    """Non-material terms of the chart Lie derivative, written out index by index."""
    n = 4
    if kind is FieldKind.FOUR_VECTOR:
        return np.array([-sum(du[i, j] * a[j] for j in range(n)) for i in range(n)])
    if kind is FieldKind.FOUR_COVECTOR:
        return np.array([sum(du[j, i] * a[j] for j in range(n)) for i in range(n)])
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for m in range(n):
                if kind is FieldKind.TENSOR2_CON:
                    acc -= du[i, m] * a[m, j] + du[j, m] * a[i, m]
                elif kind is FieldKind.TENSOR2_COV:
                    acc += du[m, i] * a[m, j] + du[m, j] * a[i, m]
                else:
                    acc += -du[i, m] * a[m, j] + a[i, m] * du[m, j]
            out[i, j] = acc
    return out


@register("material_vs_lie", 1e-9)
def _material_vs_lie(rng):
    """Lie derivative minus its correction terms is the material derivative."""
    out = []
    for name in ("simple_shear", "planar_vortex", "time_ramped_shear"):
        u = field(name)
        for _, kind, variance in ORACLE_KINDS[1:]:
            f = poly_field(kind, rng, variance)
            four = as_four_field(f).kind
            for x in random_points(rng, 3):
                a = embed_value(f.kind, f(x))
                corr = _correction_terms(four, a, derivative(u, x))
                mat = embed_value(f.kind, material_derivative(f, u, x))
                out.append(maxabs(lie_derivative(f, u, x) - corr - mat))
    return np.array(out)


@register("scalar_consistency", 0.0)
def _scalar_consistency(rng):
    """L_u g and D_u g coincide exactly for scalar fields."""
    out = []
    for name in FIELD_PARAMS:
        u = field(name)
        g = poly_field(FieldKind.SCALAR, rng)
        for x in random_points(rng, 5):
            out.append(abs(lie_derivative(g, u, x) - material_derivative(g, u, x)))
    return np.array(out)


__all__ = ["Check", "REGISTRY", "register", "check_rng", "select", "run_check",
           "run_checks", "random_points", "FIELD_PARAMS"]
