import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from absderiv._numerics import central_jacobian
from absderiv.derivatives import rel_partials
from absderiv.fields import catalog, hat, polynomial_field
from absderiv.observers import (corotating_observer, make_inertial, make_rotating, rel_form,
                                rotating_about)

coord = st.floats(-2.0, 2.0)
points = st.tuples(st.floats(0.0, 10.0), coord, coord, coord).map(np.array)


def rot_z(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def wobbling():
    """A fresh observer with time-dependent spin and a moving origin."""
    return make_rotating((0.0, 0.1, -0.2, 0.3), (0.1, 0.2, 0.0),
                         lambda t: hat((0.3 * np.sin(t), 0.2 * np.cos(2 * t), 1.0)))


# one instance for the property tests, so its rotation cache is reused
WOBBLING = wobbling()


# -- inertial observers ---------------------------------------------------------


def test_inertial_at_rest_splits_identically():
    obs = make_inertial()
    t, Q = obs.split([1.5, 0.2, -3.0, 4.0])
    assert t == 1.5
    np.testing.assert_array_equal(Q, [0.2, -3.0, 4.0])
    np.testing.assert_array_equal(obs.split_jacobian([1.5, 0, 0, 0]), np.eye(4))
    np.testing.assert_array_equal(obs.omega(7.0), np.zeros((3, 3)))
    np.testing.assert_array_equal(obs.omega_rel(7.0), np.zeros((3, 3)))


def test_moving_inertial_observer():
    obs = make_inertial([1.0, 0.0, 0.0])
    t, Q = obs.split([2.0, 5.0, 0.0, 0.0])
    np.testing.assert_array_equal(Q, [3.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        make_inertial([2.0, 1.0, 0.0, 0.0])  # time component must be 1
    np.testing.assert_array_equal(make_inertial([1.0, 1.0, 0.0, 0.0]).split([2, 5, 0, 0])[1],
                                  [3.0, 0.0, 0.0])


# -- rotating observers ----------------------------------------------------------


def test_constant_rotation_matches_analytic_solution():
    obs = rotating_about(1.0)
    np.testing.assert_allclose(obs.rotation(np.pi / 2) @ [1, 0, 0], [0, 1, 0], atol=1e-9)
    for t in (0.3, 2.0, 7.7):
        np.testing.assert_allclose(obs.rotation(t), rot_z(t), atol=1e-9)


def test_rotation_is_anchored_at_reference_time():
    obs = rotating_about(1.0, o=(2.0, 0.0, 0.0, 0.0))
    np.testing.assert_array_equal(obs.rotation(2.0), np.eye(3))
    np.testing.assert_allclose(obs.rotation(1.0), rot_z(-1.0), atol=1e-9)


def test_zero_omega_reduces_to_inertial():
    rot = make_rotating((0.0, 1.0, 0.0, 0.0), (0.5, 0.0, 0.0), np.zeros((3, 3)))
    ine = make_inertial((0.5, 0.0, 0.0), (0.0, 1.0, 0.0, 0.0))
    x = np.array([3.0, 0.2, 0.4, -0.1])
    np.testing.assert_allclose(rot.split(x)[1], ine.split(x)[1], atol=1e-12)


def test_orthogonality_over_ten_seconds():
    obs = wobbling()
    worst = max(np.max(np.abs(obs.rotation(t).T @ obs.rotation(t) - np.eye(3)))
                for t in np.linspace(0, 10, 101))
    assert worst <= 1e-9


def test_split_example_quarter_turn():
    obs = rotating_about(1.0)
    t, Q = obs.split([np.pi / 2, 0.0, 1.0, 0.0])
    np.testing.assert_allclose(Q, [1.0, 0.0, 0.0], atol=1e-9)
    np.testing.assert_allclose(obs.unsplit(np.pi / 2, [1.0, 0.0, 0.0])[1:], [0, 1, 0], atol=1e-9)
    d0, _ = obs.unsplit_partials(0.0, [1.0, 0.0, 0.0])
    np.testing.assert_allclose(d0, [1.0, 0.0, 1.0, 0.0], atol=1e-9)
    # later the point has turned: d0 P = Omega R q
    d0, r = obs.unsplit_partials(np.pi / 2, [1.0, 0.0, 0.0])
    np.testing.assert_allclose(d0[1:], hat((0, 0, 1)) @ r @ [1.0, 0.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(d0, [1.0, -1.0, 0.0, 0.0], atol=1e-9)


def test_origin_maps_to_zero():
    obs = wobbling()
    for t in (0.0, 1.3, 4.0):
        o = obs.origin(t)
        np.testing.assert_allclose(obs.split(o)[1], 0.0, atol=1e-14)
        np.testing.assert_array_equal(obs.unsplit(t, [0, 0, 0]), o)


def test_non_antisymmetric_omega_is_rejected():
    with pytest.raises(ValueError):
        make_rotating((0, 0, 0, 0), None, np.eye(3))


@settings(max_examples=40, deadline=None)
@given(points)
def test_split_roundtrip_property(x):
    obs = WOBBLING
    t, Q = obs.split(x)
    np.testing.assert_allclose(obs.unsplit(t, Q), x, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(points)
def test_dhp_identity_property(x):
    obs = WOBBLING
    p = obs.unsplit(x[0], x[1:])
    np.testing.assert_allclose(obs.split_jacobian(p) @ obs.unsplit_jacobian(x[0], x[1:]),
                               np.eye(4), atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(points)
def test_implied_observer_field_gradient_is_omega(x):
    obs = WOBBLING
    g = obs.velocity_field().grad(x[0], x[1:])
    np.testing.assert_allclose(g, obs.omega(x[0]), atol=1e-7)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 10.0))
def test_relative_angular_velocity_is_antisymmetric(t):
    om = WOBBLING.omega_rel(t)
    assert np.max(np.abs(om + om.T)) <= 1e-12


def test_relative_angular_velocity_matches_rotation_rate():
    obs = WOBBLING
    t = 2.3
    r = obs.rotation(t)
    rdot = central_jacobian(lambda s: obs.rotation(s[0]), np.array([t]))[..., 0]
    np.testing.assert_allclose(obs.omega_rel(t), r.T @ rdot, atol=1e-7)
    # same-axis constant spin commutes with the rotation
    const = rotating_about(1.0)
    np.testing.assert_allclose(const.omega_rel(4.0), const.omega(4.0), atol=1e-12)


def test_rotation_cache_is_thread_safe():
    obs = wobbling()
    times = np.linspace(-3.0, 9.0, 200)
    results = {}

    def work(k):
        results[k] = [obs.rotation(t) for t in times[k::4]]

    threads = [threading.Thread(target=work, args=(k,)) for k in range(4)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    fresh = wobbling()
    for k in range(4):
        for t, r in zip(times[k::4], results[k]):
            np.testing.assert_array_equal(r, fresh.rotation(t))


# -- relative forms ----------------------------------------------------------------


def test_relative_space_vector_examples():
    x = np.array([1.0, 0.3, 0.2, 0.1])
    np.testing.assert_array_equal(make_inertial().rel_space_vector([1, 2, 3], x).components,
                                  [1, 2, 3])
    obs = rotating_about(1.0)
    rel = obs.rel_space_vector([0, 1, 0], [np.pi / 2, 0, 0, 0]).components
    np.testing.assert_allclose(rel, [1, 0, 0], atol=1e-9)


def test_relative_velocity_examples():
    u = catalog("rigid_rotation", omega0=1.0)
    co = rotating_about(1.0)
    for t, q in ((0.5, [1.0, 2.0, 0.5]), (3.0, [-1.0, 0.2, 0.0])):
        np.testing.assert_allclose(co.rel_velocity(u, t, q), 0.0, atol=1e-12)
    shear = catalog("simple_shear", kappa=1.0)
    np.testing.assert_allclose(make_inertial().rel_velocity(shear, 0.0, [0, 2, 0]), [2, 0, 0])
    obs = wobbling()
    np.testing.assert_allclose(obs.rel_velocity(obs.velocity_field(), 1.0, [0.3, 0.1, 0.2]),
                               0.0, atol=1e-12)


def test_relative_form_of_velocity_has_unit_time_part():
    u = catalog("planar_vortex")
    obs = wobbling()
    x = np.array([1.2, 0.3, -0.4, 0.5])
    rel = obs.rel_vector(u(x), x)
    assert rel.time_part == pytest.approx(1.0, abs=1e-14)
    t, Q = obs.split(x)
    np.testing.assert_allclose(rel.space_part, obs.rel_velocity(u, t, Q), atol=1e-14)


def test_time_time_component_of_contravariant_tensor_is_observer_independent():
    T = polynomial_field("tensor2_con", seed=1)
    x = np.array([0.7, 0.1, 0.2, 0.3])
    a = make_inertial().rel_tensor2_con(T(x), x).components[0, 0]
    b = wobbling().rel_tensor2_con(T(x), x).components[0, 0]
    assert a == pytest.approx(T(x)[0, 0]) and b == pytest.approx(a)


def test_rel_form_dispatch_and_unknown_kind():
    obs = wobbling()
    x = np.array([0.4, 0.1, 0.0, 0.0])
    np.testing.assert_array_equal(rel_form(obs, [1, 0, 0], "space_vector", x).components,
                                  obs.rel_space_vector([1, 0, 0], x).components)
    with pytest.raises(ValueError):
        rel_form(obs, [1, 0, 0], "spinor", x)


def test_relative_gradient_identity():
    # (grad u)_U = grad v_U + omega
    u = catalog("planar_vortex")
    obs = wobbling()
    x = np.array([1.1, 0.4, -0.3, 0.2])
    t, Q = obs.split(x)
    lhs = obs.rel_space_tensor(u.grad(t, x[1:]), x).components
    rhs = rel_partials(obs.relative_velocity(u), t, Q)[:, 1:] + obs.omega_rel(t)
    np.testing.assert_allclose(lhs, rhs, atol=1e-6)


# -- corotating observer ------------------------------------------------------------


def test_corotating_with_rigid_rotation_reproduces_the_flow():
    u = catalog("rigid_rotation", omega0=1.0)
    obs = corotating_observer(u, (0.0, 0.0, 0.0, 0.0))
    for t in (0.0, 1.0, 2.5):
        np.testing.assert_allclose(obs.omega(t), hat((0, 0, 1)), atol=1e-12)
        x = np.array([t, 0.4, -0.2, 0.7])
        np.testing.assert_allclose(obs.velocity(x), u(x), atol=1e-12)


def test_corotating_with_constant_flow_is_inertial():
    u = catalog("constant", w0=[0.2, 0.1, 0.0])
    obs = corotating_observer(u, (0.0, 1.0, 1.0, 1.0))
    np.testing.assert_array_equal(obs.rotation(3.0), np.eye(3))
    np.testing.assert_allclose(obs.origin(2.0), [2.0, 1.4, 1.2, 1.0], atol=1e-12)


def test_corotating_with_shear_spins_at_half_rate():
    obs = corotating_observer(catalog("simple_shear", kappa=1.0), (0.0, 0.0, 0.0, 0.0))
    om = obs.omega(1.0)
    assert om[0, 1] == pytest.approx(0.5) and om[1, 0] == pytest.approx(-0.5)
    assert np.max(np.abs(om + om.T)) == 0.0
