import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from absderiv.derivatives import (OracleConfig, as_four_field, deformation_lie_check,
                                  jaumann_corotating_check, jaumann_derivative, jaumann_rel,
                                  lie_derivative, lie_derivative_rel, lie_formula, lie_oracle,
                                  lower_convected_rel, material_derivative, material_oracle,
                                  material_rel, oracle_convergence, upper_convected_rel)
from absderiv.fields import (Field, FieldKind, catalog, constant_field, derivative,
                             polynomial_field)
from absderiv.observers import corotating_observer, make_inertial, rotating_about

E_X = [1.0, 0.0, 0.0]
E_Y = [0.0, 1.0, 0.0]
FOUR_KINDS = [FieldKind.SCALAR, FieldKind.FOUR_VECTOR, FieldKind.FOUR_COVECTOR,
              FieldKind.TENSOR2_CON, FieldKind.TENSOR2_COV, FieldKind.TENSOR2_MIX]
ALL_KINDS = list(FieldKind)


def box_poly(kind, seed, variance=None):
    return polynomial_field(kind, seed=seed, variance=variance, length=2.0)


# -- material derivative -----------------------------------------------------------


def test_material_derivative_examples():
    shear = catalog("simple_shear", kappa=1.0)
    qx = Field("scalar", lambda y: y[1])
    assert material_derivative(qx, shear, [0.0, 0.0, 2.0, 0.0]) == pytest.approx(2.0, abs=1e-9)
    for u in (shear, catalog("planar_vortex")):
        assert material_derivative(constant_field("scalar", 3.0), u, [0.5, 1, 1, 1]) == 0.0
    c = constant_field("space_vector", [1.0, 2.0, 3.0])
    np.testing.assert_array_equal(
        material_derivative(c, catalog("constant", w0=[1, 1, 1]), [0, 0, 0, 0]), 0.0)


def test_material_oracle_matches_closed_form():
    u = catalog("planar_vortex")
    f = box_poly("space_tensor2", 3)
    x = np.array([0.5, 0.3, -0.6, 0.4])
    np.testing.assert_allclose(material_oracle(f, u, x), material_derivative(f, u, x), atol=1e-7)


# -- Lie derivatives: frozen examples ---------------------------------------------


def test_lie_derivative_of_spacelike_vector_under_shear():
    u = catalog("simple_shear", kappa=1.0)
    c = constant_field("space_vector", E_Y)
    x = [0.0, 0.0, 1.0, 0.0]
    np.testing.assert_array_equal(lie_derivative(c, u, x), [0.0, -1.0, 0.0, 0.0])
    np.testing.assert_allclose(lie_oracle(c, u, x), [0.0, -1.0, 0.0, 0.0], atol=1e-7)


def test_lie_derivative_of_spacelike_covector_under_shear():
    u = catalog("simple_shear", kappa=1.0)
    k = constant_field("space_covector", E_X)
    np.testing.assert_array_equal(lie_derivative(k, u, [0.0, 0.3, 0.2, 0.1]), [0, 0, 1, 0])


def test_spacelike_covector_gains_a_time_component():
    u = catalog("time_ramped_shear", a=1.0)
    k = constant_field("space_covector", E_X)
    lie = lie_derivative(k, u, [0.7, 0.0, 0.0, 0.0])
    assert lie[0] == 1.0
    np.testing.assert_array_equal(lie[1:], 0.0)


def test_lie_derivative_of_velocity_vanishes():
    # an FD-jacobian copy keeps the check from reducing to an algebraic identity
    for name in ("constant", "rigid_rotation", "simple_shear", "time_ramped_shear",
                 "planar_vortex", "uniform_expansion"):
        u = catalog(name)
        fd_copy = Field(u.kind, u.evaluate)
        for x in ([0.0, 0.1, 0.2, 0.3], [1.5, -1.0, 0.7, 2.0]):
            np.testing.assert_allclose(lie_derivative(fd_copy, u, x), 0.0, atol=1e-8)


def test_scalar_lie_is_material():
    u = catalog("planar_vortex")
    g = box_poly("scalar", 5)
    x = [0.4, 0.2, 0.1, -0.3]
    assert lie_derivative(g, u, x) == material_derivative(g, u, x)


def test_oracle_of_constant_field_under_constant_flow_is_zero():
    u = catalog("constant", w0=[0.3, 0.0, -0.1])
    for kind in FOUR_KINDS[1:]:
        f = constant_field(kind, np.ones((4,) if kind.value.endswith("vector") else (4, 4)))
        np.testing.assert_allclose(lie_oracle(f, u, [0.2, 0.0, 0.0, 0.0]), 0.0, atol=1e-12)


def test_lie_formula_rejects_spacelike_kinds():
    with pytest.raises(ValueError):
        lie_formula("space_vector", np.zeros(3), np.zeros((3, 4)), np.zeros(4), np.zeros((4, 4)))


# -- Lie derivatives: oracle agreement ---------------------------------------------


@pytest.mark.parametrize("kind", ALL_KINDS, ids=lambda k: k.value)
@pytest.mark.parametrize("name", ["rigid_rotation", "simple_shear", "time_ramped_shear",
                                  "planar_vortex", "uniform_expansion"])
def test_closed_form_matches_oracle(kind, name):
    u = catalog(name)
    f = box_poly(kind, 21)
    rng = np.random.default_rng(8)
    for _ in range(5):
        x = np.concatenate(([rng.uniform(0, 2)], rng.uniform(-2, 2, 3)))
        np.testing.assert_allclose(lie_derivative(f, u, x), lie_oracle(f, u, x), atol=1e-6)


@pytest.mark.parametrize("kind", [FieldKind.FOUR_VECTOR, FieldKind.FOUR_COVECTOR,
                                  FieldKind.TENSOR2_CON, FieldKind.TENSOR2_COV,
                                  FieldKind.TENSOR2_MIX], ids=lambda k: k.value)
def test_oracle_converges_at_second_order(kind):
    errors, slope = oracle_convergence(box_poly(kind, 2), catalog("planar_vortex"),
                                       [0.3, 0.5, -0.2, 0.4])
    assert abs(slope - 2.0) <= 0.1
    assert 50 < errors[0] / errors[1] < 200


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**16), st.sampled_from(FOUR_KINDS[1:]),
       st.lists(st.floats(-2, 2), min_size=3, max_size=3), st.floats(0, 2))
def test_oracle_agreement_property(seed, kind, q, t):
    u = catalog("planar_vortex")
    f = box_poly(kind, seed)
    x = np.array([t, *q])
    np.testing.assert_allclose(lie_derivative(f, u, x), lie_oracle(f, u, x), atol=1e-6)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**16), st.lists(st.floats(-2, 2), min_size=4, max_size=4))
def test_leibniz_rule(seed, x):
    u = catalog("simple_shear", kappa=0.7)
    k = box_poly("four_covector", seed)
    c = box_poly("four_vector", seed + 1)
    pairing = Field("scalar", lambda y: float(k(y) @ c(y)))  # derivative by differences
    lhs = lie_derivative(pairing, u, x)
    rhs = lie_derivative(k, u, x) @ c(x) + k(x) @ lie_derivative(c, u, x)
    assert lhs == pytest.approx(rhs, abs=1e-7)


def test_oracle_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(s_step=0.0)
    with pytest.raises(ValueError):
        OracleConfig(s_step=1e-4, flow_step=1e-4)
    cfg = OracleConfig.for_step(1e-2)
    assert cfg.flow_step == pytest.approx(1e-3)


# -- Jaumann -----------------------------------------------------------------------


def test_jaumann_of_constant_vector_in_rigid_rotation():
    u = catalog("rigid_rotation", omega0=1.0)
    c = constant_field("space_vector", E_X)
    np.testing.assert_allclose(jaumann_derivative(c, u, [0.0, 0.4, 0.2, 0.0]), [0, -1, 0],
                               atol=1e-12)


def test_jaumann_needs_spacelike_vector():
    with pytest.raises(TypeError):
        jaumann_derivative(box_poly("four_vector", 0), catalog("simple_shear"), [0, 0, 0, 0])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**16), st.lists(st.floats(-2, 2), min_size=4, max_size=4))
def test_jaumann_is_mean_of_convected_rates(seed, x):
    u = catalog("simple_shear", kappa=1.0)
    c = box_poly("space_vector", seed)
    flat_c = Field("space_covector", c.evaluate, c.jacobian)
    mean = 0.5 * (lie_derivative(c, u, x)[1:] + lie_derivative(flat_c, u, x)[1:])
    np.testing.assert_allclose(jaumann_derivative(c, u, x), mean, atol=1e-9)


def test_corotating_identity_examples():
    rot = catalog("rigid_rotation", omega0=1.0)
    assert np.max(jaumann_corotating_check(rot, [0, 0, 0, 0],
                                           constant_field("space_vector", E_X))) <= 1e-6
    const = catalog("constant", w0=[0.2, -0.1, 0.3])
    assert np.max(jaumann_corotating_check(const, [0, 0.1, 0.2, 0.3],
                                           box_poly("space_vector", 4))) <= 1e-8
    vortex = catalog("planar_vortex", omega0=1.0, ell=1.0)
    res = jaumann_corotating_check(vortex, [0, 0.5, 0, 0], box_poly("space_vector", 6),
                                   times=[0.0, 0.5, 1.0])
    assert res.shape == (3,) and np.max(res) <= 1e-5


# -- relative formulas ----------------------------------------------------------------


def test_material_rel_reduces_to_substantial_derivative_for_inertial():
    u = catalog("simple_shear", kappa=1.0)
    obs = make_inertial()
    c = box_poly("space_vector", 3)
    x = np.array([0.5, 0.2, 0.4, -0.1])
    got = material_rel(obs, obs.relative(c), obs.relative_velocity(u), x[0], x[1:])
    np.testing.assert_allclose(got, material_derivative(c, u, x), atol=1e-8)


def test_material_rel_cancels_for_corotating_rigid_rotation():
    u = catalog("rigid_rotation", omega0=1.0)
    obs = rotating_about(1.0)
    c = constant_field("space_vector", E_X)
    got = material_rel(obs, obs.relative(c), obs.relative_velocity(u), 1.3, [0.2, 0.4, 0.1])
    np.testing.assert_allclose(got, 0.0, atol=1e-8)


def test_convected_rates_reduce_to_partial_time_derivative_when_comoving():
    u = catalog("rigid_rotation", omega0=1.0)
    obs = rotating_about(1.0)
    v_U = obs.relative_velocity(u)
    c_U = obs.relative(box_poly("space_vector", 9))
    t, q = 0.8, np.array([0.3, -0.2, 0.5])
    h = 1e-5
    d0 = (c_U(t + h, q) - c_U(t - h, q)) / (2 * h)
    for rate in (upper_convected_rel, lower_convected_rel, jaumann_rel):
        np.testing.assert_allclose(rate(v_U, c_U, t, q), d0, atol=1e-7)


def test_convected_comparison_values_for_shear():
    u = catalog("simple_shear", kappa=1.0)
    obs = make_inertial()
    c_U = obs.relative(constant_field("space_vector", E_Y))
    v_U = obs.relative_velocity(u)
    np.testing.assert_allclose(upper_convected_rel(v_U, c_U, 0.0, [0, 1, 0]), [-1, 0, 0],
                               atol=1e-9)
    np.testing.assert_allclose(lower_convected_rel(v_U, c_U, 0.0, [0, 1, 0]), 0.0, atol=1e-9)
    np.testing.assert_allclose(jaumann_rel(v_U, c_U, 0.0, [0, 1, 0]), [-0.5, 0, 0], atol=1e-9)


@pytest.mark.parametrize("kind", FOUR_KINDS, ids=lambda k: k.value)
def test_relative_lie_formula_in_rotating_frame(kind):
    u = catalog("planar_vortex")
    obs = rotating_about(1.0, axis=(0.2, 0.0, 1.0), o=(0.0, 0.3, 0.0, 0.0))
    f = box_poly(kind, 13)
    absolute = obs.relative(Field(kind, lambda y: lie_derivative(f, u, y)))
    x = np.array([1.2, 0.4, -0.5, 0.3])
    t, Q = obs.split(x)
    got = lie_derivative_rel(kind, obs.relative(f), obs.relative_velocity(u), t, Q)
    np.testing.assert_allclose(got, absolute(t, Q), atol=1e-6)


def test_spacelike_fields_embed_with_zero_time_slots():
    f = as_four_field(box_poly("space_tensor2", 1, variance="covariant"))
    assert f.kind is FieldKind.TENSOR2_COV
    v = f([0.1, 0.2, 0.3, 0.4])
    assert np.all(v[0] == 0.0) and np.all(v[:, 0] == 0.0)
    assert np.all(derivative(f, [0.1, 0.2, 0.3, 0.4])[0] == 0.0)


# -- deformation gradient ---------------------------------------------------------------


def test_deformation_rate_examples():
    obs = make_inertial()
    shear = catalog("simple_shear", kappa=1.0)
    assert deformation_lie_check(shear, obs, 0.0, [0.2, 0.1, 0.0], 0.5) <= 1e-6
    rot = catalog("rigid_rotation", omega0=1.0)
    assert deformation_lie_check(rot, obs, 0.0, [1.0, 0.0, 0.0], 1.0) <= 1e-6
    vortex = catalog("planar_vortex")
    assert deformation_lie_check(vortex, obs, 0.0, [0.3, 0.2, 0.1], 0.0) <= 1e-6


def test_deformation_rate_in_rotating_frame():
    obs = rotating_about(1.0, o=(0.0, 0.2, 0.0, 0.0))
    assert deformation_lie_check(catalog("planar_vortex"), obs, 0.3, [0.4, 0.1, 0.2], 0.5) <= 1e-6


def test_corotating_observer_sees_rigid_rotation_at_rest():
    u = catalog("rigid_rotation", omega0=1.0)
    obs = corotating_observer(u, [0.0, 0.0, 0.0, 0.0])
    np.testing.assert_allclose(obs.rel_velocity(u, 2.0, [0.5, -0.3, 0.2]), 0.0, atol=1e-9)
