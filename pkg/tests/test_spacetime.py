import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from absderiv.spacetime import (EvaluationDomainError, FourCovector, FourVector, SpaceCovector,
                                SpaceTensor2, SpaceVector, Tensor2, Variance, VarianceError,
                                WorldPoint, antisym_space, as_point, check_finite, embed,
                                euclid_dot, euclid_norm, flat, restrict_covector, sharp,
                                tau_of, time_eval)

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)
triples = st.tuples(finite, finite, finite)


def test_time_eval_projects_the_time_coordinate():
    assert time_eval(WorldPoint(2.0, [1.0, 0.0, 0.0])) == 2.0
    assert time_eval(WorldPoint(0.0, [5.0, 5.0, 5.0])) == 0.0
    x = WorldPoint(1.5, [0.0, 0.0, 0.0])
    d = FourVector(3.0, [1.0, 2.0, 3.0])
    assert time_eval(x + d) - time_eval(x) == tau_of(d) == 3.0


def test_tau_of_is_linear_and_kills_spacelike_vectors():
    assert tau_of(FourVector(1.0, [0, 0, 0])) == 1.0
    assert tau_of(FourVector(0.0, [1, 2, 3])) == 0.0
    v = FourVector(1.0, [1, 0, 0])
    w = FourVector(2.0, [0, 1, 0])
    assert tau_of(2 * v + (-1) * w) == 0.0
    assert (2 * v - w).is_spacelike


def test_euclidean_structure():
    assert euclid_dot([1, 0, 0], [1, 0, 0]) == 1.0
    assert euclid_dot([1, 2, 2], [1, 2, 2]) == 9.0
    assert euclid_norm(SpaceVector([1, 2, 2])) == 3.0
    assert euclid_dot([1, 0, 0], [0, 1, 0]) == 0.0


def test_flat_sharp_and_restriction():
    assert flat([1, 2, 3]) == SpaceCovector([1, 2, 3])
    q = SpaceVector([-4.0, 0.0, 7.0])
    assert sharp(flat(q)) == q
    assert flat([2, 0, 0])([3, 0, 0]) == 6.0
    assert restrict_covector(FourCovector(5.0, [1, 2, 3])) == SpaceCovector([1, 2, 3])
    assert restrict_covector(FourCovector(0.0, [0, 0, 0])) == SpaceCovector([0, 0, 0])
    K = FourCovector(1.0, [1, 1, 1])
    assert restrict_covector(K)([2, 0, 0]) == K(embed([2, 0, 0])) == 2.0


def test_antisym_space_examples():
    assert np.array_equal(antisym_space(np.eye(3)), np.zeros((3, 3)))
    m = np.zeros((3, 3))
    m[0, 1] = 1.0
    a = antisym_space(SpaceTensor2("mixed", m))
    assert a.variance is Variance.MIXED
    assert a.m[1, 0] == 1.0 and a.m[0, 1] == -1.0


@settings(max_examples=50, deadline=None)
@given(st.lists(finite, min_size=9, max_size=9))
def test_antisym_space_flips_under_transpose(entries):
    t = np.array(entries).reshape(3, 3)
    assert np.array_equal(antisym_space(t), -antisym_space(t.T))
    a = antisym_space(t)
    assert np.array_equal(a, -a.T)


@settings(max_examples=50, deadline=None)
@given(finite, triples, finite, triples)
def test_affine_point_arithmetic(t, q, dt, dq):
    x = WorldPoint(t, q)
    d = FourVector(dt, dq)
    y = x + d
    back = y - x
    assert back.dt == pytest.approx(dt, abs=1e-9)
    np.testing.assert_allclose(back.dq, dq, atol=1e-9)
    # simultaneous points differ by a spacelike vector
    assert (WorldPoint(t, dq) - x).is_spacelike


@settings(max_examples=50, deadline=None)
@given(triples, triples)
def test_euclid_dot_is_symmetric_and_matches_flat(a, b):
    assert euclid_dot(a, b) == euclid_dot(b, a)
    assert flat(a)(b) == pytest.approx(euclid_dot(a, b))


def test_values_are_immutable():
    x = WorldPoint(0.0, [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        x.q[0] = 5.0
    with pytest.raises(AttributeError):
        x.t = 1.0


def test_non_finite_components_are_rejected():
    with pytest.raises(ValueError):
        WorldPoint(float("nan"), [0, 0, 0])
    with pytest.raises(ValueError):
        SpaceVector([0, float("inf"), 0])
    with pytest.raises(EvaluationDomainError):
        check_finite([1.0, float("nan")])


def test_variance_mismatch_raises():
    a = Tensor2("contravariant", np.eye(4))
    b = Tensor2("covariant", np.eye(4))
    with pytest.raises(VarianceError):
        a + b
    assert (a + a).variance is Variance.CONTRAVARIANT
    assert np.array_equal((a - a).m, np.zeros((4, 4)))


def test_typed_values_are_accepted_as_arrays():
    x = WorldPoint(1.0, [2.0, 3.0, 4.0])
    np.testing.assert_array_equal(as_point(x), [1, 2, 3, 4])
    np.testing.assert_array_equal(np.asarray(FourCovector(1.0, [0, 0, 2])), [1, 0, 0, 2])
    with pytest.raises(ValueError):
        as_point([1.0, 2.0])
