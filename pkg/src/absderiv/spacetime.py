"""Nonrelativistic space-time in one fixed inertial orthonormal chart.

World points are stored as ``(t, q)`` with ``t`` in seconds and ``q`` in
meters.  Four-vectors carry ``(dt, dq)``, four-covectors ``(k0, k)``.  The
chart is orthonormal, so the identification of spacelike covectors with
spacelike vectors is componentwise; ``flat`` and ``sharp`` exist to keep the
variance bookkeeping explicit.

All numerical code in the package works on plain arrays laid out in this
chart (``x = [t, q1, q2, q3]``).  The typed wrappers below are accepted
anywhere an array is, through :func:`as_point` and friends.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

Instant = float


class EvaluationDomainError(ArithmeticError):
    """A field or flow produced non-finite values."""


class VarianceError(TypeError):
    """Tensors of different variance were combined."""


class Variance(str, Enum):
    CONTRAVARIANT = "contravariant"
    COVARIANT = "covariant"
    MIXED = "mixed"


def _frozen(a, shape, name):
    arr = np.array(a, dtype=float)
    if arr.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite components")
    arr.flags.writeable = False
    return arr


# --------------------------------------------------------------------------
# input validation helpers


def as_point(x) -> np.ndarray:
    """Return a world point (or four-vector) as a float array ``[t, q1, q2, q3]``."""
    if isinstance(x, WorldPoint):
        return np.concatenate(([x.t], x.q))
    if isinstance(x, FourVector):
        return np.concatenate(([x.dt], x.dq))
    arr = np.asarray(x, dtype=float)
    if arr.shape != (4,):
        raise ValueError(f"expected 4 chart components, got shape {arr.shape}")
    return arr


def as_space(q) -> np.ndarray:
    if isinstance(q, (SpaceVector, SpaceCovector)):
        return np.array(q.q if isinstance(q, SpaceVector) else q.k)
    arr = np.asarray(q, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"expected 3 spatial components, got shape {arr.shape}")
    return arr


def as_covector(k) -> np.ndarray:
    if isinstance(k, FourCovector):
        return np.concatenate(([k.k0], k.k))
    arr = np.asarray(k, dtype=float)
    if arr.shape != (4,):
        raise ValueError(f"expected 4 covector components, got shape {arr.shape}")
    return arr


def check_finite(value, what="value"):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise EvaluationDomainError(f"non-finite {what}")
    return arr


# --------------------------------------------------------------------------
# typed values


@dataclass(frozen=True, eq=False)
class WorldPoint:
    t: float
    q: np.ndarray

    def __post_init__(self):
        if not np.isfinite(self.t):
            raise ValueError("t must be finite")
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "q", _frozen(self.q, (3,), "q"))

    def __array__(self, dtype=None, copy=None):
        return as_point(self).astype(dtype or float)

    def __add__(self, other):
        if isinstance(other, SpaceVector):
            return WorldPoint(self.t, self.q + other.q)
        if isinstance(other, FourVector):
            return WorldPoint(self.t + other.dt, self.q + other.dq)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, WorldPoint):
            return FourVector(self.t - other.t, self.q - other.q)
        if isinstance(other, FourVector):
            return WorldPoint(self.t - other.dt, self.q - other.dq)
        if isinstance(other, SpaceVector):
            return WorldPoint(self.t, self.q - other.q)
        return NotImplemented

    def __eq__(self, other):
        return (isinstance(other, WorldPoint) and self.t == other.t
                and np.array_equal(self.q, other.q))

    def __repr__(self):
        return f"WorldPoint(t={self.t!r}, q={self.q.tolist()!r})"


@dataclass(frozen=True, eq=False)
class FourVector:
    dt: float
    dq: np.ndarray

    def __post_init__(self):
        if not np.isfinite(self.dt):
            raise ValueError("dt must be finite")
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "dq", _frozen(self.dq, (3,), "dq"))

    def __array__(self, dtype=None, copy=None):
        return as_point(self).astype(dtype or float)

    @property
    def is_spacelike(self):
        return self.dt == 0.0

    def __add__(self, other):
        if isinstance(other, FourVector):
            return FourVector(self.dt + other.dt, self.dq + other.dq)
        if isinstance(other, SpaceVector):
            return FourVector(self.dt, self.dq + other.q)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return FourVector(-self.dt, -self.dq)

    def __mul__(self, a):
        if np.ndim(a) != 0:
            return NotImplemented
        return FourVector(a * self.dt, a * self.dq)

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, FourVector) and self.dt == other.dt
                and np.array_equal(self.dq, other.dq))

    def __repr__(self):
        return f"FourVector(dt={self.dt!r}, dq={self.dq.tolist()!r})"


@dataclass(frozen=True, eq=False)
class SpaceVector:
    q: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", _frozen(self.q, (3,), "q"))

    def __array__(self, dtype=None, copy=None):
        return np.array(self.q, dtype=dtype or float)

    def embed(self) -> FourVector:
        return FourVector(0.0, self.q)

    def __add__(self, other):
        if isinstance(other, SpaceVector):
            return SpaceVector(self.q + other.q)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, SpaceVector):
            return SpaceVector(self.q - other.q)
        return NotImplemented

    def __neg__(self):
        return SpaceVector(-self.q)

    def __mul__(self, a):
        if np.ndim(a) != 0:
            return NotImplemented
        return SpaceVector(a * self.q)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, SpaceVector) and np.array_equal(self.q, other.q)

    def __repr__(self):
        return f"SpaceVector({self.q.tolist()!r})"


@dataclass(frozen=True, eq=False)
class FourCovector:
    k0: float
    k: np.ndarray

    def __post_init__(self):
        if not np.isfinite(self.k0):
            raise ValueError("k0 must be finite")
        object.__setattr__(self, "k0", float(self.k0))
        object.__setattr__(self, "k", _frozen(self.k, (3,), "k"))

    def __array__(self, dtype=None, copy=None):
        return as_covector(self).astype(dtype or float)

    def __call__(self, v):
        """Apply to a four-vector (or a spacelike vector, embedded)."""
        if isinstance(v, SpaceVector):
            v = v.embed()
        return float(as_covector(self) @ as_point(v))

    def __add__(self, other):
        if isinstance(other, FourCovector):
            return FourCovector(self.k0 + other.k0, self.k + other.k)
        return NotImplemented

    def __neg__(self):
        return FourCovector(-self.k0, -self.k)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, a):
        if np.ndim(a) != 0:
            return NotImplemented
        return FourCovector(a * self.k0, a * self.k)

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, FourCovector) and self.k0 == other.k0
                and np.array_equal(self.k, other.k))

    def __repr__(self):
        return f"FourCovector(k0={self.k0!r}, k={self.k.tolist()!r})"


@dataclass(frozen=True, eq=False)
class SpaceCovector:
    k: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "k", _frozen(self.k, (3,), "k"))

    def __array__(self, dtype=None, copy=None):
        return np.array(self.k, dtype=dtype or float)

    def __call__(self, q):
        return float(self.k @ as_space(q))

    def __add__(self, other):
        if isinstance(other, SpaceCovector):
            return SpaceCovector(self.k + other.k)
        return NotImplemented

    def __neg__(self):
        return SpaceCovector(-self.k)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, a):
        if np.ndim(a) != 0:
            return NotImplemented
        return SpaceCovector(a * self.k)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, SpaceCovector) and np.array_equal(self.k, other.k)

    def __repr__(self):
        return f"SpaceCovector({self.k.tolist()!r})"


class _TensorBase:
    _dim = 0
    variance: Variance
    m: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "variance", Variance(self.variance))
        object.__setattr__(self, "m", _frozen(self.m, (self._dim, self._dim), "m"))

    def __array__(self, dtype=None, copy=None):
        return np.array(self.m, dtype=dtype or float)

    def _same(self, other):
        if type(other) is not type(self):
            return False
        if other.variance is not self.variance:
            raise VarianceError(
                f"cannot combine {self.variance.value} and {other.variance.value} tensors")
        return True

    def __add__(self, other):
        if not self._same(other):
            return NotImplemented
        return type(self)(self.variance, self.m + other.m)

    def __sub__(self, other):
        if not self._same(other):
            return NotImplemented
        return type(self)(self.variance, self.m - other.m)

    def __neg__(self):
        return type(self)(self.variance, -self.m)

    def __mul__(self, a):
        if np.ndim(a) != 0:
            return NotImplemented
        return type(self)(self.variance, a * self.m)

    __rmul__ = __mul__

    def transpose(self):
        return type(self)(self.variance, self.m.T)

    @property
    def T(self):
        return self.transpose()

    def __eq__(self, other):
        return (type(other) is type(self) and other.variance is self.variance
                and np.array_equal(self.m, other.m))

    def __repr__(self):
        return f"{type(self).__name__}({self.variance.value!r}, {self.m.tolist()!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Tensor2(_TensorBase):
    """Second-order tensor on the four-dimensional vector space.

    Slot order is (time, space, space, space) in both slots; the first slot
    is the row index.
    """
    variance: Variance
    m: np.ndarray
    _dim = 4


@dataclass(frozen=True, eq=False, repr=False)
class SpaceTensor2(_TensorBase):
    variance: Variance
    m: np.ndarray
    _dim = 3


# --------------------------------------------------------------------------
# operations


def time_eval(x) -> Instant:
    """Absolute instant of a world point."""
    return float(as_point(x)[0])


def tau_of(v) -> float:
    """Time component of a four-vector; zero exactly for spacelike vectors."""
    return float(as_point(v)[0])


def euclid_dot(a, b) -> float:
    return float(as_space(a) @ as_space(b))


def euclid_norm(a) -> float:
    return float(np.sqrt(euclid_dot(a, a)))


def embed(q) -> FourVector:
    return FourVector(0.0, as_space(q))


def flat(q) -> SpaceCovector:
    return SpaceCovector(as_space(q))


def sharp(k) -> SpaceVector:
    return SpaceVector(as_space(k))


def restrict_covector(K) -> SpaceCovector:
    """Restriction of a four-covector to spacelike vectors."""
    return SpaceCovector(as_covector(K)[1:])


def antisym_space(T):
    """``transpose(T) - T`` for a spacelike second-order tensor.

    Accepts a :class:`SpaceTensor2` (the variance tag is kept) or a 3x3 array.
    """
    if isinstance(T, SpaceTensor2):
        return SpaceTensor2(T.variance, T.m.T - T.m)
    m = np.asarray(T, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"expected a 3x3 tensor, got shape {m.shape}")
    return m.T - m
