"""Scenario files, the ``run`` evaluation and the CSV tables.

A scenario is one JSON document.  Every default is written back into the
canonical config that heads each CSV, so a report always records the seed,
steps and tolerances it was produced with.
"""
from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass

import numpy as np

from .._numerics import central_time_derivative
from ..derivatives import (OracleConfig, as_four_field, jaumann_corotating_check,
                           jaumann_derivative, jaumann_rel, lie_derivative, lie_oracle,
                           lower_convected_rel, material_derivative, material_oracle,
                           probe_flows, upper_convected_rel)
from ..fields import (VALUE_SHAPE, CatalogError, Field, FieldKind, catalog, constant_field,
                      polynomial_field)
from ..observers import (_REL_BY_KIND, corotating_observer, make_inertial,
                         rotating_about)
from ..spacetime import Variance


class ConfigError(ValueError):
    """Malformed or unresolvable scenario (CLI exit code 2)."""


@dataclass
class CheckReport:
    check_id: str
    points: int
    max_residual: float
    tolerance: float
    passed: bool
    wall_time: float

    def as_dict(self):
        return asdict(self)


def make_report(check_id, residuals, tolerance, wall_time):
    residuals = np.atleast_1d(np.asarray(residuals, dtype=float))
    worst = float(np.max(residuals)) if residuals.size else 0.0
    if np.isnan(worst) or np.any(np.isnan(residuals)):
        worst = float("nan")
    return CheckReport(check_id, int(residuals.size), worst, float(tolerance),
                       bool(worst <= tolerance), float(wall_time))


DEFAULT_TOLERANCES = {
    "oracle": 1e-6,
    "material": 1e-6,
    "jaumann": 1e-6,
    "split": 1e-9,
    "corotating": 1e-5,
}

_KEYS = {"name", "field", "observer", "test_field", "points", "oracle", "tolerances", "seed"}

CONVECTED_COLUMNS = (["point", "t", "x1", "x2", "x3", "X1", "X2", "X3"]
                     + [f"{n}_{i}" for n in ("upper", "lower", "jaumann") for i in (1, 2, 3)]
                     + ["jaumann_residual"])
ROUNDTRIP_COLUMNS = ["point", "t", "x1", "x2", "x3", "X1", "X2", "X3",
                     "roundtrip_residual", "dhp_residual"]
COROTATING_COLUMNS = (["point", "t0", "x1", "x2", "x3", "t"]
                      + [f"d0c_{i}" for i in (1, 2, 3)]
                      + [f"jaumann_{i}" for i in (1, 2, 3)] + ["residual"])
MAX_COMPONENTS = 16
RUN_COLUMNS = (["point", "t", "x1", "x2", "x3", "derivative", "n_components"]
               + [f"closed_{i}" for i in range(MAX_COMPONENTS)]
               + [f"oracle_{i}" for i in range(MAX_COMPONENTS)] + ["residual"])

TABLE_KINDS = ("convected_comparison", "split_roundtrip", "corotating")


# --------------------------------------------------------------------------
# parsing


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


def _num(value, what):
    _require(isinstance(value, (int, float)) and not isinstance(value, bool)
             and np.isfinite(value), f"{what} must be a finite number")
    return float(value)


def _vec(value, n, what):
    _require(isinstance(value, list) and len(value) == n, f"{what} must be a list of {n} numbers")
    return [_num(v, what) for v in value]


def load_scenario(path):
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return normalize(raw)


def normalize(raw):
    """Validate a scenario dict and materialize every default."""
    _require(isinstance(raw, dict), "scenario must be a JSON object")
    unknown = set(raw) - _KEYS
    _require(not unknown, f"unknown scenario keys: {sorted(unknown)}")
    cfg = {}
    name = raw.get("name", "scenario")
    _require(isinstance(name, str), "name must be a string")
    cfg["name"] = name
    seed = raw.get("seed", 0)
    _require(isinstance(seed, int) and not isinstance(seed, bool), "seed must be an integer")
    cfg["seed"] = seed

    field = raw.get("field")
    _require(isinstance(field, dict) and isinstance(field.get("name"), str),
             "field must be an object with a 'name'")
    _require(set(field) <= {"name", "params"}, "field accepts only 'name' and 'params'")
    params = field.get("params", {})
    _require(isinstance(params, dict), "field.params must be an object")
    try:
        catalog(field["name"], params)
    except CatalogError as exc:
        raise ConfigError(str(exc)) from None
    cfg["field"] = {"name": field["name"], "params": dict(params)}

    cfg["observer"] = _normalize_observer(raw.get("observer", {"type": "inertial"}))
    cfg["test_field"] = _normalize_test_field(raw.get("test_field"))
    cfg["points"] = _normalize_points(raw.get("points", {"random": 5}))

    oracle = raw.get("oracle", {})
    _require(isinstance(oracle, dict), "oracle must be an object")
    _require(set(oracle) <= {"s_step", "flow_step", "fd_h"},
             f"unknown oracle keys: {sorted(set(oracle) - {'s_step', 'flow_step', 'fd_h'})}")
    defaults = asdict(OracleConfig())
    ocfg = {k: _num(oracle.get(k, defaults[k]), f"oracle.{k}") for k in defaults}
    try:
        OracleConfig(**ocfg)
    except ValueError as exc:
        raise ConfigError(f"oracle: {exc}") from None
    cfg["oracle"] = ocfg

    tol = raw.get("tolerances", {})
    _require(isinstance(tol, dict), "tolerances must be an object")
    unknown = set(tol) - set(DEFAULT_TOLERANCES)
    _require(not unknown, f"unknown tolerance keys: {sorted(unknown)}")
    cfg["tolerances"] = {k: _num(tol.get(k, v), f"tolerances.{k}")
                         for k, v in DEFAULT_TOLERANCES.items()}
    return cfg


def _normalize_observer(obs):
    _require(isinstance(obs, dict), "observer must be an object")
    kind = obs.get("type", "inertial")
    origin = _vec(obs.get("origin", [0.0, 0.0, 0.0, 0.0]), 4, "observer.origin")
    if kind == "inertial":
        _require(set(obs) <= {"type", "velocity", "origin"}, "bad inertial observer keys")
        return {"type": kind, "origin": origin,
                "velocity": _vec(obs.get("velocity", [0.0, 0.0, 0.0]), 3, "observer.velocity")}
    if kind == "rotating":
        _require(set(obs) <= {"type", "omega0", "axis", "origin"}, "bad rotating observer keys")
        axis = _vec(obs.get("axis", [0.0, 0.0, 1.0]), 3, "observer.axis")
        _require(any(axis), "observer.axis must be nonzero")
        return {"type": kind, "origin": origin, "axis": axis,
                "omega0": _num(obs.get("omega0", 1.0), "observer.omega0")}
    if kind == "corotating":
        _require(set(obs) <= {"type", "origin"}, "bad corotating observer keys")
        return {"type": kind, "origin": origin}
    raise ConfigError(f"unknown observer type {kind!r}")


def _normalize_test_field(tf):
    _require(isinstance(tf, dict), "test_field must be an object")
    try:
        kind = FieldKind(tf.get("kind"))
    except ValueError:
        raise ConfigError(f"unknown test_field kind {tf.get('kind')!r}") from None
    _require(set(tf) <= {"kind", "constant", "polynomial", "variance"},
             "test_field accepts kind, constant, polynomial, variance")
    out = {"kind": kind.value}
    if kind is FieldKind.SPACE_TENSOR2:
        try:
            out["variance"] = Variance(tf.get("variance", "mixed")).value
        except ValueError:
            raise ConfigError("test_field.variance must be contravariant, covariant or mixed") from None
    else:
        _require("variance" not in tf, "variance applies only to space_tensor2 test fields")
    _require(("constant" in tf) != ("polynomial" in tf),
             "test_field needs exactly one of 'constant' or 'polynomial'")
    if "constant" in tf:
        value = np.array(tf["constant"], dtype=object)
        _require(value.shape == VALUE_SHAPE[kind],
                 f"test_field.constant must have shape {VALUE_SHAPE[kind]}")
        for v in value.flat:
            _num(v, "test_field.constant")
        out["constant"] = np.array(value, dtype=float).tolist()
    else:
        poly = tf["polynomial"]
        _require(isinstance(poly, dict), "test_field.polynomial must be an object")
        _require(set(poly) <= {"degree", "seed", "scale", "length"},
                 "bad test_field.polynomial keys")
        degree = poly.get("degree", 3)
        pseed = poly.get("seed", 0)
        _require(isinstance(degree, int) and 0 <= degree <= 6, "polynomial degree must be 0..6")
        _require(isinstance(pseed, int), "polynomial seed must be an integer")
        out["polynomial"] = {"degree": degree, "seed": pseed,
                             "scale": _num(poly.get("scale", 1.0), "polynomial.scale"),
                             "length": _num(poly.get("length", 1.0), "polynomial.length")}
        _require(out["polynomial"]["length"] > 0, "polynomial.length must be positive")
    return out


def _normalize_points(points):
    if isinstance(points, list):
        _require(len(points) >= 1, "points must not be empty")
        return [_vec(p, 4, "points[i]") for p in points]
    _require(isinstance(points, dict), "points must be a list or an object")
    _require(set(points) <= {"random", "t", "q"}, "bad points keys")
    n = points.get("random")
    _require(isinstance(n, int) and n >= 1, "points.random must be a positive integer")
    t = _vec(points.get("t", [0.0, 2.0]), 2, "points.t")
    _require(t[0] <= t[1], "points.t must be an interval")
    q = _num(points.get("q", 2.0), "points.q")
    _require(q >= 0, "points.q must be non-negative")
    return {"random": n, "t": t, "q": q}


# --------------------------------------------------------------------------
# resolution


def canonical(cfg):
    return json.dumps(cfg, sort_keys=True, separators=(",", ":"))


def build_field(cfg):
    return catalog(cfg["field"]["name"], cfg["field"]["params"])


def build_test_field(cfg):
    tf = cfg["test_field"]
    variance = tf.get("variance")
    if "constant" in tf:
        return constant_field(tf["kind"], tf["constant"], variance=variance)
    p = tf["polynomial"]
    return polynomial_field(tf["kind"], seed=p["seed"], degree=p["degree"],
                            scale=p["scale"], variance=variance, length=p["length"])


def build_observer(cfg, u):
    o = cfg["observer"]
    if o["type"] == "inertial":
        return make_inertial(o["velocity"], o["origin"])
    if o["type"] == "rotating":
        return rotating_about(o["omega0"], o["axis"], o["origin"])
    return corotating_observer(u, o["origin"])


def resolve_points(cfg):
    pts = cfg["points"]
    if isinstance(pts, list):
        return np.array(pts, dtype=float)
    rng = np.random.default_rng(cfg["seed"])
    n = pts["random"]
    t = rng.uniform(pts["t"][0], pts["t"][1], size=n)
    q = rng.uniform(-pts["q"], pts["q"], size=(n, 3))
    return np.column_stack([t, q])


# --------------------------------------------------------------------------
# output


def fmt(x):
    return format(float(x), ".17g")


def write_csv(cfg, columns, rows, out):
    buf = io.StringIO()
    buf.write(f"# config: {canonical(cfg)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    text = buf.getvalue()
    if out is None:
        return text
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text


# --------------------------------------------------------------------------
# run


def _rel(obs, kind, value, x):
    return _REL_BY_KIND[FieldKind(kind)](obs, value, x).components


def run_scenario(cfg):
    """Evaluate derivatives at the scenario points.

    Returns ``(reports, rows)``; one row per (point, derivative) with the
    closed-form value, the oracle value (both in the observer's relative
    form) and their max-norm residual.
    """
    u = build_field(cfg)
    f = build_test_field(cfg)
    obs = build_observer(cfg, u)
    ocfg = OracleConfig(**cfg["oracle"])
    tol = cfg["tolerances"]
    four = as_four_field(f)
    is_space_vector = f.kind is FieldKind.SPACE_VECTOR
    if is_space_vector:
        # same components read as a covector: the flat of c
        flat_f = Field(FieldKind.SPACE_COVECTOR, f.evaluate, f.jacobian, name=f"flat[{f.name}]")
    rows = []
    residuals = {"material": [], "lie": [], "jaumann": []}
    timers = {k: 0.0 for k in residuals}
    for i, x in enumerate(resolve_points(cfg)):
        flows = probe_flows(u, x, ocfg)
        head = [i, *(float(v) for v in x)]

        start = time.perf_counter()
        closed = _rel(obs, f.kind, material_derivative(f, u, x, ocfg.fd_h), x)
        oracle = _rel(obs, f.kind, material_oracle(f, u, x, ocfg, flows), x)
        rows.append(_row(head, "material", closed, oracle, residuals["material"]))
        timers["material"] += time.perf_counter() - start

        start = time.perf_counter()
        closed = _rel(obs, four.kind, lie_derivative(f, u, x, ocfg.fd_h), x)
        oracle = _rel(obs, four.kind, lie_oracle(f, u, x, ocfg, flows), x)
        rows.append(_row(head, "lie", closed, oracle, residuals["lie"]))
        timers["lie"] += time.perf_counter() - start

        if is_space_vector:
            start = time.perf_counter()
            closed = _rel(obs, f.kind, jaumann_derivative(f, u, x, ocfg.fd_h), x)
            up = lie_oracle(f, u, x, ocfg, flows)[1:]
            low = lie_oracle(flat_f, u, x, ocfg, flows)[1:]
            oracle = _rel(obs, f.kind, 0.5 * (up + low), x)
            rows.append(_row(head, "jaumann", closed, oracle, residuals["jaumann"]))
            timers["jaumann"] += time.perf_counter() - start

    reports = []
    for key, tol_key in (("material", "material"), ("lie", "oracle"), ("jaumann", "jaumann")):
        if residuals[key]:
            reports.append(make_report(f"{cfg['name']}.{key}", residuals[key],
                                       tol[tol_key], timers[key]))
    return reports, rows


def _row(head, name, closed, oracle, sink):
    closed = np.ravel(closed)
    oracle = np.ravel(oracle)
    res = float(np.max(np.abs(closed - oracle)))
    sink.append(res)
    pad = [""] * (MAX_COMPONENTS - closed.size)
    return [*head, name, closed.size, *map(float, closed), *pad,
            *map(float, oracle), *pad, res]


# --------------------------------------------------------------------------
# tables


def emit_table(kind, cfg):
    """Rows (and column names) of one table kind for a scenario."""
    if kind not in TABLE_KINDS:
        raise ConfigError(f"unknown table kind {kind!r}; choose from {list(TABLE_KINDS)}")
    u = build_field(cfg)
    points = resolve_points(cfg)
    fd_h = cfg["oracle"]["fd_h"]
    if kind == "split_roundtrip":
        obs = build_observer(cfg, u)
        rows = []
        for i, x in enumerate(points):
            t, Q = obs.split(x)
            back = obs.unsplit(t, Q)
            dhp = obs.split_jacobian(back) @ obs.unsplit_jacobian(t, Q) - np.eye(4)
            rows.append([i, *map(float, x), *map(float, Q),
                         float(np.max(np.abs(back - x))), float(np.max(np.abs(dhp)))])
        return ROUNDTRIP_COLUMNS, rows

    f = build_test_field(cfg)
    if f.kind is not FieldKind.SPACE_VECTOR:
        raise ConfigError(f"table {kind!r} needs a space_vector test field")
    if kind == "convected_comparison":
        obs = build_observer(cfg, u)
        c_U = obs.relative(f)
        v_U = obs.relative_velocity(u)
        rows = []
        for i, x in enumerate(points):
            t, Q = obs.split(x)
            up = upper_convected_rel(v_U, c_U, t, Q, fd_h)
            low = lower_convected_rel(v_U, c_U, t, Q, fd_h)
            jau = jaumann_rel(v_U, c_U, t, Q, fd_h)
            res = float(np.max(np.abs(jau - 0.5 * (up + low))))
            rows.append([i, *map(float, x), *map(float, Q), *map(float, up),
                         *map(float, low), *map(float, jau), res])
        return CONVECTED_COLUMNS, rows

    # corotating: each point is the particle the observer rides
    rows = []
    for i, o in enumerate(points):
        times = o[0] + np.array([0.0, 0.5, 1.0])
        obs = corotating_observer(u, o)
        c_U = obs.relative(f)
        zero = np.zeros(3)
        res = jaumann_corotating_check(u, o, f, times, fd_h)
        for t, r in zip(times, res):
            d0c = central_time_derivative(lambda s: c_U(s, zero), t, fd_h)
            x = obs.unsplit(t, zero)
            jau = obs.rel_space_vector(jaumann_derivative(f, u, x, fd_h), x).components
            rows.append([i, float(o[0]), *map(float, o[1:]), float(t),
                         *map(float, d0c), *map(float, jau), float(r)])
    return COROTATING_COLUMNS, rows
