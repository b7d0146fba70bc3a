"""Scenario runners used by the command line.

Each runner takes validated params, a seed and the tolerance table and
returns (checks, table, summary).  ``checks`` is a list of Check records,
``table`` a header plus rows for the CSV output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import flat, sasaki, space_forms, sphere_flows
from .geometry import (
    geodesic_residual,
    integrate_curve,
    lie_derivative_metric,
    round_sphere,
    sphere_linear_field,
)

__all__ = ["Check", "Experiment", "EXPERIMENTS", "DEFAULT_TOLERANCES", "ParamError"]

DEFAULT_TOLERANCES = {
    "killing": 1e-8,
    "unit_length": 1e-10,
    "geodesic": 1e-5,
    "converse_geodesic": 1e-2,
    "pinch_threshold": 0.1,
    "cw_spread": 1e-9,
    "cw_cluster": 1e-9,
    "tanno_killing": 1e-5,
    "tanno_violation": 1e-2,
    "support": sphere_flows.SUPPORT_TOL,
    "flat_numeric": flat.NUMERIC_TOL,
}


class ParamError(ValueError):
    pass


@dataclass(frozen=True)
class Check:
    name: str
    value: object
    threshold: object
    passed: bool
    relation: str = "<"

    def as_dict(self) -> dict:
        return {"name": self.name, "value": _jsonable(self.value), "threshold": _jsonable(self.threshold),
                "relation": self.relation, "pass": bool(self.passed)}


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _lt(name, value, thr):
    return Check(name, float(value), thr, bool(value < thr), "<")


def _gt(name, value, thr):
    return Check(name, float(value), thr, bool(value > thr), ">")


def _eq(name, value, expected):
    return Check(name, value, expected, value == expected, "==")


@dataclass(frozen=True)
class Experiment:
    name: str
    params: dict  # key -> (type, default)
    run: object
    doc: str

    def validate(self, params: dict) -> dict:
        out = {}
        unknown = set(params) - set(self.params)
        if unknown:
            raise ParamError(f"{self.name}: unknown params {sorted(unknown)}")
        for key, (kind, default) in self.params.items():
            val = params.get(key, default)
            out[key] = _coerce(self.name, key, val, kind)
        return out


def _coerce(exp, key, val, kind):
    if val is None:
        return None
    try:
        if kind == "int":
            if isinstance(val, bool) or int(val) != val:
                raise ValueError
            return int(val)
        if kind == "float":
            return float(val)
        if kind == "ints":
            return [int(v) for v in (val if isinstance(val, list) else [val])]
        if kind == "floats":
            return [float(v) for v in (val if isinstance(val, list) else [val])]
        if kind == "str":
            if not isinstance(val, str):
                raise ValueError
            return val
        if kind == "any":
            return val
    except (TypeError, ValueError):
        pass
    raise ParamError(f"{exp}: param {key!r} must be of type {kind}, got {val!r}")


def _sphere_points(rng, n, count):
    X = rng.normal(size=(count, 2 * n))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


# runners


def run_sphere_flow(p, seed, tol, samples):
    n, q = p["n"], p["q"]
    count = samples or p["points"]
    m = sphere_flows.ConformalSphereMetric.for_q(n, q)
    V = m.unit_field
    rng = np.random.default_rng(seed)
    rows, kill, unit = [], 0.0, 0.0
    for x in _sphere_points(rng, n, count):
        pt = m.chart_point(x)
        L = np.abs(lie_derivative_metric(m.metric, V, pt)).max()
        u = abs(m.metric.inner(pt, V(pt), V(pt)) - 1.0)
        kill, unit = max(kill, L), max(unit, u)
        rows.append([*x.tolist(), float(L), float(u)])
    spec = sphere_flows.period_spectrum(m.action, samples=count, seed=seed)
    expected = {Fraction(1, q), Fraction(1, q + 1), Fraction(1)}
    axis0 = np.zeros(2 * n)
    axis0[0] = 1.0
    axis1 = np.zeros(2 * n)
    axis1[2] = 1.0
    big = sphere_flows.orbit_length_exact(m, _sphere_points(np.random.default_rng(seed + 1), n, 1)[0])
    small = sphere_flows.orbit_length_exact(m, axis1)
    checks = [
        _lt("killing_residual", kill, tol["killing"]),
        _lt("unit_length_error", unit, tol["unit_length"]),
        _eq("period_spectrum_turns", sorted(str(t) for t in spec.turns), sorted(str(t) for t in expected)),
        _eq("L_over_l", big / small, Fraction(q + 1)),
        _eq("axis_orbit_length_turns", sphere_flows.orbit_length_exact(m, axis0), Fraction(1)),
    ]
    if p["orbit_step"] is not None:
        x0 = m.chart_point(_sphere_points(np.random.default_rng(seed + 2), n, 1)[0])
        curve = integrate_curve(V, x0, p["orbit_time"], p["orbit_step"])
        checks.append(_lt("orbit_geodesic_residual", geodesic_residual(m.metric, curve), tol["geodesic"]))
    header = [*(f"x{i + 1}" for i in range(2 * n)), "killing_residual", "unit_length_error"]
    return checks, (header, rows), {"L_over_l": str(big / small), "spectrum_turns": [str(t) for t in spec.turns]}


def run_pinch_report(p, seed, tol, samples):
    count = samples or p["samples"]
    rows, devs = [], []
    for q in p["qs"]:
        r = sphere_flows.curvature_pinch_report(sphere_flows.ConformalSphereMetric.for_q(p["n"], q), count, seed)
        rows.append([q, r.min, r.max, r.mean, r.max_deviation])
        devs.append(r.max_deviation)
    checks = [Check("strictly_decreasing", devs, "decreasing", all(a > b for a, b in zip(devs, devs[1:])), "trend")]
    checks.append(_lt(f"max_deviation_q{p['qs'][-1]}", devs[-1], tol["pinch_threshold"]))
    return checks, (["q", "min", "max", "mean", "max_abs_dev"], rows), {}


def _group_from_params(p):
    if p["group"] is not None:
        try:
            return flat.get_group(p["group"])
        except KeyError as exc:
            raise ParamError(str(exc)) from exc
    gens = p["generators"]
    if not gens:
        raise ParamError("flat-classify needs params.group or params.generators")
    try:
        parsed = [flat.EuclideanIsometry(_exact_list(g["A"]), _exact_list(g["a"])) for g in gens]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParamError(f"bad generator list: {exc}") from exc
    return flat.FlatSpaceGroup("user", tuple(parsed))


def _exact_list(v):
    if isinstance(v, list):
        return [_exact_list(x) for x in v]
    if isinstance(v, str):
        return Fraction(v)
    return v


def run_flat_classify(p, seed, tol, samples):
    G = _group_from_params(p)
    inv = flat.invariant_vectors([g.A for g in G.generators])
    direction = p["direction"]
    if direction is None:
        direction = inv[:, 0].tolist() if inv.shape[1] else [1.0] + [0.0] * (G.dim - 1)
        direction = [Fraction(round(v)) if abs(v - round(v)) < 1e-12 else v for v in direction]
    else:
        direction = _exact_list(direction)
    res = flat.classify(G, direction, p["word_length"], p["translation_bound"])
    summary = {"group": G.name, "invariant_dimension": int(inv.shape[1]), **res.summary()}
    checks = [Check("classified", res.tag, "any", True, "info")]
    if p["expect"] is not None:
        checks.append(_eq("classification", res.tag, p["expect"]))
    checks.append(Check("search_complete", not res.partial, True, not res.partial, "=="))
    rows = [[G.name, res.tag, str(res.order) if res.order else "", " ".join(map(str, summary.get("b", []))),
             p["word_length"], p["translation_bound"], res.elements_searched]]
    header = ["group", "tag", "order", "b", "word_length", "translation_bound", "elements_searched"]
    return checks, (header, rows), summary


def run_cw_test(p, seed, tol, samples):
    count = samples or p["count"]
    rng = np.random.default_rng(seed)
    rows, disagree = [], 0
    for i in range(count):
        dim = p["dims"][i % len(p["dims"])]
        A = space_forms.random_block_rotation(rng, dim // 2)
        v = space_forms.cw_test(A, tol["cw_cluster"])
        lo, hi = space_forms.displacement_spread(A, p["points"], seed + i)
        agree = bool(v) == (hi - lo < tol["cw_spread"])
        disagree += not agree
        rows.append([i, dim, int(bool(v)), v.kind, lo, hi, hi - lo, int(agree)])
    checks = [_eq("disagreements", disagree, 0)]
    return checks, (["index", "dim", "cw", "kind", "min_disp", "max_disp", "spread", "agree"], rows), {}


def run_space_form_periods(p, seed, tol, samples):
    c = space_forms.cyclic_cw_group(p["n"], p["q"])
    count = samples or p["points"]
    axis = np.zeros(2 * p["n"])
    axis[0] = 1.0
    qa = space_forms.quotient_period(c, axis)
    rng = np.random.default_rng(seed)
    rows = [["axis", *axis.tolist(), str(qa.t), qa.gamma_index]]
    generic_ok = True
    for i, y in enumerate(_sphere_points(rng, p["n"], count)):
        r = space_forms.quotient_period(c, y)
        generic_ok &= r.t == 1 and r.gamma_is_identity
        rows.append([f"generic{i}", *y.tolist(), str(r.t), r.gamma_index])
    codim = space_forms.stratum_codimension(c.f, c.flow(Fraction(1, p["q"])))
    checks = [
        _eq("axis_period", qa.t, Fraction(1, p["q"])),
        Check("generic_period_is_1", generic_ok, True, generic_ok, "=="),
        _eq("singular_stratum_codimension", codim, 2),
        Check("group_all_cw", True, True, all(space_forms.cw_test(E) for E in c.group.elements), "=="),
    ]
    header = ["label", *(f"y{i + 1}" for i in range(2 * p["n"])), "period", "gamma_index"]
    return checks, (header, rows), {"group_order": c.group.order}


def run_tanno(p, seed, tol, samples):
    count = samples or p["samples"]
    if len(p["k"]) != len(p["u"]):
        raise ParamError("tanno: params k and u must have the same length")
    rows, checks = [], []
    for k, u in zip(p["k"], p["u"]):
        r = sasaki.tanno_residual(k, u, count, seed)
        rows.append([k, u, r])
        if abs(k * u * u - 1.0) < 1e-12:
            checks.append(_lt(f"tanno_k{k:g}_u{u:g}", r, tol["tanno_killing"]))
        else:
            checks.append(_gt(f"tanno_k{k:g}_u{u:g}", r, tol["tanno_violation"]))
    return checks, (["k", "u", "residual"], rows), {}


def run_killing_verify(p, seed, tol, samples):
    n = p["n"]
    count = samples or p["points"]
    if p["metric"] == "gq":
        m = sphere_flows.ConformalSphereMetric.for_q(n, p["q"])
        metric, V = m.metric, m.unit_field
    elif p["metric"] == "round":
        w = p["weights"] or [1] * n
        metric = round_sphere(2 * n - 1)
        V = sphere_linear_field(metric.atlas, sphere_flows.rotation_generator(w))
    else:
        raise ParamError("killing-verify: metric must be 'gq' or 'round'")
    rng = np.random.default_rng(seed)
    rows, worst = [], 0.0
    for x in _sphere_points(rng, n, count):
        pt = metric.atlas.from_ambient(x)
        L = float(np.abs(lie_derivative_metric(metric, V, pt)).max())
        worst = max(worst, L)
        rows.append([*x.tolist(), L])
    header = [*(f"x{i + 1}" for i in range(2 * n)), "lie_derivative_max"]
    return [_lt("killing_residual", worst, tol["killing"])], (header, rows), {}


EXPERIMENTS = {
    e.name: e
    for e in [
        Experiment("sphere-flow", {"n": ("int", 2), "q": ("int", 5), "points": ("int", 200),
                                   "orbit_step": ("float", None), "orbit_time": ("float", 2 * math.pi)},
                   run_sphere_flow, "Killing, unit-length, period and L/l checks on (S^{2n-1}, g^q)"),
        Experiment("pinch-report", {"n": ("int", 2), "qs": ("ints", [5, 10, 20, 40]), "samples": ("int", 500)},
                   run_pinch_report, "max |K - 1| on g^q for a list of q; trend and threshold"),
        Experiment("flat-classify", {"group": ("str", None), "generators": ("any", None), "direction": ("any", None),
                                     "expect": ("str", None), "word_length": ("int", flat.DEFAULT_WORD_LENGTH),
                                     "translation_bound": ("float", flat.DEFAULT_TRANSLATION_BOUND)},
                   run_flat_classify, "classify the parallel field along a direction on R^n / Gamma"),
        Experiment("cw-test", {"dims": ("ints", [4, 8]), "count": ("int", 200), "points": ("int", 200)},
                   run_cw_test, "eigenvalue test versus displacement spread on random block rotations"),
        Experiment("space-form-periods", {"n": ("int", 2), "q": ("int", 3), "points": ("int", 20)},
                   run_space_form_periods, "quotient periods for the cyclic Clifford-Wolf construction"),
        Experiment("tanno", {"k": ("floats", [1.0, 4.0, 1.0]), "u": ("floats", [1.0, 0.5, 2.0]), "samples": ("int", 200)},
                   run_tanno, "Killing residual of the geodesic flow field on T_u S^2"),
        Experiment("killing-verify", {"metric": ("str", "gq"), "n": ("int", 2), "q": ("int", 5),
                                      "weights": ("ints", None), "points": ("int", 200)},
                   run_killing_verify, "Lie derivative of a linear Killing field on a sphere metric"),
    ]
}
