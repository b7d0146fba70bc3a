"""Metrics on spheres in stereographic charts.

All of them are conformally flat in the chart, g = c(y) * delta, with the
factor written out together with its exact gradient and Hessian.
"""

from __future__ import annotations

import numpy as np

from .charts import ChartPoint, SphereAtlas
from .metric import MetricField, ScalarField, conformally_flat_metric

__all__ = [
    "round_sphere",
    "two_class_denominator",
    "two_class_conformal_sphere",
    "two_class_log_ratio",
]


def _round_factor(m: int, radius: float) -> ScalarField:
    C = 4.0 * radius**2

    def ev(p):
        y = p.coords
        return C / (1.0 + y @ y) ** 2

    def grad(p):
        y = p.coords
        D = 1.0 + y @ y
        return -4.0 * C * y / D**3

    def hess(p):
        y = p.coords
        D = 1.0 + y @ y
        return -4.0 * C * np.eye(m) / D**3 + 24.0 * C * np.outer(y, y) / D**4

    return ScalarField(ev, grad, hess)


def round_sphere(m: int, radius: float = 1.0) -> MetricField:
    """The sphere S^m of the given radius (curvature 1 / radius^2)."""
    atlas = SphereAtlas(m, radius)
    return conformally_flat_metric(m, _round_factor(m, radius), atlas, name=f"S^{m}(r={radius:g})")


def two_class_denominator(p: ChartPoint, a: float, b: float):
    """Q, dQ, d2Q with Q = b^2 (1+|y|^2)^2 + 4 (a^2 - b^2)(y_1^2 + y_2^2).

    On the unit sphere, a^2 |z_1|^2 + b^2 (|z_2|^2 + ... + |z_n|^2) equals
    Q / (1 + |y|^2)^2 in either stereographic chart.
    """
    y = p.coords
    m = y.shape[0]
    D = 1.0 + y @ y
    P = np.zeros((m, m))
    P[0, 0] = P[1, 1] = 1.0
    k = a * a - b * b
    Q = b * b * D * D + 4.0 * k * (y[0] ** 2 + y[1] ** 2)
    dQ = 4.0 * b * b * D * y + 8.0 * k * (P @ y)
    d2Q = 4.0 * b * b * (D * np.eye(m) + 2.0 * np.outer(y, y)) + 8.0 * k * P
    return Q, dQ, d2Q


def two_class_conformal_sphere(n: int, a: float, b: float, scale: float) -> MetricField:
    """can / f on S^{2n-1}, f = (a^2 |z_1|^2 + b^2 (|z_2|^2 + ...)) / scale^2.

    This is the metric that makes the field of the flow with angular speeds
    (a, b, ..., b), divided by ``scale``, a unit Killing field.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    m = 2 * n - 1
    C = 4.0 * scale * scale

    def ev(p):
        return C / two_class_denominator(p, a, b)[0]

    def grad(p):
        Q, dQ, _ = two_class_denominator(p, a, b)
        return -C * dQ / Q**2

    def hess(p):
        Q, dQ, d2Q = two_class_denominator(p, a, b)
        return -C * d2Q / Q**2 + 2.0 * C * np.outer(dQ, dQ) / Q**3

    atlas = SphereAtlas(m)
    return conformally_flat_metric(m, ScalarField(ev, grad, hess), atlas, name=f"conformal S^{m}({a:g},{b:g})/{scale:g}")


def two_class_log_ratio(n: int, a: float, b: float, scale: float) -> ScalarField:
    """psi = ln(theta) where two_class_conformal_sphere = theta * round_sphere."""
    m = 2 * n - 1

    def ev(p):
        y = p.coords
        Q = two_class_denominator(p, a, b)[0]
        return 2.0 * np.log(scale) + 2.0 * np.log1p(y @ y) - np.log(Q)

    def grad(p):
        y = p.coords
        Q, dQ, _ = two_class_denominator(p, a, b)
        return 4.0 * y / (1.0 + y @ y) - dQ / Q

    def hess(p):
        y = p.coords
        D = 1.0 + y @ y
        Q, dQ, d2Q = two_class_denominator(p, a, b)
        return 4.0 * np.eye(m) / D - 8.0 * np.outer(y, y) / D**2 - d2Q / Q + np.outer(dQ, dQ) / Q**2

    return ScalarField(ev, grad, hess)
