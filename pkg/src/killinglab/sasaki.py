"""The Sasaki metric on tangent bundles and the geodesic flow field.

TM carries coordinates (x, v): base chart coordinates plus the components
of v in the coordinate frame.  A tangent vector (dx, dv) to TM splits into a
horizontal part xi = dx and a vertical part eta = dv + Gamma(dx, v) (the
connector of the Levi-Civita connection); the Sasaki metric is
g(xi, xi') + g(eta, eta').
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    ChartPoint,
    MetricField,
    TangentBundleAtlas,
    VectorField,
    as_point,
    christoffel,
    geodesic_spray,
    lie_derivative_metric,
    round_sphere,
)

__all__ = [
    "TangentBundlePoint",
    "BundleTangent",
    "connection_matrix",
    "sasaki_eval",
    "sasaki_metric",
    "horizontal_lift",
    "vertical_lift",
    "to_coordinates",
    "from_coordinates",
    "geodesic_flow_field",
    "geodesic_flow_vector_field",
    "SphereBundle",
    "tanno_residual",
]


@dataclass(frozen=True, eq=False)
class TangentBundlePoint:
    x: ChartPoint
    v: np.ndarray

    def __post_init__(self):
        x = as_point(self.x)
        v = np.asarray(self.v, dtype=float)
        if v.shape != (x.dim,):
            raise ValueError("fiber component count differs from base dimension")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", v)

    @classmethod
    def from_chart(cls, p: ChartPoint) -> "TangentBundlePoint":
        n = p.dim // 2
        return cls(ChartPoint(p.chart_id, p.coords[:n]), p.coords[n:])

    def chart_point(self) -> ChartPoint:
        return ChartPoint(self.x.chart_id, np.concatenate([self.x.coords, self.v]))


@dataclass(frozen=True, eq=False)
class BundleTangent:
    base: TangentBundlePoint
    xi: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        eta = np.asarray(self.eta, dtype=float)
        n = self.base.x.dim
        if xi.shape != (n,) or eta.shape != (n,):
            raise ValueError("horizontal/vertical parts must match the base dimension")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "eta", eta)


def connection_matrix(m: MetricField, p: TangentBundlePoint) -> np.ndarray:
    """A^k_i = Gamma^k_ij v^j, so that the connector is eta = dv + A dx."""
    return np.einsum("kij,j->ki", christoffel(m, p.x), p.v)


def sasaki_eval(m: MetricField, p: TangentBundlePoint, A: BundleTangent, B: BundleTangent) -> float:
    for T in (A, B):
        if T.xi.shape[0] != m.dim:
            raise ValueError("dimension mismatch")
    g = m(p.x)
    return float(A.xi @ g @ B.xi + A.eta @ g @ B.eta)


def horizontal_lift(m: MetricField, p: TangentBundlePoint, u) -> BundleTangent:
    return BundleTangent(p, np.asarray(u, dtype=float), np.zeros(m.dim))


def vertical_lift(m: MetricField, p: TangentBundlePoint, w) -> BundleTangent:
    return BundleTangent(p, np.zeros(m.dim), np.asarray(w, dtype=float))


def to_coordinates(m: MetricField, T: BundleTangent) -> np.ndarray:
    """(dx, dv) of a split tangent vector."""
    A = connection_matrix(m, T.base)
    return np.concatenate([T.xi, T.eta - A @ T.xi])


def from_coordinates(m: MetricField, p: TangentBundlePoint, dz) -> BundleTangent:
    dz = np.asarray(dz, dtype=float)
    n = m.dim
    A = connection_matrix(m, p)
    return BundleTangent(p, dz[:n], dz[n:] + A @ dz[:n])


def sasaki_metric(m: MetricField) -> MetricField:
    """g^S as a metric on TM coordinates: [[g + A^T g A, A^T g], [g A, g]]."""
    n = m.dim
    bundle = TangentBundleAtlas(m.atlas) if m.atlas is not None else None

    def ev(z):
        p = TangentBundlePoint.from_chart(z)
        g = m(p.x)
        A = connection_matrix(m, p)
        gA = g @ A
        out = np.empty((2 * n, 2 * n))
        out[:n, :n] = g + A.T @ gA
        out[:n, n:] = gA.T
        out[n:, :n] = gA
        out[n:, n:] = g
        return 0.5 * (out + out.T)

    return MetricField(2 * n, ev, atlas=bundle, name=f"Sasaki({m.name})")


def geodesic_flow_field(m: MetricField, p: TangentBundlePoint) -> BundleTangent:
    """F(x, v): the horizontal lift of v itself."""
    return horizontal_lift(m, p, p.v)


def geodesic_flow_vector_field(m: MetricField) -> VectorField:
    """F in TM coordinates: (v, -Gamma(v, v))."""
    return geodesic_spray(m)


# the sphere bundle T_u S^2


class SphereBundle:
    """T_u S^2 over the sphere of curvature k, in coordinates (y_1, y_2, theta).

    The base is the round sphere of radius R = 1 / sqrt(k) in stereographic
    charts with metric c(y) delta, c = 4 R^2 / (1 + |y|^2)^2.  The point
    (y, theta) is the vector v = u (cos theta, sin theta) / sqrt(c(y)).
    """

    def __init__(self, k: float, u: float):
        if not (k > 0 and u > 0):
            raise ValueError("k and u must be positive")
        self.k, self.u = float(k), float(u)
        self.R = 1.0 / math.sqrt(self.k)
        self.base = round_sphere(2, self.R)
        self.sasaki = sasaki_metric(self.base)
        self.flow = geodesic_flow_vector_field(self.base)

    def embed(self, w: ChartPoint) -> ChartPoint:
        y1, y2, th = w.coords
        s = self.u * (1.0 + y1 * y1 + y2 * y2) / (2.0 * self.R)
        return ChartPoint(w.chart_id, np.array([y1, y2, s * math.cos(th), s * math.sin(th)]))

    def embed_jacobian(self, w: ChartPoint) -> np.ndarray:
        y1, y2, th = w.coords
        s = self.u * (1.0 + y1 * y1 + y2 * y2) / (2.0 * self.R)
        ds = self.u * np.array([y1, y2]) / self.R
        c, sn = math.cos(th), math.sin(th)
        J = np.zeros((4, 3))
        J[0, 0] = J[1, 1] = 1.0
        J[2, :2] = c * ds
        J[3, :2] = sn * ds
        J[2, 2] = -s * sn
        J[3, 2] = s * c
        return J

    def induced_metric(self) -> MetricField:
        def ev(w):
            J = self.embed_jacobian(w)
            return J.T @ self.sasaki(self.embed(w)) @ J

        return MetricField(3, ev, name=f"T_{self.u:g}S^2(k={self.k:g})")

    def flow_field(self) -> VectorField:
        """F pulled back to (y, theta); F is tangent to T_u S^2, checked by the solve residual."""

        def ev(w):
            J = self.embed_jacobian(w)
            F = self.flow(self.embed(w))
            f, *_ = np.linalg.lstsq(J, F, rcond=None)
            if np.abs(J @ f - F).max() > 1e-9 * max(1.0, np.abs(F).max()):
                raise ArithmeticError("geodesic flow field is not tangent to the sphere bundle")
            return f

        return VectorField(ev, name="F|T_uS^2")

    def random_point(self, rng) -> ChartPoint:
        x = rng.normal(size=3)
        y = self.base.atlas.from_ambient(x)
        return ChartPoint(y.chart_id, np.array([*y.coords, rng.uniform(0.0, 2.0 * math.pi)]))


def tanno_residual(k: float, u: float, samples: int = 200, seed: int = 0) -> float:
    """max over seeded points of |L_F h|, h the metric induced by g^S on T_u S^2.

    The norm is the h-invariant one, sqrt(tr(h^-1 L h^-1 L)); derivatives
    along the bundle coordinates are central differences.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    bundle = SphereBundle(k, u)
    h = bundle.induced_metric()
    F = bundle.flow_field()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        w = bundle.random_point(rng)
        L = lie_derivative_metric(h, F, w)
        hinv = np.linalg.inv(h(w))
        M = hinv @ L
        worst = max(worst, math.sqrt(max(float(np.trace(M @ M)), 0.0)))
    return worst
