"""Chart points, tangent vectors and the atlases used throughout the package.

Two atlases cover everything we need: a single global chart on R^n and the
pair of stereographic charts on a round sphere S^m (projection from the
north pole x_{m+1} = +1 and from the south pole x_{m+1} = -1).  A third,
:class:`TangentBundleAtlas`, lifts any base atlas to coordinates (x, v) on TM.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "ChartPoint",
    "TangentVector",
    "EuclideanAtlas",
    "SphereAtlas",
    "TangentBundleAtlas",
    "as_point",
]

NORTH = 0
SOUTH = 1


class DomainError(ValueError):
    """A point lies outside the domain of the chart it claims to belong to."""


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ChartPoint:
    chart_id: int
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _frozen(self.coords))

    @property
    def dim(self) -> int:
        return self.coords.shape[0]

    def __repr__(self):
        return f"ChartPoint({self.chart_id}, {self.coords.tolist()})"


@dataclass(frozen=True, eq=False)
class TangentVector:
    base: ChartPoint
    components: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "components", _frozen(self.components))
        if self.components.shape != self.base.coords.shape:
            raise ValueError(
                f"tangent vector of length {self.components.shape[0]} "
                f"at a point of dimension {self.base.dim}"
            )


def as_point(x, chart_id: int = 0) -> ChartPoint:
    if isinstance(x, ChartPoint):
        return x
    return ChartPoint(chart_id, np.asarray(x, dtype=float))


class EuclideanAtlas:
    """The identity chart on R^n, optionally restricted to a box."""

    def __init__(self, dim: int, bound: float = np.inf):
        self.dim = dim
        self.bound = bound
        self.chart_ids = (0,)

    def in_domain(self, p: ChartPoint) -> bool:
        return p.chart_id == 0 and bool(np.all(np.isfinite(p.coords))) and bool(
            np.all(np.abs(p.coords) <= self.bound)
        )

    def preferred(self, p: ChartPoint) -> ChartPoint:
        return p

    def transition(self, p: ChartPoint, target: int) -> ChartPoint:
        if target != 0:
            raise DomainError(f"unknown chart {target}")
        return p

    def push(self, p: ChartPoint, v: np.ndarray, target: int) -> np.ndarray:
        return np.asarray(v, dtype=float)

    def transition_jacobian(self, p: ChartPoint, target: int):
        return np.eye(self.dim), np.zeros((self.dim, self.dim, self.dim))


class SphereAtlas:
    """Stereographic atlas of the sphere S^m of the given radius.

    Chart coordinates are dimensionless: the chart map sends the ambient point
    radius * x (with |x| = 1) to x_{1..m} / (1 - eps * x_{m+1}), eps = +1 for
    the north chart and -1 for the south chart.  The two charts are related
    by the inversion y -> y / |y|^2.  Integrators hand a point to the other
    chart once |y| exceeds ``handoff``; ``domain_radius`` is the hard limit
    past which a point counts as outside the chart.
    """

    def __init__(self, m: int, radius: float = 1.0, handoff: float = 2.0, domain_radius: float = 3.0):
        self.dim = m
        self.radius = float(radius)
        self.handoff = handoff
        self.domain_radius = domain_radius
        self.chart_ids = (NORTH, SOUTH)

    @staticmethod
    def _eps(chart_id: int) -> float:
        if chart_id == NORTH:
            return 1.0
        if chart_id == SOUTH:
            return -1.0
        raise DomainError(f"unknown chart {chart_id}")

    def in_domain(self, p: ChartPoint) -> bool:
        if p.chart_id not in self.chart_ids:
            return False
        r = float(np.linalg.norm(p.coords))
        return np.isfinite(r) and r <= self.domain_radius

    def check(self, p: ChartPoint) -> None:
        if not self.in_domain(p):
            raise DomainError(f"{p!r} outside the stereographic chart domain")

    def preferred(self, p: ChartPoint) -> ChartPoint:
        if np.linalg.norm(p.coords) > self.handoff:
            return self.transition(p, 1 - p.chart_id)
        return p

    def transition(self, p: ChartPoint, target: int) -> ChartPoint:
        self._eps(target)
        if target == p.chart_id:
            return p
        s = float(p.coords @ p.coords)
        if s == 0.0:
            raise DomainError("the chart origin has no image in the opposite chart")
        return ChartPoint(target, p.coords / s)

    def transition_jacobian(self, p: ChartPoint, target: int):
        """First and second derivatives of the transition map at p.

        Returns (J, H) with J[i, j] = d y'_i / d y_j and
        H[i, j, k] = d^2 y'_i / d y_j d y_k.
        """
        m = self.dim
        if target == p.chart_id:
            return np.eye(m), np.zeros((m, m, m))
        y = p.coords
        s = float(y @ y)
        eye = np.eye(m)
        J = eye / s - 2.0 * np.outer(y, y) / s**2
        # y'_i = y_i / s
        H = (
            -2.0 * (np.einsum("ij,k->ijk", eye, y) + np.einsum("ik,j->ijk", eye, y)) / s**2
            - 2.0 * np.einsum("jk,i->ijk", eye, y) / s**2
            + 8.0 * np.einsum("i,j,k->ijk", y, y, y) / s**3
        )
        return J, H

    def push(self, p: ChartPoint, v: np.ndarray, target: int) -> np.ndarray:
        J, _ = self.transition_jacobian(p, target)
        return J @ np.asarray(v, dtype=float)

    # ambient embedding (unit sphere; multiply by radius for the true point)

    def to_ambient(self, p: ChartPoint) -> np.ndarray:
        eps = self._eps(p.chart_id)
        y = p.coords
        s = float(y @ y)
        return np.append(2.0 * y, eps * (s - 1.0)) / (1.0 + s)

    def ambient_jacobian(self, p: ChartPoint) -> np.ndarray:
        """d(to_ambient)/dy as an (m+1) x m matrix."""
        eps = self._eps(p.chart_id)
        y = p.coords
        D = 1.0 + float(y @ y)
        top = 2.0 * np.eye(self.dim) / D - 4.0 * np.outer(y, y) / D**2
        bottom = eps * 4.0 * y / D**2
        return np.vstack([top, bottom])

    def best_chart(self, x: np.ndarray) -> int:
        return NORTH if x[-1] <= 0.0 else SOUTH

    def from_ambient(self, x, chart_id: int | None = None) -> ChartPoint:
        x = np.asarray(x, dtype=float)
        x = x / np.linalg.norm(x)
        if chart_id is None:
            chart_id = self.best_chart(x)
        eps = self._eps(chart_id)
        denom = 1.0 - eps * x[-1]
        if denom <= 0.0:
            raise DomainError("the projection pole has no chart coordinates")
        return ChartPoint(chart_id, x[:-1] / denom)

    def chart_differential(self, x: np.ndarray, u: np.ndarray, chart_id: int) -> np.ndarray:
        """Push an ambient tangent vector u at the unit point x into chart coordinates."""
        eps = self._eps(chart_id)
        d = 1.0 - eps * x[-1]
        return u[:-1] / d + eps * x[:-1] * u[-1] / d**2

    def chart_second_differential(self, x, u, w, chart_id: int) -> np.ndarray:
        eps = self._eps(chart_id)
        d = 1.0 - eps * x[-1]
        return eps * (u[:-1] * w[-1] + w[:-1] * u[-1]) / d**2 + 2.0 * x[:-1] * u[-1] * w[-1] / d**3


class TangentBundleAtlas:
    """Coordinates (x, v) on TM induced by a base atlas.

    A chart of TM has the same id as the base chart; v holds the components
    of the tangent vector in the coordinate frame of that chart.
    """

    def __init__(self, base):
        self.base = base
        self.dim = 2 * base.dim
        self.chart_ids = base.chart_ids

    def split(self, p: ChartPoint):
        n = self.base.dim
        return ChartPoint(p.chart_id, p.coords[:n]), p.coords[n:]

    def in_domain(self, p: ChartPoint) -> bool:
        x, v = self.split(p)
        return self.base.in_domain(x) and bool(np.all(np.isfinite(v)))

    def preferred(self, p: ChartPoint) -> ChartPoint:
        x, _ = self.split(p)
        q = self.base.preferred(x)
        if q.chart_id != p.chart_id:
            return self.transition(p, q.chart_id)
        return p

    def transition(self, p: ChartPoint, target: int) -> ChartPoint:
        if target == p.chart_id:
            return p
        x, v = self.split(p)
        x2 = self.base.transition(x, target)
        v2 = self.base.push(x, v, target)
        return ChartPoint(target, np.concatenate([x2.coords, v2]))

    def push(self, p: ChartPoint, dv: np.ndarray, target: int) -> np.ndarray:
        if target == p.chart_id:
            return np.asarray(dv, dtype=float)
        n = self.base.dim
        x, v = self.split(p)
        J, H = self.base.transition_jacobian(x, target)
        dx, dw = dv[:n], dv[n:]
        return np.concatenate([J @ dx, np.einsum("ijk,j,k->i", H, dx, v) + J @ dw])
