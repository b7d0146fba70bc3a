"""Fixed-step RK4 integration with chart handoff, and residuals along sampled curves."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .charts import ChartPoint, DomainError, TangentBundleAtlas, as_point
from .fields import VectorField
from .metric import MetricField, christoffel, christoffel_derivative, riemann

__all__ = [
    "IntegrationError",
    "Curve",
    "integrate_curve",
    "geodesic_spray",
    "integrate_geodesic",
    "geodesic_residual",
    "jacobi_residual",
    "h_second_derivative_identity",
]


class IntegrationError(RuntimeError):
    def __init__(self, message: str, last_sample: ChartPoint | None = None):
        super().__init__(message)
        self.last_sample = last_sample


@dataclass(frozen=True)
class Curve:
    times: np.ndarray
    points: list[ChartPoint]
    step: float
    atlas: object = field(default=None, repr=False)

    def __len__(self):
        return len(self.points)

    @property
    def end(self) -> ChartPoint:
        return self.points[-1]


def _rk4_step(f, p: ChartPoint, h: float) -> ChartPoint:
    c = p.chart_id
    y = p.coords
    k1 = f(p)
    k2 = f(ChartPoint(c, y + 0.5 * h * k1))
    k3 = f(ChartPoint(c, y + 0.5 * h * k2))
    k4 = f(ChartPoint(c, y + h * k3))
    return ChartPoint(c, y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))


def integrate_curve(field: VectorField, x0, t_end: float, step: float, atlas=None) -> Curve:
    """Classical RK4 with a uniform step h = t_end / ceil(t_end / step).

    After every step the point is handed to the atlas' preferred chart; a
    step landing outside every chart raises IntegrationError carrying the
    last valid sample.
    """
    if not step > 0.0:
        raise ValueError("step must be positive")
    if t_end < 0.0:
        raise ValueError("t_end must be nonnegative")
    atlas = atlas if atlas is not None else field.atlas
    p = as_point(x0)
    nsteps = max(int(np.ceil(t_end / step - 1e-9)), 1) if t_end > 0 else 0
    h = t_end / nsteps if nsteps else step
    points = [p]
    for _ in range(nsteps):
        try:
            q = _rk4_step(field, p, h)
        except DomainError as exc:
            raise IntegrationError(str(exc), p) from exc
        if atlas is not None:
            if not atlas.in_domain(q):
                raise IntegrationError(f"trajectory left every chart after {p!r}", p)
            q = atlas.preferred(q)
        elif not np.all(np.isfinite(q.coords)):
            raise IntegrationError("trajectory diverged", p)
        points.append(q)
        p = q
    return Curve(np.arange(nsteps + 1) * h, points, h, atlas)


def geodesic_spray(m: MetricField) -> VectorField:
    """The first-order geodesic system on TM coordinates (x, x')."""
    n = m.dim
    bundle = TangentBundleAtlas(m.atlas) if m.atlas is not None else None

    def ev(p):
        x = ChartPoint(p.chart_id, p.coords[:n])
        v = p.coords[n:]
        gam = christoffel(m, x)
        return np.concatenate([v, -np.einsum("kij,i,j->k", gam, v, v)])

    return VectorField(ev, atlas=bundle, name=f"spray({m.name})")


def integrate_geodesic(m: MetricField, x0, v0, t_end: float, step: float) -> Curve:
    """Geodesic with initial point x0 and velocity v0, projected back to M."""
    x0 = as_point(x0)
    z0 = ChartPoint(x0.chart_id, np.concatenate([x0.coords, np.asarray(v0, dtype=float)]))
    spray = geodesic_spray(m)
    lifted = integrate_curve(spray, z0, t_end, step, spray.atlas)
    n = m.dim
    pts = [ChartPoint(z.chart_id, z.coords[:n]) for z in lifted.points]
    return Curve(lifted.times, pts, lifted.step, m.atlas)


# Central difference weights on offsets -2..2 (fourth order) and -1..1.
_STENCILS = {
    5: (
        (-2, -1, 0, 1, 2),
        np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0,
        np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0,
    ),
    3: ((-1, 0, 1), np.array([-0.5, 0.0, 0.5]), np.array([1.0, -2.0, 1.0])),
}


def _stencil(npoints: int):
    if npoints < 3:
        raise ValueError("need at least 3 samples")
    return _STENCILS[5] if npoints >= 5 else _STENCILS[3]


def _window(points, i: int, atlas, offsets) -> list[ChartPoint]:
    center = points[i]
    out = []
    for o in offsets:
        q = points[i + o]
        if q.chart_id != center.chart_id:
            q = atlas.transition(q, center.chart_id)
        out.append(q)
    return out


def _derivatives(curve: Curve, atlas):
    """First and second divided differences of the coordinates at every interior sample."""
    points, h = curve.points, curve.step
    atlas = atlas if atlas is not None else curve.atlas
    offsets, w1, w2 = _stencil(len(points))
    r = offsets[-1]
    for i in range(r, len(points) - r):
        win = _window(points, i, atlas, offsets)
        Y = np.array([q.coords for q in win])
        yield i, points[i], w1 @ Y / h, w2 @ Y / h**2, win


def geodesic_residual(m: MetricField, curve: Curve, per_sample: bool = False):
    """max over interior samples of |nabla_{c'} c'|_g by divided differences."""
    if len(curve) < 3:
        raise ValueError("geodesic_residual needs at least 3 samples")
    res = []
    for _, p, d1, d2, _ in _derivatives(curve, m.atlas):
        acc = d2 + np.einsum("kij,i,j->k", christoffel(m, p), d1, d1)
        res.append(m.norm(p, acc))
    res = np.array(res)
    return res if per_sample else float(res.max())


def _jacobi_terms(m: MetricField, X: VectorField, curve: Curve):
    h = curve.step
    atlas = m.atlas if m.atlas is not None else curve.atlas
    _, w1, w2 = _stencil(len(curve))
    for i, p, tau, tau2, win in _derivatives(curve, atlas):
        J = np.array([X(q) for q in win])
        J0 = X(p)
        J1 = w1 @ J / h
        J2 = w2 @ J / h**2
        gam = christoffel(m, p)
        dgam = christoffel_derivative(m, p)
        G = lambda a, b: np.einsum("kij,i,j->k", gam, a, b)
        nabla_J = J1 + G(tau, J0)
        nabla2_J = (
            J2
            + np.einsum("mkij,m,i,j->k", dgam, tau, tau, J0)
            + G(tau2, J0)
            + G(tau, J1)
            + G(tau, nabla_J)
        )
        R = riemann(m, p)
        RJtt = np.einsum("lkij,k,i,j->l", R, tau, J0, tau)
        yield i, p, J0, nabla_J, nabla2_J, RJtt


def jacobi_residual(m: MetricField, X: VectorField, curve: Curve) -> float:
    """max |nabla_tau^2 X + R(X, tau) tau|_g along the sampled geodesic."""
    worst = 0.0
    for _, p, _, _, n2, RJtt in _jacobi_terms(m, X, curve):
        worst = max(worst, m.norm(p, n2 + RJtt))
    return worst


def h_second_derivative_identity(m: MetricField, X: VectorField, curve: Curve):
    """Both sides of h'' = g(nabla_tau X, nabla_tau X) - g(R(X, tau) tau, X), h = g(X, X) / 2.

    The left side is a second divided difference of h over the samples; the
    right side is evaluated pointwise.  Arrays cover the interior samples.
    """
    h = curve.step
    offsets, _, w2 = _stencil(len(curve))
    hvals = np.array([0.5 * m.inner(p, X(p), X(p)) for p in curve.points])
    lhs, rhs = [], []
    for i, p, J0, nJ, _, RJtt in _jacobi_terms(m, X, curve):
        lhs.append(w2 @ hvals[[i + o for o in offsets]] / h**2)
        g = m(p)
        rhs.append(nJ @ g @ nJ - RJtt @ g @ J0)
    return np.array(lhs), np.array(rhs)
