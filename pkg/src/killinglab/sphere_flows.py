"""Weighted circle actions on odd spheres and the conformal metrics g^q.

The circle acts on S^{2n-1} in C^n by s(z) = (s^{q_1} z_1, ..., s^{q_n} z_n).
Ambient points are real vectors x in R^{2n} with z_k = x_{2k-1} + i x_{2k}.
For weights (q, q+1, ..., q+1) the metric g^q = can / f^q with
f^q = |V|^2 / q^2 makes V / q a unit Killing field.

Periods are reported exactly as Fractions of a full turn 2 pi wherever the
weights are integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from itertools import combinations

import numpy as np

from .exact import Irrational, PiMonomial, to_fraction
from .geometry import (
    ChartPoint,
    DegeneratePlaneError,
    MetricField,
    VectorField,
    conformal_sectional_curvature,
    round_sphere,
    scalar_jet,
    sectional_curvature,
    sphere_linear_field,
    two_class_conformal_sphere,
    two_class_log_ratio,
)

__all__ = [
    "SUPPORT_TOL",
    "ProjectionError",
    "UndecidableError",
    "WeightedCircleAction",
    "TwoWeightFlow",
    "ConformalSphereMetric",
    "PeriodEntry",
    "PeriodSpectrum",
    "BlockRotationFlow",
    "FixedPointSet",
    "OrbitClosure",
    "PinchReport",
    "rotation_generator",
    "killing_field_V",
    "f_q_eval",
    "as_ambient",
    "support",
    "point_period",
    "point_period_exact",
    "orbit_length_gq",
    "orbit_length_exact",
    "fixed_point_set",
    "finite_period_components",
    "period_spectrum",
    "has_nonclosed_orbit",
    "curvature_pinch_report",
]

SUPPORT_TOL = 1e-12
SPHERE_TOL = 1e-12


class ProjectionError(ValueError):
    """Input point is not on the unit sphere."""


class UndecidableError(ValueError):
    pass


def as_ambient(z) -> np.ndarray:
    """Real ambient vector; complex input (z_1, ..., z_n) is interleaved as (Re z_1, Im z_1, ...)."""
    z = np.asarray(z)
    if np.iscomplexobj(z):
        out = np.empty(2 * z.shape[0])
        out[0::2], out[1::2] = z.real, z.imag
        return out
    return z.astype(float)


def _on_sphere(x, tol: float = SPHERE_TOL) -> np.ndarray:
    x = as_ambient(x)
    r = np.linalg.norm(x)
    if abs(r - 1.0) > tol:
        raise ProjectionError(f"|x| = {r!r} is not 1 within {tol}")
    return x


def rotation_generator(speeds) -> np.ndarray:
    """Block-diagonal skew matrix with blocks speed * [[0, -1], [1, 0]] (multiplication by i*speed)."""
    speeds = [float(s) for s in speeds]
    L = np.zeros((2 * len(speeds), 2 * len(speeds)))
    for j, s in enumerate(speeds):
        L[2 * j, 2 * j + 1] = -s
        L[2 * j + 1, 2 * j] = s
    return L


@dataclass(frozen=True)
class WeightedCircleAction:
    weights: tuple

    def __post_init__(self):
        w = tuple(int(q) for q in self.weights)
        if len(w) < 2:
            raise ValueError("need at least two weights (S^{2n-1} with n >= 2)")
        if any(q < 1 for q in w):
            raise ValueError(f"weights must be positive integers, got {w}")
        if reduce(math.gcd, w) != 1:
            raise ValueError(f"weights {w} have a common divisor")
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def generator(self) -> np.ndarray:
        return rotation_generator(self.weights)

    def act(self, t: float, x) -> np.ndarray:
        """The point e^{it} . x."""
        x = np.asarray(x, dtype=float).copy()
        out = np.empty_like(x)
        for j, q in enumerate(self.weights):
            c, s = math.cos(q * t), math.sin(q * t)
            a, b = x[2 * j], x[2 * j + 1]
            out[2 * j] = c * a - s * b
            out[2 * j + 1] = s * a + c * b
        return out


@dataclass(frozen=True)
class TwoWeightFlow:
    """mu(s, z) = (e^{is} z_1, e^{iqs} z_2, ..., e^{iqs} z_n).

    ``q`` is a Fraction/int (rational) or an Irrational token; a bare float
    carries no rationality information.
    """

    n: int
    q: object

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need n >= 2")
        if not float(self.q) > 0:
            raise ValueError("q must be positive")

    @property
    def speeds(self) -> tuple:
        return (1.0,) + (float(self.q),) * (self.n - 1)

    @property
    def generator(self) -> np.ndarray:
        return rotation_generator(self.speeds)


@dataclass(frozen=True)
class ConformalSphereMetric:
    """can / f on S^{2n-1} with f = (a^2 |z_1|^2 + b^2 (|z_2|^2 + ... + |z_n|^2)) / scale^2.

    ``for_q(n, q)`` gives g^q (a = q, b = q + 1, scale = q); ``round(n)`` the
    canonical metric.  ``unit_field`` is the flow field with speeds
    (a, b, ..., b) / scale, which has unit length in this metric.
    """

    n: int
    a: float
    b: float
    scale: float
    q: int | None = None

    @classmethod
    def for_q(cls, n: int, q: int) -> "ConformalSphereMetric":
        q = int(q)
        if q < 2:
            raise ValueError("g^q needs q >= 2")
        return cls(n, float(q), float(q + 1), float(q), q)

    @classmethod
    def round(cls, n: int) -> "ConformalSphereMetric":
        return cls(n, 1.0, 1.0, 1.0)

    @classmethod
    def for_two_weight(cls, flow: TwoWeightFlow) -> "ConformalSphereMetric":
        return cls(flow.n, 1.0, float(flow.q), 1.0)

    @cached_property
    def metric(self) -> MetricField:
        return two_class_conformal_sphere(self.n, self.a, self.b, self.scale)

    @cached_property
    def base(self) -> MetricField:
        return round_sphere(2 * self.n - 1)

    @cached_property
    def log_factor(self):
        return two_class_log_ratio(self.n, self.a, self.b, self.scale)

    @cached_property
    def unit_field(self) -> VectorField:
        speeds = (self.a,) + (self.b,) * (self.n - 1)
        L = rotation_generator(speeds) / self.scale
        return sphere_linear_field(self.metric.atlas, L, name="unit Killing field")

    @property
    def action(self) -> WeightedCircleAction:
        if self.q is None:
            raise ValueError("only g^q metrics carry an integer circle action")
        return WeightedCircleAction((self.q,) + (self.q + 1,) * (self.n - 1))

    @property
    def atlas(self):
        return self.metric.atlas

    def chart_point(self, x) -> ChartPoint:
        return self.atlas.from_ambient(x)

    def length_function(self, x) -> float:
        x = np.asarray(x, dtype=float)
        r1 = x[0] ** 2 + x[1] ** 2
        return (self.a**2 * r1 + self.b**2 * (float(x @ x) - r1)) / self.scale**2


def killing_field_V(a: WeightedCircleAction, x) -> np.ndarray:
    """Ambient velocity of the action at x (derivative at the identity)."""
    x = _on_sphere(x)
    if x.shape[0] != 2 * a.n:
        raise ProjectionError(f"point in R^{x.shape[0]} for an action on S^{2 * a.n - 1}")
    return a.generator @ x


def f_q_eval(m: ConformalSphereMetric, x) -> float:
    """f^q(x) = 1 + ((2q + 1) / q^2) * (x_3^2 + ... + x_{2n}^2)."""
    x = _on_sphere(x)
    if m.q is None:
        return m.length_function(x)
    q = m.q
    phi = float(x[2:] @ x[2:])
    return 1.0 + (2 * q + 1) / q**2 * phi


def support(x, n: int | None = None, tol: float = SUPPORT_TOL) -> tuple:
    """Indices j with z_j != 0, after renormalizing x to the sphere."""
    x = as_ambient(x)
    x = x / np.linalg.norm(x)
    n = n if n is not None else x.shape[0] // 2
    return tuple(j for j in range(n) if math.hypot(x[2 * j], x[2 * j + 1]) > tol)


def point_period_exact(a: WeightedCircleAction, z) -> Fraction:
    """Least period of z in turns: 1 / gcd{q_j : z_j != 0}."""
    supp = support(z, a.n)
    if not supp:
        raise RuntimeError("empty support on the sphere")
    g = reduce(math.gcd, (a.weights[j] for j in supp))
    return Fraction(1, g)


def point_period(a: WeightedCircleAction, z) -> float:
    return 2.0 * math.pi * float(point_period_exact(a, z))


def orbit_length_exact(m: ConformalSphereMetric, z) -> Fraction:
    """Length of the unit-field orbit through z in g^q, in units of 2 pi."""
    return m.q * point_period_exact(m.action, z)


def orbit_length_gq(m: ConformalSphereMetric, z) -> float:
    return 2.0 * math.pi * float(orbit_length_exact(m, z))


# fixed-point sets of linear flows


@dataclass(frozen=True)
class BlockRotationFlow:
    """mu(t) = diag(A(w_1 t), ..., A(w_k t), I_r) on R^{2k + r}.

    A(s) = [[cos s, sin s], [-sin s, cos s]]; the angular speeds w_j are
    PiMonomials (rational multiples of powers of pi) so that fixed-point
    questions can be settled exactly.
    """

    speeds: tuple
    fixed_axes: int = 0

    def __post_init__(self):
        object.__setattr__(self, "speeds", tuple(PiMonomial.of(w) for w in self.speeds))

    @property
    def dim(self) -> int:
        return 2 * len(self.speeds) + self.fixed_axes

    def matrix(self, t) -> np.ndarray:
        t = float(t)
        M = np.eye(self.dim)
        for j, w in enumerate(self.speeds):
            s = float(w) * t
            c, sn = math.cos(s), math.sin(s)
            M[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = [[c, sn], [-sn, c]]
        return M


@dataclass(frozen=True)
class FixedPointSet:
    basis: np.ndarray
    exact: bool
    blocks: tuple
    notes: tuple = ()

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def _block_fixed(w: PiMonomial, t, tol: float = 1e-12):
    if isinstance(t, PiMonomial):
        return (w * t).is_multiple_of_2pi(), True
    angle = float(w) * float(t)
    r = math.remainder(angle, 2.0 * math.pi)
    return abs(r) < tol, False


def fixed_point_set(flow: BlockRotationFlow, t) -> FixedPointSet:
    """Orthonormal basis of {x : mu(t) x = x}.

    With t given as an int, Fraction or PiMonomial the per-block test
    "w_j t is a multiple of 2 pi" is exact.  A float t falls back to a
    numeric test and is flagged as such.
    """
    if isinstance(t, (int, Fraction)):
        t = PiMonomial.of(t)
    cols, blocks, notes = [], [], []
    exact = True
    for j, w in enumerate(flow.speeds):
        fixed, ex = _block_fixed(w, t)
        exact &= ex
        if fixed:
            blocks.append(j)
            for k in (2 * j, 2 * j + 1):
                e = np.zeros(flow.dim)
                e[k] = 1.0
                cols.append(e)
        elif not ex:
            notes.append(f"block {j}: no fixed directions at numeric t={float(t)!r}")
    for k in range(2 * len(flow.speeds), flow.dim):
        e = np.zeros(flow.dim)
        e[k] = 1.0
        cols.append(e)
    basis = np.array(cols).T if cols else np.zeros((flow.dim, 0))
    return FixedPointSet(basis, exact, tuple(blocks), tuple(notes))


def finite_period_components(flow: BlockRotationFlow):
    """Maximal linear subspaces of finite-period points, with their common period.

    Blocks are grouped by commensurability of their speeds (same power of
    pi).  Returns a list of (block indices, period as PiMonomial).  Fixed
    axes belong to every component (period 0) and are not listed.
    """
    groups: dict[int, list[int]] = {}
    for j, w in enumerate(flow.speeds):
        if not w.is_zero():
            groups.setdefault(w.power, []).append(j)
    out = []
    for power, idx in sorted(groups.items()):
        cs = [abs(flow.speeds[j].coef) for j in idx]
        num = reduce(math.gcd, (c.numerator for c in cs))
        den = reduce(lambda x, y: x * y // math.gcd(x, y), (c.denominator for c in cs))
        period = PiMonomial(Fraction(2) / Fraction(num, den), 1 - power)
        out.append((tuple(idx), period))
    return out


# period spectra


@dataclass(frozen=True)
class PeriodEntry:
    turns: Fraction
    witness: np.ndarray
    role: str

    @property
    def period(self) -> float:
        return 2.0 * math.pi * float(self.turns)


@dataclass(frozen=True)
class PeriodSpectrum:
    entries: tuple

    @property
    def turns(self) -> tuple:
        return tuple(e.turns for e in self.entries)

    @property
    def periods(self) -> tuple:
        return tuple(e.period for e in self.entries)

    @property
    def maximal(self) -> PeriodEntry:
        return self.entries[-1]


def _axis_point(n: int, j: int) -> np.ndarray:
    x = np.zeros(2 * n)
    x[2 * j] = 1.0
    return x


def _support_point(n: int, supp) -> np.ndarray:
    x = np.zeros(2 * n)
    for j in supp:
        x[2 * j] = 1.0
    return x / np.linalg.norm(x)


def period_spectrum(a: WeightedCircleAction, samples: int = 100, seed: int = 0, exhaustive: bool = False) -> PeriodSpectrum:
    """Least periods realized by seeded random points plus the coordinate axes.

    ``exhaustive`` also adds a witness for every support subset, which gives
    the complete spectrum 2 pi / gcd(S) over all S.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    witnesses = [x / np.linalg.norm(x) for x in rng.normal(size=(samples, 2 * a.n))]
    witnesses += [_axis_point(a.n, j) for j in range(a.n)]
    if exhaustive:
        for k in range(2, a.n):
            witnesses += [_support_point(a.n, s) for s in combinations(range(a.n), k)]
    found: dict[Fraction, np.ndarray] = {}
    for x in witnesses:
        found.setdefault(point_period_exact(a, x), x)
    top = max(found)
    entries = tuple(
        PeriodEntry(t, found[t], "regular" if t == top else "singular") for t in sorted(found)
    )
    return PeriodSpectrum(entries)


# closedness for real two-weight flows


@dataclass(frozen=True)
class OrbitClosure:
    closed: bool
    period: float | None = None
    period_turns: object = None

    def __str__(self):
        return f"closed, period {self.period!r}" if self.closed else "non-closed"


def has_nonclosed_orbit(fl: TwoWeightFlow, z) -> OrbitClosure:
    """Is the orbit of z under the two-speed flow closed, and with which period?"""
    q = fl.q
    if isinstance(q, float):
        raise UndecidableError("undecidable without rationality certificate for q")
    supp = support(z, fl.n)
    first = 0 in supp
    rest = any(j > 0 for j in supp)
    if isinstance(q, Irrational):
        if first and rest:
            return OrbitClosure(False)
        if first:
            return OrbitClosure(True, 2.0 * math.pi, Fraction(1))
        return OrbitClosure(True, 2.0 * math.pi / float(q), None)
    qf = to_fraction(q)
    if first and rest:
        turns = Fraction(qf.denominator)
    elif first:
        turns = Fraction(1)
    else:
        turns = 1 / qf
    return OrbitClosure(True, 2.0 * math.pi * float(turns), turns)


# curvature pinching


@dataclass(frozen=True)
class PinchReport:
    values: np.ndarray
    points: tuple = field(repr=False)
    seed: int = 0

    @property
    def min(self) -> float:
        return float(self.values.min())

    @property
    def max(self) -> float:
        return float(self.values.max())

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    @property
    def max_deviation(self) -> float:
        return float(np.abs(self.values - 1.0).max())


def _random_plane(rng, g, dim, retries: int = 10):
    for _ in range(retries):
        v, w = rng.normal(size=(2, dim))
        v = v / math.sqrt(v @ g @ v)
        w = w - (w @ g @ v) * v
        ww = w @ g @ w
        if ww > 1e-10:
            return v, w / math.sqrt(ww)
    raise DegeneratePlaneError("no nondegenerate plane after retries")


def curvature_pinch_report(m: ConformalSphereMetric, samples: int = 500, seed: int = 0) -> PinchReport:
    """Sectional curvatures of m at seeded random points and planes, via the conformal-change formula."""
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    base = m.base
    dim = base.dim
    vals, pts = [], []
    for _ in range(samples):
        x = rng.normal(size=2 * m.n)
        p = base.atlas.from_ambient(x)
        g = base(p)
        v, w = _random_plane(rng, g, dim)
        K = sectional_curvature(base, p, v, w)
        psi, d, H = scalar_jet(base, m.log_factor, p)
        vals.append(conformal_sectional_curvature(K, math.exp(psi), d, H, v, w, g))
        pts.append(p)
    return PinchReport(np.array(vals), tuple(pts), seed)
