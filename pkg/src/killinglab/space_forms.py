"""Clifford-Wolf translations of spheres and quotient orbit periods.

Quaternions x = x1 + i x2 + j x3 + k x4 are identified with (x1, x2, x3, x4)
in R^4; left and right multiplication are 4 x 4 orthogonal matrices.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg

from .exact import lcm

__all__ = [
    "CW_TOL",
    "GROUP_TOL",
    "GroupCapExceeded",
    "UnitQuaternion",
    "CliffordWolfVerdict",
    "FiniteMatrixGroup",
    "CyclicCWConstruction",
    "QuotientPeriod",
    "IntersectionVerdict",
    "rotation_block",
    "left_matrix",
    "right_matrix",
    "block_embed",
    "cw_test",
    "displacement_spread",
    "random_block_rotation",
    "generate_finite_group",
    "cyclic_cw_group",
    "quotient_period",
    "stratum_codimension",
    "min_left_right_distance",
    "f1_f2_intersection_check",
]

CW_TOL = 1e-9
GROUP_TOL = 1e-10
UNIT_TOL = 1e-12


class GroupCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class UnitQuaternion:
    x1: float
    x2: float
    x3: float
    x4: float

    def __post_init__(self):
        n = math.sqrt(self.x1**2 + self.x2**2 + self.x3**2 + self.x4**2)
        if abs(n - 1.0) > UNIT_TOL:
            raise ValueError(f"|x| = {n!r} is not 1")

    @classmethod
    def from_vector(cls, v, normalize: bool = False) -> "UnitQuaternion":
        v = np.asarray(v, dtype=float)
        if normalize:
            v = v / np.linalg.norm(v)
        return cls(*(float(c) for c in v))

    @classmethod
    def random(cls, rng) -> "UnitQuaternion":
        return cls.from_vector(rng.normal(size=4), normalize=True)

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3, self.x4])

    def __mul__(self, other: "UnitQuaternion") -> "UnitQuaternion":
        a1, a2, a3, a4 = self.vec
        b1, b2, b3, b4 = other.vec
        v = np.array([
            a1 * b1 - a2 * b2 - a3 * b3 - a4 * b4,
            a1 * b2 + a2 * b1 + a3 * b4 - a4 * b3,
            a1 * b3 - a2 * b4 + a3 * b1 + a4 * b2,
            a1 * b4 + a2 * b3 - a3 * b2 + a4 * b1,
        ])
        return UnitQuaternion.from_vector(v, normalize=True)

    def conj(self) -> "UnitQuaternion":
        return UnitQuaternion(self.x1, -self.x2, -self.x3, -self.x4)


def _q(x) -> UnitQuaternion:
    if isinstance(x, UnitQuaternion):
        return x
    if np.isscalar(x):
        return UnitQuaternion(float(x), 0.0, 0.0, 0.0)
    return UnitQuaternion.from_vector(x)


def left_matrix(x) -> np.ndarray:
    """Matrix of y -> x y."""
    x1, x2, x3, x4 = _q(x).vec
    return np.array([
        [x1, -x2, -x3, -x4],
        [x2, x1, -x4, x3],
        [x3, x4, x1, -x2],
        [x4, -x3, x2, x1],
    ])


def right_matrix(x) -> np.ndarray:
    """Matrix of y -> y x."""
    x1, x2, x3, x4 = _q(x).vec
    return np.array([
        [x1, -x2, -x3, -x4],
        [x2, x1, x4, -x3],
        [x3, -x4, x1, x2],
        [x4, x3, -x2, x1],
    ])


def block_embed(D, n: int) -> np.ndarray:
    """diag(D, ..., D) with n copies."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return scipy.linalg.block_diag(*([np.asarray(D, dtype=float)] * n))


def rotation_block(theta: float) -> np.ndarray:
    """[[cos, sin], [-sin, cos]], the rotation convention of the cyclic construction."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


# Clifford-Wolf test


@dataclass(frozen=True)
class CliffordWolfVerdict:
    ok: bool
    kind: str  # "+I", "-I", "half-split", "violation"
    lam: complex | None = None
    witness: tuple = ()

    def __bool__(self):
        return self.ok

    def recheck(self, A, tol: float = CW_TOL) -> bool:
        """Re-verify the certificate against the spectrum of A."""
        A = np.asarray(A, dtype=float)
        n = A.shape[0]
        if self.kind in ("+I", "-I"):
            s = 1.0 if self.kind == "+I" else -1.0
            return bool(np.abs(A - s * np.eye(n)).max() < tol)
        ev = _spectrum(A)
        if self.kind == "half-split":
            up = np.abs(ev - self.lam) < tol
            down = np.abs(ev - np.conj(self.lam)) < tol
            return bool(up.sum() == n // 2 and down.sum() == n // 2 and np.all(up | down))
        return not cw_test(A, tol).ok


def _check_orthogonal(A: np.ndarray, tol: float = CW_TOL):
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("square matrix required")
    if np.abs(A.T @ A - np.eye(A.shape[0])).max() > tol:
        raise ValueError("matrix is not orthogonal")


def _spectrum(A: np.ndarray) -> np.ndarray:
    T, _ = scipy.linalg.schur(A.astype(complex), output="complex")
    return np.diag(T)


def cw_test(A, tol: float = CW_TOL) -> CliffordWolfVerdict:
    """Is the orthogonal map A a Clifford-Wolf translation of the unit sphere?

    True iff A = +-I, or dim is even and the spectrum is lambda (half the
    eigenvalues) and conj(lambda) (the other half) for one unimodular lambda.
    """
    A = np.asarray(A, dtype=float)
    _check_orthogonal(A, tol)
    n = A.shape[0]
    if np.abs(A - np.eye(n)).max() < tol:
        return CliffordWolfVerdict(True, "+I", 1.0 + 0j)
    if np.abs(A + np.eye(n)).max() < tol:
        return CliffordWolfVerdict(True, "-I", -1.0 + 0j)
    ev = _spectrum(A)
    if n % 2:
        real = ev[np.argmin(np.abs(ev.imag))]
        other = ev[np.argmax(np.abs(ev - real))]
        return CliffordWolfVerdict(False, "violation", None, (complex(real), complex(other)))
    upper = ev[ev.imag > tol]
    if len(upper) != n // 2:
        real = ev[np.abs(ev.imag) <= tol]
        return CliffordWolfVerdict(False, "violation", None, tuple(complex(v) for v in real[:2]))
    lam = complex(upper.mean())
    far = upper[np.abs(upper - lam) >= tol]
    if far.size:
        worst = upper[np.argmax(np.abs(upper - upper[0]))]
        return CliffordWolfVerdict(False, "violation", None, (complex(upper[0]), complex(worst)))
    return CliffordWolfVerdict(True, "half-split", lam)


def _displacements(A: np.ndarray, X: np.ndarray) -> np.ndarray:
    # 2 atan2(|Ax - x|, |Ax + x|) equals arccos<x, Ax> for unit x, without the loss of precision near 0 and pi
    AX = X @ A.T
    return 2.0 * np.arctan2(np.linalg.norm(AX - X, axis=1), np.linalg.norm(AX + X, axis=1))


def displacement_spread(A, samples: int = 200, seed: int = 0) -> tuple:
    """(min, max) over seeded random unit x, plus the coordinate axes, of the spherical distance from x to A x."""
    if samples < 2:
        raise ValueError("need at least two samples")
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(samples, n))
    X = np.vstack([X / np.linalg.norm(X, axis=1, keepdims=True), np.eye(n)])
    d = _displacements(A, X)
    return float(d.min()), float(d.max())


def random_block_rotation(rng, n_blocks: int, mode: str = "mixed") -> np.ndarray:
    """Random element of O(2 n_blocks) built from 2 x 2 rotation blocks, conjugated by a random orthogonal matrix.

    ``mode`` "cw" uses one common angle (random block orientations), "generic"
    independent angles, "mixed" picks one of the two at random.
    """
    if mode == "mixed":
        mode = "cw" if rng.random() < 0.5 else "generic"
    if mode == "cw":
        theta = rng.uniform(0.1, math.pi - 0.1)
        angles = theta * rng.choice([-1.0, 1.0], size=n_blocks)
    else:
        angles = rng.uniform(0.1, math.pi - 0.1, size=n_blocks)
    D = scipy.linalg.block_diag(*[rotation_block(t) for t in angles])
    Q, _ = np.linalg.qr(rng.normal(size=(2 * n_blocks, 2 * n_blocks)))
    return Q @ D @ Q.T


# finite groups


@dataclass(frozen=True)
class FiniteMatrixGroup:
    elements: tuple = field(repr=False)
    generators: tuple = field(repr=False)
    cap: int = 1000

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def index(self, M, tol: float = GROUP_TOL):
        for i, E in enumerate(self.elements):
            if np.abs(E - M).max() < tol:
                return i
        return None

    def __contains__(self, M) -> bool:
        return self.index(np.asarray(M, dtype=float)) is not None

    def is_closed(self, tol: float = GROUP_TOL) -> bool:
        return all(self.index(a @ b, tol) is not None for a in self.elements for b in self.elements) and all(
            self.index(a.T, tol) is not None for a in self.elements
        )


def generate_finite_group(gens, cap: int = 1000, tol: float = GROUP_TOL) -> FiniteMatrixGroup:
    """Closure of the generators under products (breadth first); raises GroupCapExceeded beyond ``cap``."""
    gens = tuple(np.asarray(g, dtype=float) for g in gens)
    if not gens:
        raise ValueError("need at least one generator")
    n = gens[0].shape[0]
    for g in gens:
        _check_orthogonal(g, 1e-9)
    elems = [np.eye(n)]
    stack = np.eye(n)[None]
    queue = deque([np.eye(n)])
    while queue:
        h = queue.popleft()
        for g in gens:
            k = g @ h
            if np.abs(stack - k).max(axis=(1, 2)).min() < tol:
                continue
            if len(elems) >= cap:
                raise GroupCapExceeded(f"more than {cap} elements")
            elems.append(k)
            stack = np.concatenate([stack, k[None]])
            queue.append(k)
    return FiniteMatrixGroup(tuple(elems), gens, cap)


# the cyclic construction on S^{2n-1}


@dataclass(frozen=True)
class CyclicCWConstruction:
    """f = diag(B, ..., B), B = R(2 pi / q), and mu(t) = diag(A(t), ..., A(t), A(t)^{-1}), A(t) = R(2 pi t)."""

    n: int
    q: int
    group: FiniteMatrixGroup = field(repr=False)
    f: np.ndarray = field(repr=False)

    @property
    def speeds(self) -> tuple:
        """Block angular speeds of mu, in turns per unit t."""
        return (1,) * (self.n - 1) + (-1,)

    base_period = Fraction(1)

    def flow(self, t) -> np.ndarray:
        return scipy.linalg.block_diag(*[rotation_block(2.0 * math.pi * s * float(t)) for s in self.speeds])

    __call__ = flow


def cyclic_cw_group(n: int, q: int) -> CyclicCWConstruction:
    if n < 2 or q < 3:
        raise ValueError("need n >= 2 and q >= 3")
    f = block_embed(rotation_block(2.0 * math.pi / q), n)
    return CyclicCWConstruction(n, q, generate_finite_group([f]), f)


@dataclass(frozen=True)
class QuotientPeriod:
    t: Fraction
    gamma: np.ndarray = field(repr=False)
    gamma_index: int
    gamma_is_identity: bool
    candidates: int

    def __float__(self):
        return float(self.t)


def _block_turns(M: np.ndarray, cap: int) -> list:
    """Rotation angle (in turns, first diagonal block convention) of every 2 x 2 diagonal block of M, or None."""
    out = []
    for j in range(M.shape[0] // 2):
        blk = M[2 * j : 2 * j + 2, 2 * j : 2 * j + 2]
        if np.abs(M[2 * j : 2 * j + 2, :2 * j]).max(initial=0) > 1e-12 or np.abs(M[2 * j : 2 * j + 2, 2 * j + 2 :]).max(initial=0) > 1e-12:
            return None
        t = math.atan2(blk[0, 1], blk[0, 0]) / (2.0 * math.pi)
        out.append(Fraction(t).limit_denominator(cap))
    return out


def quotient_period(c: CyclicCWConstruction, y, grid: int = 64, tol: float = 1e-9) -> QuotientPeriod:
    """Least t in (0, base period] with mu(t) y = gamma y for some gamma in the group.

    Candidates: the grid k / (lcm(q, |Gamma|) * grid) together with the exact
    times obtained by matching the block angles of mu(t) and gamma on the
    support of y.  The grid alone misses nothing for the cyclic construction
    but the analytic candidates make the answer independent of ``grid``.
    """
    y = np.asarray(y, dtype=float)
    y = y / np.linalg.norm(y)
    G = c.group
    N = lcm(c.q, G.order) * grid
    cands = {Fraction(k, N) for k in range(1, N + 1)}
    supp = [j for j in range(c.n) if math.hypot(y[2 * j], y[2 * j + 1]) > 1e-12]
    for gamma in G.elements:
        beta = _block_turns(gamma, 10**6)
        if beta is None:
            continue
        for j in supp:
            s = c.speeds[j]
            for m in range(-abs(s) - 1, abs(s) + 2):
                t = (beta[j] + m) / s
                if 0 < t <= c.base_period:
                    cands.add(t)
    ordered = sorted(cands)
    for t in ordered:
        mt = c.flow(t) @ y
        for i, gamma in enumerate(G.elements):
            if np.abs(mt - gamma @ y).max() < tol:
                ident = bool(np.abs(gamma - np.eye(gamma.shape[0])).max() < GROUP_TOL)
                return QuotientPeriod(t, gamma, i, ident, len(ordered))
    return QuotientPeriod(c.base_period, np.eye(2 * c.n), 0, True, len(ordered))


def stratum_codimension(gamma, mu_t, tol: float = 1e-9) -> int:
    """Codimension of the fixed subspace of gamma^{-1} mu(t) = rank(gamma^{-1} mu(t) - I)."""
    gamma = np.asarray(gamma, dtype=float)
    M = gamma.T @ np.asarray(mu_t, dtype=float) - np.eye(gamma.shape[0])
    return int(np.linalg.matrix_rank(M, tol=tol))


# left versus right multiplication


@dataclass(frozen=True)
class IntersectionVerdict:
    ok: bool
    order_left: int
    order_right: int
    intersection: tuple = field(repr=False)
    min_grid_distance: float = math.nan
    worst_oracle_gap: float = math.nan


def _unit_grid(resolution: int) -> np.ndarray:
    """Unit quaternions on a Hopf-coordinate grid (includes +-1, +-i, +-j, +-k)."""
    eta = np.linspace(0.0, math.pi / 2, resolution + 1)
    phi = np.linspace(0.0, 2 * math.pi, 4 * resolution, endpoint=False)
    E, A, B = np.meshgrid(eta, phi, phi, indexing="ij")
    Y = np.stack([np.cos(E) * np.cos(A), np.cos(E) * np.sin(A), np.sin(E) * np.cos(B), np.sin(E) * np.sin(B)], axis=-1)
    return Y.reshape(-1, 4)


def min_left_right_distance(x, resolution: int = 12) -> float:
    """min over a grid of unit y of the Frobenius norm |left_matrix(x) - right_matrix(y)|."""
    L = left_matrix(x)
    basis = np.array([right_matrix(e) for e in np.eye(4)])
    Y = _unit_grid(resolution)
    R = np.einsum("ni,ijk->njk", Y, basis)
    return float(np.sqrt(((R - L) ** 2).sum(axis=(1, 2)).min()))


def f1_f2_intersection_check(samples: int = 100, seed: int = 0, resolution: int = 12) -> IntersectionVerdict:
    """The order-8 groups of left and right multiplications by +-1, +-i, +-j, +-k meet exactly in {+-I}.

    Also checks, for seeded random unit x, that the grid minimum of
    |L(x) - R(y)| is above 0.1 and matches the closed form
    sqrt(8 (1 - |x_1|)) (the squared norm is 8 - 8 x_1 y_1).
    """
    i, j = (0, 1, 0, 0), (0, 0, 1, 0)
    G1 = generate_finite_group([left_matrix(i), left_matrix(j)])
    G2 = generate_finite_group([right_matrix(i), right_matrix(j)])
    inter = tuple(E for E in G1.elements if E in G2)
    ok_inter = len(inter) == 2 and all(
        any(np.abs(E - s * np.eye(4)).max() < GROUP_TOL for s in (1.0, -1.0)) for E in inter
    )
    rng = np.random.default_rng(seed)
    dmin, gap = math.inf, 0.0
    for _ in range(samples):
        x = UnitQuaternion.random(rng)
        d = min_left_right_distance(x, resolution)
        dmin = min(dmin, d)
        gap = max(gap, abs(d - math.sqrt(max(8.0 * (1.0 - abs(x.x1)), 0.0))))
    ok = ok_inter and G1.order == 8 and G2.order == 8 and dmin > 0.1
    return IntersectionVerdict(ok, G1.order, G2.order, inter, dmin, gap)
