"""Killing fields on locally Euclidean spaces R^n / Gamma.

An isometry is stored as (A, a) acting by x -> A x + a.  Catalog groups use
exact rational entries (numpy object arrays of Fractions); a rotation by an
angle incommensurable with pi carries a :class:`RotationCertificate` so that
its order is decided exactly even though its matrix is floating point.
User-supplied numeric groups are compared with tolerance 1e-10.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import numpy as np
import scipy.linalg
import sympy

from .exact import Irrational, Turns, lcm

__all__ = [
    "NUMERIC_TOL",
    "DEFAULT_WORD_LENGTH",
    "DEFAULT_TRANSLATION_BOUND",
    "OrderCapExceeded",
    "RotationCertificate",
    "EuclideanIsometry",
    "EuclideanKilling",
    "FlatSpaceGroup",
    "OrthogonalOrder",
    "FlatKillingClassification",
    "FreenessReport",
    "compose",
    "d_image",
    "is_invariant",
    "invariant_vectors",
    "matrix_order",
    "max_finite_order",
    "enumerate_elements",
    "classify",
    "freeness_sanity",
    "conjugate_group",
    "catalog",
    "get_group",
]

NUMERIC_TOL = 1e-10
ORTHO_TOL = 1e-10
DEFAULT_WORD_LENGTH = 8
DEFAULT_TRANSLATION_BOUND = 4.0
RECONSTRUCTION_CAP = 10**6


class OrderCapExceeded(RuntimeError):
    pass


# exact/float array plumbing


def _is_exact_scalar(v) -> bool:
    return isinstance(v, (int, Fraction, np.integer)) and not isinstance(v, bool)


def _as_array(x) -> np.ndarray:
    arr = np.asarray(x, dtype=object)
    flat = arr.ravel()
    if all(_is_exact_scalar(v) for v in flat):
        out = np.empty(arr.shape, dtype=object)
        out.ravel()[:] = [Fraction(int(v)) if isinstance(v, np.integer) else Fraction(v) for v in flat]
        return out
    return np.asarray(x, dtype=float)


def _exact(arr: np.ndarray) -> bool:
    return arr.dtype == object


def _float(arr: np.ndarray) -> np.ndarray:
    return arr.astype(float)


def _eye(n: int, exact: bool = True) -> np.ndarray:
    if not exact:
        return np.eye(n)
    out = np.full((n, n), Fraction(0), dtype=object)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def _unify(*arrs):
    if all(_exact(a) for a in arrs):
        return arrs
    return tuple(_float(a) for a in arrs)


def _is_zero(arr: np.ndarray, tol: float = NUMERIC_TOL) -> bool:
    if _exact(arr):
        return all(v == 0 for v in arr.ravel())
    return bool(np.all(np.abs(arr) <= tol))


def _key(arr: np.ndarray):
    if _exact(arr):
        return tuple(arr.ravel())
    # snap tiny negatives so that -0.0 and 1e-17 share a key with 0
    return tuple(float(v) + 0.0 for v in np.round(arr.ravel(), 9))


def _to_sympy(arr: np.ndarray) -> sympy.Matrix:
    rows = arr if arr.ndim == 2 else arr.reshape(-1, 1)
    return sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in r] for r in rows])


def _from_sympy(M: sympy.Matrix) -> np.ndarray:
    out = np.empty(M.shape, dtype=object)
    for i in range(M.shape[0]):
        for j in range(M.shape[1]):
            v = sympy.Rational(M[i, j])
            out[i, j] = Fraction(int(v.p), int(v.q))
    return out


def _rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


# rotation certificates


@dataclass(frozen=True)
class RotationCertificate:
    """Linear part diag(R(2 pi t_1), ..., R(2 pi t_k), s_1, ..., s_r) in the standard basis.

    R(theta) = [[cos, -sin], [sin, cos]]; the t_j are :class:`Turns`, the
    s_j are +-1.
    """

    turns: tuple
    signs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "turns", tuple(Turns.of(t) for t in self.turns))
        signs = tuple(int(s) for s in self.signs)
        if any(s not in (1, -1) for s in signs):
            raise ValueError("signs must be +1 or -1")
        object.__setattr__(self, "signs", signs)

    @property
    def dim(self) -> int:
        return 2 * len(self.turns) + len(self.signs)

    @property
    def layout(self):
        return (len(self.turns), len(self.signs))

    @classmethod
    def identity(cls, layout) -> "RotationCertificate":
        k, r = layout
        return cls((Turns(),) * k, (1,) * r)

    def compose(self, other: "RotationCertificate") -> "RotationCertificate":
        if self.layout != other.layout:
            raise ValueError("certificates with different block layouts")
        return RotationCertificate(
            tuple(a + b for a, b in zip(self.turns, other.turns)),
            tuple(a * b for a, b in zip(self.signs, other.signs)),
        )

    def inverse(self) -> "RotationCertificate":
        return RotationCertificate(tuple(-t for t in self.turns), self.signs)

    def matrix(self) -> np.ndarray:
        M = np.eye(self.dim)
        for j, t in enumerate(self.turns):
            M[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = _rotation(t.radians())
        for i, s in enumerate(self.signs):
            k = 2 * len(self.turns) + i
            M[k, k] = float(s)
        return M

    def is_identity(self) -> bool:
        return all(t.is_rational and t.rational == 0 for t in self.turns) and all(s == 1 for s in self.signs)

    def order(self):
        """lcm of the block orders, or None when some angle is irrational."""
        orders = [t.order() for t in self.turns]
        if any(o is None for o in orders):
            return None
        if any(s == -1 for s in self.signs):
            orders.append(2)
        return lcm(*orders)

    def key(self):
        return (self.turns, self.signs)


# isometries and Killing fields


@dataclass(frozen=True, eq=False)
class EuclideanIsometry:
    """x -> A x + a."""

    A: np.ndarray
    a: np.ndarray
    cert: RotationCertificate | None = None

    def __post_init__(self):
        A = self.cert.matrix() if self.cert is not None and self.A is None else _as_array(self.A)
        a = _as_array(self.a)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or a.shape != (A.shape[0],):
            raise ValueError(f"shape mismatch: A {A.shape}, a {a.shape}")
        if self.cert is not None and self.cert.dim != A.shape[0]:
            raise ValueError("certificate dimension mismatch")
        AtA = A.T @ A
        if not _is_zero(AtA - _eye(A.shape[0], _exact(AtA)), ORTHO_TOL):
            raise ValueError("linear part is not orthogonal")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "a", a)

    @classmethod
    def translation(cls, a) -> "EuclideanIsometry":
        a = _as_array(a)
        return cls(_eye(a.shape[0], _exact(a)), a)

    @classmethod
    def identity(cls, n: int) -> "EuclideanIsometry":
        return cls(_eye(n), np.full(n, Fraction(0), dtype=object))

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    @property
    def exact(self) -> bool:
        return _exact(self.A) and _exact(self.a)

    def __call__(self, x) -> np.ndarray:
        A, a, x = _unify(self.A, self.a, _as_array(x))
        return A @ x + a

    def __matmul__(self, other: "EuclideanIsometry") -> "EuclideanIsometry":
        return compose(self, other)

    def _cert_in(self, layout):
        if self.cert is not None:
            return self.cert
        if _exact(self.A) and _is_zero(self.A - _eye(self.dim)):
            return RotationCertificate.identity(layout)
        return None

    def inverse(self) -> "EuclideanIsometry":
        At = self.A.T.copy()
        A, a = _unify(At, self.a)
        cert = None if self.cert is None else self.cert.inverse()
        return EuclideanIsometry(cert.matrix() if cert is not None else A, -(A @ a), cert)

    def linear_is_identity(self) -> bool:
        if self.cert is not None:
            return self.cert.is_identity()
        return _is_zero(self.A - _eye(self.dim, _exact(self.A)))

    def is_identity(self) -> bool:
        return self.linear_is_identity() and _is_zero(self.a)

    def linear_key(self):
        return ("cert", self.cert.key()) if self.cert is not None else _key(self.A)

    def key(self):
        return (self.linear_key(), _key(self.a))

    def equals(self, other: "EuclideanIsometry", tol: float = NUMERIC_TOL) -> bool:
        A1, A2, a1, a2 = _unify(self.A, other.A, self.a, other.a)
        return _is_zero(A1 - A2, tol) and _is_zero(a1 - a2, tol)

    def __repr__(self):
        fmt = lambda arr: np.array2string(np.asarray(arr), separator=", ") if not _exact(arr) else str([str(v) for v in arr.ravel()])
        return f"EuclideanIsometry(A={fmt(self.A)}, a={fmt(self.a)})"


def compose(g: EuclideanIsometry, f: EuclideanIsometry) -> EuclideanIsometry:
    """g . f = (A B, A b + a) for g = (A, a), f = (B, b)."""
    if g.dim != f.dim:
        raise ValueError(f"dimension mismatch: {g.dim} vs {f.dim}")
    cert = None
    layout = (g.cert or f.cert).layout if (g.cert or f.cert) else None
    if layout is not None:
        cg, cf = g._cert_in(layout), f._cert_in(layout)
        if cg is not None and cf is not None:
            cert = cg.compose(cf)
    A, B, a, b = _unify(g.A, f.A, g.a, f.a)
    AB = cert.matrix() if cert is not None else A @ B
    return EuclideanIsometry(AB, A @ b + a, cert)


@dataclass(frozen=True, eq=False)
class EuclideanKilling:
    """X(x) = W x + w with W skew-symmetric."""

    W: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        W = _as_array(self.W)
        w = _as_array(self.w)
        if W.shape != (w.shape[0], w.shape[0]):
            raise ValueError("shape mismatch")
        S = W + W.T
        if (_exact(S) and not _is_zero(S)) or (not _exact(S) and np.any(S != 0.0)):
            raise ValueError("W must be skew-symmetric")
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "w", w)

    @classmethod
    def parallel(cls, w) -> "EuclideanKilling":
        w = _as_array(w)
        n = w.shape[0]
        return cls(np.full((n, n), Fraction(0), dtype=object) if _exact(w) else np.zeros((n, n)), w)

    def __call__(self, x) -> np.ndarray:
        W, w, x = _unify(self.W, self.w, _as_array(x))
        return W @ x + w


def is_invariant(g: EuclideanIsometry, X: EuclideanKilling, tol: float = 1e-12) -> bool:
    """[A, W] = 0 and W(a) + w = A(w)."""
    if g.dim != X.w.shape[0]:
        raise ValueError("dimension mismatch")
    A, a, W, w = _unify(g.A, g.a, X.W, X.w)
    return _is_zero(A @ W - W @ A, tol) and _is_zero(W @ a + w - A @ w, tol)


@dataclass(frozen=True)
class FlatSpaceGroup:
    """Generators of Gamma; ``free`` records the caller's promise that Gamma acts freely and discretely."""

    name: str
    generators: tuple
    free: bool = True
    notes: str = ""

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise ValueError("need at least one generator")
        if len({g.dim for g in gens}) != 1:
            raise ValueError("generators of different dimensions")
        object.__setattr__(self, "generators", gens)

    @property
    def dim(self) -> int:
        return self.generators[0].dim

    def symmetric_generators(self) -> tuple:
        out, seen = [], set()
        for g in self.generators:
            for h in (g, g.inverse()):
                if h.key() not in seen:
                    seen.add(h.key())
                    out.append(h)
        return tuple(out)


def d_image(G: FlatSpaceGroup, cap: int = 1000) -> list:
    """The linear parts d(Gamma), by closure of the generators' linear parts."""
    start = EuclideanIsometry(_eye(G.dim), np.full(G.dim, Fraction(0), dtype=object))
    lin = [EuclideanIsometry(g.A, np.zeros(G.dim) if not _exact(g.A) else start.a, g.cert) for g in G.symmetric_generators()]
    seen = {start.linear_key(): start}
    queue = deque([start])
    while queue:
        h = queue.popleft()
        for g in lin:
            k = compose(g, h)
            key = k.linear_key()
            if key not in seen:
                if len(seen) >= cap:
                    raise OrderCapExceeded(f"order cap exceeded: d(Gamma) has more than {cap} elements (it may be infinite)")
                seen[key] = k
                queue.append(k)
    return [h.A for h in seen.values()]


def invariant_vectors(dG) -> np.ndarray:
    """Orthonormal basis (columns) of the common fixed subspace of the matrices in dG."""
    mats = [_as_array(A) for A in dG]
    if not mats:
        raise ValueError("empty matrix list; pass at least the identity")
    n = mats[0].shape[0]
    if all(_exact(A) for A in mats):
        stacked = np.vstack([A - _eye(n) for A in mats])
        ns = _to_sympy(stacked).nullspace()
        if not ns:
            return np.zeros((n, 0))
        B = np.array([[float(v) for v in vec] for vec in ns]).T
        Q = scipy.linalg.orth(B) if B.shape[1] > 1 else B / np.linalg.norm(B)
    else:
        stacked = np.vstack([_float(A) - np.eye(n) for A in mats])
        Q = scipy.linalg.null_space(stacked, rcond=NUMERIC_TOL)
    if Q.shape[1] == 0:
        return Q
    # canonical orientation: largest components first-positive, identity when full space
    if Q.shape[1] == n:
        return np.eye(n)
    Q = Q.copy()
    for j in range(Q.shape[1]):
        i = int(np.argmax(np.abs(Q[:, j]) > 1e-12))
        if Q[i, j] < 0:
            Q[:, j] = -Q[:, j]
    Q[np.abs(Q) < 1e-15] = 0.0
    return Q


# orders of orthogonal matrices


@dataclass(frozen=True)
class OrthogonalOrder:
    kind: str  # "finite" | "infinite" | "indeterminate"
    k: int | None = None
    how: str = ""

    @property
    def finite(self) -> bool:
        return self.kind == "finite"

    def __str__(self):
        return f"finite({self.k})" if self.finite else self.kind


def _totient(k: int) -> int:
    return sum(1 for j in range(1, k + 1) if math.gcd(j, k) == 1)


def max_finite_order(n: int) -> int:
    """Largest order of a finite-order rational n x n matrix.

    Every eigenvalue of order k contributes a factor of degree phi(k) to the
    characteristic polynomial, so the order is the lcm of a set of distinct
    k with sum phi(k) <= n (k = 1, 2 each cost one dimension).
    """
    cands = [k for k in range(1, 2 * n * n + 3) if _totient(k) <= n]
    best = 1

    def walk(i, budget, cur):
        nonlocal best
        best = max(best, cur)
        for j in range(i, len(cands)):
            c = _totient(cands[j])
            if c <= budget:
                walk(j + 1, budget - c, lcm(cur, cands[j]))

    walk(0, n, 1)
    return best


def _exact_order(A: np.ndarray) -> OrthogonalOrder:
    n = A.shape[0]
    I = _eye(n)
    P = A.copy()
    for k in range(1, max_finite_order(n) + 1):
        if _is_zero(P - I):
            return OrthogonalOrder("finite", k, "exact powers")
        P = P @ A
    return OrthogonalOrder("infinite", None, "exact powers beyond the finite-order bound")


def _numeric_order(A: np.ndarray, cap: int = RECONSTRUCTION_CAP) -> OrthogonalOrder:
    ev = np.linalg.eigvals(A)
    dens = []
    for lam in ev:
        t = math.atan2(lam.imag, lam.real) / (2.0 * math.pi)
        r = Fraction(t).limit_denominator(cap)
        if abs(t - float(r)) > NUMERIC_TOL:
            return OrthogonalOrder("indeterminate", None, f"indeterminate at cap {cap}")
        dens.append(r.denominator)
    k = lcm(*dens)
    if np.abs(np.linalg.matrix_power(A, k) - np.eye(A.shape[0])).max() > NUMERIC_TOL:
        return OrthogonalOrder("indeterminate", None, f"indeterminate at cap {cap}: A^{k} != I")
    return OrthogonalOrder("finite", k, "numeric angle reconstruction")


def matrix_order(A, cert: RotationCertificate | None = None) -> OrthogonalOrder:
    """Order of an orthogonal matrix.

    Certified angles and exact rational matrices give exact answers; plain
    floating matrices go through angle reconstruction with denominator cap
    10^6 and may come back "indeterminate" (which is not the same as infinite).
    """
    if isinstance(A, EuclideanIsometry):
        A, cert = A.A, A.cert if cert is None else cert
    if cert is not None:
        k = cert.order()
        if k is None:
            return OrthogonalOrder("infinite", None, "certified irrational angle")
        return OrthogonalOrder("finite", k, "rotation certificate")
    A = _as_array(A)
    if _exact(A):
        return _exact_order(A)
    return _numeric_order(A)


# classification


@dataclass(frozen=True)
class FlatKillingClassification:
    tag: str
    direction: np.ndarray | None = None
    witness: EuclideanIsometry | None = None
    b: np.ndarray | None = None
    t: object = None
    order: OrthogonalOrder | None = None
    word_length: int = DEFAULT_WORD_LENGTH
    translation_bound: float = DEFAULT_TRANSLATION_BOUND
    elements_searched: int = 0
    partial: bool = False
    notes: tuple = ()

    def summary(self) -> dict:
        out = {"tag": self.tag, "partial": self.partial, "word_length": self.word_length,
               "translation_bound": self.translation_bound, "elements_searched": self.elements_searched}
        if self.order is not None:
            out["order"] = str(self.order)
        if self.b is not None:
            out["b"] = [str(v) if isinstance(v, Fraction) else float(v) for v in self.b]
            out["t"] = str(self.t) if isinstance(self.t, Fraction) else float(self.t)
        return out


def _norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(_float(a)))


def enumerate_elements(G: FlatSpaceGroup, word_length: int = DEFAULT_WORD_LENGTH,
                       translation_bound: float = DEFAULT_TRANSLATION_BOUND, cap: int = 50000):
    """Distinct elements reachable by words of bounded length whose translation parts stay bounded.

    Returns (list of (element, word length)), and a flag telling whether the cap was hit.
    """
    e = EuclideanIsometry.identity(G.dim)
    gens = G.symmetric_generators()
    seen = {e.key(): (e, 0)}
    frontier = [e]
    hit_cap = False
    for length in range(1, word_length + 1):
        nxt = []
        for h in frontier:
            for g in gens:
                k = compose(g, h)
                key = k.key()
                if key in seen or _norm(k.a) > translation_bound + 1e-12:
                    continue
                if len(seen) >= cap:
                    hit_cap = True
                    break
                seen[key] = (k, length)
                nxt.append(k)
        frontier = nxt
        if hit_cap or not frontier:
            break
    return list(seen.values()), hit_cap


def _solve_witness(f: EuclideanIsometry, a: np.ndarray):
    """Solve (I - A) b + t a = c with b orthogonal to ker(I - A); None if inconsistent."""
    n = f.dim
    exact = f.exact and _exact(a)
    if exact:
        M = _to_sympy(_eye(n) - f.A)
        K = M.nullspace()
        rows = [M.row_join(_to_sympy(a))]
        for kv in K:
            rows.append(kv.T.row_join(sympy.zeros(1, 1)))
        S = sympy.Matrix.vstack(*rows)
        rhs = _to_sympy(f.a).col_join(sympy.zeros(len(K), 1))
        try:
            sol, params = S.gauss_jordan_solve(rhs)
        except ValueError:
            return None
        if params.shape[0]:
            sol = sol.subs({p: 0 for p in params})
        sol = _from_sympy(sol).ravel()
        return sol[:n], sol[n]
    A, c, av = _float(f.A), _float(f.a), _float(a)
    M = np.eye(n) - A
    K = scipy.linalg.null_space(M, rcond=NUMERIC_TOL)
    S = np.vstack([np.column_stack([M, av]), np.column_stack([K.T, np.zeros(K.shape[1])])])
    rhs = np.concatenate([c, np.zeros(K.shape[1])])
    sol, *_ = np.linalg.lstsq(S, rhs, rcond=None)
    if np.abs(S @ sol - rhs).max() > NUMERIC_TOL:
        return None
    return sol[:n], float(sol[n])


def classify(G: FlatSpaceGroup, a, word_length: int = DEFAULT_WORD_LENGTH,
             translation_bound: float = DEFAULT_TRANSLATION_BOUND, cap: int = 50000) -> FlatKillingClassification:
    """Decide what the parallel field (0, a) projects to on R^n / Gamma.

    Elements f = (A, c) with A != I are searched for c = (I - A) b + t a with
    b orthogonal to a and t != 0.  A witness with A of infinite order gives
    "mixed-closed-nonclosed", finite order gives "quasiregular"; none found
    within the search bounds gives "regular-or-uniform".
    """
    gens_lin = [g.A for g in G.generators]
    inv = invariant_vectors(gens_lin)
    if inv.shape[1] == 0:
        return FlatKillingClassification("no-constant-length-field", word_length=word_length,
                                         translation_bound=translation_bound)
    a = _as_array(a)
    af = _float(a)
    if not np.any(af):
        raise ValueError("direction a must be nonzero")
    resid = af - inv @ (inv.T @ af)
    if np.abs(resid).max() > NUMERIC_TOL:
        raise ValueError("direction a is not invariant under d(Gamma)")

    elements, hit_cap = enumerate_elements(G, word_length, translation_bound, cap)
    notes = []
    best = {"infinite": None, "finite": None}
    indeterminate = False
    for f, length in elements:
        if f.linear_is_identity():
            continue
        sol = _solve_witness(f, a)
        if sol is None:
            continue
        b, t = sol
        if (t == 0) if isinstance(t, Fraction) else abs(t) < NUMERIC_TOL:
            notes.append(f"element with a fixed point found (Gamma not free?): {f!r}")
            continue
        # witness identity f(b) = b + t a
        fb = f(b)
        lhs, rhs = _unify(fb, b + t * a if _exact(b) and _exact(a) else _float(b) + float(t) * af)
        if not _is_zero(lhs - rhs):
            raise AssertionError("witness identity failed")
        order = matrix_order(f.A, f.cert)
        if order.kind == "indeterminate":
            indeterminate = True
            continue
        rank = (_norm(b), length)
        slot = best[order.kind]
        if slot is None or rank < slot[0]:
            best[order.kind] = (rank, f, b, t, order)
    partial = hit_cap or indeterminate
    if hit_cap:
        notes.append(f"element cap {cap} reached")
    if indeterminate:
        notes.append("some candidate orders were indeterminate")
    common = dict(direction=a, word_length=word_length, translation_bound=translation_bound,
                  elements_searched=len(elements), partial=partial, notes=tuple(notes))
    for kind, tag in (("infinite", "mixed-closed-nonclosed"), ("finite", "quasiregular")):
        if best[kind] is not None:
            _, f, b, t, order = best[kind]
            return FlatKillingClassification(tag, witness=f, b=b, t=t, order=order, **common)
    return FlatKillingClassification("regular-or-uniform", **common)


@dataclass(frozen=True)
class FreenessReport:
    ok: bool
    min_displacement_at_origin: float
    fixed_point_elements: tuple
    elements_checked: int


def freeness_sanity(G: FlatSpaceGroup, word_length: int = 4, translation_bound: float = DEFAULT_TRANSLATION_BOUND) -> FreenessReport:
    """Look for non-identity elements with a fixed point among short words.  Not a proof of freeness."""
    elements, _ = enumerate_elements(G, word_length, translation_bound)
    bad, dmin = [], math.inf
    for f, _ in elements:
        if f.is_identity():
            continue
        dmin = min(dmin, _norm(f.a))
        A, c = _float(f.A), _float(f.a)
        M = np.eye(f.dim) - A
        x, *_ = np.linalg.lstsq(M, c, rcond=None)
        if np.abs(M @ x - c).max() < NUMERIC_TOL:
            bad.append(f)
    return FreenessReport(not bad and dmin > 0, dmin, tuple(bad), len(elements))


def conjugate_group(G: FlatSpaceGroup, h: EuclideanIsometry) -> FlatSpaceGroup:
    hinv = h.inverse()
    gens = tuple(compose(compose(h, g), hinv) for g in G.generators)
    return FlatSpaceGroup(f"{G.name}^h", gens, G.free, G.notes)


# catalog


def _diag(*entries) -> np.ndarray:
    n = len(entries)
    out = _eye(n)
    for i, v in enumerate(entries):
        out[i, i] = Fraction(v)
    return out


def _vec(*entries) -> np.ndarray:
    return np.array([Fraction(v) for v in entries], dtype=object)


ALPHA = Irrational("sqrt(2)/(2 pi)", math.sqrt(2.0) / (2.0 * math.pi))


def catalog() -> list:
    """Named example groups: torus, Moebius band, Klein bottle, G6 and J^alpha_1 (alpha = sqrt 2 rad)."""
    h = Fraction(1, 2)
    d1, d2 = _diag(1, -1, -1), _diag(-1, 1, -1)
    torus = FlatSpaceGroup("torus", (EuclideanIsometry.translation(_vec(1, 0)), EuclideanIsometry.translation(_vec(0, 1))))
    glide = EuclideanIsometry(_diag(1, -1), _vec(h, 0))
    mobius = FlatSpaceGroup("mobius", (glide,), notes="open Moebius band, generated by one glide reflection")
    klein = FlatSpaceGroup("klein", (glide, EuclideanIsometry.translation(_vec(0, 1))))
    lattice = tuple(EuclideanIsometry.translation(_vec(*row)) for row in np.eye(3, dtype=int).tolist())
    g6 = FlatSpaceGroup(
        "G6",
        (EuclideanIsometry(d1, _vec(h, h, 0)), EuclideanIsometry(d2, _vec(0, h, h))) + lattice,
        notes="compact orientable flat 3-manifold with holonomy {I, d1, d2, d3}",
    )
    rot = RotationCertificate((Turns.of(ALPHA),), (1,))
    j_alpha = FlatSpaceGroup(
        "J_alpha",
        (EuclideanIsometry(None, np.array([0.0, 0.0, 1.0]), rot),),
        notes="R^2 x [0, 1] with (x, 0) glued to (R_alpha x, 1); alpha = sqrt(2) rad",
    )
    return [torus, mobius, klein, g6, j_alpha]


def get_group(name: str) -> FlatSpaceGroup:
    norm = name.strip().lower().replace("-", "_").replace(" ", "_")
    aliases = {"moebius": "mobius", "möbius": "mobius", "klein_bottle": "klein", "j^alpha_1": "j_alpha", "jalpha": "j_alpha"}
    norm = aliases.get(norm, norm)
    for G in catalog():
        if G.name.lower() == norm:
            return G
    raise KeyError(f"unknown group {name!r}; known: {[G.name for G in catalog()]}")
