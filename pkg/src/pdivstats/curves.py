"""Cartier-Manin data of hyperelliptic and smooth plane curves.

Hyperelliptic curves ``y^2 = f(x)`` use the coefficient formula
``A[i][j] = c_{p i - j}`` with ``f^{(p-1)/2} = sum c_k x^k``.  Plane curves
use the Stohr-Voloch description of the Cartier operator on the basis
``x^a y^b dx / f_y`` (a + b <= d - 3) of the chart z = 1.  Small curves can
also be point-counted to recover the numerator of the zeta function, which
serves as an independent oracle.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field as dc_field
from math import comb
from typing import Iterator

import numpy as np

from . import kernels
from .errors import BudgetExceeded, InvalidSpec
from .ffq import FieldDesc, FieldElement, PolyFq, field_create, is_squarefree, poly_pow_coeffs
from .kernels import _np as vec
from .model import InvariantRecord
from .rng import draw_codes
from .semilin import SemiMap, fixed_space_dim, stable_image

# ---------------------------------------------------------------- data types


@dataclass(frozen=True, eq=False)
class CartierData:
    """A: Cartier operator on regular differentials (twist -1).
    Dblock: Frobenius on H^1(O) as sigma(A)^T (twist +1)."""

    A: SemiMap
    Dblock: SemiMap


@dataclass(frozen=True)
class HyperCurve:
    field: FieldDesc
    f: PolyFq

    def __post_init__(self):
        if self.field.p == 2:
            raise InvalidSpec("hyperelliptic models y^2 = f need odd characteristic")
        if self.f.field != self.field:
            raise ValueError("polynomial over a different field")
        if self.f.degree < 3:
            raise InvalidSpec("need deg f >= 3")
        if self.f.coeffs[-1] != 1:
            raise InvalidSpec("f must be monic")
        if not is_squarefree(self.f):
            raise InvalidSpec("f must be squarefree")

    @property
    def degree(self) -> int:
        return self.f.degree

    @property
    def genus(self) -> int:
        return (self.f.degree - 1) // 2


@dataclass(frozen=True)
class ZetaData:
    """Numerator P(T) of the zeta function (constant term first), P(1), and v_p(P(1))."""

    P: tuple[int, ...]
    jac_order: int
    v_p: int
    counts: tuple[int, ...] = dc_field(default=())


def _vp(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------- hyperelliptic


def sample_monic_squarefree(field: FieldDesc, d: int, rng: np.random.Generator) -> PolyFq:
    """Uniform monic squarefree polynomial of degree d; draws a_0..a_{d-1} per attempt."""
    if d < 1:
        raise InvalidSpec("degree must be positive")
    while True:
        low = draw_codes(rng, field.q, d)
        f = PolyFq(field, list(low) + [1])
        if is_squarefree(f):
            return f


def iterate_all_monic_squarefree(field: FieldDesc, d: int, budget: int = 10 ** 8,
                                 start: int = 0, stop: int | None = None) -> Iterator[PolyFq]:
    """Every monic squarefree polynomial of degree d, in index order.

    Index i encodes a_0..a_{d-1} as base-q digits with a_0 least significant,
    so fixing the top coefficients selects a contiguous index range.
    """
    total = field.q ** d
    if total > budget:
        raise BudgetExceeded(f"{total} polynomials exceed the budget {budget}")
    ft = field.tables
    stop = total if stop is None else stop
    q = field.q
    for idx in range(start, stop):
        low, k = [], idx
        for _ in range(d):
            k, r = divmod(k, q)
            low.append(r)
        arr = np.array(low + [1], dtype=np.int64)
        if kernels.squarefree(ft, arr):
            yield PolyFq(field, arr)


def cartier_manin(C: HyperCurve) -> CartierData:
    ft = C.field.tables
    A = kernels.cartier_manin(ft, C.f.array(), C.genus)
    D = vec.frob(ft, A, 1).T.copy()
    return CartierData(SemiMap(C.field, A, -1), SemiMap(C.field, D, 1))


def invariants_from_cartier(cd: CartierData) -> InvariantRecord:
    g = cd.A.n
    a = g - int(kernels.rank(cd.A.field.tables, cd.A.M))
    Y, restricted = stable_image(cd.Dblock)
    return InvariantRecord(a, Y.dim, g - Y.dim, fixed_space_dim(restricted))


def hyper_invariants(C: HyperCurve) -> InvariantRecord:
    return invariants_from_cartier(cartier_manin(C))


def det(field: FieldDesc, A) -> int:
    """Determinant (as a code) by Gaussian elimination."""
    ft = field.tables
    R = np.array(A, dtype=np.int64, copy=True)
    n = R.shape[0]
    out, sign = 1, 1
    for c in range(n):
        nz = np.flatnonzero(R[c:, c])
        if nz.size == 0:
            return 0
        k = c + nz[0]
        if k != c:
            R[[c, k]] = R[[k, c]]
            sign = -sign
        piv = R[c, c]
        out = int(vec.mul(ft, out, piv))
        below = R[c + 1:, c]
        idx = np.flatnonzero(below) + c + 1
        if idx.size:
            f = vec.mul(ft, R[idx, c], ft.inv[piv])
            R[idx] = vec.sub(ft, R[idx], vec.mul(ft, f[:, None], R[c][None, :]))
    return out if sign == 1 else int(ft.neg[out])


def jac_order_mod_p(cd: CartierData) -> int:
    """|Jac(F_q)| mod p, as det(I - D') with D' the q-power Frobenius on H^1(O)."""
    from .semilin import semi_power
    F = cd.Dblock.field
    ft = F.tables
    Dp = semi_power(cd.Dblock, F.m).M
    n = Dp.shape[0]
    val = det(F, vec.sub(ft, np.eye(n, dtype=np.int64), Dp))
    if val >= F.p:
        raise AssertionError("determinant is not in the prime field")
    return val


# ---------------------------------------------------------------- zeta oracle


def embedding(F: FieldDesc, E: FieldDesc) -> np.ndarray:
    """Codes of F mapped into E (E must contain F), via the least root of F's modulus."""
    if E.p != F.p or E.m % F.m:
        raise ValueError(f"{F} does not embed in {E}")
    if F.m == 1:
        return np.arange(F.q, dtype=np.int64)
    et = E.tables
    xs = np.arange(E.q, dtype=np.int64)
    acc = np.zeros(E.q, dtype=np.int64)
    for c in reversed(F.modulus):
        acc = vec.add(et, vec.mul(et, acc, xs), np.full(E.q, c, dtype=np.int64))
    r = int(np.flatnonzero(acc == 0)[0])
    powers = [1]
    for _ in range(F.m - 1):
        powers.append(int(vec.mul(et, powers[-1], r)))
    digits = F.tables.digits
    out = np.zeros(F.q, dtype=np.int64)
    for j in range(F.m):
        out = vec.add(et, out, vec.mul(et, digits[:, j], powers[j]))
    return out


def _quadratic_character(E: FieldDesc) -> np.ndarray:
    """chi(x) for every code x of E (odd characteristic)."""
    et = E.tables
    chi = np.where(et.log % 2 == 0, 1, -1).astype(np.int64)
    chi[0] = 0
    return chi


def _zeta_from_counts(q: int, g: int, counts) -> tuple[int, ...]:
    """P(T) from N_1..N_g via Newton's identities and the functional equation."""
    s = [0] + [q ** k + 1 - int(counts[k - 1]) for k in range(1, g + 1)]
    a = [1] + [0] * (2 * g)
    for j in range(1, g + 1):
        tot = sum(s[i] * a[j - i] for i in range(1, j + 1))
        if tot % j:
            raise AssertionError("inconsistent point counts")
        a[j] = -tot // j
    for j in range(g):
        a[2 * g - j] = q ** (g - j) * a[j]
    return tuple(a)


def hyper_point_counts(C: HyperCurve, kmax: int, budget: int = 10 ** 7) -> list[int]:
    F = C.field
    out = []
    for k in range(1, kmax + 1):
        E = field_create(F.p, F.m * k)
        if E.q > budget:
            raise BudgetExceeded(f"point count over a field of size {E.q} exceeds the budget")
        et = E.tables
        emb = embedding(F, E)
        xs = np.arange(E.q, dtype=np.int64)
        acc = np.zeros(E.q, dtype=np.int64)
        for c in reversed(C.f.coeffs):
            acc = vec.add(et, vec.mul(et, acc, xs), np.full(E.q, emb[c], dtype=np.int64))
        affine = E.q + int(_quadratic_character(E)[acc].sum())
        infinity = 1 if C.degree % 2 else 2
        out.append(affine + infinity)
    return out


def naive_zeta(C: HyperCurve, budget: int = 10 ** 7) -> ZetaData:
    """Zeta numerator by counting points over F_{q^k}, k = 1..g."""
    g = C.genus
    counts = hyper_point_counts(C, g, budget)
    P = _zeta_from_counts(C.field.q, g, counts)
    n = sum(P)
    return ZetaData(P, n, _vp(n, C.field.p), tuple(counts))


# ---------------------------------------------------------------- plane curves


@functools.lru_cache(maxsize=None)
def monomials(d: int) -> tuple[tuple[int, int, int], ...]:
    """Exponents of degree-d monomials in X, Y, Z: X-exponent descending, then Y descending."""
    return tuple((a, b, d - a - b) for a in range(d, -1, -1) for b in range(d - a, -1, -1))


def mono_index(D: int, a: int, b: int) -> int:
    return (D - a) * (D - a + 1) // 2 + (D - a - b)


@dataclass(frozen=True, eq=False)
class PlaneCurve:
    """Homogeneous form of degree d; ``coeffs`` maps exponent triples to codes."""

    field: FieldDesc
    d: int
    coeffs: dict

    def __post_init__(self):
        clean = {}
        for e, c in self.coeffs.items():
            e = tuple(int(x) for x in e)
            if len(e) != 3 or sum(e) != self.d or min(e) < 0:
                raise InvalidSpec(f"monomial {e} is not of degree {self.d}")
            c = c.code if isinstance(c, FieldElement) else int(c)
            if self.field.m == 1:
                c %= self.field.p
            if c:
                clean[e] = c
        object.__setattr__(self, "coeffs", clean)

    @property
    def genus(self) -> int:
        return (self.d - 1) * (self.d - 2) // 2

    def dense(self) -> np.ndarray:
        return np.array([self.coeffs.get(e, 0) for e in monomials(self.d)], dtype=np.int64)

    @classmethod
    def from_dense(cls, field: FieldDesc, d: int, arr) -> "PlaneCurve":
        return cls(field, d, {e: int(c) for e, c in zip(monomials(d), arr) if c})


def partial(field: FieldDesc, d: int, dense, var: int) -> np.ndarray:
    """Dense coefficients of the partial derivative in variable var (0, 1, 2)."""
    ft = field.tables
    out = np.zeros(comb(d + 1, 2), dtype=np.int64)
    for t, e in enumerate(monomials(d)):
        if e[var] and dense[t]:
            f = list(e)
            f[var] -= 1
            out[mono_index(d - 1, f[0], f[1])] = int(vec.mul(ft, dense[t], e[var] % field.p))
    return out


@functools.lru_cache(maxsize=None)
def macaulay_layout(d: int, p: int):
    """Index arrays describing the Macaulay matrix used by the smoothness test.

    Generators are the three partials, plus the form itself when p | d
    (otherwise Euler's identity makes it redundant).  Returns
    (rows, cols, src, fac, nrows, ncols): entry (rows[k], cols[k]) holds
    fac[k] times the coefficient of the form at dense index src[k].
    """
    use_form = d % p == 0
    D = 3 * d - 4 if use_form else 3 * d - 5
    mons = monomials(d)
    gens = []                      # (degree, list of (exps, src, fac))
    if use_form:
        gens.append((d, [(e, t, 1) for t, e in enumerate(mons)]))
    for var in range(3):
        terms = []
        for t, e in enumerate(mons):
            if e[var] % p:
                f = list(e)
                f[var] -= 1
                terms.append((tuple(f), t, e[var] % p))
        gens.append((d - 1, terms))
    rows, cols, src, fac = [], [], [], []
    r = 0
    for deg, terms in gens:
        for mu in monomials(D - deg):
            for e, t, c in terms:
                rows.append(r)
                cols.append(mono_index(D, e[0] + mu[0], e[1] + mu[1]))
                src.append(t)
                fac.append(c)
            r += 1
    arr = lambda x: np.array(x, dtype=np.int64)
    return arr(rows), arr(cols), arr(src), arr(fac), r, comb(D + 2, 2)


def macaulay_matrix(field: FieldDesc, d: int, dense) -> np.ndarray:
    rows, cols, src, fac, R, C = macaulay_layout(d, field.p)
    M = np.zeros((R, C), dtype=np.int64)
    M[rows, cols] = vec.mul(field.tables, np.asarray(dense, dtype=np.int64)[src], fac)
    return M


def is_smooth(X: PlaneCurve) -> bool:
    """No common projective zero of the form and its partials over the algebraic closure.

    Exact test: the partials (and the form itself when p | d) generate every
    form of degree 3d-5 (3d-4 when p | d) iff they have no common zero.
    """
    dense = X.dense()
    if not dense.any():
        return False
    if X.d == 1:
        return True
    M = macaulay_matrix(X.field, X.d, dense)
    return int(kernels.rank(X.field.tables, M)) == M.shape[1]


@functools.lru_cache(maxsize=None)
def chart_layout(d: int):
    """Affine exponents (x, y) of each dense monomial under the three variable orders.

    Order 0 keeps (X, Y, Z); order 1 swaps X and Y; order 2 swaps Y and Z.
    """
    mons = monomials(d)
    ax = np.array([[e[0] for e in mons], [e[1] for e in mons], [e[0] for e in mons]], dtype=np.int64)
    by = np.array([[e[1] for e in mons], [e[0] for e in mons], [e[2] for e in mons]], dtype=np.int64)
    return ax, by


def chart_choice(field: FieldDesc, d: int, dense) -> int:
    """First variable order whose new Y-partial is nonzero."""
    p = field.p
    mons = monomials(d)
    for order, var in enumerate((1, 0, 2)):
        if any(c and e[var] % p for c, e in zip(dense, mons)):
            return order
    raise InvalidSpec("all partial derivatives vanish; the form is a p-th power")


@functools.lru_cache(maxsize=None)
def cartier_layout(d: int, p: int):
    """For basis pairs (i, j) the exponent (ex, ey) read from f^{p-1}, or -1.

    Basis x^a y^b with a + b <= d - 3, ordered by a then b.  Entry (i, j)
    of the unrooted matrix is the coefficient of x^{p u + p - 1 - a}
    y^{p v + p - 1 - b} in f^{p-1}, where (u, v) is basis element i and
    (a, b) is basis element j.
    """
    basis = [(a, b) for a in range(d - 2) for b in range(d - 2 - a)]
    g = len(basis)
    ex = np.full((g, g), -1, dtype=np.int64)
    ey = np.full((g, g), -1, dtype=np.int64)
    top = (p - 1) * d
    for i, (u, v) in enumerate(basis):
        for j, (a, b) in enumerate(basis):
            x = p * u + p - 1 - a
            y = p * v + p - 1 - b
            if 0 <= x <= top and 0 <= y <= top:
                ex[i, j] = x
                ey[i, j] = y
    return basis, ex, ey


def affine_poly(field: FieldDesc, d: int, dense, order: int) -> np.ndarray:
    ax, by = chart_layout(d)
    f = np.zeros((d + 1, d + 1), dtype=np.int64)
    f[ax[order], by[order]] = dense
    return f


def poly2_mul(field: FieldDesc, a, b) -> np.ndarray:
    ft = field.tables
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1), dtype=np.int64)
    for i, j in zip(*np.nonzero(b)):
        blk = out[i:i + a.shape[0], j:j + a.shape[1]]
        out[i:i + a.shape[0], j:j + a.shape[1]] = vec.add(ft, blk, vec.mul(ft, a, b[i, j]))
    return out


def plane_cartier_unrooted(field: FieldDesc, d: int, dense, order: int | None = None) -> np.ndarray:
    """Coefficient matrix before the entrywise p-th root.

    ``order`` forces a variable order (see :func:`chart_layout`); its new
    Y-partial must not vanish.  For smooth curves of degree >= 3 no partial
    vanishes identically (a smooth plane curve all of whose tangents meet
    in one point is a line or a conic), so the default order 0 is always
    usable and the others exist as a cross-check.
    """
    p = field.p
    if order is None:
        order = chart_choice(field, d, dense)
    f = affine_poly(field, d, dense, order)
    h = np.ones((1, 1), dtype=np.int64)
    for _ in range(p - 1):
        h = poly2_mul(field, h, f)
    _, ex, ey = cartier_layout(d, p)
    ok = ex >= 0
    out = np.zeros(ex.shape, dtype=np.int64)
    out[ok] = h[ex[ok], ey[ok]]
    return out


def plane_cartier(X: PlaneCurve, check_smooth: bool = True) -> CartierData:
    if X.d < 3:
        raise InvalidSpec("plane curves of degree < 3 have genus 0")
    if check_smooth and not is_smooth(X):
        raise InvalidSpec("the form does not define a smooth curve")
    ft = X.field.tables
    c = plane_cartier_unrooted(X.field, X.d, X.dense())
    A = vec.frob(ft, c, -1)
    return CartierData(SemiMap(X.field, A, -1), SemiMap(X.field, c.T.copy(), 1))


def plane_invariants(X: PlaneCurve) -> InvariantRecord:
    return invariants_from_cartier(plane_cartier(X))


def parity_condition(X: PlaneCurve) -> bool:
    """Some monomial with nonzero coefficient has at least two odd exponents.

    Cross-checked against the equivalent statement that each partial
    derivative is not the square of a form.
    """
    if X.field.p != 2 or X.d % 2 == 0:
        raise InvalidSpec("parity condition is defined for odd degree in characteristic 2")
    by_monomial = any(sum(x % 2 for x in e) >= 2 for e in X.coeffs)
    dense = X.dense()
    for var in range(3):
        by_square = not is_square_form(X.field, X.d - 1, partial(X.field, X.d, dense, var))
        if by_square != by_monomial:
            raise AssertionError("parity criteria disagree")
    return by_monomial


def is_square_form(field: FieldDesc, d: int, dense) -> bool:
    """Whether a degree-d form is the square of a form (characteristic 2).

    Builds the candidate root from even-exponent monomials and verifies it
    by squaring.
    """
    if field.p != 2:
        raise InvalidSpec("square-form test implemented for characteristic 2")
    if d % 2:
        return not np.asarray(dense).any()
    ft = field.tables
    half = d // 2
    root = np.zeros(comb(half + 2, 2), dtype=np.int64)
    for t, e in enumerate(monomials(d)):
        if dense[t] and all(x % 2 == 0 for x in e):
            root[mono_index(half, e[0] // 2, e[1] // 2)] = int(vec.frob(ft, dense[t], -1))
    sq = np.zeros(comb(d + 2, 2), dtype=np.int64)
    for t, e in enumerate(monomials(half)):
        if root[t]:
            sq[mono_index(d, 2 * e[0], 2 * e[1])] = int(vec.mul(ft, root[t], root[t]))
    return np.array_equal(sq, np.asarray(dense, dtype=np.int64))


def sample_plane_curve(field: FieldDesc, d: int, rng: np.random.Generator) -> PlaneCurve:
    """Uniform smooth form of degree d: coefficients drawn in monomial order, rejecting
    the zero form and singular curves."""
    n = comb(d + 2, 2)
    while True:
        dense = draw_codes(rng, field.q, n)
        if not dense.any():
            continue
        X = PlaneCurve.from_dense(field, d, dense)
        if is_smooth(X):
            return X


def plane_point_counts(X: PlaneCurve, kmax: int, budget: int = 10 ** 7) -> list[int]:
    """Projective points of the curve over F_{q^k}, k = 1..kmax."""
    F = X.field
    out = []
    for k in range(1, kmax + 1):
        E = field_create(F.p, F.m * k)
        if E.q ** 2 > budget:
            raise BudgetExceeded(f"point count over a field of size {E.q} exceeds the budget")
        et = E.tables
        emb = embedding(F, E)
        xs = np.arange(E.q, dtype=np.int64)
        pw = np.zeros((X.d + 1, E.q), dtype=np.int64)
        pw[0] = 1
        for e in range(1, X.d + 1):
            pw[e] = vec.mul(et, pw[e - 1], xs)
        grid = np.zeros((E.q, E.q), dtype=np.int64)          # z = 1
        line = np.zeros(E.q, dtype=np.int64)                 # z = 0, y = 1
        corner = 0                                           # (1:0:0)
        for (a, b, c), code in X.coeffs.items():
            cc = emb[code]
            term = vec.mul(et, vec.mul(et, pw[a][:, None], pw[b][None, :]), cc)
            grid = vec.add(et, grid, term)
            if c == 0:
                line = vec.add(et, line, vec.mul(et, pw[a], cc))
                if b == 0:
                    corner = int(vec.add(et, corner, cc))
        out.append(int((grid == 0).sum() + (line == 0).sum() + (corner == 0)))
    return out


def plane_zeta(X: PlaneCurve, budget: int = 10 ** 7) -> ZetaData:
    g = X.genus
    counts = plane_point_counts(X, g, budget)
    P = _zeta_from_counts(X.field.q, g, counts)
    n = sum(P)
    return ZetaData(P, n, _vp(n, X.field.p), tuple(counts))


# ---------------------------------------------------------------- survey blocks


def _use_numba(backend: str | None) -> bool:
    if backend is None:
        return kernels.USE_NUMBA
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend == "numba"


def _curve_row(ft, A, full):
    return kernels.numpy_backend.curve_invariants(ft, A, full)


def hyper_block(field: FieldDesc, d: int, seed: int, start: int, count: int,
                full: bool = True, backend: str | None = None) -> np.ndarray:
    """Invariants (a, f_rank, d) of random curves y^2 = f, one per trial index."""
    if field.p == 2:
        raise InvalidSpec("hyperelliptic models y^2 = f need odd characteristic")
    g = (d - 1) // 2
    out = np.empty((count, 3), dtype=np.int64)
    if _use_numba(backend):
        from .kernels import _nb_blocks
        from .rng import reject_threshold, stream_key
        k0, k1 = stream_key(seed)
        _nb_blocks.hyper_block(field.tables, np.uint64(k0), np.uint64(k1), np.int64(start), count,
                               d, g, np.uint64(reject_threshold(field.q)), full, out)
        return out
    from .rng import rng_stream
    ft = field.tables
    for t in range(count):
        f = sample_monic_squarefree(field, d, rng_stream(seed, start + t))
        out[t] = _curve_row(ft, kernels.numpy_backend.cartier_manin(ft, f.array(), g), full)
    return out


def hyper_exhaustive(field: FieldDesc, d: int, start: int = 0, stop: int | None = None,
                     full: bool = False, backend: str | None = None,
                     budget: int = 10 ** 9) -> dict:
    """Counts of invariant triples over monic squarefree f with index in [start, stop).

    Keys are (a, f_rank, d) with None for quantities that were not computed.
    """
    if field.p == 2:
        raise InvalidSpec("hyperelliptic models y^2 = f need odd characteristic")
    total = field.q ** d
    stop = total if stop is None else min(stop, total)
    if stop - start > budget:
        raise BudgetExceeded(f"{stop - start} polynomials exceed the budget {budget}")
    g = (d - 1) // 2
    ft = field.tables
    counts: dict = {}
    if _use_numba(backend):
        from .kernels import _nb_blocks
        hist = np.zeros((g + 1, g + 2, g * field.m + 2), dtype=np.int64)
        _nb_blocks.hyper_exhaustive(ft, np.int64(start), np.int64(stop), d, g, full, hist)
        for a, s1, f1 in zip(*np.nonzero(hist)):
            key = (int(a), None if s1 == 0 else int(s1) - 1, None if f1 == 0 else int(f1) - 1)
            counts[key] = int(hist[a, s1, f1])
        return counts
    for f in iterate_all_monic_squarefree(field, d, budget=max(budget, total), start=start, stop=stop):
        a, s, x = _curve_row(ft, kernels.numpy_backend.cartier_manin(ft, f.array(), g), full)
        key = (int(a), None if s < 0 else int(s), None if x < 0 else int(x))
        counts[key] = counts.get(key, 0) + 1
    return counts


@functools.lru_cache(maxsize=None)
def _parity_mask(d: int) -> np.ndarray:
    return np.array([sum(x % 2 for x in e) >= 2 for e in monomials(d)], dtype=np.bool_)


def plane_block(field: FieldDesc, d: int, seed: int, start: int, count: int,
                full: bool = True, backend: str | None = None) -> np.ndarray:
    """Invariants of random smooth plane curves: columns (a, f_rank, d, parity flag)."""
    if d < 3:
        raise InvalidSpec("plane curves of degree < 3 have genus 0")
    out = np.empty((count, 4), dtype=np.int64)
    mask = _parity_mask(d)
    if _use_numba(backend):
        from .kernels import _nb_blocks
        from .rng import reject_threshold, stream_key
        k0, k1 = stream_key(seed)
        rows, cols, src, fac, R, C = macaulay_layout(d, field.p)
        ax, by = chart_layout(d)
        _, ex, ey = cartier_layout(d, field.p)
        _nb_blocks.plane_block(field.tables, np.uint64(k0), np.uint64(k1), np.int64(start), count, d,
                               np.uint64(reject_threshold(field.q)), full, rows, cols, src, fac,
                               R, C, ax, by, ex, ey, mask, out)
        return out
    from .rng import rng_stream
    ft = field.tables
    for t in range(count):
        X = sample_plane_curve(field, d, rng_stream(seed, start + t))
        dense = X.dense()
        out[t, :3] = _curve_row(ft, plane_cartier_unrooted(field, d, dense), full)
        out[t, 3] = int(bool((mask & (dense != 0)).any()))
    return out


# ---------------------------------------------------------------- oracle sweep


@dataclass(frozen=True, eq=False)
class OracleSweep:
    """Every squarefree f of one degree: invariants, point counts N_1..N_g and |Jac(F_q)|."""

    field: FieldDesc
    genus: int
    a: np.ndarray
    f_rank: np.ndarray
    d: np.ndarray
    counts: np.ndarray
    jac_order: np.ndarray


def _index_coeffs(q: int, d: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    C = np.empty((idx.size, d + 1), dtype=np.int64)
    for i in range(d):
        C[:, i] = idx % q
        idx //= q
    C[:, d] = 1
    return C


def _point_counts_numpy(et, C, chi, infinity) -> np.ndarray:
    xs = np.arange(et.q, dtype=np.int64)
    acc = np.repeat(C[:, -1:], et.q, axis=1)
    for i in range(C.shape[1] - 2, -1, -1):
        acc = vec.add(et, vec.mul(et, acc, xs[None, :]), np.repeat(C[:, i:i + 1], et.q, axis=1))
    return et.q + chi[acc].sum(axis=1) + infinity


def hyper_oracle_sweep(field: FieldDesc, g: int, odd: bool = True, budget: int = 10 ** 7,
                       backend: str | None = None, chunk: int = 1 << 15) -> OracleSweep:
    """Cartier invariants and naive zeta data for every curve y^2 = f with deg f = 2g+1
    (or 2g+2 when ``odd`` is false)."""
    if field.p == 2:
        raise InvalidSpec("hyperelliptic models y^2 = f need odd characteristic")
    d = 2 * g + (1 if odd else 2)
    q = field.q
    total = q ** d
    if total > budget:
        raise BudgetExceeded(f"{total} polynomials exceed the budget {budget}")
    ft = field.tables
    nb = _use_numba(backend)
    exts = []
    for k in range(1, g + 1):
        E = field_create(field.p, field.m * k)
        exts.append((E.tables, embedding(field, E), _quadratic_character(E)))
    infinity = 1 if d % 2 else 2
    parts = {"a": [], "f": [], "d": [], "n": []}
    for s in range(0, total, chunk):
        e = min(s + chunk, total)
        rows = np.empty((e - s, 3), dtype=np.int64)
        if nb:
            from .kernels import _nb_blocks
            _nb_blocks.hyper_rows(ft, np.int64(s), np.int64(e), d, g, rows)
        else:
            C0 = _index_coeffs(q, d, s, e)
            for t in range(e - s):
                if kernels.numpy_backend.squarefree(ft, C0[t]):
                    rows[t] = _curve_row(ft, kernels.numpy_backend.cartier_manin(ft, C0[t], g), True)
                else:
                    rows[t] = -1
        keep = rows[:, 0] >= 0
        C = _index_coeffs(q, d, s, e)[keep]
        counts = np.empty((C.shape[0], g), dtype=np.int64)
        for k, (et, emb, chi) in enumerate(exts):
            Ce = emb[C]
            if nb:
                from .kernels import _nb_blocks
                _nb_blocks.hyper_point_counts(et, Ce, chi, infinity, counts[:, k])
            else:
                counts[:, k] = _point_counts_numpy(et, Ce, chi, infinity)
        parts["a"].append(rows[keep, 0])
        parts["f"].append(rows[keep, 1])
        parts["d"].append(rows[keep, 2])
        parts["n"].append(counts)
    counts = np.concatenate(parts["n"])
    return OracleSweep(field, g, np.concatenate(parts["a"]), np.concatenate(parts["f"]),
                       np.concatenate(parts["d"]), counts, jac_orders(q, g, counts))


def jac_orders(q: int, g: int, counts: np.ndarray) -> np.ndarray:
    """P(1) for each row of point counts N_1..N_g (vectorized Newton identities)."""
    n = counts.shape[0]
    s = [None] + [q ** k + 1 - counts[:, k - 1].astype(object) for k in range(1, g + 1)]
    a = [np.ones(n, dtype=object)] + [None] * (2 * g)
    for j in range(1, g + 1):
        tot = sum(s[i] * a[j - i] for i in range(1, j + 1))
        a[j] = -tot // j
    for j in range(g):
        a[2 * g - j] = q ** (g - j) * a[j]
    return np.array(sum(a), dtype=object)
