"""Random principally quasi-polarized mod-p Dieudonne modules.

A sample lives on W = F_q^{2g} with the standard alternating form.  Its
Frobenius F has kernel W1 and image W2, two independent uniform
Lagrangians, and induces a uniform semilinear isomorphism W/W1 -> W2
with coordinate matrix G.  Verschiebung is the adjoint of F for the form.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import kernels
from .errors import BudgetExceeded
from .ffq import FieldDesc, FieldTables
from .kernels import _np as vec
from .predict import gl_order, lagrangians
from .rng import draw_codes
from .semilin import (SemiMap, Subspace, fixed_space_dim, intersect, inverse,
                      rank_kernel_image, semi_compose, stable_image)

DEBUG_CHECKS = os.environ.get("PDIVSTATS_DEBUG", "0") not in ("", "0")


@dataclass(frozen=True)
class SymplecticSpace:
    field: FieldDesc
    g: int

    def __post_init__(self):
        if self.g < 1:
            raise ValueError("genus must be at least 1")

    @property
    def n(self) -> int:
        return 2 * self.g

    @property
    def J(self) -> np.ndarray:
        """Gram matrix [[0, I], [-I, 0]] with entries as codes."""
        g, ft = self.g, self.field.tables
        J = np.zeros((2 * g, 2 * g), dtype=np.int64)
        J[np.arange(g), g + np.arange(g)] = 1
        J[g + np.arange(g), np.arange(g)] = ft.neg[1]
        return J

    def omega(self, x, y) -> int:
        """The form x^T J y for code vectors x, y."""
        return int(form_matrix(self.field.tables, np.asarray(x)[None, :], np.asarray(y)[None, :])[0, 0])


def form_matrix(ft: FieldTables, X, Y) -> np.ndarray:
    """Matrix of omega(x_i, y_j) for row vectors x_i of X and y_j of Y."""
    X = np.asarray(X, dtype=np.int64)
    Y = np.asarray(Y, dtype=np.int64)
    g = X.shape[1] // 2
    A = kernels.matmul(ft, X[:, :g], np.ascontiguousarray(Y[:, g:].T))
    B = kernels.matmul(ft, X[:, g:], np.ascontiguousarray(Y[:, :g].T))
    return vec.sub(ft, A, B)


@dataclass(frozen=True)
class InvariantRecord:
    a: int
    f_rank: int
    s: int
    d: int

    @property
    def dims(self) -> tuple[int, int, int]:
        """Dimensions of the etale, multiplicative and local-local parts."""
        return self.f_rank, self.f_rank, 2 * self.s


@dataclass(frozen=True, eq=False)
class Dbt1Sample:
    space: SymplecticSpace
    F: SemiMap
    V: SemiMap
    W1: Subspace | None = None
    W2: Subspace | None = None
    G: np.ndarray | None = None

    def validate(self) -> None:
        """Assert every structural axiom; raises AssertionError on failure."""
        sp, F, V = self.space, self.F, self.V
        ft, g, m = sp.field.tables, sp.g, sp.field.m
        assert F.e == 1 % m and V.e == (m - 1) % m, "wrong twists"
        rF, kF, iF = rank_kernel_image(F)
        rV, kV, iV = rank_kernel_image(V)
        assert rF == g and rV == g, "F and V must have rank g"
        assert iF == kV and kF == iV, "im F = ker V and ker F = im V"
        assert not semi_compose(F, V).M.any() and not semi_compose(V, F).M.any(), "FV = VF = 0"
        for U in (kF, iF):
            assert U.dim == g and not form_matrix(ft, U.basis, U.basis).any(), "not Lagrangian"
        # omega(F x, y) = sigma(omega(x, V y)) on all basis pairs, i.e. M^T J = J sigma(N)
        J = sp.J
        lhs = kernels.matmul(ft, np.ascontiguousarray(F.M.T), J)
        rhs = kernels.matmul(ft, J, vec.frob(ft, V.M, 1))
        assert np.array_equal(lhs, rhs), "pairing identity fails"


def dual_map(F: SemiMap, space: SymplecticSpace) -> SemiMap:
    """V = J^{-1} sigma^{-1}(M)^T J, twist -1."""
    ft, J = space.field.tables, space.J
    Jinv = inverse(space.field, J)
    N = kernels.matmul(ft, kernels.matmul(ft, Jinv, np.ascontiguousarray(vec.frob(ft, F.M, -1).T)), J)
    return SemiMap(space.field, N, space.field.m - 1)


def sample_lagrangian(space: SymplecticSpace, rng: np.random.Generator) -> Subspace:
    """Uniform maximal isotropic subspace.

    Keeps a complement basis ``W`` of the current isotropic span inside its
    orthogonal.  Each step draws uniform nonzero coordinates on ``W``; the
    resulting vector is uniform among representatives of the new lines, so
    the spanned flag, and hence the final subspace, is uniform.  The same
    draws and pivot rules are used by the compiled kernel.
    """
    ft, g, q = space.field.tables, space.g, space.field.q
    W = np.eye(2 * g, dtype=np.int64)
    V = []
    for _ in range(g):
        while True:
            b = draw_codes(rng, q, W.shape[0])
            if b.any():
                break
        v = kernels.matmul(ft, b[None, :], W)[0]
        c = form_matrix(ft, v[None, :], W)[0]
        k = int(np.flatnonzero(c)[0])
        ratio = vec.mul(ft, c, ft.inv[c[k]])
        W2 = vec.sub(ft, W, vec.mul(ft, ratio[:, None], W[k][None, :]))
        nzb = np.flatnonzero(b)
        j2 = int(nzb[nzb != k][0])
        keep = [j for j in range(W.shape[0]) if j != k and j != j2]
        W = W2[keep]
        V.append(v)
    return Subspace.span(space.field, np.array(V), 2 * g)


def sample_invertible(field: FieldDesc, g: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform element of GL_g(F_q) by rejection; entries drawn row-major."""
    ft = field.tables
    while True:
        G = draw_codes(rng, field.q, g * g).reshape(g, g)
        if kernels.rank(ft, G) == g:
            return G


def completion(W1: Subspace, rule: str = "unit") -> np.ndarray:
    """Columns u_1..u_g completing W1's basis to a basis of W.

    ``unit`` uses unit vectors at W1's non-pivot columns.  ``reversed`` and
    ``sheared`` are alternative gauges used to check that invariants do not
    depend on this choice.
    """
    n = W1.n
    free = [c for c in range(n) if c not in set(W1.pivots.tolist())]
    g = len(free)
    U = np.zeros((n, g), dtype=np.int64)
    for j, c in enumerate(free):
        U[c, j] = 1
    if rule == "unit":
        return U
    if rule == "reversed":
        return U[:, ::-1].copy()
    if rule == "sheared":
        S = U.copy()
        S[:, :-1] += U[:, 1:]
        return S % W1.field.p
    raise ValueError(f"unknown completion rule {rule!r}")


def assemble_dbt1(space: SymplecticSpace, W1: Subspace, W2: Subspace, G, rule: str = "unit",
                  check: bool = DEBUG_CHECKS) -> Dbt1Sample:
    """Build F with kernel W1 and image W2 from the coordinate matrix G of F'.

    F sends each completion vector u_j to the j-th column of Y^T G, where
    the rows of Y are W2's RREF basis.
    """
    F, ft = space.field, space.field.tables
    G = np.asarray(G, dtype=np.int64)
    U = completion(W1, rule)
    B = np.hstack([vec.frob(ft, W1.basis, 1).T, vec.frob(ft, U, 1)])
    target = np.hstack([np.zeros((space.n, space.g), dtype=np.int64),
                        kernels.matmul(ft, np.ascontiguousarray(W2.basis.T), G)])
    M = kernels.matmul(ft, target, inverse(F, B))
    Fmap = SemiMap(F, M, 1)
    D = Dbt1Sample(space, Fmap, dual_map(Fmap, space), W1, W2, G)
    if check:
        D.validate()
    return D


def sample_dbt1(space: SymplecticSpace, rng: np.random.Generator, check: bool = DEBUG_CHECKS,
                rule: str = "unit") -> Dbt1Sample:
    W1 = sample_lagrangian(space, rng)
    W2 = sample_lagrangian(space, rng)
    G = sample_invertible(space.field, space.g, rng)
    return assemble_dbt1(space, W1, W2, G, rule, check)


def invariants_of(D: Dbt1Sample) -> InvariantRecord:
    """a-number, p-rank, p-corank and rational-point dimension of a sample."""
    _, kF, iF = rank_kernel_image(D.F)
    a = intersect(kF, iF).dim
    Y, restricted = stable_image(D.F)
    f_rank = Y.dim
    return InvariantRecord(a, f_rank, D.space.g - f_rank, fixed_space_dim(restricted))


def frobenius_on_image(ft: FieldTables, W1, W2, G) -> np.ndarray:
    """Matrix Phi with F(sum c_i y_i) = sum_l (Phi sigma(c))_l y_l on W2 = im F.

    Here y_i are W2's RREF rows and W1, W2 are RREF bases.  This is the
    restriction of F to its image, which carries all of the p-rank and
    rational-point information.
    """
    W1 = np.asarray(W1)
    g = W1.shape[0]
    piv = np.array([int(np.flatnonzero(r)[0]) for r in W1], dtype=np.int64)
    free = np.array([c for c in range(W1.shape[1]) if c not in set(piv.tolist())], dtype=np.int64)
    S = vec.frob(ft, W2, 1)                     # rows sigma(y_i)
    SW1 = vec.frob(ft, W1, 1)
    alpha = S[:, piv]                           # coefficients on sigma(w_k)
    R = vec.sub(ft, S, kernels.matmul(ft, alpha, SW1))
    beta = R[:, free].T                         # column i = beta_i
    return kernels.matmul(ft, np.asarray(G, dtype=np.int64), np.ascontiguousarray(beta)).reshape(g, g)


def fast_invariants(ft: FieldTables, W1, W2, G, full: bool = True) -> tuple[int, int, int]:
    """(a, stable rank, fixed dim) computed on the image of F only."""
    W1 = np.asarray(W1)
    g = W1.shape[0]
    a = 2 * g - kernels.rank(ft, np.vstack([W1, W2]))
    if not full:
        return a, -1, -1
    Phi = frobenius_on_image(ft, W1, W2, G)
    return a, int(kernels.stable_rank(ft, Phi, 1)), int(kernels.fixed_dim(ft, Phi, 1))


def all_lagrangians(space: SymplecticSpace) -> list[Subspace]:
    """Every maximal isotropic subspace, by enumerating RREF matrices."""
    F, ft, g, n = space.field, space.field.tables, space.g, space.n
    out = []
    for piv in itertools.combinations(range(n), g):
        free_slots = [(i, c) for i, pc in enumerate(piv) for c in range(pc + 1, n) if c not in piv]
        for vals in itertools.product(range(F.q), repeat=len(free_slots)):
            B = np.zeros((g, n), dtype=np.int64)
            B[np.arange(g), list(piv)] = 1
            for (i, c), v in zip(free_slots, vals):
                B[i, c] = v
            if not form_matrix(ft, B, B).any():
                out.append(Subspace(F, n, B))
    return out


def all_invertible(field: FieldDesc, g: int) -> Iterator[np.ndarray]:
    ft = field.tables
    for entries in itertools.product(range(field.q), repeat=g * g):
        G = np.array(entries, dtype=np.int64).reshape(g, g)
        if kernels.rank(ft, G) == g:
            yield G


def exhaustive_model(space: SymplecticSpace, budget: int = 10 ** 6,
                     rule: str = "unit") -> Iterator[tuple[Dbt1Sample, int]]:
    """Every (W1, W2, F') triple once, each with multiplicity 1."""
    q, g = space.field.q, space.g
    total = lagrangians(q, g) ** 2 * gl_order(q, g)
    if total > budget:
        raise BudgetExceeded(f"{total} triples exceed the budget {budget}")
    lags = all_lagrangians(space)
    gs = list(all_invertible(space.field, g))
    for W1 in lags:
        for W2 in lags:
            for G in gs:
                yield assemble_dbt1(space, W1, W2, G, rule), 1


def exhaustive_counts(space: SymplecticSpace, budget: int = 10 ** 6, full: bool = True):
    """Histogram of (a, f_rank, d) over all triples, via the image restriction."""
    from collections import Counter
    q, g = space.field.q, space.g
    total = lagrangians(q, g) ** 2 * gl_order(q, g)
    if total > budget:
        raise BudgetExceeded(f"{total} triples exceed the budget {budget}")
    ft = space.field.tables
    lags = all_lagrangians(space)
    gs = list(all_invertible(space.field, g))
    hist: Counter = Counter()
    for W1 in lags:
        for W2 in lags:
            for G in gs:
                hist[fast_invariants(ft, W1.basis, W2.basis, G, full)] += 1
    return hist


def injection_count(rec: InvariantRecord | int, m: int, q: int) -> int:
    """Number of injections F_q^m -> F_q^a, with a the record's a-number."""
    if m < 1:
        raise ValueError("m must be at least 1")
    a = rec.a if isinstance(rec, InvariantRecord) else int(rec)
    out = 1
    for i in range(m):
        out *= q ** a - q ** i
    return out


def surjection_count(rec: InvariantRecord | int, delta: int, p: int) -> int:
    """Number of surjections (Z/p)^d -> (Z/p)^delta."""
    if delta < 1:
        raise ValueError("delta must be at least 1")
    d = rec.d if isinstance(rec, InvariantRecord) else int(rec)
    if d < delta:
        return 0
    out = 1
    for i in range(delta):
        out *= p ** d - p ** i
    return out


def model_block_numpy(field: FieldDesc, g: int, seed: int, start: int, count: int,
                      full: bool = True) -> np.ndarray:
    """Invariants (a, f_rank, d) of trials start..start+count-1, numpy path."""
    from .rng import rng_stream
    space = SymplecticSpace(field, g)
    ft = field.tables
    out = np.empty((count, 3), dtype=np.int64)
    for t in range(count):
        rng = rng_stream(seed, start + t)
        W1 = sample_lagrangian(space, rng)
        W2 = sample_lagrangian(space, rng)
        G = sample_invertible(field, g, rng)
        out[t] = fast_invariants(ft, W1.basis, W2.basis, G, full)
    return out


def model_block(field: FieldDesc, g: int, seed: int, start: int, count: int,
                full: bool = True, backend: str | None = None) -> np.ndarray:
    """Invariants of a contiguous block of trials on the selected backend."""
    use_nb = kernels.USE_NUMBA if backend is None else backend == "numba"
    if not use_nb:
        return model_block_numpy(field, g, seed, start, count, full)
    from .kernels import _nb_blocks
    from .rng import reject_threshold, stream_key
    k0, k1 = stream_key(seed)
    out = np.empty((count, 3), dtype=np.int64)
    _nb_blocks.model_block(field.tables, np.uint64(k0), np.uint64(k1), np.int64(start), count, g,
                           np.uint64(reject_threshold(field.q)), full, out)
    return out
