"""Frobenius-twisted linear algebra over F_q.

A :class:`SemiMap` ``(M, e)`` acts on column vectors by ``x -> M sigma^e(x)``
where sigma is the p-power Frobenius applied entrywise.  Subspaces are kept
as row bases in reduced row echelon form, so equal subspaces compare equal.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
import itertools

import numpy as np

from . import kernels
from .errors import BudgetExceeded
from .ffq import FieldDesc
from .kernels import _np as vec


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.int64, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class SemiMap:
    field: FieldDesc
    M: np.ndarray
    e: int = 0

    def __post_init__(self):
        M = _frozen(self.M)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError(f"matrix must be square, got shape {M.shape}")
        if M.size and (M.min() < 0 or M.max() >= self.field.q):
            raise ValueError("matrix entries are not codes of this field")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "e", int(self.e) % self.field.m)

    @property
    def n(self) -> int:
        return self.M.shape[0]

    @classmethod
    def identity(cls, field: FieldDesc, n: int) -> "SemiMap":
        return cls(field, np.eye(n, dtype=np.int64), 0)

    def __call__(self, x) -> np.ndarray:
        ft = self.field.tables
        x = np.asarray(x, dtype=np.int64)
        return kernels.matmul(ft, self.M, vec.frob(ft, x.reshape(self.n, -1), self.e)).reshape(x.shape)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SemiMap):
            return NotImplemented
        return (self.field == other.field and self.e == other.e
                and np.array_equal(self.M, other.M))

    def __hash__(self):
        return hash((self.field, self.e, self.M.tobytes()))

    def __matmul__(self, other: "SemiMap") -> "SemiMap":
        return semi_compose(self, other)

    def __repr__(self) -> str:
        return f"SemiMap({self.field!r}, e={self.e}, M={self.M.tolist()})"


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of F_q^n given by an RREF row basis."""

    field: FieldDesc
    n: int
    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.int64).reshape(-1, self.n)
        object.__setattr__(self, "basis", _frozen(b))

    @classmethod
    def span(cls, field: FieldDesc, vectors, n: int | None = None) -> "Subspace":
        vectors = np.asarray(vectors, dtype=np.int64)
        if n is None:
            n = vectors.shape[-1]
        vectors = vectors.reshape(-1, n)
        if vectors.shape[0] == 0:
            return cls(field, n, np.zeros((0, n), dtype=np.int64))
        R, r, _ = kernels.rref(field.tables, vectors)
        return cls(field, n, R[:r])

    @classmethod
    def zero(cls, field: FieldDesc, n: int) -> "Subspace":
        return cls(field, n, np.zeros((0, n), dtype=np.int64))

    @classmethod
    def full(cls, field: FieldDesc, n: int) -> "Subspace":
        return cls(field, n, np.eye(n, dtype=np.int64))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def pivots(self) -> np.ndarray:
        return np.array([int(np.flatnonzero(row)[0]) for row in self.basis], dtype=np.int64)

    def contains(self, v) -> bool:
        v = np.asarray(v, dtype=np.int64).reshape(1, self.n)
        return kernels.rank(self.field.tables, np.vstack([self.basis, v])) == self.dim

    def coordinates(self, v) -> np.ndarray:
        """Coordinates of a member vector in the RREF basis."""
        return np.asarray(v, dtype=np.int64)[..., self.pivots]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.field == other.field and self.n == other.n and np.array_equal(self.basis, other.basis)

    def __hash__(self):
        return hash((self.field, self.n, self.basis.tobytes()))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, n={self.n}, basis={self.basis.tolist()})"


def _check_pair(S1: SemiMap, S2: SemiMap):
    if S1.field != S2.field:
        raise ValueError("semilinear maps over different fields")
    if S1.n != S2.n:
        raise ValueError(f"dimension mismatch {S1.n} vs {S2.n}")


def semi_compose(S1: SemiMap, S2: SemiMap) -> SemiMap:
    """The map S1 o S2, i.e. (M1 sigma^{e1}(M2), e1 + e2)."""
    _check_pair(S1, S2)
    ft = S1.field.tables
    return SemiMap(S1.field, kernels.matmul(ft, S1.M, vec.frob(ft, S2.M, S1.e)), S1.e + S2.e)


def semi_power(S: SemiMap, r: int) -> SemiMap:
    if r < 0:
        raise ValueError("power must be nonnegative")
    acc, base = SemiMap.identity(S.field, S.n), S
    while r:
        if r & 1:
            acc = semi_compose(acc, base)
        r >>= 1
        if r:
            base = semi_compose(base, base)
    return acc


def null_space(field: FieldDesc, A) -> np.ndarray:
    """Row basis of {x : A x = 0}."""
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    ft = field.tables
    R, r, piv = kernels.rref(ft, A)
    free = [c for c in range(n) if c not in set(piv.tolist())]
    out = np.zeros((len(free), n), dtype=np.int64)
    for k, f in enumerate(free):
        out[k, f] = 1
        out[k, piv] = ft.neg[R[:r, f]]
    return out


def rank_kernel_image(S: SemiMap) -> tuple[int, Subspace, Subspace]:
    F, ft = S.field, S.field.tables
    ker = null_space(F, S.M)
    ker = vec.frob(ft, ker, -S.e)
    image = Subspace.span(F, S.M.T, S.n)
    return image.dim, Subspace.span(F, ker, S.n), image


def image_of(S: SemiMap, U: Subspace) -> Subspace:
    """S(U) for a subspace U."""
    ft = S.field.tables
    if U.dim == 0:
        return Subspace.zero(S.field, S.n)
    imgs = kernels.matmul(ft, S.M, vec.frob(ft, U.basis, S.e).T).T
    return Subspace.span(S.field, imgs, S.n)


def stable_image(S: SemiMap) -> tuple[Subspace, SemiMap]:
    """The largest subspace on which S is bijective, and S in its RREF basis."""
    F, ft = S.field, S.field.tables
    Y = Subspace.full(F, S.n)
    while True:
        nxt = image_of(S, Y)
        if nxt.dim == Y.dim:
            break
        Y = nxt
    if Y.dim == 0:
        return Y, SemiMap(F, np.zeros((0, 0), dtype=np.int64), S.e)
    img = kernels.matmul(ft, S.M, vec.frob(ft, Y.basis, S.e).T)   # columns S(y_j)
    restricted = img[Y.pivots, :]
    return Y, SemiMap(F, restricted, S.e)


def as_prime_linear(S: SemiMap) -> np.ndarray:
    """Matrix over F_p of S in the basis e_i t^j (row/col index i*m + j)."""
    return kernels.prime_linear(S.field.tables, np.ascontiguousarray(S.M), S.e)


def fixed_space_dim(S: SemiMap) -> int:
    """F_p-dimension of {x : S(x) = x}."""
    return int(kernels.fixed_dim(S.field.tables, np.ascontiguousarray(S.M), S.e))


def intersect(A: Subspace, B: Subspace) -> Subspace:
    _check_ambient(A, B)
    if A.dim == 0 or B.dim == 0:
        return Subspace.zero(A.field, A.n)
    ann = np.vstack([null_space(A.field, A.basis), null_space(A.field, B.basis)])
    return Subspace.span(A.field, null_space(A.field, ann), A.n)


def subspace_sum(A: Subspace, B: Subspace) -> Subspace:
    _check_ambient(A, B)
    return Subspace.span(A.field, np.vstack([A.basis, B.basis]), A.n)


def _check_ambient(A: Subspace, B: Subspace):
    if A.field != B.field or A.n != B.n:
        raise ValueError("subspaces live in different ambient spaces")


def subspace_ops(A: Subspace, B: Subspace, op: str):
    """Lattice operations: 'intersect', 'sum', 'equals', 'contains' (A contains B)."""
    _check_ambient(A, B)
    if op == "intersect":
        return intersect(A, B)
    if op == "sum":
        return subspace_sum(A, B)
    if op == "equals":
        return A == B
    if op == "contains":
        return subspace_sum(A, B).dim == A.dim
    raise ValueError(f"unknown subspace operation {op!r}")


def inverse(field: FieldDesc, A) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[0]
    R, r, _ = kernels.rref(field.tables, np.hstack([A, np.eye(n, dtype=np.int64)]))
    if r < n or not np.array_equal(R[:, :n], np.eye(n, dtype=np.int64)):
        raise ZeroDivisionError("matrix is singular")
    return R[:, n:]


def census_semilinear(field: FieldDesc, n: int, budget: int = 10 ** 7) -> Counter:
    """Counts of (rank, stable rank) over all n x n matrices with twist 1."""
    q = field.q
    total = q ** (n * n)
    if total > budget:
        raise BudgetExceeded(f"{total} matrices exceed the budget {budget}")
    ft = field.tables
    out: Counter = Counter()
    for entries in itertools.product(range(q), repeat=n * n):
        M = np.array(entries, dtype=np.int64).reshape(n, n)
        out[(int(kernels.rank(ft, M)), int(kernels.stable_rank(ft, M, 1)))] += 1
    return out
