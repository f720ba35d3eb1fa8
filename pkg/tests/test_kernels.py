import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pdivstats import kernels
from pdivstats.ffq import field_create
from pdivstats.kernels import _np as npk

from conftest import SMALL_FIELDS

nbk = kernels.numba_backend
needs_numba = pytest.mark.skipif(nbk is None, reason="numba not installed")


def all_vectors(q, n):
    return np.array(list(itertools.product(range(q), repeat=n)), dtype=np.int64).reshape(-1, n)


def brute_rank(ft, A):
    """rank = n - log_q #{x : A x = 0}."""
    n = A.shape[1]
    X = all_vectors(ft.q, n)
    img = npk.matmul(ft, A, X.T)
    kernel = int((img == 0).all(axis=0).sum())
    return n - round(np.log(kernel) / np.log(ft.q))


def brute_fixed_dim(ft, M, e):
    """log_p #{x : M sigma^e(x) = x}."""
    n = M.shape[0]
    X = all_vectors(ft.q, n)
    img = npk.matmul(ft, M, npk.frob(ft, X.T, e))
    fixed = int((img == X.T).all(axis=0).sum())
    return round(np.log(fixed) / np.log(ft.p))


def brute_stable_rank(ft, M, e):
    """Dimension of the eventual image, by iterating the semilinear map on the whole space."""
    n = M.shape[0]
    X = all_vectors(ft.q, n).T
    prev = None
    while True:
        X = npk.matmul(ft, M, npk.frob(ft, X, e))
        X = np.unique(X.T, axis=0).T
        if prev is not None and X.shape[1] == prev:
            return round(np.log(X.shape[1]) / np.log(ft.q))
        prev = X.shape[1]


@st.composite
def field_matrix(draw, max_n=3, square=True):
    p, m = draw(st.sampled_from([(2, 1), (3, 1), (2, 2), (5, 1), (3, 2)]))
    F = field_create(p, m)
    r = draw(st.integers(1, max_n))
    c = r if square else draw(st.integers(1, max_n))
    vals = draw(st.lists(st.integers(0, F.q - 1), min_size=r * c, max_size=r * c))
    return F, np.array(vals, dtype=np.int64).reshape(r, c)


@given(field_matrix(square=False))
def test_rank_against_kernel_count(data):
    F, A = data
    assert int(kernels.rank(F.tables, A)) == brute_rank(F.tables, A)


@given(field_matrix(), st.integers(0, 3))
def test_fixed_dim_against_enumeration(data, e):
    F, M = data
    ft = F.tables
    assert int(npk.fixed_dim(ft, M, e % F.m)) == brute_fixed_dim(ft, M, e % F.m)


@given(field_matrix())
def test_stable_rank_against_iteration(data):
    F, M = data
    ft = F.tables
    assert int(npk.stable_rank(ft, M, 1 % F.m)) == brute_stable_rank(ft, M, 1 % F.m)


@given(field_matrix(max_n=4, square=False))
def test_rref_properties(data):
    F, A = data
    ft = F.tables
    R, r, piv = npk.rref(ft, A)
    assert r == len(piv)
    for i, c in enumerate(piv):
        assert R[i, c] == 1
        assert np.count_nonzero(R[:, c]) == 1
        assert not R[i, :c].any()
    assert not R[r:].any()
    # same row space
    assert npk.rank(ft, np.vstack([R[:r], A])) == r


@needs_numba
@pytest.mark.parametrize("p,m", SMALL_FIELDS + [(7, 1), (2, 10), (3, 7)])
def test_backends_agree_on_random_inputs(p, m):
    F = field_create(p, m)
    ft = F.tables
    rng = np.random.default_rng(p * 100 + m)
    for _ in range(20):
        n = int(rng.integers(1, 6))
        A = rng.integers(0, F.q, (n, n))
        B = rng.integers(0, F.q, (n, n))
        e = int(rng.integers(0, m))
        assert np.array_equal(npk.matmul(ft, A, B), nbk.matmul(ft, A, B))
        Ra, ra, pa = npk.rref(ft, A)
        Rb, rb, pb = nbk.rref(ft, A)
        assert ra == rb and np.array_equal(Ra, Rb) and np.array_equal(pa, pb)
        assert npk.stable_rank(ft, A, e) == nbk.stable_rank(ft, A, e)
        assert npk.fixed_dim(ft, A, e) == nbk.fixed_dim(ft, A, e)
        assert np.array_equal(npk.prime_linear(ft, A, e), nbk.prime_linear(ft, A, e))
        assert np.array_equal(npk.frob(ft, A, e), nbk.frob(ft, A, e))
        f = rng.integers(0, F.q, 6)
        f[-1] = 1
        g = rng.integers(0, F.q, 3)
        g[-1] = 1
        assert np.array_equal(npk.poly_mul(ft, f, g), nbk.poly_mul(ft, f, g))
        qa, ra_ = npk.poly_divmod(ft, f, g)
        qb, rb_ = nbk.poly_divmod(ft, f, g)
        assert np.array_equal(qa, qb) and np.array_equal(ra_, rb_)
        assert np.array_equal(npk.poly_pow(ft, g, 3), nbk.poly_pow(ft, g, 3))
        assert bool(npk.squarefree(ft, f)) == bool(nbk.squarefree(ft, f))


@pytest.mark.parametrize("p,m", [(3, 1), (2, 2), (5, 1)])
def test_prime_linear_matches_semilinear_action(p, m):
    F = field_create(p, m)
    ft = F.tables
    rng = np.random.default_rng(0)
    M = rng.integers(0, F.q, (2, 2))
    L = npk.prime_linear(ft, M, 1 % m)
    for x in all_vectors(F.q, 2):
        y = npk.matmul(ft, M, npk.frob(ft, x[:, None], 1 % m))[:, 0]
        xd = ft.digits[x].reshape(-1)
        yd = (L @ xd) % p
        assert np.array_equal(yd, ft.digits[y].reshape(-1))
