import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pdivstats.errors import BudgetExceeded
from pdivstats.ffq import field_create
from pdivstats.kernels import _np as npk
from pdivstats.predict import stablerank_census
from pdivstats.semilin import (SemiMap, Subspace, census_semilinear, fixed_space_dim, image_of,
                               intersect, inverse, null_space, rank_kernel_image, semi_compose,
                               semi_power, stable_image, subspace_ops, subspace_sum)


@st.composite
def semimap(draw, n=None):
    p, m = draw(st.sampled_from([(2, 1), (3, 1), (2, 2), (3, 2), (2, 3)]))
    F = field_create(p, m)
    n = n or draw(st.integers(1, 3))
    vals = draw(st.lists(st.integers(0, F.q - 1), min_size=n * n, max_size=n * n))
    e = draw(st.integers(0, 3))
    return SemiMap(F, np.array(vals).reshape(n, n), e)


def _vectors(F, n):
    return [np.array(v, dtype=np.int64) for v in itertools.product(range(F.q), repeat=n)]


@given(semimap(), st.data())
def test_semilinearity(S, data):
    F, ft = S.field, S.field.tables
    x = np.array(data.draw(st.lists(st.integers(0, F.q - 1), min_size=S.n, max_size=S.n)))
    lam = data.draw(st.integers(0, F.q - 1))
    lhs = S(npk.mul(ft, lam, x))
    rhs = npk.mul(ft, npk.frob(ft, lam, S.e), S(x))
    assert np.array_equal(lhs, rhs)


@given(st.data())
def test_composition_acts_as_composition(data):
    S1 = data.draw(semimap(n=2))
    F = S1.field
    vals = data.draw(st.lists(st.integers(0, F.q - 1), min_size=4, max_size=4))
    S2 = SemiMap(F, np.array(vals).reshape(2, 2), data.draw(st.integers(0, 2)))
    for x in _vectors(F, 2):
        assert np.array_equal((S1 @ S2)(x), S1(S2(x)))


@given(semimap(n=2), st.integers(0, 5))
def test_power_by_squaring(S, r):
    acc = SemiMap.identity(S.field, S.n)
    for _ in range(r):
        acc = semi_compose(S, acc)
    assert semi_power(S, r) == acc


@given(semimap())
def test_kernel_and_image_by_enumeration(S):
    r, ker, img = rank_kernel_image(S)
    vecs = _vectors(S.field, S.n)
    kernel = {tuple(v) for v in vecs if not S(v).any()}
    image = {tuple(S(v)) for v in vecs}
    assert len(kernel) == S.field.q ** ker.dim and all(ker.contains(v) for v in kernel)
    assert len(image) == S.field.q ** img.dim and all(img.contains(v) for v in image)
    assert r + ker.dim == S.n


@given(semimap())
def test_stable_image_is_bijective_part(S):
    Y, R = stable_image(S)
    assert image_of(S, Y) == Y
    # iterate the map on the whole space until the image stops shrinking
    X = {tuple(v) for v in _vectors(S.field, S.n)}
    while True:
        nxt = {tuple(S(np.array(v))) for v in X}
        if len(nxt) == len(X):
            break
        X = nxt
    assert len(X) == S.field.q ** Y.dim
    # the restricted map has full rank and the same fixed points
    if Y.dim:
        assert npk.rank(S.field.tables, R.M) == Y.dim
    fixed = sum(1 for v in _vectors(S.field, S.n) if np.array_equal(S(v), v))
    assert fixed == S.field.p ** fixed_space_dim(R) == S.field.p ** fixed_space_dim(S)


@given(st.data())
def test_lattice_operations(data):
    F = field_create(data.draw(st.sampled_from([2, 3])))
    n = 3

    def sub():
        k = data.draw(st.integers(0, 3))
        vals = data.draw(st.lists(st.integers(0, F.q - 1), min_size=k * n, max_size=k * n))
        return Subspace.span(F, np.array(vals, dtype=np.int64).reshape(k, n), n)

    A, B = sub(), sub()
    I, S = intersect(A, B), subspace_sum(A, B)
    assert I.dim + S.dim == A.dim + B.dim
    vecs = _vectors(F, n)
    assert {tuple(v) for v in vecs if A.contains(v) and B.contains(v)} == \
           {tuple(v) for v in vecs if I.contains(v)}
    assert subspace_ops(S, A, "contains") and subspace_ops(S, B, "contains")
    assert subspace_ops(A, A, "equals")


def test_null_space_and_inverse():
    F = field_create(5)
    A = np.array([[1, 2], [3, 4]])
    Ainv = inverse(F, A)
    assert np.array_equal(npk.matmul(F.tables, A, Ainv), np.eye(2, dtype=np.int64))
    N = null_space(F, np.array([[1, 2, 3]]))
    assert N.shape == (2, 3)
    assert not npk.matmul(F.tables, np.array([[1, 2, 3]]), N.T).any()
    with pytest.raises(ZeroDivisionError):
        inverse(F, np.array([[1, 2], [2, 4]]))


@pytest.mark.parametrize("p,m,n", [(2, 1, 2), (2, 1, 3), (3, 1, 2), (2, 2, 2)])
def test_census_matches_closed_form(p, m, n):
    F = field_create(p, m)
    got = census_semilinear(F, n)
    q = F.q
    want = Counter({(s, r): stablerank_census(q, n, s, r)
                    for s in range(n + 1) for r in range(s + 1) if stablerank_census(q, n, s, r)})
    assert got == want
    assert sum(got.values()) == q ** (n * n)


def test_census_budget():
    with pytest.raises(BudgetExceeded):
        census_semilinear(field_create(3), 3, budget=1000)
