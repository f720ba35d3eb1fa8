import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pdivstats import curves as cv
from pdivstats import kernels
from pdivstats.errors import InvalidSpec
from pdivstats.ffq import PolyFq, field_create
from pdivstats.kernels import _np as npk
from pdivstats.rng import rng_stream
from pdivstats.semilin import SemiMap

needs_numba = pytest.mark.skipif(kernels.numba_backend is None, reason="numba not installed")


def zeta_checks(inv, z, p, cd=None):
    """Oracle relations between Cartier invariants and the zeta numerator."""
    Pmod = [c % p for c in z.P]
    assert max([i for i, c in enumerate(Pmod) if c]) == inv.f_rank
    assert (inv.d >= 1) == (z.jac_order % p == 0)
    if cd is not None:
        assert cv.jac_order_mod_p(cd) == z.jac_order % p


# ---------------------------------------------------------------- hyperelliptic


@pytest.mark.parametrize("p,m,d", [(3, 1, 3), (3, 1, 5), (5, 1, 5), (3, 2, 5), (7, 1, 5),
                                   (3, 1, 7), (5, 2, 3), (5, 1, 6), (3, 1, 8)])
def test_hyper_cartier_against_zeta(p, m, d):
    F = field_create(p, m)
    for i in range(12):
        C = cv.HyperCurve(F, cv.sample_monic_squarefree(F, d, rng_stream(p * m * d, i)))
        cd = cv.cartier_manin(C)
        z = cv.naive_zeta(C)
        zeta_checks(cv.invariants_from_cartier(cd), z, p, cd)
        g = C.genus
        # Weil bound on the trace and functional equation
        assert abs(z.P[1]) <= 2 * g * F.q ** 0.5
        assert z.P[2 * g] == F.q ** g


@pytest.mark.parametrize("p", [3, 5])
def test_genus_one_supersingularity_exhaustive(p):
    """Every y^2 = cubic over F_p: a = 1 exactly when the trace q + 1 - N is 0 mod p."""
    F = field_create(p)
    sweep = cv.hyper_oracle_sweep(F, 1)
    assert len(sweep.a) == p ** 3 - p ** 2
    trace = p + 1 - sweep.counts[:, 0]
    assert np.array_equal(sweep.a == 1, trace % p == 0)


def test_sweep_matches_single_curve_zeta():
    F = field_create(3)
    sweep = cv.hyper_oracle_sweep(F, 2, backend="numpy")
    polys = list(cv.iterate_all_monic_squarefree(F, 5))
    assert len(polys) == len(sweep.a)
    for k in range(0, len(polys), 17):
        C = cv.HyperCurve(F, polys[k])
        z = cv.naive_zeta(C)
        assert tuple(sweep.counts[k]) == z.counts
        assert sweep.jac_order[k] == z.jac_order
        assert cv.hyper_invariants(C).a == sweep.a[k]


def test_cartier_twists_agree():
    """Stable rank of A (twist -1) equals that of sigma(A)^T (twist +1)."""
    F = field_create(3, 2)
    ft = F.tables
    for i in range(10):
        C = cv.HyperCurve(F, cv.sample_monic_squarefree(F, 9, rng_stream(21, i)))
        cd = cv.cartier_manin(C)
        assert npk.stable_rank(ft, cd.A.M, F.m - 1) == npk.stable_rank(ft, cd.Dblock.M, 1)
        # invariants do not see an entrywise p-th root of the matrix
        rooted = cv.CartierData(SemiMap(F, npk.frob(ft, cd.A.M, -1), -1),
                                SemiMap(F, npk.frob(ft, cd.Dblock.M, -1), 1))
        assert cv.invariants_from_cartier(rooted) == cv.invariants_from_cartier(cd)


def test_hyper_curve_validation():
    F = field_create(3)
    with pytest.raises(InvalidSpec):
        cv.HyperCurve(field_create(2), PolyFq(field_create(2), [1, 1, 0, 1]))
    with pytest.raises(InvalidSpec):
        cv.HyperCurve(F, PolyFq(F, [1, 0, 0, 2]))          # not monic
    with pytest.raises(InvalidSpec):
        cv.HyperCurve(F, PolyFq(F, [0, 0, 1, 1]))          # x^2 (x + 1)
    with pytest.raises(InvalidSpec):
        cv.HyperCurve(F, PolyFq(F, [1, 0, 1]))             # degree 2


def test_iteration_order_and_count():
    F = field_create(3)
    polys = list(cv.iterate_all_monic_squarefree(F, 3))
    assert len(polys) == 27 - 9
    idx = [sum(c * 3 ** i for i, c in enumerate(f.coeffs[:3])) for f in polys]
    assert idx == sorted(idx)


def test_sampler_uniform_over_squarefree():
    F = field_create(3)
    counts = Counter(cv.sample_monic_squarefree(F, 2, rng_stream(3, i)).coeffs for i in range(3000))
    assert len(counts) == 6
    chi = sum((c - 500) ** 2 / 500 for c in counts.values())
    assert chi < 25


def test_det_against_permutation_expansion():
    F = field_create(5)
    rng = np.random.default_rng(1)
    for _ in range(20):
        A = rng.integers(0, 5, (3, 3))
        brute = 0
        for perm in itertools.permutations(range(3)):
            sign = np.linalg.det(np.eye(3)[list(perm)])
            brute += round(sign) * int(np.prod([A[i, perm[i]] for i in range(3)]))
        assert cv.det(F, A) == brute % 5


@pytest.mark.parametrize("small,big", [((2, 2), (2, 4)), ((3, 2), (3, 4)), ((2, 3), (2, 6)), ((5, 1), (5, 3))])
def test_embedding_is_a_field_map(small, big):
    Fs, Fb = field_create(*small), field_create(*big)
    emb = cv.embedding(Fs, Fb)
    assert len(set(emb.tolist())) == Fs.q
    for x, y in itertools.product(range(Fs.q), repeat=2):
        ex, ey = Fb.element(int(emb[x])), Fb.element(int(emb[y]))
        assert (ex + ey).code == emb[(Fs.element(x) + Fs.element(y)).code]
        assert (ex * ey).code == emb[(Fs.element(x) * Fs.element(y)).code]


# ---------------------------------------------------------------- plane curves


def brute_singular(X: cv.PlaneCurve, kmax: int) -> bool:
    """Search for a common zero of F and its partials over P^2(F_{q^k}), k <= kmax."""
    F = X.field
    dense = X.dense()
    forms = [(X.d, dense)] + [(X.d - 1, cv.partial(F, X.d, dense, v)) for v in range(3)]
    for k in range(1, kmax + 1):
        E = field_create(F.p, F.m * k)
        et = E.tables
        emb = cv.embedding(F, E)
        xs = np.arange(E.q)
        pts = [(x, y, 1) for x in xs for y in xs] + [(x, 1, 0) for x in xs] + [(1, 0, 0)]
        P = np.array(pts, dtype=np.int64)
        alive = np.ones(len(P), dtype=bool)
        for deg, coeffs in forms:
            val = np.zeros(len(P), dtype=np.int64)
            for (a, b, c), co in zip(cv.monomials(deg), coeffs):
                if co:
                    t = np.full(len(P), emb[co], dtype=np.int64)
                    for var, e in zip(range(3), (a, b, c)):
                        for _ in range(e):
                            t = npk.mul(et, t, P[:, var])
                    val = npk.add(et, val, t)
            alive &= val == 0
        if alive.any():
            return True
    return False


def test_smoothness_exhaustive_cubics_over_f2():
    F = field_create(2)
    n_smooth = 0
    for coeffs in itertools.product(range(2), repeat=10):
        if not any(coeffs):
            continue
        X = cv.PlaneCurve.from_dense(F, 3, coeffs)
        s = cv.is_smooth(X)
        assert s == (not brute_singular(X, 3))
        n_smooth += s
    assert n_smooth > 0


def test_smoothness_exhaustive_conics_over_f3():
    F = field_create(3)
    for coeffs in itertools.product(range(3), repeat=6):
        if not any(coeffs):
            continue
        X = cv.PlaneCurve.from_dense(F, 2, coeffs)
        assert cv.is_smooth(X) == (not brute_singular(X, 2))


@pytest.mark.parametrize("p,m,d,kmax", [(2, 1, 4, 6), (3, 1, 3, 3), (2, 2, 3, 3), (3, 1, 4, 6)])
def test_smoothness_random_forms(p, m, d, kmax):
    F = field_create(p, m)
    rng = np.random.default_rng(p + d)
    n = len(cv.monomials(d))
    for _ in range(60 if F.q ** kmax < 1000 else 15):
        X = cv.PlaneCurve.from_dense(F, d, rng.integers(0, F.q, n))
        if X.dense().any():
            assert cv.is_smooth(X) == (not brute_singular(X, kmax))


@pytest.mark.parametrize("p,m,d", [(2, 1, 3), (3, 1, 3), (2, 2, 3), (5, 1, 3), (7, 1, 3),
                                   (2, 1, 4), (3, 1, 4), (2, 2, 4), (5, 1, 4), (2, 1, 5)])
def test_plane_cartier_against_zeta(p, m, d):
    F = field_create(p, m)
    for i in range(8):
        X = cv.sample_plane_curve(F, d, rng_stream(100 * p + 10 * m + d, i))
        cd = cv.plane_cartier(X)
        zeta_checks(cv.invariants_from_cartier(cd), cv.plane_zeta(X), p, cd)


@pytest.mark.parametrize("p", [2, 3])
def test_plane_cubic_genus_one_criterion(p):
    """Smooth cubics: a = 1 exactly when the trace is 0 mod p (all cubics over F_2)."""
    F = field_create(p)
    if p == 2:
        forms = (c for c in itertools.product(range(2), repeat=10) if any(c))
        curves = [X for X in (cv.PlaneCurve.from_dense(F, 3, c) for c in forms) if cv.is_smooth(X)]
    else:
        curves = [cv.sample_plane_curve(F, 3, rng_stream(77, i)) for i in range(60)]
    for X in curves:
        trace = p + 1 - cv.plane_point_counts(X, 1)[0]
        assert (cv.plane_invariants(X).a == 1) == (trace % p == 0)


def test_smooth_curves_have_no_vanishing_partial():
    """A partial vanishing identically makes every tangent pass through one point,
    which no smooth plane curve of degree >= 3 allows."""
    F = field_create(2)
    for coeffs in itertools.product(range(2), repeat=10):
        X = cv.PlaneCurve.from_dense(F, 3, coeffs)
        if any(coeffs) and cv.is_smooth(X):
            assert all(cv.partial(F, 3, X.dense(), v).any() for v in range(3))


@pytest.mark.parametrize("p,m,d", [(2, 1, 4), (3, 1, 4), (2, 2, 3), (5, 1, 3)])
def test_every_chart_gives_the_same_invariants(p, m, d):
    F = field_create(p, m)
    ft = F.tables
    for i in range(6):
        X = cv.sample_plane_curve(F, d, rng_stream(55, i))
        recs = set()
        for order in range(3):
            c = cv.plane_cartier_unrooted(F, d, X.dense(), order)
            cd = cv.CartierData(SemiMap(F, npk.frob(ft, c, -1), -1), SemiMap(F, c.T.copy(), 1))
            r = cv.invariants_from_cartier(cd)
            recs.add((r.a, r.f_rank, r.d))
        assert len(recs) == 1


@given(st.lists(st.integers(0, 1), min_size=21, max_size=21))
def test_parity_criteria_agree(bits):
    F = field_create(2)
    X = cv.PlaneCurve.from_dense(F, 5, bits)
    if X.coeffs:
        # parity_condition asserts internally that both characterisations agree
        want = any(sum(x % 2 for x in e) >= 2 for e in X.coeffs)
        assert cv.parity_condition(X) == want


def test_square_form_test():
    F = field_create(2, 2)
    ft = F.tables
    squares = set()
    for coeffs in itertools.product(range(4), repeat=3):
        lin = np.array(coeffs, dtype=np.int64)
        sq = np.zeros(6, dtype=np.int64)
        for t, e in enumerate(cv.monomials(1)):
            sq[cv.mono_index(2, 2 * e[0], 2 * e[1])] = npk.mul(ft, lin[t], lin[t])
        squares.add(sq.tobytes())
    for coeffs in itertools.product(range(4), repeat=6):
        arr = np.array(coeffs, dtype=np.int64)
        assert cv.is_square_form(F, 2, arr) == (arr.tobytes() in squares)


def test_parity_theorem_small_sample():
    F = field_create(2)
    seen = 0
    for i in range(200):
        X = cv.sample_plane_curve(F, 3, rng_stream(31, i))
        if cv.parity_condition(X):
            assert cv.plane_invariants(X).d >= 1
            seen += 1
    assert seen > 20


def test_plane_validation():
    F = field_create(3)
    with pytest.raises(InvalidSpec):
        cv.PlaneCurve(F, 3, {(1, 1, 0): 1})
    X = cv.PlaneCurve(F, 3, {(3, 0, 0): 1})            # a triple line
    assert not cv.is_smooth(X)
    with pytest.raises(InvalidSpec):
        cv.plane_cartier(X)


def test_plane_genus_and_monomials():
    for d in range(1, 8):
        mons = cv.monomials(d)
        assert len(mons) == (d + 1) * (d + 2) // 2
        assert [cv.mono_index(d, a, b) for a, b, _ in mons] == list(range(len(mons)))


# ---------------------------------------------------------------- compiled blocks


@needs_numba
@pytest.mark.parametrize("p,m,d", [(3, 1, 5), (5, 1, 7), (3, 2, 5), (7, 1, 5), (5, 1, 6)])
def test_hyper_blocks_backends_agree(p, m, d):
    F = field_create(p, m)
    for full in (True, False):
        assert np.array_equal(cv.hyper_block(F, d, 11, 5, 30, full, "numba"),
                              cv.hyper_block(F, d, 11, 5, 30, full, "numpy"))
        assert (cv.hyper_exhaustive(F, d, 100, 1500, full, "numba")
                == cv.hyper_exhaustive(F, d, 100, 1500, full, "numpy"))


@pytest.mark.parametrize("p,g", [(3, g) for g in range(3, 14)] + [(5, 6), (5, 9), (7, 8)])
def test_a_only_path_matches_full_path(p, g):
    # the a-only kernel must treat x^{pi-j} with pi < j as absent, for every genus residue
    F = field_create(p)
    d = 2 * g + 1
    quick = cv.hyper_block(F, d, 3, 0, 400, False)
    full = cv.hyper_block(F, d, 3, 0, 400, True)
    assert np.array_equal(quick[:, 0], full[:, 0])
    if g <= 4:
        stop = min(F.q ** d, 20000)
        a_only = Counter()
        for k, c in cv.hyper_exhaustive(F, d, 0, stop, True).items():
            a_only[(k[0], None, None)] += c
        assert cv.hyper_exhaustive(F, d, 0, stop, False) == dict(a_only)


@needs_numba
@pytest.mark.parametrize("p,m,d", [(2, 1, 3), (3, 1, 4), (2, 2, 3), (2, 1, 5), (5, 1, 4), (3, 1, 3)])
def test_plane_blocks_backends_agree(p, m, d):
    F = field_create(p, m)
    assert np.array_equal(cv.plane_block(F, d, 3, 0, 15, True, "numba"),
                          cv.plane_block(F, d, 3, 0, 15, True, "numpy"))


def test_hyper_block_matches_sampler():
    F = field_create(5)
    out = cv.hyper_block(F, 7, 9, 0, 10)
    for t in range(10):
        C = cv.HyperCurve(F, cv.sample_monic_squarefree(F, 7, rng_stream(9, t)))
        r = cv.hyper_invariants(C)
        assert tuple(out[t]) == (r.a, r.f_rank, r.d)


def test_exhaustive_matches_iteration():
    F = field_create(3)
    counts = cv.hyper_exhaustive(F, 5, full=True)
    brute = Counter()
    for f in cv.iterate_all_monic_squarefree(F, 5):
        r = cv.hyper_invariants(cv.HyperCurve(F, f))
        brute[(r.a, r.f_rank, r.d)] += 1
    assert counts == dict(brute)
