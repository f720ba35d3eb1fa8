"""Compiled survey loops.

Each loop walks a contiguous block of trial indices, regenerates the
trial's Philox stream in place, and writes one invariant triple
``(a, stable rank, fixed dim)`` per trial.  The draw order matches the
Python samplers exactly, which the test suite checks.
"""

import numpy as np

from .._accel import njit
from ._nb import (curve_invariants, fixed_dim, frob, matmul, rank, rank_inplace,
                  rref_inplace, s_add, s_mul, s_sub, squarefree_buf, stream_init,
                  uniform, cartier_manin)

# ---------------------------------------------------------------- model


@njit
def _isotropic_step_prime(p, g, nw, W, b, v, c):
    """v = sum_j b_j W_j and c_j = omega(v, W_j) over a prime field."""
    n = 2 * g
    for col in range(n):
        v[col] = 0
    for j in range(nw):
        bj = b[j]
        if bj != 0:
            for col in range(n):
                v[col] += bj * W[j, col]
    for col in range(n):
        v[col] %= p
    for j in range(nw):
        acc = 0
        for t in range(g):
            acc += v[t] * W[j, g + t] - v[g + t] * W[j, t]
        c[j] = acc % p


@njit
def _lagrangian(ft, st, g, thresh, W, b, v, c, out):
    n = 2 * g
    for i in range(n):
        for j in range(n):
            W[i, j] = 1 if i == j else 0
    nw = n
    for i in range(g):
        while True:
            nz = False
            for j in range(nw):
                b[j] = uniform(st, ft.q, thresh)
                if b[j] != 0:
                    nz = True
            if nz:
                break
        if ft.m == 1:
            _isotropic_step_prime(ft.p, g, nw, W, b, v, c)
            k = -1
            for j in range(nw):
                if c[j] != 0:
                    k = j
                    break
            civ = ft.inv[c[k]]
            p = ft.p
            for j in range(nw):
                if j != k and c[j] != 0:
                    r = p - c[j] * civ % p
                    for col in range(n):
                        W[j, col] = (W[j, col] + r * W[k, col]) % p
        else:
            for col in range(n):
                v[col] = 0
            for j in range(nw):
                bj = b[j]
                if bj != 0:
                    for col in range(n):
                        x = W[j, col]
                        if x != 0:
                            v[col] = s_add(ft, v[col], s_mul(ft, bj, x))
            k = -1
            for j in range(nw):
                acc = 0
                for t in range(g):
                    acc = s_add(ft, acc, s_mul(ft, v[t], W[j, g + t]))
                    acc = s_sub(ft, acc, s_mul(ft, v[g + t], W[j, t]))
                c[j] = acc
                if k < 0 and acc != 0:
                    k = j
            civ = ft.inv[c[k]]
            for j in range(nw):
                if j != k and c[j] != 0:
                    r = ft.neg[s_mul(ft, c[j], civ)]
                    for col in range(n):
                        x = W[k, col]
                        if x != 0:
                            W[j, col] = s_add(ft, W[j, col], s_mul(ft, r, x))
        j2 = -1
        for j in range(nw):
            if j != k and b[j] != 0:
                j2 = j
                break
        dst = 0
        for j in range(nw):
            if j != k and j != j2:
                if dst != j:
                    for col in range(n):
                        W[dst, col] = W[j, col]
                dst += 1
        nw -= 2
        for col in range(n):
            out[i, col] = v[col]
    rref_inplace(ft, out)


@njit
def _phi(ft, W1, W2, G):
    g, n = W1.shape
    piv = np.empty(g, dtype=np.int64)
    isp = np.zeros(n, dtype=np.bool_)
    for i in range(g):
        for col in range(n):
            if W1[i, col] != 0:
                piv[i] = col
                isp[col] = True
                break
    free = np.empty(n - g, dtype=np.int64)
    f = 0
    for col in range(n):
        if not isp[col]:
            free[f] = col
            f += 1
    S = frob(ft, W2, 1)
    SW1 = frob(ft, W1, 1)
    beta = np.zeros((g, g), dtype=np.int64)
    for i in range(g):
        for k in range(g):
            alpha = S[i, piv[k]]
            if alpha != 0:
                na = ft.neg[alpha]
                for col in range(n):
                    x = SW1[k, col]
                    if x != 0:
                        S[i, col] = s_add(ft, S[i, col], s_mul(ft, na, x))
        for j in range(g):
            beta[j, i] = S[i, free[j]]
    return matmul(ft, G, beta)


@njit
def model_block(ft, key0, key1, start, count, g, thresh, full, out):
    n = 2 * g
    st = np.zeros(11, dtype=np.uint64)
    W = np.empty((n, n), dtype=np.int64)
    b = np.empty(n, dtype=np.int64)
    v = np.empty(n, dtype=np.int64)
    c = np.empty(n, dtype=np.int64)
    W1 = np.empty((g, n), dtype=np.int64)
    W2 = np.empty((g, n), dtype=np.int64)
    G = np.empty((g, g), dtype=np.int64)
    stack = np.empty((n, n), dtype=np.int64)
    for t in range(count):
        stream_init(st, key0, key1, np.uint64(start + t))
        _lagrangian(ft, st, g, thresh, W, b, v, c, W1)
        _lagrangian(ft, st, g, thresh, W, b, v, c, W2)
        while True:
            for i in range(g):
                for j in range(g):
                    G[i, j] = uniform(st, ft.q, thresh)
            if rank(ft, G) == g:
                break
        stack[:g] = W1
        stack[g:] = W2
        out[t, 0] = n - rank_inplace(ft, stack)
        if full:
            Phi = _phi(ft, W1, W2, G)
            out[t, 1] = stable_rank_(ft, Phi)
            out[t, 2] = fixed_dim(ft, Phi, 1)
        else:
            out[t, 1] = -1
            out[t, 2] = -1


@njit
def stable_rank_(ft, M):
    n = M.shape[0]
    cur = M.copy()
    ce = 1 % ft.m
    k = 1
    while k < n:
        cur = matmul(ft, cur, frob(ft, cur, ce))
        ce = 2 * ce % ft.m
        k *= 2
    return rank_inplace(ft, cur)


# ---------------------------------------------------------------- hyperelliptic


@njit
def _hyper_a_only(ft, f, d, g, h, tmp, A):
    """a-number of y^2 = f(x) from f^{(p-1)/2}, using scratch buffers only."""
    p = ft.p
    k = (p - 1) // 2
    h[0] = 1
    hd = 0
    for _ in range(k):
        for i in range(hd + d + 1):
            tmp[i] = 0
        if ft.m == 1:
            # products stay far below 2^63 for p < 2^16, so reduce once per output
            for i in range(hd + 1):
                x = h[i]
                if x != 0:
                    for j in range(d + 1):
                        tmp[i + j] += x * f[j]
            for i in range(hd + d + 1):
                tmp[i] %= p
        else:
            for i in range(hd + 1):
                x = h[i]
                if x != 0:
                    for j in range(d + 1):
                        y = f[j]
                        if y != 0:
                            tmp[i + j] = s_add(ft, tmp[i + j], s_mul(ft, x, y))
        hd += d
        for i in range(hd + 1):
            h[i] = tmp[i]
    for i in range(1, g + 1):
        for j in range(1, g + 1):
            e = p * i - j
            A[i - 1, j - 1] = h[e] if 0 <= e <= hd else 0
    return g - rank_inplace(ft, A)


@njit
def _hyper_record(ft, f, d, g, full, h, tmp, A, out_row):
    if full:
        a, sr, fd = curve_invariants(ft, cartier_manin(ft, f, g), True)
        out_row[0] = a
        out_row[1] = sr
        out_row[2] = fd
    else:
        out_row[0] = _hyper_a_only(ft, f, d, g, h, tmp, A)
        out_row[1] = -1
        out_row[2] = -1


@njit
def hyper_block(ft, key0, key1, start, count, d, g, thresh, full, out):
    st = np.zeros(11, dtype=np.uint64)
    f = np.zeros(d + 1, dtype=np.int64)
    r0 = np.zeros(d + 1, dtype=np.int64)
    r1 = np.zeros(d + 1, dtype=np.int64)
    hbuf = np.zeros(d * (ft.p // 2) + 1, dtype=np.int64)
    tmp = np.zeros(d * (ft.p // 2) + 1, dtype=np.int64)
    A = np.zeros((g, g), dtype=np.int64)
    f[d] = 1
    for t in range(count):
        stream_init(st, key0, key1, np.uint64(start + t))
        while True:
            for i in range(d):
                f[i] = uniform(st, ft.q, thresh)
            if squarefree_buf(ft, f, d, r0, r1):
                break
        _hyper_record(ft, f, d, g, full, hbuf, tmp, A, out[t])


@njit
def hyper_exhaustive(ft, start, stop, d, g, full, hist):
    """Histogram of invariants over polynomial indices [start, stop).

    Index digits base q give a_0..a_{d-1}, a_0 least significant.  hist is
    indexed by (a, stable rank + 1, fixed dim + 1).  Returns the number of
    squarefree polynomials seen.
    """
    q = ft.q
    f = np.zeros(d + 1, dtype=np.int64)
    r0 = np.zeros(d + 1, dtype=np.int64)
    r1 = np.zeros(d + 1, dtype=np.int64)
    hbuf = np.zeros(d * (ft.p // 2) + 1, dtype=np.int64)
    tmp = np.zeros(d * (ft.p // 2) + 1, dtype=np.int64)
    A = np.zeros((g, g), dtype=np.int64)
    row = np.zeros(3, dtype=np.int64)
    f[d] = 1
    k = start
    for i in range(d):
        f[i] = k % q
        k //= q
    seen = 0
    for idx in range(start, stop):
        if idx > start:
            i = 0
            while True:
                f[i] += 1
                if f[i] < q:
                    break
                f[i] = 0
                i += 1
        if not squarefree_buf(ft, f, d, r0, r1):
            continue
        _hyper_record(ft, f, d, g, full, hbuf, tmp, A, row)
        hist[row[0], row[1] + 1, row[2] + 1] += 1
        seen += 1
    return seen


# ---------------------------------------------------------------- plane curves


@njit
def plane_smooth(ft, F, rows, cols, src, fac, nrows, ncols, M):
    for i in range(nrows):
        for j in range(ncols):
            M[i, j] = 0
    for k in range(rows.size):
        M[rows[k], cols[k]] = s_mul(ft, F[src[k]], fac[k])
    return rank_inplace(ft, M) == ncols


@njit
def plane_cartier_c(ft, F, d, ax, by, ex, ey):
    """Unrooted Stohr-Voloch matrix of the form F (dense coefficients)."""
    p = ft.p
    T = F.size
    order = 2
    for o in range(2):
        var_exp = by[o]
        hit = False
        for t in range(T):
            if F[t] != 0 and var_exp[t] % p != 0:
                hit = True
                break
        if hit:
            order = o
            break
    f = np.zeros((d + 1, d + 1), dtype=np.int64)
    for t in range(T):
        f[ax[order, t], by[order, t]] = F[t]
    n = (p - 1) * d + 1
    h = np.zeros((n, n), dtype=np.int64)
    tmp = np.zeros((n, n), dtype=np.int64)
    h[0, 0] = 1
    hd = 0
    for _ in range(p - 1):
        for i in range(hd + d + 1):
            for j in range(hd + d + 1):
                tmp[i, j] = 0
        for i in range(hd + 1):
            for j in range(hd + 1):
                x = h[i, j]
                if x != 0:
                    for u in range(d + 1):
                        for v in range(d + 1 - u):
                            y = f[u, v]
                            if y != 0:
                                tmp[i + u, j + v] = s_add(ft, tmp[i + u, j + v], s_mul(ft, x, y))
        hd += d
        for i in range(hd + 1):
            for j in range(hd + 1):
                h[i, j] = tmp[i, j]
    g = ex.shape[0]
    A = np.zeros((g, g), dtype=np.int64)
    for i in range(g):
        for j in range(g):
            if ex[i, j] >= 0:
                A[i, j] = h[ex[i, j], ey[i, j]]
    return A


@njit
def plane_block(ft, key0, key1, start, count, d, thresh, full,
                rows, cols, src, fac, nrows, ncols, ax, by, ex, ey, parity, out):
    """Survey loop over smooth plane curves of degree d.

    out[t] = (a, stable rank, fixed dim, flag) where flag marks a monomial
    with at least two odd exponents (used for the characteristic-2 parity
    condition).
    """
    T = parity.size
    st = np.zeros(11, dtype=np.uint64)
    F = np.zeros(T, dtype=np.int64)
    M = np.zeros((nrows, ncols), dtype=np.int64)
    for t in range(count):
        stream_init(st, key0, key1, np.uint64(start + t))
        while True:
            nz = False
            for i in range(T):
                F[i] = uniform(st, ft.q, thresh)
                if F[i] != 0:
                    nz = True
            if nz and plane_smooth(ft, F, rows, cols, src, fac, nrows, ncols, M):
                break
        A = plane_cartier_c(ft, F, d, ax, by, ex, ey)
        a, sr, fd = curve_invariants(ft, A, full)
        out[t, 0] = a
        out[t, 1] = sr
        out[t, 2] = fd
        flag = 0
        for i in range(T):
            if F[i] != 0 and parity[i]:
                flag = 1
                break
        out[t, 3] = flag


@njit
def hyper_rows(ft, start, stop, d, g, out):
    """Per-index invariants over [start, stop); a = -1 marks non-squarefree f."""
    q = ft.q
    f = np.zeros(d + 1, dtype=np.int64)
    r0 = np.zeros(d + 1, dtype=np.int64)
    r1 = np.zeros(d + 1, dtype=np.int64)
    hbuf = np.zeros(d * (ft.p // 2) + 1, dtype=np.int64)
    tmp = np.zeros(d * (ft.p // 2) + 1, dtype=np.int64)
    A = np.zeros((g, g), dtype=np.int64)
    f[d] = 1
    k = start
    for i in range(d):
        f[i] = k % q
        k //= q
    for idx in range(start, stop):
        if idx > start:
            i = 0
            while True:
                f[i] += 1
                if f[i] < q:
                    break
                f[i] = 0
                i += 1
        t = idx - start
        if squarefree_buf(ft, f, d, r0, r1):
            _hyper_record(ft, f, d, g, True, hbuf, tmp, A, out[t])
        else:
            out[t, 0] = -1
            out[t, 1] = -1
            out[t, 2] = -1


@njit
def hyper_point_counts(et, C, chi, infinity, out):
    """Points on y^2 = f over the field of ``et``; rows of C are f's coefficients
    (constant first) already mapped into that field."""
    p = et.p
    m = et.m
    qe = et.q
    addt = et.add
    lg = et.log
    ex = et.exp
    if m > 1 and addt.shape[0] == 1:
        raise ValueError("point counting needs an addition table")
    n, dp1 = C.shape
    d = dp1 - 1
    for r in range(n):
        s = 0
        for x in range(qe):
            v = C[r, d]
            for i in range(d - 1, -1, -1):
                if m == 1:
                    v = (v * x + C[r, i]) % p
                else:
                    if v != 0 and x != 0:
                        v = ex[lg[v] + lg[x]]
                    else:
                        v = 0
                    v = addt[v, C[r, i]]
            s += chi[v]
        out[r] = qe + s + infinity
