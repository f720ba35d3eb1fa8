"""Numba kernels mirroring :mod:`pdivstats.kernels._np` one for one.

Also holds a Philox4x64-10 counter generator that reproduces numpy's
``Philox`` word stream bit for bit, so compiled survey loops can draw
from per-trial streams without returning to Python.
"""

import numpy as np

from .._accel import njit

# ---------------------------------------------------------------- scalars


@njit
def s_add(ft, a, b):
    if ft.m == 1:
        s = a + b
        return s - ft.p if s >= ft.p else s
    if ft.add.shape[0] > 1:
        return ft.add[a, b]
    p = ft.p
    out = 0
    mult = 1
    for _ in range(ft.m):
        s = a % p + b % p
        if s >= p:
            s -= p
        out += s * mult
        mult *= p
        a //= p
        b //= p
    return out


@njit
def s_sub(ft, a, b):
    return s_add(ft, a, ft.neg[b])


@njit
def s_mul(ft, a, b):
    if a == 0 or b == 0:
        return 0
    if ft.m == 1:
        return a * b % ft.p
    return ft.exp[ft.log[a] + ft.log[b]]


# ---------------------------------------------------------------- vectors


@njit
def add(ft, a, b):
    out = np.empty_like(a)
    fa = a.ravel()
    fb = b.ravel()
    fo = out.ravel()
    for i in range(fa.size):
        fo[i] = s_add(ft, fa[i], fb[i])
    return out


@njit
def mul(ft, a, b):
    out = np.empty_like(a)
    fa = a.ravel()
    fb = b.ravel()
    fo = out.ravel()
    for i in range(fa.size):
        fo[i] = s_mul(ft, fa[i], fb[i])
    return out


@njit
def frob(ft, a, e):
    e = e % ft.m
    out = a.copy()
    if e == 0:
        return out
    fo = out.ravel()
    tab = ft.frob[e]
    for i in range(fo.size):
        fo[i] = tab[fo[i]]
    return out


# ---------------------------------------------------------------- matrices


@njit
def matmul(ft, A, B):
    n, k = A.shape
    l = B.shape[1]
    C = np.zeros((n, l), dtype=np.int64)
    if ft.m == 1:
        for i in range(n):
            for t in range(k):
                a = A[i, t]
                if a != 0:
                    for j in range(l):
                        C[i, j] += a * B[t, j]
            for j in range(l):
                C[i, j] %= ft.p
        return C
    for i in range(n):
        for t in range(k):
            a = A[i, t]
            if a != 0:
                for j in range(l):
                    b = B[t, j]
                    if b != 0:
                        C[i, j] = s_add(ft, C[i, j], s_mul(ft, a, b))
    return C


@njit
def rref_inplace(ft, R):
    rows, cols = R.shape
    piv = np.empty(min(rows, cols), dtype=np.int64)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        k = -1
        for i in range(r, rows):
            if R[i, c] != 0:
                k = i
                break
        if k < 0:
            continue
        if k != r:
            for j in range(c, cols):
                tmp = R[r, j]
                R[r, j] = R[k, j]
                R[k, j] = tmp
        iv = ft.inv[R[r, c]]
        if iv != 1:
            for j in range(c, cols):
                R[r, j] = s_mul(ft, R[r, j], iv)
        for i in range(rows):
            if i != r:
                f = R[i, c]
                if f != 0:
                    nf = ft.neg[f]
                    for j in range(c, cols):
                        x = R[r, j]
                        if x != 0:
                            R[i, j] = s_add(ft, R[i, j], s_mul(ft, nf, x))
        piv[r] = c
        r += 1
    return r, piv[:r]


@njit
def rref(ft, A):
    R = A.copy()
    r, piv = rref_inplace(ft, R)
    return R, r, piv


@njit
def rank_inplace(ft, R):
    """Forward elimination only; destroys R."""
    rows, cols = R.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        k = -1
        for i in range(r, rows):
            if R[i, c] != 0:
                k = i
                break
        if k < 0:
            continue
        if k != r:
            for j in range(c, cols):
                tmp = R[r, j]
                R[r, j] = R[k, j]
                R[k, j] = tmp
        iv = ft.inv[R[r, c]]
        for i in range(r + 1, rows):
            f = R[i, c]
            if f != 0:
                nf = ft.neg[s_mul(ft, f, iv)]
                for j in range(c, cols):
                    x = R[r, j]
                    if x != 0:
                        R[i, j] = s_add(ft, R[i, j], s_mul(ft, nf, x))
        r += 1
    return r


@njit
def rank(ft, A):
    if A.size == 0:
        return 0
    return rank_inplace(ft, A.copy())


@njit
def stable_rank(ft, M, e):
    n = M.shape[0]
    if n == 0:
        return 0
    cur = M.copy()
    ce = e % ft.m
    k = 1
    while k < n:
        cur = matmul(ft, cur, frob(ft, cur, ce))
        ce = 2 * ce % ft.m
        k *= 2
    return rank_inplace(ft, cur)


@njit
def prime_linear(ft, M, e):
    n = M.shape[0]
    m = ft.m
    L = np.zeros((n * m, n * m), dtype=np.int64)
    tab = ft.frob[e % m]
    for k in range(n):
        for l in range(n):
            c = M[k, l]
            if c == 0:
                continue
            for j in range(m):
                img = s_mul(ft, c, tab[ft.pw[j]])
                for r in range(m):
                    L[k * m + r, l * m + j] = ft.digits[img, r]
    return L


@njit
def fixed_dim(ft, M, e):
    n = M.shape[0]
    if n == 0:
        return 0
    if ft.m == 1:
        L = M.copy()
    else:
        L = prime_linear(ft, M, e)
    N = L.shape[0]
    for i in range(N):
        L[i, i] = (L[i, i] + ft.p - 1) % ft.p
    return N - rank_inplace(ft, L)


# ---------------------------------------------------------------- polynomials


@njit
def poly_mul(ft, a, b):
    if a.size == 0 or b.size == 0:
        return np.zeros(0, dtype=np.int64)
    out = np.zeros(a.size + b.size - 1, dtype=np.int64)
    if ft.m == 1:
        for i in range(a.size):
            x = a[i]
            if x != 0:
                for j in range(b.size):
                    out[i + j] += x * b[j]
        for i in range(out.size):
            out[i] %= ft.p
        return out
    for i in range(a.size):
        x = a[i]
        if x != 0:
            for j in range(b.size):
                y = b[j]
                if y != 0:
                    out[i + j] = s_add(ft, out[i + j], s_mul(ft, x, y))
    return out


@njit
def _deg(a, n):
    k = n - 1
    while k >= 0 and a[k] == 0:
        k -= 1
    return k


@njit
def poly_divmod(ft, a, b):
    r = a.copy()
    db = _deg(b, b.size)
    da = _deg(r, r.size)
    if da < db:
        return np.zeros(0, dtype=np.int64), r[:da + 1]
    qt = np.zeros(da - db + 1, dtype=np.int64)
    il = ft.inv[b[db]]
    for k in range(da, db - 1, -1):
        c = r[k]
        if c == 0:
            continue
        c = s_mul(ft, c, il)
        qt[k - db] = c
        nc = ft.neg[c]
        for i in range(db + 1):
            r[k - db + i] = s_add(ft, r[k - db + i], s_mul(ft, nc, b[i]))
    return qt, r[:_deg(r, r.size) + 1]


@njit
def poly_pow(ft, a, k):
    acc = np.ones(1, dtype=np.int64)
    base = a.copy()
    while k:
        if k & 1:
            acc = poly_mul(ft, acc, base)
        k >>= 1
        if k:
            base = poly_mul(ft, base, base)
    return acc


@njit
def _reduce(ft, r0, n0, r1, n1):
    """r0 <- r0 mod r1 in place; returns the new degree of r0."""
    il = ft.inv[r1[n1]]
    while n0 >= n1:
        c = r0[n0]
        if c != 0:
            nc = ft.neg[s_mul(ft, c, il)]
            off = n0 - n1
            for i in range(n1 + 1):
                y = r1[i]
                if y != 0:
                    r0[off + i] = s_add(ft, r0[off + i], s_mul(ft, nc, y))
        n0 -= 1
        while n0 >= 0 and r0[n0] == 0:
            n0 -= 1
    return n0


@njit
def _reduce_prime(p, inv, r0, n0, r1, n1):
    """Prime-field _reduce; entries accumulate unreduced and only the leading
    term is reduced, so each step costs one modulus."""
    il = inv[r1[n1]]
    while n0 >= n1:
        c = r0[n0] % p
        if c != 0:
            nc = p - c * il % p
            off = n0 - n1
            for i in range(n1 + 1):
                r0[off + i] += nc * r1[i]
        n0 -= 1
        while n0 >= 0 and r0[n0] % p == 0:
            n0 -= 1
    for i in range(n0 + 1):
        r0[i] %= p
    return n0


@njit
def _squarefree_prime(p, inv, f, d, r0, r1):
    n1 = -1
    for k in range(1, d + 1):
        v = f[k] * (k % p) % p
        r1[k - 1] = v
        if v != 0:
            n1 = k - 1
    if n1 < 0:
        return False
    for k in range(d + 1):
        r0[k] = f[k]
    n0 = d
    while True:
        if n1 < 0:
            return n0 == 0
        if n1 == 0:
            return True
        n0 = _reduce_prime(p, inv, r0, n0, r1, n1)
        r0, r1 = r1, r0
        n0, n1 = n1, n0


@njit
def squarefree_buf(ft, f, d, r0, r1):
    """Squarefree test for f[0..d] using caller-provided scratch buffers."""
    if ft.m == 1:
        return _squarefree_prime(ft.p, ft.inv, f, d, r0, r1)
    p = ft.p
    n1 = -1
    for k in range(1, d + 1):
        v = s_mul(ft, f[k], k % p)
        r1[k - 1] = v
        if v != 0:
            n1 = k - 1
    if n1 < 0:
        return False
    for k in range(d + 1):
        r0[k] = f[k]
    n0 = d
    while True:
        if n1 < 0:
            return n0 == 0
        if n1 == 0:
            return True
        n0 = _reduce(ft, r0, n0, r1, n1)
        tmp = r0
        r0 = r1
        r1 = tmp
        t = n0
        n0 = n1
        n1 = t


@njit
def squarefree(ft, f):
    d = f.size - 1
    r0 = np.zeros(d + 1, dtype=np.int64)
    r1 = np.zeros(d + 1, dtype=np.int64)
    return squarefree_buf(ft, f, d, r0, r1)


@njit
def cartier_manin(ft, f, g):
    p = ft.p
    h = poly_pow(ft, f, (p - 1) // 2)
    A = np.zeros((g, g), dtype=np.int64)
    for i in range(1, g + 1):
        for j in range(1, g + 1):
            k = p * i - j
            if 0 <= k < h.size:
                A[i - 1, j - 1] = h[k]
    return A


@njit
def curve_invariants(ft, A, full):
    g = A.shape[0]
    a = g - rank(ft, A)
    if not full:
        return a, -1, -1
    D = frob(ft, A, 1).T.copy()
    return a, stable_rank(ft, D, 1), fixed_dim(ft, D, 1)


# ---------------------------------------------------------------- Philox4x64-10

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_LO32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_ONE = np.uint64(1)
_ZERO = np.uint64(0)


@njit
def _mulhilo(a, b):
    alo = a & _LO32
    ahi = a >> _S32
    blo = b & _LO32
    bhi = b >> _S32
    p0 = alo * blo
    p1 = alo * bhi
    p2 = ahi * blo
    p3 = ahi * bhi
    carry = ((p0 >> _S32) + (p1 & _LO32) + (p2 & _LO32)) >> _S32
    hi = p3 + (p1 >> _S32) + (p2 >> _S32) + carry
    return hi, a * b


@njit
def philox_block(st):
    """Fill st[6:10] with the block for counter st[2:6] and key st[0:2]."""
    c0, c1, c2, c3 = st[2], st[3], st[4], st[5]
    k0, k1 = st[0], st[1]
    for r in range(10):
        if r > 0:
            k0 = k0 + _W0
            k1 = k1 + _W1
        hi0, lo0 = _mulhilo(_M0, c0)
        hi1, lo1 = _mulhilo(_M1, c2)
        c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    st[6] = c0
    st[7] = c1
    st[8] = c2
    st[9] = c3


@njit
def stream_init(st, key0, key1, index):
    """State layout: key(2), counter(4), buffer(4), buffer position."""
    st[0] = key0
    st[1] = key1
    st[2] = _ZERO
    st[3] = _ZERO
    st[4] = index
    st[5] = _ZERO
    st[10] = np.uint64(4)


@njit
def next_word(st):
    pos = st[10]
    if pos >= np.uint64(4):
        st[2] = st[2] + _ONE
        if st[2] == _ZERO:
            st[3] = st[3] + _ONE
        philox_block(st)
        pos = _ZERO
    w = st[6 + np.int64(pos)]
    st[10] = pos + _ONE
    return w


@njit
def uniform(st, q, thresh):
    """Uniform code in [0, q); words at or above ``thresh`` are rejected (0 = none)."""
    uq = np.uint64(q)
    while True:
        w = next_word(st)
        if thresh == _ZERO or w < thresh:
            return np.int64(w % uq)


@njit
def stream_words(key0, key1, index, count):
    st = np.zeros(11, dtype=np.uint64)
    stream_init(st, key0, key1, index)
    out = np.empty(count, dtype=np.uint64)
    for i in range(count):
        out[i] = next_word(st)
    return out
