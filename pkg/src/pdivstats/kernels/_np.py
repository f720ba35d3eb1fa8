"""Pure-numpy kernels over F_q, working on int64 arrays of element codes.

Every function takes the field's :class:`~pdivstats.ffq.FieldTables` as its
first argument.  The numba module mirrors these signatures and results.
"""

import numpy as np


def add(ft, a, b):
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if ft.m == 1:
        return (a + b) % ft.p
    if ft.add.shape[0] > 1:
        return ft.add[a, b]
    d = (ft.digits[a] + ft.digits[b]) % ft.p
    return (d * ft.pw).sum(axis=-1)


def neg(ft, a):
    return ft.neg[np.asarray(a, dtype=np.int64)]


def sub(ft, a, b):
    return add(ft, a, neg(ft, b))


def mul(ft, a, b):
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if ft.m == 1:
        return a * b % ft.p
    out = ft.exp[ft.log[a] + ft.log[b]]
    return np.where((a == 0) | (b == 0), 0, out)


def inv(ft, a):
    a = np.asarray(a, dtype=np.int64)
    if np.any(a == 0):
        raise ZeroDivisionError("inverse of zero in a finite field")
    return ft.inv[a]


def frob(ft, a, e):
    """Entrywise Frobenius to the power e (mod m)."""
    e %= ft.m
    a = np.asarray(a, dtype=np.int64)
    return a.copy() if e == 0 else ft.frob[e][a]


def matmul(ft, A, B):
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if ft.m == 1:
        return (A @ B) % ft.p
    n, k = A.shape
    acc = np.zeros((n, B.shape[1], ft.m), dtype=np.int64)
    for t in range(k):
        acc += ft.digits[mul(ft, A[:, t:t + 1], B[t:t + 1, :])]
    return ((acc % ft.p) * ft.pw).sum(axis=-1)


def rref(ft, A):
    """Reduced row echelon form.  Returns (R, rank, pivot columns)."""
    R = np.array(A, dtype=np.int64, copy=True)
    rows, cols = R.shape
    piv = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            R[[r, k]] = R[[k, r]]
        lead = R[r, c]
        if lead != 1:
            R[r] = mul(ft, R[r], ft.inv[lead])
        col = R[:, c].copy()
        col[r] = 0
        idx = np.flatnonzero(col)
        if idx.size:
            R[idx] = sub(ft, R[idx], mul(ft, col[idx, None], R[r][None, :]))
        piv.append(c)
        r += 1
    return R, r, np.array(piv, dtype=np.int64)


def rank(ft, A):
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return rref(ft, A)[1]


def stable_rank(ft, M, e):
    """Rank of the k-th power of x -> M sigma^e(x) for any k >= n."""
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[0]
    if n == 0:
        return 0
    cur, ce, k = M, e % ft.m, 1
    while k < n:
        cur = matmul(ft, cur, frob(ft, cur, ce))
        ce = 2 * ce % ft.m
        k *= 2
    return rank(ft, cur)


def prime_linear(ft, M, e):
    """The (n m) x (n m) matrix over F_p of x -> M sigma^e(x) in the basis e_i t^j."""
    M = np.asarray(M, dtype=np.int64)
    n, m = M.shape[0], ft.m
    basis_img = ft.frob[e % m][ft.pw]            # sigma^e(t^j)
    prod = mul(ft, M[:, :, None], basis_img[None, None, :])   # (n, n, m): block (k,l), column j
    dig = ft.digits[prod]                        # (n, n, m_j, m_r)
    return dig.transpose(0, 3, 1, 2).reshape(n * m, n * m)


def fixed_dim(ft, M, e):
    """F_p-dimension of {x : M sigma^e(x) = x}."""
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[0]
    if n == 0:
        return 0
    L = M if ft.m == 1 else prime_linear(ft, M, e)
    N = L.shape[0]
    diff = (L - np.eye(N, dtype=np.int64)) % ft.p
    return N - rank(ft, diff)


def poly_mul(ft, a, b):
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.size == 0 or b.size == 0:
        return np.zeros(0, dtype=np.int64)
    if ft.m == 1:
        return np.convolve(a, b) % ft.p
    out = np.zeros(a.size + b.size - 1, dtype=np.int64)
    for j in range(b.size):
        if b[j]:
            out[j:j + a.size] = add(ft, out[j:j + a.size], mul(ft, a, b[j]))
    return out


def _deg(a):
    nz = np.flatnonzero(a)
    return int(nz[-1]) if nz.size else -1


def poly_divmod(ft, a, b):
    a = np.array(a, dtype=np.int64, copy=True)
    b = np.asarray(b, dtype=np.int64)
    db = _deg(b)
    if db < 0:
        raise ZeroDivisionError("polynomial division by zero")
    da = _deg(a)
    if da < db:
        return np.zeros(0, dtype=np.int64), a[:da + 1]
    qt = np.zeros(da - db + 1, dtype=np.int64)
    il = ft.inv[b[db]]
    for k in range(da, db - 1, -1):
        c = a[k]
        if c == 0:
            continue
        c = int(mul(ft, c, il))
        qt[k - db] = c
        a[k - db:k + 1] = sub(ft, a[k - db:k + 1], mul(ft, b[:db + 1], c))
    return qt, a[:max(_deg(a), -1) + 1]


def poly_pow(ft, a, k):
    acc = np.ones(1, dtype=np.int64)
    base = np.asarray(a, dtype=np.int64)
    while k:
        if k & 1:
            acc = poly_mul(ft, acc, base)
        k >>= 1
        if k:
            base = poly_mul(ft, base, base)
    return acc


def squarefree(ft, f):
    """gcd(f, f') == 1 for a polynomial f of degree >= 1 (top entry nonzero)."""
    f = np.asarray(f, dtype=np.int64)
    d = f.size - 1
    ks = np.arange(1, d + 1) % ft.p
    r1 = mul(ft, f[1:], ks)
    if _deg(r1) < 0:
        return False
    r0 = f
    while True:
        d1 = _deg(r1)
        if d1 < 0:
            return _deg(r0) == 0
        if d1 == 0:
            return True
        r0, r1 = r1[:d1 + 1], poly_divmod(ft, r0, r1[:d1 + 1])[1]


def cartier_manin(ft, f, g):
    """g x g matrix with entry (i, j) = coefficient of x^{p i - j} in f^{(p-1)/2}, 1-based."""
    p = ft.p
    h = poly_pow(ft, f, (p - 1) // 2)
    i = np.arange(1, g + 1)[:, None]
    j = np.arange(1, g + 1)[None, :]
    k = p * i - j
    ok = (k >= 0) & (k < h.size)
    return np.where(ok, h[np.clip(k, 0, max(h.size - 1, 0))], 0)


def curve_invariants(ft, A, full):
    """(a, stable rank, fixed dim) from an unrooted Cartier-Manin matrix A.

    The Frobenius block is sigma(A)^T with twist 1.  When ``full`` is false
    only the a-number is computed and the other two entries are -1.
    """
    g = A.shape[0]
    a = g - rank(ft, A)
    if not full:
        return a, -1, -1
    D = frob(ft, A, 1).T.copy()
    return a, stable_rank(ft, D, 1), fixed_dim(ft, D, 1)
