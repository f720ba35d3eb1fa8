"""Finite fields F_{p^m}, their elements, and univariate polynomials.

Elements are coefficient vectors over F_p modulo a canonical irreducible
polynomial.  Each element also has an integer *code*
``sum(c_i * p**i)``, which is what the array kernels work with.  Lookup
tables for those kernels are built on demand by :func:`field_tables`.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import InvalidSpec

MAX_CHAR = 1 << 16
TABLE_LIMIT = 1 << 20
ADD_TABLE_LIMIT = 1024

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for b in _MR_BASES:
        if n % b == 0:
            return n == b
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for b in _MR_BASES:
        x = pow(b, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# Dense F_p[x] helpers on int lists, constant term first.  Used only to
# find and apply moduli, where sizes are tiny.

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _prem(a: list[int], f: Sequence[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    df = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p)
    while len(a) - 1 >= df:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, fi in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fi) % p
        _trim(a)
    return a


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _prem(a, b, p)
    return a


def _powmod_x(f: Sequence[int], p: int, e: int) -> list[int]:
    """x**(p**e) mod f, by repeated p-th powers."""
    h = _prem([0, 1], f, p)
    for _ in range(e):
        acc, base, k = [1], h, p
        while k:
            if k & 1:
                acc = _prem(_pmul(acc, base, p), f, p)
            base = _prem(_pmul(base, base, p), f, p)
            k >>= 1
        h = acc
    return h


def _is_irreducible(f: Sequence[int], p: int) -> bool:
    m = len(f) - 1
    if m == 1:
        return True
    xm = _powmod_x(f, p, m)
    if _trim(list(xm)) != [0, 1]:
        return False
    for i in range(1, m):
        if m % i:
            continue
        h = _powmod_x(f, p, i) + [0, 0]
        h[1] = (h[1] - 1) % p
        if len(_pgcd(list(f), _trim(h), p)) > 1:
            return False
    return True


@dataclass(frozen=True)
class FieldDesc:
    """The field F_q, q = p**m, presented as F_p[t]/(modulus)."""

    p: int
    m: int
    modulus: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p ** self.m

    def element(self, value) -> "FieldElement":
        """Build an element from an int code, a coefficient sequence, or an element."""
        if isinstance(value, FieldElement):
            if value.field != self:
                raise ValueError("element belongs to a different field")
            return value
        if isinstance(value, (int, np.integer)):
            return FieldElement.from_code(self, int(value))
        coeffs = [int(c) % self.p for c in value]
        coeffs += [0] * (self.m - len(coeffs))
        if len(coeffs) != self.m:
            raise ValueError("too many coefficients for this field")
        return FieldElement(self, tuple(coeffs))

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, (0,) * self.m)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, (1,) + (0,) * (self.m - 1))

    @property
    def gen(self) -> "FieldElement":
        """The class of t; for m = 1 this is 0 since the modulus is x."""
        return FieldElement.from_code(self, self.p) if self.m > 1 else self.zero

    def elements(self) -> Iterator["FieldElement"]:
        for c in range(self.q):
            yield FieldElement.from_code(self, c)

    @property
    def frob_matrix(self) -> np.ndarray:
        return _frob_matrix(self.p, self.m)

    @property
    def tables(self) -> "FieldTables":
        return field_tables(self)

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.m})" if self.m > 1 else f"GF({self.p})"


@functools.lru_cache(maxsize=None)
def field_create(p: int, m: int = 1) -> FieldDesc:
    """Return F_{p^m} with the lexicographically smallest monic irreducible modulus.

    Candidates are ordered by their coefficient tuples read from the
    constant term upwards.
    """
    p, m = int(p), int(m)
    if m < 1:
        raise InvalidSpec(f"extension degree must be >= 1, got {m}")
    if not is_prime(p):
        raise InvalidSpec(f"{p} is not prime")
    if p >= MAX_CHAR:
        raise InvalidSpec(f"characteristic {p} exceeds the supported bound {MAX_CHAR}")
    for low in itertools.product(range(p), repeat=m):
        f = list(low) + [1]
        if (m == 1 or low[0] != 0) and _is_irreducible(f, p):
            return FieldDesc(p, m, tuple(f))
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


@dataclass(frozen=True)
class FieldElement:
    field: FieldDesc
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.field.m or any(not 0 <= c < self.field.p for c in self.coeffs):
            raise ValueError(f"invalid coefficient vector {self.coeffs} for {self.field}")

    @classmethod
    def from_code(cls, field: FieldDesc, code: int) -> "FieldElement":
        if not 0 <= code < field.q:
            raise ValueError(f"code {code} out of range for {field}")
        out = []
        for _ in range(field.m):
            code, r = divmod(code, field.p)
            out.append(r)
        return cls(field, tuple(out))

    @property
    def code(self) -> int:
        return sum(c * self.field.p ** i for i, c in enumerate(self.coeffs))

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("mixed fields in arithmetic")
            return other
        if isinstance(other, (int, np.integer)):
            return FieldElement(self.field, (int(other) % self.field.p,) + (0,) * (self.field.m - 1))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.field.p
        return FieldElement(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FieldElement(self.field, tuple(-a % p for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        F = self.field
        prod = _prem(_pmul(self.coeffs, o.coeffs, F.p), F.modulus, F.p) if F.m > 1 else \
            [self.coeffs[0] * o.coeffs[0] % F.p]
        prod = list(prod) + [0] * (F.m - len(prod))
        return FieldElement(F, tuple(prod))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        k = int(k)
        if k < 0:
            return self.inverse() ** (-k)
        acc, base = self.field.one, self
        while k:
            if k & 1:
                acc = acc * base
            base = base * base
            k >>= 1
        return acc

    def inverse(self) -> "FieldElement":
        if not self:
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self ** (self.field.q - 2)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __repr__(self) -> str:
        if self.field.m == 1:
            return str(self.coeffs[0])
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
                terms.append(f"{c}{'*' + mono if mono else ''}" if c != 1 or not mono else mono)
        return " + ".join(terms) if terms else "0"


@functools.lru_cache(maxsize=None)
def _frob_matrix(p: int, m: int) -> np.ndarray:
    """m x m matrix over F_p of x -> x^p in the basis 1, t, ..., t^{m-1}."""
    F = field_create(p, m)
    out = np.zeros((m, m), dtype=np.int64)
    for j in range(m):
        basis = FieldElement(F, tuple(1 if i == j else 0 for i in range(m)))
        out[:, j] = (basis ** p).coeffs
    out.flags.writeable = False
    return out


def frobenius(x: FieldElement, e: int = 1) -> FieldElement:
    """Return x ** (p ** (e mod m)); negative e gives inverse powers of Frobenius."""
    F = x.field
    e %= F.m
    if e == 0:
        return x
    v = np.array(x.coeffs, dtype=np.int64)
    A = F.frob_matrix
    for _ in range(e):
        v = A @ v % F.p
    return FieldElement(F, tuple(int(c) for c in v))


class FieldTables(NamedTuple):
    """Code-level lookup tables consumed by the array kernels.

    ``add`` is a full table only for composite fields with q <= 1024; it is
    a 1x1 placeholder otherwise.  ``frob[e]`` maps a code to its image under
    the e-th power of Frobenius.  ``log[0]`` is 0 and must be masked.
    """

    p: int
    m: int
    q: int
    add: np.ndarray
    neg: np.ndarray
    inv: np.ndarray
    log: np.ndarray
    exp: np.ndarray
    frob: np.ndarray
    digits: np.ndarray
    pw: np.ndarray


def primitive_element(F: FieldDesc) -> FieldElement:
    """Smallest-code generator of the multiplicative group."""
    n = F.q - 1
    ps = prime_factors(n) if n > 1 else []
    for c in range(1, F.q):
        x = FieldElement.from_code(F, c)
        if all((x ** (n // r)) != F.one for r in ps):
            return x
    raise AssertionError("no primitive element")  # pragma: no cover


def field_tables(F: FieldDesc) -> FieldTables:
    return _field_tables(F.p, F.m)


@functools.lru_cache(maxsize=None)
def _field_tables(p: int, m: int) -> FieldTables:
    F = field_create(p, m)
    q = F.q
    if q > TABLE_LIMIT:
        raise InvalidSpec(f"q = {q} exceeds the table limit {TABLE_LIMIT}")
    pw = p ** np.arange(m, dtype=np.int64)
    codes = np.arange(q, dtype=np.int64)
    digits = (codes[:, None] // pw[None, :]) % p

    def to_code(d):
        return (d * pw).sum(axis=-1)

    g = primitive_element(F)
    exp = np.zeros(2 * q, dtype=np.int64)
    if m == 1:
        v, gc = 1, g.code
        for k in range(q - 1):
            exp[k] = v
            v = v * gc % p
    else:
        mg = np.zeros((m, m), dtype=np.int64)
        for j in range(m):
            mg[:, j] = (g * FieldElement.from_code(F, p ** j)).coeffs
        v = digits[1].copy()
        for k in range(q - 1):
            exp[k] = int(v @ pw)
            v = mg @ v % p
    exp[q - 1:2 * (q - 1)] = exp[:q - 1]
    log = np.zeros(q, dtype=np.int64)
    log[exp[:q - 1]] = np.arange(q - 1, dtype=np.int64)
    inv = np.zeros(q, dtype=np.int64)
    inv[1:] = exp[(q - 1 - log[1:]) % (q - 1)]
    neg = to_code((-digits) % p)
    if m > 1 and q <= ADD_TABLE_LIMIT:
        add = to_code((digits[:, None, :] + digits[None, :, :]) % p)
    else:
        add = np.zeros((1, 1), dtype=np.int64)
    frob = np.zeros((m, q), dtype=np.int64)
    A = np.eye(m, dtype=np.int64)
    for e in range(m):
        frob[e] = to_code(digits @ A.T % p)
        A = _frob_matrix(p, m) @ A % p
    tabs = FieldTables(p, m, q, add, neg, inv, log, exp, frob, digits, pw)
    for arr in tabs[3:]:
        arr.flags.writeable = False
    return tabs


@dataclass(frozen=True, init=False)
class PolyFq:
    """Univariate polynomial over F_q; coefficients are element codes, constant first.

    Integers passed in are read as codes, which for a prime field is just
    the residue.  The zero polynomial has an empty coefficient tuple.
    """

    field: FieldDesc
    coeffs: tuple[int, ...]

    def __init__(self, field: FieldDesc, coeffs: Sequence = ()):
        out = []
        for c in coeffs:
            if isinstance(c, FieldElement):
                if c.field != field:
                    raise ValueError("coefficient from a different field")
                out.append(c.code)
            else:
                c = int(c)
                if field.m == 1:
                    c %= field.p
                elif not 0 <= c < field.q:
                    raise ValueError(f"code {c} out of range for {field}")
                out.append(c)
        while out and out[-1] == 0:
            out.pop()
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", tuple(out))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.int64)

    @classmethod
    def from_array(cls, field: FieldDesc, arr) -> "PolyFq":
        return cls(field, [int(c) for c in arr])

    def _check(self, other: "PolyFq"):
        if not isinstance(other, PolyFq):
            return NotImplemented
        if other.field != self.field:
            raise ValueError("polynomials over different fields")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        from .kernels import _np
        ft = self.field.tables
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.zeros(n, dtype=np.int64)
        b = np.zeros(n, dtype=np.int64)
        a[:len(self.coeffs)] = self.coeffs
        b[:len(other.coeffs)] = other.coeffs
        return PolyFq.from_array(self.field, _np.add(ft, a, b))

    def __neg__(self):
        return PolyFq.from_array(self.field, self.field.tables.neg[self.array()])

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        from . import kernels
        if not self.coeffs or not other.coeffs:
            return PolyFq(self.field)
        return PolyFq.from_array(self.field, kernels.poly_mul(self.field.tables, self.array(), other.array()))

    def derivative(self) -> "PolyFq":
        F = self.field
        out = []
        for k in range(1, len(self.coeffs)):
            out.append((F.element(self.coeffs[k]) * k).code)
        return PolyFq(F, out)

    def divmod(self, other: "PolyFq") -> tuple["PolyFq", "PolyFq"]:
        from . import kernels
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        qt, r = kernels.poly_divmod(self.field.tables, self.array(), other.array())
        return PolyFq.from_array(self.field, qt), PolyFq.from_array(self.field, r)

    def __call__(self, x: FieldElement) -> FieldElement:
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * x + self.field.element(c)
        return acc

    def __repr__(self) -> str:
        return f"PolyFq({self.field!r}, {list(self.coeffs)})"


def poly_gcd(f: PolyFq, g: PolyFq) -> PolyFq:
    """Monic gcd by Euclid's algorithm."""
    a, b = f, g
    while b.coeffs:
        a, b = b, a.divmod(b)[1]
    if not a.coeffs:
        return a
    lead = a.field.element(a.coeffs[-1]).inverse()
    return PolyFq(a.field, [a.field.element(c) * lead for c in a.coeffs])


def poly_pow_coeffs(f: PolyFq, k: int) -> PolyFq:
    """Coefficients of f**k by square-and-multiply.  By convention f**0 = 1, also for f = 0."""
    if k < 0:
        raise ValueError("exponent must be nonnegative")
    acc, base = PolyFq(f.field, [1]), f
    while k:
        if k & 1:
            acc = acc * base
        k >>= 1
        if k:
            base = base * base
    return acc


def is_squarefree(f: PolyFq) -> bool:
    """True iff gcd(f, f') = 1.  A vanishing derivative means f is a p-th power."""
    if f.degree < 1:
        raise ValueError("squarefreeness needs a nonconstant polynomial")
    d = f.derivative()
    if not d.coeffs:
        return False
    return poly_gcd(f, d).degree == 0
