"""Closed-form limit laws and exact counts.

Infinite products are truncated with a certified bound: for x_i = q^{-i},
``sum_{i>N} |log(1 +- x_i)| <= 2 q^{-N} / (1 - 1/q)``, which bounds the
relative error of the truncated product.  Counts are exact integers and
finite-genus probabilities are exact fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, log

import mpmath

from .errors import InvalidSpec, NonPositiveGap

_DPS = 40
DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class ProbValue:
    """A probability evaluated to high precision with a proven error bound."""

    value: mpmath.mpf
    tail_bound: mpmath.mpf
    exact: Fraction | None = None

    def __float__(self) -> float:
        return float(self.value)

    def __repr__(self) -> str:
        return f"ProbValue({mpmath.nstr(self.value, 12)}, tail<={mpmath.nstr(self.tail_bound, 3)})"


@dataclass(frozen=True)
class ExactCount:
    value: int

    def __int__(self) -> int:
        return self.value


def _check_q(q: int):
    if q < 2:
        raise InvalidSpec(f"q must be at least 2, got {q}")


def _check_tol(tol: float):
    if not tol > 0:
        raise InvalidSpec("tolerance must be positive")


def _log_tail(q: int, N: int) -> mpmath.mpf:
    return 2 * mpmath.mpf(q) ** (-N) / (1 - mpmath.mpf(1) / q)


def _truncated(q: int, scale, sign: int, power: int, tol: float, start: int = 1):
    """scale * prod_{i>=start} (1 + sign q^{-i})^{power}, with its error bound.

    The truncation point is the least N >= start whose certified bound on
    the absolute error is at most tol.
    """
    _check_tol(tol)
    with mpmath.workdps(_DPS):
        qq = mpmath.mpf(q)
        acc = mpmath.mpf(scale)
        N = start - 1
        while True:
            bound = abs(acc) * (mpmath.exp(_log_tail(q, N)) - 1)
            if bound <= tol:
                return +acc, bound
            N += 1
            acc *= (1 + sign * qq ** (-N)) ** power


def _finite_scale(q: int, r: int) -> mpmath.mpf:
    with mpmath.workdps(_DPS):
        qq = mpmath.mpf(q)
        out = qq ** (-comb(r + 1, 2))
        for i in range(1, r + 1):
            out /= 1 - qq ** (-i)
        return out


def mg(q: int, r: int, tol: float = DEFAULT_TOL) -> ProbValue:
    """Limit probability that a random module has a-number r."""
    _check_q(q)
    if r < 0:
        raise InvalidSpec("a-number must be nonnegative")
    v, b = _truncated(q, _finite_scale(q, r), +1, -1, tol)
    return ProbValue(v, b)


def tmg(q: int, b: int) -> ProbValue:
    """The finite product prod_{j=1}^{b} (1 - q^{1-2j})."""
    _check_q(q)
    if b < 0:
        raise InvalidSpec("b must be nonnegative")
    out = Fraction(1)
    for j in range(1, b + 1):
        out *= 1 - Fraction(1, q ** (2 * j - 1))
    with mpmath.workdps(_DPS):
        v = mpmath.mpf(out.numerator) / out.denominator
    return ProbValue(v, mpmath.mpf(0), out)


def corank_joint_prob(q: int, r: int, s: int, tol: float = DEFAULT_TOL) -> ProbValue:
    """Limit probability of a-number r together with p-corank s."""
    _check_q(q)
    if not 0 <= r <= s:
        raise InvalidSpec(f"need 0 <= r <= s, got r={r}, s={s}")
    with mpmath.workdps(_DPS):
        qq = mpmath.mpf(q)
        scale = qq ** (-comb(r + 1, 2) + r - s)
        for i in range(r, s):
            scale *= 1 - qq ** (-i)
        for i in range(1, s - r + 1):
            scale /= 1 - qq ** (-i)
    v, b = _truncated(q, scale, +1, -1, tol)
    return ProbValue(v, b)


def corank_prob(q: int, s: int, tol: float = DEFAULT_TOL) -> ProbValue:
    """Marginal limit probability of p-corank s (sum over a-numbers)."""
    parts = [corank_joint_prob(q, r, s, tol / (s + 1)) for r in range(s + 1)]
    with mpmath.workdps(_DPS):
        return ProbValue(mpmath.fsum(p.value for p in parts), mpmath.fsum(p.tail_bound for p in parts))


def point_dim_prob(p: int, d: int, tol: float = DEFAULT_TOL) -> ProbValue:
    """Limit probability that the rational p-torsion has F_p-dimension d."""
    _check_q(p)
    if d < 0:
        raise InvalidSpec("dimension must be nonnegative")
    with mpmath.workdps(_DPS):
        pp = mpmath.mpf(p)
        scale = pp ** (-d * d)
        for i in range(1, d + 1):
            scale /= 1 - pp ** (-i)
    v, b = _truncated(p, scale, -1, 1, tol, start=d + 1)
    return ProbValue(v, b)


def gl_order(q: int, n: int) -> int:
    out = 1
    for i in range(n):
        out *= q ** n - q ** i
    return out


def sp_order(q: int, two_g: int) -> int:
    if two_g % 2:
        raise InvalidSpec("symplectic groups need even dimension")
    g = two_g // 2
    out = q ** (g * g)
    for i in range(1, g + 1):
        out *= q ** (2 * i) - 1
    return out


def cl_group_prob(p: int, d: int, tol: float = DEFAULT_TOL) -> ProbValue:
    """Cohen-Lenstra weight of the elementary abelian group (Z/p)^d."""
    _check_q(p)
    if d < 0:
        raise InvalidSpec("dimension must be nonnegative")
    aut = gl_order(p, d)
    v, b = _truncated(p, mpmath.mpf(1) / aut, -1, 1, tol)
    return ProbValue(v, b)


def lagrangians(q: int, g: int) -> int:
    """Number of maximal isotropic subspaces of a 2g-dimensional symplectic space."""
    num = sp_order(q, 2 * g)
    den = q ** (g * (g + 1) // 2) * gl_order(q, g)
    assert num % den == 0
    return num // den


def lagrangians_product(q: int, g: int) -> int:
    """The same count as the product of (q^i + 1), i = 1..g."""
    out = 1
    for i in range(1, g + 1):
        out *= q ** i + 1
    return out


def lagrangian_pairs(q: int, g: int, r: int) -> int:
    """Ordered pairs of maximal isotropics meeting in dimension r."""
    if not 0 <= r <= g:
        raise InvalidSpec(f"need 0 <= r <= g, got r={r}, g={g}")
    val = (Fraction(q ** (g * g + g - comb(r + 1, 2)))
           * Fraction(q ** (r * r), gl_order(q, r))
           * Fraction(q ** ((g - r) ** 2), gl_order(q, g - r))
           * Fraction(sp_order(q, 2 * g), q ** (2 * g * g + g)))
    assert val.denominator == 1
    return int(val)


def semilinear_surjections(q: int, g: int, r: int) -> int:
    """Semilinear surjections from a g-space onto a fixed (g - r)-space."""
    if not 0 <= r <= g:
        raise InvalidSpec(f"need 0 <= r <= g, got r={r}, g={g}")
    out = 1
    for i in range(g - r):
        out *= q ** g - q ** i
    return out


def grassmannian(q: int, g: int, r: int) -> int:
    """Number of (g - r)-dimensional subspaces of a g-dimensional space."""
    if not 0 <= r <= g:
        raise InvalidSpec(f"need 0 <= r <= g, got r={r}, g={g}")
    num = gl_order(q, g)
    den = gl_order(q, r) * gl_order(q, g - r) * q ** (r * (g - r))
    assert num % den == 0
    return num // den


def stablerank_census(q: int, g: int, s: int, r: int) -> int:
    """Number of g x g semilinear endomorphisms with rank s and stable rank r.

    For s < g this is the closed form valid when g > s >= r >= 0.  The
    remaining cell s = g holds exactly the invertible maps.
    """
    if not 0 <= r <= s <= g:
        raise InvalidSpec(f"need 0 <= r <= s <= g, got g={g}, s={s}, r={r}")
    if s == g:
        return gl_order(q, g) if r == g else 0
    num = 1
    for i in range(r):
        num *= q ** g - q ** i
    num *= gl_order(q, g - r)
    for i in range(s - r):
        num *= q ** (g - r - 1) - q ** i
    num *= q ** (r * (g - r))
    den = gl_order(q, s - r) * gl_order(q, g - s) * q ** ((s - r) * (g - s))
    assert num % den == 0
    return num // den


def group_order(q: int, group: str, n: int) -> int:
    if group == "GL":
        return gl_order(q, n)
    if group == "Sp":
        return sp_order(q, n)
    raise InvalidSpec(f"unknown group {group!r}")


_COUNTS = {
    "lagrangians": lagrangians,
    "lagrangian_pairs": lagrangian_pairs,
    "semilinear_surjections": semilinear_surjections,
    "grassmannian": grassmannian,
    "stablerank_census": stablerank_census,
    "group_orders": group_order,
}


def exact_count(kind: str, *params) -> ExactCount:
    try:
        fn = _COUNTS[kind]
    except KeyError:
        raise InvalidSpec(f"unknown count {kind!r}") from None
    return ExactCount(int(fn(*params)))


def finite_g_anumber_prob(q: int, g: int, r: int) -> Fraction:
    """Exact probability of a-number r for the genus-g model."""
    return Fraction(lagrangian_pairs(q, g, r), lagrangians(q, g) ** 2)


def moment_prediction(q: int, m: int) -> ExactCount:
    """Limit mean of the number of injections F_q^m -> (ker F cap im F)."""
    if m < 1:
        raise InvalidSpec("m must be at least 1")
    return ExactCount(q ** comb(m, 2))


def discrepancy_exponent(p: int, empirical: float) -> float:
    """log(empirical - mg(p, 0)) / log p; raises NonPositiveGap if the gap is not positive."""
    base = mg(p, 0, 1e-15).value
    with mpmath.workdps(_DPS):
        gap = mpmath.mpf(empirical) - base
        if gap <= 0:
            raise NonPositiveGap(f"empirical value {empirical} does not exceed mg({p}, 0)")
        return float(mpmath.log(gap) / log(p))


def surjection_moment_prediction(p: int, delta: int) -> ExactCount:
    """Limit mean number of surjections onto (Z/p)^delta: one for every target group."""
    _check_q(p)
    if delta < 1:
        raise InvalidSpec("delta must be at least 1")
    return ExactCount(1)
