"""Exact arithmetic in Z/3^N and the truncated Witt ring W(F9)/3^N.

W(F9) is the unramified quadratic extension of the 3-adic integers.  We
realize its truncation as (Z/3^N)[omega] where omega is the Teichmueller
lift of a generator of F9* (multiplicative order 8): the quadratic factor
x^2+x+2 of x^4+1 over F3 is Hensel-lifted to a factor of x^4+1 over
Z/3^N, and omega is the class of x in the quotient by that factor.  In
the basis {1, omega} every element is a coordinate pair (c0, c1).

Precision is carried on values as a plain integer N (work modulo 3^N);
operations on operands of different precision raise PrecisionMismatch
rather than coercing.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

DEFAULT_PRECISION = 8

# Single high-precision Hensel lift; every working precision is a reduction
# of this one, which keeps coordinates compatible across precisions.
_LIFT_PRECISION = 64


class PrecisionMismatch(ValueError):
    pass


class DomainError(ValueError):
    pass


def pow3(n: int) -> int:
    return 3 ** n


def v3(n: int) -> int:
    """3-adic valuation of a nonzero integer."""
    if n == 0:
        raise DomainError("v3(0) is infinite")
    n = abs(n)
    v = 0
    while n % 3 == 0:
        n //= 3
        v += 1
    return v


# ---------------------------------------------------------------------------
# Hensel lift of the factorization x^4 + 1 = (x^2+x+2)(x^2+2x+2) mod 3
# ---------------------------------------------------------------------------

def _polymul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _polymod_quad(p, q, m):
    """Reduce p modulo the monic quadratic x^2 + q[1]x + q[0], coeffs mod m."""
    p = [c % m for c in p]
    while len(p) > 2:
        d = len(p) - 1
        lead = p[-1]
        p[d] = 0
        p[d - 1] = (p[d - 1] - lead * q[1]) % m
        p[d - 2] = (p[d - 2] - lead * q[0]) % m
        while len(p) > 1 and p[-1] == 0:
            p.pop()
    while len(p) < 2:
        p.append(0)
    return [c % m for c in p]


@lru_cache(maxsize=None)
def _minpoly(prec: int):
    """Coefficients (A, B) of the Hensel lift x^2 + Ax + B of x^2+x+2.

    The lift divides x^4+1 over Z/3^prec, so omega = x mod (lift) satisfies
    omega^4 = -1.  The constant term B is the product omega * omega^3 = -1
    exactly, which we assert as an internal consistency check.
    """
    if prec < 1:
        raise DomainError("precision must be >= 1")
    if prec > _LIFT_PRECISION:
        raise DomainError(f"precision capped at {_LIFT_PRECISION}")
    if prec < _LIFT_PRECISION:
        A, B = _minpoly(_LIFT_PRECISION)
        m = pow3(prec)
        return A % m, B % m
    g = [2, 1]          # x^2 + x + 2, stored [const, linear]
    h = [2, 2]          # x^2 + 2x + 2
    u = [1, 2]          # Bezout: (2x+1)g + (x+1)h = 1 mod 3
    v = [1, 1]
    f = [1, 0, 0, 0, 1]
    mod = pow3(prec)
    for k in range(1, prec):
        pk = pow3(k)
        prod = _polymul([g[0], g[1], 1], [h[0], h[1], 1])
        e = [fc - pc for fc, pc in zip(f, prod)]
        assert all(c % pk == 0 for c in e)
        e3 = [(c // pk) % 3 for c in e]
        dg = _polymod_quad(_polymul(v, e3), g, 3)
        dh = _polymod_quad(_polymul(u, e3), h, 3)
        g = [(g[0] + pk * dg[0]) % mod, (g[1] + pk * dg[1]) % mod]
        h = [(h[0] + pk * dh[0]) % mod, (h[1] + pk * dh[1]) % mod]
    prod = _polymul([g[0], g[1], 1], [h[0], h[1], 1])
    assert all((pc - fc) % mod == 0 for pc, fc in zip(prod, f))
    assert (g[0] + 1) % mod == 0, "constant term of the lift must be -1"
    return g[1] % mod, g[0] % mod


# ---------------------------------------------------------------------------
# Witt elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WittElement:
    """c0 + c1*omega with c0, c1 in [0, 3^prec)."""
    c0: int
    c1: int
    prec: int

    def __post_init__(self):
        m = pow3(self.prec)
        object.__setattr__(self, "c0", self.c0 % m)
        object.__setattr__(self, "c1", self.c1 % m)

    def _check(self, other: "WittElement"):
        if self.prec != other.prec:
            raise PrecisionMismatch(
                f"operands at precision {self.prec} and {other.prec}")

    def __add__(self, other):
        self._check(other)
        return WittElement(self.c0 + other.c0, self.c1 + other.c1, self.prec)

    def __sub__(self, other):
        self._check(other)
        return WittElement(self.c0 - other.c0, self.c1 - other.c1, self.prec)

    def __neg__(self):
        return WittElement(-self.c0, -self.c1, self.prec)

    def __mul__(self, other):
        if isinstance(other, int):
            return WittElement(self.c0 * other, self.c1 * other, self.prec)
        self._check(other)
        A, B = _minpoly(self.prec)
        c0, c1, d0, d1 = self.c0, self.c1, other.c0, other.c1
        cross = c1 * d1
        return WittElement(c0 * d0 - B * cross,
                           c0 * d1 + c1 * d0 - A * cross, self.prec)

    __rmul__ = __mul__

    def frobenius(self) -> "WittElement":
        """The ring automorphism with omega |-> omega^3; an involution."""
        A, B = _minpoly(self.prec)
        # omega^3 = A*B + (A^2 - B) * omega
        return WittElement(self.c0 + self.c1 * A * B,
                           self.c1 * (A * A - B), self.prec)

    def norm(self) -> int:
        """x * sigma(x), an element of Z/3^prec."""
        A, _ = _minpoly(self.prec)
        # omega + omega^3 = -A and omega * omega^3 = omega^4 = -1
        return (self.c0 * self.c0 - A * self.c0 * self.c1
                - self.c1 * self.c1) % pow3(self.prec)

    def is_unit(self) -> bool:
        return (self.c0 % 3, self.c1 % 3) != (0, 0)

    def inverse(self) -> "WittElement":
        if not self.is_unit():
            raise DomainError("not a unit in W/3^N")
        m = pow3(self.prec)
        ninv = pow(self.norm(), -1, m)
        return self.frobenius() * ninv

    def reduce(self, prec: int) -> "WittElement":
        if prec > self.prec:
            raise DomainError("cannot raise precision")
        return WittElement(self.c0, self.c1, prec)

    def residue(self) -> tuple:
        return (self.c0 % 3, self.c1 % 3)

    def is_zero(self) -> bool:
        return self.c0 == 0 and self.c1 == 0

    def __str__(self):
        return f"{self.c0} + {self.c1}*w (mod 3^{self.prec})"


def witt(c0: int, c1: int = 0, prec: int = DEFAULT_PRECISION) -> WittElement:
    return WittElement(c0, c1, prec)


def witt_zero(prec: int = DEFAULT_PRECISION) -> WittElement:
    return WittElement(0, 0, prec)


def witt_one(prec: int = DEFAULT_PRECISION) -> WittElement:
    return WittElement(1, 0, prec)


def witt_mul(a: WittElement, b: WittElement) -> WittElement:
    return a * b


def witt_frobenius(a: WittElement) -> WittElement:
    return a.frobenius()


def teichmueller_omega(prec: int = DEFAULT_PRECISION) -> WittElement:
    """The fixed primitive 8th root of unity: omega^8 = 1, omega^4 = -1."""
    return WittElement(0, 1, prec)


def teichmueller_omega_conjugate(prec: int = DEFAULT_PRECISION) -> WittElement:
    """The other Hensel-lifted root of x^2+x+2, namely sigma(omega) = omega^3."""
    return teichmueller_omega(prec).frobenius()


@lru_cache(maxsize=None)
def omega_powers(prec: int) -> tuple:
    w = teichmueller_omega(prec)
    out = [witt_one(prec)]
    for _ in range(7):
        out.append(out[-1] * w)
    return tuple(out)


@lru_cache(maxsize=None)
def _teichmueller_table(prec: int) -> dict:
    """residue pair in F9 -> its Teichmueller representative in W/3^prec."""
    table = {(0, 0): witt_zero(prec)}
    for p in omega_powers(prec):
        table[p.residue()] = p
    assert len(table) == 9
    return table


def teichmueller_lift(r0: int, r1: int, prec: int = DEFAULT_PRECISION) -> WittElement:
    return _teichmueller_table(prec)[(r0 % 3, r1 % 3)]


def teichmueller_digits(w: WittElement, depth: int) -> list:
    """Digits tau_i with w = sum tau_i 3^i + O(3^depth), tau_i Teichmueller.

    Returned as F9 residue pairs.  Requires depth <= w.prec.
    """
    if depth > w.prec:
        raise DomainError("digit depth exceeds precision")
    digits = []
    c0, c1 = w.c0, w.c1
    for i in range(depth):
        prec_left = w.prec - i
        r = (c0 % 3, c1 % 3)
        digits.append(r)
        tau = teichmueller_lift(r[0], r[1], prec_left)
        m = pow3(prec_left)
        c0 = ((c0 - tau.c0) % m) // 3
        c1 = ((c1 - tau.c1) % m) // 3
    return digits


# ---------------------------------------------------------------------------
# The 3-adic logarithm on 1 + 3Z_3
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UnitOnePlus3:
    """A residue in Z/3^prec known to be congruent to 1 mod 3."""
    value: int
    prec: int

    def __post_init__(self):
        v = self.value % pow3(self.prec)
        if v % 3 != 1:
            raise DomainError(f"{self.value} is not congruent to 1 mod 3")
        object.__setattr__(self, "value", v)


_LOG_GUARD = 10


def padic_log(u: int, prec: int) -> int:
    """log(u) mod 3^prec for u = 1 mod 3, by the alternating series.

    The k-th term (u-1)^k / k has valuation >= k - v3(k), so summing to
    k_max = prec + guard leaves a tail of valuation > prec.
    """
    if u % 3 != 1:
        raise DomainError("padic_log requires u = 1 mod 3")
    work = prec + _LOG_GUARD
    m = pow3(work)
    x = (u - 1) % m
    kmax = prec + _LOG_GUARD - 2
    assert kmax - v3(kmax) if kmax % 3 == 0 else True  # noqa: trivial guard
    total = 0
    xk = 1
    for k in range(1, kmax + 1):
        xk = (xk * x) % m
        vk = v3(k)
        kunit = k // pow3(vk)
        # x^k is divisible by 3^k >= 3^vk, so the division below is exact
        term = (xk // pow3(vk)) * pow(kunit, -1, m)
        if k % 2 == 0:
            term = -term
        total = (total + term) % m
    return total % pow3(prec)


def log_base4(u, prec: int = None) -> int:
    """log(u)/log(4) in Z/3^{prec-1}: the inverse of n |-> 4^n on 1+3Z_3.

    One 3-adic digit is lost dividing by log(4), which has valuation
    exactly 1; the result lives modulo 3^{prec-1}.
    """
    if isinstance(u, UnitOnePlus3):
        value, prec = u.value, u.prec
    else:
        if prec is None:
            raise DomainError("precision required for raw integer input")
        value = u
    if value % 3 != 1:
        raise DomainError("log_base4 requires u = 1 mod 3")
    lu = padic_log(value, prec)
    l4 = padic_log(4, prec)
    assert l4 % 3 == 0 and (l4 // 3) % 3 != 0, "log(4) must have valuation 1"
    m1 = pow3(prec - 1)
    return ((lu // 3) * pow(l4 // 3, -1, m1)) % m1


def central_character_valuation(t: int) -> int:
    """v3(4^{t/2} - 1) for t a nonzero multiple of 4.

    This is the exponent bounding 3-power torsion in the internal-degree-t
    cohomology: for t = 4*3^k*m with 3 not dividing m it equals k+1.
    """
    if t == 0 or t % 4 != 0:
        raise DomainError("t must be a nonzero multiple of 4")
    n = abs(t) // 2
    return v3(pow(4, n) - 1)
