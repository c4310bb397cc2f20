"""Arithmetic in the order O_2 = W<S>/(S^2=3, wS=Sw^sigma) and its groups.

Elements of O_2 are written x + yS with x, y Witt elements; the twisted
multiplication is

    (a + bS)(c + dS) = (ac + 3 b d^sigma) + (ad + b c^sigma) S.

The full automorphism group adjoins the Galois involution phi acting by
phi(x + yS) = x^sigma + y^sigma S, giving the semidirect product law used
by G2Element.  All values are immutable and all operations pure.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .witt import (DEFAULT_PRECISION, DomainError, WittElement, log_base4,
                   pow3, teichmueller_lift, teichmueller_omega, witt,
                   witt_one, witt_zero)


class NotInvertible(ValueError):
    pass


class ClosureBoundExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class O2Element:
    x: WittElement
    y: WittElement

    def __post_init__(self):
        if self.x.prec != self.y.prec:
            raise DomainError("components must share precision")

    @property
    def prec(self):
        return self.x.prec

    def __add__(self, other):
        return O2Element(self.x + other.x, self.y + other.y)

    def __neg__(self):
        return O2Element(-self.x, -self.y)

    def __mul__(self, other: "O2Element") -> "O2Element":
        a, b, c, d = self.x, self.y, other.x, other.y
        return O2Element(a * c + 3 * (b * d.frobenius()),
                         a * d + b * c.frobenius())

    def galois(self) -> "O2Element":
        return O2Element(self.x.frobenius(), self.y.frobenius())

    def is_unit(self) -> bool:
        return self.x.is_unit()

    def reduced_norm(self) -> int:
        """N(x + yS) = x x^sigma - 3 y y^sigma, a residue in Z/3^prec."""
        n = self.x * self.x.frobenius() - 3 * (self.y * self.y.frobenius())
        assert n.c1 == 0, "reduced norm must land in Z/3^N"
        return n.c0

    def inverse(self) -> "O2Element":
        # (x + yS)(x^sigma - yS) = N(x + yS), so divide the conjugate by N
        if not self.is_unit():
            raise NotInvertible("x must be invertible mod 3")
        ninv = pow(self.reduced_norm(), -1, pow3(self.prec))
        return O2Element(self.x.frobenius() * ninv, -self.y * ninv)

    def reduce(self, prec: int) -> "O2Element":
        return O2Element(self.x.reduce(prec), self.y.reduce(prec))

    def is_one(self) -> bool:
        return self.x == witt_one(self.prec) and self.y.is_zero()

    def __str__(self):
        return f"({self.x}) + ({self.y})*S"


def o2(x: WittElement, y: WittElement) -> O2Element:
    return O2Element(x, y)


def o2_scalar(w: WittElement) -> O2Element:
    return O2Element(w, witt_zero(w.prec))


def o2_one(prec: int = DEFAULT_PRECISION) -> O2Element:
    return o2_scalar(witt_one(prec))


def o2_s(prec: int = DEFAULT_PRECISION) -> O2Element:
    return O2Element(witt_zero(prec), witt_one(prec))


def o2_mul(p: O2Element, q: O2Element) -> O2Element:
    return p * q


def reduced_norm(p: O2Element) -> int:
    return p.reduced_norm()


@dataclass(frozen=True)
class G2Element:
    """A unit of O_2 together with a Galois bit."""
    unit: O2Element
    phi: bool = False

    @property
    def prec(self):
        return self.unit.prec

    def __mul__(self, other: "G2Element") -> "G2Element":
        if not other.unit.is_unit():
            raise NotInvertible("right factor is not a unit")
        v = other.unit.galois() if self.phi else other.unit
        return G2Element(self.unit * v, self.phi != other.phi)

    def inverse(self) -> "G2Element":
        uinv = self.unit.inverse()
        return G2Element(uinv.galois() if self.phi else uinv, self.phi)

    def is_identity(self) -> bool:
        return not self.phi and self.unit.is_one()

    def reduce(self, prec: int) -> "G2Element":
        return G2Element(self.unit.reduce(prec), self.phi)

    def order(self, cap: int = 48) -> int:
        p = self
        for n in range(1, cap + 1):
            if p.is_identity():
                return n
            p = p * self
        raise DomainError(f"order exceeds cap {cap}")

    def __str__(self):
        return str(self.unit) + (" * phi" if self.phi else "")


def g2(u: O2Element, phi: bool = False) -> G2Element:
    return G2Element(u, phi)


def g2_mul(g: G2Element, h: G2Element) -> G2Element:
    return g * h


def g2_identity(prec: int = DEFAULT_PRECISION) -> G2Element:
    return G2Element(o2_one(prec), False)


def g2_phi(prec: int = DEFAULT_PRECISION) -> G2Element:
    return G2Element(o2_one(prec), True)


def g2_omega(prec: int = DEFAULT_PRECISION, conjugate: bool = False) -> G2Element:
    w = teichmueller_omega(prec)
    if conjugate:
        w = w.frobenius()
    return G2Element(o2_scalar(w), False)


def element_a(prec: int = DEFAULT_PRECISION, conjugate: bool = False) -> G2Element:
    """The order-3 element -(1/2)(1 + omega S) of the unit group."""
    w = teichmueller_omega(prec)
    if conjugate:
        w = w.frobenius()
    half = pow(2, -1, pow3(prec))
    u = O2Element(witt(-half, 0, prec), -half * w)
    return G2Element(u, False)


def central_unit(c: int, prec: int = DEFAULT_PRECISION) -> G2Element:
    """The scalar c*1 of the center, for c a unit of Z/3^prec."""
    return G2Element(o2_scalar(witt(c, 0, prec)), False)


# ---------------------------------------------------------------------------
# Finite subgroups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteSubgroup:
    label: str
    generators: tuple
    elements: frozenset


def subgroup_closure(gens, bound: int = 200, label: str = "") -> FiniteSubgroup:
    """Breadth-first closure of the generators under the group law.

    Inverses are adjoined up front; if the closure exceeds `bound` the
    generators do not span a finite subgroup at this precision.
    """
    if bound < 1:
        raise DomainError("bound must be >= 1")
    gens = tuple(gens)
    prec = gens[0].prec if gens else DEFAULT_PRECISION
    step = list(gens) + [g.inverse() for g in gens]
    seen = {g2_identity(prec)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for e in frontier:
            for s in step:
                p = e * s
                if p not in seen:
                    seen.add(p)
                    if len(seen) > bound:
                        raise ClosureBoundExceeded(
                            f"closure of {label or 'generators'} exceeds {bound}")
                    nxt.append(p)
        frontier = nxt
    return FiniteSubgroup(label, gens, frozenset(seen))


def g24_generators(prec: int = DEFAULT_PRECISION, conjugate: bool = False):
    """a, omega^2, omega*phi: generators of the order-24 maximal subgroup."""
    om = g2_omega(prec, conjugate)
    return (element_a(prec, conjugate), om * om,
            G2Element(om.unit, True))


def sd16_generators(prec: int = DEFAULT_PRECISION, conjugate: bool = False):
    """omega, phi: generators of the semidihedral group of order 16."""
    return (g2_omega(prec, conjugate), g2_phi(prec))


@lru_cache(maxsize=None)
def g24_subgroup(prec: int = DEFAULT_PRECISION, conjugate: bool = False) -> FiniteSubgroup:
    return subgroup_closure(g24_generators(prec, conjugate), bound=48, label="G24")


@lru_cache(maxsize=None)
def sd16_subgroup(prec: int = DEFAULT_PRECISION, conjugate: bool = False) -> FiniteSubgroup:
    return subgroup_closure(sd16_generators(prec, conjugate), bound=32, label="SD16")


def subgroup_structure(H: FiniteSubgroup) -> dict:
    """Order, element-order histogram and center size of a closed subgroup."""
    elems = list(H.elements)
    hist = {}
    for e in elems:
        n = e.order()
        hist[n] = hist.get(n, 0) + 1
    center = sum(1 for e in elems if all(e * f == f * e for f in elems))
    return {"label": H.label, "order": len(elems),
            "order_histogram": dict(sorted(hist.items())),
            "center_size": center}


def q8_certificate(prec: int = DEFAULT_PRECISION, conjugate: bool = False) -> dict:
    """Check <omega^2, omega*phi> is quaternion of order 8.

    Certificate: size 8, a unique involution z, and i^2 = j^2 = (ij)^2 = z.
    """
    om = g2_omega(prec, conjugate)
    i = om * om
    j = G2Element(om.unit, True)
    H = subgroup_closure((i, j), bound=16, label="Q8")
    involutions = [e for e in H.elements if e.order() == 2]
    ok_size = len(H.elements) == 8
    ok_unique = len(involutions) == 1
    z = involutions[0] if involutions else None
    ok_rel = z is not None and (i * i == z and j * j == z and
                                (i * j) * (i * j) == z)
    return {"order": len(H.elements), "unique_involution": ok_unique,
            "squares_equal_involution": ok_rel,
            "passed": ok_size and ok_unique and ok_rel}


def g24_action_checks(prec: int = DEFAULT_PRECISION, conjugate: bool = False) -> dict:
    """omega^2 conjugates a to a^2; omega*phi centralizes a."""
    a = element_a(prec, conjugate)
    om = g2_omega(prec, conjugate)
    i = om * om
    j = G2Element(om.unit, True)
    conj_i = i * a * i.inverse()
    conj_j = j * a * j.inverse()
    return {"omega2_sends_a_to_a2": conj_i == a * a and conj_i != a,
            "omegaphi_fixes_a": conj_j == a}


def sd16_relation_check(prec: int = DEFAULT_PRECISION, conjugate: bool = False) -> bool:
    """The semidihedral relation phi omega phi^{-1} = omega^3."""
    om = g2_omega(prec, conjugate)
    ph = g2_phi(prec)
    lhs = ph * om * ph.inverse()
    return lhs == om * om * om


# ---------------------------------------------------------------------------
# Reduced determinant and the splitting of the full group
# ---------------------------------------------------------------------------

def reduced_det(g: G2Element) -> int:
    """Torsion-free part of the reduced norm, in additive form.

    N(g) is a unit of Z_3; writing N(g) = tau * u with tau in {+1,-1} the
    Teichmueller part and u in 1+3Z_3, the value is log_base4(u), a residue
    modulo 3^{prec-1}.  The Galois bit maps to 0, so that every finite
    subgroup lands in the kernel.
    """
    n = g.unit.reduced_norm()
    r = n % 3
    if r == 0:
        raise NotInvertible("reduced norm is not a unit")
    u = n if r == 1 else (-n) % pow3(g.prec)
    return log_base4(u, g.prec)


def in_g2_1(g: G2Element) -> bool:
    """Membership in the norm-one subgroup: reduced determinant zero."""
    return reduced_det(g) == 0


def group_verify_report(prec: int = DEFAULT_PRECISION, conjugate: bool = False) -> dict:
    """All subgroup, norm and splitting checks as a pass/fail report."""
    checks = {}
    g24 = g24_subgroup(prec, conjugate)
    sd16 = sd16_subgroup(prec, conjugate)
    checks["g24_order_24"] = len(g24.elements) == 24
    checks["sd16_order_16"] = len(sd16.elements) == 16
    checks["semidihedral_relation"] = sd16_relation_check(prec, conjugate)
    q8 = q8_certificate(prec, conjugate)
    checks["q8_certificate"] = q8["passed"]
    act = g24_action_checks(prec, conjugate)
    checks.update(act)
    checks["a_has_order_3"] = element_a(prec, conjugate).order() == 3
    hist = subgroup_structure(sd16)["order_histogram"]
    checks["sd16_four_elements_of_order_8"] = hist.get(8, 0) == 4
    checks["g24_normal_c3"] = subgroup_closure(
        (element_a(prec, conjugate),), bound=8).elements <= g24.elements
    four = central_unit(4, prec)
    checks["reduced_det_of_central_4_is_2"] = reduced_det(four) == 2
    checks["finite_subgroups_in_kernel"] = all(
        reduced_det(e) == 0 for e in list(g24.elements) + list(sd16.elements))
    # closure sizes must be precision artifacts at neither N nor N+2
    g24_hi = subgroup_closure(g24_generators(prec + 2, conjugate), bound=48)
    sd16_hi = subgroup_closure(sd16_generators(prec + 2, conjugate), bound=32)
    checks["closure_stable_under_precision"] = (
        len(g24_hi.elements) == len(g24.elements)
        and len(sd16_hi.elements) == len(sd16.elements))
    return {"precision": prec,
            "conjugate_root": conjugate,
            "checks": checks,
            "passed": all(checks.values())}
