"""Monomial models of the first page of the finite-resolution spectral sequence.

Columns 0 and 3 are completed modular-forms-like rings

    F3[[v1^6 D^-1]][D^{+-1}, v1, beta, alpha, alphabar] / relations

with normal form: alpha^2 = alphabar^2 = v1*alpha = v1*alphabar = 0 and
alpha*alphabar rewritten to -v1*beta at construction, so stored monomials
are D^k v1^a beta^b with a,b >= 0, or D^k beta^b alpha / D^k beta^b alphabar.
Columns 1 and 2 are free topological modules on monomials w^2 u1^i u^e with
i >= 0 and e = 4 - 2i mod 8 (w^2 is a basis marker with no arithmetic role).

Gradings: v1 has (q,t) = (0,4), D = (0,24), beta = (2,12), alpha = (1,4),
alphabar = (1,12), u = (0,-2), u1 = (0,0).

Each homogeneous piece is a finite union of filtration towers; FiltrationCaps
truncates the (v1^6 D^-1)-adic filtration at J (columns 0,3) and the u1-adic
valuation at V (columns 1,2), giving exact finite-dimensional snapshots.
"""
from __future__ import annotations

from dataclasses import dataclass

from .witt import DomainError


@dataclass(frozen=True)
class FiltrationCaps:
    J: int
    V: int
    t_min: int = -96
    t_max: int = 96

    def __post_init__(self):
        if self.J < 1 or self.V < 1:
            raise DomainError("caps must be >= 1")
        if self.t_min > self.t_max:
            raise DomainError("empty degree window")

    def doubled(self) -> "FiltrationCaps":
        return FiltrationCaps(2 * self.J, 2 * self.V, self.t_min, self.t_max)


DEFAULT_CAPS = FiltrationCaps(12, 12)


@dataclass(frozen=True)
class E1Monomial:
    """A basis monomial of one column.

    Columns 0,3 use (k, a, b, eps, delta) for D^k v1^a beta^b alpha^eps
    alphabar^delta; columns 1,2 use (i, e) for w^2 u1^i u^e.
    """
    p: int
    k: int = 0
    a: int = 0
    b: int = 0
    eps: int = 0
    delta: int = 0
    i: int = 0
    e: int = 0

    def __post_init__(self):
        if self.p in (0, 3):
            if self.a < 0 or self.b < 0:
                raise DomainError("negative exponent")
            if self.eps not in (0, 1) or self.delta not in (0, 1):
                raise DomainError("alpha exponents are 0 or 1")
            if self.eps and self.delta:
                raise DomainError("alpha*alphabar is rewritten to -v1*beta")
            if self.a > 0 and (self.eps or self.delta):
                raise DomainError("v1*alpha and v1*alphabar vanish")
        elif self.p in (1, 2):
            if self.i < 0:
                raise DomainError("u1 exponent must be >= 0")
            if (self.e - (4 - 2 * self.i)) % 8 != 0:
                raise DomainError("u exponent must be 4 - 2i mod 8")
        else:
            raise DomainError("column must be 0..3")

    def tridegree(self) -> tuple:
        if self.p in (0, 3):
            q = 2 * self.b + self.eps + self.delta
            t = (24 * self.k + 4 * self.a + 12 * self.b
                 + 4 * self.eps + 12 * self.delta)
            return (self.p, q, t)
        return (self.p, 0, -2 * self.e)

    def filtration(self) -> int:
        return self.a // 6 if self.p in (0, 3) else self.i


def basis(p: int, q: int, t: int, caps: FiltrationCaps) -> list:
    """The ordered monomial basis of the truncated (p,q,t) component."""
    if not caps.t_min <= t <= caps.t_max:
        raise DomainError("t outside the configured window")
    if q < 0:
        return []
    if p in (1, 2):
        if q != 0 or t % 4 != 0:
            return []
        e = -t // 2
        i0 = ((4 - e) // 2) % 4
        return [E1Monomial(p=p, i=i, e=e)
                for i in range(i0, caps.V, 4)]
    out = []
    if q % 2 == 0:
        b = q // 2
        r = t - 12 * b
        if r % 4 == 0:
            a0 = (r // 4) % 6
            k_max = (r - 4 * a0) // 24
            for j in range(caps.J):
                out.append(E1Monomial(p=p, k=k_max - j, a=a0 + 6 * j, b=b))
    else:
        b = (q - 1) // 2
        for shift, eps, delta in ((4, 1, 0), (12, 0, 1)):
            r = t - 12 * b - shift
            if r % 24 == 0:
                out.append(E1Monomial(p=p, k=r // 24, b=b,
                                      eps=eps, delta=delta))
    return out


def poincare_table(p: int, q_range, caps: FiltrationCaps) -> dict:
    """Dimensions of the truncated homogeneous pieces over the window."""
    table = {}
    for q in q_range:
        for t in range(caps.t_min, caps.t_max + 1):
            d = len(basis(p, q, t, caps))
            if d:
                table[(q, t)] = d
    return table


def poincare_brute_force(p: int, q: int, t: int, caps: FiltrationCaps) -> int:
    """Independent dimension count by direct generator-exponent enumeration.

    Expands the defining presentations monomial by monomial (free tower
    times finite part for columns 0,3; deduplicated (s,r,l) products for
    columns 1,2) instead of solving the degree equations.
    """
    if q < 0:
        return 0
    if p in (1, 2):
        if q != 0:
            return 0
        seen = set()
        for s in range(caps.V):
            for r in range(caps.V):
                i = 4 * s + r
                if i >= caps.V:
                    continue
                # w^2 u^4 (u1^4)^s (u1 u^-2)^r u^(8l): solve l from the degree
                num = t + 8 - 4 * r
                if num % 16 == 0:
                    e = 4 - 2 * r + 8 * (-num // 16)
                    if -2 * e == t:
                        seen.add((i, e))
        return len(seen)
    count = 0
    for b in range(q // 2 + 1):
        for eps in (0, 1):
            for delta in (0, 1):
                if 2 * b + eps + delta != q or (eps and delta):
                    continue
                if eps or delta:
                    # torsion over the filtration ring: no tower
                    r = t - 12 * b - 4 * eps - 12 * delta
                    if r % 24 == 0:
                        count += 1
                else:
                    for a0 in range(6):
                        r = t - 4 * a0 - 12 * b
                        if r % 24 == 0:
                            count += caps.J
    return count


# ---------------------------------------------------------------------------
# Adapted generators: the elements carrying closed-form differentials
# ---------------------------------------------------------------------------

KINDS = ("delta", "b", "bbar", "deltabar")
KIND_COLUMN = {"delta": 0, "b": 1, "bbar": 2, "deltabar": 3}


@dataclass(frozen=True)
class AdaptedGenerator:
    """delta_k / b_L / bbar_L / deltabar_k; b-kinds carry the odd label L."""
    kind: str
    index: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown kind {self.kind}")
        if self.kind in ("b", "bbar") and self.index % 2 == 0:
            raise DomainError("b-family generators carry an odd label")

    @property
    def column(self) -> int:
        return KIND_COLUMN[self.kind]

    def tridegree(self) -> tuple:
        if self.kind in ("delta", "deltabar"):
            return (self.column, 0, 24 * self.index)
        return (self.column, 0, 8 * self.index)


def adapted_generator(kind: str, index: int) -> AdaptedGenerator:
    return AdaptedGenerator(kind, index)


def leading_monomial(kind: str, index: int, a: int = 0) -> E1Monomial:
    """Leading term of v1^a times the generator, in the monomial basis."""
    g = AdaptedGenerator(kind, index)
    if kind in ("delta", "deltabar"):
        return E1Monomial(p=g.column, k=index, a=a)
    return E1Monomial(p=g.column, i=a, e=-4 * index - 2 * a)


def adapted_line(p: int, t: int, j_cap: int = None, a_cap: int = None) -> list:
    """The q=0 adapted basis of column p in internal degree t.

    Entries are (kind, index, a) triples: v1^a delta_k etc.  Columns 0,3
    are truncated by the tower index a//6 < j_cap; columns 1,2 by a < a_cap.
    """
    kind = KINDS[p]
    out = []
    if p in (0, 3):
        if t % 4 != 0 or j_cap is None:
            return [] if t % 4 != 0 else None
        a0 = (t // 4) % 6
        k_max = (t - 4 * a0) // 24
        for j in range(j_cap):
            out.append((kind, k_max - j, a0 + 6 * j))
    else:
        if t % 4 != 0 or a_cap is None:
            return [] if t % 4 != 0 else None
        # t = 8L + 4a with L odd: a = (t - 8L)/4 >= 0
        r = (t - 8) % 16
        a_first = {0: 0, 4: 1, 8: 2, 12: 3}[r % 16]
        for a in range(a_first, a_cap, 4):
            L = (t - 4 * a) // 8
            assert L % 2 != 0
            out.append((kind, L, a))
    return out


# ---------------------------------------------------------------------------
# The integral order-24 cohomology ring
# ---------------------------------------------------------------------------

class IntegralElement:
    """Element of Z3[[j]][c4,c6,D^{+-1}][alpha,beta] / relations.

    Free part: integer combinations of c4^x c6^y D^z with y reduced below 2
    via c6^2 = c4^3 - 1728 D.  Torsion part: F3-combinations of
    beta^b alpha^eps D^z with b + eps >= 1; c4 and c6 annihilate it.
    Degrees: c4: 8, c6: 12, D: 24, alpha: (s,t) = (1,4), beta: (2,12).
    """

    __slots__ = ("free", "tors")

    def __init__(self, free=None, tors=None):
        self.free = {}
        for m, c in (free or {}).items():
            self._add_free(m, c)
        self.tors = {m: c % 3 for m, c in (tors or {}).items() if c % 3}

    def _add_free(self, m, c):
        x, y, z = m
        while y >= 2:
            # c6^2 = c4^3 - 1728 D
            y -= 2
            self._add_free((x + 3, y, z), c)
            c = -1728 * c
            z += 1
        if c:
            key = (x, y, z)
            v = self.free.get(key, 0) + c
            if v:
                self.free[key] = v
            else:
                del self.free[key]

    def __add__(self, other):
        out = IntegralElement(dict(self.free), dict(self.tors))
        for m, c in other.free.items():
            out._add_free(m, c)
        for m, c in other.tors.items():
            v = (out.tors.get(m, 0) + c) % 3
            if v:
                out.tors[m] = v
            else:
                out.tors.pop(m, None)
        return out

    def __neg__(self):
        return IntegralElement({m: -c for m, c in self.free.items()},
                               {m: -c for m, c in self.tors.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = IntegralElement()
        for (x1, y1, z1), c1 in self.free.items():
            for (x2, y2, z2), c2 in other.free.items():
                out._add_free((x1 + x2, y1 + y2, z1 + z2), c1 * c2)
        for part, opart in ((self.free, other.tors), (other.free, self.tors)):
            for (x, y, z), c in part.items():
                if x or y:
                    continue  # c4, c6 annihilate the torsion ideal
                for (b, eps, z2), c2 in opart.items():
                    key = (b, eps, z + z2)
                    v = (out.tors.get(key, 0) + c * c2) % 3
                    if v:
                        out.tors[key] = v
                    else:
                        out.tors.pop(key, None)
        for (b1, e1, z1), c1 in self.tors.items():
            for (b2, e2, z2), c2 in other.tors.items():
                if e1 and e2:
                    continue  # alpha^2 = 0
                key = (b1 + b2, e1 + e2, z1 + z2)
                v = (out.tors.get(key, 0) + c1 * c2) % 3
                if v:
                    out.tors[key] = v
                else:
                    out.tors.pop(key, None)
        return out

    def is_zero(self):
        return not self.free and not self.tors

    def __eq__(self, other):
        return self.free == other.free and self.tors == other.tors


def _gen(name):
    table = {
        "one": IntegralElement({(0, 0, 0): 1}),
        "c4": IntegralElement({(1, 0, 0): 1}),
        "c6": IntegralElement({(0, 1, 0): 1}),
        "D": IntegralElement({(0, 0, 1): 1}),
        "Dinv": IntegralElement({(0, 0, -1): 1}),
        "j": IntegralElement({(3, 0, -1): 1}),
        "alpha": IntegralElement(tors={(0, 1, 0): 1}),
        "beta": IntegralElement(tors={(1, 0, 0): 1}),
    }
    return table[name]


def integral_relations_check(j_cap: int = 12, window=(-96, 96)) -> dict:
    """Certify the integral presentation and its mod-3 comparison map.

    Checks: the defining relations normalize to zero without collapsing the
    ring; the s=1 line is empty in internal degree 0 (the exactness
    hypothesis used downstream); and c4 -> v1^2, c6 -> v1^3, D -> D embeds
    the mod-3 free part into the column-0 q=0 line, filling every
    v1-exponent except the single slot a = 1 in each tower.
    """
    c4, c6, D, Dinv = _gen("c4"), _gen("c6"), _gen("D"), _gen("Dinv")
    jj, alpha, beta = _gen("j"), _gen("alpha"), _gen("beta")
    scale = IntegralElement({(0, 0, 0): 1728})
    checks = {}
    checks["c4^3 - c6^2 - 1728D = 0"] = (
        c4 * c4 * c4 - c6 * c6 - scale * D).is_zero()
    checks["jD - c4^3 = 0"] = (jj * D - c4 * c4 * c4).is_zero()
    checks["alpha^2 = 0"] = (alpha * alpha).is_zero()
    checks["3*alpha = 0"] = (alpha + alpha + alpha).is_zero()
    checks["3*beta = 0"] = (beta + beta + beta).is_zero()
    checks["c4*alpha = 0"] = (c4 * alpha).is_zero()
    checks["c4*beta = 0"] = (c4 * beta).is_zero()
    checks["c6*alpha = 0"] = (c6 * alpha).is_zero()
    checks["c6*beta = 0"] = (c6 * beta).is_zero()
    checks["alpha*beta*c4 = 0"] = (alpha * beta * c4).is_zero()
    # no collapse: products of the surviving generators stay nonzero
    b5 = beta * beta * beta * beta * beta
    checks["no_collapse"] = (not (c4 * c6 * Dinv).is_zero()
                             and not b5.is_zero()
                             and not (alpha * beta * Dinv).is_zero()
                             and (D * Dinv) == _gen("one"))
    # s=1 in internal degree 0: alpha D^z has degree 4 + 24z, never 0
    h1_t0 = [z for z in range(-10, 11) if 4 + 24 * z == 0]
    checks["h1_degree_0_empty"] = not h1_t0
    # mod-3 comparison with the column-0 line, per degree
    caps = FiltrationCaps(j_cap, j_cap, window[0], window[1])
    cmp_ok = True
    for t in range(window[0], window[1] + 1):
        if t % 4 != 0:
            continue
        col0 = {(m.k, m.a) for m in basis(0, 0, t, caps)}
        image = set()
        for y in (0, 1):
            for x in range(0, (6 * j_cap) // 2 + 2):
                z, rem = divmod(t - 8 * x - 12 * y, 24)
                if rem:
                    continue
                a = 2 * x + 3 * y
                if a < 6 * j_cap:
                    image.add((z, a))
        a0 = (t // 4) % 6
        expected = j_cap - (1 if a0 == 1 else 0)
        if not (image <= col0 and len(image) == expected):
            cmp_ok = False
            break
    checks["mod3_comparison_fills_column0"] = cmp_ok
    return {"checks": checks, "passed": all(checks.values())}
