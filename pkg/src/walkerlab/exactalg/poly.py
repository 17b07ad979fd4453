"""Univariate polynomials over Scalar, factorization into the quadratic tower."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import mpmath

from ..errors import MixedRadicands, UnsupportedAlgebraicDegree
from .scalar import ONE, ZERO, Scalar, radicand_of, sqrt_in_field, squarefree_split


class Poly:
    """Immutable polynomial; ``coeffs[i]`` is the coefficient of x**i."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [Scalar.coerce(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def from_roots(cls, roots) -> Poly:
        p = cls([ONE])
        for r in roots:
            p = p * cls([-Scalar.coerce(r), ONE])
        return p

    @classmethod
    def x(cls) -> Poly:
        return cls([ZERO, ONE])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Scalar:
        return self.coeffs[-1] if self.coeffs else ZERO

    @property
    def radicand(self) -> int | None:
        return radicand_of(self.coeffs)

    def is_rational(self) -> bool:
        return all(c.d is None for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: Poly) -> Poly:
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (ZERO,) * (n - len(self.coeffs))
        b = other.coeffs + (ZERO,) * (n - len(other.coeffs))
        return Poly([x + y for x, y in zip(a, b)])

    def __neg__(self) -> Poly:
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other) -> Poly:
        if not isinstance(other, Poly):
            s = Scalar.coerce(other)
            return Poly([c * s for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return Poly([])
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Poly:
        out = Poly([ONE])
        for _ in range(n):
            out = out * self
        return out

    def divmod(self, other: Poly) -> tuple[Poly, Poly]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [ZERO] * max(len(rem) - len(other.coeffs) + 1, 0)
        inv = other.lead.inverse()
        dg = other.degree
        for k in range(len(rem) - 1, dg - 1, -1):
            c = rem[k] * inv
            if c.is_zero():
                continue
            q[k - dg] = c
            for i, oc in enumerate(other.coeffs):
                rem[k - dg + i] = rem[k - dg + i] - c * oc
        return Poly(q), Poly(rem[:dg] if dg > 0 else [])

    def __floordiv__(self, other: Poly) -> Poly:
        return self.divmod(other)[0]

    def __mod__(self, other: Poly) -> Poly:
        return self.divmod(other)[1]

    def monic(self) -> Poly:
        if self.is_zero():
            return self
        inv = self.lead.inverse()
        return Poly([c * inv for c in self.coeffs])

    def derivative(self) -> Poly:
        return Poly([c * i for i, c in enumerate(self.coeffs)][1:])

    def conjugate(self) -> Poly:
        return Poly([c.conjugate() for c in self.coeffs])

    def __call__(self, x):
        x = Scalar.coerce(x)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c.is_zero():
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            cs = str(c)
            if c.d is not None:
                cs = f"({cs})"
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append("-" + mono)
            else:
                terms.append(cs + ("*" + mono if mono else ""))
        return " + ".join(terms).replace("+ -", "- ")


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def squarefree_part(p: Poly) -> Poly:
    g = poly_gcd(p, p.derivative())
    return (p // g).monic() if g.degree > 0 else p.monic()


def multiplicity(p: Poly, f: Poly) -> tuple[int, Poly]:
    """Largest k with f**k | p, and the cofactor p / f**k."""
    k = 0
    while True:
        q, r = p.divmod(f)
        if not r.is_zero():
            return k, p
        p, k = q, k + 1


# --- real root counting -----------------------------------------------------

def sturm_real_root_count(p: Poly) -> int:
    """Number of distinct real roots of p (exact Sturm sequence)."""
    if p.degree <= 0:
        return 0
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        r = seq[-2] % seq[-1]
        if r.is_zero():
            break
        seq.append(-r)

    def changes(signs):
        signs = [s for s in signs if s != 0]
        return sum(1 for s, t in zip(signs, signs[1:]) if s != t)

    at_pos = [q.lead.sign() for q in seq]
    at_neg = [q.lead.sign() * (-1) ** q.degree for q in seq]
    return changes(at_neg) - changes(at_pos)


# --- rational factor search -------------------------------------------------

def _integer_form(p: Poly) -> list[int]:
    """Primitive integer coefficient list of a rational polynomial."""
    fr = [c.to_fraction() for c in p.coeffs]
    den = 1
    for f in fr:
        den = den * f.denominator // math.gcd(den, f.denominator)
    ints = [int(f * den) for f in fr]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    return [v // g for v in ints]


def _near_int(x) -> int | None:
    n = int(mpmath.nint(x))
    if abs(x - n) < mpmath.mpf("0.25"):
        return n
    return None


def rational_small_factors(p: Poly) -> tuple[list[Fraction], list[tuple[Fraction, Fraction]]]:
    """Rational roots and monic rational quadratic factors of a rational poly.

    Works on the square-free part.  Candidates are located numerically and
    then confirmed by exact division, so every returned factor is exact; a
    factor of a primitive integer polynomial with leading coefficient ``a``
    has coefficients in (1/a)Z, which makes the rounding step complete.
    Quadratics are returned as (s, p) for x^2 - s x + p.
    """
    sf = squarefree_part(p)
    if sf.degree <= 0:
        return [], []
    roots: list[Fraction] = []
    work = sf
    # exact zero root first
    if work.coeffs[0].is_zero():
        roots.append(Fraction(0))
        work = work // Poly.x()
    if work.degree <= 0:
        return roots, []
    ints = _integer_form(work)
    lead = ints[-1]
    with mpmath.workdps(40 + max(len(str(abs(v))) for v in ints)):
        digits = mpmath.mp.dps
        try:
            num = mpmath.polyroots(list(reversed(ints)), maxsteps=500, extraprec=4 * digits)
        except mpmath.libmp.libhyper.NoConvergence:
            num = mpmath.polyroots(list(reversed(ints)), maxsteps=5000, extraprec=16 * digits)
        used = set()
        for i, r in enumerate(num):
            if abs(mpmath.im(r)) > mpmath.mpf("1e-6") * (1 + abs(r)):
                continue
            n = _near_int(mpmath.re(r) * lead)
            if n is None:
                continue
            cand = Fraction(n, lead)
            if cand not in roots and work(cand).is_zero():
                roots.append(cand)
                used.add(i)
        quads: list[tuple[Fraction, Fraction]] = []
        rest = [i for i in range(len(num)) if i not in used]
        for i, j in combinations(rest, 2):
            s = num[i] + num[j]
            q = num[i] * num[j]
            if abs(mpmath.im(s)) > mpmath.mpf("1e-6") * (1 + abs(s)) or abs(mpmath.im(q)) > mpmath.mpf("1e-6") * (1 + abs(q)):
                continue
            ns = _near_int(mpmath.re(s) * lead)
            nq = _near_int(mpmath.re(q) * lead)
            if ns is None or nq is None:
                continue
            s_, q_ = Fraction(ns, lead), Fraction(nq, lead)
            if (s_, q_) in quads:
                continue
            quad = Poly([q_, -s_, 1])
            if (work % quad).is_zero():
                quads.append((s_, q_))
    return roots, quads


def _roots_in_field(p: Poly, d: int | None) -> list[Scalar]:
    """All distinct roots of p lying in Q (d None) or Q(sqrt d)."""
    if p.degree <= 0:
        return []
    norm = p if p.is_rational() else (p * p.conjugate())
    rts, quads = rational_small_factors(norm)
    cands = [Scalar(r) for r in rts]
    for s, q in quads:
        disc = s * s - 4 * q
        if disc <= 0:
            continue
        sq = Scalar.sqrt_of(disc)
        if sq.d is None:
            continue  # already caught as two rational roots
        if d is None or sq.d != d:
            continue
        half = Fraction(1, 2)
        cands.append(Scalar(s * half) + sq * half)
        cands.append(Scalar(s * half) - sq * half)
    out = []
    for c in cands:
        if c not in out and p(c).is_zero():
            out.append(c)
    return out


@dataclass(frozen=True)
class RealSplit:
    """Output of :func:`split_real`.

    ``roots`` are (root, multiplicity) pairs inside the field; ``remainder``
    is the cofactor, and ``remainder_real_roots`` its number of distinct
    real roots.
    """

    roots: tuple[tuple[Scalar, int], ...]
    remainder: Poly
    remainder_real_roots: int


def split_real(p: Poly, radicand: int | None = None) -> RealSplit:
    """Extract every root of p in Q or Q(sqrt radicand); count the rest."""
    d = radicand_of([*p.coeffs, Scalar(0, 1, radicand) if radicand else ZERO])
    roots = []
    rest = p.monic()
    for r in _roots_in_field(rest, d):
        k, rest = multiplicity(rest, Poly([-r, ONE]))
        if k:
            roots.append((r, k))
    roots.sort(key=lambda rk: _root_key(rk[0]))
    return RealSplit(tuple(roots), rest, sturm_real_root_count(rest))


def _root_key(r: Scalar):
    return (float(r), r.a, r.b)


@dataclass(frozen=True)
class Factor:
    poly: Poly
    multiplicity: int

    @property
    def is_linear(self) -> bool:
        return self.poly.degree == 1

    @property
    def root(self) -> Scalar:
        return -self.poly.coeffs[0]

    @property
    def pair(self) -> tuple[Scalar, Scalar]:
        """(s, p) for an irreducible quadratic x^2 - s x + p."""
        return -self.poly.coeffs[1], self.poly.coeffs[0]


def factor_over_field(p: Poly, radicand: int | None = None, open_radicand: bool = False) -> list[Factor]:
    """Factor p into linear factors and irreducible quadratics.

    Roots are extracted in Q, or in Q(sqrt radicand) when a radicand is
    active (or implied by the coefficients).  With ``open_radicand`` and no
    active radicand, one real quadratic factor may open a new extension.
    Raises UnsupportedAlgebraicDegree if anything else is left over.
    """
    if p.degree > 6:
        raise UnsupportedAlgebraicDegree(f"degree {p.degree} > 6")
    d = radicand_of([*p.coeffs, Scalar(0, 1, radicand) if radicand else ZERO])
    p = p.monic()
    sp = split_real(p, d)
    factors = [Factor(Poly([-r, ONE]), k) for r, k in sp.roots]
    rest = sp.remainder
    quads: list[Factor] = []
    if rest.degree > 0:
        if rest.is_rational():
            _, qs = rational_small_factors(rest)
            for s, q in qs:
                quad = Poly([q, -s, 1])
                k, rest = multiplicity(rest, quad)
                if k:
                    quads.append(Factor(quad, k))
        elif rest.degree == 2:
            quads.append(Factor(rest, 1))
            rest = Poly([ONE])
        elif rest.degree == 4:
            g = squarefree_part(rest)
            if g.degree == 2:
                k, rest2 = multiplicity(rest, g)
                if rest2.degree == 0:
                    quads.append(Factor(g, k))
                    rest = rest2
    if rest.degree > 0:
        raise UnsupportedAlgebraicDegree(f"irreducible factor {rest} outside the quadratic tower", remainder=rest)
    out = list(factors)
    for f in quads:
        s, q = f.pair
        disc = s * s - 4 * q
        if disc.sign() < 0:
            out.append(f)
            continue
        # real quadratic that did not split over the active field
        if open_radicand and d is None and disc.d is None:
            sq = Scalar.sqrt_of(disc.a)
            if d is None:
                d = sq.d
            if sq.d == d:
                half = Fraction(1, 2)
                r1, r2 = s * half + sq * half, s * half - sq * half
                out.append(Factor(Poly([-r1, ONE]), f.multiplicity))
                out.append(Factor(Poly([-r2, ONE]), f.multiplicity))
                continue
        if d is None and disc.d is None:
            out.append(f)
            continue
        raise UnsupportedAlgebraicDegree(f"quadratic {f.poly} needs a second radicand", remainder=f.poly)
    out.sort(key=lambda f: (f.poly.degree, _root_key(f.root) if f.is_linear else (float(f.pair[0]), float(f.pair[1]))))
    return out


def quadratic_roots(c2, c1, c0, radicand: int | None = None) -> list[Scalar]:
    """Distinct real roots of c2 t^2 + c1 t + c0 in the active field.

    The zero polynomial is the caller's business (it has every t as a root);
    a nonzero constant has none.  May open a radicand via sqrt_in_field.
    """
    c2, c1, c0 = (Scalar.coerce(c) for c in (c2, c1, c0))
    if c2.is_zero():
        if c1.is_zero():
            return []
        return [-c0 / c1]
    disc = c1 * c1 - 4 * c2 * c0
    sq = sqrt_in_field(disc, radicand)
    if sq is None:
        return []
    if sq.is_zero():
        return [-c1 / (2 * c2)]
    roots = [(-c1 + sq) / (2 * c2), (-c1 - sq) / (2 * c2)]
    return sorted(roots, key=_root_key)


def product_of(factors: list[Factor]) -> Poly:
    out = Poly([ONE])
    for f in factors:
        out = out * (f.poly ** f.multiplicity)
    return out


__all__ = [
    "Poly",
    "Factor",
    "RealSplit",
    "factor_over_field",
    "split_real",
    "poly_gcd",
    "squarefree_part",
    "sturm_real_root_count",
    "rational_small_factors",
    "product_of",
    "quadratic_roots",
    "MixedRadicands",
]
