"""Exact scalars: rationals and elements a + b*sqrt(d) of one quadratic field."""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from ..errors import DivisionByZero, MixedRadicands, NegativeSqrt


def squarefree_split(n: int) -> tuple[int, int]:
    """Return (s, m) with n == s*s*m and m square-free, for n >= 1."""
    if n < 1:
        raise ValueError("squarefree_split needs a positive integer")
    s, m = 1, 1
    p = 2
    # trial division up to the cube root; what is left is 1, p, p*q or p^2
    while p * p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            s *= p ** (e // 2)
            if e % 2:
                m *= p
        p += 1 if p == 2 else 2
    r = math.isqrt(n)
    if r * r == n and n > 1:
        s *= r
    else:
        m *= n
    return s, m


class Scalar:
    """Element a + b*sqrt(d) with rational a, b.

    ``d`` is a square-free integer > 1, or None for a rational value.  The
    representation is canonical (b == 0 forces d = None), so equality and
    hashing are structural.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d: int | None = None):
        a = a if type(a) is Fraction else Fraction(a)
        b = b if type(b) is Fraction else Fraction(b)
        if b == 0 or d is None:
            if b != 0:
                raise ValueError("irrational part given without a radicand")
            d = None
        elif d <= 1:
            raise ValueError(f"radicand must be a square-free integer > 1, got {d}")
        self.a = a
        self.b = b
        self.d = d

    # construction helpers -------------------------------------------------
    @classmethod
    def coerce(cls, x) -> Scalar:
        if isinstance(x, Scalar):
            return x
        if isinstance(x, (int, Fraction, Rational)):
            return cls(Fraction(x))
        if isinstance(x, str):
            return cls(Fraction(x))
        raise TypeError(f"cannot coerce {type(x).__name__} to Scalar")

    @classmethod
    def sqrt_of(cls, r) -> Scalar:
        """Exact square root of a nonnegative rational."""
        r = Fraction(r)
        if r < 0:
            raise NegativeSqrt(f"sqrt of negative rational {r}")
        if r == 0:
            return ZERO
        # sqrt(p/q) = sqrt(p*q)/q
        s, m = squarefree_split(r.numerator * r.denominator)
        coef = Fraction(s, r.denominator)
        if m == 1:
            return cls(coef)
        return cls(0, coef, m)

    # predicates -------------------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return self.d is None

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def to_fraction(self) -> Fraction:
        if self.d is not None:
            raise ValueError(f"{self} is not rational")
        return self.a

    # arithmetic -----------------------------------------------------------
    @staticmethod
    def _join(d1, d2):
        if d1 is None:
            return d2
        if d2 is None or d1 == d2:
            return d1
        raise MixedRadicands(f"radicands {d1} and {d2} cannot be combined")

    def _other(self, other):
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar(other)
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if self.d is None and o.d is None:
            return Scalar(self.a + o.a)
        d = self._join(self.d, o.d)
        return Scalar(self.a + o.a, self.b + o.b, d)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if self.d is None and o.d is None:
            return Scalar(self.a * o.a)
        d = self._join(self.d, o.d)
        return Scalar(self.a * o.a + self.b * o.b * d, self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def conjugate(self) -> Scalar:
        return Scalar(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        """Field norm a^2 - d b^2 (equals a^2 for rationals)."""
        if self.d is None:
            return self.a * self.a
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self) -> Scalar:
        if self.is_zero():
            raise DivisionByZero("division by zero")
        if self.d is None:
            return Scalar(1 / self.a)
        n = self.norm()
        return Scalar(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if o.d is None:
            if o.a == 0:
                raise DivisionByZero("division by zero")
            return Scalar(self.a / o.a, self.b / o.a, self.d)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def sqrt(self) -> Scalar:
        if self.d is not None:
            raise MixedRadicands(f"sqrt of irrational {self} leaves the quadratic tower")
        return Scalar.sqrt_of(self.a)

    # order ----------------------------------------------------------------
    def sign(self) -> int:
        """Exact sign of the real number a + b*sqrt(d)."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with d*b^2
        lhs = self.a * self.a
        rhs = self.d * self.b * self.b
        if lhs == rhs:
            return 0
        return sa if lhs > rhs else sb

    def _cmp(self, other) -> int:
        o = self._other(other)
        if o is None:
            raise TypeError("unorderable")
        return (self - o).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    # equality/hash ----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.a == other.a and self.b == other.b and self.d == other.d
        if isinstance(other, (int, Fraction)):
            return self.d is None and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.d is None:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __float__(self):
        if self.d is None:
            return float(self.a)
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    # printing ---------------------------------------------------------------
    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        """Exact text parseable by the expression grammar, e.g. '1/2+3/4*sqrt(2)'."""
        if self.d is None:
            return _frac_str(self.a)
        root = f"sqrt({self.d})"
        b = self.b
        if b == 1:
            irr = root
        elif b == -1:
            irr = "-" + root
        else:
            irr = f"{_frac_str(b)}*{root}"
        if self.a == 0:
            return irr
        if irr.startswith("-"):
            return f"{_frac_str(self.a)}{irr}"
        return f"{_frac_str(self.a)}+{irr}"


def sqrt_in_field(x: Scalar, radicand: int | None = None) -> Scalar | None:
    """Nonnegative square root of x inside Q or Q(sqrt radicand).

    Returns None for negative x.  A rational x may open a new radicand when
    none is active; anything needing a second radicand (or a degree-4
    field) raises MixedRadicands.
    """
    x = Scalar.coerce(x)
    sg = x.sign()
    if sg < 0:
        return None
    if sg == 0:
        return ZERO
    active = Scalar._join(radicand, x.d)
    if x.d is None:
        r = Scalar.sqrt_of(x.a)
        Scalar._join(active, r.d)
        return r
    # (u + v sqrt d)^2 = u^2 + d v^2 + 2 u v sqrt d
    n = x.norm()
    if n >= 0:
        sn = Scalar.sqrt_of(n)
        if sn.d is None:
            for cand_u2 in ((x.a + sn.a) / 2, (x.a - sn.a) / 2):
                if cand_u2 <= 0:
                    continue
                u = Scalar.sqrt_of(cand_u2)
                if u.d is not None:
                    continue
                v = x.b / (2 * u.a)
                root = Scalar(u.a, v, x.d)
                if root * root == x:
                    return root if root.sign() >= 0 else -root
            # x = d v^2 * (rational square) with u = 0 cannot occur here since b != 0
    raise MixedRadicands(f"sqrt({x}) is not in Q(sqrt {x.d})")


def _frac_str(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def radicand_of(values) -> int | None:
    """The common radicand of an iterable of scalars (None if all rational)."""
    d = None
    for v in values:
        if isinstance(v, Scalar) and v.d is not None:
            d = Scalar._join(d, v.d)
    return d


ZERO = Scalar(0)
ONE = Scalar(1)
