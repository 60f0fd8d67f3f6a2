"""Exact base fields: rationals, odd prime fields, and quadratic extensions.

A field object holds the descriptor data and implements arithmetic on raw
scalar values.  Raw representations are deliberately lightweight:

* rationals        -- ``fractions.Fraction`` (lowest terms, positive denominator)
* prime field      -- ``int`` residue in ``[0, p)``
* quadratic ext.   -- pair ``(x, y)`` of base scalars meaning ``x + y*sqrt(d)``

Characteristic 2 is unsupported throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def is_square_rational(x: Fraction) -> bool:
    """Squarefree/sign analysis: x = (n/d)^2 iff num and den are squares."""
    if x < 0:
        return False
    n, d = x.numerator, x.denominator
    return math.isqrt(n) ** 2 == n and math.isqrt(d) ** 2 == d


def rational_sqrt(x: Fraction):
    """Exact square root of a rational, or None."""
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


class Field:
    """Base class; concrete fields implement arithmetic on raw scalars."""

    kind: str

    def zero(self):
        return self.from_int(0)

    def one(self):
        return self.from_int(1)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return a == self.zero()

    def is_one(self, a) -> bool:
        return a == self.one()

    # subclasses: from_int, add, neg, mul, inv, is_square,
    #             format_scalar, parse_scalar, scalar_to_json, scalar_from_json


@dataclass(frozen=True)
class RationalField(Field):
    kind: str = "rationals"

    def from_int(self, n: int) -> Fraction:
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def is_zero(self, a) -> bool:
        return not a

    def is_square(self, a) -> bool:
        return is_square_rational(Fraction(a))

    def format_scalar(self, a) -> str:
        return str(a)

    def parse_scalar(self, s: str) -> Fraction:
        return Fraction(s)

    def scalar_to_json(self, a):
        return str(a)

    def scalar_from_json(self, obj) -> Fraction:
        if isinstance(obj, bool) or not isinstance(obj, (int, str)):
            raise ValidationError(f"bad rational scalar: {obj!r}")
        return Fraction(obj)

    def __repr__(self):
        return "QQ"


@dataclass(frozen=True)
class PrimeField(Field):
    p: int
    kind: str = "prime-field"

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValidationError(f"{self.p} is not prime")
        if self.p == 2:
            raise ValidationError("characteristic 2 is unsupported")

    def from_int(self, n: int) -> int:
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def is_square(self, a) -> bool:
        a %= self.p
        if a == 0:
            return True
        return pow(a, (self.p - 1) // 2, self.p) == 1

    def format_scalar(self, a) -> str:
        return str(a % self.p)

    def parse_scalar(self, s: str) -> int:
        return int(s) % self.p

    def scalar_to_json(self, a):
        return a % self.p

    def scalar_from_json(self, obj) -> int:
        if isinstance(obj, bool) or not isinstance(obj, int):
            raise ValidationError(f"bad prime-field scalar: {obj!r}")
        return obj % self.p

    def __repr__(self):
        return f"GF({self.p})"


@dataclass(frozen=True)
class QuadraticExtension(Field):
    """base(sqrt(d)) for a nonsquare d; scalars are pairs of base scalars."""

    base: Field
    d: object
    kind: str = "quadratic-extension"

    def __post_init__(self):
        if self.base.kind not in ("rationals", "prime-field"):
            raise ValidationError("quadratic extensions are only supported over the rationals or a prime field")
        if self.base.is_zero(self.d):
            raise ValidationError("d must be nonzero")
        if self.base.is_square(self.d):
            raise ValidationError(f"d = {self.base.format_scalar(self.d)} is a square in the base field")

    def from_int(self, n: int):
        return (self.base.from_int(n), self.base.zero())

    def embed(self, a):
        """Base-field scalar -> extension scalar."""
        return (a, self.base.zero())

    def sqrt_d(self):
        return (self.base.zero(), self.base.one())

    def add(self, a, b):
        return (self.base.add(a[0], b[0]), self.base.add(a[1], b[1]))

    def neg(self, a):
        return (self.base.neg(a[0]), self.base.neg(a[1]))

    def mul(self, a, b):
        k = self.base
        x1, y1 = a
        x2, y2 = b
        return (
            k.add(k.mul(x1, x2), k.mul(self.d, k.mul(y1, y2))),
            k.add(k.mul(x1, y2), k.mul(y1, x2)),
        )

    def inv(self, a):
        k = self.base
        x, y = a
        # norm x^2 - d*y^2 vanishes only at zero since d is a nonsquare
        n = k.sub(k.mul(x, x), k.mul(self.d, k.mul(y, y)))
        if k.is_zero(n):
            raise ZeroDivisionError("inverse of zero")
        ninv = k.inv(n)
        return (k.mul(x, ninv), k.neg(k.mul(y, ninv)))

    def is_zero(self, a) -> bool:
        return self.base.is_zero(a[0]) and self.base.is_zero(a[1])

    def format_scalar(self, a) -> str:
        x, y = a
        return f"{self.base.format_scalar(x)}+{self.base.format_scalar(y)}*r"

    def parse_scalar(self, s: str):
        left, _, right = s.partition("+")
        y = right[:-2] if right.endswith("*r") else right
        return (self.base.parse_scalar(left), self.base.parse_scalar(y))

    def scalar_to_json(self, a):
        return [self.base.scalar_to_json(a[0]), self.base.scalar_to_json(a[1])]

    def scalar_from_json(self, obj):
        if not isinstance(obj, (list, tuple)) or len(obj) != 2:
            raise ValidationError(f"bad quadratic-extension scalar: {obj!r}")
        return (self.base.scalar_from_json(obj[0]), self.base.scalar_from_json(obj[1]))

    def __repr__(self):
        return f"{self.base!r}(sqrt({self.base.format_scalar(self.d)}))"


QQ = RationalField()


def field_to_json(field: Field) -> dict:
    if field.kind == "rationals":
        return {"kind": "rationals"}
    if field.kind == "prime-field":
        return {"kind": "prime-field", "p": field.p}
    return {
        "kind": "quadratic-extension",
        "base": field_to_json(field.base),
        "d": field.base.scalar_to_json(field.d),
    }


def field_from_json(obj: dict) -> Field:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValidationError(f"bad field descriptor: {obj!r}")
    kind = obj["kind"]
    if kind == "rationals":
        return QQ
    if kind == "prime-field":
        return PrimeField(int(obj["p"]))
    if kind == "quadratic-extension":
        base = field_from_json(obj["base"])
        return QuadraticExtension(base, base.scalar_from_json(obj["d"]))
    raise ValidationError(f"unknown field kind: {kind!r}")
