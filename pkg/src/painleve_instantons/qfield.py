"""Exact arithmetic in Q and in the quadratic field Q(sqrt 3).

Rationals are ``gmpy2.mpq`` values.  :class:`QSqrt3` stores ``a + b*sqrt(3)``
as an ordered pair of rationals; every trans-series coefficient lives here
because the instanton action ``A = 8*sqrt(3)/5`` only ever enters linearly.

Text form (used inside table files)::

    "p/q"            rational part only
    "r/s*r3"         irrational part only
    "p/q+r/s*r3"     both parts

Integers are written without a denominator, so zero is ``"0"``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from numbers import Rational as _RationalABC

import gmpy2
import mpmath
from gmpy2 import mpq

Rational = type(mpq())

__all__ = [
    "A",
    "QSqrt3",
    "QFieldParseError",
    "Rational",
    "as_rational",
    "parse_rational",
    "format_rational",
    "qs_add",
    "qs_sub",
    "qs_mul",
    "qs_neg",
    "qs_div",
    "qs_dot",
    "qs_to_real",
    "qs_parse",
    "qs_format",
]


class QFieldParseError(ValueError):
    """Malformed field element text; ``pos`` is the offending offset."""

    def __init__(self, text: str, pos: int, reason: str) -> None:
        self.text = text
        self.pos = pos
        self.reason = reason
        super().__init__(f"{reason} at position {pos} in {text!r}")


def as_rational(x) -> Rational:
    if isinstance(x, Rational):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, _RationalABC):
        return mpq(int(x.numerator), int(x.denominator))
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def make_rational(num: int, den: int = 1) -> Rational:
    if den == 0:
        raise ZeroDivisionError("rational with zero denominator")
    return mpq(num, den)


@total_ordering
class QSqrt3:
    """Immutable element ``rat + irr*sqrt(3)`` with exact rational parts."""

    __slots__ = ("_rat", "_irr", "_hash")

    def __init__(self, rat=0, irr=0) -> None:
        self._rat = as_rational(rat)
        self._irr = as_rational(irr)
        self._hash = None

    @classmethod
    def _raw(cls, rat: Rational, irr: Rational) -> QSqrt3:
        obj = object.__new__(cls)
        obj._rat = rat
        obj._irr = irr
        obj._hash = None
        return obj

    @property
    def rat(self) -> Rational:
        return self._rat

    @property
    def irr(self) -> Rational:
        return self._irr

    def is_zero(self) -> bool:
        return not self._rat and not self._irr

    def is_rational(self) -> bool:
        return not self._irr

    def conjugate(self) -> QSqrt3:
        return QSqrt3._raw(self._rat, -self._irr)

    def norm(self) -> Rational:
        """``a^2 - 3 b^2``; zero only for the zero element."""
        return self._rat * self._rat - 3 * self._irr * self._irr

    @staticmethod
    def _coerce(other) -> QSqrt3 | None:
        if isinstance(other, QSqrt3):
            return other
        if isinstance(other, (int, Rational, Fraction)) and not isinstance(other, bool):
            return QSqrt3._raw(as_rational(other), mpq(0))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QSqrt3._raw(self._rat + o._rat, self._irr + o._irr)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QSqrt3._raw(self._rat - o._rat, self._irr - o._irr)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, bool):
            return QSqrt3._raw(self._rat * other, self._irr * other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b, c, d = self._rat, self._irr, o._rat, o._irr
        return QSqrt3._raw(a * c + 3 * b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> QSqrt3:
        n = self.norm()
        if not n:
            raise ZeroDivisionError("division by zero in Q(sqrt 3)")
        return QSqrt3._raw(self._rat / n, -self._irr / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, bool):
            if not other:
                raise ZeroDivisionError("division by zero in Q(sqrt 3)")
            return QSqrt3._raw(self._rat / other, self._irr / other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __neg__(self) -> QSqrt3:
        return QSqrt3._raw(-self._rat, -self._irr)

    def __pos__(self) -> QSqrt3:
        return self

    def __pow__(self, e: int) -> QSqrt3:
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result = QSqrt3._raw(mpq(1), mpq(0))
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._rat == o._rat and self._irr == o._irr

    def __lt__(self, other) -> bool:
        # lexicographic on (rat, irr): a table-key order, not the numeric one
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self._rat, self._irr) < (o._rat, o._irr)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._rat, self._irr))
        return self._hash

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __repr__(self) -> str:
        return f"QSqrt3({qs_format(self)!r})"

    def __str__(self) -> str:
        return qs_format(self)

    def to_real(self, precision: int = 120) -> mpmath.mpf:
        return qs_to_real(self, precision)


ZERO = QSqrt3()
ONE = QSqrt3(1)
SQRT3 = QSqrt3(0, 1)
#: the instanton action 8*sqrt(3)/5
A = QSqrt3(0, mpq(8, 5))


def qs_add(x: QSqrt3, y: QSqrt3) -> QSqrt3:
    return x + y


def qs_sub(x: QSqrt3, y: QSqrt3) -> QSqrt3:
    return x - y


def qs_mul(x: QSqrt3, y: QSqrt3) -> QSqrt3:
    return x * y


def qs_neg(x: QSqrt3) -> QSqrt3:
    return -x


def qs_div(x: QSqrt3, y: QSqrt3) -> QSqrt3:
    return x / y


def qs_dot(xs, ys) -> QSqrt3:
    """Exact ``sum(x*y)`` without building intermediate field elements."""
    r = mpq(0)
    s = mpq(0)
    t = mpq(0)
    for x, y in zip(xs, ys):
        a, b, c, d = x._rat, x._irr, y._rat, y._irr
        if a and c:
            r += a * c
        if b and d:
            t += b * d
        if a and d:
            s += a * d
        if b and c:
            s += b * c
    return QSqrt3._raw(r + 3 * t, s)


def rational_to_real(q: Rational, precision: int) -> mpmath.mpf:
    with mpmath.workdps(precision + 5):
        v = mpmath.mpf(int(q.numerator)) / int(q.denominator)
    return v


def qs_to_real(x: QSqrt3, precision: int = 120) -> mpmath.mpf:
    """Real value of ``x`` to ``precision`` decimal digits.

    Cancellation between the two parts is detected and compensated by
    raising the working precision, so the bound holds for any element.
    """
    if precision < 10:
        raise ValueError("precision must be at least 10 digits")
    x = QSqrt3._coerce(x)
    if x.is_zero():
        return mpmath.mpf(0)
    if x.is_rational():
        with mpmath.workdps(precision):
            return +rational_to_real(x.rat, precision)
    extra = 10
    while True:
        with mpmath.workdps(precision + extra):
            a = rational_to_real(x.rat, precision + extra)
            b = rational_to_real(x.irr, precision + extra) * mpmath.sqrt(3)
            v = a + b
            scale = max(abs(a), abs(b))
            lost = 0 if v == 0 else int(mpmath.log10(scale / abs(v))) + 1
        if v != 0 and lost + 5 < extra:
            with mpmath.workdps(precision):
                return +v
        extra = 2 * extra + max(lost, 0)


# --- text form -------------------------------------------------------------


def format_rational(q: Rational) -> str:
    q = as_rational(q)
    if q.denominator == 1:
        return str(int(q.numerator))
    return f"{int(q.numerator)}/{int(q.denominator)}"


def qs_format(x: QSqrt3) -> str:
    x = QSqrt3._coerce(x)
    if x.is_zero():
        return "0"
    if not x.irr:
        return format_rational(x.rat)
    irr = format_rational(x.irr) + "*r3"
    if not x.rat:
        return irr
    sign = "" if x.irr < 0 else "+"
    return format_rational(x.rat) + sign + irr


class _Scanner:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def error(self, reason: str) -> QFieldParseError:
        return QFieldParseError(self.text, self.pos, reason)

    def sign(self) -> int:
        c = self.peek()
        if c in "+-":
            self.pos += 1
            return -1 if c == "-" else 1
        return 1

    def digits(self) -> int:
        start = self.pos
        while self.peek().isdigit():
            self.pos += 1
        if start == self.pos:
            raise self.error("expected digits")
        return int(self.text[start:self.pos])

    def unsigned_rational(self) -> Rational:
        num = self.digits()
        den = 1
        if self.peek() == "/":
            self.pos += 1
            den_pos = self.pos
            den = self.digits()
            if den == 0:
                raise QFieldParseError(self.text, den_pos, "zero denominator")
        return mpq(num, den)

    def r3_suffix(self) -> bool:
        if self.text.startswith("*r3", self.pos):
            self.pos += 3
            return True
        return False


def parse_rational(text: str) -> Rational:
    sc = _Scanner(text.strip())
    s = sc.sign()
    q = sc.unsigned_rational()
    if sc.pos != len(sc.text):
        raise sc.error("unexpected trailing characters")
    return s * q


def qs_parse(text: str) -> QSqrt3:
    """Parse the canonical text form; raises :class:`QFieldParseError`."""
    sc = _Scanner(text.strip())
    if not sc.text:
        raise sc.error("empty input")
    s = sc.sign()
    first = s * sc.unsigned_rational()
    if sc.r3_suffix():
        rat, irr = mpq(0), first
    else:
        rat, irr = first, mpq(0)
        if sc.peek() in ("+", "-"):
            s2 = sc.sign()
            irr = s2 * sc.unsigned_rational()
            if not sc.r3_suffix():
                raise sc.error("expected '*r3'")
    if sc.pos != len(sc.text):
        raise sc.error("unexpected trailing characters")
    return QSqrt3._raw(rat, irr)


def isqrt_exact(n: int) -> int | None:
    if n < 0:
        return None
    r = gmpy2.isqrt(n)
    return int(r) if r * r == n else None


def sqrt_in_field(q) -> QSqrt3 | None:
    """Exact ``sqrt(q)`` for rational ``q > 0`` when it lies in Q(sqrt 3)."""
    q = as_rational(q)
    if q <= 0:
        return None
    p, d = int(q.numerator), int(q.denominator)
    rp, rd = isqrt_exact(p), isqrt_exact(d)
    if rp is not None and rd is not None:
        return QSqrt3(mpq(rp, rd))
    # otherwise sqrt(q) = r*sqrt(3) requires q/3 to be a rational square
    q3 = q / 3
    p3, d3 = int(q3.numerator), int(q3.denominator)
    rp, rd = isqrt_exact(p3), isqrt_exact(d3)
    if rp is not None and rd is not None:
        return QSqrt3(0, mpq(rp, rd))
    return None
