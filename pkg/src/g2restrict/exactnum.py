"""Exact arithmetic in cyclotomic fields Q(zeta_n) over arbitrary-precision rationals.

Every element is stored in the power basis ``1, z, ..., z^(phi(n)-1)`` of its
minimal field Q(zeta_n), so two elements are equal exactly when their conductor
and coefficient vectors agree.  Rationals are :class:`fractions.Fraction`.

Text grammar (used by every data file and report)::

    value := term (("+" | "-") term)*
    term  := r | r/s | z<n>^<k> | r*z<n>^<k> | r/s*z<n>^<k>

e.g. ``-1/2+3*z5^2``.  ``z<n>`` without an exponent is accepted as ``z<n>^1``.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

__all__ = [
    "Cyclotomic",
    "NotRationalError",
    "ConductorError",
    "Rational",
    "zeta",
    "as_cyclotomic",
    "parse_cyclotomic",
    "format_rational",
    "cyc_add",
    "cyc_mul",
    "cyc_conj",
    "galois_apply",
    "to_rational",
    "canonicalize",
    "coordinates",
    "max_conductor",
    "set_max_conductor",
]

Rational = Fraction
Number = Union[int, Fraction, "Cyclotomic"]

DEFAULT_MAX_CONDUCTOR = 120
_max_conductor = DEFAULT_MAX_CONDUCTOR


class NotRationalError(ArithmeticError):
    """Raised when a rational value is required but the element is irrational."""


class ConductorError(ValueError):
    """Raised when an operation needs a conductor above the configured cap."""


def max_conductor() -> int:
    return _max_conductor


def set_max_conductor(n: int) -> int:
    """Set the conductor cap and return the previous one."""
    global _max_conductor
    if n < 1:
        raise ValueError("conductor cap must be positive")
    previous, _max_conductor = _max_conductor, int(n)
    return previous


# ---------------------------------------------------------------------------
# per-conductor tables


@lru_cache(maxsize=None)
def _phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@lru_cache(maxsize=None)
def _divisors(n: int) -> tuple[int, ...]:
    return tuple(d for d in range(1, n + 1) if n % d == 0)


@lru_cache(maxsize=None)
def _cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    num = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in _divisors(n)[:-1]:
        den = _cyclotomic_poly(d)
        # exact division by a monic polynomial
        quot = [0] * (len(num) - len(den) + 1)
        rem = list(num)
        for i in range(len(quot) - 1, -1, -1):
            c = rem[i + len(den) - 1]
            quot[i] = c
            if c:
                for j, b in enumerate(den):
                    rem[i + j] -= c * b
        num = quot
    return tuple(num)


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Row j holds the power-basis coordinates of zeta_n^j, for 0 <= j < n."""
    phi = _phi(n)
    poly = _cyclotomic_poly(n)
    rows = []
    vec = [0] * phi
    vec[0] = 1
    for _ in range(n):
        rows.append(tuple(vec))
        top = vec[-1]
        vec = [0] + vec[:-1]
        if top:
            for i in range(phi):
                vec[i] -= top * poly[i]
    return tuple(rows)


@lru_cache(maxsize=None)
def _embedding(d: int, n: int) -> tuple[tuple[int, ...], ...]:
    """Columns: coordinates in Q(zeta_n) of zeta_d^i for 0 <= i < phi(d)."""
    table = _power_table(n)
    step = n // d
    return tuple(table[(i * step) % n] for i in range(_phi(d)))


@lru_cache(maxsize=None)
def _descent(n: int, d: int):
    """Pivot rows and inverse block used to pull an element of Q(zeta_n) back to Q(zeta_d)."""
    cols = _embedding(d, n)
    rows_n, cols_d = _phi(n), len(cols)
    mat = [[Fraction(cols[j][i]) for j in range(cols_d)] for i in range(rows_n)]
    # pick cols_d linearly independent rows
    pivots: list[int] = []
    basis: list[list[Fraction]] = []
    for i, row in enumerate(mat):
        r = list(row)
        for b, p in zip(basis, _pivot_cols(basis)):
            if r[p]:
                f = r[p] / b[p]
                r = [x - f * y for x, y in zip(r, b)]
        if any(r):
            basis.append(r)
            pivots.append(i)
            if len(pivots) == cols_d:
                break
    block = [mat[i] for i in pivots]
    return tuple(pivots), _invert(block)


def _pivot_cols(basis: list[list[Fraction]]) -> list[int]:
    return [next(j for j, x in enumerate(b) if x) for b in basis]


def _invert(m: list[list[Fraction]]) -> tuple[tuple[Fraction, ...], ...]:
    size = len(m)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(size)] for i, row in enumerate(m)]
    for col in range(size):
        piv = next(r for r in range(col, size) if aug[r][col])
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(size):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[size:]) for row in aug)


def _reduce(n: int, raw: Mapping[int, Fraction] | Iterable[tuple[int, Fraction]]) -> list[Fraction]:
    """Map sparse exponent->coefficient data onto the power basis of Q(zeta_n)."""
    table = _power_table(n)
    out = [Fraction(0)] * _phi(n)
    items = raw.items() if isinstance(raw, Mapping) else raw
    for k, c in items:
        if not c:
            continue
        row = table[k % n]
        for i, t in enumerate(row):
            if t:
                out[i] += c * t
    return out


def _lift(n: int, vec: tuple[Fraction, ...], target: int) -> list[Fraction]:
    if n == target:
        return list(vec)
    cols = _embedding(n, target)
    out = [Fraction(0)] * _phi(target)
    for c, col in zip(vec, cols):
        if c:
            for i, t in enumerate(col):
                if t:
                    out[i] += c * t
    return out


def _minimize(n: int, vec: list[Fraction]) -> tuple[int, tuple[Fraction, ...]]:
    if not any(vec[1:]):
        return 1, (vec[0],)
    for d in _divisors(n)[1:-1]:
        if d % 4 == 2:
            continue
        pivots, inv = _descent(n, d)
        sub = [vec[i] for i in pivots]
        y = [sum((a * b for a, b in zip(row, sub)), Fraction(0)) for row in inv]
        if _lift(d, tuple(y), n) == vec:
            return d, tuple(y)
    return n, tuple(vec)


def _check_conductor(n: int) -> None:
    if n > _max_conductor:
        raise ConductorError(f"conductor {n} exceeds cap {_max_conductor}")


# ---------------------------------------------------------------------------


class Cyclotomic:
    """Immutable element of a cyclotomic field."""

    __slots__ = ("_n", "_c", "_hash")

    def __init__(self, value: int | Fraction | str | Cyclotomic = 0):
        if isinstance(value, Cyclotomic):
            n, c = value._n, value._c
        elif isinstance(value, str):
            parsed = parse_cyclotomic(value)
            n, c = parsed._n, parsed._c
        elif isinstance(value, (int, Fraction)):
            n, c = 1, (Fraction(value),)
        else:
            raise TypeError(f"cannot build a cyclotomic number from {value!r}")
        self._n = n
        self._c = c
        self._hash = None

    @classmethod
    def _raw(cls, n: int, coeffs: tuple[Fraction, ...]) -> Cyclotomic:
        obj = cls.__new__(cls)
        obj._n = n
        obj._c = coeffs
        obj._hash = None
        return obj

    @classmethod
    def _from_vector(cls, n: int, vec: list[Fraction]) -> Cyclotomic:
        m, c = _minimize(n, vec)
        return cls._raw(m, c)

    @classmethod
    def from_exponents(cls, n: int, coeffs: Mapping[int, int | Fraction]) -> Cyclotomic:
        """Build ``sum c_k zeta_n^k`` for arbitrary integer exponents k."""
        if n < 1:
            raise ValueError("conductor must be positive")
        _check_conductor(n)
        return cls._from_vector(n, _reduce(n, {k: Fraction(c) for k, c in coeffs.items()}))

    # -- inspection -------------------------------------------------------

    @property
    def conductor(self) -> int:
        return self._n

    @property
    def coeffs(self) -> dict[int, Fraction]:
        """Sparse canonical coordinates: exponent k -> coefficient of zeta_n^k."""
        return {k: c for k, c in enumerate(self._c) if c}

    def is_rational(self) -> bool:
        return self._n == 1

    def is_integer(self) -> bool:
        return self._n == 1 and self._c[0].denominator == 1

    def is_real(self) -> bool:
        return self._n <= 2 or self == self.conj()

    def to_rational(self) -> Fraction:
        if self._n != 1:
            raise NotRationalError(f"{self} is not rational")
        return self._c[0]

    def to_int(self) -> int:
        q = self.to_rational()
        if q.denominator != 1:
            raise NotRationalError(f"{self} is not an integer")
        return q.numerator

    # -- Galois action ----------------------------------------------------

    def galois(self, k: int) -> Cyclotomic:
        """Image under zeta_n -> zeta_n^k (k coprime to the conductor)."""
        n = self._n
        if math.gcd(k, n) != 1:
            raise ValueError(f"{k} is not coprime to conductor {n}")
        if n == 1:
            return self
        vec = _reduce(n, ((i * k, c) for i, c in enumerate(self._c)))
        return Cyclotomic._raw(n, tuple(vec))

    def conj(self) -> Cyclotomic:
        return self.galois(-1)

    def norm(self) -> Fraction:
        """Field norm from Q(zeta_n) down to Q."""
        result = Cyclotomic(1)
        for k in range(1, max(self._n, 2)):
            if math.gcd(k, self._n) == 1:
                result = result * self.galois(k)
        return result.to_rational()

    def inverse(self) -> Cyclotomic:
        if not self:
            raise ZeroDivisionError("inverse of zero")
        if self._n == 1:
            return Cyclotomic._raw(1, (1 / self._c[0],))
        others = Cyclotomic(1)
        for k in range(2, self._n):
            if math.gcd(k, self._n) == 1:
                others = others * self.galois(k)
        total = (others * self).to_rational()
        return others * (1 / total)

    # -- arithmetic -------------------------------------------------------

    def _common(self, other: Cyclotomic) -> tuple[int, list[Fraction], list[Fraction]]:
        n = self._n * other._n // math.gcd(self._n, other._n)
        _check_conductor(n)
        return n, _lift(self._n, self._c, n), _lift(other._n, other._c, n)

    def __add__(self, other: Number) -> Cyclotomic:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if self._n == other._n == 1:
            return Cyclotomic._raw(1, (self._c[0] + other._c[0],))
        n, a, b = self._common(other)
        return Cyclotomic._from_vector(n, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self) -> Cyclotomic:
        return Cyclotomic._raw(self._n, tuple(-c for c in self._c))

    def __pos__(self) -> Cyclotomic:
        return self

    def __sub__(self, other: Number) -> Cyclotomic:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Number) -> Cyclotomic:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other: Number) -> Cyclotomic:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if other._n == 1:
            s = other._c[0]
            if not s:
                return Cyclotomic._raw(1, (Fraction(0),))
            return Cyclotomic._raw(self._n, tuple(c * s for c in self._c))
        if self._n == 1:
            return other * self
        n, a, b = self._common(other)
        raw: dict[int, Fraction] = {}
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        k = (i + j) % n
                        raw[k] = raw.get(k, 0) + x * y
        return Cyclotomic._from_vector(n, _reduce(n, raw))

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> Cyclotomic:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other: Number) -> Cyclotomic:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k: int) -> Cyclotomic:
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        result = Cyclotomic(1)
        k = abs(k)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __bool__(self) -> bool:
        return any(self._c)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Cyclotomic):
            return self._n == other._n and self._c == other._c
        if isinstance(other, (int, Fraction)):
            return self._n == 1 and self._c[0] == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._c[0]) if self._n == 1 else hash((self._n, self._c))
        return self._hash

    def __repr__(self) -> str:
        return f"Cyclotomic('{self}')"

    def __str__(self) -> str:
        if self._n == 1:
            return format_rational(self._c[0])
        parts = []
        for k, c in enumerate(self._c):
            if not c:
                continue
            if k == 0:
                parts.append(format_rational(c))
                continue
            mono = f"z{self._n}^{k}"
            if c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{format_rational(c)}*{mono}")
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out


def _coerce(x: object) -> Cyclotomic | None:
    if isinstance(x, Cyclotomic):
        return x
    if isinstance(x, (int, Fraction)):
        return Cyclotomic._raw(1, (Fraction(x),))
    return None


def as_cyclotomic(x: Number | str) -> Cyclotomic:
    if isinstance(x, Cyclotomic):
        return x
    return Cyclotomic(x)


def zeta(n: int, k: int = 1) -> Cyclotomic:
    """The root of unity zeta_n^k."""
    return Cyclotomic.from_exponents(n, {k: 1})


def format_rational(q: Fraction | int) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


_TERM_SPLIT = re.compile(r"[+-]?[^+-]+")
_TERM = re.compile(r"(?:(\d+)(?:/(\d+))?)?(\*)?(?:z(\d+)(?:\^(\d+))?)?")


def parse_cyclotomic(text: str) -> Cyclotomic:
    """Parse the text grammar described in the module docstring."""
    s = "".join(text.split())
    terms = _TERM_SPLIT.findall(s)
    if not s or "".join(terms) != s:
        raise ValueError(f"malformed cyclotomic value {text!r}")
    total = Cyclotomic(0)
    for term in terms:
        sign = -1 if term[0] == "-" else 1
        body = term[1:] if term[0] in "+-" else term
        m = _TERM.fullmatch(body)
        if not body or m is None:
            raise ValueError(f"malformed term {term!r} in {text!r}")
        num, den, star, n, k = m.groups()
        if num is None and n is None:
            raise ValueError(f"malformed term {term!r} in {text!r}")
        if star and (num is None or n is None):
            raise ValueError(f"malformed term {term!r} in {text!r}")
        if den is not None and int(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        coeff = Fraction(int(num), int(den) if den else 1) if num is not None else Fraction(1)
        if n is None:
            total = total + sign * coeff
        else:
            cond = int(n)
            if cond < 1:
                raise ValueError(f"bad conductor in {text!r}")
            total = total + Cyclotomic.from_exponents(cond, {int(k) if k else 1: sign * coeff})
    return total


# functional aliases ---------------------------------------------------------


def cyc_add(a: Number, b: Number) -> Cyclotomic:
    return as_cyclotomic(a) + as_cyclotomic(b)


def cyc_mul(a: Number, b: Number) -> Cyclotomic:
    return as_cyclotomic(a) * as_cyclotomic(b)


def cyc_conj(a: Number) -> Cyclotomic:
    return as_cyclotomic(a).conj()


def galois_apply(a: Number, k: int) -> Cyclotomic:
    return as_cyclotomic(a).galois(k)


def to_rational(a: Number) -> Fraction:
    return as_cyclotomic(a).to_rational()


def canonicalize(a: Number) -> Cyclotomic:
    """Rebuild ``a`` from its own coordinates; a no-op on canonical input."""
    a = as_cyclotomic(a)
    return Cyclotomic.from_exponents(a.conductor, a.coeffs)


def coordinates(a: Number, n: int) -> tuple[Fraction, ...]:
    """Power-basis coordinates of ``a`` in Q(zeta_n); n must be a multiple of the conductor."""
    a = as_cyclotomic(a)
    if n % a.conductor:
        raise ValueError(f"Q(zeta_{n}) does not contain an element of conductor {a.conductor}")
    _check_conductor(n)
    return tuple(_lift(a.conductor, a._c, n))
