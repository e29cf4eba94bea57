"""Exact scalars in Q(i)[pi].

A :class:`Scalar` is a finite sum ``sum_p c_p * pi**p`` with Gaussian-rational
coefficients ``c_p = a_p + i b_p``.  This ring contains every constant the
q-expansions need (``2*pi*i``, ``zeta(2k) = r * pi**(2k)``, ``pi*i``) and
embeds into the complex numbers through :meth:`Scalar.__complex__`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Tuple, Union

GaussQ = Tuple[Fraction, Fraction]
Coercible = Union["Scalar", int, Fraction]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _gmul(a: GaussQ, b: GaussQ) -> GaussQ:
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


class Scalar:
    """Immutable element of Q(i)[pi], stored as ``{pi power: (re, im)}``."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Dict[int, GaussQ] | None = None):
        clean = {}
        if terms:
            for p, (re, im) in terms.items():
                re, im = Fraction(re), Fraction(im)
                if re or im:
                    clean[int(p)] = (re, im)
        self._terms = clean
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def rational(cls, value, imag=0, pi_pow: int = 0) -> "Scalar":
        return cls({pi_pow: (Fraction(value), Fraction(imag))})

    @classmethod
    def coerce(cls, value: Coercible) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        if isinstance(value, (int, Rational)) and not isinstance(value, bool):
            return cls({0: (Fraction(value), _ZERO)})
        raise TypeError(f"cannot use {type(value).__name__} as an exact scalar")

    @classmethod
    def pi_i_power(cls, n: int, factor=1) -> "Scalar":
        """``factor * (pi*i)**n``."""
        unit = [(_ONE, _ZERO), (_ZERO, _ONE), (-_ONE, _ZERO), (_ZERO, -_ONE)][n % 4]
        f = Fraction(factor)
        return cls({n: (unit[0] * f, unit[1] * f)})

    @classmethod
    def two_pi_i_power(cls, n: int, factor=1) -> "Scalar":
        """``factor * (2*pi*i)**n``."""
        return cls.pi_i_power(n, Fraction(factor) * 2**n)

    # -- accessors ----------------------------------------------------------
    @property
    def terms(self) -> Dict[int, GaussQ]:
        return dict(self._terms)

    def items(self) -> Iterable[Tuple[int, GaussQ]]:
        return sorted(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_rational(self) -> bool:
        return not self._terms or (set(self._terms) == {0} and self._terms[0][1] == 0)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self._terms.get(0, (_ZERO, _ZERO))[0]

    def __complex__(self) -> complex:
        total = 0j
        for p, (re, im) in self._terms.items():
            total += complex(float(re), float(im)) * math.pi**p
        return total

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other):
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for p, (re, im) in other._terms.items():
            a, b = out.get(p, (_ZERO, _ZERO))
            out[p] = (a + re, b + im)
        return Scalar(out)

    __radd__ = __add__

    def __neg__(self):
        return Scalar({p: (-re, -im) for p, (re, im) in self._terms.items()})

    def __sub__(self, other):
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return Scalar.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, (bool, Scalar)):
            f = Fraction(other)
            return Scalar({p: (re * f, im * f) for p, (re, im) in self._terms.items()})
        if not isinstance(other, Scalar):
            return NotImplemented
        out: Dict[int, GaussQ] = {}
        for p, c in self._terms.items():
            for r, d in other._terms.items():
                e = _gmul(c, d)
                a, b = out.get(p + r, (_ZERO, _ZERO))
                out[p + r] = (a + e[0], b + e[1])
        return Scalar(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, (bool, Scalar)):
            if other == 0:
                raise ZeroDivisionError("division of a scalar by zero")
            return self * (1 / Fraction(other))
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        result, base = Scalar.coerce(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> "Scalar":
        return Scalar({p: (re, -im) for p, (re, im) in self._terms.items()})

    # -- comparison -----------------------------------------------------------
    def __eq__(self, other):
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(sorted(self._terms.items())))
        return self._hash

    def __repr__(self):
        if not self._terms:
            return "Scalar(0)"
        return f"Scalar({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for p, (re, im) in self.items():
            if re and im:
                c = f"({re}{'+' if im > 0 else '-'}{abs(im)}i)"
            elif im:
                c = f"{im}i"
            else:
                c = f"{re}"
            parts.append(c if p == 0 else f"{c}*pi^{p}")
        return " + ".join(parts)

    # -- serialisation ----------------------------------------------------------
    def to_json(self) -> list:
        return [
            {"pi_pow": p, "re": str(re), "im": str(im)} for p, (re, im) in self.items()
        ]

    @classmethod
    def from_json(cls, data) -> "Scalar":
        if isinstance(data, dict):
            data = [data]
        out = cls()
        for entry in data:
            out = out + cls.rational(Fraction(entry["re"]), Fraction(entry.get("im", "0")),
                                     int(entry.get("pi_pow", 0)))
        return out


ZERO = Scalar()
ONE = Scalar.coerce(1)
PI = Scalar.rational(1, 0, 1)
I = Scalar.rational(0, 1)
PI_I = Scalar.pi_i_power(1)
TWO_PI_I = Scalar.two_pi_i_power(1)


def is_exact(c) -> bool:
    return isinstance(c, Scalar)


def to_complex(c) -> complex:
    return complex(c)
