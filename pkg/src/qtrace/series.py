"""Truncated formal series with rational exponents and logarithm powers.

Two containers live here:

``LogSeries``
    one variable ``x`` together with ``log x``; terms ``c * x**e * (log x)**m``
    keyed by ``(e, m)`` with ``e`` rational.  Used for W{x, log x}-style
    calculus and, with ``var="q"``, for q-expansions (optionally carrying
    ``log q``).

``MultiSeries``
    several variables with per-variable truncation.  Log variables are just
    variables named ``"log <x>"`` with non-negative integer exponents.

Coefficients are either exact (:class:`~qtrace.scalar.Scalar`) or complex
floats; the two kinds are never mixed silently.

Truncation: a series with ``trunc = T`` in a variable means every monomial
with exponent ``>= T`` in that variable is unknown and dropped.  ``None``
means the series is exact in that variable.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from numbers import Rational
from typing import Callable, Dict, Iterable, Mapping, Optional, Sequence, Tuple

from .scalar import Scalar

EXACT = "exact"
FLOAT = "float"

DEFAULT_MAX_LOGPOWER = 8
DEFAULT_MAX_DENOMINATOR = 24


class ScalarKindError(TypeError):
    """Exact and floating-point coefficients were combined."""


class LogPowerOverflow(ArithmeticError):
    """A product produced a power of ``log x`` above the series' bound."""


def _exp(e):
    e = Fraction(e)
    return e.numerator if e.denominator == 1 else e


def _is_exact_number(c) -> bool:
    return isinstance(c, Scalar) or (isinstance(c, (int, Rational)) and not isinstance(c, bool))


def _infer_kind(coefs: Iterable) -> str:
    has_exact = has_float = False
    for c in coefs:
        if isinstance(c, Scalar):
            has_exact = True
        elif isinstance(c, (float, complex)):
            has_float = True
    if has_exact and has_float:
        raise ScalarKindError("series mixes exact and floating-point coefficients")
    return FLOAT if has_float else EXACT


def _coerce(c, kind: str):
    if kind == EXACT:
        if not _is_exact_number(c):
            raise ScalarKindError(f"{c!r} is not an exact scalar")
        return Scalar.coerce(c)
    if isinstance(c, Scalar):
        raise ScalarKindError("exact scalar used in a float series; call to_float() first")
    return complex(c)


def _is_zero(c, kind: str, eps: float) -> bool:
    if kind == EXACT:
        return c.is_zero()
    return abs(c) <= eps if eps > 0 else c == 0


def _merge_kind(a: str, b: str) -> str:
    if a != b:
        raise ScalarKindError(f"cannot combine {a} and {b} series")
    return a


def _min_trunc(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _add_trunc(t, v):
    if t is None or v is None:
        return None
    return t + v


def _factorial_inv(k: int) -> Fraction:
    return Fraction(1, math.factorial(k))


# ---------------------------------------------------------------------------
# LogSeries
# ---------------------------------------------------------------------------


class LogSeries:
    """Truncated series ``sum c[e, m] x**e (log x)**m`` in one variable."""

    __slots__ = ("var", "_terms", "trunc", "max_logpower", "kind", "max_denominator", "eps")

    def __init__(
        self,
        terms: Mapping[Tuple, object] | None = None,
        trunc=None,
        var: str = "x",
        max_logpower: int = DEFAULT_MAX_LOGPOWER,
        kind: Optional[str] = None,
        max_denominator: int = DEFAULT_MAX_DENOMINATOR,
        eps: float = 0.0,
    ):
        terms = dict(terms or {})
        if kind is None:
            kind = _infer_kind(terms.values())
        self.var = var
        self.kind = kind
        self.max_logpower = max_logpower
        self.max_denominator = max_denominator
        self.eps = eps
        self.trunc = None if trunc is None else _exp(trunc)
        clean = {}
        for key, c in terms.items():
            if not isinstance(key, tuple):
                key = (key, 0)
            e, m = _exp(key[0]), int(key[1])
            if m < 0:
                raise ValueError("log powers must be non-negative")
            if m > max_logpower:
                raise LogPowerOverflow(
                    f"(log {var})^{m} exceeds max_logpower={max_logpower}"
                )
            if Fraction(e).denominator > max_denominator:
                raise ValueError(
                    f"exponent {e} has denominator above {max_denominator}"
                )
            if self.trunc is not None and e >= self.trunc:
                continue
            c = _coerce(c, kind)
            if c is None or _is_zero(c, kind, eps):
                continue
            prev = clean.get((e, m))
            if prev is not None:
                c = prev + c
                if _is_zero(c, kind, eps):
                    del clean[(e, m)]
                    continue
            clean[(e, m)] = c
        self._terms = clean

    # -- constructors -------------------------------------------------------
    @classmethod
    def monomial(cls, exp=0, log: int = 0, coef=1, **kw) -> "LogSeries":
        return cls({(exp, log): coef}, **kw)

    @classmethod
    def zero(cls, **kw) -> "LogSeries":
        return cls({}, **kw)

    @classmethod
    def from_coefficients(cls, coefs: Sequence, var: str = "q", **kw) -> "LogSeries":
        """Power series ``sum_n coefs[n] var**n`` truncated after the last entry."""
        kw.setdefault("trunc", len(coefs))
        return cls({(n, 0): c for n, c in enumerate(coefs)}, var=var, **kw)

    def _like(self, terms, trunc=None, **kw) -> "LogSeries":
        return LogSeries(
            terms,
            trunc=trunc,
            var=kw.get("var", self.var),
            max_logpower=kw.get("max_logpower", self.max_logpower),
            kind=kw.get("kind", self.kind),
            max_denominator=self.max_denominator,
            eps=self.eps,
        )

    # -- accessors -------------------------------------------------------------
    @property
    def terms(self) -> Dict[Tuple, object]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: (Fraction(kv[0][0]), kv[0][1]))

    def coefficient(self, exp, log: int = 0):
        c = self._terms.get((_exp(exp), log))
        if c is None:
            return Scalar() if self.kind == EXACT else 0j
        return c

    def __getitem__(self, key):
        if isinstance(key, tuple):
            return self.coefficient(*key)
        return self.coefficient(key)

    def __len__(self):
        return len(self._terms)

    def exponents(self):
        return sorted({e for e, _ in self._terms})

    def valuation(self):
        """Smallest exponent present; the truncation order for an empty series."""
        if self._terms:
            return min(e for e, _ in self._terms)
        return self.trunc

    def max_log(self) -> int:
        return max((m for _, m in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def truncate(self, trunc) -> "LogSeries":
        return self._like(self._terms, trunc=_min_trunc(self.trunc, _exp(trunc)))

    def to_float(self) -> "LogSeries":
        if self.kind == FLOAT:
            return self
        return self._like({k: complex(c) for k, c in self._terms.items()}, trunc=self.trunc,
                          kind=FLOAT)

    def to_multi(self) -> "MultiSeries":
        logvar = f"log {self.var}"
        return MultiSeries(
            {(e, m): c for (e, m), c in self._terms.items()},
            vars=(self.var, logvar),
            trunc=(self.trunc, self.max_logpower + 1),
            kind=self.kind,
        )

    # -- arithmetic ---------------------------------------------------------------
    def _check(self, other: "LogSeries"):
        if other.var != self.var:
            raise ValueError(f"variables differ: {self.var} vs {other.var}")
        return _merge_kind(self.kind, other.kind)

    def _lift(self, other):
        if isinstance(other, LogSeries):
            return other
        if isinstance(other, (int, Rational, Scalar, float, complex)) and not isinstance(other, bool):
            return self._like({(0, 0): other} if other != 0 else {}, trunc=None)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        self._check(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out[k] + c if k in out else c
        return self._like(
            out,
            trunc=_min_trunc(self.trunc, other.trunc),
            max_logpower=min(self.max_logpower, other.max_logpower),
        )

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: -c for k, c in self._terms.items()}, trunc=self.trunc)

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "LogSeries":
        return self * c

    def __mul__(self, other):
        if isinstance(other, (int, Rational, Scalar, float, complex)) and not isinstance(other, (bool, LogSeries)):
            if isinstance(other, (float, complex)) and self.kind == EXACT:
                raise ScalarKindError("float factor applied to an exact series")
            if isinstance(other, Scalar) and self.kind == FLOAT:
                raise ScalarKindError("exact factor applied to a float series")
            return self._like({k: v * other for k, v in self._terms.items()}, trunc=self.trunc)
        if not isinstance(other, LogSeries):
            return NotImplemented
        self._check(other)
        bound = min(self.max_logpower, other.max_logpower)
        trunc = _min_trunc(
            _add_trunc(self.trunc, other.valuation()),
            _add_trunc(other.trunc, self.valuation()),
        )
        out: Dict[Tuple, object] = {}
        for (e1, m1), c1 in self._terms.items():
            for (e2, m2), c2 in other._terms.items():
                e = e1 + e2
                if trunc is not None and e >= trunc:
                    continue
                m = m1 + m2
                if m > bound:
                    raise LogPowerOverflow(
                        f"product has (log {self.var})^{m}, above max_logpower={bound}"
                    )
                k = (_exp(e), m)
                out[k] = out[k] + c1 * c2 if k in out else c1 * c2
        return self._like(out, trunc=trunc, max_logpower=bound)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = self._like({(0, 0): 1}, trunc=None)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, LogSeries):
            other = self._lift(other)
            if other is None:
                return NotImplemented
            return self._terms == other._terms
        return (
            self.var == other.var
            and self.trunc == other.trunc
            and self.kind == other.kind
            and self._terms == other._terms
        )

    def __hash__(self):
        return hash((self.var, self.trunc, frozenset(self._terms.items())))

    def equal_terms(self, other: "LogSeries", trunc=None) -> bool:
        """Compare coefficients below ``trunc`` (default: the common truncation)."""
        t = _min_trunc(_min_trunc(self.trunc, other.trunc), trunc)
        a = self.truncate(t) if t is not None else self
        b = other.truncate(t) if t is not None else other
        return a._terms == b._terms

    # -- numerics -------------------------------------------------------------------
    def evaluate(self, x: complex, logx: complex | None = None) -> complex:
        """Sum the series at ``x``; ``log x`` defaults to the principal branch."""
        x = complex(x)
        if logx is None:
            logx = cmath.log(x)
        total = 0j
        for (e, m), c in self._terms.items():
            total += complex(c) * cmath.exp(float(e) * logx) * logx**m
        return total

    # -- display / serialisation ------------------------------------------------------
    def __repr__(self):
        return f"LogSeries({self})"

    def __str__(self):
        parts = []
        for (e, m), c in self.items():
            mono = "" if e == 0 else (self.var if e == 1 else f"{self.var}^{e}")
            if m:
                lg = f"(log {self.var})" + (f"^{m}" if m > 1 else "")
                mono = f"{mono}*{lg}" if mono else lg
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        body = " + ".join(parts) if parts else "0"
        if self.trunc is not None:
            body += f" + O({self.var}^{self.trunc})"
        return body

    def to_json(self) -> dict:
        terms = []
        for (e, m), c in self.items():
            if self.kind == EXACT:
                for entry in c.to_json():
                    terms.append({"exp": str(e), "log": m, "coef": entry})
            else:
                terms.append({"exp": str(e), "log": m,
                              "coef": {"pi_pow": 0, "re": repr(c.real), "im": repr(c.imag)}})
        out = {"var": self.var, "trunc": None if self.trunc is None else str(self.trunc),
               "terms": terms}
        if self.kind == FLOAT:
            out["kind"] = FLOAT
        return out

    @classmethod
    def from_json(cls, data: dict, **kw) -> "LogSeries":
        kind = data.get("kind", EXACT)
        terms: Dict[Tuple, object] = {}
        for t in data["terms"]:
            key = (Fraction(t["exp"]), int(t.get("log", 0)))
            if kind == EXACT:
                c = Scalar.from_json(t["coef"])
            else:
                c = complex(float(t["coef"]["re"]), float(t["coef"]["im"])) * math.pi ** int(
                    t["coef"].get("pi_pow", 0))
            terms[key] = terms[key] + c if key in terms else c
        trunc = data.get("trunc")
        return cls(terms, trunc=None if trunc is None else Fraction(trunc),
                   var=data.get("var", "x"), kind=kind, **kw)


# ---------------------------------------------------------------------------
# MultiSeries
# ---------------------------------------------------------------------------


class MultiSeries:
    """Truncated series in several variables with per-variable truncation."""

    __slots__ = ("vars", "_terms", "trunc", "kind")

    def __init__(self, terms: Mapping[Tuple, object] | None = None, vars: Sequence[str] = ("x",),
                 trunc: Sequence | None = None, kind: Optional[str] = None, eps: float = 0.0):
        terms = dict(terms or {})
        self.vars = tuple(vars)
        if kind is None:
            kind = _infer_kind(terms.values())
        self.kind = kind
        if trunc is None:
            trunc = (None,) * len(self.vars)
        if len(trunc) != len(self.vars):
            raise ValueError("one truncation order per variable is required")
        self.trunc = tuple(None if t is None else _exp(t) for t in trunc)
        clean = {}
        for key, c in terms.items():
            if len(key) != len(self.vars):
                raise ValueError(f"exponent tuple {key} does not match variables {self.vars}")
            key = tuple(_exp(e) for e in key)
            if any(t is not None and e >= t for e, t in zip(key, self.trunc)):
                continue
            c = _coerce(c, kind)
            if key in clean:
                c = clean[key] + c
            if _is_zero(c, kind, eps):
                clean.pop(key, None)
                continue
            clean[key] = c
        self._terms = clean

    def _like(self, terms, trunc=None, kind=None):
        return MultiSeries(terms, vars=self.vars, trunc=self.trunc if trunc is None else trunc,
                           kind=self.kind if kind is None else kind)

    @classmethod
    def constant(cls, c, vars: Sequence[str], kind: Optional[str] = None) -> "MultiSeries":
        return cls({(0,) * len(vars): c}, vars=vars, kind=kind)

    @classmethod
    def monomial(cls, exps: Sequence, vars: Sequence[str], coef=1, trunc=None) -> "MultiSeries":
        return cls({tuple(exps): coef}, vars=vars, trunc=trunc)

    @property
    def terms(self) -> Dict[Tuple, object]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: tuple(Fraction(e) for e in kv[0]))

    def __len__(self):
        return len(self._terms)

    def index(self, var: str) -> int:
        try:
            return self.vars.index(var)
        except ValueError:
            raise KeyError(f"{var!r} is not a variable of {self.vars}") from None

    def coefficient(self, exps: Sequence):
        c = self._terms.get(tuple(_exp(e) for e in exps))
        if c is None:
            return Scalar() if self.kind == EXACT else 0j
        return c

    def __getitem__(self, exps):
        return self.coefficient(exps)

    def valuation(self, var: str):
        i = self.index(var)
        if self._terms:
            return min(k[i] for k in self._terms)
        return self.trunc[i]

    def is_zero(self) -> bool:
        return not self._terms

    def truncate(self, **orders) -> "MultiSeries":
        trunc = list(self.trunc)
        for var, t in orders.items():
            i = self.index(var)
            trunc[i] = _min_trunc(trunc[i], None if t is None else _exp(t))
        return self._like(self._terms, trunc=tuple(trunc))

    def to_float(self) -> "MultiSeries":
        if self.kind == FLOAT:
            return self
        return self._like({k: complex(c) for k, c in self._terms.items()}, kind=FLOAT)

    def with_vars(self, vars: Sequence[str], trunc: Sequence | None = None) -> "MultiSeries":
        """Re-embed into a larger variable list (new variables get exponent 0)."""
        vars = tuple(vars)
        pos = [vars.index(v) for v in self.vars]
        new_trunc = [None] * len(vars)
        for i, p in enumerate(pos):
            new_trunc[p] = self.trunc[i]
        if trunc is not None:
            new_trunc = [_min_trunc(a, b) for a, b in zip(new_trunc, trunc)]
        out = {}
        for k, c in self._terms.items():
            key = [0] * len(vars)
            for i, p in enumerate(pos):
                key[p] = k[i]
            out[tuple(key)] = c
        return MultiSeries(out, vars=vars, trunc=tuple(new_trunc), kind=self.kind)

    def _align(self, other: "MultiSeries"):
        if other.vars == self.vars:
            return self, other
        vars = list(self.vars)
        vars += [v for v in other.vars if v not in vars]
        return self.with_vars(vars), other.with_vars(vars)

    def _lift(self, other):
        if isinstance(other, MultiSeries):
            return other
        if isinstance(other, LogSeries):
            return other.to_multi()
        if isinstance(other, (int, Rational, Scalar, float, complex)) and not isinstance(other, bool):
            return MultiSeries({(0,) * len(self.vars): other} if other != 0 else {},
                               vars=self.vars, kind=self.kind)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        a, b = self._align(other)
        kind = _merge_kind(a.kind, b.kind)
        out = dict(a._terms)
        for k, c in b._terms.items():
            out[k] = out[k] + c if k in out else c
        trunc = tuple(_min_trunc(x, y) for x, y in zip(a.trunc, b.trunc))
        return MultiSeries(out, vars=a.vars, trunc=trunc, kind=kind)

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational, Scalar, float, complex)) and not isinstance(other, bool):
            if isinstance(other, (float, complex)) and self.kind == EXACT:
                raise ScalarKindError("float factor applied to an exact series")
            if isinstance(other, Scalar) and self.kind == FLOAT:
                raise ScalarKindError("exact factor applied to a float series")
            return self._like({k: v * other for k, v in self._terms.items()})
        other = self._lift(other)
        if other is None:
            return NotImplemented
        a, b = self._align(other)
        kind = _merge_kind(a.kind, b.kind)
        trunc = tuple(
            _min_trunc(_add_trunc(ta, b.valuation(v)), _add_trunc(tb, a.valuation(v)))
            for v, ta, tb in zip(a.vars, a.trunc, b.trunc)
        )
        out: Dict[Tuple, object] = {}
        for k1, c1 in a._terms.items():
            for k2, c2 in b._terms.items():
                k = tuple(x + y for x, y in zip(k1, k2))
                if any(t is not None and e >= t for e, t in zip(k, trunc)):
                    continue
                out[k] = out[k] + c1 * c2 if k in out else c1 * c2
        return MultiSeries(out, vars=a.vars, trunc=trunc, kind=kind)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = MultiSeries.constant(1, self.vars, kind=self.kind)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, MultiSeries):
            return NotImplemented
        return self.vars == other.vars and self.trunc == other.trunc and self._terms == other._terms

    def __hash__(self):
        return hash((self.vars, self.trunc, frozenset(self._terms.items())))

    def diff(self, var: str) -> "MultiSeries":
        """Plain partial derivative in ``var`` (no log companion)."""
        i = self.index(var)
        out = {}
        for k, c in self._terms.items():
            e = k[i]
            if e == 0:
                continue
            key = list(k)
            key[i] = _exp(e - 1)
            out[tuple(key)] = c * e if self.kind == FLOAT else c * Fraction(e)
        trunc = list(self.trunc)
        if trunc[i] is not None:
            trunc[i] = _exp(trunc[i] - 1)
        return self._like(out, trunc=tuple(trunc))

    def euler(self, var: str) -> "MultiSeries":
        """``var * d/dvar`` (no log companion)."""
        i = self.index(var)
        out = {k: (c * k[i] if self.kind == FLOAT else c * Fraction(k[i]))
               for k, c in self._terms.items() if k[i] != 0}
        return self._like(out)

    def substitute_var(self, var: str, value) -> "MultiSeries":
        """Evaluate one variable at an exact constant (only for integer exponents)."""
        i = self.index(var)
        out = {}
        for k, c in self._terms.items():
            e = k[i]
            if Fraction(e).denominator != 1 or (e < 0 and value == 0):
                raise ValueError("cannot substitute into this exponent")
            key = k[:i] + k[i + 1:]
            term = c * (value ** int(e)) if e >= 0 else c * Fraction(1, value ** (-int(e)))
            out[key] = out[key] + term if key in out else term
        return MultiSeries(out, vars=self.vars[:i] + self.vars[i + 1:],
                           trunc=self.trunc[:i] + self.trunc[i + 1:], kind=self.kind)

    def slice(self, **fixed) -> "MultiSeries":
        """Coefficient of the given monomial in the named variables."""
        idx = {self.index(v): _exp(e) for v, e in fixed.items()}
        keep = [i for i in range(len(self.vars)) if i not in idx]
        out = {}
        for k, c in self._terms.items():
            if all(k[i] == e for i, e in idx.items()):
                out[tuple(k[i] for i in keep)] = c
        return MultiSeries(out, vars=tuple(self.vars[i] for i in keep),
                           trunc=tuple(self.trunc[i] for i in keep), kind=self.kind)

    def map_coefficients(self, f: Callable) -> "MultiSeries":
        return self._like({k: f(c) for k, c in self._terms.items()})

    def equal_terms(self, other: "MultiSeries") -> bool:
        """Compare coefficients on the common truncation region."""
        a, b = self._align(other)
        trunc = tuple(_min_trunc(x, y) for x, y in zip(a.trunc, b.trunc))
        a = MultiSeries(a._terms, vars=a.vars, trunc=trunc, kind=a.kind)
        b = MultiSeries(b._terms, vars=b.vars, trunc=trunc, kind=b.kind)
        return a._terms == b._terms

    def difference_report(self, other: "MultiSeries") -> list:
        """Sorted list of ``(exponents, lhs, rhs)`` where the two series differ."""
        a, b = self._align(other)
        trunc = tuple(_min_trunc(x, y) for x, y in zip(a.trunc, b.trunc))
        a = MultiSeries(a._terms, vars=a.vars, trunc=trunc, kind=a.kind)
        b = MultiSeries(b._terms, vars=b.vars, trunc=trunc, kind=b.kind)
        keys = sorted(set(a._terms) | set(b._terms), key=lambda k: tuple(Fraction(e) for e in k))
        return [(k, a.coefficient(k), b.coefficient(k)) for k in keys
                if a.coefficient(k) != b.coefficient(k)]

    def evaluate(self, values: Mapping[str, complex]) -> Tuple[complex, float]:
        """Numeric value and the magnitude of the last retained term.

        ``values`` maps every variable name to a complex number; log
        variables must be given explicitly (e.g. ``{"log q": 2j*pi*tau}``).
        The tail estimate is the largest single-term magnitude among the
        terms of highest total order in the truncated variables.
        """
        vals = [complex(values[v]) for v in self.vars]
        logs = [cmath.log(v) if v != 0 else None for v in vals]
        total = 0j
        last_order, last_mag = None, 0.0
        trunc_idx = [i for i, t in enumerate(self.trunc)
                     if t is not None and not self.vars[i].startswith("log ")]
        for k, c in self._terms.items():
            term = complex(c)
            for e, v, lg in zip(k, vals, logs):
                if e == 0:
                    continue
                if Fraction(e).denominator == 1:
                    term *= v ** int(e)
                else:
                    term *= cmath.exp(float(e) * lg)
            total += term
            order = sum(Fraction(k[i]) for i in trunc_idx)
            if last_order is None or order > last_order:
                last_order, last_mag = order, abs(term)
            elif order == last_order:
                last_mag = max(last_mag, abs(term))
        return total, last_mag

    def __repr__(self):
        return f"MultiSeries(vars={self.vars}, trunc={self.trunc}, nterms={len(self._terms)})"

    def to_json(self) -> dict:
        terms = []
        for k, c in self.items():
            exps = [str(e) for e in k]
            if self.kind == EXACT:
                for entry in c.to_json():
                    terms.append({"exp": exps, "coef": entry})
            else:
                terms.append({"exp": exps, "coef": {"pi_pow": 0, "re": repr(c.real),
                                                    "im": repr(c.imag)}})
        out = {"vars": list(self.vars),
               "trunc": [None if t is None else str(t) for t in self.trunc],
               "terms": terms}
        if self.kind == FLOAT:
            out["kind"] = FLOAT
        return out

    @classmethod
    def from_json(cls, data: dict) -> "MultiSeries":
        kind = data.get("kind", EXACT)
        terms: Dict[Tuple, object] = {}
        for t in data["terms"]:
            key = tuple(Fraction(e) for e in t["exp"])
            if kind == EXACT:
                c = Scalar.from_json(t["coef"])
            else:
                c = complex(float(t["coef"]["re"]), float(t["coef"]["im"]))
            terms[key] = terms[key] + c if key in terms else c
        trunc = [None if x is None else Fraction(x) for x in data["trunc"]]
        return cls(terms, vars=data["vars"], trunc=trunc, kind=kind)


# ---------------------------------------------------------------------------
# formal calculus
# ---------------------------------------------------------------------------


def add(a: LogSeries, b: LogSeries) -> LogSeries:
    return a + b


def mul(a: LogSeries, b: LogSeries) -> LogSeries:
    return a * b


def _ddx_terms(terms: Mapping, kind: str, xi: int, li: Optional[int]):
    """d/dx on a term map; ``li`` is the position of ``log x`` (or None)."""
    out: Dict[Tuple, object] = {}

    def put(k, c):
        out[k] = out[k] + c if k in out else c

    for k, c in terms.items():
        n = k[xi]
        m = k[li] if li is not None else 0
        key = list(k)
        key[xi] = _exp(n - 1)
        if n != 0:
            put(tuple(key), c * (complex(n) if kind == FLOAT else Fraction(n)))
        if m:
            key2 = list(key)
            key2[li] = m - 1
            put(tuple(key2), c * m)
    return out


def _euler_terms(terms: Mapping, kind: str, xi: int, li: Optional[int]):
    """x d/dx on a term map."""
    out: Dict[Tuple, object] = {}

    def put(k, c):
        out[k] = out[k] + c if k in out else c

    for k, c in terms.items():
        n = k[xi]
        m = k[li] if li is not None else 0
        if n != 0:
            put(k, c * (complex(n) if kind == FLOAT else Fraction(n)))
        if m:
            key = list(k)
            key[li] = m - 1
            put(tuple(key), c * m)
    return out


def formal_ddx(f, var: Optional[str] = None):
    """Formal derivative on ``W{x, log x}``.

    ``d/dx x^n (log x)^m = n x^(n-1) (log x)^m + m x^(n-1) (log x)^(m-1)``.
    The truncation order drops by one.  Accepts a :class:`LogSeries` or a
    :class:`MultiSeries`, differentiating in ``var`` (default: the first
    variable); a ``log var`` companion variable, if present, is honoured.
    """
    if isinstance(f, LogSeries):
        terms = _ddx_terms(f.terms, f.kind, 0, 1)
        trunc = None if f.trunc is None else f.trunc - 1
        return f._like(terms, trunc=trunc)
    return _multi_op(f, var or f.vars[0], _ddx_terms, shift=-1)


def euler_op(f, var: Optional[str] = None):
    """``x d/dx`` with the same log conventions as :func:`formal_ddx`."""
    if isinstance(f, LogSeries):
        return f._like(_euler_terms(f.terms, f.kind, 0, 1), trunc=f.trunc)
    return _multi_op(f, var or f.vars[0], _euler_terms, shift=0)


def _multi_op(f: MultiSeries, xvar: str, op, shift: int) -> MultiSeries:
    xi = f.index(xvar)
    logvar = f"log {xvar}"
    li = f.vars.index(logvar) if logvar in f.vars else None
    trunc = list(f.trunc)
    if trunc[xi] is not None:
        trunc[xi] = trunc[xi] + shift
    return MultiSeries(op(f.terms, f.kind, xi, li), vars=f.vars, trunc=tuple(trunc), kind=f.kind)


def _exponential_action(f, order: int, var: str, xvar: Optional[str], op, shift: int):
    if isinstance(f, LogSeries):
        xvar = f.var
        f = f.to_multi()
    xvar = xvar or f.vars[0]
    if var in f.vars:
        raise ValueError(f"{var!r} already a variable of the series")
    vars = f.vars + (var,)
    xi = f.index(xvar)
    li = f.vars.index(f"log {xvar}") if f"log {xvar}" in f.vars else None
    base_trunc = list(f.trunc) + [order + 1]
    if base_trunc[xi] is not None:
        base_trunc[xi] = base_trunc[xi] + shift * order
    out: Dict[Tuple, object] = {}
    current = f.terms
    for k in range(order + 1):
        w = _factorial_inv(k)
        for key, c in current.items():
            nk = key + (k,)
            val = c * (complex(w) if f.kind == FLOAT else w)
            out[nk] = out[nk] + val if nk in out else val
        current = op(current, f.kind, xi, li)
    return MultiSeries(out, vars=vars, trunc=tuple(base_trunc), kind=f.kind)


def taylor_shift(f, y_order: int, var: str = "y", xvar: Optional[str] = None) -> MultiSeries:
    """``sum_{k<=y_order} y^k/k! (d/dx)^k f`` as a series in x, log x and y.

    For non-integer exponents this is the definition of ``f(x + y)``.
    """
    return _exponential_action(f, y_order, var, xvar, _ddx_terms, shift=-1)


def scale_exponential(f, y_order: int, var: str = "y", xvar: Optional[str] = None) -> MultiSeries:
    """``sum_{k<=y_order} y^k/k! (x d/dx)^k f``, i.e. ``f(x e^y)``."""
    return _exponential_action(f, y_order, var, xvar, _euler_terms, shift=0)


def _composition_trunc(t: LogSeries, trunc):
    v = t.valuation()
    if v is None or (t.is_zero() and t.trunc is None):
        raise ValueError("composition needs a series with a truncation order")
    if t._terms and min(e for e, _ in t._terms) <= 0:
        raise ValueError("composition needs strictly positive minimal exponent")
    target = _min_trunc(t.trunc, None if trunc is None else _exp(trunc))
    if target is None:
        raise ValueError("exact argument: pass an explicit truncation order")
    return v, target


def _lattice_recurrence(t: LogSeries, target, which: str) -> Optional[LogSeries]:
    """``e^T`` or ``log(1 - T)`` by coefficient recurrence when T has no log terms.

    With exponents on the lattice (1/d)N and u = x^(1/d), differentiating
    ``E = e^T`` gives ``n E_n = sum_k k T_k E_{n-k}``, and differentiating
    ``L = log(1 - T)`` gives ``n L_n = -n T_n + sum_k (n - k) L_{n-k} T_k``.
    """
    if any(m for _, m in t._terms):
        return None
    d = math.lcm(*[Fraction(e).denominator for e, _ in t._terms], Fraction(target).denominator)
    size = math.ceil(Fraction(target) * d)
    T = {int(Fraction(e) * d): c for (e, _), c in t._terms.items()}
    exact = t.kind == EXACT

    def over(c, n):
        return c * Fraction(1, n) if exact else c / n

    out: Dict[int, object] = {}
    if which == "exp":
        out[0] = Scalar.coerce(1) if exact else 1 + 0j
        for n in range(1, size):
            acc = None
            for k, tk in T.items():
                if k <= n and (n - k) in out:
                    term = tk * (out[n - k] * k if exact else out[n - k] * k)
                    acc = term if acc is None else acc + term
            if acc is not None:
                out[n] = over(acc, n)
    else:
        for n in range(1, size):
            acc = -T[n] if n in T else None
            for k, tk in T.items():
                if k < n and (n - k) in out:
                    term = over(out[n - k] * tk * (n - k), n)
                    acc = term if acc is None else acc + term
            if acc is not None:
                out[n] = acc
    return t._like({(Fraction(n, d), 0): c for n, c in out.items()}, trunc=target)


def exp_series(t: LogSeries, trunc=None) -> LogSeries:
    """``e^T = sum T^n/n!`` for ``T`` of positive valuation."""
    v, target = _composition_trunc(t, trunc)
    t = t.truncate(target)
    fast = _lattice_recurrence(t, target, "exp")
    if fast is not None:
        return fast
    one = t._like({(0, 0): 1}, trunc=target)
    total, power, n = one, one, 0
    while True:
        n += 1
        if v is not None and n * v >= target:
            break
        power = power * t
        if power.is_zero():
            break
        total = total + power * _factorial_inv(n)
    return total


def log1m_series(t: LogSeries, trunc=None) -> LogSeries:
    """``log(1 - T) = -sum T^n/n`` for ``T`` of positive valuation."""
    v, target = _composition_trunc(t, trunc)
    t = t.truncate(target)
    fast = _lattice_recurrence(t, target, "log1m")
    if fast is not None:
        return fast
    total = t._like({}, trunc=target)
    power, n = t._like({(0, 0): 1}, trunc=target), 0
    while True:
        n += 1
        if n * v >= target:
            break
        power = power * t
        if power.is_zero():
            break
        total = total - power * Fraction(1, n)
    return total
