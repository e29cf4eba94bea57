"""Polynomials over the generators of the coefficient ring R and the derivation theta_j.

Atoms
-----
``("G", k)``          G~_k(q), modular weight k
``("wp", m, r, s)``   wp~_m(z_r - z_s; q), weight m, stored with r < s
``("z", r, s)``       z_r - z_s, weight -1, stored with r < s
``("qd", atom)``      (2 pi i)^2 q d/dq applied to a G or wp atom, weight +2

R proper is generated by G~_4, G~_6, wp~_2 and wp~_3; the remaining atoms
appear in the image of theta_j.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, Sequence, Tuple

from ..scalar import Scalar
from . import numeric

Atom = Tuple
Monomial = Tuple[Atom, ...]


class UnsupportedGenerator(ValueError):
    """theta_j was applied to an atom outside its domain."""


def _norm_pair(kind: str, m: int, r: int, s: int):
    """Return (atom, sign) with indices ordered r < s."""
    if r == s:
        raise ValueError("difference variables need r != s")
    if kind == "wp":
        if r < s:
            return ("wp", m, r, s), 1
        return ("wp", m, s, r), (-1) ** m
    if r < s:
        return ("z", r, s), 1
    return ("z", s, r), -1


def atom_weight(a: Atom) -> int:
    if a[0] == "G":
        return a[1]
    if a[0] == "wp":
        return a[1]
    if a[0] == "z":
        return -1
    if a[0] == "qd":
        return atom_weight(a[1]) + 2
    raise ValueError(f"unknown atom {a!r}")


class RExpr:
    """Polynomial in ring atoms with exact coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[Monomial, Scalar] | None = None):
        clean = {}
        for mono, c in (terms or {}).items():
            c = Scalar.coerce(c)
            mono = tuple(sorted(mono, key=repr))
            if mono in clean:
                c = clean[mono] + c
            if c.is_zero():
                clean.pop(mono, None)
            else:
                clean[mono] = c
        self.terms = clean

    # constructors
    @classmethod
    def const(cls, c) -> "RExpr":
        return cls({(): c})

    @classmethod
    def atom(cls, a: Atom, coef=1) -> "RExpr":
        return cls({(a,): coef})

    @classmethod
    def G(cls, k: int) -> "RExpr":
        if k < 2 or k % 2:
            raise ValueError("G~_k needs even k >= 2")
        return cls.atom(("G", k))

    @classmethod
    def wp(cls, m: int, r: int, s: int) -> "RExpr":
        a, sign = _norm_pair("wp", m, r, s)
        return cls.atom(a, sign)

    @classmethod
    def zdiff(cls, r: int, s: int) -> "RExpr":
        a, sign = _norm_pair("z", 0, r, s)
        return cls.atom(a, sign)

    # arithmetic
    def __add__(self, other):
        other = _lift(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return RExpr(out)

    __radd__ = __add__

    def __neg__(self):
        return RExpr({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        out: Dict[Monomial, Scalar] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = tuple(sorted(k1 + k2, key=repr))
                out[k] = out[k] + c1 * c2 if k in out else c1 * c2
        return RExpr(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = RExpr.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        try:
            other = _lift(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def atoms(self) -> set:
        return {a for mono in self.terms for a in mono}

    def monomial_weights(self) -> Dict[Monomial, int]:
        return {mono: sum(atom_weight(a) for a in mono) for mono in self.terms}

    def weight(self):
        """Common modular weight of every monomial; None for the zero polynomial.

        Raises ValueError if the polynomial is not homogeneous.
        """
        ws = set(self.monomial_weights().values())
        if not ws:
            return None
        if len(ws) > 1:
            raise ValueError(f"inhomogeneous expression with weights {sorted(ws)}")
        return ws.pop()

    def is_homogeneous(self) -> bool:
        return len(set(self.monomial_weights().values())) <= 1

    def __repr__(self):
        if not self.terms:
            return "RExpr(0)"
        parts = []
        for mono, c in sorted(self.terms.items(), key=lambda kv: repr(kv[0])):
            parts.append(f"({c})" + "".join(f"*{_atom_str(a)}" for a in mono))
        return "RExpr(" + " + ".join(parts) + ")"

    # numerics
    def evaluate(self, z: Sequence[complex], tau: complex, q_order: int = 40) -> complex:
        cache: Dict[Atom, complex] = {}
        total = 0j
        for mono, c in self.terms.items():
            term = complex(c)
            for a in mono:
                if a not in cache:
                    cache[a] = evaluate_atom(a, z, tau, q_order)
                term *= cache[a]
            total += term
        return total

    # serialisation
    def to_json(self) -> dict:
        args = []
        for mono, c in sorted(self.terms.items(), key=lambda kv: repr(kv[0])):
            factors = [{"op": "const", "value": c.to_json()}] + [_atom_json(a) for a in mono]
            args.append({"op": "mul", "args": factors})
        return {"op": "add", "args": args}

    @classmethod
    def from_json(cls, node) -> "RExpr":
        op = node["op"]
        if op == "add":
            out = RExpr()
            for a in node["args"]:
                out = out + cls.from_json(a)
            return out
        if op == "mul":
            out = RExpr.const(1)
            for a in node["args"]:
                out = out * cls.from_json(a)
            return out
        if op == "const":
            if "value" in node:
                return RExpr.const(Scalar.from_json(node["value"]))
            return RExpr.const(Scalar.rational(Fraction(node.get("re", "0")),
                                               Fraction(node.get("im", "0")),
                                               int(node.get("pi_pow", 0))))
        if op == "G":
            return RExpr.G(int(node["k"]))
        if op == "wp":
            return RExpr.wp(int(node["m"]), int(node["r"]), int(node["s"]))
        if op == "z":
            return RExpr.zdiff(int(node["r"]), int(node["s"]))
        if op == "qd":
            inner = cls.from_json(node["arg"])
            if len(inner.terms) != 1:
                raise ValueError("qd applies to a single atom")
            (mono, c), = inner.terms.items()
            if len(mono) != 1:
                raise ValueError("qd applies to a single atom")
            return RExpr.atom(("qd", mono[0]), c)
        if op == "theta":
            return theta_j(cls.from_json(node["arg"]), int(node["j"]), int(node.get("n", 0)) or None)
        raise ValueError(f"unknown expression node {op!r}")


def _lift(x) -> RExpr:
    if isinstance(x, RExpr):
        return x
    if isinstance(x, (int, Fraction, Scalar)) and not isinstance(x, bool):
        return RExpr.const(x)
    raise TypeError(f"cannot use {type(x).__name__} in a ring expression")


def _atom_str(a: Atom) -> str:
    if a[0] == "G":
        return f"G{a[1]}"
    if a[0] == "wp":
        return f"wp{a[1]}(z{a[2]}-z{a[3]})"
    if a[0] == "z":
        return f"(z{a[1]}-z{a[2]})"
    return f"qd[{_atom_str(a[1])}]"


def _atom_json(a: Atom) -> dict:
    if a[0] == "G":
        return {"op": "G", "k": a[1]}
    if a[0] == "wp":
        return {"op": "wp", "m": a[1], "r": a[2], "s": a[3]}
    if a[0] == "z":
        return {"op": "z", "r": a[1], "s": a[2]}
    return {"op": "qd", "arg": _atom_json(a[1])}


def evaluate_atom(a: Atom, z: Sequence[complex], tau: complex, q_order: int = 40) -> complex:
    zs = list(z) if isinstance(z, (list, tuple)) else [z]
    qd = a[0] == "qd"
    base = a[1] if qd else a
    if base[0] == "G":
        return numeric.eisenstein_value(base[1], tau, q_order, qderiv=qd)
    if base[0] == "wp":
        w = complex(zs[base[2] - 1]) - complex(zs[base[3] - 1])
        return numeric.wp_value(base[1], w, tau, q_order, qderiv=qd)
    if base[0] == "z" and not qd:
        return complex(zs[base[1] - 1]) - complex(zs[base[2] - 1])
    raise ValueError(f"cannot evaluate atom {a!r}")


def _theta_atom(a: Atom, j: int) -> RExpr:
    if a[0] == "G":
        k = a[1]
        if k < 4:
            raise UnsupportedGenerator("theta_j is defined on G~_k for k >= 4")
        return RExpr.atom(("qd", a)) + RExpr.G(2) * RExpr.atom(a) * k
    if a[0] == "wp":
        m, r, s = a[1], a[2], a[3]
        if m < 2:
            raise UnsupportedGenerator("theta_j is defined on wp~_m for m >= 2")
        g2 = RExpr.G(2)
        nxt = RExpr.wp(m + 1, r, s)
        out = RExpr.atom(("qd", a)) + g2 * RExpr.atom(a) * m
        out = out - g2 * RExpr.zdiff(r, s) * nxt * m
        wp1 = RExpr()
        if j != r:
            wp1 = wp1 + RExpr.wp(1, r, j)
        if j != s:
            wp1 = wp1 - RExpr.wp(1, s, j)
        return out + nxt * wp1 * m
    raise UnsupportedGenerator(f"theta_j is not defined on {_atom_str(a)}")


def theta_j(f: RExpr, j: int, n: int | None = None) -> RExpr:
    """The derivation theta_j on R; raises modular weight by exactly 2.

    ``theta_j(G~_k) = (2 pi i)^2 q dG~_k/dq + k G~_2 G~_k``.  On
    ``wp~_m(z_r - z_s)`` it adds ``-m G~_2 (z_r - z_s) wp~_{m+1}`` and
    ``m wp~_{m+1} (wp~_1(z_r - z_j) - wp~_1(z_s - z_j))``, the j = r and
    j = s cases dropping the undefined ``wp~_1(0)`` term.
    """
    f = _lift(f)
    if n is not None and not 1 <= j <= n:
        raise ValueError(f"j={j} out of range 1..{n}")
    out = RExpr()
    for mono, c in f.terms.items():
        for i, a in enumerate(mono):
            rest = RExpr({mono[:i] + mono[i + 1:]: c})
            out = out + rest * _theta_atom(a, j)
    return out
