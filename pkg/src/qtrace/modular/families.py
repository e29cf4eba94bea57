"""Named test families of vector sequences used by the checks and the command line."""

from __future__ import annotations

import cmath
import random
from typing import Callable, Dict

from ..elliptic.ring import RExpr
from .vectorseq import VectorSeq


def smooth_family(n: int, seed: int = 0, support: int = 2) -> VectorSeq:
    """Random holomorphic components ``c0 e^{b.z + 2 pi i tau} + c1 (sum z)^2 + c2 e^{i tau}``
    on every index with entries <= support."""
    rng = random.Random(seed)

    def rnd():
        return complex(rng.uniform(-1, 1), rng.uniform(-1, 1))

    def component():
        c = [rnd() for _ in range(3)]
        b = [rng.uniform(-0.8, 0.8) for _ in range(n)]

        def f(z, tau):
            lin = sum(bi * zi for bi, zi in zip(b, z))
            s = sum(z)
            return c[0] * cmath.exp(lin + 2j * cmath.pi * tau) + c[1] * s * s + c[2] * cmath.exp(1j * tau)
        return f

    comps: Dict = {}
    for k in range(support + 1):
        mu = tuple(k if i == 0 else 0 for i in range(n))
        comps[mu] = component()
        if n > 1 and k:
            comps[tuple(k if i == n - 1 else 0 for i in range(n))] = component()
    return VectorSeq(n, comps)


def _rexpr_times(expr: RExpr, g: Callable) -> Callable:
    return lambda z, tau: expr.evaluate(z, tau) * g(z)


def g4_family(n: int = 1) -> VectorSeq:
    """Components weighted by ``G~_4``: ``phi_0 = G~_4 e^{z_1}``, ``phi_{e_1} = G~_4 z_1``."""
    G4 = RExpr.G(4)
    e1 = tuple(1 if i == 0 else 0 for i in range(n))
    return VectorSeq(n, {(0,) * n: _rexpr_times(G4, lambda z: cmath.exp(z[0])),
                         e1: _rexpr_times(G4, lambda z: z[0])})


def wp2_family() -> VectorSeq:
    """n = 2 with ``phi_0 = wp~_2(z_1 - z_2)`` and polynomial or exponential neighbours."""
    W = RExpr.wp(2, 1, 2)
    return VectorSeq(2, {(0, 0): _rexpr_times(W, lambda z: 1.0),
                         (1, 0): lambda z, tau: z[0] * z[1] + 1,
                         (0, 1): lambda z, tau: cmath.exp(z[1])})


FAMILIES = ("smooth", "g4", "wp2", "candidate")


def build_family(name: str, n: int, seed: int = 0, system=None) -> VectorSeq:
    if name == "smooth":
        return smooth_family(n, seed)
    if name == "g4":
        return g4_family(n)
    if name == "wp2":
        if n != 2:
            raise ValueError("the wp2 family lives in n = 2")
        return wp2_family()
    if name == "candidate":
        from .systems import candidate_for, first_order_solution
        if system is not None:
            return candidate_for(system)
        return first_order_solution(n, 1)
    raise ValueError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}")
