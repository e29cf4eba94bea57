"""Synthetic modular differential systems, their residuals and the solution-invariance check.

A system of order m in n variables with parameter alpha is

    prod_{l=1}^m D_j(alpha + 2(m-l)) Phi
        + sum_{p=1}^m b_{p,j} prod_{l=1}^{m-p} D_j(alpha + 2(m-p-l)) Phi = 0,   j = 1..n,

where each b_{p,j} is an element of the coefficient ring of weight 2p.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

import mpmath

from ..elliptic.eisenstein import divisor_sigma
from ..elliptic.ring import RExpr
from ..group import IDENTITY, S, T, parse_group_element
from ..report import CheckReport
from .checks import normalize_samples
from .vectorseq import Stencil, VectorSeq, apply_action, apply_D_product

TWO_PI_I = 2j * math.pi


class InvalidSystem(ValueError):
    """Malformed system description."""


@dataclass(frozen=True)
class Coefficient:
    p: int
    j: int
    expr: RExpr
    weight: int

    def to_json(self) -> dict:
        return {"p": self.p, "j": self.j, "expr": self.expr.to_json(), "weight": self.weight}


@dataclass
class DiffSystem:
    n: int
    order: int
    alpha: Fraction
    coeffs: List[Coefficient] = field(default_factory=list)

    def __post_init__(self):
        if self.n < 1 or self.order < 1:
            raise InvalidSystem("n and order must be positive")
        for c in self.coeffs:
            if not 1 <= c.p <= self.order:
                raise InvalidSystem(f"coefficient index p={c.p} outside 1..{self.order}")
            if not 1 <= c.j <= self.n:
                raise InvalidSystem(f"coefficient index j={c.j} outside 1..{self.n}")

    def coefficient(self, p: int, j: int) -> Optional[Coefficient]:
        for c in self.coeffs:
            if c.p == p and c.j == j:
                return c
        return None

    def to_json(self) -> dict:
        return {"n": self.n, "order": self.order, "alpha": str(self.alpha),
                "coeffs": [c.to_json() for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "DiffSystem":
        try:
            n, order, alpha = int(data["n"]), int(data["order"]), Fraction(str(data["alpha"]))
            coeffs = [Coefficient(int(c["p"]), int(c["j"]), RExpr.from_json(c["expr"]), int(c["weight"]))
                      for c in data.get("coeffs", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSystem(f"malformed system: {exc}") from exc
        return cls(n, order, alpha, coeffs)


def default_stencil(order: int) -> Stencil:
    """Nested differences lose digits, so higher orders use a wider Richardson stencil."""
    return Stencil() if order == 1 else Stencil(step=1e-3, richardson=True)


def residual(system: DiffSystem, Phi: VectorSeq, j: int, alpha=None,
             stencil: Optional[Stencil] = None, q_order: int = 40) -> VectorSeq:
    """Left side of the j-th equation applied to Phi (alpha defaults to the system's)."""
    m = system.order
    alpha = system.alpha if alpha is None else alpha
    stencil = stencil or default_stencil(m)
    a = complex(alpha)
    out = apply_D_product(Phi, j, [a + 2 * (m - l) for l in range(1, m + 1)], stencil)
    for p in range(1, m + 1):
        c = system.coefficient(p, j)
        if c is None:
            continue
        inner = apply_D_product(Phi, j, [a + 2 * (m - p - l) for l in range(1, m - p + 1)], stencil)
        expr = c.expr
        out = out + inner.times(lambda z, tau, e=expr: e.evaluate(z, tau, q_order))
    return out


def _max_abs(Phi: VectorSeq, samples) -> float:
    return max((abs(v) for z, tau in samples for v in Phi.evaluate(z, tau).values()), default=0.0)


def coefficient_precheck(system: DiffSystem, samples=None, tol: float = 1e-8,
                         q_order: int = 40) -> CheckReport:
    """Every b_{p,j} must carry the tag 2p, have that structural weight, and be
    numerically covariant of that weight under S and T."""
    samples = normalize_samples(samples, system.n)
    problems = []
    worst = 0.0
    for c in system.coeffs:
        label = f"b_{{{c.p},{c.j}}}"
        if c.weight != 2 * c.p:
            problems.append(f"{label}: declared weight {c.weight} != 2p = {2 * c.p}")
        try:
            w = c.expr.weight()
        except ValueError as exc:
            problems.append(f"{label}: {exc}")
            continue
        if w is not None and w != c.weight:
            problems.append(f"{label}: expression has weight {w}, declared {c.weight}")
        for g in (S, T):
            for z, tau in samples:
                jt = g.j(tau)
                lhs = c.expr.evaluate(tuple(v / jt for v in z), g.act(tau), q_order)
                rhs = jt ** c.weight * c.expr.evaluate(z, tau, q_order)
                dev = abs(lhs - rhs) / max(1.0, abs(rhs))
                worst = max(worst, dev)
                if dev > tol:
                    problems.append(f"{label}: not weight-{c.weight} covariant under {g} (dev {dev:.2e})")
                    break
    return CheckReport(name="coefficient_precheck", passed=not problems, max_deviation=worst,
                       tolerance=tol, params={"coefficients": len(system.coeffs)},
                       details={"problems": sorted(set(problems))})


def solution_invariance_check(system: DiffSystem, Phi: VectorSeq, g="S", samples=None,
                              tol: float = 1e-6, q_order: int = 40,
                              stencil: Optional[Stencil] = None) -> CheckReport:
    """Residual of the system on Phi and on ``Phi|_{g,alpha}``.

    Passes iff the coefficient precheck passes and
    ``residual(Phi|_{g,alpha}) <= max(10 residual(Phi), tol)``.  The report
    also compares ``R(Phi|_{g,alpha})`` with ``(R Phi)|_{g,alpha+2m}``, which
    isolates the invariance mechanism when Phi is not an exact solution.
    """
    g = parse_group_element(g)
    if Phi.n != system.n:
        raise InvalidSystem(f"candidate has n={Phi.n}, system has n={system.n}")
    samples = normalize_samples(samples, system.n)
    stencil = stencil or default_stencil(system.order)
    params = {"g": str(g), "alpha": str(system.alpha), "order": system.order, "n": system.n,
              "step": stencil.step, "richardson": stencil.richardson, "q_order": q_order,
              "samples": len(samples)}
    pre = coefficient_precheck(system, samples, q_order=q_order)
    if not pre.passed:
        return CheckReport(name="solution_invariance", passed=False, tolerance=tol, params=params,
                           details={"rejected": True, "precheck": pre.details["problems"]})
    a = complex(system.alpha)
    transformed = apply_action(Phi, g, a)
    res, res_g, mech = 0.0, 0.0, 0.0
    for j in range(1, system.n + 1):
        R = residual(system, Phi, j, stencil=stencil, q_order=q_order)
        Rg = residual(system, transformed, j, stencil=stencil, q_order=q_order)
        res = max(res, _max_abs(R, samples))
        res_g = max(res_g, _max_abs(Rg, samples))
        mech = max(mech, Rg.max_deviation(apply_action(R, g, a + 2 * system.order), samples))
    bound = max(10 * res, tol)
    return CheckReport(
        name="solution_invariance",
        passed=res_g <= bound,
        max_deviation=res_g,
        tolerance=bound,
        params=params,
        details={"rejected": False, "residual": res, "residual_transformed": res_g,
                 "residual_covariance_deviation": mech,
                 "branch": "principal log(gamma tau + delta)"},
    )


# first-order solutions

def two_log_eta(tau: complex, q_order: int = 60) -> complex:
    """``L(tau) = -(1/2 pi i) integral G~_2``, integrated term by term from the q-expansion
    ``G~_2 = pi^2/3 - 8 pi^2 sum sigma_1(n) q^n``; equals ``2 log eta(tau)``."""
    q = cmath.exp(TWO_PI_I * tau)
    total = math.pi ** 2 * tau / 3
    qn = 1.0 + 0j
    for n in range(1, q_order + 1):
        qn *= q
        c_n = -8 * math.pi ** 2 * divisor_sigma(n, 1)
        total += c_n * qn / (TWO_PI_I * n)
    return -total / TWO_PI_I


def two_log_eta_oracle(tau: complex, dps: int = 30) -> complex:
    """``2 log eta`` from the product ``q^{1/24} prod (1 - q^n)`` at high precision."""
    with mpmath.workdps(dps):
        t = mpmath.mpc(tau.real, tau.imag)
        q = mpmath.exp(2j * mpmath.pi * t)
        val = 2 * (1j * mpmath.pi * t / 12 + mpmath.log(mpmath.qp(q)))
        return complex(val)


def _default_F(w: complex) -> complex:
    return cmath.exp(w / 3) + w * w


def first_order_solution(n: int, alpha, F: Optional[Callable[[complex], complex]] = None,
                         q_order: int = 60, support_bound: int = 4) -> VectorSeq:
    """A solution of ``D_j(alpha) Phi = 0`` for every j, built from the flow of ``G~_2``.

    With ``L = 2 log eta`` (so ``2 pi i dL/dtau = -G~_2``) and ``psi = e^{alpha L}``:
    for n = 1, ``phi_1 = psi F(z e^L)`` and ``phi_0 = L phi_1``;
    for n >= 2 (z-independent), ``phi_{e_i} = psi`` and ``phi_0 = n L psi``.
    """
    a = complex(alpha)
    if n == 1:
        F = F or _default_F

        def phi1(z, tau):
            L = two_log_eta(tau, q_order)
            return cmath.exp(a * L) * F(z[0] * cmath.exp(L))

        def phi0(z, tau):
            return two_log_eta(tau, q_order) * phi1(z, tau)

        return VectorSeq(1, {(0,): phi0, (1,): phi1}, support_bound=support_bound)
    if F is not None:
        raise ValueError("a z-profile F is only supported for n = 1")

    def psi(z, tau):
        return cmath.exp(a * two_log_eta(tau, q_order))

    def phi0(z, tau):
        return n * two_log_eta(tau, q_order) * psi(z, tau)

    comps: Dict = {(0,) * n: phi0}
    for i in range(n):
        comps[tuple(1 if k == i else 0 for k in range(n))] = psi
    return VectorSeq(n, comps, support_bound=support_bound)


def first_order_system(n: int, alpha) -> DiffSystem:
    return DiffSystem(n, 1, Fraction(str(alpha)), [])


def candidate_for(system: DiffSystem) -> VectorSeq:
    """The flow solution of the first-order part, used as the candidate for any system."""
    return first_order_solution(system.n, system.alpha)
