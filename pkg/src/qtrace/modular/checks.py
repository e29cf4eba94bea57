"""Numerical checks of the group law and of the D-shift covariance."""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

from ..group import IDENTITY, branch_defect, parse_group_element
from ..report import CheckReport
from .vectorseq import DEFAULT_STENCIL, Stencil, VectorSeq, apply_action, apply_D

Sample = Tuple[Tuple[complex, ...], complex]

# |q_tau| <= 0.05 after one generator is applied; |z| small against Im tau
SAMPLES_1 = (
    ((0.21 + 0.07j,), 1.05j),
    ((-0.15 + 0.1j,), 0.1 + 1.15j),
    ((0.12 - 0.09j,), -0.2 + 0.98j),
)
SAMPLES_2 = (
    ((0.21 + 0.07j, -0.13 + 0.02j), 1.05j),
    ((-0.15 + 0.1j, 0.17 - 0.05j), 0.1 + 1.15j),
    ((0.12 - 0.09j, -0.2 + 0.06j), -0.2 + 0.98j),
)


def default_samples(n: int) -> List[Sample]:
    if n == 1:
        return list(SAMPLES_1)
    if n == 2:
        return list(SAMPLES_2)
    base = [0.21 + 0.07j, -0.13 + 0.02j, 0.05 - 0.11j, -0.24 - 0.04j]
    return [(tuple(base[i % 4] * (1 + 0.1 * k) for i in range(n)), tau)
            for k, (_, tau) in enumerate(SAMPLES_1)]


def normalize_samples(samples, n: int) -> List[Sample]:
    if samples is None:
        return default_samples(n)
    out = []
    for z, tau in samples:
        z = tuple(complex(v) for v in (z if isinstance(z, (list, tuple)) else [z]))
        if len(z) != n:
            raise ValueError(f"sample has {len(z)} z-values, expected {n}")
        out.append((z, complex(tau)))
    return out


def _deviation(A: VectorSeq, B: VectorSeq, samples, relative: bool) -> float:
    dev = 0.0
    for z, tau in samples:
        a, b = A.evaluate(z, tau), B.evaluate(z, tau)
        for mu in set(a) | set(b):
            x, y = a.get(mu, 0j), b.get(mu, 0j)
            d = abs(x - y)
            if relative:
                d /= max(1.0, abs(x), abs(y))
            dev = max(dev, d)
    return dev


def group_law_check(Phi: VectorSeq, g1, g2, a, samples=None, tol: float = 1e-6) -> CheckReport:
    """``(Phi|_{g1,a})|_{g2,a}`` against ``Phi|_{g1 g2,a}``.

    Both sides use the principal logarithm.  Where it is not additive along
    the product, the right side is evaluated with the branch
    ``log j(g1 g2, tau) + 2 pi i k``; the defects k are reported.
    """
    g1, g2 = parse_group_element(g1), parse_group_element(g2)
    samples = normalize_samples(samples, Phi.n)
    lhs = apply_action(apply_action(Phi, g1, a), g2, a)
    defects = {str(tau): branch_defect(g1, g2, tau) for _, tau in samples}
    rhs = apply_action(Phi, g1 @ g2, a, log_shift=lambda tau: branch_defect(g1, g2, tau))
    dev = _deviation(lhs, rhs, samples, relative=False)
    principal = apply_action(Phi, g1 @ g2, a)
    dev_principal = _deviation(lhs, principal, samples, relative=False)
    return CheckReport(
        name="group_law",
        passed=dev < tol,
        max_deviation=dev,
        tolerance=tol,
        params={"g1": str(g1), "g2": str(g2), "a": complex(a), "n": Phi.n,
                "support": [list(mu) for mu in Phi.support], "samples": len(samples)},
        details={"branch": "principal log(gamma tau + delta)", "branch_defects": defects,
                 "deviation_without_branch_correction": dev_principal},
    )


def covariance_check(Phi: VectorSeq, g, a, j: int, samples=None, tol: float = 1e-5,
                     stencil: Stencil = DEFAULT_STENCIL) -> CheckReport:
    """``D_j(a)(Phi|_{g,a})`` against ``(D_j(a) Phi)|_{g,a+2}`` with finite-difference derivatives."""
    g = parse_group_element(g)
    samples = normalize_samples(samples, Phi.n)
    lhs = apply_D(apply_action(Phi, g, a), j, a, stencil)
    rhs = apply_action(apply_D(Phi, j, a, stencil), g, complex(a) + 2)
    dev = _deviation(lhs, rhs, samples, relative=True)
    return CheckReport(
        name="d_shift_covariance",
        passed=dev < tol,
        max_deviation=dev,
        tolerance=tol,
        params={"g": str(g), "a": complex(a), "j": j, "n": Phi.n, "step": stencil.step,
                "richardson": stencil.richardson, "q_order": Phi.q_order, "samples": len(samples)},
        details={"branch": "principal log(gamma tau + delta)", "deviation": "relative, max(1, |value|)"},
    )


def identity_action_check(Phi: VectorSeq, a, samples=None) -> CheckReport:
    samples = normalize_samples(samples, Phi.n)
    dev = _deviation(apply_action(Phi, IDENTITY, a), Phi, samples, relative=False)
    return CheckReport(name="identity_action", passed=dev == 0.0, max_deviation=dev, exact=True,
                       params={"a": complex(a), "n": Phi.n})
