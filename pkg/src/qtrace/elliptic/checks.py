"""Numeric verification of transformation laws at sample points."""

from __future__ import annotations

import cmath
import json
import math
from typing import Iterable, List, Optional, Sequence, Tuple

from ..group import GroupElement, S, T, parse_group_element
from ..report import CheckReport
from ..series import MultiSeries
from . import numeric
from .eisenstein import eisenstein_weight, serre_derivative
from .ring import RExpr, theta_j

Sample = Tuple[Tuple[complex, ...], complex]

# |q_tau| <= 0.005 at every point and at its image under S; |Im z| stays well
# inside the convergence band before and after z -> z/(c tau + d).
DEFAULT_GRID: List[Sample] = [
    ((0.31 + 0.17j,), 1.0j),
    ((0.2 - 0.1j,), 1.2j),
    ((-0.27 + 0.12j,), 0.9j),
    ((0.13 + 0.21j,), 0.25 + 1.0j),
    ((0.4 - 0.15j,), -0.3 + 1.1j),
    ((-0.18 - 0.2j,), 0.4 + 0.95j),
    ((0.35 + 0.05j,), 0.1 + 1.3j),
    ((0.22 + 0.18j,), -0.45 + 0.9j),
    ((-0.33 - 0.08j,), 0.5 + 0.87j),
]

SERRE_TAUS = (0.8j, 1.1j, 0.3 + 1.2j)


def _pair(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"expected [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def parse_samples(data) -> List[Sample]:
    """Samples from decoded JSON: ``[{"z": [re, im] | [[re, im], ...], "tau": [re, im]}, ...]``."""
    if not isinstance(data, list) or not data:
        raise ValueError("samples must be a non-empty JSON array")
    out = []
    for item in data:
        if not isinstance(item, dict) or "z" not in item or "tau" not in item:
            raise ValueError(f"sample {item!r} needs keys 'z' and 'tau'")
        z = item["z"]
        if isinstance(z, list) and z and isinstance(z[0], (list, tuple)):
            zs = tuple(_pair(v) for v in z)
        else:
            zs = (_pair(z),)
        tau = _pair(item["tau"])
        if tau.imag <= 0:
            raise ValueError(f"tau={tau} is not in the upper half-plane")
        out.append((zs, tau))
    return out


def load_samples(path) -> List[Sample]:
    with open(path) as fh:
        return parse_samples(json.load(fh))


def samples_to_json(samples: Sequence[Sample]) -> list:
    return [{"z": [[z.real, z.imag] for z in zs], "tau": [tau.real, tau.imag]}
            for zs, tau in samples]


def _normalize(samples) -> List[Sample]:
    if samples is None:
        return list(DEFAULT_GRID)
    out = []
    for zs, tau in samples:
        zs = tuple(complex(z) for z in zs) if isinstance(zs, (list, tuple)) else (complex(zs),)
        out.append((zs, complex(tau)))
    return out


def _band_center(z: complex, tau: complex) -> complex:
    """``w = z - tau/2``: w and w + tau then sit symmetrically inside the band around z."""
    return z - tau / 2


def modular_covariance_check(m: int, g="S", samples=None, tol: float = 1e-8,
                             q_order: int = 40) -> CheckReport:
    """Weight-m behaviour of ``wp~_m`` at sample points.

    Every m: ``(c tau + d)^{-m} wp_m(z/(c tau + d); g tau) = wp_m(z; tau)``.
    m >= 2 additionally: periodicity under z -> z + 1 and z -> z + tau.
    m = 1 instead: ``wp_1(z+1) = wp_1(z) + G~_2`` and
    ``wp_1(z+tau) = wp_1(z) + G~_2 tau - 2 pi i``.
    The z + tau laws compare the points ``z - tau/2`` and ``z + tau/2`` so
    that both stay well inside the band |Im w| < Im tau.
    """
    g = parse_group_element(g) if isinstance(g, str) else g
    samples = _normalize(samples)
    laws = {"slash": 0.0, "shift_1": 0.0, "shift_tau": 0.0}
    per_sample = []
    for zs, tau in samples:
        z = zs[0]
        j = g.j(tau)
        lhs = j ** (-m) * numeric.wp_value(m, z / j, g.act(tau), q_order)
        base = numeric.wp_value(m, z, tau, q_order)
        d_slash = abs(lhs - base)
        g2 = numeric.eisenstein_value(2, tau, q_order)
        w = _band_center(z, tau)
        wp_w = numeric.wp_value(m, w, tau, q_order)
        wp_w_tau = numeric.wp_value(m, w + tau, tau, q_order)
        wp_z1 = numeric.wp_value(m, z + 1, tau, q_order)
        if m == 1:
            d1 = abs(wp_z1 - (base + g2))
            dt = abs(wp_w_tau - (wp_w + g2 * tau - 2j * math.pi))
        else:
            d1 = abs(wp_z1 - base)
            dt = abs(wp_w_tau - wp_w)
        laws["slash"] = max(laws["slash"], d_slash)
        laws["shift_1"] = max(laws["shift_1"], d1)
        laws["shift_tau"] = max(laws["shift_tau"], dt)
        per_sample.append({"z": z, "tau": tau, "slash": d_slash, "shift_1": d1, "shift_tau": dt})
    dev = max(laws.values())
    return CheckReport(
        name=f"modular_covariance[m={m},g={g}]",
        passed=dev < tol,
        max_deviation=dev,
        tolerance=tol,
        params={"m": m, "g": [g.alpha, g.beta, g.gamma, g.delta], "q_order": q_order,
                "n_samples": len(samples)},
        details={"laws": laws, "samples": per_sample},
    )


def lattice_crosscheck(m: int = 2, samples=None, tol: float = 1e-6, q_order: int = 40,
                       N: int = 60) -> CheckReport:
    """q-expansion value of ``wp_m`` against the direct lattice sum (box |k|, |l| <= N).

    Box sums of sizes up to N are extrapolated in 1/N to cancel the
    box-edge error (see :func:`numeric.wp_lattice_extrapolated`).
    """
    samples = _normalize(samples)
    dev = 0.0
    rows = []
    for zs, tau in samples:
        a = numeric.wp_value(m, zs[0], tau, q_order)
        b = numeric.wp_lattice_extrapolated(m, zs[0], tau, N)
        d = abs(a - b)
        dev = max(dev, d)
        rows.append({"z": zs[0], "tau": tau, "series": a, "lattice": b, "deviation": d})
    return CheckReport(
        name=f"lattice_crosscheck[m={m}]",
        passed=dev < tol,
        max_deviation=dev,
        tolerance=tol,
        params={"m": m, "q_order": q_order, "N": N, "n_samples": len(samples)},
        details={"samples": rows},
    )


def serre_ratio_check(k: int = 4, taus: Iterable[complex] = SERRE_TAUS, tol: float = 1e-8,
                      q_order: int = 40) -> CheckReport:
    """Ratio of ``serre_derivative(G~_k, k)`` to ``G~_{k+2}`` across tau samples.

    A constant ratio is what weight k+2 forces when that space is one
    dimensional (k = 4); for larger k this is a ratio-constancy test only.
    """
    f = serre_derivative(eisenstein_weight(k, q_order), k)
    g = eisenstein_weight(k + 2, q_order)
    ratios = []
    for tau in taus:
        a, _ = numeric.eval_at(f.expansion, (), tau)
        b, _ = numeric.eval_at(g.expansion, (), tau)
        ratios.append(a / b)
    ref = ratios[0]
    dev = max(abs(r - ref) / abs(ref) for r in ratios)
    return CheckReport(
        name=f"serre_ratio[k={k}]",
        passed=dev < tol,
        max_deviation=dev,
        tolerance=tol,
        params={"k": k, "q_order": q_order, "taus": list(taus)},
        details={"ratios": ratios, "output_weight": f.weight},
    )


def theta_weight_check(exprs: Sequence[RExpr], n: int) -> CheckReport:
    """Structural bookkeeping: theta_j(f) is homogeneous of weight wt(f) + 2 for every j."""
    bad = []
    for f in exprs:
        w = f.weight()
        for j in range(1, n + 1):
            t = theta_j(f, j, n)
            if t.is_zero():
                continue
            if not t.is_homogeneous() or t.weight() != w + 2:
                bad.append({"expr": repr(f), "j": j, "weights": sorted(set(t.monomial_weights().values()))})
    return CheckReport(name="theta_weight", passed=not bad, exact=True,
                       params={"n": n, "n_exprs": len(exprs)},
                       details={"failures": bad})


def _multi_samples(n: int) -> List[Sample]:
    """Points with every difference z_1 - z_j in (-Im tau, 0) i and small |Im(z_r - z_s)|."""
    base = [
        ((-0.05 - 0.2j, 0.3 + 0.05j, -0.35 + 0.1j), 1.0j),
        ((0.12 - 0.25j, -0.21 + 0.02j, 0.33 + 0.06j), 0.2 + 1.1j),
        ((0.4 - 0.18j, 0.05 + 0.08j, -0.22 + 0.03j), -0.3 + 0.95j),
    ]
    return [(zs[:n], tau) for zs, tau in base]


def theta_covariance_check(f: RExpr, j: int, n: int, g="S", samples=None,
                           tol: float = 1e-8, q_order: int = 40) -> CheckReport:
    """Numeric weight and ellipticity of ``phi = theta_j(f)``.

    Checks ``phi(z/(c tau + d); g tau) = (c tau + d)^{w+2} phi(z; tau)`` and
    invariance of phi under ``z_1 -> z_1 + 1`` and ``z_1 -> z_1 + tau``.
    Samples must keep z_1 - z_j inside the band before and after the shift.
    """
    g = parse_group_element(g) if isinstance(g, str) else g
    samples = _normalize(samples) if samples is not None else _multi_samples(n)
    phi = theta_j(f, j, n)
    w = f.weight() + 2
    laws = {"slash": 0.0, "shift_1": 0.0, "shift_tau": 0.0}
    for zs, tau in samples:
        jt = g.j(tau)
        base = phi.evaluate(zs, tau, q_order)
        img = phi.evaluate([z / jt for z in zs], g.act(tau), q_order)
        scale = max(1.0, abs(base))
        laws["slash"] = max(laws["slash"], abs(img - jt**w * base) / scale)
        s1 = [zs[0] + 1] + list(zs[1:])
        st = [zs[0] + tau] + list(zs[1:])
        laws["shift_1"] = max(laws["shift_1"], abs(phi.evaluate(s1, tau, q_order) - base) / scale)
        laws["shift_tau"] = max(laws["shift_tau"], abs(phi.evaluate(st, tau, q_order) - base) / scale)
    dev = max(laws.values())
    return CheckReport(
        name=f"theta_covariance[j={j},g={g}]",
        passed=dev < tol,
        max_deviation=dev,
        tolerance=tol,
        params={"j": j, "n": n, "g": [g.alpha, g.beta, g.gamma, g.delta], "q_order": q_order,
                "weight": w, "expr": repr(f)},
        details={"laws": laws, "relative": True},
    )
