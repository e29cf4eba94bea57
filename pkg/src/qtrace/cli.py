"""Command-line entry point: ``qtrace {expand, pseudotrace, qtrace, verify, rerun}``.

Exit codes: 0 when every requested check passes, 1 when a check fails,
2 for usage errors and malformed or inconsistent input.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from importlib import resources
from typing import Callable, Dict, List, Optional, Sequence

from . import __version__
from .report import CheckReport, dumps

INPUT_FLAGS = ("samples", "system", "algebra", "module", "phi", "op", "space")


class InputError(Exception):
    """Malformed or inconsistent input; maps to exit code 2."""


def data_path(name: str) -> str:
    """Path of a JSON file shipped with the package."""
    return str(resources.files("qtrace") / "data" / name)


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _threads() -> int:
    raw = os.environ.get("QTRACE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError as exc:
        raise InputError(f"QTRACE_THREADS must be an integer, got {raw!r}") from exc


def _run_checks(jobs: Dict[str, Callable[[], CheckReport]]) -> List[CheckReport]:
    """Run independent checks (possibly concurrently) and return them sorted by id."""
    ids = sorted(jobs)
    n = _threads()
    if n == 1 or len(ids) == 1:
        return [jobs[i]() for i in ids]
    with ThreadPoolExecutor(max_workers=n) as pool:
        futures = {i: pool.submit(jobs[i]) for i in ids}
        return [futures[i].result() for i in ids]


def _verify_output(command: str, params: dict, reports: List[CheckReport]) -> dict:
    return {"command": command, "params": params,
            "checks": [r.to_dict() for r in reports],
            "passed": all(r.passed for r in reports)}


# expand

def _cmd_expand_eisenstein(args) -> tuple:
    from .elliptic import eisenstein
    if args.k < 0 or args.order < 0:
        raise InputError("--k and --order must be non-negative")
    E = eisenstein(args.k, args.order)
    rows = []
    for n in range(args.order + 1):
        c = E[n]
        entry = {"n": n, "text": str(c)}
        if args.float:
            entry["value"] = complex(c)
        else:
            entry["value"] = c.to_json()
        rows.append(entry)
    params = {"k": args.k, "weight": E.weight, "order": args.order,
              "mode": "float" if args.float else "exact"}
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "coefficient", "float_re", "float_im"])
        for n in range(args.order + 1):
            z = complex(E[n])
            w.writerow([n, str(E[n]), repr(z.real), repr(z.imag)])
        return buf.getvalue(), True, params
    return {"command": "expand eisenstein", "params": params, "coefficients": rows}, True, params


def _cmd_expand_wp(args) -> tuple:
    from .elliptic import wp_series
    if args.m < 1 or args.zorder < 0 or args.qorder < 0:
        raise InputError("--m must be >= 1 and the orders non-negative")
    W = wp_series(args.m, args.zorder, args.qorder)
    params = {"m": args.m, "z_order": args.zorder, "q_order": args.qorder, "weight": W.weight,
              "mode": "exact"}
    return {"command": "expand wp", "params": params, "series": W.expansion.to_json()}, True, params


# verify elliptic

def _elliptic_samples(args):
    from .elliptic import checks
    if args.samples is None:
        return None
    try:
        return checks.load_samples(args.samples)
    except ValueError as exc:
        raise InputError(f"bad samples file: {exc}") from exc


def _cmd_verify_elliptic(args) -> tuple:
    from .elliptic import checks, weierstrass
    suite = args.suite
    samples = _elliptic_samples(args)
    jobs: Dict[str, Callable[[], CheckReport]] = {}
    params = {"suite": suite}
    if suite == "recursion":
        ms = [args.m] if args.m else list(range(1, 7))
        zo, qo = args.zorder or 8, args.qorder or 8
        params.update(m=ms, z_order=zo, q_order=qo, mode="exact")
        for m in ms:
            jobs[f"recursion_m{m}"] = (lambda m=m: weierstrass.wp_recursion_check(m, zo, qo))
    elif suite == "relation":
        ms = [args.m] if args.m else [1, 2, 3]
        zo, qo = args.zorder or 4, args.qorder or 4
        params.update(m=ms, z_order=zo, q_order=qo, mode="exact")
        for m in ms:
            jobs[f"relation_m{m}"] = (lambda m=m: weierstrass.wp_P_relation_check(m, zo, qo))
    else:
        ms = [args.m] if args.m else [1, 2, 3]
        tol = args.tol if args.tol is not None else 1e-8
        qo = args.qorder or 40
        params.update(m=ms, q_order=qo, tol=tol, mode="float",
                      samples=args.samples or "built-in 9-point grid")
        for m in ms:
            for g in ("S", "T"):
                jobs[f"modular_m{m}_{g}"] = (lambda m=m, g=g: checks.modular_covariance_check(
                    m, g, samples, tol, qo))
            if m >= 2:
                jobs[f"lattice_m{m}"] = (lambda m=m: checks.lattice_crosscheck(m, samples, 1e-6, qo))
    reports = _run_checks(jobs)
    out = _verify_output("verify elliptic", params, reports)
    return out, out["passed"], params


# verify modular-action

def _cmd_verify_modular(args) -> tuple:
    from .elliptic.checks import load_samples
    from .group import GENERATORS, parse_group_element
    from .modular import (DiffSystem, InvalidSystem, build_family, candidate_for, covariance_check,
                          group_law_check, solution_invariance_check)
    system = None
    if args.system:
        try:
            system = DiffSystem.from_json(_load_json(args.system))
        except InvalidSystem as exc:
            raise InputError(str(exc)) from exc
    samples = None
    if args.samples:
        try:
            samples = load_samples(args.samples)
        except ValueError as exc:
            raise InputError(f"bad samples file: {exc}") from exc
    n = system.n if system else (len(samples[0][0]) if samples else 1)
    if samples and any(len(z) != n for z, _ in samples):
        raise InputError(f"samples must carry {n} z-values each")
    try:
        gs = [parse_group_element(g) for g in args.g] if args.g else list(GENERATORS)
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from exc
    if args.a is not None:
        a = Fraction(args.a)
    else:
        a = system.alpha if system else Fraction(1, 2)
    suite = args.suite
    params = {"suite": suite, "n": n, "a": str(a), "g": [str(g) for g in gs],
              "samples": args.samples or f"built-in n={n} samples", "mode": "float",
              "branch": "principal log(gamma tau + delta)"}
    jobs: Dict[str, Callable[[], CheckReport]] = {}
    try:
        if suite == "group":
            family = args.family or "smooth"
            Phi = build_family(family, n, args.seed, system)
            tol = args.tol if args.tol is not None else 1e-6
            params.update(family=family, seed=args.seed, tol=tol)
            for g1 in gs:
                for g2 in gs:
                    jobs[f"group_{g1}_{g2}"] = (lambda g1=g1, g2=g2: group_law_check(
                        Phi, g1, g2, complex(a), samples, tol))
        elif suite == "covariance":
            family = args.family or ("wp2" if n == 2 else "g4")
            Phi = build_family(family, n, args.seed, system)
            tol = args.tol if args.tol is not None else 1e-5
            params.update(family=family, seed=args.seed, tol=tol)
            for g in gs:
                for j in range(1, n + 1):
                    jobs[f"covariance_{g}_j{j}"] = (lambda g=g, j=j: covariance_check(
                        Phi, g, complex(a), j, samples, tol))
        else:
            if system is None:
                raise InputError("--suite invariance needs --system")
            if args.a is not None:
                raise InputError("--a is taken from the system for --suite invariance")
            Phi = candidate_for(system)
            tol = args.tol if args.tol is not None else 1e-6
            params.update(family="candidate", tol=tol, system=system.to_json())
            for g in gs:
                jobs[f"invariance_{g}"] = (lambda g=g: solution_invariance_check(
                    system, Phi, g, samples, tol))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    reports = _run_checks(jobs)
    out = _verify_output("verify modular-action", params, reports)
    return out, out["passed"], params


# pseudotraces

def _matrix_payload(data, what: str):
    if isinstance(data, dict):
        data = data.get("matrix")
    if not isinstance(data, list):
        raise InputError(f"{what} must be a matrix (list of rows) or {{'matrix': rows}}")
    return data


def _cmd_pseudotrace(args) -> tuple:
    from .pseudotrace import (FDAlgebra, NotEquivariant, NotProjective, RightModule, StructureError,
                              SymFn, find_projective_basis, la, pseudotrace, symmetry_violations)
    try:
        P = FDAlgebra.from_json(_load_json(args.algebra))
        M = RightModule.from_json(P, _load_json(args.module))
        phi = SymFn.from_json(_load_json(args.phi))
        T = la.qmat(_matrix_payload(_load_json(args.op), "--op"))
        bad = symmetry_violations(P, phi)
        if bad:
            i, j = bad[0]
            raise InputError(f"phi is not symmetric: phi(e_{i} e_{j}) != phi(e_{j} e_{i})")
        basis = find_projective_basis(M)
        if isinstance(basis, NotProjective):
            raise InputError(f"module is not projective: {basis.reason}")
        value = pseudotrace(phi, basis, T)
    except NotEquivariant as exc:
        raise InputError(str(exc)) from exc
    except (StructureError, ValueError, TypeError) as exc:
        raise InputError(str(exc)) from exc
    params = {"algebra_dim": P.dim, "module_dim": M.dim, "mode": "exact"}
    out = {"command": "pseudotrace", "params": params, "value": str(value),
           "projective_basis": basis.to_json()}
    return out, True, params


def _cmd_qtrace(args) -> tuple:
    from .pseudotrace import (GradedSpace, NotEquivariant, StructureError, SymFn, formal_q_pseudotrace,
                              la, symmetry_violations)
    try:
        W = GradedSpace.from_json(_load_json(args.space))
        phi = SymFn.from_json(_load_json(args.phi))
        a = la.qmat(_matrix_payload(_load_json(args.op), "--op")) if args.op else None
        bad = symmetry_violations(W.algebra, phi)
        if bad:
            i, j = bad[0]
            raise InputError(f"phi is not symmetric: phi(e_{i} e_{j}) != phi(e_{j} e_{i})")
        series = formal_q_pseudotrace(W, phi, a)
    except NotEquivariant as exc:
        raise InputError(str(exc)) from exc
    except (StructureError, ValueError, TypeError) as exc:
        raise InputError(str(exc)) from exc
    params = {"dim": W.dim, "weights": [str(w) for w in W.weights()],
              "nilpotency_index": W.nilpotency_index(), "mode": "exact"}
    out = {"command": "qtrace", "params": params, "series": series.to_json(), "text": str(series)}
    return out, True, params


# manifests

def _render(payload) -> str:
    return payload if isinstance(payload, str) else dumps(payload) + "\n"


def _manifest(argv: Sequence[str], args, text: str, passed: bool, params: dict) -> dict:
    inputs = {}
    for flag in INPUT_FLAGS:
        path = getattr(args, flag, None)
        if path:
            inputs[flag] = _load_json(path)
    checks = []
    if not isinstance(text, str) or text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
            checks = [{"name": c["name"], "passed": c["passed"], "max_deviation": c["max_deviation"],
                       "tolerance": c["tolerance"]} for c in doc.get("checks", [])]
        except (ValueError, AttributeError):
            checks = []
    return {
        "qtrace_version": __version__,
        "argv": list(argv),
        "inputs": inputs,
        "params": params,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "threads": _threads(),
        "passed": passed,
        "checks": checks,
        "output_sha256": hashlib.sha256(text.encode()).hexdigest(),
    }


def _strip_io_flags(argv: Sequence[str]) -> List[str]:
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok in ("--manifest", "--out"):
            skip = True
            continue
        if tok.startswith("--manifest=") or tok.startswith("--out="):
            continue
        out.append(tok)
    return out


def _cmd_rerun(args) -> tuple:
    manifest = _load_json(args.manifest_file)
    if not isinstance(manifest, dict) or "argv" not in manifest:
        raise InputError("not a qtrace manifest (missing 'argv')")
    argv = list(manifest["argv"])
    with tempfile.TemporaryDirectory() as tmp:
        for flag, content in manifest.get("inputs", {}).items():
            path = os.path.join(tmp, f"{flag}.json")
            with open(path, "w") as fh:
                json.dump(content, fh)
            opt = f"--{flag}"
            if opt not in argv:
                raise InputError(f"manifest input {flag!r} has no matching {opt} in argv")
            argv[argv.index(opt) + 1] = path
        sub = build_parser().parse_args(argv)
        payload, passed, _ = sub.handler(sub)
    text = _render(payload)
    if args.check:
        same = hashlib.sha256(text.encode()).hexdigest() == manifest.get("output_sha256")
        out = {"command": "rerun", "manifest": args.manifest_file, "reproduced": same,
               "argv": manifest["argv"]}
        return out, same, {"check": True}
    return text, passed, {"check": False}


# parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qtrace", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"qtrace {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def io_flags(sp):
        sp.add_argument("--out", help="write the output here instead of stdout")
        sp.add_argument("--manifest", help="write a run manifest (inputs inlined) to this path")

    exp = sub.add_parser("expand", help="exact q- and Laurent expansions")
    exp_sub = exp.add_subparsers(dest="what", required=True)
    e = exp_sub.add_parser("eisenstein", help="coefficients of G~_{2k+2}")
    e.add_argument("--k", type=int, required=True)
    e.add_argument("--order", type=int, required=True)
    fmt = e.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON output (default)")
    fmt.add_argument("--csv", action="store_true", help="CSV table of coefficients")
    e.add_argument("--float", action="store_true", help="emit floating-point values instead of exact ones")
    io_flags(e)
    e.set_defaults(handler=_cmd_expand_eisenstein)
    w = exp_sub.add_parser("wp", help="Laurent expansion of wp~_m in (z, q)")
    w.add_argument("--m", type=int, required=True)
    w.add_argument("--zorder", type=int, required=True)
    w.add_argument("--qorder", type=int, required=True)
    io_flags(w)
    w.set_defaults(handler=_cmd_expand_wp)

    pt = sub.add_parser("pseudotrace", help="pseudotrace of an equivariant endomorphism")
    for flag in ("algebra", "module", "phi", "op"):
        pt.add_argument(f"--{flag}", required=True)
    io_flags(pt)
    pt.set_defaults(handler=_cmd_pseudotrace)

    qt = sub.add_parser("qtrace", help="formal q-pseudotrace of a graded space")
    qt.add_argument("--space", required=True)
    qt.add_argument("--phi", required=True)
    qt.add_argument("--op")
    io_flags(qt)
    qt.set_defaults(handler=_cmd_qtrace)

    ver = sub.add_parser("verify", help="run verification suites")
    ver_sub = ver.add_subparsers(dest="target", required=True)
    ve = ver_sub.add_parser("elliptic")
    ve.add_argument("--suite", choices=("recursion", "relation", "modular"), required=True)
    ve.add_argument("--m", type=int)
    ve.add_argument("--zorder", type=int)
    ve.add_argument("--qorder", type=int)
    ve.add_argument("--tol", type=float)
    ve.add_argument("--samples")
    io_flags(ve)
    ve.set_defaults(handler=_cmd_verify_elliptic)
    vm = ver_sub.add_parser("modular-action")
    vm.add_argument("--suite", choices=("group", "covariance", "invariance"), required=True)
    vm.add_argument("--system")
    vm.add_argument("--samples")
    vm.add_argument("--tol", type=float)
    vm.add_argument("--a", help="weight a as a rational (defaults to the system's alpha)")
    vm.add_argument("--g", action="append", help="group element (S, T, S^-1, T^-1, I); repeatable")
    vm.add_argument("--family", choices=("smooth", "g4", "wp2", "candidate"))
    vm.add_argument("--seed", type=int, default=0)
    io_flags(vm)
    vm.set_defaults(handler=_cmd_verify_modular)

    rr = sub.add_parser("rerun", help="re-run a command from its manifest")
    rr.add_argument("manifest_file")
    rr.add_argument("--check", action="store_true", help="compare the output with the recorded hash")
    io_flags(rr)
    rr.set_defaults(handler=_cmd_rerun)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        payload, passed, params = args.handler(args)
        text = _render(payload)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        if args.manifest:
            with open(args.manifest, "w") as fh:
                fh.write(dumps(_manifest(_strip_io_flags(argv), args, text, passed, params)) + "\n")
    except InputError as exc:
        sys.stderr.write(f"qtrace: error: {exc}\n")
        return 2
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
