"""Command-line interface: algebra queries, loop fixtures, verification
suites, and report digests.

Vector syntax: basis combinations like "e1" or "e1+2.5e4", or a comma
separated 7-tuple.  Form syntax: signed multi-index terms with 1-based
indices, e.g. "+123 -257" for a 3-form or "+12 -47" for a 2-form.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

import numpy as np

from . import verify
from .algebra import (Octonion, is_associative, octonion_mul, standard_g2,
                      cross, two_form_decompose)
from .errors import G2KnotError
from .forms import AltForm, multi_indices
from .loops import (FourierLoopSpec, Loop7, circle_loop, loop_from_fourier,
                    loop_from_json, loop_to_json, unit_speed_reparam)

_BASIS_TERM = re.compile(r"([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\s*e([1-7])")


def parse_vector(text: str) -> np.ndarray:
    """Parse 'e1', 'e1+2.5e4', or a comma-separated 7-tuple."""
    text = text.strip()
    if "," in text:
        parts = [float(p) for p in text.split(",")]
        if len(parts) != 7:
            raise ValueError(f"expected 7 components, got {len(parts)}")
        return np.asarray(parts)
    vec = np.zeros(7)
    pos = 0
    matched = False
    for m in _BASIS_TERM.finditer(text):
        if text[pos:m.start()].strip():
            raise ValueError(f"could not parse vector segment {text[pos:m.start()]!r}")
        coeff_text = m.group(1)
        if coeff_text in ("", "+"):
            coeff = 1.0
        elif coeff_text == "-":
            coeff = -1.0
        else:
            coeff = float(coeff_text)
        vec[int(m.group(2)) - 1] += coeff
        pos = m.end()
        matched = True
    if not matched or text[pos:].strip():
        raise ValueError(f"could not parse vector {text!r}")
    return vec


def format_vector(vec: np.ndarray, tol: float = 1e-12) -> str:
    """Inverse of parse_vector for display, e.g. 'e3' or '1.5e1-2e4'."""
    parts = []
    for i, c in enumerate(np.asarray(vec, dtype=float)):
        if abs(c) <= tol:
            continue
        sign = "-" if c < 0 else ("+" if parts else "")
        mag = abs(c)
        coeff = "" if abs(mag - 1.0) <= tol else f"{mag:g}"
        parts.append(f"{sign}{coeff}e{i + 1}")
    return "".join(parts) if parts else "0"


def parse_form(text: str) -> AltForm:
    """Parse signed multi-index terms like '+123 -257' (1-based indices)."""
    tokens = text.split()
    if not tokens:
        raise ValueError("empty form expression")
    terms = {}
    degree = None
    for tok in tokens:
        m = re.fullmatch(r"([+-]?)((?:\d+(?:\.\d*)?|\.\d+)\*)?([1-7]+)", tok)
        if m is None:
            raise ValueError(f"could not parse form term {tok!r}")
        sign = -1.0 if m.group(1) == "-" else 1.0
        coeff = float(m.group(2)[:-1]) if m.group(2) else 1.0
        idx = tuple(int(ch) - 1 for ch in m.group(3))
        if len(set(idx)) != len(idx):
            raise ValueError(f"repeated index in form term {tok!r}")
        if degree is None:
            degree = len(idx)
        elif len(idx) != degree:
            raise ValueError("form terms have mixed degrees")
        terms[idx] = terms.get(idx, 0.0) + sign * coeff
    return AltForm.from_terms(degree, terms)


def format_form(form: AltForm, tol: float = 1e-12) -> str:
    parts = []
    for pos, idx in enumerate(multi_indices(form.degree)):
        c = form.coeffs[pos]
        if abs(c) <= tol:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        coeff = "" if abs(mag - 1.0) <= tol else f"{mag:g}*"
        parts.append(f"{sign}{coeff}{''.join(str(i + 1) for i in idx)}")
    return " ".join(parts) if parts else "0"


def _extract_tolerance_flags(argv: list[str]) -> tuple[list[str], dict]:
    """Pull '--tol-<name> <value>' pairs out of argv before argparse runs."""
    rest = []
    tols = {}
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg.startswith("--tol-"):
            if "=" in arg:
                flag, value = arg.split("=", 1)
            else:
                if i + 1 >= len(argv):
                    raise ValueError(f"{arg} needs a value")
                flag, value = arg, argv[i + 1]
                i += 1
            tols[flag[len("--tol-"):].replace("-", "_")] = float(value)
        else:
            rest.append(arg)
        i += 1
    return rest, tols


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="g2knot",
        description="Numerical checks of the Kaehler structure on the knot space of flat R^7.")
    sub = parser.add_subparsers(dest="command", required=True)

    algebra = sub.add_parser("algebra", help="one-shot algebra queries")
    alg_sub = algebra.add_subparsers(dest="algebra_command", required=True)

    p = alg_sub.add_parser("cross", help="vector product x * y")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)

    p = alg_sub.add_parser("octonion", help="octonion product (x, xr)(y, yr)")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--xr", type=float, default=0.0, help="real part of the first factor")
    p.add_argument("--yr", type=float, default=0.0, help="real part of the second factor")

    p = alg_sub.add_parser("decompose", help="split a 2-form into its 7 and 14 parts")
    p.add_argument("--form", required=True)

    p = alg_sub.add_parser("associative", help="test a 3-plane for associativity")
    p.add_argument("--u", required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--w", required=True)

    loop = sub.add_parser("loop", help="loop fixtures")
    loop_sub = loop.add_subparsers(dest="loop_command", required=True)

    p = loop_sub.add_parser("gen", help="generate a loop and write it as JSON")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--k", type=int, default=5, help="maximum Fourier mode")
    p.add_argument("--circle", action="store_true", help="emit the unit-circle fixture")
    p.add_argument("-o", "--out", default="-")

    p = loop_sub.add_parser("reparam", help="constant-speed reparametrization")
    p.add_argument("-i", "--input", default="-")
    p.add_argument("-o", "--out", default="-")

    ver = sub.add_parser("verify", help="run verification suites")
    ver.add_argument("suites", choices=sorted(verify.SUITES) + ["all"])
    ver.add_argument("--seed", type=int, default=7)
    ver.add_argument("--n", type=int, default=512)
    ver.add_argument("--h", type=float, default=1e-4)
    ver.add_argument("--loops", type=int, default=20)
    ver.add_argument("--fields", type=int, default=10)
    ver.add_argument("--ensemble", type=int, default=50,
                     help="instanton battery sample count")
    ver.add_argument("-o", "--out", default=None)
    ver.add_argument("--format", choices=["json", "csv"], default="json")

    rep = sub.add_parser("report", help="report utilities")
    rep_sub = rep.add_subparsers(dest="report_command", required=True)
    p = rep_sub.add_parser("summarize", help="human-readable digest of a report file")
    p.add_argument("-i", "--input", default="-")
    return parser


def _write_output(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _cmd_algebra(args) -> int:
    g2 = standard_g2()
    if args.algebra_command == "cross":
        out = cross(g2, parse_vector(args.x), parse_vector(args.y))
        print(format_vector(out))
    elif args.algebra_command == "octonion":
        prod = octonion_mul(Octonion(parse_vector(args.x), args.xr),
                            Octonion(parse_vector(args.y), args.yr), g2)
        print(f"imag: {format_vector(prod.imag)}")
        print(f"real: {prod.real:.12g}")
    elif args.algebra_command == "decompose":
        beta = parse_form(args.form)
        if beta.degree != 2:
            raise ValueError("decompose expects a 2-form")
        beta7, beta14 = two_form_decompose(g2, beta)
        print(f"beta7:  {format_form(beta7)}  (norm {beta7.norm():.12g})")
        print(f"beta14: {format_form(beta14)}  (norm {beta14.norm():.12g})")
    elif args.algebra_command == "associative":
        flag, calib = is_associative(g2, parse_vector(args.u),
                                     parse_vector(args.v), parse_vector(args.w))
        print(f"associative: {flag}")
        print(f"calibration: {calib:.12g}")
    return 0


def _cmd_loop(args) -> int:
    if args.loop_command == "gen":
        if args.circle:
            loop = circle_loop(args.n)
            spec = None
        else:
            rng = np.random.default_rng(args.seed)
            for _ in range(50):
                spec = verify.random_fourier_spec(rng, args.n, args.k)
                try:
                    loop = loop_from_fourier(spec)
                except G2KnotError:
                    continue
                if loop.speeds.min() / loop.speeds.mean() >= verify.SPEED_RATIO_FLOOR:
                    break
            else:
                raise ValueError("could not sample a well-conditioned loop")
        _write_output(args.out, loop_to_json(loop, spec))
    elif args.loop_command == "reparam":
        loop = loop_from_json(_read_input(args.input))
        _write_output(args.out, loop_to_json(unit_speed_reparam(loop)))
    return 0


def _cmd_verify(args, tolerances: dict) -> int:
    config = verify.VerifyConfig(
        seed=args.seed, n=args.n, h=args.h, loops=args.loops,
        fields=args.fields, instanton_samples=args.ensemble,
        tolerances=tolerances)
    reports = verify.run_suites([args.suites], config)
    for report in reports:
        status = "PASS" if report.passed else "FAIL"
        print(f"suite {report.suite}: {status}")
        for case in report.cases:
            mark = "skip" if case["skipped"] else ("pass" if case["pass"] else "FAIL")
            print(f"  [{mark}] {case['name']}: residual {case['residual']:.3e}"
                  f" (tolerance {case['tolerance']:.1e})")
    if args.out is not None:
        if args.format == "json":
            _write_output(args.out, verify.reports_to_json(reports))
        else:
            _write_output(args.out, "".join(r.convergence_csv() for r in reports))
    return 0 if all(r.passed for r in reports) else 1


def _cmd_report(args) -> int:
    doc = json.loads(_read_input(args.input))
    reports = doc if isinstance(doc, list) else [doc]
    for rep in reports:
        status = "PASS" if rep["pass"] else "FAIL"
        failing = [c["name"] for c in rep["cases"] if not c["pass"]]
        print(f"{rep['suite']}: {status} ({len(rep['cases'])} cases"
              + (f", failing: {', '.join(failing)}" if failing else "") + ")")
    return 0


def run(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        argv, tolerances = _extract_tolerance_flags(argv)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "algebra":
            return _cmd_algebra(args)
        if args.command == "loop":
            return _cmd_loop(args)
        if args.command == "verify":
            return _cmd_verify(args, tolerances)
        if args.command == "report":
            return _cmd_report(args)
    except (G2KnotError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
