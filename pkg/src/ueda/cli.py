"""``ueda`` command line: atlas generation, classification, linearization, resolution.

Every command prints one JSON report ``{command, inputs, result, certificate}``
to stdout with sorted keys, so identical inputs give byte-identical output.
Exit status is 0 on success, 1 on a mathematical obstruction or failed
precondition, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction

from . import __version__
from .atlas import (
    atlas_to_json,
    default_zeta_bound,
    describe,
    dump_atlas,
    load_atlas,
    normal_bundle_class,
    perturbed_atlas,
    trivial_atlas,
    validate,
)
from .errors import DomainError, InputError, ObstructionError, ParseError, UedaError
from .linearize import estimate_constants_report, linearize
from .obstruction import classify, obstruction, system_from_atlas, upgrade
from .resolve import (
    contract_chain,
    cover_pullback,
    default_cover,
    ell_from_type,
    load_cover,
    resolve_cusp_full,
    self_intersections,
)
from .series import Scalar

log = logging.getLogger("ueda")


def _rational_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational like 3 or -1/2, got {text!r}") from None


def _radii_arg(text: str) -> tuple[Fraction, ...]:
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("expected a comma-separated list of rationals")
    out = tuple(_rational_arg(p.strip()) for p in parts)
    if any(r <= 0 for r in out):
        raise argparse.ArgumentTypeError("probe radii must be positive")
    return out


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {v}")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"arguments: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ueda", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"ueda {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    atlas = sub.add_parser("atlas", help="generate or validate atlas files")
    asub = atlas.add_subparsers(dest="action", required=True, parser_class=_Parser)
    gen = asub.add_parser("gen", help="write a model atlas")
    gen.add_argument("kind", choices=["trivial", "perturbed"])
    gen.add_argument("--order", type=_positive_int, default=1,
                     help="perturbed: insert f_{order+1} = class * zeta")
    gen.add_argument("--class", dest="cls", type=_rational_arg, default=Fraction(1),
                     help="real part of the inserted coefficient")
    gen.add_argument("--class-im", type=_rational_arg, default=Fraction(0),
                     help="imaginary part of the inserted coefficient")
    gen.add_argument("--n-w", type=_positive_int, default=8, help="fiber truncation order")
    gen.add_argument("--zeta-window", type=_positive_int, default=None,
                     help="Laurent window half-width N_zeta (default 10 N_w + 10)")
    gen.add_argument("-o", "--output", help="write the atlas JSON here")
    val = asub.add_parser("validate", help="check atlas invariants")
    val.add_argument("atlas")

    nb = sub.add_parser("normal-bundle", help="winding number and Pic^0 class")
    nb.add_argument("atlas")

    cl = sub.add_parser("classify", help="first nonvanishing Ueda class")
    cl.add_argument("atlas")
    cl.add_argument("--max-order", type=_positive_int, required=True)

    ob = sub.add_parser("obstruction", help="the n-th Ueda class")
    ob.add_argument("atlas")
    ob.add_argument("--order", type=_positive_int, required=True)

    li = sub.add_parser("linearize", help="build simultaneous defining functions")
    li.add_argument("atlas")
    li.add_argument("--order", type=_positive_int, required=True)
    li.add_argument("--ledger", help="also write the majorant ledger JSON here")
    li.add_argument("--probe-radii", type=_radii_arg, default=None,
                    help="comma-separated radii for the constant M (default: annulus radii)")

    rs = sub.add_parser("resolve", help="cusp resolution and 6:1 cover combinatorics")
    rs.add_argument("--cover", default="default", help="'default' or a cover config JSON file")
    rs.add_argument("--nbar", type=_positive_int, default=None, help="type of the elliptic pair")
    rs.add_argument("--c-self", type=int, default=0, help="self-intersection of the curve")
    return p


def _load(path):
    try:
        return load_atlas(path)
    except OSError as e:
        raise InputError(f"atlas {path}: {e.strerror}") from None


def _cmd_atlas(args):
    if args.action == "validate":
        a = _load(args.atlas)
        problems = validate(a)
        result = {"valid": not problems, "problems": problems, "atlas": describe(a)}
        if problems:
            raise _ReportError(InputError("atlas: " + "; ".join(problems)), result)
        return {"atlas": args.atlas}, result, None
    cls = Scalar(args.cls, args.class_im)
    N_zeta = args.zeta_window
    if N_zeta is not None and N_zeta < 3:
        raise InputError("--zeta-window: must be >= 3 so that zeta^3 fits")
    if args.kind == "trivial":
        a = trivial_atlas(args.n_w, N_zeta)
    else:
        a = perturbed_atlas(args.order, cls, args.n_w, N_zeta)
    inputs = {
        "kind": args.kind,
        "N_w": args.n_w,
        "N_zeta": a.N_zeta,
        "order": args.order if args.kind == "perturbed" else None,
        "class": cls.to_json() if args.kind == "perturbed" else None,
    }
    result = {"atlas": describe(a)}
    if args.output:
        dump_atlas(a, args.output)
        result["written"] = args.output
    else:
        result["atlas_json"] = atlas_to_json(a)
    return inputs, result, None


def _cmd_normal_bundle(args):
    a = _load(args.atlas)
    return {"atlas": args.atlas}, normal_bundle_class(a).to_json(), None


def _cmd_classify(args):
    a = _load(args.atlas)
    c = classify(a, args.max_order)
    result = c.to_json()
    result["summary"] = str(c)
    return {"atlas": args.atlas, "max_order": args.max_order}, result, None


def _cmd_obstruction(args):
    a = _load(args.atlas)
    n = args.order
    if n > a.N_w - 1:
        raise InputError(f"--order: {n} exceeds N_w - 1 = {a.N_w - 1}")
    s = system_from_atlas(a)
    while s.claimed_type < n:
        s = upgrade(s)  # raises when a lower class is nonzero
    report = obstruction(s)
    result = report.to_json()
    result["vanishes"] = report.vanishes
    return {"atlas": args.atlas, "order": n}, result, None


def _cmd_linearize(args):
    a = _load(args.atlas)
    inputs = {
        "atlas": args.atlas,
        "order": args.order,
        "probe_radii": [str(r) for r in args.probe_radii] if args.probe_radii else None,
    }
    constants = estimate_constants_report(a, args.probe_radii)
    r = linearize(a, args.order, args.probe_radii)
    cert = r.certificate()
    cert["constants"] = constants.to_json()
    if args.ledger:
        with open(args.ledger, "w", encoding="utf-8") as fh:
            json.dump(cert, fh, sort_keys=True, indent=1)
            fh.write("\n")
    return inputs, r.to_json(), cert


def _cmd_resolve(args):
    cfg = default_cover() if args.cover == "default" else load_cover(args.cover)
    res = resolve_cusp_full(args.c_self)
    cover = cover_pullback(res.lattice, cfg)
    contraction = contract_chain(cover.lattice, cover)
    result = {
        "resolution": res.to_json(),
        "self_intersections": self_intersections(res.lattice),
        "pi_star_C_squared": res.lattice.dot(res.divisor, res.divisor),
        "cover": cover.to_json(),
        "cover_self_intersections": self_intersections(cover.lattice),
        "contraction": contraction.to_json(),
    }
    if args.nbar is not None:
        ell = ell_from_type(args.nbar)
        result["ell"] = str(ell)
        result["ell_times_6"] = int(ell * 6)
    inputs = {"cover": args.cover, "nbar": args.nbar, "c_self": args.c_self}
    return inputs, result, {"cover_config": cfg.to_json()}


class _ReportError(Exception):
    def __init__(self, error: UedaError, result: dict):
        super().__init__(str(error))
        self.error, self.result = error, result


COMMANDS = {
    "atlas": _cmd_atlas,
    "normal-bundle": _cmd_normal_bundle,
    "classify": _cmd_classify,
    "obstruction": _cmd_obstruction,
    "linearize": _cmd_linearize,
    "resolve": _cmd_resolve,
}


def _emit(report: dict, out):
    json.dump(report, out, sort_keys=True, indent=1)
    out.write("\n")


def _error_payload(e: UedaError) -> dict:
    payload = {"type": type(e).__name__, "message": str(e)}
    report = getattr(e, "report", None)
    if report is not None and hasattr(report, "to_json"):
        payload["report"] = report.to_json()
    return payload


def run(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    command = None
    try:
        args = build_parser().parse_args(argv)
        command = args.command if args.command != "atlas" else f"atlas {args.action}"
        if args.verbose:
            logging.basicConfig(level=logging.DEBUG, format="%(name)s: %(message)s")
        inputs, result, cert = COMMANDS[args.command](args)
        _emit({"command": command, "inputs": inputs, "result": result, "certificate": cert}, out)
        return 0
    except _ReportError as e:
        code = 2 if isinstance(e.error, InputError) else 1
        _emit({"command": command, "result": e.result, "error": _error_payload(e.error)}, out)
        print(f"ueda: {e.error}", file=sys.stderr)
        return code
    except (InputError, ParseError) as e:
        _emit({"command": command, "error": _error_payload(e)}, out)
        print(f"ueda: {e}", file=sys.stderr)
        return 2
    except (DomainError, ObstructionError) as e:
        _emit({"command": command, "error": _error_payload(e)}, out)
        print(f"ueda: {e}", file=sys.stderr)
        return 1


def main(argv=None) -> None:
    sys.exit(run(argv))
