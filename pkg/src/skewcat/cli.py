"""``skewcat`` command-line front end.

Exit codes: 0 success, 1 verification failure (a witness is printed),
2 input error (the message carries a ``$``-rooted JSON path).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import contextmanager

from . import io
from .acceptance import run_all
from .algebra import (
    check_useful_lemma,
    enumerate_proper_homs_to_2,
    find_violation,
    is_left_handed,
    is_normal,
    is_right_handed,
    is_strongly_distributive,
    is_symmetric,
    validate,
)
from .constructions import check_second_decomposition
from .duality import dual_bundle, psi, represent, star_of_bundle, transport_tables
from .errors import LawViolation, PreconditionUnmet, SizeOverflow, SkewcatError, TableError
from .order import FiniteDistLattice, downset_lattice, hasse_dot, natural_order_poset, spectrum, unit_lattice, unit_poset

COMMANDS = ("check", "dualize", "sections", "roundtrip", "spectrum", "enumerate", "export-dot", "selftest")
INPUT_KINDS = {
    "check": ("algebra",),
    "dualize": ("algebra",),
    "sections": ("bundle",),
    "roundtrip": ("algebra", "bundle"),
    "spectrum": ("algebra", "poset"),
    "enumerate": ("algebra",),
    "export-dot": ("algebra", "bundle", "poset"),
}


class VerificationFailed(SkewcatError):
    pass


class Report:
    def __init__(self, command: str):
        self.command = command
        self.lines: list[str] = []
        self.checks: dict[str, bool] = {}
        self.document = None
        self.dot: str | None = None

    def say(self, text: str):
        self.lines.append(text)

    def check(self, name: str, ok: bool, witness=None):
        self.checks[name] = bool(ok)
        self.say(f"{name}: {'true' if ok else 'false'}" + ("" if ok or witness is None else f" witness={list(witness)}"))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="skewcat", description="Finite duality between LH-SD skew lattices and bundles over posets.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", metavar="PATH", help="input JSON document ('-' for stdin)")
    p.add_argument("--output", metavar="PATH", help="write the produced document here")
    p.add_argument("--seed", type=int, default=None, help="seed for randomized suites (default 42)")
    p.add_argument("--max-size", type=int, default=None, help="size cap for tables and enumerations")
    p.add_argument("--format", choices=("json", "text", "dot"), default="text")
    return p


@contextmanager
def _cap(value):
    old = os.environ.get("SKEWCAT_MAX_SIZE")
    if value is not None:
        os.environ["SKEWCAT_MAX_SIZE"] = str(value)
    try:
        yield
    finally:
        if value is not None:
            if old is None:
                os.environ.pop("SKEWCAT_MAX_SIZE", None)
            else:
                os.environ["SKEWCAT_MAX_SIZE"] = old


def _load(args):
    if args.input is None:
        raise io.InputError("$", f"{args.command} needs --input")
    if args.input == "-":
        try:
            obj = json.loads(sys.stdin.read())
        except json.JSONDecodeError as exc:
            raise io.InputError("$", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    else:
        obj = io.read_json(args.input)
    kind = io.kind_of(obj)
    if kind not in INPUT_KINDS[args.command]:
        raise io.InputError("$", f"{args.command} expects {' or '.join(INPUT_KINDS[args.command])}, got {kind}")
    return io.load_any(obj)


def _validated(S, report: Report):
    err = find_violation(S)
    if err is not None:
        report.check("skew lattice axioms", False, err.witness)
        raise err
    validate(S)
    report.check("skew lattice axioms", True)
    return S


# -- commands ---------------------------------------------------------------

def cmd_check(args, report):
    _, S = _load(args)
    _validated(S, report)
    report.say(f"size: {S.n}")
    required = [
        ("left-handed", is_left_handed(S)),
        ("strongly distributive", is_strongly_distributive(S)),
        ("normal", is_normal(S)),
        ("symmetric", is_symmetric(S)),
        ("second decomposition", check_second_decomposition(S)),
    ]
    for name, v in required:
        report.check(name, v.holds, v.witness)
    rh = is_right_handed(S)
    report.say(f"right-handed: {'true' if rh.holds else 'false'}")
    if all(v.holds for _, v in required[:2]):
        v = check_useful_lemma(S)
        report.check("join/meet lemma", v.holds, v.witness)
    if not all(report.checks.values()):
        failed = [k for k, ok in report.checks.items() if not ok]
        raise VerificationFailed(f"failed: {', '.join(failed)}")


def cmd_dualize(args, report):
    _, S = _load(args)
    _validated(S, report)
    D = dual_bundle(S)
    report.say(f"base points: {D.bundle.m}")
    report.say(f"stalks: {list(D.bundle.stalks)}")
    report.document = D.to_json()


def cmd_sections(args, report):
    _, B = _load(args)
    SA = star_of_bundle(B)
    report.say(f"sections: {SA.algebra.n}")
    report.document = SA.algebra.to_json()


def cmd_roundtrip(args, report):
    kind, obj = _load(args)
    if kind == "algebra":
        S = _validated(obj, report)
        rep = represent(S)
        meet, join = transport_tables(rep.phi)
        T = rep.sections.algebra
        same = bool((meet == T.meet).all() and (join == T.join).all())
        report.check("phi is an isomorphism", same)
        report.say(f"phi: {list(rep.phi.map)}")
        report.document = {"phi": list(rep.phi.map), "dual": rep.dual.to_json()}
        if not same:
            raise VerificationFailed("tables differ after transport along phi")
    else:
        iso = psi(obj)
        report.check("psi is an isomorphism", True)
        report.say(f"base map: {list(iso.base_map.map)}")
        report.say(f"stalk maps: {[list(r) for r in iso.stalk_maps]}")
        report.document = {"base_map": list(iso.base_map.map), "stalk_maps": [list(r) for r in iso.stalk_maps]}


def cmd_spectrum(args, report):
    kind, obj = _load(args)
    if kind == "poset":
        D, masks = downset_lattice(obj)
        report.say(f"downsets: {D.n}")
        report.check("unit of the poset is an order isomorphism", unit_poset(obj).is_order_isomorphism())
        report.document = D.to_json()
        return
    _validated(obj, report)
    try:
        D = FiniteDistLattice(obj.meet, obj.join, obj.zero)
    except LawViolation as err:
        report.check("distributive lattice", False, err.witness)
        raise
    report.check("distributive lattice", True)
    X, filters = spectrum(D)
    alpha = unit_lattice(D)
    report.check("unit of the lattice is an isomorphism", alpha.is_injective() and alpha.is_surjective())
    for i, p in enumerate(filters):
        report.say(f"prime filter {i}: {sorted(p.members)}")
    report.document = X.to_json()


def cmd_enumerate(args, report):
    _, S = _load(args)
    _validated(S, report)
    homs = enumerate_proper_homs_to_2(S)
    for h in homs:
        report.say(f"hom: {list(h.map)}")
    report.say(f"count: {len(homs)}")
    report.document = {"homs": [h.to_json() for h in homs]}


def cmd_export_dot(args, report):
    kind, obj = _load(args)
    if kind == "poset":
        report.dot = hasse_dot(obj)
    elif kind == "bundle":
        report.dot = hasse_dot(obj.base, [f"{x} | {k}" for x, k in enumerate(obj.stalks)], "bundle")
    else:
        _validated(obj, report)
        report.dot = hasse_dot(natural_order_poset(obj), None, "natural_order")


def cmd_selftest(args, report):
    seed = args.seed
    if args.input is not None:
        cfg = io.config_from_json(io.read_json(args.input))
        seed = cfg.seed if seed is None else seed
    seed = 42 if seed is None else seed
    outcomes = run_all(seed)
    for o in outcomes:
        report.check(f"criterion {o.number}", o.passed)
        report.lines[-1] = o.line()
    report.document = {"seed": seed, "criteria": [o.to_json() for o in outcomes]}
    if not all(o.passed for o in outcomes):
        raise VerificationFailed("selftest failed")


HANDLERS = {
    "check": cmd_check,
    "dualize": cmd_dualize,
    "sections": cmd_sections,
    "roundtrip": cmd_roundtrip,
    "spectrum": cmd_spectrum,
    "enumerate": cmd_enumerate,
    "export-dot": cmd_export_dot,
    "selftest": cmd_selftest,
}


def _emit(args, report: Report, status: str, code: int, out):
    payload = None
    if report.dot is not None:
        payload = report.dot
    elif report.document is not None:
        payload = io.dumps(report.document)
    if payload is not None and args.output:
        with open(args.output, "w") as fh:
            fh.write(payload + ("\n" if not payload.endswith("\n") else ""))
        report.say(f"wrote: {args.output}")
    for line in report.lines:
        print(line, file=out)
    if payload is not None and not args.output:
        print(payload.rstrip("\n"), file=out)
    print(f"status: {status}", file=out)
    if args.format == "json":
        summary = {"command": args.command, "status": status, "exit_code": code, "checks": report.checks}
        if report.document is not None:
            summary["document"] = report.document
        print(io.dumps(summary), file=out)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    report = Report(args.command)
    out = sys.stdout
    try:
        with _cap(args.max_size):
            HANDLERS[args.command](args, report)
    except (io.InputError, TableError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        report.say(f"error: {exc}")
        _emit(args, report, "input-error", 2, out)
        return 2
    except LawViolation as exc:
        report.say(f"violation: {exc}")
        report.say(f"witness: {list(exc.witness)}")
        report.document = None
        _emit(args, report, "fail", 1, out)
        return 1
    except (VerificationFailed, PreconditionUnmet, SizeOverflow, SkewcatError) as exc:
        report.say(f"failure: {exc}")
        if args.command != "selftest":
            report.document = None
        _emit(args, report, "fail", 1, out)
        return 1
    _emit(args, report, "ok", 0, out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
