"""Command line entry point: ``treecore <command> ...``.

Exit codes: 0 success, 1 validation failure or bad reference, 2 unreadable
input, 3 budget exceeded, 4 oracle violation.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field

from . import corecomplex as CC
from . import lineactions as LA
from . import minsubtree as MS
from . import oracle
from . import word as W
from .bass_serre import Cell, Splitting, SplittingError
from .product import BudgetExceeded

EXIT_OK, EXIT_INVALID, EXIT_PARSE, EXIT_BUDGET, EXIT_ORACLE = 0, 1, 2, 3, 4

SESSION_FIELDS = {"rank", "splittings", "assertions", "budgets"}
ASSERTION_FIELDS = {"jsj_fp_hypotheses"}
BUDGET_FIELDS = {"radius", "conj_rounds", "cap"}


class InputError(ValueError):
    """Raised for anything that should exit with code 2."""


@dataclass
class Session:
    rank: int
    splittings: dict
    assertions: dict = field(default_factory=dict)
    budgets: dict = field(default_factory=dict)

    def pair(self, l1: str, l2: str):
        for lab in (l1, l2):
            if lab not in self.splittings:
                raise InputError(f"no splitting labelled {lab!r}")
        return self.splittings[l1], self.splittings[l2]

    def budget(self, flag=None) -> CC.Budget:
        """--budget flag, then session budgets, then TREECORE_BUDGET, then defaults."""
        b = CC.Budget.default(self.rank)
        for k, v in self.budgets.items():
            setattr(b, k, int(v))
        if flag is not None:
            b.radius = flag
            if flag <= 0:
                b.conj_rounds = 0
        return b


def _reject_unknown(d: dict, allowed: set, where: str):
    extra = set(d) - allowed
    if extra:
        raise InputError(f"unknown fields in {where}: {sorted(extra)}")


def parse_session(data) -> Session:
    if not isinstance(data, dict):
        raise InputError("session must be a JSON object")
    _reject_unknown(data, SESSION_FIELDS, "session")
    rank = data.get("rank")
    if not isinstance(rank, int) or rank < 1:
        raise InputError("session rank must be a positive integer")
    specs = data.get("splittings")
    if not isinstance(specs, dict) or not specs:
        raise InputError("session needs a nonempty 'splittings' map")
    assertions = data.get("assertions", {})
    _reject_unknown(assertions, ASSERTION_FIELDS, "assertions")
    budgets = data.get("budgets", {})
    _reject_unknown(budgets, BUDGET_FIELDS, "budgets")
    out = {}
    for label, sd in specs.items():
        try:
            out[label] = Splitting.from_json(label, sd, rank)
        except SplittingError as exc:
            raise InputError(str(exc)) from None
    return Session(rank, out, dict(assertions), dict(budgets))


def load_session(path: str) -> Session:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    return parse_session(data)


def write_atomic(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".treecore-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
        if not text.endswith("\n"):
            fh.write("\n")
    os.replace(tmp, path)


def _validated(session: Session, labels) -> bool:
    ok = True
    for lab in labels:
        rep = session.splittings[lab].validate()
        if not rep.ok:
            for line in rep.lines():
                print(line, file=sys.stderr)
            ok = False
    return ok


# --- commands ------------------------------------------------------------------------

def cmd_validate(args) -> int:
    session = load_session(args.session)
    code = EXIT_OK
    for lab, spec in session.splittings.items():
        rep = spec.validate()
        for line in rep.lines():
            print(line)
        if not rep.ok:
            code = EXIT_INVALID
    return code


def _core_summary(core: CC.CoreComplex) -> dict:
    i = CC.intersection_number(core)
    return {
        "status": core.status,
        "i": i if isinstance(i, int) else list(i),
        "si1": core.si1,
        "si2": core.si2,
        "connected": core.connected if isinstance(core.connected, bool) else CC.UNKNOWN,
        "compatible": CC.is_compatible(core),
        "twice_light": len(core.twice_light),
    }


def cmd_core(args) -> int:
    session = load_session(args.session)
    s1, s2 = session.pair(args.t1, args.t2)
    if not _validated(session, (args.t1, args.t2)):
        return EXIT_INVALID
    jsj = bool(session.assertions.get("jsj_fp_hypotheses", False))
    try:
        core = CC.compute_core(s1, s2, session.budget(args.budget), jsj_fp=jsj)
    except BudgetExceeded as exc:
        print(f"BUDGET_EXCEEDED: {exc}", file=sys.stderr)
        if args.emit_json and exc.partial is not None:
            write_atomic(args.emit_json, json.dumps(
                {"schema": CC.SCHEMA, "status": "BUDGET_EXCEEDED",
                 "partial": CC._cellset_json(exc.partial)}, indent=2))
        return EXIT_BUDGET
    summary = _core_summary(core)
    for k, v in summary.items():
        print(f"{k}: {v}")
    if args.emit_json:
        write_atomic(args.emit_json, CC.dumps(core))
    if args.emit_dot:
        write_atomic(args.emit_dot, CC.to_dot(core))
    return EXIT_OK


def cmd_si(args) -> int:
    session = load_session(args.session)
    s1, s2 = session.pair(args.t1, args.t2)
    if not _validated(session, (args.t1, args.t2)):
        return EXIT_INVALID
    print(f"si1: {MS.strong_intersection(s1, s2)}")
    print(f"si2: {MS.strong_intersection(s2, s1)}")
    return EXIT_OK


def _edge(spec: Splitting, text: str) -> Cell:
    try:
        g = W.parse(text, spec.rank)
    except W.WordError as exc:
        raise ValueError(f"bad edge reference {text!r}: {exc}") from None
    return spec.cell("E", g)


def cmd_crossing(args) -> int:
    session = load_session(args.session)
    s1, s2 = session.pair(args.t1, args.t2)
    if not _validated(session, (args.t1, args.t2)):
        return EXIT_INVALID
    try:
        e1, e2 = _edge(s1, args.e1), _edge(s2, args.e2)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INVALID
    budget = session.budget(args.budget)
    try:
        core = CC.compute_core(s1, s2, budget)
    except BudgetExceeded as exc:
        print(f"BUDGET_EXCEEDED: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    verdict = CC.scott_crossing(s1, s2, e1, e2, budget, core=core)
    print(verdict)
    key = core.space.key(e1, e2)
    if verdict == CC.TRUE:
        certs = CC.certify_square(s1, s2, e1, e2, budget)
        if certs:
            print("certificate: " + " ".join(W.format_word(c.h) for c in certs))
    else:
        print(f"core status: {core.status}; square {CC.key_str(key)}")
    return EXIT_OK


def _matrix(text: str):
    if os.path.exists(text):
        with open(text) as fh:
            text = fh.read()
    data = json.loads(text)
    if isinstance(data, dict):
        _reject_unknown(data, {"matrix"}, "matrix input")
        data = data.get("matrix")
    if (not isinstance(data, list) or not all(isinstance(r, list) for r in data)
            or not all(isinstance(x, int) for r in data for x in r)):
        raise InputError("matrix must be a list of integer rows")
    return data


def cmd_linecore(args) -> int:
    try:
        rows = _matrix(args.matrix)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read matrix: {exc}") from None
    try:
        L = LA.LatticeHom.of(rows)
        res = LA.abelian_core_covolume(L)
    except LA.LineActionError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INVALID if exc.code in ("ZERO_ROW", "RANK_DEFICIENT") else EXIT_PARSE
    if res == LA.EMPTY:
        out = {"status": LA.EMPTY, "index": 0}
    else:
        out = {"status": LA.NONEMPTY, "index": res}
    print(json.dumps(out))
    return EXIT_OK


def cmd_crosscheck(args) -> int:
    session = load_session(args.session)
    s1, s2 = session.pair(args.t1, args.t2)
    if not _validated(session, (args.t1, args.t2)):
        return EXIT_INVALID
    if args.core:
        try:
            with open(args.core) as fh:
                core = CC.from_json(json.load(fh), s1, s2)
        except (OSError, ValueError, KeyError) as exc:
            raise InputError(f"cannot read core artifact: {exc}") from None
    else:
        jsj = bool(session.assertions.get("jsj_fp_hypotheses", False))
        try:
            core = CC.compute_core(s1, s2, session.budget(args.budget), jsj_fp=jsj)
        except BudgetExceeded as exc:
            print(f"BUDGET_EXCEEDED: {exc}", file=sys.stderr)
            return EXIT_BUDGET
    radius = args.radius if args.radius is not None else (6 if session.rank <= 2 else 4)
    report = oracle.crosscheck(core, s1, s2, radius)
    text = json.dumps(report.to_json(), indent=2)
    if args.emit_json:
        write_atomic(args.emit_json, text)
    for c in report.checks:
        print(f"{'ok  ' if c.ok else 'FAIL'} {c.name} {c.detail}".rstrip())
    return EXIT_OK if report.ok else EXIT_ORACLE


# --- parser ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="treecore",
                                description="Cores of products of Bass-Serre trees of free groups")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check every splitting in a session")
    v.add_argument("session")
    v.set_defaults(func=cmd_validate)

    def pair(sp):
        sp.add_argument("session")
        sp.add_argument("t1")
        sp.add_argument("t2")

    c = sub.add_parser("core", help="compute the core of T1 x T2")
    pair(c)
    c.add_argument("--budget", type=int, default=None, help="search radius for certificates")
    c.add_argument("--emit-json", default=None)
    c.add_argument("--emit-dot", default=None)
    c.set_defaults(func=cmd_core)

    s = sub.add_parser("si", help="strong intersection numbers")
    pair(s)
    s.set_defaults(func=cmd_si)

    x = sub.add_parser("crossing", help="does the edge orbit e1 cross e2")
    pair(x)
    x.add_argument("e1", help="coset word naming an edge of T1, 1 for the base edge")
    x.add_argument("e2", help="coset word naming an edge of T2")
    x.add_argument("--budget", type=int, default=None)
    x.set_defaults(func=cmd_crossing)

    lc = sub.add_parser("linecore", help="core of two line actions given by a 2 x n matrix")
    lc.add_argument("matrix", help="JSON matrix, inline or a file path")
    lc.set_defaults(func=cmd_linecore)

    o = sub.add_parser("crosscheck", help="compare a core with brute force")
    pair(o)
    o.add_argument("--core", default=None, help="core JSON to check instead of recomputing")
    o.add_argument("--radius", type=int, default=None)
    o.add_argument("--budget", type=int, default=None)
    o.add_argument("--emit-json", default=None)
    o.set_defaults(func=cmd_crosscheck)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
