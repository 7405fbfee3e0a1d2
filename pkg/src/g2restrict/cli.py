"""Command-line front end: every verb prints a deterministic report.

Exit status: 0 on success, 1 when a check fails or a step disagrees with the
``--expect`` file, 2 on a data error.  File arguments that do not exist as
given are looked up in ``$G2RESTRICT_DATA`` and then in the shipped data.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import __version__
from .chartab import TableError, load_table, validate_table
from .criteria import (
    INCONCLUSIVE,
    InvalidNormError,
    Verdict,
    block_separation_witness,
    clifford_verdict,
    frobenius_irreducible,
)
from .degrees import (
    DATA_ENV,
    ExpressionError,
    InadmissibleError,
    brauer_degree_bounds,
    complex_degrees,
    d1,
    d2,
    data_path,
    ell_class,
    load_candidates,
    screen_rows,
    unique_gap_character,
    Ell,
)
from .exactnum import ConductorError, NotRationalError, format_rational, parse_cyclotomic
from .fusion import (
    NotACharacterError,
    decompose,
    enumerate_branches,
    enumerate_normal_subsets,
    load_fusion,
    restrict,
    restriction_norm,
    restriction_sum,
    validate_fusion,
)

SCHEMA = "g2restrict.report/1"
KEY_WIDTH = 14


class DataError(Exception):
    pass


@dataclass
class Step:
    id: str
    status: str
    fields: list[tuple[str, str]] = field(default_factory=list)


@dataclass
class RunReport:
    command: list[str]
    inputs: list[tuple[str, str]] = field(default_factory=list)
    steps: list[Step] = field(default_factory=list)
    summary: list[str] = field(default_factory=list)
    failed: bool = False

    def add(self, id: str, status: str, *fields: tuple[str, object]) -> Step:
        step = Step(id, status, [(k, _text(v)) for k, v in fields])
        self.steps.append(step)
        return step

    def render(self) -> str:
        lines = [_row("command", " ".join(self.command))]
        lines += [_row("input", f"{name} sha256:{digest}") for name, digest in self.inputs]
        for s in self.steps:
            lines.append(_row("step", f"{s.id} {s.status}"))
            lines += ["  " + _row(k, v, KEY_WIDTH - 2) for k, v in s.fields]
        lines += [_row("summary", line) for line in self.summary]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {
            "schema": SCHEMA,
            "command": self.command,
            "inputs": [{"file": n, "sha256": d} for n, d in self.inputs],
            "steps": [{"id": s.id, "status": s.status, "evidence": dict(s.fields)} for s in self.steps],
            "summary": self.summary,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _row(key: str, value: str, width: int = KEY_WIDTH) -> str:
    return f"{key.ljust(width - 1)} {value}".rstrip()


def _text(v: object) -> str:
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def _verdict_fields(v: Verdict) -> list[tuple[str, str]]:
    return [("rule", v.rule)] + list(v.evidence)


# ---------------------------------------------------------------------------
# files


def resolve(name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    found = data_path(p.name)
    if found.exists():
        return found
    raise DataError(f"no such file: {name} (also looked in ${DATA_ENV} and the shipped data)")


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _use(report: RunReport, name: str) -> Path:
    path = resolve(name)
    report.inputs.append((path.name, _digest(path)))
    return path


# ---------------------------------------------------------------------------
# verbs


def cmd_validate(a, r: RunReport) -> None:
    path = _use(r, a.file)
    if path.suffix == ".fus":
        parent = load_table(_use(r, a.parent)) if a.parent else None
        report = validate_fusion(load_fusion(path), parent)
    else:
        report = validate_table(load_table(path))
    for c in report.checks:
        r.add(c.name, "ok" if c.ok else "fail", *([("detail", c.detail)] if c.detail else []))
    r.failed = not report.ok
    r.summary.append(f"{report.subject}: {len(report.failures)} of {len(report.checks)} checks failed")


def _branches(f, choice: str):
    branches = enumerate_branches(f)
    if choice == "all":
        return list(enumerate(branches))
    i = int(choice)
    if not 0 <= i < len(branches):
        raise DataError(f"branch {i} out of range (0..{len(branches) - 1})")
    return [(i, branches[i])]


def cmd_norm(a, r: RunReport) -> None:
    f = load_fusion(_use(r, a.fusion))
    statuses = []
    for i, b in _branches(f, a.branch):
        total = restriction_sum(f, a.char, b)
        norm = restriction_norm(f, a.char, b)
        v = frobenius_irreducible(norm)
        r.add(f"branch{i}", v.status, ("fusion", b.describe(f)), ("sum", total),
              ("order", f.subgroup_order), *_verdict_fields(v))
        statuses.append(v.status)
    r.summary.append(f"{a.char} on {f.subgroup_name}: " + ", ".join(statuses))


def _parse_int_set(text: str | None) -> set[int] | None:
    if text is None:
        return None
    return {int(t) for t in text.split(",") if t}


def cmd_clifford(a, r: RunReport) -> None:
    f = load_fusion(_use(r, a.fusion))
    degree_v = f.character(a.char).values[f.identity_row.sub_class][0]
    if not degree_v.is_integer():
        raise DataError(f"{a.char} has no integer degree")
    degree = degree_v.to_int()
    thetas = _parse_int_set(a.theta)
    (_, b), = _branches(f, a.branch)
    subsets = enumerate_normal_subsets(f, a.char, a.normal_order, a.max_elt_order, b)
    integral = 0
    for i, s in enumerate(subsets):
        fields = [("classes", " ".join(s.classes)), ("norm", s.norm)]
        if not s.is_integral:
            r.add(f"subset{i}", "non-integral", *fields)
            continue
        integral += 1
        v = clifford_verdict(s.norm.numerator, degree, thetas)
        r.add(f"subset{i}", "integral", *fields, *_verdict_fields(v))
    r.summary.append(f"subsets of order {a.normal_order}: {len(subsets)}, with integral norm: {integral}")


def cmd_screen(a, r: RunReport) -> None:
    if a.maximals:
        cands = load_candidates(a.family, _use(r, a.maximals))
    else:
        cands = load_candidates(a.family, q=a.q)
        _use(r, str(data_path(cands.source)))
    rows = screen_rows(a.family, a.q, a.ell, cands)
    for row in rows:
        c = row.candidate
        rel = ">=" if row.survives else "<"
        r.add(f"candidate:{c.label}", "survives" if row.survives else "excluded",
              ("order", c.order), ("bound", row.bound), ("relation", f"{c.order} {rel} {row.bound}"))
    survivors = [row.candidate.label for row in rows if row.survives]
    r.summary.append(f"survivors ({len(survivors)}): " + ", ".join(survivors))


def cmd_degrees(a, r: RunReport) -> None:
    cls = ell_class(a.ell, a.q)
    if cls in (Ell.TWO, Ell.THREE):
        for name, dv in brauer_degree_bounds(a.q, cls):
            r.add(f"degree:{name}", str(dv.value), ("kind", dv.kind))
    else:
        for name, deg in complex_degrees(a.q):
            r.add(f"degree:{name}", str(deg), ("kind", "exact"))
    r.add("d1", str(d1(a.q, cls)))
    v2 = d2(a.q, cls)
    r.add("d2", str(v2.value), ("kind", v2.kind))
    name, deg = unique_gap_character(a.q, cls)
    r.add("psi", str(deg), ("character", name))
    r.summary.append(f"q={a.q} l={a.ell}: d1={d1(a.q, cls)} d2 {v2}")


def cmd_blocktest(a, r: RunReport) -> None:
    v = block_separation_witness(a.deg_rho, parse_cyclotomic(a.val_rho), a.deg_alpha,
                                 parse_cyclotomic(a.val_alpha), a.class_length, a.ell)
    r.add("witness", v.status, *_verdict_fields(v))
    r.summary.append("different blocks" if v.status != INCONCLUSIVE else "undecided")


def cmd_decompose(a, r: RunReport) -> None:
    f = load_fusion(_use(r, a.fusion))
    table = load_table(_use(r, a.table))
    (_, b), = _branches(f, a.branch)
    if a.parent:
        parent = load_table(_use(r, a.parent))
        values = restrict(f, parent.char(a.char), b)
    else:
        cv = f.character(a.char)
        values = {}
        for row in f.rows:
            alts = cv.values[row.sub_class]
            values[row.sub_class] = alts[b.index(row)] if len(alts) > 1 else alts[0]
    try:
        mult = decompose(values, table)
    except NotACharacterError as exc:
        r.add("decompose", "not-a-character", ("reason", str(exc)))
        r.failed = True
        r.summary.append(f"{a.char} restricted to {table.group_name} is not a character")
        return
    shown = " + ".join(f"{m}*{n}" if m > 1 else n for n, m in mult.items() if m) or "0"
    r.add("decompose", "character", *[(n, m) for n, m in mult.items()])
    r.summary.append(f"{a.char} restricted to {table.group_name} = {shown}")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="g2restrict", description="Exact checks of irreducible restrictions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the report as JSON")
    common.add_argument("--expect", help="file of '<step id> <status>' lines to compare against")
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("validate", parents=[common], help="check a table or fusion file")
    s.add_argument("file")
    s.add_argument("--parent", help="parent table to check fusion targets against")
    s.set_defaults(run=cmd_validate)

    s = sub.add_parser("norm", parents=[common], help="norm of a restricted character per branch")
    s.add_argument("fusion")
    s.add_argument("char")
    s.add_argument("--branch", default="all")
    s.set_defaults(run=cmd_norm)

    s = sub.add_parser("clifford", parents=[common], help="normal-subgroup norms and Clifford solutions")
    s.add_argument("fusion")
    s.add_argument("char")
    s.add_argument("--normal-order", type=int, required=True)
    s.add_argument("--max-elt-order", type=int, required=True)
    s.add_argument("--theta", help="allowed degrees of the conjugates, comma separated")
    s.add_argument("--branch", default="0")
    s.set_defaults(run=cmd_clifford)

    s = sub.add_parser("screen", parents=[common], help="maximal subgroups passing the order bound")
    s.add_argument("--family", choices=["g2", "sz", "ree"], required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--ell", default="0")
    s.add_argument("--maximals", help="candidate list to use instead of the shipped one")
    s.set_defaults(run=cmd_screen)

    s = sub.add_parser("degrees", parents=[common], help="degree catalog, d1, d2 and psi")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--ell", default="0")
    s.set_defaults(run=cmd_degrees)

    s = sub.add_parser("blocktest", parents=[common], help="central-character block separation")
    s.add_argument("--deg-rho", type=int, required=True)
    s.add_argument("--val-rho", required=True)
    s.add_argument("--deg-alpha", type=int, required=True)
    s.add_argument("--val-alpha", required=True)
    s.add_argument("--class-length", type=int, required=True)
    s.add_argument("--ell", type=int, required=True)
    s.set_defaults(run=cmd_blocktest)

    s = sub.add_parser("decompose", parents=[common], help="decompose a restriction into irreducibles")
    s.add_argument("fusion")
    s.add_argument("char")
    s.add_argument("table", help="complete table of the subgroup")
    s.add_argument("--parent", help="take the character from this parent table instead of the fusion file")
    s.add_argument("--branch", default="0")
    s.set_defaults(run=cmd_decompose)
    return p


_FILE_ARGS = ("file", "fusion", "table", "parent", "maximals")


def _echo(argv: Sequence[str], args) -> list[str]:
    files = {getattr(args, k) for k in _FILE_ARGS if getattr(args, k, None)}
    out = ["g2restrict"]
    for tok in argv:
        out.append(Path(tok).name if tok in files else tok)
    return out


def _read_expect(path: Path) -> dict[str, str]:
    want = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise DataError(f"{path.name}:{lineno}: expected '<step id> <status>'")
        want[parts[0]] = parts[1]
    return want


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    report = RunReport(_echo(argv, args))
    try:
        args.run(args, report)
        mismatches = []
        if args.expect:
            want = _read_expect(resolve(args.expect))
            got = {s.id: s.status for s in report.steps}
            for sid, status in want.items():
                if got.get(sid) != status:
                    mismatches.append(f"{sid}: expected {status}, got {got.get(sid, 'missing')}")
            report.summary += [f"MISMATCH {m}" for m in mismatches]
            if not mismatches:
                report.summary.append(f"expectations met ({len(want)})")
    except (DataError, TableError, ExpressionError, InadmissibleError, NotRationalError,
            ConductorError, InvalidNormError, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        print(f"g2restrict: error: {msg}", file=sys.stderr)
        return 2
    sys.stdout.write(report.to_json() if args.json else report.render())
    return 1 if report.failed or mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
