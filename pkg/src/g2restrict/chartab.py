"""Character tables of finite groups and of their central covers.

A table for a cover ``m.G`` keeps the classes of the base group ``G`` and, for
each character, the value at one chosen pre-image of every class.

File format (line oriented, ``#`` starts a comment)::

    group <name> order <N> center <Z> cover <m> [complete|partial]
    class <name> length <L|?> order <k> [pow <p>=<class> ...]
    char <name> kind <complex|brauer:<l>> [faithful] values <v1> ... <vr>

``order`` and ``center`` refer to the base group.  Values use the exactnum
grammar and ``?`` marks an unknown value or length (partial tables only).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from .exactnum import Cyclotomic, NotRationalError, parse_cyclotomic

__all__ = [
    "ConjugacyClass",
    "Character",
    "CharacterTable",
    "Check",
    "ValidationReport",
    "TableError",
    "DataParseError",
    "MissingValueError",
    "PowerMapError",
    "parse_table",
    "load_table",
    "validate_table",
    "inner_product",
    "power_class",
]


class TableError(ValueError):
    pass


class DataParseError(TableError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)
        self.line = line
        self.source = source


class MissingValueError(TableError):
    pass


class PowerMapError(TableError):
    pass


@dataclass(frozen=True)
class ConjugacyClass:
    name: str
    length: int | None
    element_order: int
    power_map: Mapping[int, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Character:
    name: str
    values: Mapping[str, Cyclotomic]
    degree: int
    kind: str = "complex"
    faithful: bool | None = None

    @property
    def ell(self) -> int:
        """Characteristic of the character: 0 for complex, l for brauer:l."""
        if self.kind == "complex":
            return 0
        return int(self.kind.split(":", 1)[1])


@dataclass(frozen=True)
class CharacterTable:
    group_name: str
    order: int
    center_order: int
    cover_multiplier: int
    classes: tuple[ConjugacyClass, ...]
    characters: tuple[Character, ...]
    completeness: str = "complete"

    @property
    def is_complete(self) -> bool:
        return self.completeness == "complete"

    @property
    def identity_class(self) -> ConjugacyClass | None:
        return next((c for c in self.classes if c.element_order == 1), None)

    def cls(self, name: str) -> ConjugacyClass:
        for c in self.classes:
            if c.name == name:
                return c
        raise KeyError(f"{self.group_name} has no class {name!r}")

    def char(self, name: str) -> Character:
        for ch in self.characters:
            if ch.name == name:
                return ch
        raise KeyError(f"{self.group_name} has no character {name!r}")

    @property
    def class_names(self) -> list[str]:
        return [c.name for c in self.classes]


# ---------------------------------------------------------------------------
# parsing


def _kv(tokens: list[str], key: str, lineno: int, source: str | None) -> str:
    try:
        return tokens[tokens.index(key) + 1]
    except (ValueError, IndexError):
        raise DataParseError(f"missing '{key} <value>'", lineno, source) from None


def _int(tok: str, what: str, lineno: int, source: str | None, allow_unknown=False) -> int | None:
    if allow_unknown and tok == "?":
        return None
    try:
        v = int(tok)
    except ValueError:
        raise DataParseError(f"bad {what} {tok!r}", lineno, source) from None
    if v < 1:
        raise DataParseError(f"{what} must be positive, got {v}", lineno, source)
    return v


def _value(tok: str, lineno: int, source: str | None) -> Cyclotomic:
    try:
        return parse_cyclotomic(tok)
    except ValueError as exc:
        raise DataParseError(str(exc), lineno, source) from None


def parse_table(text: str, source: str | None = None) -> CharacterTable:
    header = None
    classes: list[ConjugacyClass] = []
    chars: list[Character] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        head = tok[0]
        if head == "group":
            if header is not None:
                raise DataParseError("duplicate group line", lineno, source)
            completeness = "complete"
            if tok[-1] in ("complete", "partial"):
                completeness = tok[-1]
            header = dict(
                group_name=tok[1] if len(tok) > 1 else "",
                order=_int(_kv(tok, "order", lineno, source), "order", lineno, source),
                center_order=_int(_kv(tok, "center", lineno, source), "center", lineno, source),
                cover_multiplier=_int(_kv(tok, "cover", lineno, source), "cover", lineno, source),
                completeness=completeness,
            )
        elif head == "class":
            if len(tok) < 2:
                raise DataParseError("class line needs a name", lineno, source)
            pm: dict[int, str] = {}
            if "pow" in tok:
                for item in tok[tok.index("pow") + 1:]:
                    p, _, target = item.partition("=")
                    if not target:
                        raise DataParseError(f"bad power map entry {item!r}", lineno, source)
                    pm[_int(p, "prime", lineno, source)] = target
            classes.append(ConjugacyClass(
                name=tok[1],
                length=_int(_kv(tok, "length", lineno, source), "length", lineno, source, allow_unknown=True),
                element_order=_int(_kv(tok, "order", lineno, source), "element order", lineno, source),
                power_map=pm,
            ))
        elif head == "char":
            if "values" not in tok:
                raise DataParseError("char line needs 'values'", lineno, source)
            kind = _kv(tok, "kind", lineno, source)
            if kind != "complex" and not (kind.startswith("brauer:") and kind[7:].isdigit()):
                raise DataParseError(f"bad character kind {kind!r}", lineno, source)
            vals = tok[tok.index("values") + 1:]
            if len(vals) != len(classes):
                raise DataParseError(
                    f"character {tok[1]} has {len(vals)} values for {len(classes)} classes", lineno, source)
            values = {c.name: _value(v, lineno, source) for c, v in zip(classes, vals) if v != "?"}
            ident = next((c.name for c in classes if c.element_order == 1), None)
            deg = values.get(ident) if ident else None
            if deg is None or not deg.is_integer() or deg.to_int() < 1:
                raise DataParseError(f"character {tok[1]} has no positive integer degree", lineno, source)
            chars.append(Character(
                name=tok[1], values=values, degree=deg.to_int(), kind=kind,
                faithful=True if "faithful" in tok[: tok.index("values")] else None,
            ))
        else:
            raise DataParseError(f"unknown directive {head!r}", lineno, source)
    if header is None:
        raise DataParseError("missing group line", None, source)
    if header["completeness"] == "complete":
        if any(c.length is None for c in classes):
            raise DataParseError("unknown class length in a complete table", None, source)
    return CharacterTable(classes=tuple(classes), characters=tuple(chars), **header)


def load_table(path: str | Path) -> CharacterTable:
    path = Path(path)
    return parse_table(path.read_text(encoding="utf-8"), source=path.name)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    subject: str
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]


def _sum_product(t: CharacterTable, a: Mapping[str, Cyclotomic], b: Mapping[str, Cyclotomic]) -> Cyclotomic:
    total = Cyclotomic(0)
    for c in t.classes:
        if c.name not in a or c.name not in b:
            raise MissingValueError(f"missing value at class {c.name}")
        total += c.length * a[c.name] * b[c.name].conj()
    return total


def validate_table(t: CharacterTable) -> ValidationReport:
    """Run every structural and orthogonality check that applies to ``t``."""
    checks: list[Check] = []
    names = t.class_names
    if len(set(names)) != len(names):
        checks.append(Check("class-names-unique", False, "duplicate class names"))

    ident = [c for c in t.classes if c.element_order == 1]
    if len(ident) != 1 or ident[0].length not in (1, None):
        checks.append(Check("identity-class", False, f"{len(ident)} classes of element order 1"))
    else:
        checks.append(Check("identity-class", ident[0].length == 1 or not t.is_complete,
                            ident[0].name))

    known = [c.length for c in t.classes if c.length is not None]
    total = sum(known)
    if t.is_complete:
        checks.append(Check("class-length-sum", total == t.order, f"sum {total}, order {t.order}"))
    else:
        checks.append(Check("class-length-sum", total <= t.order, f"known sum {total} <= order {t.order}"))
    bad = [c.name for c in t.classes if c.length is not None and t.order % c.length]
    checks.append(Check("length-divides-order", not bad, ", ".join(bad)))

    pm_bad = []
    for c in t.classes:
        for p, target in sorted(c.power_map.items()):
            if target not in names:
                pm_bad.append(f"{c.name}^{p}={target} (unknown class)")
                continue
            expect = c.element_order // math.gcd(p, c.element_order)
            if t.cls(target).element_order != expect:
                pm_bad.append(f"{c.name}^{p}={target} (order {t.cls(target).element_order}, expected {expect})")
    checks.append(Check("power-map-closure", not pm_bad, "; ".join(pm_bad)))

    full_order = t.order * t.cover_multiplier
    deg_bad = []
    for ch in t.characters:
        idn = ident[0].name if ident else None
        v = ch.values.get(idn) if idn else None
        if v is None or v != ch.degree or ch.degree < 1:
            deg_bad.append(f"{ch.name}: degree {ch.degree}, value at identity {v}")
        elif t.is_complete and ch.kind == "complex" and full_order % v.to_int():
            deg_bad.append(f"{ch.name}: degree {v} does not divide {full_order}")
    checks.append(Check("degrees", not deg_bad, "; ".join(deg_bad)))

    if t.is_complete:
        missing = [f"{ch.name}@{c}" for ch in t.characters for c in names if c not in ch.values]
        checks.append(Check("values-complete", not missing, ", ".join(missing[:5])))
        cx = [ch for ch in t.characters if ch.kind == "complex"]
        if not missing and total == t.order:
            orth_bad = []
            for i, a in enumerate(cx):
                for b in cx[i:]:
                    s = _sum_product(t, a.values, b.values)
                    want = t.order if a is b else 0
                    if s != want:
                        orth_bad.append(f"<{a.name},{b.name}> = {s}/{t.order}")
            checks.append(Check("row-orthogonality", not orth_bad, "; ".join(orth_bad)))
            if cx and len(cx) == len(t.classes):
                col_bad = []
                for c in t.classes:
                    s = sum((ch.values[c.name] * ch.values[c.name].conj() for ch in cx), Cyclotomic(0))
                    if s * c.length != t.order:
                        col_bad.append(f"{c.name}: {s}")
                checks.append(Check("column-orthogonality", not col_bad, "; ".join(col_bad)))
    return ValidationReport(t.group_name, tuple(checks))


# ---------------------------------------------------------------------------


def inner_product(t: CharacterTable, a: Character | Mapping[str, Cyclotomic],
                  b: Character | Mapping[str, Cyclotomic]) -> Fraction:
    """(1/|G|) sum over classes of length * a * conj(b), as an exact rational."""
    if not t.is_complete:
        raise TableError(f"inner product needs a complete table; {t.group_name} is partial")
    av = a.values if isinstance(a, Character) else a
    bv = b.values if isinstance(b, Character) else b
    s = _sum_product(t, av, bv)
    if not s.is_rational():
        raise NotRationalError(f"inner product {s}/{t.order} is not rational")
    return s.to_rational() / t.order


def power_class(t: CharacterTable, c: str, k: int) -> str:
    """Name of the class of g^k for g in class ``c``.

    Walks compositions of the stored prime power maps, so e.g. a 3-power of an
    element of order 5 is found through 2-powers (2^3 = 3 mod 5).
    """
    if k < 1:
        raise ValueError("power must be positive")
    start = t.cls(c)
    o = start.element_order
    k %= o
    if k == 0:
        return t.identity_class.name
    seen = {(start.name, 1 % o)}
    queue = deque(seen)
    while queue:
        name, e = queue.popleft()
        if e == k:
            return name
        cur = t.cls(name)
        for p, target in sorted(cur.power_map.items()):
            state = (target, e * p % o)
            if state not in seen:
                seen.add(state)
                queue.append(state)
    raise PowerMapError(f"power map incomplete: cannot reach the {k}-th power of class {c}")
