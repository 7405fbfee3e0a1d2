"""Class fusion of a subgroup H into a parent group, and restricted class functions.

File format (line oriented, ``#`` starts a comment)::

    fusion <H> order <|H|> into <parent> cover <m>
    row <class> length <L> order <k>[,<k>...] -> <targets> [link <id>] [via <name>] [classes <c|?>]
    values <char> [faithful] <v1> ... <vr>

``targets`` is either a single class, ``4A|4B`` (the fusion is one of the
alternatives; rows sharing a ``link`` id choose the same index) or ``3A,3B``
(the row lies in the union of the listed classes, which parent values must
agree on).  A value may be ``-1|3``: one value per alternative.  ``via`` records the name of the parent class in another source,
and ``classes`` the number of subgroup classes merged into the row (default 1,
``?`` when unknown).

When ``cover`` is m > 1 the values are taken at one chosen pre-image of each
class, and norms are divided by the base order |H|.  That is only sound for a
character on which the centre acts by scalars, so such characters must be
flagged ``faithful``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .chartab import (
    Character,
    CharacterTable,
    Check,
    DataParseError,
    MissingValueError,
    TableError,
    ValidationReport,
    _int,
    _value,
)
from .exactnum import Cyclotomic, NotRationalError, as_cyclotomic, coordinates

__all__ = [
    "FusionRow",
    "CharValues",
    "FusionDataset",
    "BranchAssignment",
    "NormalSubset",
    "FusionError",
    "CoverError",
    "NotACharacterError",
    "parse_fusion",
    "load_fusion",
    "validate_fusion",
    "enumerate_branches",
    "restriction_sum",
    "restriction_norm",
    "normal_part_norm",
    "enumerate_normal_subsets",
    "restrict",
    "decompose",
    "constituent_search",
    "TRIVIAL",
]

TRIVIAL = "trivial"


class FusionError(TableError):
    pass


class CoverError(FusionError):
    """A norm was requested on a cover for a character not known to be faithful."""


class NotACharacterError(FusionError):
    pass


@dataclass(frozen=True)
class FusionRow:
    sub_class: str
    length: int
    element_orders: tuple[int, ...]
    targets: tuple[str, ...]
    link_id: str | None = None
    aggregate: bool = False
    via: str | None = None
    merged: int | None = 1

    @property
    def element_order(self) -> int:
        return max(self.element_orders)

    @property
    def ambiguous(self) -> bool:
        return len(self.targets) > 1 and not self.aggregate

    def chosen(self, index: int) -> tuple[str, ...]:
        """Parent classes met by this row under alternative ``index``."""
        if self.aggregate:
            return self.targets
        return (self.targets[index if self.ambiguous else 0],)


@dataclass(frozen=True)
class CharValues:
    name: str
    values: Mapping[str, tuple[Cyclotomic, ...]]
    faithful: bool = False


@dataclass(frozen=True)
class FusionDataset:
    subgroup_name: str
    subgroup_order: int
    parent: str
    cover_multiplier: int
    rows: tuple[FusionRow, ...]
    char_values: Mapping[str, CharValues] = field(default_factory=dict)

    def row(self, name: str) -> FusionRow:
        for r in self.rows:
            if r.sub_class == name:
                return r
        raise KeyError(f"{self.subgroup_name} has no class {name!r}")

    @property
    def class_names(self) -> list[str]:
        return [r.sub_class for r in self.rows]

    @property
    def identity_row(self) -> FusionRow:
        for r in self.rows:
            if r.element_orders == (1,):
                return r
        raise FusionError(f"{self.subgroup_name} has no identity class")

    def character(self, name: str) -> CharValues:
        if name in self.char_values:
            return self.char_values[name]
        if name == TRIVIAL:
            one = (Cyclotomic(1),)
            return CharValues(TRIVIAL, {r.sub_class: one for r in self.rows})
        raise KeyError(f"{self.subgroup_name} has no values for character {name!r}")


@dataclass(frozen=True)
class BranchAssignment:
    """Chosen alternative per ambiguity group (a link id, or an unlinked row name)."""

    choices: tuple[tuple[str, int], ...] = ()

    def index(self, row: FusionRow) -> int:
        if not row.ambiguous:
            return 0
        key = row.link_id or row.sub_class
        for k, i in self.choices:
            if k == key:
                return i
        raise KeyError(f"branch does not choose for {key!r}")

    def describe(self, f: FusionDataset) -> str:
        parts = [f"{r.sub_class}->{r.chosen(self.index(r))[0]}" for r in f.rows if r.ambiguous]
        return ", ".join(parts) if parts else "unique"


# ---------------------------------------------------------------------------
# parsing


def _orders(tok: str, lineno: int, source: str | None) -> tuple[int, ...]:
    return tuple(sorted({_int(t, "element order", lineno, source) for t in tok.split(",")}))


def parse_fusion(text: str, source: str | None = None) -> FusionDataset:
    header = None
    rows: list[FusionRow] = []
    raw_values: list[tuple[int, str, bool, list[str]]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        tokens = line.split("#", 1)[0].split()
        if not tokens:
            continue
        kind = tokens[0]
        if kind == "fusion":
            if header is not None:
                raise DataParseError("duplicate fusion header", lineno, source)
            if len(tokens) != 8 or tokens[2] != "order" or tokens[4] != "into" or tokens[6] != "cover":
                raise DataParseError("expected 'fusion <H> order <n> into <G> cover <m>'", lineno, source)
            header = (tokens[1], _int(tokens[3], "order", lineno, source), tokens[5],
                      _int(tokens[7], "cover", lineno, source))
        elif kind == "row":
            rows.append(_parse_row(tokens, lineno, source))
        elif kind == "values":
            if len(tokens) < 3:
                raise DataParseError("expected 'values <char> <v1> ...'", lineno, source)
            faithful = tokens[2] == "faithful"
            raw_values.append((lineno, tokens[1], faithful, tokens[3 if faithful else 2:]))
        else:
            raise DataParseError(f"unknown record {kind!r}", lineno, source)
    if header is None:
        raise DataParseError("missing fusion header", None, source)
    if not rows:
        raise DataParseError("no rows", None, source)

    names = [r.sub_class for r in rows]
    char_values: dict[str, CharValues] = {}
    for lineno, name, faithful, toks in raw_values:
        if name in char_values:
            raise DataParseError(f"duplicate values for {name!r}", lineno, source)
        if len(toks) != len(rows):
            raise DataParseError(f"{name}: {len(toks)} values for {len(rows)} rows", lineno, source)
        vals = {}
        for row, tok in zip(rows, toks):
            alts = tuple(_value(t, lineno, source) for t in tok.split("|"))
            if len(alts) > 1 and len(alts) != len(row.targets):
                raise DataParseError(f"{name}: {len(alts)} alternatives at {row.sub_class}", lineno, source)
            vals[row.sub_class] = alts
        char_values[name] = CharValues(name, vals, faithful)
    if len(set(names)) != len(names):
        raise DataParseError("duplicate class names", None, source)
    sub, order, parent, cover = header
    return FusionDataset(sub, order, parent, cover, tuple(rows), char_values)


def _parse_row(tokens: list[str], lineno: int, source: str | None) -> FusionRow:
    try:
        name = tokens[1]
        if tokens[2] != "length" or tokens[4] != "order" or tokens[6] != "->":
            raise IndexError
        length = _int(tokens[3], "length", lineno, source)
        orders = _orders(tokens[5], lineno, source)
        target_tok = tokens[7]
    except IndexError:
        raise DataParseError("expected 'row <c> length <L> order <k> -> <targets>'", lineno, source) from None
    if "|" in target_tok and "," in target_tok:
        raise DataParseError("targets mix '|' and ','", lineno, source)
    aggregate = "," in target_tok
    targets = tuple(target_tok.split("," if aggregate else "|"))
    if not all(targets):
        raise DataParseError(f"empty target in {target_tok!r}", lineno, source)
    opts = {}
    rest = tokens[8:]
    if len(rest) % 2:
        raise DataParseError("dangling option", lineno, source)
    for key, val in zip(rest[::2], rest[1::2]):
        if key not in ("link", "via", "classes") or key in opts:
            raise DataParseError(f"bad option {key!r}", lineno, source)
        opts[key] = val
    if "link" in opts and len(targets) < 2:
        raise DataParseError("link on an unambiguous row", lineno, source)
    merged = _int(opts.get("classes", "1"), "class count", lineno, source, allow_unknown=True)
    return FusionRow(name, length, orders, targets, opts.get("link"), aggregate, opts.get("via"), merged)


def load_fusion(path: str | Path) -> FusionDataset:
    path = Path(path)
    return parse_fusion(path.read_text(encoding="utf-8"), source=path.name)


# ---------------------------------------------------------------------------
# validation


def validate_fusion(f: FusionDataset, parent: CharacterTable | None = None) -> ValidationReport:
    checks: list[Check] = []
    total = sum(r.length for r in f.rows)
    checks.append(Check("length-sum", total == f.subgroup_order,
                        f"sum of lengths {total}, subgroup order {f.subgroup_order}"))
    bad = [r.sub_class for r in f.rows if r.merged == 1 and f.subgroup_order % r.length]
    checks.append(Check("length-divides-order", not bad, ", ".join(bad)))
    ids = [r for r in f.rows if r.element_orders == (1,)]
    checks.append(Check("identity-class", len(ids) == 1 and ids[0].length == 1,
                        f"{len(ids)} rows of element order 1"))

    link_sizes: dict[str, set[int]] = {}
    for r in f.rows:
        if r.link_id:
            link_sizes.setdefault(r.link_id, set()).add(len(r.targets))
    bad = [k for k, v in sorted(link_sizes.items()) if len(v) > 1]
    checks.append(Check("link-sizes", not bad, ", ".join(bad)))

    bad = []
    for cv in f.char_values.values():
        for r in f.rows:
            alts = cv.values.get(r.sub_class)
            if alts is None:
                bad.append(f"{cv.name}@{r.sub_class} missing")
            elif len(alts) > 1 and not r.ambiguous:
                bad.append(f"{cv.name}@{r.sub_class} has alternatives on an unambiguous row")
    checks.append(Check("values-cover-rows", not bad, "; ".join(bad)))

    if parent is not None:
        bad = []
        parent_names = set(parent.class_names)
        for r in f.rows:
            for t in r.targets:
                if t not in parent_names:
                    bad.append(f"{r.sub_class}->{t} unknown")
                elif parent.cls(t).element_order not in r.element_orders:
                    bad.append(f"{r.sub_class}->{t} order {parent.cls(t).element_order}")
        checks.append(Check("targets-match-parent", not bad, "; ".join(bad)))
    return ValidationReport(f"{f.subgroup_name} -> {f.parent}", tuple(checks))


# ---------------------------------------------------------------------------
# branches and norms


def enumerate_branches(f: FusionDataset) -> list[BranchAssignment]:
    groups: dict[str, int] = {}
    for r in f.rows:
        if r.ambiguous:
            groups.setdefault(r.link_id or r.sub_class, len(r.targets))
    keys = list(groups)
    return [BranchAssignment(tuple(zip(keys, combo)))
            for combo in itertools.product(*(range(groups[k]) for k in keys))]


def _value_at(f: FusionDataset, cv: CharValues, row: FusionRow, b: BranchAssignment | None) -> Cyclotomic:
    alts = cv.values[row.sub_class]
    if len(alts) == 1:
        return alts[0]
    if b is None:
        raise FusionError(f"{row.sub_class} is ambiguous; a branch is required")
    return alts[b.index(row)]


def _checked_character(f: FusionDataset, chi: str) -> CharValues:
    cv = f.character(chi)
    if f.cover_multiplier > 1 and not cv.faithful and chi != TRIVIAL:
        raise CoverError(f"{chi} is not flagged faithful on {f.cover_multiplier}.{f.parent}; "
                         "values at chosen pre-images do not give its norm")
    return cv


def _weighted_sum(f: FusionDataset, cv: CharValues, rows: Iterable[FusionRow],
                  b: BranchAssignment | None) -> Fraction:
    total = Cyclotomic(0)
    for r in rows:
        v = _value_at(f, cv, r, b)
        total += r.length * (v * v.conj())
    if not total.is_rational():
        raise NotRationalError(f"sum {total} is not rational")
    return total.to_rational()


def restriction_sum(f: FusionDataset, chi: str, b: BranchAssignment | None = None) -> Fraction:
    """Sum over rows of length * |value|^2."""
    return _weighted_sum(f, _checked_character(f, chi), f.rows, b)


def restriction_norm(f: FusionDataset, chi: str, b: BranchAssignment | None = None) -> Fraction:
    return restriction_sum(f, chi, b) / f.subgroup_order


def normal_part_norm(f: FusionDataset, chi: str, subset: Iterable[str], n_order: int,
                     b: BranchAssignment | None = None) -> Fraction:
    """Norm of the restriction to the normal subgroup made of the classes in ``subset``."""
    rows = [f.row(c) for c in sorted(set(subset))]
    if f.identity_row not in rows:
        raise FusionError("subset must contain the identity class")
    size = sum(r.length for r in rows)
    if size != n_order:
        raise FusionError(f"class lengths sum to {size}, not {n_order}")
    return _weighted_sum(f, _checked_character(f, chi), rows, b) / n_order


@dataclass(frozen=True)
class NormalSubset:
    classes: tuple[str, ...]
    norm: Fraction

    @property
    def is_integral(self) -> bool:
        return self.norm.denominator == 1 and self.norm > 0


def enumerate_normal_subsets(f: FusionDataset, chi: str, n_order: int, max_element_order: int,
                             b: BranchAssignment | None = None) -> list[NormalSubset]:
    """Every union of classes with the identity, bounded element orders and total length n_order."""
    ident = f.identity_row
    pool = [r for r in f.rows if r is not ident and r.element_order <= max_element_order]
    pool.sort(key=lambda r: r.sub_class)
    want = n_order - ident.length
    found: list[tuple[FusionRow, ...]] = []

    def walk(i: int, left: int, chosen: list[FusionRow]) -> None:
        if left == 0:
            found.append(tuple(chosen))
            return
        for j in range(i, len(pool)):
            r = pool[j]
            if r.length <= left:
                chosen.append(r)
                walk(j + 1, left - r.length, chosen)
                chosen.pop()

    if want >= 0:
        walk(0, want, [])
    out = []
    for rows in found:
        names = tuple(sorted([ident.sub_class] + [r.sub_class for r in rows]))
        out.append(NormalSubset(names, normal_part_norm(f, chi, names, n_order, b)))
    out.sort(key=lambda s: (len(s.classes), s.classes))
    return out


# ---------------------------------------------------------------------------
# transport of parent values


def restrict(f: FusionDataset, parent_values: Character | Mapping[str, Cyclotomic],
             b: BranchAssignment | None = None) -> dict[str, Cyclotomic]:
    values = parent_values.values if isinstance(parent_values, Character) else parent_values
    out = {}
    for r in f.rows:
        if r.ambiguous and b is None:
            raise FusionError(f"{r.sub_class} is ambiguous; a branch is required")
        seen = set()
        for t in r.chosen(b.index(r) if r.ambiguous else 0):
            v = values.get(t)
            if v is None:
                raise MissingValueError(f"no parent value at {t} (needed by {r.sub_class})")
            seen.add(as_cyclotomic(v))
        if len(seen) > 1:
            raise FusionError(f"{r.sub_class} aggregates classes with different values")
        out[r.sub_class] = seen.pop()
    return out


def decompose(fvalues: Mapping[str, Cyclotomic], t: CharacterTable) -> dict[str, int]:
    """Multiplicities of the irreducible characters of ``t`` in a class function."""
    if not t.is_complete:
        raise TableError(f"{t.group_name} is not a complete table")
    missing = [c for c in t.class_names if c not in fvalues]
    if missing:
        raise MissingValueError(f"class function undefined at {', '.join(missing)}")
    out = {}
    for ch in t.characters:
        if ch.kind != "complex":
            continue
        total = Cyclotomic(0)
        for c in t.classes:
            total += c.length * (as_cyclotomic(fvalues[c.name]) * ch.values[c.name].conj())
        if not total.is_rational():
            raise NotACharacterError(f"<f, {ch.name}> = {total}/{t.order} is irrational")
        m = total.to_rational() / t.order
        if m.denominator != 1 or m < 0:
            raise NotACharacterError(f"<f, {ch.name}> = {m} is not a nonnegative integer")
        out[ch.name] = int(m)
    for c in t.classes:
        rebuilt = sum((m * t.char(n).values[c.name] for n, m in out.items()), Cyclotomic(0))
        if rebuilt != as_cyclotomic(fvalues[c.name]):
            raise NotACharacterError(f"not in the span of the listed characters (differs at {c.name})")
    return out


def constituent_search(target_degree: int,
                       candidates: Sequence[tuple[Cyclotomic | int | str, int | Iterable[int]]],
                       target_value: Cyclotomic | int | str) -> list[tuple[int, ...]]:
    """All x >= 0 with sum x_i val_i = target_value, realisable in degree target_degree.

    Candidate i is a value together with the degree (or set of possible degrees)
    of the characters taking that value; x_i counts constituents with value
    val_i, and their degrees must add up to target_degree.
    """
    vals = [as_cyclotomic(v) for v, _ in candidates]
    degsets = [sorted({int(d)} if isinstance(d, int) else {int(e) for e in d}) for _, d in candidates]
    if any(not ds or ds[0] < 1 for ds in degsets):
        raise ValueError("candidate degrees must be positive")
    target = as_cyclotomic(target_value)
    n = math.lcm(target.conductor, *(v.conductor for v in vals))
    vecs = [coordinates(v, n) for v in vals]
    goal = coordinates(target, n)
    den = math.lcm(*(c.denominator for vec in vecs + [goal] for c in vec))
    vecs = [tuple(int(c * den) for c in vec) for vec in vecs]
    goal = tuple(int(c * den) for c in goal)
    keep = _independent_coordinates(vecs + [goal])
    vecs = [tuple(v[c] for c in keep) for v in vecs]
    goal = tuple(goal[c] for c in keep)
    k = len(vecs)

    # one variable per (candidate, degree); solutions are aggregated per candidate
    owner = [i for i, ds in enumerate(degsets) for _ in ds]
    vdeg = [d for ds in degsets for d in ds]
    vvec = [vecs[i] for i in owner]
    nv = len(vdeg)

    @lru_cache(maxsize=None)
    def feasible(j: int, deg: int, rem: tuple[int, ...]) -> bool:
        if j == nv:
            return deg == 0 and not any(rem)
        if not _cone_contains([(vdeg[i],) + vvec[i] for i in range(j, nv)], (deg,) + rem):
            return False
        d, vec = vdeg[j], vvec[j]
        return any(feasible(j + 1, deg - y * d, tuple(r - y * c for r, c in zip(rem, vec)))
                   for y in range(deg // d + 1))

    found: set[tuple[int, ...]] = set()
    counts = [0] * k

    def walk(j: int, deg: int, rem: tuple[int, ...]) -> None:
        if j == nv:
            found.add(tuple(counts))
            return
        d, vec = vdeg[j], vvec[j]
        for y in range(deg // d + 1):
            nrem = tuple(r - y * c for r, c in zip(rem, vec))
            if feasible(j + 1, deg - y * d, nrem):
                counts[owner[j]] += y
                walk(j + 1, deg - y * d, nrem)
                counts[owner[j]] -= y

    if target_degree >= 0 and feasible(0, target_degree, goal):
        walk(0, target_degree, goal)
    return sorted(found)


def _independent_coordinates(vecs: list[tuple[int, ...]]) -> list[int]:
    """Coordinates that determine every other coordinate linearly on the span of vecs."""
    keep: list[int] = []
    basis: list[list[Fraction]] = []
    for c in range(len(vecs[0])):
        col = [Fraction(v[c]) for v in vecs]
        for b, p in basis:
            if col[p]:
                f = col[p] / b[p]
                col = [x - f * y for x, y in zip(col, b)]
        p = next((i for i, x in enumerate(col) if x), None)
        if p is not None:
            basis.append((col, p))
            keep.append(c)
    return keep


def _cone_contains(cols: list[tuple[int, ...]], b: tuple[int, ...]) -> bool:
    """Exact phase-one simplex: is b a nonnegative real combination of cols?

    Rows are kept integral; row k reads ``scale[k]*a_k + sum row[j]*y_j = rhs``
    while its artificial a_k is basic, with scale[k] > 0.
    """
    m, n = len(b), len(cols)
    rows = []
    for i in range(m):
        sign = -1 if b[i] < 0 else 1
        rows.append([sign * c[i] for c in cols] + [sign * b[i]])
    scale = [1] * m
    basis = [-1] * m  # -1: the row's artificial is basic
    while True:
        art = [k for k in range(m) if basis[k] == -1]
        if not art or all(rows[k][-1] == 0 for k in art):
            return True
        enter = next((j for j in range(n)
                      if sum(Fraction(rows[k][j], scale[k]) for k in art) > 0), None)
        if enter is None:
            return False
        # Bland's rule: ties go to the smallest basic variable (artificials rank after columns)
        i = min((Fraction(r[-1], r[enter]), basis[k] if basis[k] >= 0 else n + k, k)
                for k, r in enumerate(rows) if r[enter] > 0)[2]
        piv = rows[i][enter]
        for k in range(m):
            f = rows[k][enter]
            if k == i or not f:
                continue
            new = [x * piv - f * y for x, y in zip(rows[k], rows[i])]
            sk = scale[k] * piv
            g = math.gcd(sk, *new)
            rows[k] = [x // g for x in new]
            scale[k] = sk // g
        basis[i] = enter
