"""Degree catalogs for G2(q), the minimal-degree values d_l and d_{2,l}, and the
maximal-subgroup screen for G2(q), Sz(q) and 2G2(q).

Formulas are strings in a small exact expression language (integers, the
variables below, ``+ - * / ^ %``, parentheses, ``sqrt`` of a perfect square,
comparisons and ``and/or/not`` in conditions), evaluated over ``Fraction``.

Variables: ``q``; ``p`` and ``n`` with q = p^n; ``e`` = +1 or -1 with
e = q (mod 3) (only defined when 3 does not divide q); ``q0`` and ``alpha``
with q = q0^alpha for subfield subgroups; ``d1`` in screen bounds.
"""

from __future__ import annotations

import ast
import enum
import math
import operator
import os
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

__all__ = [
    "Ell",
    "ell_class",
    "DegreeFormula",
    "DegreeValue",
    "SubgroupCandidate",
    "ScreenRow",
    "ExpressionError",
    "InadmissibleError",
    "evaluate",
    "evaluate_condition",
    "prime_power",
    "complex_degrees",
    "brauer_degree_bounds",
    "d1",
    "d2",
    "unique_gap_character",
    "CandidateList",
    "DATA_ENV",
    "data_path",
    "parse_candidates",
    "load_candidates",
    "maximal_subgroup_orders",
    "screen_rows",
    "screen",
    "COMPLEX_CATALOG",
]


class ExpressionError(ValueError):
    pass


class InadmissibleError(ValueError):
    pass


# ---------------------------------------------------------------------------
# expressions

_BIN = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Mod: operator.mod}
_CMP = {ast.Eq: operator.eq, ast.NotEq: operator.ne, ast.Lt: operator.lt,
        ast.LtE: operator.le, ast.Gt: operator.gt, ast.GtE: operator.ge}


def _exact_sqrt(x: Fraction) -> Fraction:
    if x < 0 or x.denominator != 1 or math.isqrt(x.numerator) ** 2 != x.numerator:
        raise ExpressionError(f"sqrt({x}) is not an integer")
    return Fraction(math.isqrt(x.numerator))


def _eval(node: ast.AST, env: dict):
    if isinstance(node, ast.Expression):
        return _eval(node.body, env)
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return Fraction(node.value)
    if isinstance(node, ast.Name):
        if env.get(node.id) is None:
            raise ExpressionError(f"variable {node.id!r} is undefined here")
        return Fraction(env[node.id])
    if isinstance(node, ast.BinOp):
        left, right = _eval(node.left, env), _eval(node.right, env)
        if isinstance(node.op, ast.Pow):
            if right.denominator != 1 or right < 0:
                raise ExpressionError("exponents must be nonnegative integers")
            return left ** int(right)
        if type(node.op) in _BIN:
            return _BIN[type(node.op)](left, right)
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, env)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.UAdd):
            return v
        if isinstance(node.op, ast.Not):
            return not v
    if isinstance(node, ast.Compare):
        left = _eval(node.left, env)
        for op, comp in zip(node.ops, node.comparators):
            right = _eval(comp, env)
            if type(op) not in _CMP or not _CMP[type(op)](left, right):
                return False
            left = right
        return True
    if isinstance(node, ast.BoolOp):
        vals = (_eval(v, env) for v in node.values)
        return all(vals) if isinstance(node.op, ast.And) else any(vals)
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt"
            and len(node.args) == 1 and not node.keywords):
        return _exact_sqrt(_eval(node.args[0], env))
    raise ExpressionError(f"unsupported syntax: {ast.dump(node)}")


def _parse(expr: str) -> ast.Expression:
    try:
        return ast.parse(expr.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {expr!r}: {exc.msg}") from None


def evaluate(expr: str, **env) -> Fraction:
    v = _eval(_parse(expr), env)
    if isinstance(v, bool):
        raise ExpressionError(f"{expr!r} is a condition, not a number")
    return v


def evaluate_condition(expr: str, **env) -> bool:
    return bool(_eval(_parse(expr), env))


# ---------------------------------------------------------------------------
# parameters


def prime_power(q: int) -> tuple[int, int] | None:
    """(p, n) with q = p^n, or None."""
    if q < 2:
        return None
    p = next(d for d in range(2, q + 1) if q % d == 0)
    n = 0
    while q % p == 0:
        q //= p
        n += 1
    return (p, n) if q == 1 else None


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))


class Ell(enum.Enum):
    ZERO = "0"
    TWO = "2"
    THREE = "3"
    OTHER = "other"


def ell_class(ell: int | str | Ell, q: int) -> Ell:
    """Classify the characteristic l (0 or a prime) and check that l does not divide q."""
    if isinstance(ell, Ell):
        cls = ell
        num = {Ell.ZERO: 0, Ell.TWO: 2, Ell.THREE: 3}.get(cls)
    elif isinstance(ell, str) and ell.lower() == "other":
        cls, num = Ell.OTHER, None
    else:
        num = int(ell)
        if num != 0 and not _is_prime(num):
            raise InadmissibleError(f"characteristic {num} is neither 0 nor a prime")
        cls = {0: Ell.ZERO, 2: Ell.TWO, 3: Ell.THREE}.get(num, Ell.OTHER)
    if num and q % num == 0:
        raise InadmissibleError(f"l = {num} divides q = {q}")
    return cls


def _g2_env(q: int) -> dict:
    pp = prime_power(q)
    if pp is None or q < 5:
        raise InadmissibleError(f"q = {q} is not a prime power >= 5")
    e = {0: None, 1: 1, 2: -1}[q % 3]
    return dict(q=q, p=pp[0], n=pp[1], e=e)


# ---------------------------------------------------------------------------
# degree catalogs


@dataclass(frozen=True)
class DegreeValue:
    kind: str  # "exact" or "lower_bound"
    value: int

    @property
    def is_exact(self) -> bool:
        return self.kind == "exact"

    def __str__(self) -> str:
        return str(self.value) if self.is_exact else f">= {self.value}"


@dataclass(frozen=True)
class DegreeFormula:
    name: str
    expr: str
    condition: str | None = None
    kind: str = "exact"

    def applies(self, env: dict) -> bool:
        return self.condition is None or evaluate_condition(self.condition, **env)

    def value(self, env: dict) -> DegreeValue:
        v = evaluate(self.expr, **env)
        if v.denominator != 1 or v < 1:
            raise ExpressionError(f"{self.name} = {self.expr} gives {v} at {env}")
        return DegreeValue(self.kind, int(v))


_F = "(q^4+q^2+1)"

COMPLEX_CATALOG: tuple[DegreeFormula, ...] = (
    DegreeFormula("X11", "1"),
    DegreeFormula("X12", "q^6"),
    DegreeFormula("X13", "q*(q^4+q^2+1)/3"),
    DegreeFormula("X14", "q*(q^4+q^2+1)/3"),
    DegreeFormula("X15", "q*(q+1)^2*(q^2-q+1)/2"),
    DegreeFormula("X16", "q*(q+1)^2*(q^2+q+1)/6"),
    DegreeFormula("X17", "q*(q-1)^2*(q^2+q+1)/2"),
    DegreeFormula("X18", "q*(q-1)^2*(q^2-q+1)/6"),
    DegreeFormula("X19", "q*(q-1)^2*(q+1)^2/3"),
    DegreeFormula("X19bar", "q*(q-1)^2*(q+1)^2/3"),
    DegreeFormula("X31", "q^3*(q^3+e)", "q%3!=0"),
    DegreeFormula("X32", "q^3+e", "q%3!=0"),
    DegreeFormula("X33", "q*(q+e)*(q^3+e)", "q%3!=0"),
    DegreeFormula("X21", f"q^2*{_F}", "q%2==1"),
    DegreeFormula("X22", _F, "q%2==1"),
    DegreeFormula("X23", f"q*{_F}", "q%2==1"),
    DegreeFormula("X24", f"q*{_F}", "q%2==1"),
    DegreeFormula("X1a", f"q*(q+1)*{_F}"),
    DegreeFormula("X1b", f"q*(q+1)*{_F}"),
    DegreeFormula("X2a", f"q*(q-1)*{_F}"),
    DegreeFormula("X2b", f"q*(q-1)*{_F}"),
    DegreeFormula("X'1a", f"(q+1)*{_F}"),
    DegreeFormula("X'1b", f"(q+1)*{_F}"),
    DegreeFormula("X'2a", f"(q-1)*{_F}"),
    DegreeFormula("X'2b", f"(q-1)*{_F}"),
    DegreeFormula("X1", f"(q+1)^2*{_F}"),
    DegreeFormula("X2", f"(q-1)^2*{_F}"),
    DegreeFormula("Xa", "q^6-1"),
    DegreeFormula("Xb", "q^6-1"),
    DegreeFormula("X3", "(q^2-1)^2*(q^2-q+1)"),
    DegreeFormula("X6", "(q^2-1)^2*(q^2+q+1)"),
)

# Brauer characters whose degree is that of the complex character with the same index
_INHERITED = ("11", "17", "18", "19", "19bar", "'1a", "'1b", "'2a", "'2b", "1", "2", "a", "b", "3", "6")

_LB = "lower_bound"
_BRAUER_2 = (
    DegreeFormula("phi12", "(q-1)^2*(q+1)*(q^3+2*q^2+q+3)/3", "q%3!=0", _LB),
    DegreeFormula("phi12", "(q-1)^2*(q^3+2*q^2+4*q+3)/3", "q%3==0", _LB),
    DegreeFormula("phi13", "(q-1)*(q^4+q^3+2*q^2+2*q+3)/3"),
    DegreeFormula("phi14", "(q-1)*(q^4+q^3+2*q^2+2*q+3)/3"),
    DegreeFormula("phi15", "q^4+q^2"),
    DegreeFormula("phi31", "q^6-1", "q%3==1"),
    DegreeFormula("phi31", "(q-1)^2*(q^2+1)*(q^2+q+1)", "q%3==2 and q%4==1"),
    DegreeFormula("phi31", "(q-1)^2*(q^2+q+1)*(2*q^2+2*q+3)/3", "q%3==2 and q%4==3", _LB),
    DegreeFormula("phi32", "q^3+e", "q%3!=0"),
    DegreeFormula("phi33", "q*(q+e)*(q^3+e)", "q%3!=0"),
    DegreeFormula("phi1a", f"(q^2-1)*{_F}"),
    DegreeFormula("phi1b", f"(q^2-1)*{_F}"),
    DegreeFormula("phi2a", f"(q-1)^2*{_F}"),
    DegreeFormula("phi2b", f"(q-1)^2*{_F}"),
)

_UP, _DOWN = "q%3==1", "q%3==2"
_BRAUER_3 = (
    DegreeFormula("phi12", "(q-1)^2*(q^4+2*q^3+3*q+2)/2", _UP, _LB),
    DegreeFormula("phi12", "(q-1)^2*(q+2)^2*(q^2+q+1)/4", _DOWN, _LB),
    # two possible values, q^2(q^2-q+1) being the smaller
    DegreeFormula("phi14", "q^2*(q^2-q+1)", _UP, _LB),
    DegreeFormula("phi14", "(q^2-1)*(q^3+3*q^2-q+6)/6", _DOWN),
    DegreeFormula("phi15", "(q^5+q^4+q^2+q-2)/2", _UP),
    DegreeFormula("phi15", "q*(q+1)^2*(q^2-q+1)/2", _DOWN),
    DegreeFormula("phi16", "q^3", _UP),
    DegreeFormula("phi16", "q^3-1", _DOWN),
    DegreeFormula("phi21", f"q^2*{_F}", f"q%2==1 and {_UP}"),
    DegreeFormula("phi21", f"(q-1)^2*{_F}", f"q%2==1 and {_DOWN}"),
    DegreeFormula("phi22", _F, "q%2==1"),
    DegreeFormula("phi23", f"q*{_F}", f"q%2==1 and {_UP}"),
    DegreeFormula("phi23", f"(q-1)*{_F}", f"q%2==1 and {_DOWN}"),
    DegreeFormula("phi24", f"q*{_F}", f"q%2==1 and {_UP}"),
    DegreeFormula("phi24", f"(q-1)*{_F}", f"q%2==1 and {_DOWN}"),
    DegreeFormula("phi1a", f"q*(q+1)*{_F}", _UP),
    DegreeFormula("phi1a", f"(q^2-1)*{_F}", _DOWN),
    DegreeFormula("phi1b", f"q*(q+1)*{_F}", _UP),
    DegreeFormula("phi1b", f"(q^2-1)*{_F}", _DOWN),
    DegreeFormula("phi2a", f"q*(q-1)*{_F}", _UP),
    DegreeFormula("phi2a", f"(q-1)^2*{_F}", _DOWN),
    DegreeFormula("phi2b", f"q*(q-1)*{_F}", _UP),
    DegreeFormula("phi2b", f"(q-1)^2*{_F}", _DOWN),
)


def complex_degrees(q: int) -> list[tuple[str, int]]:
    env = _g2_env(q)
    return [(f.name, f.value(env).value) for f in COMPLEX_CATALOG if f.applies(env)]


def brauer_degree_bounds(q: int, ell: int | Ell) -> list[tuple[str, DegreeValue]]:
    """Degrees of the irreducible l-Brauer characters of G2(q) for l = 2, 3.

    Entries depending on undetermined decomposition parameters are lower bounds.
    """
    env = _g2_env(q)
    cls = ell_class(ell, q)
    if cls is Ell.TWO:
        table = _BRAUER_2
    elif cls is Ell.THREE:
        table = _BRAUER_3
    else:
        raise InadmissibleError("Brauer tables are catalogued for l = 2 and l = 3 only")
    out = [(f.name, f.value(env)) for f in table if f.applies(env)]
    by_name = {f.name: f for f in COMPLEX_CATALOG}
    for idx in _INHERITED:
        f = by_name["X" + idx]
        if f.applies(env):
            out.append(("phi" + idx, f.value(env)))
    return out


def d1(q: int, ell: int | Ell) -> int:
    """Smallest degree > 1 of an irreducible l-Brauer character of G2(q)."""
    _g2_env(q)
    cls = ell_class(ell, q)
    if q % 3 == 1:
        return q ** 3 if cls is Ell.THREE else q ** 3 + 1
    if q % 3 == 2:
        return q ** 3 - 1
    return q ** 4 + q ** 2 if cls is Ell.TWO else q ** 4 + q ** 2 + 1


def d2(q: int, ell: int | Ell) -> DegreeValue:
    """Second smallest degree > 1 of an irreducible l-Brauer character of G2(q)."""
    env = _g2_env(q)
    cls = ell_class(ell, q)
    p = env["p"]
    x18 = q * (q - 1) ** 2 * (q * q - q + 1) // 6
    if cls is Ell.TWO:
        if p == 3 or q in (5, 7):
            return DegreeValue("exact", x18)
        return DegreeValue("exact", q ** 4 + q ** 2)
    if cls is Ell.THREE:
        if q in (5, 7) or (p == 2 and q % 3 == 2):
            return DegreeValue("exact", x18)
        if q % 3 == 2:
            return DegreeValue("exact", q ** 4 + q ** 2 + 1)
        return DegreeValue("lower_bound", q ** 4 - q ** 3 + q ** 2)
    if p in (2, 3) or q in (5, 7):
        return DegreeValue("exact", x18)
    return DegreeValue("exact", q ** 4 + q ** 2 + 1)


def unique_gap_character(q: int, ell: int | Ell) -> tuple[str, int]:
    """The only Brauer character of degree strictly between 1 and d2, as a reduction."""
    cls = ell_class(ell, q)
    degree = d1(q, cls)
    base = "X32" if q % 3 else "X22"
    if cls is Ell.ZERO:
        return base, degree
    name = f"hat({base})"
    if (q % 3 == 1 and cls is Ell.THREE) or (q % 3 == 0 and cls is Ell.TWO):
        name += " - hat(1_G)"
    return name, degree


# ---------------------------------------------------------------------------
# maximal subgroups


@dataclass(frozen=True)
class SubgroupCandidate:
    name: str
    order_expr: str
    center_order: int = 1
    condition: str | None = None
    subfield: bool = False
    family: str = ""
    label: str = ""
    order: int | None = None


@dataclass(frozen=True)
class CandidateList:
    family: str
    admissible: str
    bound: str
    candidates: tuple[SubgroupCandidate, ...]
    source: str = ""


_FAMILY_FILES = {
    "g2": ("g2_maximals_p5.dat", "g2_maximals_p2.dat", "g2_maximals_p3.dat"),
    "sz": ("sz_maximals.dat",),
    "ree": ("ree_maximals.dat",),
}
DATA_ENV = "G2RESTRICT_DATA"


def data_path(name: str) -> Path:
    """Path of a shipped data file, honouring the G2RESTRICT_DATA override directory."""
    override = os.environ.get(DATA_ENV)
    if override and (Path(override) / name).exists():
        return Path(override) / name
    return Path(str(resources.files("g2restrict") / "data" / name))


def parse_candidates(text: str, source: str = "") -> CandidateList:
    family = admissible = bound = None
    cands: list[SubgroupCandidate] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "family":
            family = rest
        elif key == "admissible":
            admissible = rest
        elif key == "bound":
            bound = rest
        elif key == "candidate":
            cands.append(_parse_candidate(rest, lineno, source))
        else:
            raise ExpressionError(f"{source}:{lineno}: unknown record {key!r}")
    if family is None or admissible is None or bound is None:
        raise ExpressionError(f"{source}: needs 'family', 'admissible' and 'bound' lines")
    cands = [SubgroupCandidate(c.name, c.order_expr, c.center_order, c.condition, c.subfield, family)
             for c in cands]
    return CandidateList(family, admissible, bound, tuple(cands), source)


def _parse_candidate(rest: str, lineno: int, source: str) -> SubgroupCandidate:
    head, _, cond = rest.partition(" when ")
    tokens = head.split()
    try:
        name = tokens[0]
        if tokens[1] != "order":
            raise IndexError
        expr = tokens[2]
    except IndexError:
        raise ExpressionError(f"{source}:{lineno}: expected 'candidate <name> order <expr> ...'") from None
    center, subfield = 1, False
    extra = tokens[3:]
    while extra:
        tok = extra.pop(0)
        if tok == "center" and extra:
            center = int(extra.pop(0))
        elif tok == "subfield":
            subfield = True
        else:
            raise ExpressionError(f"{source}:{lineno}: unexpected {tok!r}")
    _parse(expr)
    if cond:
        _parse(cond)
    return SubgroupCandidate(name, expr, center, cond.strip() or None, subfield)


def load_candidates(family: str, path: str | Path | None = None, q: int | None = None) -> CandidateList:
    """Candidate list from ``path``, or the shipped list for ``family`` admitting ``q``.

    Without ``q`` the first shipped list of the family is returned.
    """
    if path is None:
        if family not in _FAMILY_FILES:
            raise InadmissibleError(f"unknown family {family!r}")
        lists = [load_candidates(family, data_path(name)) for name in _FAMILY_FILES[family]]
        if q is None:
            return lists[0]
        env = _family_env(q)
        return next((cl for cl in lists if evaluate_condition(cl.admissible, **env)), lists[0])
    path = Path(path)
    cl = parse_candidates(path.read_text(encoding="utf-8"), path.name)
    if cl.family != family:
        raise InadmissibleError(f"{path.name} lists family {cl.family!r}, not {family!r}")
    return cl


def _family_env(q: int) -> dict:
    pp = prime_power(q)
    if pp is None:
        raise InadmissibleError(f"q = {q} is not a prime power")
    return dict(q=q, p=pp[0], n=pp[1], e={0: None, 1: 1, 2: -1}[q % 3])


def _subfields(q: int) -> list[tuple[int, int]]:
    """(q0, alpha) with q = q0^alpha, alpha prime."""
    p, n = prime_power(q)
    return [(p ** (n // a), a) for a in range(2, n + 1) if n % a == 0 and _is_prime(a)]


def maximal_subgroup_orders(family: str, q: int, candidates: CandidateList | None = None
                            ) -> list[SubgroupCandidate]:
    cl = candidates or load_candidates(family, q=q)
    env = _family_env(q)
    if not evaluate_condition(cl.admissible, **env):
        raise InadmissibleError(f"q = {q} is not admissible for {cl.source or family} ({cl.admissible})")
    out = []
    for c in cl.candidates:
        envs = [(dict(env, q0=q0, alpha=a), f"q0={q0}") for q0, a in _subfields(q)] if c.subfield \
            else [(env, "")]
        for e, tag in envs:
            if c.condition and not evaluate_condition(c.condition, **e):
                continue
            order = evaluate(c.order_expr, **e)
            if order.denominator != 1 or order < 1:
                raise ExpressionError(f"{c.name}: order {order} at {e}")
            label = c.name.replace("q0", str(e["q0"])) if c.subfield else c.name
            out.append(SubgroupCandidate(c.name, c.order_expr, c.center_order, c.condition, c.subfield,
                                         cl.family, label, int(order)))
    return out


@dataclass(frozen=True)
class ScreenRow:
    candidate: SubgroupCandidate
    bound: int
    survives: bool


def screen_rows(family: str, q: int, ell: int | Ell, candidates: CandidateList | None = None
                ) -> list[ScreenRow]:
    """Every candidate with its order compared against the lower bound for |M|."""
    cl = candidates or load_candidates(family, q=q)
    cls = ell_class(ell, q)
    env = _family_env(q)
    if family == "g2":
        env["d1"] = d1(q, cls)
    bound = evaluate(cl.bound, **env)
    rows = []
    for c in maximal_subgroup_orders(family, q, cl):
        rows.append(ScreenRow(c, math.ceil(bound), c.order >= bound))
    return rows


def screen(family: str, q: int, ell: int | Ell, candidates: CandidateList | None = None
           ) -> list[SubgroupCandidate]:
    return [r.candidate for r in screen_rows(family, q, ell, candidates) if r.survives]
