"""Decision rules for (ir)reducibility of restrictions.

Every rule returns a :class:`Verdict` whose evidence records the exact numbers
it compared, so a verdict can be recomputed from its inputs.  A rule only says
``irreducible`` or ``reducible`` when its hypothesis is met by the inputs;
otherwise it says ``inconclusive``.  The block test has its own positive
outcome, ``separated`` (the two characters lie in different l-blocks).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exactnum import Cyclotomic, as_cyclotomic, format_rational

__all__ = [
    "IRREDUCIBLE",
    "REDUCIBLE",
    "INCONCLUSIVE",
    "SEPARATED",
    "Verdict",
    "CliffordSolution",
    "InvalidNormError",
    "sqrt_bound_filter",
    "degree_divides",
    "frobenius_irreducible",
    "clifford_solutions",
    "clifford_verdict",
    "two_value_norms",
    "index_p_split",
    "oell_rule",
    "block_separation_witness",
    "is_prime",
    "is_prime_power",
]

IRREDUCIBLE = "irreducible"
REDUCIBLE = "reducible"
INCONCLUSIVE = "inconclusive"
SEPARATED = "separated"


class InvalidNormError(ValueError):
    """A norm that cannot be <chi, chi> of a character: not a positive integer."""


@dataclass(frozen=True)
class Verdict:
    status: str
    rule: str
    evidence: tuple[tuple[str, str], ...] = ()

    @property
    def evidence_map(self) -> dict[str, str]:
        return dict(self.evidence)

    @property
    def decided(self) -> bool:
        return self.status != INCONCLUSIVE


@dataclass(frozen=True, order=True)
class CliffordSolution:
    e: int
    t: int
    theta_degree: int


def _verdict(status: str, rule: str, **evidence) -> Verdict:
    return Verdict(status, rule, tuple((k, _fmt(v)) for k, v in evidence.items()))


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return format_rational(v)
    return str(v)


def _positive(**kw: int) -> None:
    for name, v in kw.items():
        if int(v) != v or v < 1:
            raise ValueError(f"{name} must be a positive integer, got {v}")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, math.isqrt(n) + 1))


def is_prime_power(n: int) -> bool:
    if n < 2:
        return False
    p = next(p for p in range(2, n + 1) if n % p == 0)
    while n % p == 0:
        n //= p
    return n == 1


# ---------------------------------------------------------------------------


def sqrt_bound_filter(char_degree: int, subgroup_order: int, subgroup_center_order: int = 1) -> Verdict:
    """An irreducible restriction to H has degree at most sqrt(|H/Z(H)|)."""
    _positive(char_degree=char_degree, subgroup_order=subgroup_order,
              subgroup_center_order=subgroup_center_order)
    lhs = char_degree * char_degree * subgroup_center_order
    ev = dict(degree_squared=char_degree * char_degree,
              bound=Fraction(subgroup_order, subgroup_center_order))
    if lhs > subgroup_order:
        return _verdict(REDUCIBLE, "sqrt-bound", **ev, relation="degree^2 > |H|/|Z(H)|")
    return _verdict(INCONCLUSIVE, "sqrt-bound", **ev, relation="degree^2 <= |H|/|Z(H)|")


def degree_divides(char_degree: int, subgroup_order: int, complex_character: bool = True) -> Verdict:
    """The degree of an irreducible complex character of H divides |H|."""
    _positive(char_degree=char_degree, subgroup_order=subgroup_order)
    divides = subgroup_order % char_degree == 0
    ev = dict(degree=char_degree, order=subgroup_order, divides=divides)
    if not complex_character:
        return _verdict(INCONCLUSIVE, "degree-divides", **ev, note="applies to complex characters only")
    return _verdict(INCONCLUSIVE if divides else REDUCIBLE, "degree-divides", **ev)


def frobenius_irreducible(norm: Fraction | int) -> Verdict:
    norm = Fraction(norm)
    if norm.denominator != 1 or norm < 1:
        raise InvalidNormError(f"norm {format_rational(norm)} is not a positive integer")
    status = IRREDUCIBLE if norm == 1 else REDUCIBLE
    return _verdict(status, "frobenius-norm", norm=norm)


def clifford_solutions(m: int, char_degree: int,
                       allowed_theta_degrees: Iterable[int] | None = None) -> list[CliffordSolution]:
    """All (e, t, theta) with e^2 t = m and e t theta = char_degree."""
    _positive(m=m, char_degree=char_degree)
    allowed = None if allowed_theta_degrees is None else set(allowed_theta_degrees)
    out = []
    for e in range(1, math.isqrt(m) + 1):
        if m % (e * e):
            continue
        t = m // (e * e)
        if char_degree % (e * t):
            continue
        theta = char_degree // (e * t)
        if allowed is None or theta in allowed:
            out.append(CliffordSolution(e, t, theta))
    return sorted(out)


def clifford_verdict(m: int, char_degree: int,
                     allowed_theta_degrees: Iterable[int] | None = None) -> Verdict:
    """Clifford analysis of an irreducible restriction to H over a normal N with <chi|N, chi|N> = m.

    No solution means the restriction to H cannot be irreducible.  When every
    solution has e = 1 the restriction to N is a sum of distinct conjugates, so
    reduction modulo any l not dividing |N| stays irreducible.
    """
    sols = clifford_solutions(m, char_degree, allowed_theta_degrees)
    listed = ", ".join(f"(e={s.e},t={s.t},theta={s.theta_degree})" for s in sols) or "none"
    if not sols:
        return _verdict(REDUCIBLE, "clifford", m=m, degree=char_degree, solutions=listed)
    if all(s.e == 1 for s in sols):
        return _verdict(INCONCLUSIVE, "clifford", m=m, degree=char_degree, solutions=listed,
                        implication="multiplicity-free orbit sum; reduction mod l with l not dividing |N| "
                                    "is irreducible")
    return _verdict(INCONCLUSIVE, "clifford", m=m, degree=char_degree, solutions=listed)


def two_value_norms(char_degree: int, n_order: int, value: int,
                    allowed_theta_degrees: Iterable[int] | None = None,
                    max_count: int | None = None, count_modulus: int = 1) -> list[tuple[int, int]]:
    """Pairs (m, n) consistent with chi|N taking only 0 and ``value`` off the identity.

    Then |N| m = deg^2 + n value^2 where n counts the elements carrying ``value``.
    m runs over e^2 t from the Clifford solutions; n must be a nonnegative integer,
    at most ``max_count`` and divisible by ``count_modulus``.
    """
    _positive(char_degree=char_degree, n_order=n_order)
    if value == 0:
        raise ValueError("value must be nonzero")
    out = []
    for m in sorted({s.e * s.e * s.t for s in _all_solutions(char_degree, allowed_theta_degrees)}):
        num = n_order * m - char_degree * char_degree
        if num < 0 or num % (value * value):
            continue
        n = num // (value * value)
        if max_count is not None and n > max_count:
            continue
        if n % count_modulus == 0:
            out.append((m, n))
    return out


def _all_solutions(char_degree: int, allowed: Iterable[int] | None) -> list[CliffordSolution]:
    allowed = None if allowed is None else set(allowed)
    return [CliffordSolution(e, t, char_degree // (e * t))
            for e in range(1, char_degree + 1) for t in range(1, char_degree + 1)
            if char_degree % (e * t) == 0 and (allowed is None or char_degree // (e * t) in allowed)]


def index_p_split(char_degree: int, p: int, sub_degrees: Iterable[int] | None = None,
                  structure: Sequence[tuple[int, int]] | None = None) -> Verdict:
    """Restriction from M to a normal subgroup H of prime index p.

    If chi|M is irreducible then chi|H is irreducible or a sum of p distinct
    irreducible conjugates (all of one degree).  ``structure`` is the known
    decomposition of chi|H as (multiplicity, degree) pairs; with only
    ``sub_degrees`` (the irreducible degrees of H) the test is on degrees alone.
    """
    _positive(char_degree=char_degree, p=p)
    if not is_prime(p):
        raise ValueError(f"index {p} is not prime")
    if structure is not None:
        parts = [(int(a), int(d)) for a, d in structure]
        total = sum(a * d for a, d in parts)
        if total != char_degree:
            raise ValueError(f"structure has degree {total}, not {char_degree}")
        shown = " + ".join(f"{a}*({d})" for a, d in parts)
        count = sum(a for a, _ in parts)
        if count == 1:
            return _verdict(INCONCLUSIVE, "index-p-split", structure=shown, case="restriction to H irreducible")
        if all(a == 1 for a, _ in parts) and count == p and len({d for _, d in parts}) == 1:
            return _verdict(INCONCLUSIVE, "index-p-split", structure=shown, case="p distinct conjugates")
        return _verdict(REDUCIBLE, "index-p-split", structure=shown,
                        case="neither irreducible nor p distinct constituents of one degree")
    if sub_degrees is None:
        raise ValueError("give sub_degrees or structure")
    degs = sorted(set(sub_degrees))
    fits_whole = char_degree in degs
    fits_split = char_degree % p == 0 and char_degree // p in degs
    ev = dict(degree=char_degree, p=p, whole=fits_whole, split=fits_split)
    if fits_whole or fits_split:
        return _verdict(INCONCLUSIVE, "index-p-split", **ev)
    return _verdict(REDUCIBLE, "index-p-split", **ev)


def oell_rule(o_ell_order: int, ell: int | None = None) -> Verdict:
    """A faithful irreducible module restricts reducibly to H when O_l(H) != 1."""
    if o_ell_order < 1:
        raise ValueError("|O_l(H)| must be positive")
    if o_ell_order > 1:
        if ell is not None:
            if not is_prime(ell):
                raise ValueError(f"{ell} is not prime")
            n = o_ell_order
            while n % ell == 0:
                n //= ell
            if n != 1:
                raise ValueError(f"{o_ell_order} is not a power of {ell}")
        elif not is_prime_power(o_ell_order):
            raise ValueError(f"{o_ell_order} is not a prime power")
        return _verdict(REDUCIBLE, "O_l", order=o_ell_order)
    return _verdict(INCONCLUSIVE, "O_l", order=o_ell_order)


def block_separation_witness(deg_rho: int, val_rho: Cyclotomic | int | str, deg_alpha: int,
                             val_alpha: Cyclotomic | int | str, class_length: int, ell: int) -> Verdict:
    """Central characters at one class sum K: same l-block forces
    |K| (rho(g)/rho(1) - alpha(g)/alpha(1)) into a prime over l.

    Only rational integers are decided: such a difference lies in that prime
    exactly when l divides it.
    """
    _positive(deg_rho=deg_rho, deg_alpha=deg_alpha, class_length=class_length)
    if not is_prime(ell):
        raise ValueError(f"{ell} is not prime")
    d = class_length * (as_cyclotomic(val_rho) / deg_rho - as_cyclotomic(val_alpha) / deg_alpha)
    if not d.is_integer():
        return _verdict(INCONCLUSIVE, "block-separation", difference=d, reason="not a rational integer")
    n = d.to_int()
    if n % ell == 0:
        return _verdict(INCONCLUSIVE, "block-separation", difference=n, reason=f"divisible by {ell}")
    return _verdict(SEPARATED, "block-separation", difference=n, reason=f"not divisible by {ell}")
