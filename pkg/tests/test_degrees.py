from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from g2restrict.degrees import (
    DATA_ENV,
    Ell,
    ExpressionError,
    InadmissibleError,
    brauer_degree_bounds,
    complex_degrees,
    d1,
    d2,
    data_path,
    ell_class,
    evaluate,
    evaluate_condition,
    load_candidates,
    maximal_subgroup_orders,
    parse_candidates,
    prime_power,
    screen,
    screen_rows,
    unique_gap_character,
)

from .oracles import g2_candidate_orders, prime_powers

G2_QS = [q for q in prime_powers(2000) if q >= 5]


# --- expressions --------------------------------------------------------------


def test_evaluate_exact():
    assert evaluate("q*(q^4+q^2+1)/3", q=5) == Fraction(5 * 651, 3)
    assert evaluate("sqrt(2*q)", q=8) == 4
    assert evaluate("-q+7%3", q=2) == -1
    assert evaluate_condition("p>=7 and q>=11", p=11, q=11)
    assert not evaluate_condition("not q==p", q=5, p=5)
    assert evaluate_condition("1 < q < 9", q=5)


@pytest.mark.parametrize("expr,env", [
    ("sqrt(q)", {"q": 8}), ("q^(1/2)", {"q": 4}), ("__import__('os')", {}),
    ("x+1", {}), ("e+1", {"e": None}), ("q.real", {"q": 1}), ("(", {}),
])
def test_evaluate_rejects(expr, env):
    with pytest.raises(ExpressionError):
        evaluate(expr, **env)


def test_condition_is_not_a_number():
    with pytest.raises(ExpressionError):
        evaluate("q==5", q=5)


def test_prime_power():
    assert prime_power(125) == (5, 3)
    assert prime_power(12) is None and prime_power(1) is None
    assert {q for q in range(2, 500) if prime_power(q)} == set(prime_powers(499))


def test_ell_class():
    assert ell_class(0, 7) is Ell.ZERO
    assert ell_class(2, 7) is Ell.TWO and ell_class(3, 8) is Ell.THREE
    assert ell_class(5, 7) is Ell.OTHER and ell_class("other", 7) is Ell.OTHER
    for ell, q in [(7, 7), (2, 8), (3, 9), (4, 7)]:
        with pytest.raises(InadmissibleError):
            ell_class(ell, q)


# --- catalogs ------------------------------------------------------------------


def test_complex_catalog_q5():
    cat = dict(complex_degrees(5))
    assert cat["X32"] == 124 and cat["X18"] == 280 and cat["X12"] == 15625
    assert "X21" in cat and "X31" in cat
    assert "X21" not in dict(complex_degrees(8)) and "X31" not in dict(complex_degrees(9))


def test_brauer_bounds_need_l_2_or_3():
    with pytest.raises(InadmissibleError):
        brauer_degree_bounds(7, 5)
    with pytest.raises(InadmissibleError):
        brauer_degree_bounds(9, 3)


@given(st.sampled_from(G2_QS))
def test_degrees_are_positive_integers(q):
    assert all(isinstance(d, int) and d >= 1 for _, d in complex_degrees(q))
    for ell in (2, 3):
        if q % ell:
            assert all(dv.value >= 1 for _, dv in brauer_degree_bounds(q, ell))


@given(st.sampled_from(G2_QS), st.sampled_from([2, 3]))
def test_brauer_degree_at_most_complex_degree(q, ell):
    if q % ell == 0:
        return
    cx = dict(complex_degrees(q))
    for name, dv in brauer_degree_bounds(q, ell):
        assert dv.value <= cx["X" + name[3:]]


@given(st.sampled_from(G2_QS), st.sampled_from([0, 2, 3, 5, 7]))
def test_gap_character_is_unique(q, ell):
    if ell and q % ell == 0:
        return
    cls = ell_class(ell, q)
    top = d2(q, cls).value
    assert sum(1 for _, d in complex_degrees(q) if 1 < d < top) == 1
    name, deg = unique_gap_character(q, cls)
    assert deg == d1(q, cls) < top
    if cls in (Ell.TWO, Ell.THREE):
        assert sum(1 for _, dv in brauer_degree_bounds(q, cls) if 1 < dv.value < top) == 1


@given(st.sampled_from(G2_QS), st.sampled_from([0, 2, 3]))
def test_d1_d2_are_catalog_minima(q, ell):
    if ell and q % ell == 0:
        return
    cls = ell_class(ell, q)
    if cls is Ell.ZERO:
        vals = sorted((d, "exact") for _, d in complex_degrees(q) if d > 1)
    else:
        vals = sorted((dv.value, dv.kind) for _, dv in brauer_degree_bounds(q, cls) if dv.value > 1)
    assert vals[0][0] == d1(q, cls)
    assert vals[1] == (d2(q, cls).value, d2(q, cls).kind)


def test_spot_values():
    assert d1(5, 0) == 124 and d2(5, 0).value == 280
    assert d1(7, 3) == 343 and d1(9, 2) == 6642
    assert d2(11, 2).value == 14762
    v = d2(13, 3)
    assert v.kind == "lower_bound" and v.value == 26533 and str(v) == ">= 26533"
    assert unique_gap_character(9, 2) == ("hat(X22) - hat(1_G)", 6642)
    assert unique_gap_character(7, 3) == ("hat(X32) - hat(1_G)", 343)
    assert unique_gap_character(5, 0) == ("X32", 124)


def test_small_q_is_inadmissible():
    with pytest.raises(InadmissibleError):
        d1(4, 0)
    with pytest.raises(InadmissibleError):
        complex_degrees(6)


# --- screens -------------------------------------------------------------------


def test_screen_results():
    assert {c.label for c in screen("g2", 7, 0)} == {"P_a", "P_b", "SL3:2", "SU3:2"}
    assert {c.label for c in screen("g2", 25, 0)} == {"P_a", "P_b", "SL3:2", "SU3:2", "G2(5)"}
    assert [c.label for c in screen("sz", 8, 0)] == ["P"]
    assert [c.label for c in screen("sz", 32, 0)] == ["P"]
    assert [c.label for c in screen("ree", 27, 2)] == ["P"]


@given(st.sampled_from([q for q in G2_QS if q % 2 and q % 3 and q < 400]))
def test_candidate_orders_match_oracle(q):
    got = sorted((c.label, c.order) for c in maximal_subgroup_orders("g2", q))
    want = sorted(g2_candidate_orders(q))
    assert got == want


@given(st.sampled_from([q for q in G2_QS if q % 2 and q % 3 and q < 400]))
def test_screen_antitone_in_bound(q):
    """Raising the bound never adds survivors."""
    base = load_candidates("g2")
    rows = screen_rows("g2", q, 0, base)
    for k in (1, 2, 3):
        harder = parse_candidates((data_path("g2_maximals_p5.dat").read_text()
                                   .replace("bound d1^2", f"bound {k}*d1^2+{k}")), "x")
        tougher = screen_rows("g2", q, 0, harder)
        assert {r.candidate.label for r in tougher if r.survives} <= {r.candidate.label for r in rows if r.survives}
        rows = tougher


def test_screen_rows_record_the_inequality():
    rows = screen_rows("g2", 7, 0)
    row = next(r for r in rows if r.candidate.label == "(SL2oSL2).2")
    assert (row.candidate.order, row.bound, row.survives) == (112896, 344 ** 2, False)


def test_inadmissible_family_input():
    with pytest.raises(InadmissibleError):
        screen("g2", 4, 0)
    with pytest.raises(InadmissibleError):
        screen("sz", 16, 0)
    with pytest.raises(InadmissibleError):
        load_candidates("e8")


def test_user_candidate_file(tmp_path):
    path = tmp_path / "g2_p3.dat"
    path.write_text("family g2\nadmissible p==3\nbound d1^2\ncandidate P_a order q^6*(q^2-1)*(q-1)\n"
                    "candidate tiny order 10\n")
    got = screen("g2", 9, 2, load_candidates("g2", path))
    assert "SL3:2'" in {c.label for c in screen("g2", 9, 2)}
    assert [c.label for c in got] == ["P_a"]
    with pytest.raises(InadmissibleError):
        load_candidates("sz", path)


@pytest.mark.parametrize("text", [
    "family g2\nbound 1\n",
    "family g2\nadmissible 1\nbound 1\ncandidate X size 3\n",
    "family g2\nadmissible 1\nbound 1\ncandidate X order 3 extra\n",
    "family g2\nadmissible 1\nbound 1\nwhat\n",
    "family g2\nadmissible 1\nbound 1\ncandidate X order (3\n",
])
def test_candidate_parse_errors(text):
    with pytest.raises(ExpressionError):
        parse_candidates(text)


def test_data_override(tmp_path, monkeypatch):
    (tmp_path / "sz_maximals.dat").write_text(
        "family sz\nadmissible p==2\nbound 1\ncandidate only order 2\n")
    monkeypatch.setenv(DATA_ENV, str(tmp_path))
    assert [c.label for c in screen("sz", 8, 0)] == ["only"]
    assert data_path("s3.tab").exists()


def test_reduction_theorem_survivors_for_all_characteristics():
    """Survivors lie in {P_a, P_b, SL3:2, SU3:2} plus G2(q0) exactly when q = q0^2 and p != 3."""
    generic = {"P_a", "P_b", "SL3:2", "SU3:2", "SL3:2'", "SU3:2'"}
    for q in (q for q in prime_powers(1000) if q >= 5):
        p, n = prime_power(q)
        for ell in (0, 2, 3, 5):
            if ell and q % ell == 0:
                continue
            labels = {c.label for c in screen("g2", q, ell)}
            extra = labels - generic
            if n % 2 == 0 and p != 3:
                assert extra == {f"G2({p ** (n // 2)})"}, (q, ell)
            else:
                assert extra == set(), (q, ell)
            assert {"P_a", "P_b", "SL3:2", "SU3:2"} <= labels
