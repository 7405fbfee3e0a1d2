import itertools

import pytest
from hypothesis import given, settings, strategies as st

from g2restrict.chartab import DataParseError, MissingValueError, TableError, load_table
from g2restrict.exactnum import Cyclotomic, NotRationalError
from g2restrict.fusion import (
    CoverError,
    FusionError,
    NotACharacterError,
    constituent_search,
    decompose,
    enumerate_branches,
    enumerate_normal_subsets,
    load_fusion,
    normal_part_norm,
    parse_fusion,
    restrict,
    restriction_norm,
    restriction_sum,
    validate_fusion,
)

from .oracles import DATA, alternating, conjugacy_classes, order, symmetric


def _cycle_type(p):
    seen, out = set(), []
    for i in range(len(p)):
        if i not in seen:
            j, n = i, 0
            while j not in seen:
                seen.add(j)
                j, n = p[j], n + 1
            out.append(n)
    return tuple(sorted(out))


@pytest.mark.parametrize("fus,sub,parent", [
    ("s3_s4.fus", lambda: symmetric(3), lambda: symmetric(4)),
    ("a4_a5.fus", lambda: alternating(4), lambda: alternating(5)),
])
def test_small_fusions_match_point_stabilisers(fus, sub, parent):
    """Embed H as the stabiliser of the last point; compare lengths and cycle types."""
    f = load_fusion(DATA / fus)
    n = len(parent()[0])
    H = [g + (n - 1,) for g in sub()]
    sub_classes = conjugacy_classes(H)
    assert sorted(len(c) for c in sub_classes) == sorted(r.length for r in f.rows)
    ptab = load_table(DATA / fus.split("_")[1].replace(".fus", ".tab"))
    ct_of_parent_class = {}
    for c in conjugacy_classes(parent()):
        g = next(iter(c))
        ct_of_parent_class.setdefault((order(g), len(c)), set()).add(_cycle_type(g))
    for r in f.rows:
        (target,) = r.targets
        pc = ptab.cls(target)
        matching = [c for c in sub_classes if len(c) == r.length and order(next(iter(c))) == pc.element_order]
        assert matching
        types = ct_of_parent_class[(pc.element_order, pc.length)]
        assert all(_cycle_type(next(iter(c))) in types for c in matching)


def test_small_fusion_values_are_restrictions():
    for fus, tab in [("s3_s4.fus", "s4.tab"), ("a4_a5.fus", "a5.tab")]:
        f = load_fusion(DATA / fus)
        t = load_table(DATA / tab)
        for name, cv in f.char_values.items():
            assert restrict(f, t.char(name)) == {c: v[0] for c, v in cv.values.items()}


def test_decompose_small_restrictions():
    f = load_fusion(DATA / "s3_s4.fus")
    s3 = load_table(DATA / "s3.tab")
    s4 = load_table(DATA / "s4.tab")
    assert decompose(restrict(f, s4.char("chi4")), s3) == {"chi1": 1, "chi2": 0, "chi3": 1}
    assert decompose(restrict(f, s4.char("chi3")), s3) == {"chi1": 0, "chi2": 0, "chi3": 1}
    a5, a4 = load_table(DATA / "a5.tab"), load_table(DATA / "a4.tab")
    fa = load_fusion(DATA / "a4_a5.fus")
    assert decompose(restrict(fa, a5.char("chi4")), a4) == {"chi1": 1, "chi2": 0, "chi3": 0, "chi4": 1}


def test_decompose_rejects_non_characters():
    s3 = load_table(DATA / "s3.tab")
    with pytest.raises(NotACharacterError):
        decompose({"1A": Cyclotomic(2), "2A": Cyclotomic(1), "3A": Cyclotomic(0)}, s3)
    with pytest.raises(NotACharacterError):
        decompose({"1A": Cyclotomic(-1), "2A": Cyclotomic(-1), "3A": Cyclotomic(-1)}, s3)
    with pytest.raises(MissingValueError):
        decompose({"1A": Cyclotomic(1)}, s3)
    with pytest.raises(TableError):
        decompose({}, load_table(DATA / "g2q3_cover3.tab"))


def test_restrict_detects_inconsistent_union():
    text = ("fusion H order 2 into G cover 1\nrow 1A length 1 order 1 -> 1A\n"
            "row 2A length 1 order 2 -> 2A,2B\n")
    f = parse_fusion(text)
    assert restrict(f, {"1A": 1, "2A": 1, "2B": 1})["2A"] == 1
    with pytest.raises(FusionError):
        restrict(f, {"1A": 1, "2A": 1, "2B": -1})
    with pytest.raises(MissingValueError):
        restrict(f, {"1A": 1, "2A": 1})


# --- the parabolic datasets ---------------------------------------------------


def test_g2q3_branches_are_linked():
    f = load_fusion(DATA / "g2q3_3P.fus")
    branches = enumerate_branches(f)
    assert [b.describe(f) for b in branches] == [
        "D1->4A, D2->12A, E2(1)->8A, E2(2)->8A",
        "D1->4B, D2->12B, E2(1)->8B, E2(2)->8B",
    ]
    with pytest.raises(FusionError):
        restriction_sum(f, "chi24")


def test_per_branch_values_enter_the_sum():
    f = load_fusion(DATA / "g2q3_3P.fus")
    sums = [restriction_sum(f, "chi24", b) for b in enumerate_branches(f)]
    assert sums == [11664, 11664]
    rows = {r.sub_class: r for r in f.rows}
    assert rows["D1"].link_id == rows["D2"].link_id


@pytest.mark.parametrize("fus,char", [("g2q3_3P.fus", "chi24"), ("g2q4_2P.fus", "chi12"),
                                      ("g2q4_2Q.fus", "chi12"), ("s3_s4.fus", "chi4")])
def test_trivial_character_has_norm_one(fus, char):
    f = load_fusion(DATA / fus)
    for b in enumerate_branches(f):
        assert restriction_norm(f, "trivial", b) == 1


def test_cover_requires_faithful_flag():
    f = load_fusion(DATA / "g2q4_2P.fus")
    text = (DATA / "g2q4_2P.fus").read_text().replace("values chi12 faithful", "values chi12")
    g = parse_fusion(text)
    assert restriction_norm(f, "chi12") == 1
    with pytest.raises(CoverError):
        restriction_norm(g, "chi12")


def test_irrational_sum_is_an_error():
    f = parse_fusion("fusion H order 2 into G cover 1\nrow 1A length 1 order 1 -> 1A\n"
                     "row 2A length 1 order 2 -> 2A\nvalues x 1 z5\n")
    assert restriction_norm(f, "x") == 1
    g = parse_fusion("fusion H order 2 into G cover 1\nrow 1A length 1 order 1 -> 1A\n"
                     "row 2A length 1 order 2 -> 2A\nvalues x 1 1+z5\n")
    with pytest.raises(NotRationalError):
        restriction_norm(g, "x")


def test_normal_part_norm_checks_its_subset():
    f = load_fusion(DATA / "g2q3_3P.fus")
    b = enumerate_branches(f)[0]
    assert normal_part_norm(f, "chi24", ["A1", "O3*"], 243, b) == 3
    with pytest.raises(FusionError):
        normal_part_norm(f, "chi24", ["O3*"], 242, b)
    with pytest.raises(FusionError):
        normal_part_norm(f, "chi24", ["A1", "O3*"], 81, b)


def test_normal_subsets_trivial_and_exhaustive():
    f = load_fusion(DATA / "g2q4_2P.fus")
    (only,) = enumerate_normal_subsets(f, "chi12", 1, 4)
    assert only.classes == ("A0",) and only.norm == 144
    subsets = enumerate_normal_subsets(f, "chi12", 1024, 4)
    pool = [r for r in f.rows if r.element_order <= 4 and r.sub_class != "A0"]
    brute = [c for k in range(len(pool) + 1) for c in itertools.combinations(pool, k)
             if 1 + sum(r.length for r in c) == 1024]
    assert len(subsets) == len(brute) == 2


def test_shipped_fusions_are_complete():
    for path in sorted(DATA.glob("*.fus")):
        f = load_fusion(path)
        assert sum(r.length for r in f.rows) == f.subgroup_order
        assert validate_fusion(f).ok


def test_targets_checked_against_parent():
    f = load_fusion(DATA / "g2q4_2P.fus")
    rep = validate_fusion(f, load_table(DATA / "g2q4_cover2.tab"))
    assert rep.ok, rep.failures
    g = load_fusion(DATA / "g2q3_3P.fus")
    rep = validate_fusion(g, load_table(DATA / "g2q3_cover3.tab"))
    assert rep.ok, rep.failures
    bad = parse_fusion("fusion S3 order 6 into S4 cover 1\nrow 1A length 1 order 1 -> 1A\n"
                       "row 2A length 3 order 2 -> 3A\nrow 3A length 2 order 3 -> 9Z\n")
    rep = validate_fusion(bad, load_table(DATA / "s4.tab"))
    assert [c.name for c in rep.failures] == ["targets-match-parent"]


def test_length_sum_failure():
    f = parse_fusion("fusion H order 4 into G cover 1\nrow 1A length 1 order 1 -> 1A\n"
                     "row 2A length 2 order 2 -> 2A\n")
    assert "length-sum" in {c.name for c in validate_fusion(f).failures}


@pytest.mark.parametrize("text,line", [
    ("fusion H order 2 into G\n", 1),
    ("fusion H order 2 into G cover 1\nrow 1A length 1 order 1 1A\n", 2),
    ("fusion H order 2 into G cover 1\nrow 1A length 1 order 1 -> 1A|1B,1C\n", 2),
    ("fusion H order 2 into G cover 1\nrow 1A length 1 order 1 -> 1A link L\n", 2),
    ("fusion H order 2 into G cover 1\nrow 1A length 1 order 1 -> 1A\nvalues x 1 2\n", 3),
    ("fusion H order 2 into G cover 1\nrow 1A length 1 order 1 -> 1A\nvalues x 1|2\n", 3),
    ("fusion H order 2 into G cover 1\nrow 1A length 1 order 1 -> 1A bogus 3\n", 2),
])
def test_fusion_parse_errors(text, line):
    with pytest.raises(DataParseError) as err:
        parse_fusion(text)
    assert err.value.line == line


# --- constituent search --------------------------------------------------------


def brute_constituents(target_degree, candidates, target_value):
    """Enumerate multisets of (candidate, degree) directly."""
    pairs = [(i, d) for i, (_, ds) in enumerate(candidates) for d in sorted(ds)]
    target = Cyclotomic(target_value)
    found = set()

    def walk(j, deg, counts, value):
        if j == len(pairs):
            if deg == 0 and value == target:
                found.add(tuple(counts))
            return
        i, d = pairs[j]
        for y in range(deg // d + 1):
            counts[i] += y
            walk(j + 1, deg - y * d, counts, value + y * Cyclotomic(candidates[i][0]))
            counts[i] -= y

    walk(0, target_degree, [0] * len(candidates), Cyclotomic(0))
    return sorted(found)


def test_constituent_search_small_example():
    cands = [(1, {1}), (-1, {2}), (0, {3})]
    assert constituent_search(4, cands, 0) == brute_constituents(4, cands, 0)
    assert constituent_search(3, [(2, 1)], 1) == []


@settings(max_examples=60)
@given(st.lists(st.tuples(st.integers(-3, 3), st.sets(st.integers(1, 4), min_size=1, max_size=2)),
                min_size=1, max_size=4),
       st.integers(0, 9), st.integers(-6, 6))
def test_constituent_search_matches_brute_force(cands, degree, value):
    assert constituent_search(degree, cands, value) == brute_constituents(degree, cands, value)


def test_constituent_search_with_irrationals():
    b5 = "z5+z5^4"
    cands = [(1, {1, 2}), (b5, {2}), ("-z5-z5^4", {3}), (0, {1})]
    assert constituent_search(6, cands, "2*z5+2*z5^4") == brute_constituents(6, cands, Cyclotomic(b5) * 2)
