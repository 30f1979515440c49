import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from semifix import (
    CAPPED_O,
    INF,
    MalformedElement,
    NotNaturallyOrdered,
    UnsupportedOperation,
    check_axioms,
    element_stability,
    longest_chain,
    min_p_truncate,
    natural_order_leq,
    scalar_repeat,
    semiring_from_id,
    semiring_stability,
    trop_p_add,
    trop_p_mul,
)
from semifix.errors import InvalidParameter

from conftest import ALL_IDS, FINITE_IDS, seeded_elements


# ---------------------------------------------------------------------------
# Worked bag values and bag identities
# ---------------------------------------------------------------------------

def test_trop2_worked_values():
    s = semiring_from_id("trop_p:2")
    x, y = s.parse("[3,7,9]"), s.parse("[3,7,7]")
    assert s.add(x, y) == s.parse("[3,3,7]")
    assert s.mul(x, y) == s.parse("[6,10,10]")


def test_trop_p_ops_match_semiring_methods():
    s = semiring_from_id("trop_p:2")
    x, y = s.parse("[3,7,9]"), s.parse("[3,7,7]")
    assert trop_p_add(2, x, y) == s.add(x, y)
    assert trop_p_mul(2, x, y) == s.mul(x, y)


def test_trop_p_length_mismatch():
    with pytest.raises(MalformedElement):
        trop_p_add(2, (Fraction(1), INF), (Fraction(1), INF, INF))
    with pytest.raises(MalformedElement):
        trop_p_mul(1, (Fraction(1),), (Fraction(1), INF))


def test_trop_p_mul_identity():
    s = semiring_from_id("trop_p:1")
    x = s.parse("[2,5]")
    assert s.mul(x, s.one) == x


bag_entries = st.lists(
    st.one_of(st.integers(0, 9).map(Fraction), st.just(INF)), max_size=6
)


@given(bag_entries, bag_entries, st.integers(0, 3))
def test_truncation_commutes_with_union(xs, ys, p):
    lhs = min_p_truncate(p, tuple(min_p_truncate(p, xs)) + tuple(min_p_truncate(p, ys)))
    rhs = min_p_truncate(p, xs + ys)
    assert lhs == rhs


@given(bag_entries, bag_entries, st.integers(0, 3))
def test_truncation_commutes_with_pairwise_sums(xs, ys, p):
    def pairwise(a, b):
        return [
            INF if (u is INF or v is INF) else u + v for u in a for v in b
        ]

    lhs = min_p_truncate(p, pairwise(min_p_truncate(p, xs), min_p_truncate(p, ys)))
    rhs = min_p_truncate(p, pairwise(xs, ys))
    assert lhs == rhs


# ---------------------------------------------------------------------------
# Stability
# ---------------------------------------------------------------------------

def test_element_stability_bool():
    s = semiring_from_id("bool")
    assert element_stability(s, True).index == 0


def test_element_stability_trop():
    s = semiring_from_id("trop")
    assert element_stability(s, Fraction(5)).index == 0


def test_element_stability_capped():
    s = semiring_from_id("capped:4")
    r = element_stability(s, 1)
    assert r.index == 3
    assert r.sequence == (0, 1, 3, 4, 4)
    assert r.sequence[r.index] == r.sequence[r.index + 1]


def test_element_stability_cap_exceeded_reports_bottom():
    s = semiring_from_id("capped:4")
    r = element_stability(s, 1, cap=1)
    assert r.index is None
    assert len(r.sequence) == 3


def test_element_stability_consistent_under_larger_cap():
    s = semiring_from_id("capped:4")
    for u in s.elements():
        q = element_stability(s, u, cap=16).index
        assert element_stability(s, u, cap=64).index == q


def test_semiring_stability_bool():
    assert semiring_stability(semiring_from_id("bool")).index == 0


def test_semiring_stability_capped4():
    r = semiring_stability(semiring_from_id("capped:4"))
    assert r.index == 3
    assert r.witness == 1


def test_semiring_stability_finite_tropical_bags():
    r = semiring_stability(semiring_from_id("trop_p_fin:1:1"))
    assert r.index == 1


def test_semiring_stability_needs_carrier():
    with pytest.raises(UnsupportedOperation):
        semiring_stability(semiring_from_id("trop"))


def test_scalar_repeat_examples():
    b = semiring_from_id("bool")
    assert scalar_repeat(b, True, 3) is True
    c = semiring_from_id("capped:4")
    assert scalar_repeat(c, 2, 3) == 4
    assert scalar_repeat(c, 2, 0) is CAPPED_O
    t2 = semiring_from_id("trop_p:2")
    u = t2.parse("[3,7,9]")
    assert scalar_repeat(t2, u, 2) == t2.parse("[3,3,7]")


@pytest.mark.parametrize("sid", FINITE_IDS)
def test_repeat_stability_one_past_index(sid):
    # (p+1)-fold repeated sums equal (p+2)-fold ones on p-stable carriers
    s = semiring_from_id(sid)
    p = semiring_stability(s).index
    for u in s.elements():
        assert scalar_repeat(s, u, p + 1) == scalar_repeat(s, u, p + 2)


def test_capped_repeats_saturate_to_the_cap():
    # capped addition is not distributive, so repeated sums of 1 keep growing
    # beyond the stability index until they hit the cap
    for L in (5, 6):
        s = semiring_from_id(f"capped:{L}")
        p = semiring_stability(s).index
        assert p == 3
        assert scalar_repeat(s, 1, p + 1) == p + 1 != min(p + 2, L) == scalar_repeat(s, 1, p + 2)
        assert all(scalar_repeat(s, 1, m) == min(m, L) for m in range(1, 2 * L))


# ---------------------------------------------------------------------------
# Natural order
# ---------------------------------------------------------------------------

def test_capped_arithmetic_closed():
    for L in (1, 4):
        s = semiring_from_id(f"capped:{L}")
        carrier = set(s.elements())
        for a in carrier:
            for b in carrier:
                for result, op in ((s.add(a, b), "add"), (s.mul(a, b), "mul")):
                    assert result in carrier
                    if result is not CAPPED_O:
                        assert 0 <= result <= L
                # O only arises from O inputs
                assert (s.add(a, b) is CAPPED_O) == (a is CAPPED_O and b is CAPPED_O)
                assert (s.mul(a, b) is CAPPED_O) == (a is CAPPED_O or b is CAPPED_O)


def test_natural_order_bool():
    s = semiring_from_id("bool")
    assert natural_order_leq(s, False, True)
    assert not natural_order_leq(s, True, False)


def test_natural_order_capped():
    s = semiring_from_id("capped:4")
    assert natural_order_leq(s, CAPPED_O, 2)
    assert not natural_order_leq(s, 3, 1)


def test_natural_order_needs_carrier():
    with pytest.raises(UnsupportedOperation):
        natural_order_leq(semiring_from_id("trop"), Fraction(1), Fraction(2))


def test_longest_chain_examples():
    assert longest_chain(semiring_from_id("bool")) == 1
    assert longest_chain(semiring_from_id("capped:4")) == 5
    assert longest_chain(semiring_from_id("trivial")) == 0


def test_longest_chain_rejects_non_antisymmetric():
    class Cyclic(type(semiring_from_id("bool"))):
        # add = xor on booleans: False+True=True, True+True=False, so each of
        # the two elements precedes the other and antisymmetry fails
        id = "xor"

        def add(self, a, b):
            return a != b

    with pytest.raises(NotNaturallyOrdered):
        longest_chain(Cyclic())


# ---------------------------------------------------------------------------
# Axiom checking and codecs
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("sid", ["bool", "trivial", "trop_p_fin:1:1", "trop_p_fin:2:1"])
def test_axioms_exhaustive_pass(sid):
    report = check_axioms(semiring_from_id(sid))
    assert report.exhaustive
    assert report.all_passed


@pytest.mark.parametrize("sid", ["trop", "trop_p:1", "trop_p:2"])
def test_axioms_sampled_pass(sid):
    report = check_axioms(semiring_from_id(sid), sample_budget=2000, seed=7)
    assert not report.exhaustive
    assert report.all_passed


def test_capped_axioms_all_but_distributivity():
    # both operations are addition capped at L, which cannot distribute:
    # 1*(0+0) = 1 while (1*0)+(1*0) = 2
    report = check_axioms(semiring_from_id("capped:4"))
    assert report.exhaustive
    failing = {c.name for c in report.failures()}
    assert failing == {"distributes"}
    (witness,) = [c.counterexample for c in report.failures()]
    a, b, c = witness
    s = semiring_from_id("capped:4")
    assert s.mul(a, s.add(b, c)) != s.add(s.mul(a, b), s.mul(a, c))


def test_broken_semiring_fails_with_witness(broken_semiring):
    report = check_axioms(broken_semiring)
    assert report.exhaustive
    failing = report.failures()
    assert [c.name for c in failing] == ["distributes"]
    assert failing[0].counterexample is not None


@pytest.mark.parametrize("sid", ALL_IDS)
def test_literal_roundtrip(sid):
    s = semiring_from_id(sid)
    elems = s.elements() or seeded_elements(s, 50, seed=3)
    for u in elems:
        assert s.parse(s.show(u)) == u
    assert s.parse(s.show(s.zero)) == s.zero
    assert s.parse(s.show(s.one)) == s.one


def test_literal_parsing():
    t = semiring_from_id("trop")
    assert t.parse("3") == Fraction(3)
    assert t.parse("3/4") == Fraction(3, 4)
    assert t.parse("2.5") == Fraction(5, 2)
    assert t.parse("inf") is INF
    with pytest.raises(MalformedElement):
        t.parse("-1")
    b = semiring_from_id("trop_p:2")
    assert b.parse("[3]") == (Fraction(3), INF, INF)
    assert b.parse("[]") == b.zero
    with pytest.raises(MalformedElement):
        b.parse("[1,2,3,4]")
    c = semiring_from_id("capped:4")
    assert c.parse("O") is CAPPED_O
    with pytest.raises(MalformedElement):
        c.parse("5")
    with pytest.raises(MalformedElement):
        semiring_from_id("bool").parse("yes")


def test_semiring_registry():
    assert semiring_from_id("capped:4") is semiring_from_id("capped:4")
    with pytest.raises(InvalidParameter):
        semiring_from_id("nope")
    with pytest.raises(InvalidParameter):
        semiring_from_id("capped:x")


@pytest.mark.parametrize("sid", ALL_IDS)
def test_algebra_laws_on_random_elements(sid):
    s = semiring_from_id(sid)
    elems = s.elements() or seeded_elements(s, 12, seed=11)
    skip_distributivity = sid.startswith("capped")
    for a in elems:
        assert s.add(a, s.zero) == a
        assert s.mul(a, s.one) == a
        assert s.mul(a, s.zero) == s.zero
        for b in elems:
            assert s.add(a, b) == s.add(b, a)
            assert s.mul(a, b) == s.mul(b, a)
    rng = random.Random(5)
    pool = list(elems)
    for _ in range(200):
        a, b, c = (rng.choice(pool) for _ in range(3))
        assert s.add(s.add(a, b), c) == s.add(a, s.add(b, c))
        assert s.mul(s.mul(a, b), c) == s.mul(a, s.mul(b, c))
        if not skip_distributivity:
            assert s.mul(a, s.add(b, c)) == s.add(s.mul(a, b), s.mul(a, c))
