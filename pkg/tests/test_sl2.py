"""Torus mapping-class calculus: orders, conjugacy tags, twist identities."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from singfib import sl2
from singfib.exactlin import InputError
from singfib.sl2 import (
    L,
    R,
    Sl2Element,
    TorusCurve,
    TwistWord,
    abelianization_image,
    conjugacy_class,
    element_order,
    evaluate_word,
    ishida_class,
    twist_matrix,
    two_twist_trivial,
)


def random_element(rng, steps=8) -> Sl2Element:
    g = Sl2Element.identity()
    for _ in range(steps):
        h = rng.choice([R, L, R.inverse(), L.inverse()])
        g = g * h
    if rng.random() < 0.5:
        g = g.neg()
    return g


def small_elements(norm: int):
    """Every SL(2,Z) element with all entries in [-norm, norm]."""
    rng = range(-norm, norm + 1)
    for a in rng:
        for b in rng:
            for c in rng:
                for d in rng:
                    if a * d - b * c == 1:
                        yield Sl2Element(a, b, c, d)


class TestElement:
    def test_determinant_enforced(self):
        with pytest.raises(InputError):
            Sl2Element(1, 1, 1, 1)

    def test_group_laws(self):
        rng = random.Random(0)
        for _ in range(50):
            g, h = random_element(rng), random_element(rng)
            assert (g * h) * h.inverse() == g
            assert g * g.inverse() == Sl2Element.identity()

    def test_apply(self):
        assert R.apply((0, 1)) == (1, 1)


class TestTwists:
    def test_twist_matrices(self):
        assert twist_matrix(TorusCurve.of(1, 0), 1) == Sl2Element(1, -1, 0, 1)
        assert twist_matrix(TorusCurve.of(0, 1), 1) == Sl2Element(1, 0, 1, 1)

    def test_twist_fixes_its_curve(self):
        for p, q in [(1, 0), (0, 1), (1, 2), (2, -3), (3, 5)]:
            c = TorusCurve.of(p, q)
            m = twist_matrix(c, 3)
            assert m.apply((c.p, c.q)) == (c.p, c.q)

    def test_twist_powers_compose(self):
        c = TorusCurve.of(2, 1)
        assert twist_matrix(c, 2) * twist_matrix(c, 3) == twist_matrix(c, 5)

    def test_nonprimitive_curve_rejected(self):
        with pytest.raises(InputError):
            TorusCurve.of(2, 4)

    def test_word_evaluation(self):
        w = TwistWord.of([(TorusCurve.of(1, 0), 1), (TorusCurve.of(0, 1), 1)])
        assert evaluate_word(w) == Sl2Element(0, -1, 1, 1)


class TestOrder:
    def test_finite_orders(self):
        cases = [
            (Sl2Element(1, 1, -1, 0), 6),
            (Sl2Element(0, 1, -1, 0), 4),
            (Sl2Element(0, 1, -1, -1), 3),
            (Sl2Element(1, 0, 0, 1), 1),
            (Sl2Element(-1, 0, 0, -1), 2),
        ]
        for g, n in cases:
            assert element_order(g) == n

    def test_infinite_orders(self):
        assert element_order(R) is None
        assert element_order(Sl2Element(2, 1, 1, 1)) is None

    def test_order_matches_repeated_multiplication(self):
        for g in small_elements(2):
            n = element_order(g)
            power = Sl2Element.identity()
            seen = None
            for k in range(1, 13):
                power = power * g
                if power.is_identity:
                    seen = k
                    break
            assert n == seen


class TestConjugacy:
    def test_hyperbolic_rl_example(self):
        tag = conjugacy_class(Sl2Element(2, 1, 1, 1))
        assert tag.kind == "hyperbolic" and tag.word == "RL"

    def test_parabolic_tag(self):
        tag = conjugacy_class(Sl2Element(1, 5, 0, 1))
        assert tag.kind == "parabolic" and (tag.eps, tag.n) == (1, 5)
        tag = conjugacy_class(Sl2Element(-1, 3, 0, -1))
        assert tag.eps == -1

    def test_central_elements_get_zero_parabolic_tags(self):
        tag = conjugacy_class(Sl2Element.identity())
        assert (tag.kind, tag.eps, tag.n) == ("parabolic", 1, 0)
        tag = conjugacy_class(Sl2Element.identity().neg())
        assert (tag.kind, tag.eps, tag.n) == ("parabolic", -1, 0)

    def test_invariant_under_conjugation(self):
        rng = random.Random(11)
        for _ in range(120):
            g = random_element(rng)
            h = random_element(rng, steps=6)
            assert conjugacy_class(g) == conjugacy_class(h * g * h.inverse())

    def test_separates_nonconjugate_parabolics(self):
        tags = {conjugacy_class(Sl2Element(1, n, 0, 1)) for n in range(-3, 4)}
        assert len(tags) == 7

    def test_exhaustive_small_oracle(self):
        """Tag equality agrees with brute-force conjugacy search over a ball."""
        elements = list(small_elements(2))
        conjugators = list(small_elements(3))
        for g in elements:
            for h in elements:
                related = any(u * g * u.inverse() == h for u in conjugators)
                if related:
                    assert conjugacy_class(g) == conjugacy_class(h), (g, h)

    def test_hyperbolic_word_recovers_class(self):
        rng = random.Random(5)
        for _ in range(40):
            g = random_element(rng, steps=10)
            if abs(g.trace) <= 2:
                continue
            tag = conjugacy_class(g)
            prod = Sl2Element.identity()
            for ch in tag.word:
                prod = prod * (R if ch == "R" else L)
            if g.trace < 0:
                prod = prod.neg()
            assert conjugacy_class(prod) == tag


class TestIshida:
    def test_cases(self):
        a, b = TorusCurve.of(1, 0), TorusCurve.of(0, 1)
        assert ishida_class(a, TorusCurve.of(-1, 0)) == sl2.ISHIDA_ISOTOPIC
        assert ishida_class(a, b) == sl2.ISHIDA_FULL_SL2
        assert ishida_class(a, TorusCurve.of(1, 2)) == sl2.ISHIDA_FREE_RANK2


class TestTwoTwist:
    def test_trivial_iff_opposite_powers_on_same_curve(self):
        curves = [
            TorusCurve.of(p, q)
            for p in range(-3, 4)
            for q in range(-3, 4)
            if (p, q) != (0, 0) and __import__("math").gcd(p, q) == 1
        ]
        for c1 in curves:
            for c2 in curves:
                for k1 in range(-3, 4):
                    for k2 in range(-3, 4):
                        verdict = two_twist_trivial(c1, k1, c2, k2)
                        expected = (k1 == 0 and k2 == 0) or (
                            c1.same_unoriented(c2) and k1 + k2 == 0
                        )
                        assert verdict.trivial == expected, (c1, k1, c2, k2)


class TestAbelianization:
    def test_generators(self):
        assert abelianization_image(R) == 1  # R = [[1,1],[0,1]] is the T generator
        assert abelianization_image(Sl2Element(0, -1, 1, 0)) == 9  # the S generator
        assert abelianization_image(Sl2Element.identity().neg()) == 6
        assert abelianization_image(Sl2Element.identity()) == 0

    def test_homomorphism(self):
        rng = random.Random(23)
        for _ in range(200):
            g, h = random_element(rng), random_element(rng)
            assert abelianization_image(g * h) == (
                abelianization_image(g) + abelianization_image(h)
            ) % 12

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=10**6))
    def test_commutators_map_to_zero(self, seed):
        rng = random.Random(seed)
        g, h = random_element(rng), random_element(rng)
        comm = g * h * g.inverse() * h.inverse()
        assert abelianization_image(comm) == 0
