import random
from fractions import Fraction

import pytest

from equisingular.free_graded import (
    BadConstantTerm,
    NCSeries,
    all_words,
    birkhoff_series,
    bracket,
    is_grouplike,
    is_primitive,
    shuffle,
    word_degree,
)
from equisingular.scalar_series import LaurentSeries, PolyCoeff


def e(n, trunc=6):
    return NCSeries.generator(n, trunc=trunc)


def rand_lie(rng, max_degree=4, trunc=6):
    """Random Lie series: combination of left-normed bracket words."""
    out = NCSeries.zero(trunc)
    for w in all_words(max_degree):
        if rng.random() < 0.4:
            nested = e(w[-1], trunc)
            for k in reversed(w[:-1]):
                nested = bracket(e(k, trunc), nested)
            out = out + nested.scale(Fraction(rng.randint(-3, 3), rng.randint(1, 3)))
    return out


class TestConcatProduct:
    def test_unit_cross_term(self):
        x = NCSeries.one() + e(1)
        y = NCSeries.one() + e(2)
        assert x * y == NCSeries({(): 1, (1,): 1, (2,): 1, (1, 2): 1})

    def test_identity(self):
        x = NCSeries({(1, 2): Fraction(3)})
        assert x * NCSeries.one() == x

    def test_letter_square(self):
        assert e(1) * e(1) == NCSeries({(1, 1): 1})

    def test_truncation(self):
        x = e(3) * e(3)
        assert x.coefficient((3, 3)) == 1
        assert (x * e(1)).is_zero()  # degree 7 > 6


class TestBracket:
    def test_free_bracket(self):
        assert bracket(e(1), e(2)) == NCSeries({(1, 2): 1, (2, 1): -1})

    def test_antisymmetry(self):
        rng = random.Random(2)
        x = rand_lie(rng)
        assert bracket(x, x).is_zero()

    def test_jacobi(self):
        rng = random.Random(4)
        for _ in range(5):
            x, y, z = (rand_lie(rng, max_degree=2) for _ in range(3))
            total = (
                bracket(x, bracket(y, z))
                + bracket(y, bracket(z, x))
                + bracket(z, bracket(x, y))
            )
            assert total.is_zero()

    def test_grading_operator_on_generators(self):
        # the Z0 adjoint action is the grading: [Z0, e_n] = n e_n
        for n in (1, 2, 5):
            assert e(n).apply_grading() == e(n).scale(Fraction(n))

    def test_grading_on_random_lie(self):
        rng = random.Random(8)
        x = rand_lie(rng)
        expected = NCSeries.zero(x.trunc)
        for n, comp in x.graded_components().items():
            expected = expected + comp.scale(Fraction(n))
        assert x.apply_grading() == expected


class TestExpLog:
    def test_exp_single_generator(self):
        g = NCSeries.generator(1, trunc=3).exp()
        assert g.coefficient(()) == 1
        assert g.coefficient((1,)) == 1
        assert g.coefficient((1, 1)) == Fraction(1, 2)
        assert g.coefficient((1, 1, 1)) == Fraction(1, 6)

    def test_log_one(self):
        assert NCSeries.one().log().is_zero()

    def test_exp_polynomial_coefficients(self):
        t = PolyCoeff.symbol("t")
        x = (e(1) + e(2)).scale(t)
        g = x.exp()
        assert g.coefficient((1, 1)) == t * t * Fraction(1, 2)

    def test_roundtrips(self):
        rng = random.Random(6)
        x = rand_lie(rng, max_degree=3)
        assert x.exp().log() == x
        g = x.exp()
        assert g.log().exp() == g

    def test_bad_constant_term(self):
        with pytest.raises(BadConstantTerm):
            NCSeries.one().exp()
        with pytest.raises(BadConstantTerm):
            e(1).log()

    def test_group_inverse(self):
        rng = random.Random(9)
        g = rand_lie(rng, max_degree=3).exp()
        assert g * g.group_inverse() == NCSeries.one()
        assert g.group_inverse() * g == NCSeries.one()


class TestGradeScale:
    def test_symbolic_v(self):
        v = PolyCoeff.symbol("v")
        assert e(2).grade_scale(v) == e(2).scale(v * v)

    def test_unit_untouched(self):
        one = NCSeries.one()
        assert one.grade_scale(PolyCoeff.symbol("v")) == one

    def test_theta_exponential_expansion(self):
        zL = LaurentSeries({1: PolyCoeff.symbol("L")})
        g = e(1).theta_action(zL)
        c = g.coefficient((1,))
        assert c.coefficient(0) == PolyCoeff.symbol("L", 0)  # 1
        assert c.coefficient(1) == PolyCoeff.symbol("L")
        assert c.coefficient(2) == PolyCoeff.symbol("L", 2, Fraction(1, 2))

    def test_theta_composes_with_symbol_shift(self):
        # shifting L -> L + t inside theta_{zL} equals acting by theta_{zt} after
        zL = LaurentSeries({1: PolyCoeff.symbol("L")})
        zt = LaurentSeries({1: PolyCoeff.symbol("t")})
        x = e(1) + e(2) + e(1) * e(2)
        a = x.theta_action(zL).map_coefficients(
            lambda c: LaurentSeries.promote(c, x.trunc).shift_symbol("L", PolyCoeff.symbol("t"))
        )
        b = x.theta_action(zL).theta_action(zt)
        assert a == b

    def test_one_parameter_group_law(self):
        x = e(1) + e(3) + e(2) * e(2)
        for u1, u2 in [(Fraction(2), Fraction(3)), (Fraction(1, 2), Fraction(-2))]:
            assert x.grade_scale(u1).grade_scale(u2) == x.grade_scale(u1 * u2)
        v = PolyCoeff.symbol("v")
        s = PolyCoeff.symbol("s")
        assert x.grade_scale(v).grade_scale(s) == x.grade_scale(v * s)

    def test_grading_is_derivation(self):
        rng = random.Random(12)
        x, y = rand_lie(rng, 3).exp(), rand_lie(rng, 3).exp()
        lhs = (x * y).apply_grading()
        rhs = x.apply_grading() * y + x * y.apply_grading()
        assert lhs == rhs


class TestShuffle:
    def test_two_letters(self):
        assert shuffle((1,), (2,)) == NCSeries({(1, 2): 1, (2, 1): 1})

    def test_unit(self):
        assert shuffle((), (3, 1)) == NCSeries({(3, 1): 1})

    def test_multiplicity(self):
        assert shuffle((1,), (1,)) == NCSeries({(1, 1): 2})


class TestGrouplike:
    def test_exp_of_primitive_is_grouplike(self):
        assert is_grouplike((e(1) + e(2)).exp())

    def test_missing_lower_terms(self):
        g = NCSeries.one() + e(1) * e(2)
        assert not is_grouplike(g)

    def test_unit_is_grouplike(self):
        assert is_grouplike(NCSeries.one())

    def test_exp_of_random_primitives(self):
        rng = random.Random(21)
        for _ in range(3):
            x = rand_lie(rng, max_degree=3, trunc=5)
            assert is_primitive(x)
            assert is_grouplike(x.exp())

    def test_brackets_are_primitive(self):
        assert is_primitive(bracket(e(1), bracket(e(1), e(2))))


class TestSeriesBirkhoff:
    def test_pole_only_primitive_value(self):
        a = LaurentSeries({-1: 2, 0: 3})
        g = NCSeries.one() + NCSeries({(1,): a})
        minus, plus = birkhoff_series(g)
        assert minus.coefficient((1,)) == LaurentSeries({-1: -2})
        assert plus.coefficient((1,)) == LaurentSeries({0: 3})

    def test_reconstruction(self):
        rng = random.Random(31)
        for _ in range(5):
            x = rand_lie(rng, max_degree=4, trunc=4)
            pole = LaurentSeries({-1: Fraction(rng.randint(1, 3))}, trunc=4)
            g = x.map_coefficients(lambda c: pole * c + LaurentSeries.promote(c, 4)).exp()
            minus, plus = birkhoff_series(g)
            assert minus.group_inverse() * plus == g
            for w, c in minus.without_unit().terms():
                assert c.pole_order > 0 and c.regular_part().is_zero()
            for w, c in plus.terms():
                assert LaurentSeries.promote(c, 4).pole_order == 0
