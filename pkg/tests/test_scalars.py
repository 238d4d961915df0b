from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from gctk.scalars import (
    INF,
    NonDivisibleError,
    Poly,
    QQi,
    cp1_antipode,
    parse_rational_complex,
    poly_divide_exact,
    poly_eval,
    wirtinger,
    wirtinger_conj,
)

I = QQi(0, 1)


def var(name):
    return Poly.variable(name)


class TestQQi:
    def test_field_ops(self):
        a = QQi(F(1, 2), F(1, 3))
        b = QQi(F(-2, 5), 1)
        assert a + b == QQi(F(1, 10), F(4, 3))
        assert a * b.inv() * b == a
        assert (a - a).is_zero()

    def test_conj_abs2(self):
        z = QQi(F(3, 5), F(4, 5))
        assert z.abs2() == 1
        assert z * z.conjugate() == QQi(1)

    def test_pow_negative(self):
        z = QQi(0, 2)
        assert z ** -2 == QQi(F(-1, 4))

    def test_zero_division(self):
        with pytest.raises(ZeroDivisionError):
            QQi(0).inv()

    def test_antipode(self):
        assert cp1_antipode(QQi(0)) is INF
        assert cp1_antipode(INF) == QQi(0)
        assert cp1_antipode(QQi(0, 1)) == QQi(0, -1)
        assert cp1_antipode(cp1_antipode(QQi(F(2, 3), F(-1, 5)))) == QQi(F(2, 3), F(-1, 5))


class TestLiterals:
    @pytest.mark.parametrize(
        "text,expect",
        [
            ("0", QQi(0)),
            ("1/2", QQi(F(1, 2))),
            ("-3", QQi(-3)),
            ("1/2+1/3i", QQi(F(1, 2), F(1, 3))),
            ("1+-2i", QQi(1, -2)),
        ],
    )
    def test_parse(self, text, expect):
        assert parse_rational_complex(text) == expect

    @pytest.mark.parametrize("bad", ["0.5", "1/2 + 1/3i", "1i", "x", "1/0.5"])
    def test_parse_rejects(self, bad):
        with pytest.raises(ValueError):
            parse_rational_complex(bad)


class TestPolyEval:
    def test_unit_circle(self):
        p = var("a1") ** 2 + var("a2") ** 2
        assert poly_eval(p, {"a1": F(3, 5), "a2": F(4, 5)}) == QQi(1)

    def test_zero_poly(self):
        assert poly_eval(Poly.zero(), {"a1": 7}) == QQi(0)

    def test_derivative_of_product(self):
        p = (var("a1") * var("a2")).diff("a1")
        assert poly_eval(p, {"a1": 2, "a2": 7}) == QQi(7)

    def test_missing_variable(self):
        with pytest.raises(ValueError, match="missing variable"):
            poly_eval(var("a1"), {})

    def test_rejects_complex_values(self):
        with pytest.raises(ValueError, match="real"):
            poly_eval(var("a1"), {"a1": QQi(0, 1)})


class TestDivision:
    def test_difference_of_squares(self):
        p = var("a1") ** 2 - var("b1") ** 2
        q = var("a1") - var("b1")
        assert poly_divide_exact(p, q) == var("a1") + var("b1")

    def test_non_divisible(self):
        with pytest.raises(NonDivisibleError):
            poly_divide_exact(var("a1"), var("b1"))

    def test_zero_divisor(self):
        with pytest.raises(ZeroDivisionError):
            poly_divide_exact(var("a1"), Poly.zero())

    def test_complexified_parameters(self):
        # oracle: build (alpha - beta)(alpha + beta) by multiplication over
        # real variable pairs, divide back out, compare
        alpha = Poly.complex_variable("a1", "a2")
        beta = Poly.complex_variable("b1", "b2")
        product = (alpha - beta) * (alpha + beta)
        assert poly_divide_exact(product, alpha - beta) == alpha + beta


small_coeff = st.fractions(
    min_value=-3, max_value=3, max_denominator=4
)


@st.composite
def polys(draw, names=("u", "v")):
    terms = {}
    for _ in range(draw(st.integers(0, 4))):
        key = tuple(draw(st.integers(0, 2)) for _ in names)
        c = QQi(draw(small_coeff), draw(small_coeff))
        if not c.is_zero():
            terms[key] = c
    return Poly(tuple(names), terms)


class TestPolyRing:
    @settings(max_examples=40, deadline=None)
    @given(polys(), polys(), polys())
    def test_ring_axioms(self, p, q, r):
        assert (p + q) * r == p * r + q * r
        assert (p * q) * r == p * (q * r)
        assert p + q == q + p

    @settings(max_examples=40, deadline=None)
    @given(polys())
    def test_mixed_partials(self, p):
        assert p.diff("u").diff("v") == p.diff("v").diff("u")

    @settings(max_examples=40, deadline=None)
    @given(polys(), polys())
    def test_divide_round_trip(self, q, r):
        if q.is_zero():
            return
        assert poly_divide_exact(q * r, q) == r

    def test_variable_unification(self):
        p = var("x") + var("z")
        q = var("y")
        assert (p + q) - q == p


class TestWirtinger:
    def test_holomorphic_vanishes(self):
        z = Poly.complex_variable("a1", "a2")
        p = z ** 3 + QQi(2, 1) * z
        assert wirtinger(p, "a1", "a2").is_zero()
        assert not wirtinger_conj(p, "a1", "a2").is_zero()

    def test_antiholomorphic_detected(self):
        zbar = var("a1") - I * var("a2")
        assert not wirtinger(zbar, "a1", "a2").is_zero()
        assert wirtinger_conj(zbar, "a1", "a2").is_zero()


class TestRendering:
    def test_sorted_terms(self):
        p = var("b") * var("b") + var("a") + Poly.constant(QQi(F(1, 2), F(1, 3)))
        assert str(p) == "1/2+1/3*i + 1*a + 1*b^2"


def test_one_way_float_conversion():
    from gctk.scalars import to_float_complex

    z = to_float_complex(QQi(F(1, 4), F(-3, 2)))
    assert z == complex(0.25, -1.5)
