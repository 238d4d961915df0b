import random
from fractions import Fraction as F

import pytest

from gctk.hyperkahler import build_model
from gctk.multivector import (
    EVector,
    Multivector,
    clifford_act,
    exp_even,
    grade_project,
    interior,
    mukai_pair,
    wedge,
    wedge_power,
)
from gctk.scalars import I, ONE, Poly, QQi, ZERO


@pytest.fixture(scope="module")
def flat():
    return build_model(1)


def dx(dim, *indices, c=ONE):
    mask = 0
    for i in indices:
        mask |= 1 << i
    return Multivector.basis(dim, mask, c)


class TestWedge:
    def test_disjoint(self):
        assert wedge(dx(4, 0, 1), dx(4, 2, 3)) == dx(4, 0, 1, 2, 3)

    def test_repeated_vanishes(self):
        assert wedge(dx(4, 0), dx(4, 0)).is_zero()

    def test_transposition_sign(self):
        assert wedge(dx(4, 1), dx(4, 0)) == dx(4, 0, 1, c=QQi(-1))

    def test_kahler_square(self, flat):
        # omega_I^2 = 2 vol on the dim-4 model
        assert wedge(flat.omega_i, flat.omega_i) == flat.vol.scale(QQi(2))

    def test_graded_commutativity(self):
        rng = random.Random(11)
        for _ in range(30):
            dim = 5
            ka = rng.randint(0, dim)
            kb = rng.randint(0, dim)
            pool_a = [x for x in range(1 << dim) if bin(x).count("1") == ka]
            pool_b = [x for x in range(1 << dim) if bin(x).count("1") == kb]
            a = Multivector(
                dim,
                {m: QQi(rng.randint(-3, 3))
                 for m in rng.sample(pool_a, min(2, len(pool_a)))},
            )
            b = Multivector(
                dim,
                {m: QQi(rng.randint(-3, 3))
                 for m in rng.sample(pool_b, min(2, len(pool_b)))},
            )
            sign = QQi(-1) if (ka * kb) % 2 else QQi(1)
            assert wedge(a, b) == wedge(b, a).scale(sign)

    def test_associativity(self):
        rng = random.Random(5)
        for _ in range(20):
            dim = 4
            mk = lambda: Multivector(
                dim, {rng.randrange(1 << dim): QQi(rng.randint(-2, 2), rng.randint(-2, 2))}
            )
            a, b, c = mk(), mk(), mk()
            assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))


class TestInterior:
    def test_first_slot(self):
        x = [ONE, ZERO, ZERO, ZERO]
        assert interior(x, dx(4, 0, 1)) == dx(4, 1)

    def test_second_slot_sign(self):
        x = [ZERO, ONE, ZERO, ZERO]
        assert interior(x, dx(4, 0, 1)) == dx(4, 0, c=QQi(-1))

    def test_on_holomorphic_form(self, flat):
        # frozen coordinate expansion: iota_{d0} sigma = dx2 + i dx3
        x = [ONE, ZERO, ZERO, ZERO]
        assert interior(x, flat.sigma) == dx(4, 2) + dx(4, 3, c=I)

    def test_graded_derivation(self):
        rng = random.Random(3)
        dim = 4
        for _ in range(20):
            k = rng.randint(0, dim)
            masks = [m for m in range(1 << dim) if bin(m).count("1") == k]
            a = Multivector(dim, {rng.choice(masks): QQi(rng.randint(-2, 2))})
            b = Multivector(dim, {rng.randrange(1 << dim): QQi(rng.randint(-2, 2))})
            x = [QQi(rng.randint(-2, 2)) for _ in range(dim)]
            lhs = interior(x, wedge(a, b))
            sign = QQi(-1) if k % 2 else QQi(1)
            rhs = wedge(interior(x, a), b) + wedge(a, interior(x, b)).scale(sign)
            assert lhs == rhs


class TestClifford:
    def test_antiholomorphic_vector_kills_sigma(self, flat):
        e = EVector([ONE, I, ZERO, ZERO], [ZERO] * 4)
        assert clifford_act(e, flat.sigma).is_zero()

    def test_holomorphic_form_kills_sigma(self, flat):
        e = EVector([ZERO] * 4, [ONE, I, ZERO, ZERO])
        assert clifford_act(e, flat.sigma).is_zero()

    def test_covector_on_unit(self):
        e = EVector([ZERO] * 4, [ONE, ZERO, ZERO, ZERO])
        assert clifford_act(e, Multivector.scalar(4)) == dx(4, 0)

    def test_square_is_inner_product(self, flat):
        from gctk.double_space import inner_product

        rng = random.Random(9)
        for _ in range(20):
            e = EVector(
                [QQi(rng.randint(-2, 2), rng.randint(-2, 2)) for _ in range(4)],
                [QQi(rng.randint(-2, 2), rng.randint(-2, 2)) for _ in range(4)],
            )
            a = Multivector(4, {rng.randrange(16): QQi(rng.randint(-2, 2))})
            lhs = clifford_act(e, clifford_act(e, a))
            assert lhs == a.scale(inner_product(e, e))


class TestMukai:
    def test_kahler_forms(self, flat):
        assert mukai_pair(flat.omega_i, flat.omega_i) == QQi(2)
        assert mukai_pair(flat.omega_i, flat.omega_j) == QQi(0)

    def test_one_minus_vol(self, flat):
        s = Multivector.scalar(4) - flat.vol
        assert mukai_pair(s, s) == QQi(2)

    def test_symbolic_quadric(self, flat):
        xs = [Poly.variable(v) for v in "XYZU"]
        lift = lambda mv: mv.map_coeffs(Poly.constant)
        s = (
            lift(flat.omega_i).scale(xs[0])
            + lift(flat.omega_j).scale(xs[1])
            + lift(flat.omega_k).scale(xs[2])
            + lift(Multivector.scalar(4) - flat.vol).scale(xs[3])
        )
        expect = 2 * (xs[0] ** 2 + xs[1] ** 2 + xs[2] ** 2 + xs[3] ** 2)
        assert mukai_pair(s, s) == expect

    def test_symmetry(self, flat):
        rng = random.Random(4)
        evens = [m for m in range(16) if bin(m).count("1") % 2 == 0]
        for _ in range(20):
            a = Multivector(4, {rng.choice(evens): QQi(rng.randint(-3, 3))})
            b = Multivector(4, {rng.choice(evens): QQi(rng.randint(-3, 3))})
            assert mukai_pair(a, b) == mukai_pair(b, a)

    def test_rejects_wrong_dim(self):
        with pytest.raises(ValueError, match="dim 4"):
            mukai_pair(Multivector.scalar(6), Multivector.scalar(6))

    def test_rejects_odd(self, flat):
        with pytest.raises(ValueError, match="even"):
            mukai_pair(dx(4, 0), flat.omega_i)


class TestExp:
    def test_kahler_exponential(self, flat):
        assert exp_even(flat.omega_i.scale(I)) == (
            Multivector.scalar(4) + flat.omega_i.scale(I) - flat.vol
        )

    def test_zero(self):
        assert exp_even(Multivector.zero(4)) == Multivector.scalar(4)

    def test_two_forms_factor(self, flat):
        b = flat.omega_k.scale(QQi(F(2, 3)))
        iw = flat.omega_j.scale(I)
        assert exp_even(b + iw) == wedge(exp_even(b), exp_even(iw))

    def test_rejects_grade_zero(self):
        with pytest.raises(ValueError, match="grade"):
            exp_even(Multivector.scalar(4))

    def test_rejects_odd_grade(self):
        with pytest.raises(ValueError, match="even"):
            exp_even(dx(4, 0))


class TestGradeProject:
    def test_picks_grade(self, flat):
        a = Multivector.scalar(4) + flat.omega_i.scale(I) - flat.vol
        assert grade_project(a, 2) == flat.omega_i.scale(I)
        assert grade_project(flat.sigma, 0).is_zero()

    def test_family_top_grade(self, flat):
        # the dim-4 family spinor has top part -i(alpha-beta) vol
        from gctk.family import family_spinor

        a, b = QQi(F(1, 3), 1), QQi(2, F(-1, 2))
        phi = family_spinor(flat, a, b)
        assert grade_project(phi, 4) == flat.vol.scale(-I * (a - b))
