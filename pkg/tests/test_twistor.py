import random
from fractions import Fraction as F

import numpy as np
import pytest

from gctk import linalg
from gctk.courant import ext_d
from gctk.double_space import gacs_from_spinor, is_gacs, type_of
from gctk.family import (
    companion_structure,
    family_spinor,
    family_structure,
)
from gctk.hyperkahler import build_model
from gctk.multivector import Multivector, wedge
from gctk.scalars import I, ONE, Poly, QQi, ZERO, cp1_antipode
from gctk.twistor import (
    companion_twistor_spinor,
    companion_twistor_spinor_closed,
    evaluate_twistor_spinor,
    model_block_indices,
    point_structures,
    pseudo_kahler_form,
    pseudo_kahler_signature,
    total_coords,
    twistor_spinor,
    twistor_spinor_closed,
    twistor_type,
)


@pytest.fixture(scope="module")
def flat():
    return build_model(1)


def rand_q(rng):
    return QQi(F(rng.randint(-2, 2), rng.randint(1, 3)), F(rng.randint(-2, 2), rng.randint(1, 3)))


class TestGlobalSpinor:
    def test_top_model_grade_term(self, flat):
        # the grade-6 part over the volume mask carries -i(alpha - beta)
        pf = twistor_spinor(flat)
        al = Poly.complex_variable("a1", "a2")
        be = Poly.complex_variable("b1", "b2")
        vol_da1_db1 = 0b001111 | (1 << 4) | (1 << 6)
        assert pf.form.coeffs[vol_da1_db1] == -I * (al - be)

    def test_restriction_recovers_fiber_spinor(self, flat):
        rng = random.Random(1)
        pf = twistor_spinor(flat)
        a, b = rand_q(rng), rand_q(rng)
        value = evaluate_twistor_spinor(pf, flat, a, b)
        da = Multivector(8, {1 << 4: ONE, 1 << 5: I})
        db = Multivector(8, {1 << 6: ONE, 1 << 7: I})
        phi = family_spinor(flat, a, b)
        expected = wedge(wedge(Multivector(8, dict(phi.coeffs)), da), db)
        assert value == expected

    def test_diagonal_restriction_leading_term(self, flat):
        # substituting the diagonal b = a leaves (1/n!) sigma_a^n wedge
        # the two sphere forms
        pf = twistor_spinor(flat)
        sub = {"b1": Poly.variable("a1"), "b2": Poly.variable("a2")}
        diag = pf.form.map_coeffs(lambda c: c.substitute(sub))
        al = Poly.complex_variable("a1", "a2")
        lift = lambda mv: Multivector(8, {k: Poly.constant(c) for k, c in mv.coeffs.items()})
        s_a = (
            lift(flat.sigma)
            + lift(flat.omega_i).scale(QQi(-2) * al)
            + lift(flat.sigma_bar).scale(-(al * al))
        )
        da = Multivector(8, {1 << 4: Poly.constant(ONE), 1 << 5: Poly.constant(I)})
        db = Multivector(8, {1 << 6: Poly.constant(ONE), 1 << 7: Poly.constant(I)})
        assert diag == wedge(wedge(s_a, da), db)

    @pytest.mark.parametrize("n", [1, 2])
    def test_closed(self, n):
        assert twistor_spinor_closed(build_model(n))

    def test_mutation_detected(self, flat):
        assert not twistor_spinor_closed(flat, mutate="nonclosed-omega")
        bad = ext_d(twistor_spinor(flat, mutate="nonclosed-omega"))
        assert not bad.is_zero()

    def test_unknown_mutation(self, flat):
        with pytest.raises(ValueError, match="unknown mutation"):
            twistor_spinor(flat, mutate="flip-everything")

    @pytest.mark.parametrize("n", [1, 2])
    def test_companion_closed(self, n):
        assert companion_twistor_spinor_closed(build_model(n))


class TestPointStructures:
    def test_gacs_and_commute(self, flat):
        rng = random.Random(2)
        for _ in range(3):
            a, b = rand_q(rng), rand_q(rng)
            j, jp = point_structures(flat, a, b)
            assert is_gacs(j) and is_gacs(jp)
            assert (j.matrix @ jp.matrix) == (jp.matrix @ j.matrix)

    def test_types(self, flat):
        assert twistor_type(flat, QQi(0), QQi(1)) == 2
        assert twistor_type(flat, QQi(0), QQi(0)) == 4

    def test_types_n2(self):
        m = build_model(2)
        assert twistor_type(m, QQi(0), QQi(0)) == 6
        assert twistor_type(m, QQi(0), QQi(1)) == 2

    def test_spinor_dictionary(self, flat):
        rng = random.Random(3)
        pf = twistor_spinor(flat)
        pfp = companion_twistor_spinor(flat)
        for _ in range(2):
            a, b = rand_q(rng), rand_q(rng)
            j, jp = point_structures(flat, a, b)
            assert gacs_from_spinor(evaluate_twistor_spinor(pf, flat, a, b)) == j
            assert gacs_from_spinor(evaluate_twistor_spinor(pfp, flat, a, b)) == jp

    def test_real_involution_on_fibers(self, flat):
        rng = random.Random(4)
        for _ in range(3):
            a, b = rand_q(rng), rand_q(rng)
            if a.is_zero() or b.is_zero():
                continue
            aa, bb = cp1_antipode(a), cp1_antipode(b)
            assert family_structure(flat, aa, bb) == -family_structure(flat, a, b)
            assert companion_structure(flat, aa, bb) == -companion_structure(flat, a, b)


class TestSignature:
    def test_n1_values(self, flat):
        assert pseudo_kahler_signature(flat, QQi(0), QQi(0)) == (12, 4)
        assert pseudo_kahler_signature(flat, QQi(F(1, 2), 1), QQi(-1, F(1, 3))) == (12, 4)

    def test_n2_value(self):
        m = build_model(2)
        assert pseudo_kahler_signature(m, QQi(F(1, 2)), QQi(0, 1)) == (20, 4)

    def test_model_restriction_positive(self, flat):
        g = pseudo_kahler_form(flat, QQi(1), QQi(0, 1))
        idx = model_block_indices(flat)
        sub = g.submatrix(idx, idx)
        assert linalg.inertia(sub) == (8, 0, 0)

    def test_float_cross_check(self, flat):
        g = pseudo_kahler_form(flat, QQi(F(2, 3)), QQi(F(-1, 2), 1))
        rows = linalg.to_float_rows(g)
        eig = np.linalg.eigvalsh(np.array(rows))
        assert (int((eig > 1e-9).sum()), int((eig < -1e-9).sum())) == (12, 4)
        assert linalg.inertia_float(rows)[:2] == (12, 4)


class TestCoordinates:
    def test_total_coords(self):
        assert total_coords(1) == ("x0", "x1", "x2", "x3", "a1", "a2", "b1", "b2")
