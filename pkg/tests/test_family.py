import random
from fractions import Fraction as F

import pytest

from gctk.double_space import (
    gacs_from_spinor,
    is_pure,
    make_ji,
    make_jomega,
    type_of,
)
from gctk.family import (
    bi_hermitian_at,
    bi_hermitian_pair,
    bundle_spinor,
    chart_spinor,
    companion_spinor,
    companion_structure,
    evaluate_param_form,
    expansion_terms,
    family_spinor,
    family_structure,
    fiber_spinor,
    mobius,
    product_parameters,
    quadric_parameters,
    quadric_spinor,
    quadric_value,
    real_structure_check,
    rotation_psu2,
    stereographic,
    type_map,
    type_map_csv,
)
from gctk.hyperkahler import build_model, complex_structure, kahler_form, rotation_so3
from gctk.linalg import Matrix
from gctk.multivector import Multivector, exp_even, wedge_power
from gctk.scalars import (
    I,
    INF,
    NonDivisibleError,
    ONE,
    Poly,
    QQi,
    cp1_antipode,
    wirtinger,
    wirtinger_conj,
)
from gctk.verify import _proportional


@pytest.fixture(scope="module")
def flat():
    return build_model(1)


def rand_q(rng):
    return QQi(F(rng.randint(-2, 2), rng.randint(1, 3)), F(rng.randint(-2, 2), rng.randint(1, 3)))


def lift(mv):
    return mv.map_coeffs(Poly.constant)


class TestFiberSpinor:
    def test_n1_expansion(self, flat):
        # sigma + 2 i zeta (1 - sigma sigma_bar / 4) + zeta^2 sigma_bar
        rng = random.Random(2)
        from gctk.multivector import wedge

        ss = wedge(flat.sigma, flat.sigma_bar)
        for _ in range(5):
            z = rand_q(rng)
            expected = (
                flat.sigma
                + (Multivector.scalar(4) - ss.scale(QQi(F(1, 4)))).scale(QQi(0, 2) * z)
                + flat.sigma_bar.scale(z * z)
            )
            assert fiber_spinor(flat, z) == expected

    def test_zero_parameter(self):
        for n in (1, 2):
            m = build_model(n)
            assert fiber_spinor(m, QQi(0)) == wedge_power(m.sigma, n)

    def test_bfield_line_match(self, flat):
        # the member over the rational circle point (c, s) at parameter
        # s/(1+c) is the shear of a symplectic structure:
        # exp((c/s) omega_K - (i/s) omega_J), verified as spinor lines
        for c, s in ((F(3, 5), F(4, 5)), (F(5, 13), F(12, 13))):
            zeta = QQi(s / (1 + c))
            phi = fiber_spinor(flat, zeta)
            b = flat.omega_k.scale(QQi(c / s))
            iw = flat.omega_j.scale(I * QQi(F(-1) / s))
            assert _proportional(phi, exp_even(b + iw))

    def test_imaginary_parameter_line(self, flat):
        # at zeta = i/2 the line is exp(-(3/4) omega_J - (5/4) i omega_K)
        phi = fiber_spinor(flat, QQi(0, F(1, 2)))
        b = flat.omega_j.scale(QQi(F(-3, 4)))
        iw = flat.omega_k.scale(I * QQi(F(-5, 4)))
        assert _proportional(phi, exp_even(b + iw))

    def test_purity(self, flat):
        rng = random.Random(3)
        for _ in range(5):
            assert is_pure(fiber_spinor(flat, rand_q(rng)))


class TestComparisonMap:
    def test_center_fiber(self):
        rng = random.Random(4)
        for _ in range(5):
            z = rand_q(rng)
            assert product_parameters(QQi(0), z) == (z, -z)

    def test_zero_vector_hits_diagonal(self):
        rng = random.Random(5)
        for _ in range(5):
            e = rand_q(rng)
            assert product_parameters(e, QQi(0)) == (e, e)

    def test_infinity_marker(self):
        a, b = product_parameters(QQi(1), QQi(1))
        assert a is INF
        assert b == QQi(0)

    def test_psu2_identity(self):
        assert rotation_psu2(QQi(0)) == Matrix.identity(2)

    def test_psu2_moves_origin(self):
        rng = random.Random(6)
        for _ in range(5):
            eta = rand_q(rng)
            assert mobius(rotation_psu2(eta), QQi(0)) == eta

    def test_psu2_so3_correspondence(self):
        # the Moebius action on points matches the transpose of the
        # frame rotation matrix under stereographic projection
        rng = random.Random(7)
        for _ in range(5):
            eta = rand_q(rng)
            a = rotation_psu2(eta)
            r_t = rotation_so3(eta).transpose()
            w = rand_q(rng)
            vec = stereographic(w)
            rot = r_t.apply([QQi(v) for v in vec])
            assert tuple(x.re for x in rot) == stereographic(mobius(a, w))


class TestBundleSpinor:
    def test_reduces_to_fiber_spinor_at_origin(self, flat):
        rng = random.Random(8)
        for _ in range(5):
            z = rand_q(rng)
            assert bundle_spinor(flat, QQi(0), z) == fiber_spinor(flat, z)

    def test_zero_vector_gives_normalized_power(self):
        for n in (1, 2):
            m = build_model(n)
            eta = QQi(F(1, 2), F(1, 3))
            from gctk.hyperkahler import holomorphic_form_normalized

            expected = wedge_power(holomorphic_form_normalized(m, eta), n)
            assert bundle_spinor(m, eta, QQi(0)) == expected

    @pytest.mark.parametrize("n", [1, 2])
    def test_pullback_proportionality(self, n):
        m = build_model(n)
        rng = random.Random(9)
        for _ in range(8):
            eta, zeta = rand_q(rng), rand_q(rng)
            a, b = product_parameters(eta, zeta)
            assert _proportional(bundle_spinor(m, eta, zeta), family_spinor(m, a, b))


class TestFamilySpinor:
    def test_n1_closed_form(self, flat):
        al = Poly.complex_variable("a1", "a2")
        be = Poly.complex_variable("b1", "b2")
        expected = (
            lift(flat.sigma)
            + lift(flat.omega_i).scale(-(al + be))
            + lift(Multivector.scalar(4) - flat.vol).scale(I * (al - be))
            + lift(flat.sigma_bar).scale(-(al * be))
        )
        assert family_spinor(flat) == expected

    def test_origin_value(self, flat):
        assert family_spinor(flat, QQi(0), QQi(0)) == flat.sigma

    @pytest.mark.parametrize("n", [1, 2])
    def test_diagonal_value(self, n):
        from math import factorial

        m = build_model(n)
        rng = random.Random(10)
        for _ in range(4):
            a = rand_q(rng)
            s_a = (
                m.sigma
                - m.omega_i.scale(QQi(2) * a)
                - m.sigma_bar.scale(a * a)
            )
            expected = wedge_power(s_a, n).scale(QQi(F(1, factorial(n))))
            assert family_spinor(m, a, a) == expected

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_bidegree(self, n):
        sym = family_spinor(build_model(n))
        for c in sym.coeffs.values():
            assert c.degree_in(("a1", "a2")) <= n
            assert c.degree_in(("b1", "b2")) <= n

    @pytest.mark.parametrize("n", [1, 2])
    def test_holomorphy(self, n):
        sym = family_spinor(build_model(n))
        for c in sym.coeffs.values():
            assert wirtinger(c, "a1", "a2").is_zero()
            assert wirtinger(c, "b1", "b2").is_zero()

    @pytest.mark.parametrize("n", [1, 2])
    def test_divisibility_of_terms(self, n):
        divisor = Poly.complex_variable("a1", "a2") - Poly.complex_variable("b1", "b2")
        for j, term in enumerate(expansion_terms(n)):
            if j == n:
                continue
            term.map_coeffs(lambda c: c.divide_exact(divisor))

    def test_middle_term_not_divisible(self, flat):
        divisor = Poly.complex_variable("a1", "a2") - Poly.complex_variable("b1", "b2")
        term = expansion_terms(1)[1]
        with pytest.raises(NonDivisibleError):
            term.map_coeffs(lambda c: c.divide_exact(divisor))

    def test_infinity_chart_evaluation(self, flat):
        # (0, inf) is the pure symplectic member: the tangent block of the
        # structure vanishes entirely
        phi = family_spinor(flat, QQi(0), INF)
        j = gacs_from_spinor(phi)
        assert j.block_a.is_zero()
        assert type_of(j) == 0

    def test_chart_consistency(self, flat):
        rng = random.Random(11)
        for _ in range(5):
            a, b = rand_q(rng), rand_q(rng)
            if a.is_zero() or b.is_zero():
                continue
            base = family_spinor(flat, a, b)
            for ca in (0, 1):
                for cb in (0, 1):
                    u = a.inv() if ca else a
                    v = b.inv() if cb else b
                    other = evaluate_param_form(chart_spinor(1, ca, cb), u, v)
                    assert _proportional(base, other)


class TestQuadric:
    def test_parametrization_reproduces_family(self, flat):
        rng = random.Random(12)
        for _ in range(6):
            a, b = rand_q(rng), rand_q(rng)
            coords = quadric_parameters(a, b)
            assert quadric_value(*coords).is_zero()
            assert quadric_spinor(flat, *coords) == family_spinor(flat, a, b)

    def test_sigma_member(self, flat):
        s = quadric_spinor(flat, QQi(0), QQi(1), I, QQi(0))
        assert s == flat.sigma
        assert is_pure(s)

    def test_off_quadric_not_pure(self, flat):
        s = quadric_spinor(flat, QQi(1), QQi(0), QQi(0), QQi(0))
        assert s == flat.omega_i
        assert quadric_value(QQi(1), QQi(0), QQi(0), QQi(0)) == QQi(1)
        assert not is_pure(s)

    def test_requires_dim4(self):
        with pytest.raises(ValueError, match="dim-4"):
            quadric_spinor(build_model(2), QQi(1), QQi(0), QQi(0), QQi(0))


class TestBiHermitian:
    def test_kahler_special_case(self, flat):
        j, jp = bi_hermitian_pair(
            flat.i_mat, flat.omega_i, flat.i_mat, flat.omega_i
        )
        assert j == make_ji(flat.i_mat)
        assert jp == make_jomega(flat.omega_i)

    def test_flip_swaps_outputs(self, flat):
        j, jp = bi_hermitian_pair(flat.i_mat, flat.omega_i, flat.j_mat, flat.omega_j)
        j2, jp2 = bi_hermitian_pair(
            flat.i_mat, flat.omega_i, -flat.j_mat,
            flat.omega_j.scale(QQi(-1)),
        )
        assert j2 == jp
        assert jp2 == j

    def test_rejects_mismatched_form(self, flat):
        with pytest.raises(ValueError, match="Hermitian"):
            bi_hermitian_pair(flat.i_mat, flat.omega_j, flat.j_mat, flat.omega_j)

    @pytest.mark.parametrize("n", [1, 2])
    def test_identification_with_spinor_family(self, n):
        m = build_model(n)
        rng = random.Random(13)
        for _ in range(6):
            a, b = rand_q(rng), rand_q(rng)
            j, jp = bi_hermitian_at(m, a, b)
            assert family_structure(m, a, b) == j
            assert companion_structure(m, a, b) == jp

    def test_orientation_is_pinned(self, flat):
        # regression: the spinor family pairs the plus structure with the
        # SECOND parameter; swapping the roles must break the match at a
        # generic point
        a, b = QQi(0), QQi(0, 1)
        swapped, _ = bi_hermitian_pair(
            complex_structure(flat, a), kahler_form(flat, a),
            complex_structure(flat, b), kahler_form(flat, b),
        )
        assert family_structure(flat, a, b) != swapped

    def test_commuting_metric_pair(self, flat):
        from gctk.double_space import pairing_matrix
        from gctk.linalg import inertia

        rng = random.Random(14)
        for _ in range(4):
            a, b = rand_q(rng), rand_q(rng)
            j, jp = bi_hermitian_at(flat, a, b)
            assert (j.matrix @ jp.matrix) == (jp.matrix @ j.matrix)
            g = -(j.matrix.transpose() @ pairing_matrix(4) @ jp.matrix)
            assert inertia(g) == (8, 0, 0)


class TestCompanion:
    def test_kahler_point(self, flat):
        # at the double origin the companion is the symplectic structure
        assert companion_structure(flat, QQi(0), QQi(0)) == make_jomega(flat.omega_i)
        assert _proportional(
            companion_spinor(flat, QQi(0), QQi(0)),
            exp_even(flat.omega_i.scale(I)),
        )

    def test_dependence_profile(self, flat):
        symbolic = companion_spinor(flat)
        saw_conj = False
        for c in symbolic.coeffs.values():
            assert wirtinger_conj(c, "a1", "a2").is_zero()
            assert wirtinger(c, "b1", "b2").is_zero()
            if not wirtinger(c, "a1", "a2").is_zero():
                saw_conj = True
        assert saw_conj

    def test_matches_antipodal_family_line(self, flat):
        rng = random.Random(15)
        for _ in range(5):
            a, b = rand_q(rng), rand_q(rng)
            if a.is_zero():
                continue
            direct = family_spinor(flat, cp1_antipode(a), b)
            assert _proportional(companion_spinor(flat, a, b), direct)


class TestTypeMap:
    def test_values_and_shape(self, flat):
        rows = type_map(flat, 3)
        assert len(rows) == 4 * 9
        by_key = {
            (r["chart_a"], r["chart_b"], r["alpha_re"], r["beta_re"]): r["type"]
            for r in rows
        }
        assert by_key[(0, 0, F(0), F(0))] == 2  # diagonal, complex type
        assert by_key[(0, 0, F(0), F(1))] == 0  # off-diagonal, symplectic
        # (0, inf): origin in the base chart against the second-chart origin
        assert by_key[(0, 1, F(0), F(0))] == 0

    def test_total_space_shift(self, flat):
        fiber = type_map(flat, 2, fiber=True)
        total = type_map(flat, 2, fiber=False)
        assert all(t["type"] == f["type"] + 2 for f, t in zip(fiber, total))

    def test_csv_shape(self, flat):
        text = type_map_csv(type_map(flat, 2))
        lines = text.split("\n")
        assert lines[0] == "alpha_re,alpha_im,beta_re,beta_im,chart_a,chart_b,type"
        assert len(lines) == 1 + 16 + 1  # header + rows + trailing newline
        assert text == type_map_csv(type_map(flat, 2))  # deterministic

    def test_grid_too_small(self, flat):
        with pytest.raises(ValueError, match="grid"):
            type_map(flat, 1)


class TestRealStructure:
    def test_fixed_samples(self, flat):
        samples = [(QQi(1), QQi(1)), (QQi(1), QQi(0, 1)), (QQi(F(1, 2), 1), QQi(2, -1))]
        assert real_structure_check(flat, samples)

    def test_rejects_origin(self, flat):
        with pytest.raises(ValueError, match="origin"):
            real_structure_check(flat, [(QQi(0), QQi(1))])
