"""Verification suites: every structural identity of the toolkit run as a
named check with an exact residual, assembled into a machine-readable
report.  Sample points are drawn from a seeded generator so reports are
reproducible; elapsed times are the only nondeterministic field.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import __version__, linalg
from .courant import (
    PolyForm,
    PolySection,
    constant_form,
    derived_bracket_check,
    dorfman,
    ext_d,
)
from .double_space import (
    bfield_transform,
    dirac_of,
    gacs_from_spinor,
    is_gacs,
    is_pure,
    make_ji,
    make_jomega,
    pairing_matrix,
    spans_equal,
    annihilator,
    type_of,
)
from .family import (
    _map_samples,
    bi_hermitian_at,
    bundle_spinor,
    chart_spinor,
    companion_spinor,
    companion_structure,
    evaluate_param_form,
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
)
from .hyperkahler import (
    build_model,
    complex_structure,
    generalized_metric,
    holomorphic_form,
    holomorphic_form_normalized,
    kahler_form,
    rotation_so3,
)
from .linalg import Matrix
from .multivector import EVector, Multivector, clifford_act, mukai_pair, wedge, wedge_power
from .scalars import (
    I as IMAG,
    ONE,
    Poly,
    QQi,
    ZERO,
    cp1_antipode,
    is_inf,
    wirtinger,
    wirtinger_conj,
)
from .twistor import (
    companion_twistor_spinor,
    companion_twistor_spinor_closed,
    evaluate_twistor_spinor,
    point_structures,
    pseudo_kahler_signature,
    twistor_spinor,
    twistor_spinor_closed,
    twistor_type,
)

SCHEMA_VERSION = 1


@dataclass
class CheckResult:
    check_id: str
    n: int
    parameters: dict
    status: str  # pass | fail | skip
    residual: str | float | None
    elapsed_ms: float


@dataclass
class Report:
    suite: str
    toolkit_version: str
    seed: int
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def failing_ids(self) -> list[str]:
        return [c.check_id for c in self.checks if c.status == "fail"]

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "suite": self.suite,
            "toolkit_version": self.toolkit_version,
            "seed": self.seed,
            "checks": [
                {
                    "check_id": c.check_id,
                    "n": c.n,
                    "parameters": c.parameters,
                    "status": c.status,
                    "residual": c.residual,
                    "elapsed_ms": c.elapsed_ms,
                }
                for c in self.checks
            ],
        }


def random_rational(rng: random.Random, span: int = 2, den: int = 3) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, den))


def random_point(rng: random.Random) -> QQi:
    return QQi(random_rational(rng), random_rational(rng))


def random_nonzero_point(rng: random.Random) -> QQi:
    while True:
        z = random_point(rng)
        if not z.is_zero():
            return z


def random_poly(rng: random.Random, coords: Sequence[str], degree: int = 2) -> Poly:
    total = Poly.zero()
    for _ in range(3):
        c = QQi(random_rational(rng), random_rational(rng))
        term = Poly.constant(c)
        for _ in range(rng.randint(0, degree)):
            term = term * Poly.variable(rng.choice(list(coords)))
        total = total + term
    return total


def random_section(rng: random.Random, coords: Sequence[str]) -> PolySection:
    d = len(coords)
    return PolySection(
        tuple(coords),
        tuple(random_poly(rng, coords) for _ in range(d)),
        tuple(random_poly(rng, coords) for _ in range(d)),
    )


def random_polyform(rng: random.Random, coords: Sequence[str]) -> PolyForm:
    d = len(coords)
    masks = rng.sample(range(1 << d), 4)
    return PolyForm(
        Multivector(d, {m: random_poly(rng, coords, 1) for m in masks}),
        tuple(coords),
    )


# -- the suite -------------------------------------------------------------------


def suite_manifest(n: int, mutate: str | None = None) -> list[str]:
    """Ordered check ids for the suite at quaternionic dimension n."""
    ids = [
        "inner_product_signature",
        "clifford_square_relation",
        "rotation_so3_lemma",
        "rotated_form_purity",
        "theta_family_bfield",
        "psu2_so3_correspondence",
        "family_diagonal_value",
        "family_divisibility",
        "family_bidegree",
        "family_holomorphy",
        "family_purity_samples",
        "three_family_identification",
        "pullback_proportionality",
        "mukai_quadric",
        "real_structure",
        "courant_identities",
        "generalized_metric_compatibility",
        "dpsi_zero",
        "dpsi_prime_zero",
        "pseudo_kahler",
        "type_stratification",
        "chart_consistency",
        "twistor_point_dictionary",
    ]
    if n == 1:
        ids.insert(6, "family_n1_formula")
    return ids


def run_suite(
    n: int,
    seed: int = 0,
    samples: int = 50,
    tol: float = 1e-9,
    mutate: str | None = None,
) -> Report:
    """Run every check of the suite for one quaternionic dimension."""
    if not 1 <= n <= 3:
        raise ValueError("n must be 1, 2 or 3")
    report = Report(suite=f"verify-n{n}", toolkit_version=__version__, seed=seed)
    model = build_model(n)
    rng = random.Random(seed)
    checks: dict[str, Callable[[], tuple[bool, str | float | None, dict]]] = {}

    def register(check_id: str):
        def deco(fn):
            checks[check_id] = fn
            return fn
        return deco

    # ---- pointwise algebra ----

    @register("inner_product_signature")
    def _check_signature():
        pos, neg, zero = linalg.inertia(pairing_matrix(model.dim))
        ok = (pos, neg, zero) == (model.dim, model.dim, 0)
        return ok, "exact-zero" if ok else f"({pos},{neg},{zero})", {"expected": [model.dim, model.dim]}

    @register("clifford_square_relation")
    def _check_clifford():
        d = model.dim
        trials = min(samples, 20)
        for _ in range(trials):
            e = EVector(
                [random_point(rng) for _ in range(d)],
                [random_point(rng) for _ in range(d)],
            )
            a = Multivector(d, {rng.randrange(1 << d): random_point(rng) for _ in range(3)})
            from .double_space import inner_product

            lhs = clifford_act(e, clifford_act(e, a))
            rhs = a.scale(inner_product(e, e))
            if lhs != rhs:
                return False, "mismatch", {"trials": trials}
        return True, "exact-zero", {"trials": trials}

    @register("rotation_so3_lemma")
    def _check_so3():
        count = max(samples, 50)
        for _ in range(count):
            eta = random_point(rng)
            r = rotation_so3(eta)
            if (r.transpose() @ r) != Matrix.identity(3):
                return False, "not orthogonal", {"eta": str(eta)}
            det = (
                r[0, 0] * (r[1, 1] * r[2, 2] - r[1, 2] * r[2, 1])
                - r[0, 1] * (r[1, 0] * r[2, 2] - r[1, 2] * r[2, 0])
                + r[0, 2] * (r[1, 0] * r[2, 1] - r[1, 1] * r[2, 0])
            )
            if det != ONE:
                return False, "det != 1", {"eta": str(eta)}
            trip = (model.omega_i, model.omega_j, model.omega_k)
            expected = [
                trip[0].scale(r[k, 0]) + trip[1].scale(r[k, 1]) + trip[2].scale(r[k, 2])
                for k in range(3)
            ]
            s_prime = holomorphic_form_normalized(model, eta)
            got = [
                kahler_form(model, eta),
                (s_prime + s_prime.conjugate()).scale(QQi(Fraction(1, 2))),
                (s_prime - s_prime.conjugate()).scale(QQi(Fraction(1, 2)) * (-IMAG)),
            ]
            if got != expected:
                return False, "form identity fails", {"eta": str(eta)}
        return True, "exact-zero", {"count": count}

    @register("rotated_form_purity")
    def _check_rotated_purity():
        for _ in range(5):
            eta = random_point(rng)
            s_eta = holomorphic_form(model, eta)
            power = wedge_power(s_eta, n)
            if not is_pure(power):
                return False, "not pure", {"eta": str(eta)}
            if not spans_equal(
                annihilator(power), dirac_of(make_ji(complex_structure(model, eta)))
            ):
                return False, "wrong annihilator", {"eta": str(eta)}
            if not wedge(power, s_eta).is_zero():
                return False, "n+1 power nonzero", {"eta": str(eta)}
        return True, "exact-zero", {"count": 5}

    @register("theta_family_bfield")
    def _check_theta():
        circle = [(Fraction(3, 5), Fraction(4, 5)), (Fraction(5, 13), Fraction(12, 13)), (Fraction(0), Fraction(1))]
        ji = make_ji(model.i_mat)
        jwj = make_jomega(model.omega_j)
        for c, s in circle:
            lhs = ji.scale(QQi(c)) + jwj.scale(QQi(s))
            omega = model.omega_j.scale(QQi(1 / s))
            b = model.omega_k.scale(QQi(-c / s))
            rhs = bfield_transform(make_jomega(omega), b)
            if lhs != rhs:
                return False, "mismatch", {"cos": str(c), "sin": str(s)}
        return True, "exact-zero", {"points": len(circle)}

    @register("psu2_so3_correspondence")
    def _check_psu2():
        # the lemma's matrix moves the frame of forms; the Moebius action
        # moves sphere points, i.e. acts by the transpose (= inverse)
        for _ in range(10):
            eta = random_point(rng)
            a = rotation_psu2(eta)
            r_t = rotation_so3(eta).transpose()
            for _ in range(4):
                w = random_point(rng)
                img = mobius(a, w)
                vec = stereographic(w)
                rot = r_t.apply([QQi(vec[0]), QQi(vec[1]), QQi(vec[2])])
                target = stereographic(img)
                if tuple(x.re for x in rot) != target:
                    return False, "action mismatch", {"eta": str(eta), "w": str(w)}
        return True, "exact-zero", {"count": 10}

    # ---- the family spinor ----

    if n == 1:
        @register("family_n1_formula")
        def _check_n1():
            sym = family_spinor(model)
            al = Poly.complex_variable("a1", "a2")
            be = Poly.complex_variable("b1", "b2")
            lift = lambda mv: mv.map_coeffs(Poly.constant)
            ref = (
                lift(model.sigma)
                + lift(model.omega_i).scale(-(al + be))
                + lift(Multivector.scalar(4) - model.vol).scale(IMAG * (al - be))
                + lift(model.sigma_bar).scale(-(al * be))
            )
            ok = sym == ref
            return ok, "exact-zero" if ok else "mismatch", {}

    @register("family_diagonal_value")
    def _check_diagonal():
        sym = family_spinor(model)
        diag = sym.map_coeffs(
            lambda c: c.substitute({"b1": Poly.variable("a1"), "b2": Poly.variable("a2")})
        )
        al = Poly.complex_variable("a1", "a2")
        lift = lambda mv: mv.map_coeffs(Poly.constant)
        s_alpha = lift(model.sigma) + lift(model.omega_i).scale(QQi(-2) * al) + lift(model.sigma_bar).scale(-(al * al))
        from math import factorial

        ref = wedge_power(s_alpha, n).scale(QQi(Fraction(1, factorial(n))))
        ok = diag == ref
        return ok, "exact-zero" if ok else "mismatch", {}

    @register("family_divisibility")
    def _check_divisibility():
        # every non-middle term of the expansion divides by (alpha - beta),
        # tested by exact division in the real-variable ring
        from .family import expansion_terms
        from .scalars import NonDivisibleError

        divisor = Poly.complex_variable("a1", "a2") - Poly.complex_variable("b1", "b2")
        terms = expansion_terms(n)
        for j, term in enumerate(terms):
            if j == n:
                continue
            try:
                term.map_coeffs(lambda c: c.divide_exact(divisor))
            except NonDivisibleError:
                return False, f"term {j} not divisible", {"j": j}
        return True, "exact-zero", {"terms": len(terms)}

    @register("family_bidegree")
    def _check_bidegree():
        sym = family_spinor(model)
        da = max((c.degree_in(("a1", "a2")) for c in sym.coeffs.values()), default=0)
        db = max((c.degree_in(("b1", "b2")) for c in sym.coeffs.values()), default=0)
        ok = da <= n and db <= n
        return ok, "exact-zero" if ok else f"degrees ({da},{db})", {"alpha_deg": da, "beta_deg": db}

    @register("family_holomorphy")
    def _check_holomorphy():
        sym = family_spinor(model)
        for c in sym.coeffs.values():
            if not wirtinger(c, "a1", "a2").is_zero():
                return False, "not holomorphic in first parameter", {}
            if not wirtinger(c, "b1", "b2").is_zero():
                return False, "not holomorphic in second parameter", {}
        comp = companion_spinor(model)
        dep_conj_only = all(
            wirtinger_conj(c, "a1", "a2").is_zero() for c in comp.coeffs.values()
        )
        dep_holo = all(wirtinger(c, "a1", "a2").is_zero() for c in comp.coeffs.values())
        ok = dep_conj_only and not dep_holo
        return ok, "exact-zero" if ok else "companion dependence wrong", {}

    @register("family_purity_samples")
    def _check_purity():
        pts = [(random_point(rng), random_point(rng)) for _ in range(samples)]
        pts += [(a, a + QQi(Fraction(1, 1000))) for a, _ in pts[:3]]  # near-diagonal

        def pure_at(ab):
            return is_pure(family_spinor(model, ab[0], ab[1]))

        ok = all(_map_samples(pure_at, pts))
        return ok, "exact-zero" if ok else "impure sample", {"samples": len(pts)}

    @register("three_family_identification")
    def _check_identification():
        if n > 2:
            return None, "heavy check runs at n <= 2", {}
        pts = [(random_point(rng), random_point(rng)) for _ in range(samples)]

        def match(ab):
            j = family_structure(model, ab[0], ab[1])
            bh_j, _ = bi_hermitian_at(model, ab[0], ab[1])
            return j == bh_j

        ok = all(_map_samples(match, pts))
        return ok, "exact-zero" if ok else "mismatch", {"samples": len(pts)}

    @register("pullback_proportionality")
    def _check_pullback():
        pts = [(random_point(rng), random_point(rng)) for _ in range(samples)]

        def proportional(ez):
            eta, zeta = ez
            lhs = bundle_spinor(model, eta, zeta)
            a, b = product_parameters(eta, zeta)
            rhs = family_spinor(model, a, b)
            return _proportional(lhs, rhs)

        ok = all(_map_samples(proportional, pts))
        return ok, "exact-zero" if ok else "not proportional", {"samples": len(pts)}

    @register("mukai_quadric")
    def _check_mukai():
        if n != 1:
            return None, "even pairing exists on the dim-4 model only", {}
        xs = [Poly.variable(v) for v in ("X", "Y", "Z", "U")]
        s = quadric_spinor(model, *xs)
        val = mukai_pair(s, s)
        expect = 2 * (xs[0] ** 2 + xs[1] ** 2 + xs[2] ** 2 + xs[3] ** 2)
        if val != expect:
            return False, "symbolic pairing mismatch", {}
        on_quadric = 0
        for k in range(samples):
            if k < 10:
                a, b = random_point(rng), random_point(rng)
                coords = quadric_parameters(a, b)
            else:
                coords = tuple(random_point(rng) for _ in range(4))
            s_val = quadric_spinor(model, *coords)
            if s_val.is_zero():
                continue
            vanishes = quadric_value(*coords).is_zero()
            if vanishes:
                on_quadric += 1
            if is_pure(s_val) != vanishes:
                return False, "purity/quadric mismatch", {"coords": [str(c) for c in coords]}
        return True, "exact-zero", {"samples": samples, "on_quadric": on_quadric}

    @register("real_structure")
    def _check_real_structure():
        pts = [
            (random_nonzero_point(rng), random_nonzero_point(rng))
            for _ in range(min(samples, 20))
        ]
        pts.append((QQi(1), QQi(1)))
        pts.append((QQi(1), QQi(0, 1)))
        ok = real_structure_check(model, pts)
        return ok, "exact-zero" if ok else "identity fails", {"samples": len(pts)}

    @register("courant_identities")
    def _check_courant():
        coords = ("x0", "x1", "x2", "x3")
        trials = 20
        for _ in range(trials):
            e1 = random_section(rng, coords)
            e2 = random_section(rng, coords)
            e3 = random_section(rng, coords)
            lhs = dorfman(e1, dorfman(e2, e3))
            rhs_a = dorfman(dorfman(e1, e2), e3)
            rhs_b = dorfman(e2, dorfman(e1, e3))
            if not (lhs - rhs_a - rhs_b).is_zero():
                return False, "Leibniz fails", {}
            ee = dorfman(e1, e1)
            pair = e1.pairing(e1)
            grad = tuple(pair.diff(v) for v in coords)
            if any(not p.is_zero() for p in ee.tangent):
                return False, "self-bracket has a tangent part", {}
            if tuple(ee.cotangent) != grad:
                return False, "self-bracket differs from the pairing gradient", {}
        for _ in range(trials):
            e1 = random_section(rng, coords)
            e2 = random_section(rng, coords)
            forms = [random_polyform(rng, coords) for _ in range(2)]
            if not derived_bracket_check(e1, e2, forms):
                return False, "derived bracket fails", {}
        return True, "exact-zero", {"trials": trials}

    @register("generalized_metric_compatibility")
    def _check_metric():
        g = generalized_metric(model)
        for _ in range(5):
            a, b = random_point(rng), random_point(rng)
            j = family_structure(model, a, b)
            if (j.matrix.transpose() @ g @ j.matrix) != g:
                return False, "not compatible", {"alpha": str(a), "beta": str(b)}
        return True, "exact-zero", {"count": 5}

    # ---- the total space ----

    @register("dpsi_zero")
    def _check_dpsi():
        ok = twistor_spinor_closed(model, mutate=mutate)
        residual = "exact-zero" if ok else "nonzero exterior derivative"
        return ok, residual, {"mutate": mutate} if mutate else {}

    @register("dpsi_prime_zero")
    def _check_dpsi_prime():
        ok = companion_twistor_spinor_closed(model)
        return ok, "exact-zero" if ok else "nonzero exterior derivative", {}

    @register("pseudo_kahler")
    def _check_pseudo_kahler():
        if n > 2:
            return None, "heavy check runs at n <= 2", {}
        pts = [(random_point(rng), random_point(rng)) for _ in range(min(samples, 20))]

        def check(ab):
            j, jp = point_structures(model, ab[0], ab[1])
            if (j.matrix @ jp.matrix) != (jp.matrix @ j.matrix):
                return False
            return pseudo_kahler_signature(model, ab[0], ab[1]) == (8 * n + 4, 4)

        ok = all(_map_samples(check, pts))
        # float cross-check of one exact signature
        from .twistor import pseudo_kahler_form

        g = linalg.to_float_rows(pseudo_kahler_form(model, pts[0][0], pts[0][1]))
        fpos, fneg, _ = linalg.inertia_float(g, tol)
        ok = ok and (fpos, fneg) == (8 * n + 4, 4)
        return ok, "exact-zero" if ok else "signature mismatch", {"samples": len(pts)}

    @register("type_stratification")
    def _check_types():
        for _ in range(5):
            a = random_point(rng)
            b = random_point(rng)
            if a == b:
                continue
            if type_of(family_structure(model, a, a)) != 2 * n:
                return False, "diagonal type wrong", {"alpha": str(a)}
            if type_of(family_structure(model, a, b)) != 0:
                return False, "off-diagonal type wrong", {}
            if twistor_type(model, a, a) != 2 * n + 2:
                return False, "total diagonal type wrong", {}
            if twistor_type(model, a, b) != 2:
                return False, "total off-diagonal type wrong", {}
        a = random_nonzero_point(rng)
        j = family_structure(model, a, cp1_antipode(a))
        if not j.block_a.is_zero():
            return False, "antipodal tangent block nonzero", {"alpha": str(a)}
        return True, "exact-zero", {}

    @register("chart_consistency")
    def _check_charts():
        for _ in range(5):
            a = random_nonzero_point(rng)
            b = random_nonzero_point(rng)
            base = family_spinor(model, a, b)
            for ca in (0, 1):
                for cb in (0, 1):
                    u = a.inv() if ca else a
                    v = b.inv() if cb else b
                    other = evaluate_param_form(chart_spinor(model.n, ca, cb), u, v)
                    if not _proportional(base, other):
                        return False, "chart images differ", {"chart": [ca, cb]}
        return True, "exact-zero", {"count": 5}

    @register("twistor_point_dictionary")
    def _check_dictionary():
        if n > 2:
            return None, "heavy check runs at n <= 2", {}
        pf = twistor_spinor(model)
        pfp = companion_twistor_spinor(model)
        for _ in range(2):
            a, b = random_point(rng), random_point(rng)
            j, jp = point_structures(model, a, b)
            if gacs_from_spinor(evaluate_twistor_spinor(pf, model, a, b)) != j:
                return False, "main spinor mismatch", {}
            if gacs_from_spinor(evaluate_twistor_spinor(pfp, model, a, b)) != jp:
                return False, "companion spinor mismatch", {}
            # the antipodal involution negates the fiber structures; the
            # sphere blocks transform by the antipodal chart change
            if a.is_zero() or b.is_zero():
                continue
            ja = family_structure(model, cp1_antipode(a), cp1_antipode(b))
            jpa = companion_structure(model, cp1_antipode(a), cp1_antipode(b))
            if ja != -family_structure(model, a, b):
                return False, "real involution fails on the main structure", {}
            if jpa != -companion_structure(model, a, b):
                return False, "real involution fails on the companion", {}
        return True, "exact-zero", {"count": 2}

    # ---- run ----

    manifest = suite_manifest(n, mutate)
    for check_id in manifest:
        fn = checks[check_id]
        t0 = time.perf_counter()
        try:
            ok, residual, params = fn()
        except Exception as exc:  # a crash is a failure, not a skip
            ok, residual, params = False, f"error: {exc}", {}
        elapsed = (time.perf_counter() - t0) * 1000.0
        if ok is None:
            status = "skip"
        else:
            status = "pass" if ok else "fail"
        report.checks.append(
            CheckResult(check_id, n, params, status, residual, round(elapsed, 3))
        )
    return report


def _proportional(a: Multivector, b: Multivector) -> bool:
    """Projective equality by cross-multiplication in a fixed mask order."""
    if a.is_zero() or b.is_zero():
        return a.is_zero() and b.is_zero()
    if set(a.coeffs) != set(b.coeffs):
        return False
    m0 = min(a.coeffs)
    ca, cb = a.coeffs[m0], b.coeffs[m0]
    return a.scale(cb) == b.scale(ca)
