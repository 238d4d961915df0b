"""The two-sphere-pair family of generalized complex structures on a flat
quaternionic model, built three ways: from the holomorphic spinor formula,
from the dim-4 even-pairing quadric, and from bi-Hermitian pairs; plus the
tangent-chart comparison map between the two parametrizations.

The symbolic family spinor is expanded internally over Gaussian-integer
polynomials in the two holomorphic chart coordinates (fast, exact), then
converted once into the public real-variable polynomial ring with
variables a1, a2 (first factor) and b1, b2 (second factor).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterator, Sequence

from .double_space import (
    GeneralizedEndomorphism,
    gacs_from_spinor,
    type_of,
)
from .hyperkahler import HyperkahlerModel, build_model, complex_structure, kahler_form
from .linalg import Matrix
from .multivector import Multivector, wedge, wedge_power
from .scalars import (
    CP1,
    I as IMAG,
    INF,
    NonDivisibleError,
    ONE,
    Poly,
    QQi,
    ZERO,
    cp1_antipode,
    is_inf,
)

PARAM_VARS = ("a1", "a2", "b1", "b2")


def worker_count() -> int:
    """Worker cap for sample suites, from GCTK_THREADS (default 1)."""
    raw = os.environ.get("GCTK_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_samples(fn, items: Sequence) -> list:
    workers = worker_count()
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# -- Gaussian-integer bivariate polynomials (internal fast path) ---------------


class _GaussPoly:
    """Polynomial in two holomorphic chart coordinates with Gaussian-integer
    coefficients: dict (p, q) -> (re, im).  Used only to expand the family
    spinor quickly; results are converted to the public Poly ring once.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = terms if terms is not None else {}

    @classmethod
    def const(cls, re: int, im: int = 0) -> "_GaussPoly":
        if re == 0 and im == 0:
            return cls()
        return cls({(0, 0): (re, im)})

    @classmethod
    def mono(cls, p: int, q: int, re: int = 1, im: int = 0) -> "_GaussPoly":
        if re == 0 and im == 0:
            return cls()
        return cls({(p, q): (re, im)})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, _GaussPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "_GaussPoly") -> "_GaussPoly":
        out = dict(self.terms)
        for k, (cr, ci) in other.terms.items():
            pr, pi = out.get(k, (0, 0))
            r, i = pr + cr, pi + ci
            if r == 0 and i == 0:
                out.pop(k, None)
            else:
                out[k] = (r, i)
        return _GaussPoly(out)

    def __sub__(self, other: "_GaussPoly") -> "_GaussPoly":
        return self + (-other)

    def __neg__(self) -> "_GaussPoly":
        return _GaussPoly({k: (-r, -i) for k, (r, i) in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return _GaussPoly()
            return _GaussPoly(
                {k: (r * other, i * other) for k, (r, i) in self.terms.items()}
            )
        if not isinstance(other, _GaussPoly):
            return NotImplemented
        out: dict = {}
        for (pa, qa), (ar, ai) in self.terms.items():
            for (pb, qb), (br, bi) in other.terms.items():
                k = (pa + pb, qa + qb)
                r = ar * br - ai * bi
                i = ar * bi + ai * br
                pr, pi = out.get(k, (0, 0))
                r, i = pr + r, pi + i
                if r == 0 and i == 0:
                    out.pop(k, None)
                else:
                    out[k] = (r, i)
        return _GaussPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "_GaussPoly":
        out = _GaussPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def conjugate(self) -> "_GaussPoly":
        return _GaussPoly({k: (r, -i) for k, (r, i) in self.terms.items()})

    def divide_exact(self, divisor: "_GaussPoly") -> "_GaussPoly":
        """Exact division in graded-lex order; remainders raise."""
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        lead = max(divisor.terms, key=lambda e: (e[0] + e[1], e))
        lr, li = divisor.terms[lead]
        norm = lr * lr + li * li
        rem = dict(self.terms)
        q: dict = {}
        while rem:
            k = max(rem, key=lambda e: (e[0] + e[1], e))
            dp, dq = k[0] - lead[0], k[1] - lead[1]
            if dp < 0 or dq < 0:
                raise NonDivisibleError("leading monomial not divisible")
            rr, ri = rem[k]
            # Gaussian-integer quotient (rr + ri i) / (lr + li i)
            nr, ni = rr * lr + ri * li, ri * lr - rr * li
            if nr % norm or ni % norm:
                raise NonDivisibleError("leading coefficient not divisible")
            cr, ci = nr // norm, ni // norm
            q[(dp, dq)] = (cr, ci)
            for (bp, bq), (br, bi) in divisor.terms.items():
                kk = (dp + bp, dq + bq)
                tr = cr * br - ci * bi
                ti = cr * bi + ci * br
                pr, pi = rem.get(kk, (0, 0))
                r, i = pr - tr, pi - ti
                if r == 0 and i == 0:
                    rem.pop(kk, None)
                else:
                    rem[kk] = (r, i)
        return _GaussPoly(q)

    def to_poly(self, scale: QQi) -> Poly:
        """Convert to the public real-variable ring: the first chart
        coordinate becomes a1 + i a2, the second b1 + i b2.
        """
        max_p = max((k[0] for k in self.terms), default=0)
        max_q = max((k[1] for k in self.terms), default=0)
        alpha = Poly.complex_variable("a1", "a2")
        beta = Poly.complex_variable("b1", "b2")
        a_pows = [Poly.constant(ONE)]
        for _ in range(max_p):
            a_pows.append(a_pows[-1] * alpha)
        b_pows = [Poly.constant(ONE)]
        for _ in range(max_q):
            b_pows.append(b_pows[-1] * beta)
        total = Poly.zero()
        for (p, q), (r, i) in self.terms.items():
            total = total + (QQi(r, i) * scale) * (a_pows[p] * b_pows[q])
        return total


_GP_I = _GaussPoly.const(0, 1)
_GP_ONE = _GaussPoly.const(1)
_GP_U = _GaussPoly.mono(1, 0)
_GP_V = _GaussPoly.mono(0, 1)


def _chart_data(model: HyperkahlerModel, chart_a: int, chart_b: int):
    """Prefactor P and exponent numerator N for the four chart combinations.

    In the base chart P = i(u - v) and N = sigma - (u+v) omega_I - uv
    conj(sigma); swapping a factor into its second chart (coordinate 1/u)
    clears the poles at infinity by the usual degree-n rescaling.
    """
    def lift(mv: Multivector, g: _GaussPoly) -> Multivector:
        return mv.map_coeffs(lambda c: _GaussPoly.const(0, 0) if c.is_zero() else _scale_gp(g, c))

    s, sb, w = model.sigma, model.sigma_bar, model.omega_i
    u, v = _GP_U, _GP_V
    if (chart_a, chart_b) == (0, 0):
        pref = _GP_I * (u - v)
        num = lift(s, _GP_ONE) + lift(w, -(u + v)) + lift(sb, -(u * v))
    elif (chart_a, chart_b) == (1, 0):
        pref = _GP_I * (_GP_ONE - u * v)
        num = lift(s, u) + lift(w, -(_GP_ONE + u * v)) + lift(sb, -v)
    elif (chart_a, chart_b) == (0, 1):
        pref = _GP_I * (u * v - _GP_ONE)
        num = lift(s, v) + lift(w, -(u * v + _GP_ONE)) + lift(sb, -u)
    else:
        pref = _GP_I * (v - u)
        num = lift(s, u * v) + lift(w, -(u + v)) + lift(sb, -_GP_ONE)
    return pref, num


def _scale_gp(g: _GaussPoly, c: QQi) -> _GaussPoly:
    if c.re.denominator != 1 or c.im.denominator != 1:
        raise ValueError("model forms must have Gaussian-integer coefficients")
    return g * _GaussPoly.const(int(c.re), int(c.im))


@lru_cache(maxsize=None)
def _chart_spinor_scaled(n: int, chart_a: int, chart_b: int) -> Multivector:
    """(2n)! times the chart spinor, with _GaussPoly coefficients.

    Expansion of the prefactor-times-exponential: the j-th term carries
    P^(n-j), and for j > n the negative power is an exact polynomial
    division, term by term (failure would mean an implementation bug and
    raises immediately).
    """
    model = build_model(n)
    pref, num = _chart_data(model, chart_a, chart_b)
    big = factorial(2 * n)
    total = Multivector.zero(model.dim)
    power = Multivector.scalar(model.dim, _GP_ONE)
    for j in range(0, 2 * n + 1):
        coeff = big // factorial(j)
        if j <= n:
            factor = (pref ** (n - j)) * coeff
            term = power.map_coeffs(lambda c, f=factor: c * f)
        else:
            div = pref ** (j - n)
            term = power.map_coeffs(lambda c, d=div: c.divide_exact(d) * coeff)
        total = total + term
        if j < 2 * n:
            power = wedge(power, num)
    return total


@lru_cache(maxsize=None)
def chart_spinor(n: int, chart_a: int = 0, chart_b: int = 0) -> Multivector:
    """Symbolic family spinor in the given chart pair, with polynomial
    coefficients in the real variables a1, a2, b1, b2 (exact rationals).
    """
    scaled = _chart_spinor_scaled(n, chart_a, chart_b)
    inv = QQi(Fraction(1, factorial(2 * n)))
    return scaled.map_coeffs(lambda g: g.to_poly(inv))


@lru_cache(maxsize=None)
def expansion_terms(n: int) -> tuple[Multivector, ...]:
    """The 2n+1 terms of the base-chart expansion as real-variable forms:
    term j is the j-th exponential power times the residual prefactor
    power, with the negative powers past the middle divided out exactly.
    """
    model = build_model(n)
    pref, num = _chart_data(model, 0, 0)
    terms = []
    power = Multivector.scalar(model.dim, _GP_ONE)
    for j in range(0, 2 * n + 1):
        inv = QQi(Fraction(1, factorial(j)))
        if j <= n:
            factor = pref ** (n - j)
            term = power.map_coeffs(lambda c, f=factor: c * f)
        else:
            div = pref ** (j - n)
            term = power.map_coeffs(lambda c, d=div: c.divide_exact(d))
        terms.append(term.map_coeffs(lambda g: g.to_poly(inv)))
        if j < 2 * n:
            power = wedge(power, num)
    return tuple(terms)


def _chart_of(z: CP1) -> tuple[int, QQi]:
    if is_inf(z):
        return 1, QQi(0)
    return 0, z


def evaluate_param_form(mv: Multivector, alpha: QQi, beta: QQi) -> Multivector:
    """Evaluate polynomial coefficients at a numeric parameter pair."""
    assignment = {"a1": alpha.re, "a2": alpha.im, "b1": beta.re, "b2": beta.im}
    return Multivector(mv.dim, {m: c.eval(assignment) for m, c in mv.coeffs.items()})


def family_spinor(
    model: HyperkahlerModel, alpha: CP1 | None = None, beta: CP1 | None = None
) -> Multivector:
    """The family pure spinor: symbolic (both parameters None) or numeric.

    Symbolic mode returns the polynomial expansion in the base chart; all
    pole cancellations along the diagonal are performed exactly.  Numeric
    mode evaluates in whichever chart pair keeps the point finite, so the
    chart markers at infinity are allowed.
    """
    if (alpha is None) != (beta is None):
        raise ValueError("give both parameters or neither")
    if alpha is None:
        return chart_spinor(model.n, 0, 0)
    ca, u = _chart_of(alpha)
    cb, v = _chart_of(beta)
    return evaluate_param_form(chart_spinor(model.n, ca, cb), u, v)


def fiber_spinor(model: HyperkahlerModel, zeta: QQi) -> Multivector:
    """Pure spinor of the complex-to-symplectic interpolation family,
    (2 i zeta)^n exp(sigma / (2 i zeta) - i zeta conj(sigma) / 2) with its
    denominators cleared; the zeta = 0 member is sigma^n.
    """
    return _cleared_exponential(model, model.sigma, model.sigma_bar, zeta)


def bundle_spinor(model: HyperkahlerModel, eta: QQi, zeta: QQi) -> Multivector:
    """Pure spinor over the tangent-bundle chart (eta, zeta): the same
    cleared exponential built on the unit-scale holomorphic form at eta.
    """
    if is_inf(eta):
        raise ValueError("bundle chart needs a finite base parameter")
    scale = QQi(Fraction(1) / (Fraction(1) + eta.abs2()))
    s_eta = (
        model.sigma
        - model.omega_i.scale(QQi(2) * eta)
        - model.sigma_bar.scale(eta * eta)
    ).scale(scale)
    return _cleared_exponential(model, s_eta, s_eta.conjugate(), zeta)


def _cleared_exponential(
    model: HyperkahlerModel, s: Multivector, s_bar: Multivector, zeta: QQi
) -> Multivector:
    """(2 i zeta)^n exp(s / (2 i zeta) - i zeta s_bar / 2) as a finite sum
    over wedge powers s^p s_bar^q; p never exceeds n, so the cleared
    prefactor leaves no pole and the zeta -> 0 line is s^n.
    """
    n = model.n
    if zeta.is_zero():
        return wedge_power(s, n)
    two_i_zeta = QQi(2) * IMAG * zeta
    m_half_i_zeta = -IMAG * zeta * QQi(Fraction(1, 2))
    total = Multivector.zero(model.dim)
    s_pow = Multivector.scalar(model.dim)
    for p in range(n + 1):
        if s_pow.is_zero():
            break
        sb_pow = s_pow
        for q in range(0, 2 * n + 1):
            if sb_pow.is_zero():
                break
            c = (
                two_i_zeta ** (n - p)
                * m_half_i_zeta ** q
                * QQi(Fraction(1, factorial(p) * factorial(q)))
            )
            total = total + sb_pow.scale(c)
            sb_pow = wedge(sb_pow, s_bar)
        s_pow = wedge(s_pow, s)
    return total


# -- the comparison map between the two parametrizations ------------------------


def product_parameters(eta: QQi, zeta: QQi) -> tuple[CP1, CP1]:
    """Image of a tangent-chart point under the sphere comparison map:
    ((zeta+eta)/(1-conj(eta) zeta), (eta-zeta)/(1+conj(eta) zeta)); a
    vanishing denominator lands on the chart marker at infinity.
    """
    eb = eta.conjugate()
    num1, den1 = zeta + eta, ONE - eb * zeta
    num2, den2 = eta - zeta, ONE + eb * zeta
    first: CP1 = INF if den1.is_zero() else num1 / den1
    second: CP1 = INF if den2.is_zero() else num2 / den2
    return first, second


def rotation_psu2(eta: QQi) -> Matrix:
    """Projective unitary matrix ((1, eta), (-conj(eta), 1)) carrying 0 to
    eta; returned without the unit normalization, which projective action
    does not see.
    """
    return Matrix([[ONE, eta], [-eta.conjugate(), ONE]])


def mobius(a: Matrix, z: CP1) -> CP1:
    """Fractional-linear action of a 2x2 matrix on the parameter sphere."""
    if is_inf(z):
        num, den = a[0, 0], a[1, 0]
    else:
        num = a[0, 0] * z + a[0, 1]
        den = a[1, 0] * z + a[1, 1]
    if den.is_zero():
        if num.is_zero():
            raise ZeroDivisionError("indeterminate Moebius image")
        return INF
    return num / den


def stereographic(z: CP1) -> tuple[Fraction, Fraction, Fraction]:
    """Unit-sphere image ((1-|z|^2), 2 Re z, 2 Im z) / (1+|z|^2)."""
    if is_inf(z):
        return Fraction(-1), Fraction(0), Fraction(0)
    n2 = z.abs2()
    den = 1 + n2
    return (1 - n2) / den, 2 * z.re / den, 2 * z.im / den


# -- the dim-4 quadric picture ---------------------------------------------------


def quadric_spinor(model: HyperkahlerModel, x, y, z, u) -> Multivector:
    """X omega_I + Y omega_J + Z omega_K + U (1 - vol) on the dim-4 model;
    pure exactly on the quadric X^2 + Y^2 + Z^2 + U^2 = 0.
    """
    if model.dim != 4:
        raise ValueError("the quadric picture exists on the dim-4 model only")
    one_minus_vol = Multivector.scalar(4) - model.vol
    return (
        model.omega_i.scale(x)
        + model.omega_j.scale(y)
        + model.omega_k.scale(z)
        + one_minus_vol.scale(u)
    )


def quadric_value(x, y, z, u):
    return x * x + y * y + z * z + u * u


def quadric_parameters(alpha: QQi, beta: QQi) -> tuple[QQi, QQi, QQi, QQi]:
    """The on-quadric coordinates (-(a+b), 1-ab, i(1+ab), i(a-b))."""
    ab = alpha * beta
    return (
        -(alpha + beta),
        ONE - ab,
        IMAG * (ONE + ab),
        IMAG * (alpha - beta),
    )


# -- bi-Hermitian pairs --------------------------------------------------------------


def bi_hermitian_pair(
    i_plus: Matrix,
    omega_plus: Multivector,
    i_minus: Matrix,
    omega_minus: Multivector,
) -> tuple[GeneralizedEndomorphism, GeneralizedEndomorphism]:
    """The commuting pair of generalized structures of an almost
    bi-Hermitian pair (g, I+, I-), with blocks built from the half sums
    and differences of the structures and their Hermitian forms.
    """
    from . import linalg
    from .double_space import matrix_of_two_form

    d = i_plus.nrows
    ident = Matrix.identity(d)
    for im in (i_plus, i_minus):
        if (im @ im) != -ident:
            raise ValueError("structure does not square to minus the identity")
    w_plus = matrix_of_two_form(omega_plus)
    w_minus = matrix_of_two_form(omega_minus)
    if w_plus != i_plus or w_minus != i_minus:
        # the flat metric is the identity, so the Hermitian form map equals
        # the structure matrix; anything else is inconsistent input
        raise ValueError("Hermitian forms do not match g(I ., .)")
    wp_inv = linalg.inverse(w_plus)
    wm_inv = linalg.inverse(w_minus)
    half = QQi(Fraction(1, 2))
    j_first = GeneralizedEndomorphism.from_blocks(
        (-(i_plus + i_minus)).scale(half),
        (-(wp_inv - wm_inv)).scale(half),
        (w_plus - w_minus).scale(half),
        (i_plus.transpose() + i_minus.transpose()).scale(half),
    )
    j_second = GeneralizedEndomorphism.from_blocks(
        (-(i_plus - i_minus)).scale(half),
        (-(wp_inv + wm_inv)).scale(half),
        (w_plus + w_minus).scale(half),
        (i_plus.transpose() - i_minus.transpose()).scale(half),
    )
    return j_first, j_second


def bi_hermitian_at(
    model: HyperkahlerModel, alpha: CP1, beta: CP1
) -> tuple[GeneralizedEndomorphism, GeneralizedEndomorphism]:
    """Bi-Hermitian pair of the family point, oriented so the first output
    is exactly the structure of the family spinor there.

    Orientation note: with this artifact's conventions (left quaternionic
    action, forms g(A ., .), annihilator = +i eigenspace) the spinor at
    (alpha, beta) matches the bi-Hermitian pair with I+ at the second
    parameter and I- at the first; the identification below is pinned by
    an exact test.
    """
    i_plus = complex_structure(model, beta)
    i_minus = complex_structure(model, alpha)
    return bi_hermitian_pair(
        i_plus, kahler_form(model, beta), i_minus, kahler_form(model, alpha)
    )


# -- structures, companion family, stratification ----------------------------------


def family_structure(model: HyperkahlerModel, alpha: CP1, beta: CP1) -> GeneralizedEndomorphism:
    """The generalized complex structure of the family spinor at a point."""
    return gacs_from_spinor(family_spinor(model, alpha, beta))


def companion_spinor(
    model: HyperkahlerModel, alpha: CP1 | None = None, beta: CP1 | None = None
) -> Multivector:
    """Pure spinor of the commuting companion structure at (alpha, beta).

    It is the family spinor evaluated at the antipode of the first
    parameter, expressed through the second-chart expansion so that the
    dependence is polynomial: the antipodal chart coordinate is -conj(alpha).
    The result depends on alpha only through its conjugate, so the
    companion family is not holomorphic in the first parameter.
    """
    if (alpha is None) != (beta is None):
        raise ValueError("give both parameters or neither")
    base = chart_spinor(model.n, 1, 0)
    flip = {
        "a1": -Poly.variable("a1"),
        "a2": Poly.variable("a2"),
    }
    symbolic = base.map_coeffs(lambda c: c.substitute(flip))
    if alpha is None:
        return symbolic
    if is_inf(alpha):
        # antipode of infinity is 0, where the base-chart value applies
        return family_spinor(model, QQi(0), beta)
    cb, v = _chart_of(beta)
    if cb == 0:
        return evaluate_param_form(symbolic, alpha, v)
    other = chart_spinor(model.n, 1, 1).map_coeffs(lambda c: c.substitute(flip))
    return evaluate_param_form(other, alpha, v)


def companion_structure(model: HyperkahlerModel, alpha: CP1, beta: CP1) -> GeneralizedEndomorphism:
    return gacs_from_spinor(companion_spinor(model, alpha, beta))


def type_map(model: HyperkahlerModel, grid: int, fiber: bool = True) -> list[dict]:
    """Sample the type over a rational grid in all four chart pairs.

    Grid points are the real values -1 + 2k/(grid-1); rows carry the
    chart-local coordinates, the chart flags and the computed type (on the
    fiber by default, or shifted by the two sphere factors when fiber is
    False, matching the total-space block structure).
    """
    if grid < 2:
        raise ValueError("grid must be at least 2")
    points = [Fraction(-1) + Fraction(2 * k, grid - 1) for k in range(grid)]
    rows = []
    for ca in (0, 1):
        for cb in (0, 1):
            symbolic = chart_spinor(model.n, ca, cb)
            for u in points:
                for v in points:
                    phi = evaluate_param_form(symbolic, QQi(u), QQi(v))
                    t = type_of(gacs_from_spinor(phi))
                    rows.append(
                        {
                            "alpha_re": u,
                            "alpha_im": Fraction(0),
                            "beta_re": v,
                            "beta_im": Fraction(0),
                            "chart_a": ca,
                            "chart_b": cb,
                            "type": t if fiber else t + 2,
                        }
                    )
    return rows


def type_map_csv(rows: Sequence[dict]) -> str:
    """CSV rendering with the mandatory header and LF line endings."""
    out = ["alpha_re,alpha_im,beta_re,beta_im,chart_a,chart_b,type"]
    for r in rows:
        out.append(
            f"{r['alpha_re']},{r['alpha_im']},{r['beta_re']},{r['beta_im']},"
            f"{r['chart_a']},{r['chart_b']},{r['type']}"
        )
    return "\n".join(out) + "\n"


def real_structure_check(
    model: HyperkahlerModel, samples: Sequence[tuple[QQi, QQi]]
) -> bool:
    """Exact antipodal identity of the family spinor and of the holomorphic
    form: the value at the antipodal pair is the stated conjugate rescale.
    """
    n = model.n
    for alpha, beta in samples:
        if alpha.is_zero() or beta.is_zero():
            raise ValueError("samples must avoid the chart origin")
        lhs = family_spinor(model, cp1_antipode(alpha), cp1_antipode(beta))
        factor = QQi(-1) ** n * (alpha.conjugate() ** n * beta.conjugate() ** n).inv()
        rhs = family_spinor(model, alpha, beta).conjugate().scale(factor)
        if lhs != rhs:
            return False
        # the degree-2 generator transforms the same way on the diagonal
        from .hyperkahler import holomorphic_form

        eta = alpha
        lhs_s = holomorphic_form(model, cp1_antipode(eta))
        rhs_s = holomorphic_form(model, eta).conjugate().scale(
            -(eta.conjugate() ** (-2))
        )
        if lhs_s != rhs_s:
            return False
    return True
