"""Calculus over the flat model: exterior derivative of forms with
polynomial coefficients, the Dorfman bracket of polynomial sections, the
derived-bracket identity, and the pure-spinor integrability criterion.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import linalg
from .double_space import DiracBasis, inner_product, is_pure
from .linalg import Matrix
from .multivector import EVector, Multivector, clifford_act, interior, wedge
from .scalars import ONE, Poly, QQi, ZERO


@dataclass(frozen=True)
class PolyForm:
    """Differential form whose coefficients are polynomials in the named
    coordinates; coordinate i of the ambient algebra is coords[i].
    """

    form: Multivector
    coords: tuple[str, ...]

    def __post_init__(self):
        if len(self.coords) != self.form.dim:
            raise ValueError("one coordinate name per ambient dimension")

    @property
    def dim(self) -> int:
        return self.form.dim

    def is_zero(self) -> bool:
        return self.form.is_zero()

    def __add__(self, other: "PolyForm") -> "PolyForm":
        if self.coords != other.coords:
            raise ValueError("coordinate systems differ")
        return PolyForm(self.form + other.form, self.coords)

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        if self.coords != other.coords:
            raise ValueError("coordinate systems differ")
        return PolyForm(self.form - other.form, self.coords)

    def evaluate(self, assignment: Mapping) -> Multivector:
        """Pointwise value: evaluate every polynomial coefficient exactly."""
        return Multivector(
            self.dim,
            {m: c.eval(assignment) for m, c in self.form.coeffs.items()},
        )


def constant_form(mv: Multivector, coords: Sequence[str]) -> PolyForm:
    """Promote a numeric form to polynomial coefficients over the coordinates."""
    return PolyForm(
        Multivector(len(coords), {m: Poly.constant(c) for m, c in mv.coeffs.items()}),
        tuple(coords),
    )


def ext_d(pf: PolyForm, wrt: Iterable[str] | None = None) -> PolyForm:
    """Exterior derivative sum_v dv ^ (d/dv); d o d = 0 exactly.

    Differentiation is over all coordinates by default, or a subset; a
    name without a coordinate slot is rejected.
    """
    if wrt is None:
        indices = range(len(pf.coords))
    else:
        names = list(wrt)
        unknown = [v for v in names if v not in pf.coords]
        if unknown:
            raise ValueError(f"unknown variable(s): {', '.join(unknown)}")
        indices = [pf.coords.index(v) for v in names]
    out: dict = {}
    for mask, c in pf.form.coeffs.items():
        for i in indices:
            bit = 1 << i
            if mask & bit:
                continue
            dc = c.diff(pf.coords[i])
            if dc.is_zero():
                continue
            if (mask & (bit - 1)).bit_count() & 1:
                dc = -dc
            key = mask | bit
            s = out.get(key)
            s = dc if s is None else s + dc
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
    return PolyForm(Multivector(pf.dim, out), pf.coords)


@dataclass(frozen=True)
class PolySection:
    """Section X + xi of the double space with polynomial components."""

    coords: tuple[str, ...]
    tangent: tuple[Poly, ...]
    cotangent: tuple[Poly, ...]

    def __post_init__(self):
        d = len(self.coords)
        if len(self.tangent) != d or len(self.cotangent) != d:
            raise ValueError("component count must match the coordinate count")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.tangent + self.cotangent)

    def __sub__(self, other: "PolySection") -> "PolySection":
        return PolySection(
            self.coords,
            tuple(a - b for a, b in zip(self.tangent, other.tangent)),
            tuple(a - b for a, b in zip(self.cotangent, other.cotangent)),
        )

    def pairing(self, other: "PolySection") -> Poly:
        """<X+xi, Y+eta> = (xi(Y) + eta(X)) / 2 with polynomial entries."""
        half = QQi(1) / QQi(2)
        s = Poly.zero()
        for a, b in zip(self.cotangent, other.tangent):
            s = s + a * b
        for a, b in zip(other.cotangent, self.tangent):
            s = s + a * b
        return half * s


def section_from_constant(e: EVector, coords: Sequence[str]) -> PolySection:
    return PolySection(
        tuple(coords),
        tuple(Poly.constant(c) for c in e.tangent),
        tuple(Poly.constant(c) for c in e.cotangent),
    )


def _one_form(components: Sequence[Poly], coords: tuple[str, ...]) -> PolyForm:
    return PolyForm(Multivector.one_form(list(components)), coords)


def _lie_bracket(x: Sequence[Poly], y: Sequence[Poly], coords) -> list[Poly]:
    out = []
    for j in range(len(coords)):
        s = Poly.zero()
        for i, v in enumerate(coords):
            s = s + x[i] * y[j].diff(v) - y[i] * x[j].diff(v)
        out.append(s)
    return out


def dorfman(e1: PolySection, e2: PolySection) -> PolySection:
    """Dorfman bracket [X+xi, Y+eta] = [X,Y] + L_X eta - iota_Y d xi,
    with L_X = iota_X d + d iota_X; exact on polynomial sections.
    """
    if e1.coords != e2.coords:
        raise ValueError("coordinate systems differ")
    coords = e1.coords
    x, xi = e1.tangent, e1.cotangent
    y, eta = e2.tangent, e2.cotangent

    tangent = _lie_bracket(x, y, coords)

    d_eta = ext_d(_one_form(eta, coords))
    d_xi = ext_d(_one_form(xi, coords))
    lie = interior(x, d_eta.form)
    pair = Poly.zero()
    for a, b in zip(x, eta):
        pair = pair + a * b
    lie = lie + ext_d(PolyForm(Multivector.scalar(len(coords), pair), coords)).form
    correction = interior(y, d_xi.form)
    cot_form = lie - correction

    cotangent = []
    for i in range(len(coords)):
        c = cot_form.coeffs.get(1 << i)
        cotangent.append(c if c is not None else Poly.zero())
    return PolySection(coords, tuple(tangent), tuple(cotangent))


def clifford_section(e: PolySection, pf: PolyForm) -> PolyForm:
    """Clifford action of a polynomial section on a polynomial form."""
    if e.coords != pf.coords:
        raise ValueError("coordinate systems differ")
    acted = interior(e.tangent, pf.form) + wedge(
        Multivector.one_form(list(e.cotangent)), pf.form
    )
    return PolyForm(acted, pf.coords)


def derived_bracket_check(
    e1: PolySection, e2: PolySection, testforms: Sequence[PolyForm]
) -> bool:
    """Whether [e1, e2] . phi = D1(e2 . phi) - e2 . (D1 phi) for every test
    form, with D1 = e1 . d + d (e1 .); an exact polynomial identity.
    """
    bracket = dorfman(e1, e2)

    def d1(pf: PolyForm) -> PolyForm:
        return clifford_section(e1, ext_d(pf)) + ext_d(clifford_section(e1, pf))

    for phi in testforms:
        lhs = clifford_section(bracket, phi)
        rhs = d1(clifford_section(e2, phi)) - clifford_section(e2, d1(phi))
        if not (lhs - rhs).is_zero():
            return False
    return True


def spinor_integrability(pf: PolyForm, samples: Sequence[Mapping]) -> bool:
    """Integrability criterion at sample points: d phi must lie in the image
    of the Clifford action e -> e . phi there.  The fast path d phi = 0
    certifies integrability outright; a non-pure value raises.
    """
    d_pf = ext_d(pf)
    if d_pf.is_zero():
        return True
    d = pf.dim
    for assignment in samples:
        phi_p = pf.evaluate(assignment)
        if not is_pure(phi_p):
            raise ValueError("form is not a pure spinor at a sample point")
        target = d_pf.evaluate(assignment)
        images = []
        for i in range(d):
            tang = [ONE if k == i else ZERO for k in range(d)]
            images.append(clifford_act(EVector(tang, [ZERO] * d), phi_p))
        for i in range(d):
            cot = [ONE if k == i else ZERO for k in range(d)]
            images.append(clifford_act(EVector([ZERO] * d, cot), phi_p))
        masks = sorted(
            {m for img in images for m in img.coeffs} | set(target.coeffs)
        )
        mat = Matrix([[img.coeffs.get(m, ZERO) for img in images] for m in masks])
        vec = [target.coeffs.get(m, ZERO) for m in masks]
        if not linalg.in_column_span(mat, vec):
            return False
    return True


def involutivity_check(basis: DiracBasis, coords: Sequence[str] | None = None) -> bool:
    """Whether all pairwise Dorfman brackets of a constant basis lie in its
    span; trivially true for constants, kept as a consistency gate.
    """
    basis.validate()
    names = tuple(coords) if coords is not None else tuple(f"x{i}" for i in range(basis.dim))
    sections = [section_from_constant(v, names) for v in basis.vectors]
    span = basis.matrix()
    for a in sections:
        for b in sections:
            br = dorfman(a, b)
            if br.is_zero():
                continue
            comps = [p.constant_value() for p in br.tangent + br.cotangent]
            if not linalg.in_column_span(span, comps):
                return False
    return True
