"""Assembly and verification of the total space M x S^2 x S^2: the global
spinor, its exact closedness, the commuting companion, the pseudo-Kahler
signature, and the type stratification.

Coordinates on the total space: the 4n flat coordinates of the model,
then a1, a2 (first sphere factor) and b1, b2 (second).  For the companion
spinor the first factor carries its conjugate structure, so its sphere
form is the conjugate coordinate differential.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import linalg
from .courant import PolyForm, ext_d
from .double_space import (
    GeneralizedEndomorphism,
    gacs_from_spinor,
    make_ji,
    pairing_matrix,
    type_of,
)
from .family import (
    chart_spinor,
    companion_spinor,
    companion_structure,
    evaluate_param_form,
    family_spinor,
    family_structure,
)
from .hyperkahler import HyperkahlerModel, build_model
from .linalg import Matrix
from .multivector import Multivector, wedge
from .scalars import CP1, I as IMAG, ONE, Poly, QQi, ZERO

MUTATIONS = ("nonclosed-omega",)


def total_coords(n: int) -> tuple[str, ...]:
    return tuple(f"x{i}" for i in range(4 * n)) + ("a1", "a2", "b1", "b2")


def _embed(mv: Multivector, dim: int) -> Multivector:
    """Reinterpret a form on the model inside the larger total space."""
    return Multivector(dim, dict(mv.coeffs))


def _sphere_form(dim: int, base: int, re_index: int, conj: bool = False) -> Multivector:
    """The coordinate differential d(re) +/- i d(im) of one sphere factor."""
    sign = -IMAG if conj else IMAG
    return Multivector(
        dim,
        {1 << (base + re_index): Poly.constant(ONE),
         1 << (base + re_index + 1): Poly.constant(sign)},
    )


def _mutated_family_spinor(n: int) -> Multivector:
    """Family spinor with the flat Kahler form perturbed by the non-closed
    two-form x2 dx0^dx1 in the linear term of the expansion.

    The perturbed family has no polynomial spinor (the diagonal pole no
    longer cancels), so the perturbation enters through the linear term
    only; that already makes the global spinor non-closed, which is all
    the mutation harness needs to prove the check is not vacuous.
    """
    base = chart_spinor(n, 0, 0)
    a = Poly.complex_variable("a1", "a2")
    b = Poly.complex_variable("b1", "b2")
    delta = Multivector(4 * n, {0b11: -(a + b) * Poly.variable("x2")})
    return base + delta


def twistor_spinor(model: HyperkahlerModel, mutate: str | None = None) -> PolyForm:
    """The global pure spinor: family spinor wedge the two sphere forms."""
    if mutate is not None and mutate not in MUTATIONS:
        raise ValueError(f"unknown mutation: {mutate}")
    n = model.n
    coords = total_coords(n)
    dim = len(coords)
    phi = _mutated_family_spinor(n) if mutate else chart_spinor(n, 0, 0)
    da = _sphere_form(dim, 4 * n, 0)
    db = _sphere_form(dim, 4 * n, 2)
    return PolyForm(wedge(wedge(_embed(phi, dim), da), db), coords)


def twistor_spinor_closed(model: HyperkahlerModel, mutate: str | None = None) -> bool:
    """Exact closedness of the global spinor over all 4n+4 coordinates."""
    return ext_d(twistor_spinor(model, mutate)).is_zero()


def companion_twistor_spinor(model: HyperkahlerModel) -> PolyForm:
    """Global spinor of the companion structure: the companion family
    spinor wedge conj(da) wedge db; polynomial in (conj of the first
    parameter, the second parameter).
    """
    n = model.n
    coords = total_coords(n)
    dim = len(coords)
    phi = companion_spinor(model)
    da_bar = _sphere_form(dim, 4 * n, 0, conj=True)
    db = _sphere_form(dim, 4 * n, 2)
    return PolyForm(wedge(wedge(_embed(phi, dim), da_bar), db), coords)


def companion_twistor_spinor_closed(model: HyperkahlerModel) -> bool:
    return ext_d(companion_twistor_spinor(model)).is_zero()


@lru_cache(maxsize=None)
def _sphere_structure(conj: bool) -> GeneralizedEndomorphism:
    i_std = Matrix([[ZERO, -ONE], [ONE, ZERO]])
    return make_ji(-i_std if conj else i_std)


def point_structures(
    model: HyperkahlerModel, alpha: CP1, beta: CP1
) -> tuple[GeneralizedEndomorphism, GeneralizedEndomorphism]:
    """The commuting pair on the total space at a point: block sums of the
    fiber structures with the two sphere structures (the companion carries
    the conjugate structure on the first sphere factor).
    """
    j_fiber = family_structure(model, alpha, beta)
    jp_fiber = companion_structure(model, alpha, beta)
    j_total = j_fiber.direct_sum(_sphere_structure(False)).direct_sum(
        _sphere_structure(False)
    )
    jp_total = jp_fiber.direct_sum(_sphere_structure(True)).direct_sum(
        _sphere_structure(False)
    )
    return j_total, jp_total


def pseudo_kahler_form(
    model: HyperkahlerModel, alpha: CP1, beta: CP1
) -> Matrix:
    """Gram matrix of -<J e1, J' e2> on the double space of the total space."""
    j_total, jp_total = point_structures(model, alpha, beta)
    d = j_total.dim
    gram = pairing_matrix(d)
    g = -(j_total.matrix.transpose() @ gram @ jp_total.matrix)
    if not g.is_symmetric():
        raise ValueError("pairing is not symmetric; structures do not commute")
    return g


def pseudo_kahler_signature(
    model: HyperkahlerModel, alpha: CP1, beta: CP1
) -> tuple[int, int]:
    """Exact signature of the pseudo-Kahler pairing; expected (8n+4, 4)."""
    pos, neg, zero = linalg.inertia(pseudo_kahler_form(model, alpha, beta))
    if zero:
        raise ValueError("pseudo-Kahler pairing is degenerate")
    return pos, neg


def model_block_indices(model: HyperkahlerModel) -> list[int]:
    """Index set of the flat-model block inside the total double space."""
    d = model.dim
    total = d + 4
    return list(range(d)) + list(range(total, total + d))


def evaluate_twistor_spinor(
    pf: PolyForm, model: HyperkahlerModel, alpha: QQi, beta: QQi, point=None
) -> Multivector:
    """Value of a global spinor at a point (flat coordinates default to 0)."""
    assignment = {c: ZERO for c in pf.coords}
    assignment.update(
        {"a1": alpha.re, "a2": alpha.im, "b1": beta.re, "b2": beta.im}
    )
    if point:
        assignment.update(point)
    return pf.evaluate(assignment)


def twistor_type(model: HyperkahlerModel, alpha: CP1, beta: CP1) -> int:
    """Type of the total-space structure at a point; the fiber type plus
    one for each sphere factor.
    """
    j_total, _ = point_structures(model, alpha, beta)
    return type_of(j_total)
