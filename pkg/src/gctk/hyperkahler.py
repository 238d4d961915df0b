"""Flat quaternionic models H^n: the triple (I, J, K), Kahler forms, the
rotated complex structures and holomorphic forms, the rotation coefficient
matrix, and the generalized metric.

Conventions, asserted at construction so a slip cannot ship: I, J, K act
as left multiplication by i, j, k on H = R^4 with basis (1, i, j, k); the
metric is the identity; omega_A(X, Y) = g(AX, Y).  Then IJ = K and
sigma = omega_J + i omega_K pairs to zero with every antiholomorphic
vector of I.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .double_space import two_form_from_matrix
from .linalg import Matrix
from .multivector import Multivector, interior, wedge, wedge_power
from .scalars import CP1, I as IMAG, ONE, QQi, ZERO, is_inf

# left multiplication by i, j, k on one quaternionic block (columns are images)
_I_BLOCK = [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]
_J_BLOCK = [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]]
_K_BLOCK = [[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]


@dataclass(frozen=True)
class HyperkahlerModel:
    """The flat model of quaternionic dimension n (real dimension 4n)."""

    n: int
    dim: int
    i_mat: Matrix
    j_mat: Matrix
    k_mat: Matrix
    omega_i: Multivector
    omega_j: Multivector
    omega_k: Multivector
    sigma: Multivector
    sigma_bar: Multivector
    vol: Multivector


def _block_diag_structure(block, n: int) -> Matrix:
    b = Matrix(block)
    return Matrix.block_diag([b] * n)


@lru_cache(maxsize=None)
def build_model(n: int) -> HyperkahlerModel:
    """Construct the flat model; every convention is verified on the spot."""
    if not 1 <= n <= 3:
        raise ValueError("quaternionic dimension must be 1, 2 or 3")
    dim = 4 * n
    i_mat = _block_diag_structure(_I_BLOCK, n)
    j_mat = _block_diag_structure(_J_BLOCK, n)
    k_mat = _block_diag_structure(_K_BLOCK, n)

    ident = Matrix.identity(dim)
    for a, b, c in ((i_mat, j_mat, k_mat), (j_mat, k_mat, i_mat), (k_mat, i_mat, j_mat)):
        assert (a @ a) == -ident
        assert (a @ b) == c
        assert (b @ a) == -c

    omega_i = two_form_from_matrix(i_mat)
    omega_j = two_form_from_matrix(j_mat)
    omega_k = two_form_from_matrix(k_mat)
    sigma = omega_j + omega_k.scale(IMAG)
    sigma_bar = omega_j - omega_k.scale(IMAG)

    vol = Multivector.basis(dim, (1 << dim) - 1)
    for w in (omega_i, omega_j, omega_k):
        top = wedge_power(w, 2 * n)
        assert top == vol.scale(QQi(factorial(2 * n)))

    # sigma pairs to zero with the antiholomorphic vectors of I
    for col in range(dim):
        x = [ONE if r == col else ZERO for r in range(dim)]
        ix = i_mat.apply(x)
        anti = [a + IMAG * b for a, b in zip(x, ix)]
        assert interior(anti, sigma).is_zero()

    if n == 1:
        assert wedge(sigma, sigma_bar) == vol.scale(QQi(4))
        assert wedge_power(omega_i, 2) == vol.scale(QQi(2))

    return HyperkahlerModel(
        n=n, dim=dim, i_mat=i_mat, j_mat=j_mat, k_mat=k_mat,
        omega_i=omega_i, omega_j=omega_j, omega_k=omega_k,
        sigma=sigma, sigma_bar=sigma_bar, vol=vol,
    )


def _sphere_coefficients(eta: CP1) -> tuple[QQi, QQi, QQi]:
    """Stereographic coefficients ((1-|z|^2), 2 Re z, 2 Im z) / (1+|z|^2)."""
    if is_inf(eta):
        return QQi(-1), ZERO, ZERO
    n2 = eta.abs2()
    den = Fraction(1) + n2
    return (
        QQi((Fraction(1) - n2) / den),
        QQi(2 * eta.re / den),
        QQi(2 * eta.im / den),
    )


def complex_structure(model: HyperkahlerModel, eta: CP1) -> Matrix:
    """The rotated complex structure at a sphere parameter; -I at infinity."""
    c1, c2, c3 = _sphere_coefficients(eta)
    return (
        model.i_mat.scale(c1) + model.j_mat.scale(c2) + model.k_mat.scale(c3)
    )


def kahler_form(model: HyperkahlerModel, eta: CP1) -> Multivector:
    """Kahler form of the rotated structure (first row of the rotation matrix)."""
    c1, c2, c3 = _sphere_coefficients(eta)
    return model.omega_i.scale(c1) + model.omega_j.scale(c2) + model.omega_k.scale(c3)


def holomorphic_form(model: HyperkahlerModel, eta: QQi) -> Multivector:
    """The holomorphic symplectic form sigma - 2 eta omega_I - eta^2 conj(sigma).

    The normalization is chosen so the dependence on eta is polynomial;
    the price is a pole at infinity, so the chart marker is rejected.
    """
    if is_inf(eta):
        raise ValueError("the holomorphic form has a pole at infinity; use the other chart")
    return (
        model.sigma
        - model.omega_i.scale(QQi(2) * eta)
        - model.sigma_bar.scale(eta * eta)
    )


def holomorphic_form_normalized(model: HyperkahlerModel, eta: QQi) -> Multivector:
    """The unit-scale representative, divided by 1 + |eta|^2."""
    scale = QQi(Fraction(1) / (Fraction(1) + eta.abs2()))
    return holomorphic_form(model, eta).scale(scale)


def rotation_so3(eta: QQi) -> Matrix:
    """Exact rotation matrix carrying (omega_I, omega_J, omega_K) to
    (kahler_form, Re, Im of the normalized holomorphic form) at eta = x + iy.
    """
    if is_inf(eta):
        raise ValueError("rotation matrix requires a finite chart value")
    x, y = eta.re, eta.im
    den = 1 + x * x + y * y
    rows = [
        [1 - x * x - y * y, 2 * x, 2 * y],
        [-2 * x, 1 - x * x + y * y, -2 * x * y],
        [-2 * y, -2 * x * y, 1 + x * x - y * y],
    ]
    return Matrix([[QQi(v / den) for v in row] for row in rows])


def generalized_metric(model: HyperkahlerModel) -> Matrix:
    """Gram matrix of G(X+xi, Y+eta) = (g(X,Y) + g^-1(xi,eta)) / 2 on E."""
    half = QQi(Fraction(1, 2))
    d = model.dim
    return Matrix.block_diag([Matrix.identity(d).scale(half), Matrix.identity(d).scale(half)])
