"""Linear algebra of the double space E = T + T* at a point.

Contains the split-signature inner product, generalized almost complex
structures as 2d x 2d block matrices in the basis (d_0..d_{d-1},
dx^0..dx^{d-1}), B-field transforms, type, Dirac bases, and the exact
dictionary between pure spinors and endomorphisms.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from . import linalg
from .linalg import Matrix
from .multivector import EVector, Multivector, clifford_act
from .scalars import I, ONE, QQi, ZERO

HALF = QQi(Fraction(1, 2))


def inner_product(e1: EVector, e2: EVector) -> QQi:
    """Split-signature pairing <X+xi, Y+eta> = (xi(Y) + eta(X)) / 2."""
    if e1.dim != e2.dim:
        raise ValueError("dimension mismatch")
    s = ZERO
    for a, b in zip(e1.cotangent, e2.tangent):
        s = s + a * b
    for a, b in zip(e2.cotangent, e1.tangent):
        s = s + a * b
    return HALF * s


def pairing_matrix(d: int) -> Matrix:
    """Gram matrix of the inner product on E, signature (d, d)."""
    z = Matrix.zeros(d, d)
    h = Matrix.identity(d).scale(HALF)
    return Matrix.block([[z, h], [h, z]])


class GeneralizedEndomorphism:
    """Real endomorphism of E = T + T* stored as one 2d x 2d matrix.

    Blocks: A maps T->T, P maps T*->T, Q maps T->T*, D maps T*->T*.
    """

    __slots__ = ("dim", "matrix")

    def __init__(self, dim: int, matrix: Matrix):
        if matrix.nrows != 2 * dim or matrix.ncols != 2 * dim:
            raise ValueError("endomorphism matrix must be 2d x 2d")
        self.dim = dim
        self.matrix = matrix

    @property
    def block_a(self) -> Matrix:
        d = self.dim
        return self.matrix.submatrix(range(d), range(d))

    @property
    def block_p(self) -> Matrix:
        d = self.dim
        return self.matrix.submatrix(range(d), range(d, 2 * d))

    @property
    def block_q(self) -> Matrix:
        d = self.dim
        return self.matrix.submatrix(range(d, 2 * d), range(d))

    @property
    def block_d(self) -> Matrix:
        d = self.dim
        return self.matrix.submatrix(range(d, 2 * d), range(d, 2 * d))

    @classmethod
    def from_blocks(cls, a: Matrix, p: Matrix, q: Matrix, d_blk: Matrix) -> "GeneralizedEndomorphism":
        return cls(a.nrows, Matrix.block([[a, p], [q, d_blk]]))

    def apply(self, e: EVector) -> EVector:
        out = self.matrix.apply(e.flat())
        return EVector.from_flat(out)

    def compose(self, other: "GeneralizedEndomorphism") -> "GeneralizedEndomorphism":
        return GeneralizedEndomorphism(self.dim, self.matrix @ other.matrix)

    def __add__(self, other: "GeneralizedEndomorphism") -> "GeneralizedEndomorphism":
        return GeneralizedEndomorphism(self.dim, self.matrix + other.matrix)

    def __neg__(self) -> "GeneralizedEndomorphism":
        return GeneralizedEndomorphism(self.dim, -self.matrix)

    def scale(self, c) -> "GeneralizedEndomorphism":
        return GeneralizedEndomorphism(self.dim, self.matrix.scale(c))

    def direct_sum(self, other: "GeneralizedEndomorphism") -> "GeneralizedEndomorphism":
        a = Matrix.block_diag([self.block_a, other.block_a])
        p = Matrix.block_diag([self.block_p, other.block_p])
        q = Matrix.block_diag([self.block_q, other.block_q])
        d_blk = Matrix.block_diag([self.block_d, other.block_d])
        return GeneralizedEndomorphism.from_blocks(a, p, q, d_blk)

    def __eq__(self, other):
        if not isinstance(other, GeneralizedEndomorphism):
            return NotImplemented
        return self.dim == other.dim and self.matrix == other.matrix

    def __repr__(self):
        return f"GeneralizedEndomorphism(dim={self.dim})"


# -- constructions -------------------------------------------------------------


def matrix_of_two_form(omega: Multivector) -> Matrix:
    """Matrix of the map X -> iota_X omega; entry [j][i] = omega(d_i, d_j)."""
    d = omega.dim
    if omega.grades() - {2}:
        raise ValueError("expected a homogeneous 2-form")
    rows = [[ZERO] * d for _ in range(d)]
    for mask, c in omega.coeffs.items():
        i = (mask & -mask).bit_length() - 1
        j = mask.bit_length() - 1
        rows[j][i] = c
        rows[i][j] = -c
    return Matrix(rows)


def two_form_from_matrix(m: Matrix) -> Multivector:
    """Inverse of :func:`matrix_of_two_form`; requires a skew matrix."""
    if m != -m.transpose():
        raise ValueError("two-form matrix must be skew")
    d = m.nrows
    coeffs = {}
    for i in range(d):
        for j in range(i + 1, d):
            c = m[j, i]
            if not c.is_zero():
                coeffs[(1 << i) | (1 << j)] = c
    return Multivector(d, coeffs)


def make_ji(i_mat: Matrix) -> GeneralizedEndomorphism:
    """Generalized structure of a complex structure: blocks (-I, 0; 0, I^T)."""
    d = i_mat.nrows
    if (i_mat @ i_mat) != -Matrix.identity(d):
        raise ValueError("matrix does not square to minus the identity")
    z = Matrix.zeros(d, d)
    return GeneralizedEndomorphism.from_blocks(-i_mat, z, z, i_mat.transpose())


def make_jomega(omega: Multivector) -> GeneralizedEndomorphism:
    """Generalized structure of a nondegenerate 2-form: (0, -w^-1; w, 0)."""
    w = matrix_of_two_form(omega)
    try:
        w_inv = linalg.inverse(w)
    except ValueError as exc:
        raise ValueError("two-form is degenerate") from exc
    z = Matrix.zeros(w.nrows, w.nrows)
    return GeneralizedEndomorphism.from_blocks(z, -w_inv, w, z)


def bfield_matrix(b: Multivector) -> Matrix:
    """The shear (1, 0; B, 1) of E induced by a 2-form."""
    bm = matrix_of_two_form(b)
    d = bm.nrows
    return Matrix.block(
        [[Matrix.identity(d), Matrix.zeros(d, d)], [bm, Matrix.identity(d)]]
    )


def bfield_transform(j: GeneralizedEndomorphism, b: Multivector) -> GeneralizedEndomorphism:
    """Conjugate e^-B J e^B; on spinor lines this is the wedge by exp(B)."""
    if b.is_zero():
        return j
    eb = bfield_matrix(b)
    neg = two_form_from_matrix(-matrix_of_two_form(b))
    eb_inv = bfield_matrix(neg)
    return GeneralizedEndomorphism(j.dim, eb_inv @ j.matrix @ eb)


# -- predicates ----------------------------------------------------------------


def is_gacs(j: GeneralizedEndomorphism, tol: float = 0.0) -> bool:
    """Whether j is a generalized almost complex structure: real, squares to
    minus the identity, and preserves the inner product.  Exact when tol = 0.
    """
    m = j.matrix
    n = m.nrows
    gram = pairing_matrix(j.dim)
    sq_defect = (m @ m) + Matrix.identity(n)
    orth_defect = (m.transpose() @ gram @ m) - gram
    if tol == 0.0:
        return m.is_real() and sq_defect.is_zero() and orth_defect.is_zero()
    bound = max(
        [abs(float(x.re)) + abs(float(x.im)) for mat in (sq_defect, orth_defect) for row in mat.rows for x in row],
        default=0.0,
    )
    return bound <= tol


def type_of(j: GeneralizedEndomorphism) -> int:
    """Half the dimension of T* intersected with J T*.

    A covector xi lies in that intersection exactly when the tangent block
    of J xi vanishes, so the type is half the kernel dimension of P.
    """
    if not is_gacs(j):
        raise ValueError("type is defined for generalized almost complex structures")
    d = j.dim
    k = d - linalg.rank(j.block_p)
    if k % 2:
        raise ValueError("odd intersection dimension; input is not a GACS")
    return k // 2


class DiracBasis:
    """Basis of a maximal isotropic subspace of the complexified double space."""

    __slots__ = ("dim", "vectors")

    def __init__(self, vectors: Sequence[EVector]):
        if not vectors:
            raise ValueError("empty basis")
        self.dim = vectors[0].dim
        if any(v.dim != self.dim for v in vectors):
            raise ValueError("mixed dimensions in basis")
        self.vectors = tuple(vectors)

    def matrix(self) -> Matrix:
        """Vectors as columns of a 2d x k matrix."""
        return Matrix.from_cols([v.flat() for v in self.vectors])

    def validate(self):
        if linalg.rank(self.matrix()) != len(self.vectors):
            raise ValueError("basis vectors are linearly dependent")
        for a in self.vectors:
            for b in self.vectors:
                if not inner_product(a, b).is_zero():
                    raise ValueError("basis is not isotropic")

    def __len__(self):
        return len(self.vectors)


def dirac_of(j: GeneralizedEndomorphism) -> DiracBasis:
    """Basis of the +i eigenspace of j inside the complexified double space."""
    if not is_gacs(j):
        raise ValueError("eigenbasis requires a generalized almost complex structure")
    n = j.matrix.nrows
    shifted = j.matrix - Matrix.identity(n).scale(I)
    kern = linalg.kernel_basis(shifted)
    if len(kern) != j.dim:
        raise ValueError("eigenspace has wrong dimension; input is not a GACS")
    basis = DiracBasis([EVector.from_flat(v) for v in kern])
    basis.validate()
    return basis


def _annihilator_vectors(phi: Multivector) -> list[EVector]:
    if phi.is_zero():
        raise ValueError("the zero form has no annihilator line")
    d = phi.dim
    images = []
    for i in range(d):
        tang = [ONE if k == i else ZERO for k in range(d)]
        images.append(clifford_act(EVector(tang, [ZERO] * d), phi))
    for i in range(d):
        cot = [ONE if k == i else ZERO for k in range(d)]
        images.append(clifford_act(EVector([ZERO] * d, cot), phi))
    masks = sorted({m for img in images for m in img.coeffs})
    if not masks:
        return [
            EVector.from_flat(tuple(ONE if j == k else ZERO for j in range(2 * d)))
            for k in range(2 * d)
        ]
    rows = [[img.coeffs.get(m, ZERO) for img in images] for m in masks]
    return [EVector.from_flat(v) for v in linalg.kernel_basis(Matrix(rows))]


def annihilator(phi: Multivector) -> DiracBasis:
    """Kernel of e -> e . phi on the complexified double space."""
    vectors = _annihilator_vectors(phi)
    if not vectors:
        raise ValueError("form has a trivial annihilator")
    return DiracBasis(vectors)


def is_pure(phi: Multivector) -> bool:
    """Whether the annihilator is maximal isotropic (complex dimension d)."""
    vectors = _annihilator_vectors(phi)
    if len(vectors) != phi.dim:
        return False
    return all(inner_product(a, b).is_zero() for a in vectors for b in vectors)


def is_nondegenerate_spinor(phi: Multivector) -> bool:
    """Whether the annihilator L satisfies L intersect conj(L) = 0, i.e. the
    spinor actually defines a generalized almost complex structure.
    """
    vectors = _annihilator_vectors(phi)
    cols = [v.flat() for v in vectors] + [v.conjugate().flat() for v in vectors]
    return linalg.rank(Matrix.from_cols(cols)) == 2 * phi.dim


def gacs_from_spinor(phi: Multivector) -> GeneralizedEndomorphism:
    """The unique real endomorphism whose +i eigenspace annihilates phi.

    Constant on spinor lines; raises on degenerate spinors.
    """
    vectors = _annihilator_vectors(phi)
    if len(vectors) != phi.dim:
        raise ValueError("annihilator is not maximal; form is not a pure spinor")
    cols = [v.flat() for v in vectors] + [v.conjugate().flat() for v in vectors]
    s = Matrix.from_cols(cols)
    try:
        s_inv = linalg.inverse(s)
    except ValueError as exc:
        raise ValueError("degenerate spinor: L meets its conjugate") from exc
    n = 2 * phi.dim
    eig = Matrix([[ (I if i < phi.dim else -I) if i == j else ZERO for j in range(n)] for i in range(n)])
    j_mat = s @ eig @ s_inv
    if not j_mat.is_real():
        raise ValueError("eigenspace data did not assemble to a real endomorphism")
    return GeneralizedEndomorphism(phi.dim, j_mat)


def spinor_from_gacs(j: GeneralizedEndomorphism) -> Multivector:
    """A generator of the line annihilated by the +i eigenspace of j.

    The product of the Clifford actions of an eigenbasis maps onto the
    spinor line, so the generator is found by driving basis forms through
    that product until one survives.  Normalization: the lexicographically
    first coefficient of the lowest nonzero grade is scaled to 1.
    """
    basis = dirac_of(j)
    d = j.dim
    for mask in range(1 << d):
        v = Multivector.basis(d, mask)
        for e in basis.vectors:
            v = clifford_act(e, v)
            if v.is_zero():
                break
        if not v.is_zero():
            result = normalize_spinor(v)
            check = annihilator(result)
            if len(check) != d:
                raise ValueError("spinor candidate has a non-maximal annihilator")
            return result
    raise ValueError("no spinor generator found; solution space is not 1-dimensional")


def normalize_spinor(phi: Multivector) -> Multivector:
    """Scale so the first coefficient of the lowest nonzero grade equals 1."""
    if phi.is_zero():
        raise ValueError("cannot normalize the zero form")
    k = min(phi.grades())
    mask = min(m for m in phi.coeffs if m.bit_count() == k)
    return phi.scale(phi.coeffs[mask].inv())


def spans_equal(a: DiracBasis, b: DiracBasis) -> bool:
    """Whether two bases span the same complex subspace."""
    if a.dim != b.dim or len(a) != len(b):
        return False
    cols = [v.flat() for v in a.vectors] + [v.flat() for v in b.vectors]
    return linalg.rank(Matrix.from_cols(cols)) == len(a)
