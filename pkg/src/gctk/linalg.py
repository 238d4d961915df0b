"""Exact dense linear algebra over complex rationals.

Small matrices only (the double space of a dim-16 model is 32x32), so
plain Gaussian elimination with exact arithmetic is both simple and fast
enough.  Signatures of real symmetric matrices are computed by exact
congruence pivoting (Sylvester inertia); a float path exists as a one-way
cross check.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .scalars import ONE, QQi, ZERO, _coerce


class Matrix:
    """Immutable dense matrix with QQi entries."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable]):
        self.rows = tuple(
            tuple(_entry(x) for x in row) for row in rows
        )
        if self.rows:
            w = len(self.rows[0])
            if any(len(r) != w for r in self.rows):
                raise ValueError("ragged matrix rows")

    # -- constructors ----------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, r: int, c: int) -> "Matrix":
        return cls([[ZERO] * c for _ in range(r)])

    @classmethod
    def from_cols(cls, cols: Sequence[Sequence]) -> "Matrix":
        if not cols:
            return cls([])
        n = len(cols[0])
        return cls([[cols[j][i] for j in range(len(cols))] for i in range(n)])

    @classmethod
    def block(cls, grid: Sequence[Sequence["Matrix"]]) -> "Matrix":
        rows = []
        for band in grid:
            height = band[0].nrows
            for i in range(height):
                row: list = []
                for blk in band:
                    row.extend(blk.rows[i])
                rows.append(row)
        return cls(rows)

    @classmethod
    def block_diag(cls, blocks: Sequence["Matrix"]) -> "Matrix":
        n = sum(b.nrows for b in blocks)
        m = sum(b.ncols for b in blocks)
        out = [[ZERO] * m for _ in range(n)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.nrows):
                for j in range(b.ncols):
                    out[r0 + i][c0 + j] = b.rows[i][j]
            r0 += b.nrows
            c0 += b.ncols
        return cls(out)

    # -- shape / access ---------------------------------------------------------

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def __getitem__(self, ij) -> QQi:
        i, j = ij
        return self.rows[i][j]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix([[self.rows[i][j] for j in cols] for i in rows])

    # -- arithmetic ---------------------------------------------------------------

    def __add__(self, other: "Matrix") -> "Matrix":
        return Matrix(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)]
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        return Matrix(
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)]
        )

    def __neg__(self) -> "Matrix":
        return Matrix([[-a for a in r] for r in self.rows])

    def scale(self, c) -> "Matrix":
        c = _entry(c)
        return Matrix([[c * a for a in r] for r in self.rows])

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ValueError("matrix shape mismatch")
        nc = other.ncols
        out = []
        for ra in self.rows:
            acc = [ZERO] * nc
            for k, a in enumerate(ra):
                if a.is_zero():
                    continue
                rb = other.rows[k]
                for j, b in enumerate(rb):
                    if not b.is_zero():
                        acc[j] = acc[j] + a * b
            out.append(acc)
        return Matrix(out)

    def apply(self, vec: Sequence) -> tuple:
        if self.ncols != len(vec):
            raise ValueError("matrix/vector shape mismatch")
        return tuple(sum((a * x for a, x in zip(r, vec)), ZERO) for r in self.rows)

    def transpose(self) -> "Matrix":
        return Matrix(list(zip(*self.rows))) if self.rows else Matrix([])

    def conjugate(self) -> "Matrix":
        return Matrix([[a.conjugate() for a in r] for r in self.rows])

    def map(self, fn: Callable[[QQi], QQi]) -> "Matrix":
        return Matrix([[fn(a) for a in r] for r in self.rows])

    # -- predicates -----------------------------------------------------------------

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.rows for a in r)

    def is_real(self) -> bool:
        return all(a.is_real() for r in self.rows for a in r)

    def is_symmetric(self) -> bool:
        return self == self.transpose()

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        body = "; ".join(" ".join(str(a) for a in r) for r in self.rows)
        return f"Matrix[{body}]"


def _entry(x) -> QQi:
    c = _coerce(x)
    if c is None:
        raise TypeError(f"matrix entries must be rational/complex-rational, got {type(x).__name__}")
    return c


# -- elimination ----------------------------------------------------------------


def _rref(rows: list[list[QQi]]) -> tuple[list[list[QQi]], list[int]]:
    """Reduced row echelon form (in place) and the pivot column list."""
    nr = len(rows)
    nc = len(rows[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if not rows[i][c].is_zero()), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c].inv()
        rows[r] = [inv * x for x in rows[r]]
        for i in range(nr):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return rows, pivots


def rank(m: Matrix) -> int:
    if m.nrows == 0 or m.ncols == 0:
        return 0
    _, pivots = _rref([list(r) for r in m.rows])
    return len(pivots)


def kernel_basis(m: Matrix) -> list[tuple[QQi, ...]]:
    """Basis of the right null space, as vectors of length ncols."""
    nc = m.ncols
    if nc == 0:
        return []
    if m.nrows == 0:
        return [tuple(ONE if j == k else ZERO for j in range(nc)) for k in range(nc)]
    rows, pivots = _rref([list(r) for r in m.rows])
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * nc
        v[f] = ONE
        for r, p in enumerate(pivots):
            v[p] = -rows[r][f]
        basis.append(tuple(v))
    return basis


def inverse(m: Matrix) -> Matrix:
    n = m.nrows
    if n != m.ncols:
        raise ValueError("inverse of a non-square matrix")
    aug = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(m.rows)]
    rows, pivots = _rref(aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return Matrix([r[n:] for r in rows])


def in_column_span(m: Matrix, vec: Sequence[QQi]) -> bool:
    """Whether vec is a linear combination of the columns of m."""
    base = rank(m)
    aug = Matrix([list(r) + [v] for r, v in zip(m.rows, vec)])
    return rank(aug) == base


# -- Sylvester inertia ----------------------------------------------------------


def inertia(m: Matrix) -> tuple[int, int, int]:
    """Exact (positive, negative, zero) inertia of a real symmetric matrix,
    by congruence pivoting; no eigenvalues are computed.
    """
    if not m.is_real():
        raise ValueError("inertia requires a real matrix")
    if not m.is_symmetric():
        raise ValueError("inertia requires a symmetric matrix")
    n = m.nrows
    a = [[x.re for x in row] for row in m.rows]
    active = list(range(n))
    pos = neg = 0
    while active:
        k = next((i for i in active if a[i][i] != 0), None)
        if k is None:
            # all active diagonal entries vanish; make one nonzero by the
            # congruence e_i -> e_i + e_j, which sets a[i][i] = 2 a[i][j]
            pair = next(
                ((i, j) for i in active for j in active if j != i and a[i][j] != 0),
                None,
            )
            if pair is None:
                break  # remaining block is zero
            i, j = pair
            for t in range(n):
                a[i][t] = a[i][t] + a[j][t]
            for t in range(n):
                a[t][i] = a[t][i] + a[t][j]
            continue
        d = a[k][k]
        if d > 0:
            pos += 1
        else:
            neg += 1
        active.remove(k)
        for i in active:
            if a[i][k] != 0:
                f = a[i][k] / d
                for j in active:
                    a[i][j] = a[i][j] - f * a[k][j]
        for i in active:
            a[k][i] = a[i][k] = Fraction(0)
    zero = n - pos - neg
    return pos, neg, zero


def inertia_float(rows: Sequence[Sequence[float]], tol: float = 1e-9) -> tuple[int, int, int]:
    """Float cross-check of :func:`inertia` by the same congruence pivoting.

    One-way only: used to corroborate exact results, never to replace them.
    """
    n = len(rows)
    a = [list(map(float, r)) for r in rows]
    active = list(range(n))
    pos = neg = 0
    while active:
        k = max(active, key=lambda i: abs(a[i][i]))
        if abs(a[k][k]) <= tol:
            pair = max(
                ((i, j) for i in active for j in active if i != j),
                key=lambda ij: abs(a[ij[0]][ij[1]]),
                default=None,
            )
            if pair is None or abs(a[pair[0]][pair[1]]) <= tol:
                break
            i, j = pair
            for t in range(n):
                a[i][t] += a[j][t]
            for t in range(n):
                a[t][i] += a[t][j]
            continue
        d = a[k][k]
        if d > 0:
            pos += 1
        else:
            neg += 1
        active.remove(k)
        for i in active:
            f = a[i][k] / d
            for j in active:
                a[i][j] -= f * a[k][j]
    return pos, neg, n - pos - neg


def to_float_rows(m: Matrix) -> list[list[float]]:
    if not m.is_real():
        raise ValueError("float rows require a real matrix")
    return [[float(x.re) for x in row] for row in m.rows]
