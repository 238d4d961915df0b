"""Exterior algebra over R^d with a pluggable exact scalar ring.

Basis k-forms are keyed by bitmasks (bit i <-> dx^i), so wedge signs are
transposition counts on masks.  Coefficients may be QQi or Poly (anything
with ring operations, ``is_zero`` and ``conjugate``); zero coefficients
are never stored.  Ambient dimension is capped at 16 coordinates, enough
for the dim-16 twistor total space of the largest supported model.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Callable, Iterable, Mapping, Sequence

from .scalars import ONE, QQi, ZERO

MAX_DIM = 16


def _wedge_sign(ma: int, mb: int) -> int:
    """Sign of sorting the concatenation of two disjoint ascending masks."""
    s = 0
    a = ma >> 1
    while a:
        s += (a & mb).bit_count()
        a >>= 1
    return -1 if s & 1 else 1


def _is_zero(c) -> bool:
    return c.is_zero()


class Multivector:
    """Element of the exterior algebra with dim coordinates."""

    __slots__ = ("dim", "coeffs")

    def __init__(self, dim: int, coeffs: Mapping[int, object] | None = None):
        if dim < 0 or dim > MAX_DIM:
            raise ValueError(f"ambient dimension must be in 0..{MAX_DIM}")
        self.dim = dim
        if coeffs:
            self.coeffs = {m: c for m, c in coeffs.items() if not _is_zero(c)}
        else:
            self.coeffs = {}
        limit = 1 << dim
        if any(m < 0 or m >= limit for m in self.coeffs):
            raise ValueError("basis mask outside the ambient dimension")

    # -- constructors ------------------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "Multivector":
        return cls(dim)

    @classmethod
    def scalar(cls, dim: int, c=ONE) -> "Multivector":
        return cls(dim, {0: c})

    @classmethod
    def basis(cls, dim: int, mask: int, c=ONE) -> "Multivector":
        return cls(dim, {mask: c})

    @classmethod
    def one_form(cls, components: Sequence) -> "Multivector":
        dim = len(components)
        return cls(dim, {1 << i: c for i, c in enumerate(components)})

    # -- additive structure ---------------------------------------------------------

    def __add__(self, other: "Multivector") -> "Multivector":
        self._check(other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            s = out.get(m)
            s = c if s is None else s + c
            if _is_zero(s):
                out.pop(m, None)
            else:
                out[m] = s
        return Multivector(self.dim, out)

    def __sub__(self, other: "Multivector") -> "Multivector":
        return self + (-other)

    def __neg__(self) -> "Multivector":
        return Multivector(self.dim, {m: -c for m, c in self.coeffs.items()})

    def scale(self, c) -> "Multivector":
        if _is_zero(c) if hasattr(c, "is_zero") else c == 0:
            return Multivector(self.dim)
        return Multivector(self.dim, {m: c * x for m, x in self.coeffs.items()})

    # -- structure --------------------------------------------------------------------

    def grades(self) -> set[int]:
        return {m.bit_count() for m in self.coeffs}

    def coefficient(self, mask: int):
        return self.coeffs.get(mask)

    def map_coeffs(self, fn: Callable, dim: int | None = None) -> "Multivector":
        return Multivector(dim if dim is not None else self.dim,
                           {m: fn(c) for m, c in self.coeffs.items()})

    def conjugate(self) -> "Multivector":
        return self.map_coeffs(lambda c: c.conjugate())

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        if self.dim != other.dim:
            return False
        if set(self.coeffs) != set(other.coeffs):
            return False
        return all(self.coeffs[m] == other.coeffs[m] for m in self.coeffs)

    def __hash__(self):
        return hash((self.dim, frozenset(self.coeffs.items())))

    def _check(self, other: "Multivector"):
        if self.dim != other.dim:
            raise ValueError("ambient dimension mismatch")

    def __repr__(self):
        return f"Multivector(dim={self.dim}, {self})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for m in sorted(self.coeffs):
            c = self.coeffs[m]
            cs = str(c)
            if ("+" in cs[1:]) or ("-" in cs[1:]) or "*" in cs:
                cs = f"({cs})"
            if m == 0:
                parts.append(cs)
            else:
                mono = "^".join(f"dx{i}" for i in range(self.dim) if m >> i & 1)
                parts.append(f"{cs} * {mono}")
        return " + ".join(parts)


class EVector:
    """Element X + xi of the double space T + T* at a point."""

    __slots__ = ("dim", "tangent", "cotangent")

    def __init__(self, tangent: Sequence, cotangent: Sequence):
        if len(tangent) != len(cotangent):
            raise ValueError("tangent/cotangent length mismatch")
        self.dim = len(tangent)
        self.tangent = tuple(tangent)
        self.cotangent = tuple(cotangent)

    @classmethod
    def from_flat(cls, comps: Sequence) -> "EVector":
        d = len(comps) // 2
        return cls(comps[:d], comps[d:])

    def flat(self) -> tuple:
        return self.tangent + self.cotangent

    def conjugate(self) -> "EVector":
        return EVector(
            [c.conjugate() for c in self.tangent],
            [c.conjugate() for c in self.cotangent],
        )

    def __eq__(self, other):
        if not isinstance(other, EVector):
            return NotImplemented
        return self.tangent == other.tangent and self.cotangent == other.cotangent

    def __repr__(self):
        return f"EVector({self.tangent}, {self.cotangent})"


# -- products -------------------------------------------------------------------------


def wedge(a: Multivector, b: Multivector) -> Multivector:
    """Graded-commutative exterior product with exact transposition signs."""
    a._check(b)
    out: dict = {}
    for ma, ca in a.coeffs.items():
        for mb, cb in b.coeffs.items():
            if ma & mb:
                continue
            m = ma | mb
            term = ca * cb
            if _wedge_sign(ma, mb) < 0:
                term = -term
            s = out.get(m)
            s = term if s is None else s + term
            if _is_zero(s):
                out.pop(m, None)
            else:
                out[m] = s
    return Multivector(a.dim, out)


def wedge_power(a: Multivector, k: int) -> Multivector:
    out = Multivector.scalar(a.dim)
    for _ in range(k):
        out = wedge(out, a)
    return out


def interior(tangent: Sequence, a: Multivector) -> Multivector:
    """Interior product by the vector with the given components; a graded
    derivation of degree -1 with iota(dx^i) = X^i.
    """
    if len(tangent) != a.dim:
        raise ValueError("ambient dimension mismatch")
    out: dict = {}
    for m, c in a.coeffs.items():
        mm = m
        while mm:
            low = mm & -mm
            i = low.bit_length() - 1
            x = tangent[i]
            if not _is_zero(x):
                term = x * c
                if (m & (low - 1)).bit_count() & 1:
                    term = -term
                key = m ^ low
                s = out.get(key)
                s = term if s is None else s + term
                if _is_zero(s):
                    out.pop(key, None)
                else:
                    out[key] = s
            mm ^= low
    return Multivector(a.dim, out)


def clifford_act(e: EVector, a: Multivector) -> Multivector:
    """Clifford action (X + xi) . a = iota_X a + xi ^ a of the double space
    on forms; squares to the inner product <e, e>.
    """
    if e.dim != a.dim:
        raise ValueError("ambient dimension mismatch")
    return interior(e.tangent, a) + wedge(Multivector.one_form(e.cotangent), a)


def grade_project(a: Multivector, k: int) -> Multivector:
    if k < 0 or k > a.dim:
        return Multivector(a.dim)
    return Multivector(a.dim, {m: c for m, c in a.coeffs.items() if m.bit_count() == k})


def mukai_pair(a: Multivector, b: Multivector):
    """Pairing [a2^b2 - a0^b4 - a4^b0] on even forms of a 4-manifold,
    signed so that <w, w> = 2 for each unit Kahler form and for 1 - vol.
    """
    a._check(b)
    if a.dim != 4:
        raise ValueError("the even pairing is implemented for dim 4 only")
    for x in (a, b):
        if any(g % 2 for g in x.grades()):
            raise ValueError("the even pairing requires even-graded forms")
    top = (
        wedge(grade_project(a, 2), grade_project(b, 2))
        - wedge(grade_project(a, 0), grade_project(b, 4))
        - wedge(grade_project(a, 4), grade_project(b, 0))
    )
    c = top.coefficient(0b1111)
    if c is None:
        ring_sample = next(iter(a.coeffs.values()), None) or next(iter(b.coeffs.values()), None)
        return ring_sample - ring_sample if ring_sample is not None else ZERO
    return c


def exp_even(a: Multivector) -> Multivector:
    """Finite exponential sum of a form with only even grades >= 2.

    Nilpotency is a precondition, not a runtime surprise: grade-0 parts are
    rejected and callers multiply scalar exponential factors explicitly.
    """
    bad = [g for g in a.grades() if g % 2 or g == 0]
    if bad:
        raise ValueError(f"exp requires even grades >= 2, found grade {min(bad)}")
    out = Multivector.scalar(a.dim)
    power = Multivector.scalar(a.dim)
    for j in range(1, a.dim // 2 + 1):
        power = wedge(power, a)
        if power.is_zero():
            break
        out = out + power.scale(QQi(Fraction(1, factorial(j))))
    return out
