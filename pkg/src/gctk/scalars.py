"""Exact scalar rings: complex rationals and multivariate polynomials over them.

Everything here is immutable and computes exactly; there is no hidden
float fallback.  The one-way float conversion lives at the bottom and is
used only for eigenvalue-sign cross checks.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

Rat = Fraction
RatLike = Union[int, Fraction]


class NonDivisibleError(ValueError):
    """Raised when an exact polynomial division leaves a remainder."""


def _frac(x: RatLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


class QQi:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: RatLike = 0, im: RatLike = 0):
        self.re = _frac(re)
        self.im = _frac(im)

    # -- ring / field operations -------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return QQi(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return QQi(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return QQi(other.re - self.re, other.im - self.im)

    def __mul__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return QQi(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inv()

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inv() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inv(self) -> "QQi":
        n = self.abs2()
        if n == 0:
            raise ZeroDivisionError("division by zero complex rational")
        return QQi(self.re / n, -self.im / n)

    def conjugate(self) -> "QQi":
        return QQi(self.re, -self.im)

    def abs2(self) -> Fraction:
        """|z|^2 = re^2 + im^2, exactly."""
        return self.re * self.re + self.im * self.im

    # -- predicates ----------------------------------------------------------

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __eq__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"QQi({self.re!r}, {self.im!r})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"


def _coerce(x) -> QQi | None:
    if isinstance(x, QQi):
        return x
    if isinstance(x, (int, Fraction)):
        return QQi(x)
    return None


ZERO = QQi(0)
ONE = QQi(1)
I = QQi(0, 1)


# -- rational complex literals (CLI grammar: RAT(+RAT i)?) -------------------

_RAT = r"-?\d+(?:/\d+)?"
_LITERAL_RE = re.compile(rf"^({_RAT})(?:\+({_RAT})i)?$")


def parse_rational_complex(text: str) -> QQi:
    """Parse ``p/q`` or ``p/q+r/si`` into an exact complex rational.

    Floats are rejected; signs belong to the individual rationals, so
    ``1+-2i`` denotes 1-2i.
    """
    m = _LITERAL_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not a rational complex literal: {text!r}")
    re_part = Fraction(m.group(1))
    im_part = Fraction(m.group(2)) if m.group(2) else Fraction(0)
    return QQi(re_part, im_part)


# -- the point at infinity on a parameter sphere ------------------------------


class _Infinity:
    """Chart marker for the point at infinity of a CP^1 parameter."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"


INF = _Infinity()
CP1 = Union[QQi, _Infinity]


def is_inf(z: CP1) -> bool:
    return z is INF


def cp1_antipode(z: CP1) -> CP1:
    """Antipodal point z -> -1/conj(z), with the chart markers at 0 and inf."""
    if is_inf(z):
        return ZERO
    if z.is_zero():
        return INF
    return -z.conjugate().inv()


def cp1_str(z: CP1) -> str:
    return "inf" if is_inf(z) else str(z)


# -- multivariate polynomials -------------------------------------------------


class Poly:
    """Polynomial in named real indeterminates with QQi coefficients.

    Canonical form: no zero coefficients are stored, and the zero
    polynomial has an empty term map.  Variables are real, so complex
    parameters enter as (re, im) variable pairs; holomorphy is then the
    vanishing of the Wirtinger test operator (see :func:`wirtinger`).
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars: tuple[str, ...] = (), terms: Mapping | None = None):
        self.vars = tuple(vars)
        self.terms = dict(terms) if terms else {}

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls) -> "Poly":
        return cls()

    @classmethod
    def constant(cls, c) -> "Poly":
        c = _coerce(c)
        if c.is_zero():
            return cls()
        return cls((), {(): c})

    @classmethod
    def variable(cls, name: str) -> "Poly":
        return cls((name,), {(1,): ONE})

    @classmethod
    def complex_variable(cls, re_name: str, im_name: str) -> "Poly":
        """The combination re + i*im of two real indeterminates."""
        return cls.variable(re_name) + I * cls.variable(im_name)

    # -- variable bookkeeping --------------------------------------------------

    def _remap(self, new_vars: tuple[str, ...]) -> dict:
        idx = [new_vars.index(v) for v in self.vars]
        out = {}
        width = len(new_vars)
        for exps, c in self.terms.items():
            key = [0] * width
            for j, e in zip(idx, exps):
                key[j] = e
            out[tuple(key)] = c
        return out

    def _unified(self, other: "Poly"):
        if self.vars == other.vars:
            return self.vars, self.terms, other.terms
        merged = tuple(sorted(set(self.vars) | set(other.vars)))
        return merged, self._remap(merged), other._remap(merged)

    # -- ring operations --------------------------------------------------------

    def __add__(self, other):
        other = _poly_coerce(other)
        if other is None:
            return NotImplemented
        vars_, a, b = self._unified(other)
        out = dict(a)
        for k, c in b.items():
            s = out.get(k, ZERO) + c
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return Poly(vars_, out)

    __radd__ = __add__

    def __sub__(self, other):
        other = _poly_coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _poly_coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __neg__(self):
        return Poly(self.vars, {k: -c for k, c in self.terms.items()})

    def __mul__(self, other):
        other = _poly_coerce(other)
        if other is None:
            return NotImplemented
        vars_, a, b = self._unified(other)
        out: dict = {}
        for ka, ca in a.items():
            for kb, cb in b.items():
                k = tuple(x + y for x, y in zip(ka, kb))
                s = out.get(k, ZERO) + ca * cb
                if s.is_zero():
                    out.pop(k, None)
                else:
                    out[k] = s
        return Poly(vars_, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        out = Poly.constant(ONE)
        for _ in range(k):
            out = out * self
        return out

    # -- calculus ------------------------------------------------------------

    def diff(self, var: str) -> "Poly":
        """Exact partial derivative; zero if the variable does not occur."""
        if var not in self.vars:
            return Poly.zero()
        j = self.vars.index(var)
        out = {}
        for exps, c in self.terms.items():
            e = exps[j]
            if e == 0:
                continue
            key = exps[:j] + (e - 1,) + exps[j + 1:]
            s = out.get(key, ZERO) + c * e
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
        return Poly(self.vars, out)

    def eval(self, assignment: Mapping[str, QQi | RatLike]) -> QQi:
        """Exact substitution of real values for every variable that occurs."""
        values = []
        for v in self.vars:
            if any(exps[self.vars.index(v)] for exps in self.terms) and v not in assignment:
                raise ValueError(f"missing variable in assignment: {v}")
            raw = assignment.get(v, 0)
            val = _coerce(raw)
            if val is None:
                raise TypeError(f"bad value for {v}: {raw!r}")
            if not val.is_real():
                raise ValueError(f"variables are real indeterminates; got complex value for {v}")
            values.append(val)
        total = ZERO
        for exps, c in self.terms.items():
            term = c
            for val, e in zip(values, exps):
                if e:
                    term = term * val ** e
            total = total + term
        return total

    def substitute(self, mapping: Mapping[str, "Poly | QQi | RatLike"]) -> "Poly":
        """Polynomial composition; unmapped variables stay themselves."""
        images = []
        for v in self.vars:
            img = mapping.get(v, None)
            if img is None:
                images.append(Poly.variable(v))
            elif isinstance(img, Poly):
                images.append(img)
            else:
                images.append(Poly.constant(img))
        total = Poly.zero()
        for exps, c in self.terms.items():
            term = Poly.constant(c)
            for img, e in zip(images, exps):
                for _ in range(e):
                    term = term * img
            total = total + term
        return total

    def conjugate(self) -> "Poly":
        """Complex conjugation of coefficients (variables are real)."""
        return Poly(self.vars, {k: c.conjugate() for k, c in self.terms.items()})

    # -- structure -------------------------------------------------------------

    def degree_in(self, vars: str | Iterable[str]) -> int:
        """Max combined exponent over the given variables; 0 for the zero poly."""
        names = {vars} if isinstance(vars, str) else set(vars)
        idx = [j for j, v in enumerate(self.vars) if v in names]
        if not self.terms or not idx:
            return 0
        return max(sum(exps[j] for j in idx) for exps in self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(exps) for exps in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(exps) for exps in self.terms)

    def constant_value(self) -> QQi:
        total = ZERO
        for exps, c in self.terms.items():
            if any(exps):
                raise ValueError("polynomial is not constant")
            total = total + c
        return total

    def __eq__(self, other):
        other = _poly_coerce(other)
        if other is None:
            return NotImplemented
        _, a, b = self._unified(other)
        return a == b

    def __hash__(self):
        merged = tuple(sorted(self.vars))
        return hash((merged, frozenset(self._remap(merged).items())))

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        keys = sorted(self.terms, key=lambda e: (sum(e), e))
        parts = []
        for exps in keys:
            c = self.terms[exps]
            mono = "*".join(
                f"{v}^{e}" if e > 1 else v
                for v, e in zip(self.vars, exps)
                if e
            )
            cs = str(c)
            if mono:
                if ("+" in cs[1:]) or ("-" in cs[1:]):
                    cs = f"({cs})"
                parts.append(f"{cs}*{mono}")
            else:
                parts.append(cs)
        return " + ".join(parts)

    # -- exact division ---------------------------------------------------------

    def divide_exact(self, divisor: "Poly") -> "Poly":
        """Return q with self = divisor * q, or raise NonDivisibleError.

        Single-divisor multivariate division in graded-lex order; exactness
        of the quotient is checked at every step and by a zero remainder.
        """
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        vars_, a, b = self._unified(divisor)
        rem = dict(a)
        div = b
        lead_key = max(div, key=lambda e: (sum(e), e))
        lead_c = div[lead_key]
        q: dict = {}
        while rem:
            k = max(rem, key=lambda e: (sum(e), e))
            delta = tuple(x - y for x, y in zip(k, lead_key))
            if any(d < 0 for d in delta):
                raise NonDivisibleError("leading term not divisible")
            coeff = rem[k] / lead_c
            q[delta] = q.get(delta, ZERO) + coeff
            for kb, cb in div.items():
                kk = tuple(x + y for x, y in zip(delta, kb))
                s = rem.get(kk, ZERO) - coeff * cb
                if s.is_zero():
                    rem.pop(kk, None)
                else:
                    rem[kk] = s
        return Poly(vars_, {k: c for k, c in q.items() if not c.is_zero()})


def _poly_coerce(x) -> Poly | None:
    if isinstance(x, Poly):
        return x
    c = _coerce(x)
    if c is not None:
        return Poly.constant(c)
    return None


def poly_eval(p: Poly, assignment: Mapping[str, QQi | RatLike]) -> QQi:
    return p.eval(assignment)


def poly_divide_exact(p: Poly, q: Poly) -> Poly:
    return p.divide_exact(q)


def wirtinger(p: Poly, re_var: str, im_var: str) -> Poly:
    """Holomorphy test operator (d/d re + i d/d im)/2 for the complex
    combination re + i*im; it vanishes exactly when p is holomorphic in it.
    """
    return QQi(Fraction(1, 2)) * (p.diff(re_var) + I * p.diff(im_var))


def wirtinger_conj(p: Poly, re_var: str, im_var: str) -> Poly:
    """Conjugate operator (d/d re - i d/d im)/2; vanishes exactly when p
    depends on the variable pair only through the conjugate combination.
    """
    return QQi(Fraction(1, 2)) * (p.diff(re_var) - I * p.diff(im_var))


# -- one-way float adapter ----------------------------------------------------


def to_float_complex(c: QQi) -> complex:
    """Lossy image of an exact complex rational; never converted back."""
    return complex(float(c.re), float(c.im))
