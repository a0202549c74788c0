"""Exact rational, sparse polynomial and factored rational-function arithmetic.

Variables are the Chern roots ``y_1 .. y_r`` followed by the equivariant parameter ``z``. Monomials are exponent
tuples of length ``r + 1`` compared in graded lexicographic order with ``y_1 < ... < y_r < z``.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import sympy

from qmapkit.errors import NonExpandable, NotDivisible, PoleAtPoint, SingularMatrix, ZeroForm


Rat = Fraction
Monomial = Tuple[int, ...]

# points used to probe a hyperplane before attempting an exact division
_PROBE_VALUES = (3, 7, 11, 19, 23, 31, 43, 47, 59, 67, 71, 79)


def to_rat(value) -> Fraction:
    if isinstance(value, float):
        raise TypeError(f"Floating point value {value!r} is not allowed, use an integer or a 'p/q' string")
    return Fraction(value)


def format_rat(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def monomial_key(mono: Monomial):
    return (sum(mono), tuple(reversed(mono)))


def default_names(nvars: int) -> List[str]:
    if nvars == 2:
        return ["y", "z"]
    return [f"y{i + 1}" for i in range(nvars - 1)] + ["z"]


def _format_monomial(mono: Monomial, names: Sequence[str]) -> str:
    parts = []
    for name, exp in zip(names, mono):
        if exp == 1:
            parts.append(name)
        elif exp:
            parts.append(f"{name}^{exp}")
    return "*".join(parts)


def _join_signed(chunks: List[Tuple[bool, str]]) -> str:
    if not chunks:
        return "0"
    out = ""
    for i, (negative, body) in enumerate(chunks):
        if i == 0:
            out = f"-{body}" if negative else body
        else:
            out += f" - {body}" if negative else f" + {body}"
    return out


class SparsePoly:
    """Polynomial over Q stored as a map from exponent tuples to nonzero rationals."""

    __slots__ = ("nvars", "_terms")

    def __init__(self, nvars: int, terms: Optional[Mapping[Monomial, object]] = None):
        self.nvars = nvars
        cleaned = {}
        for mono, coeff in (terms or {}).items():
            if len(mono) != nvars:
                raise ValueError(f"Monomial {mono} does not have {nvars} exponents")
            if any(e < 0 for e in mono):
                raise ValueError(f"Monomial {mono} has a negative exponent")
            coeff = to_rat(coeff)
            if coeff:
                cleaned[tuple(mono)] = coeff
        self._terms = cleaned

    @classmethod
    def _raw(cls, nvars: int, terms: Dict[Monomial, Fraction]) -> "SparsePoly":
        poly = cls.__new__(cls)
        poly.nvars = nvars
        poly._terms = terms
        return poly

    @classmethod
    def zero(cls, nvars: int) -> "SparsePoly":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, value) -> "SparsePoly":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def one(cls, nvars: int) -> "SparsePoly":
        return cls.constant(nvars, 1)

    @classmethod
    def variable(cls, nvars: int, index: int) -> "SparsePoly":
        mono = [0] * nvars
        mono[index] = 1
        return cls._raw(nvars, {tuple(mono): Fraction(1)})

    @classmethod
    def linear(cls, coeffs: Sequence) -> "SparsePoly":
        nvars = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            c = to_rat(c)
            if c:
                mono = [0] * nvars
                mono[i] = 1
                terms[tuple(mono)] = c
        return cls._raw(nvars, terms)

    @property
    def terms(self) -> Dict[Monomial, Fraction]:
        return dict(self._terms)

    def sorted_terms(self) -> List[Tuple[Monomial, Fraction]]:
        """Terms from the largest monomial down."""
        return sorted(self._terms.items(), key=lambda item: monomial_key(item[0]), reverse=True)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(m) for m in self._terms)

    def constant_value(self) -> Optional[Fraction]:
        """The value if this is a constant polynomial, otherwise None."""
        if not self._terms:
            return Fraction(0)
        if len(self._terms) == 1:
            ((mono, coeff),) = self._terms.items()
            if not any(mono):
                return coeff
        return None

    def _check(self, other: "SparsePoly"):
        if other.nvars != self.nvars:
            raise ValueError(f"Polynomials live in different rings ({self.nvars} vs {other.nvars} variables)")

    def __eq__(self, other):
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        return hash((self.nvars, tuple(self.sorted_terms())))

    def __add__(self, other):
        if not isinstance(other, SparsePoly):
            other = SparsePoly.constant(self.nvars, other)
        self._check(other)
        terms = dict(self._terms)
        for mono, coeff in other._terms.items():
            value = terms.get(mono, 0) + coeff
            if value:
                terms[mono] = value
            else:
                terms.pop(mono, None)
        return SparsePoly._raw(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly._raw(self.nvars, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, SparsePoly):
            other = SparsePoly.constant(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, value) -> "SparsePoly":
        value = to_rat(value)
        if not value:
            return SparsePoly.zero(self.nvars)
        return SparsePoly._raw(self.nvars, {m: c * value for m, c in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, SparsePoly):
            return self.scale(other)
        self._check(other)
        terms: Dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                value = terms.get(mono, 0) + c1 * c2
                if value:
                    terms[mono] = value
                else:
                    terms.pop(mono, None)
        return SparsePoly._raw(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError(f"Polynomial powers must be nonnegative integers, got {exponent!r}")
        result = SparsePoly.one(self.nvars)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def evaluate(self, point: Sequence) -> Fraction:
        point = [to_rat(v) for v in point]
        if len(point) != self.nvars:
            raise ValueError(f"Expected {self.nvars} coordinates, got {len(point)}")
        total = Fraction(0)
        for mono, coeff in self._terms.items():
            value = coeff
            for v, e in zip(point, mono):
                if e:
                    value *= v**e
            total += value
        return total

    def to_text(self, names: Optional[Sequence[str]] = None) -> str:
        names = names or default_names(self.nvars)
        chunks = []
        for mono, coeff in self.sorted_terms():
            body = _format_monomial(mono, names)
            mag = abs(coeff)
            if not body:
                body = format_rat(mag)
            elif mag != 1:
                body = f"{format_rat(mag)}*{body}"
            chunks.append((coeff < 0, body))
        return _join_signed(chunks)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"SparsePoly({self.to_text()!r})"


def _mul_linear_dict(terms: Mapping[Monomial, Fraction], coeffs: Sequence[int]) -> Dict[Monomial, Fraction]:
    out: Dict[Monomial, Fraction] = {}
    for i, c in enumerate(coeffs):
        if not c:
            continue
        for mono, value in terms.items():
            shifted = mono[:i] + (mono[i] + 1,) + mono[i + 1 :]
            out[shifted] = out.get(shifted, 0) + value * c
    return {m: c for m, c in out.items() if c}


@dataclass(frozen=True, order=True)
class LinearForm:
    """Primitive integer linear form in ``y_1 .. y_r, z`` whose first nonzero coefficient is positive."""

    coeffs: Tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if not any(coeffs):
            raise ZeroForm("A linear form cannot be identically zero")
        if reduce(gcd, coeffs) != 1:
            raise ValueError(f"Linear form {list(coeffs)} is not primitive, use normalize_linear_form")
        if next(c for c in coeffs if c) < 0:
            raise ValueError(f"Linear form {list(coeffs)} has a negative leading coefficient")

    @property
    def nvars(self) -> int:
        return len(self.coeffs)

    @property
    def z_coefficient(self) -> int:
        return self.coeffs[-1]

    @property
    def is_pure_y(self) -> bool:
        return self.coeffs[-1] == 0

    def evaluate(self, point: Sequence) -> Fraction:
        return sum((c * to_rat(v) for c, v in zip(self.coeffs, point) if c), Fraction(0))

    def to_poly(self) -> SparsePoly:
        return SparsePoly.linear(self.coeffs)

    def to_text(self) -> str:
        return "[" + ",".join(str(c) for c in self.coeffs) + "]"

    def pretty(self, names: Optional[Sequence[str]] = None) -> str:
        return self.to_poly().to_text(names)

    def __str__(self):
        return self.to_text()


def normalize_linear_form(raw: Sequence) -> Tuple[LinearForm, Fraction]:
    """Split a rational coefficient vector into a canonical LinearForm and the scale it was divided by."""
    raw = [to_rat(v) for v in raw]
    if not any(raw):
        raise ZeroForm(f"Cannot normalize the zero form {raw}")
    lcm = 1
    for v in raw:
        lcm = lcm * v.denominator // gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in raw]
    content = reduce(gcd, (abs(v) for v in ints))
    sign = 1 if next(v for v in ints if v) > 0 else -1
    form = LinearForm(tuple(v // (content * sign) for v in ints))
    return form, Fraction(content * sign, lcm)


Factors = Tuple[Tuple[LinearForm, int], ...]


def _canonical_factors(pairs: Iterable[Tuple[LinearForm, int]]) -> Factors:
    merged: Dict[LinearForm, int] = {}
    for form, exp in pairs:
        merged[form] = merged.get(form, 0) + int(exp)
    return tuple(sorted((f, e) for f, e in merged.items() if e))


@dataclass(frozen=True)
class FactoredRational:
    """``scalar * prod(form ** exponent)`` with every form a canonical LinearForm."""

    scalar: Fraction
    factors: Factors = ()

    def __post_init__(self):
        object.__setattr__(self, "scalar", to_rat(self.scalar))
        factors = tuple((f, int(e)) for f, e in self.factors)
        if self.scalar == 0:
            factors = ()
        if factors != _canonical_factors(factors):
            raise ValueError("FactoredRational factors must be sorted, merged and nonzero; use FactoredRational.build")
        nv = {f.nvars for f, _ in factors}
        if len(nv) > 1:
            raise ValueError(f"Factors live in rings with different numbers of variables: {sorted(nv)}")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def build(cls, scalar, factors: Union[Mapping[LinearForm, int], Iterable[Tuple[LinearForm, int]]] = ()):
        pairs = factors.items() if isinstance(factors, Mapping) else factors
        return cls(to_rat(scalar), _canonical_factors(pairs))

    @classmethod
    def one(cls) -> "FactoredRational":
        return cls(Fraction(1))

    @classmethod
    def from_raw(cls, raw: Sequence, exponent: int = 1) -> "FactoredRational":
        """The power ``(raw form) ** exponent`` with the normalization scale moved into the scalar."""
        form, scale = normalize_linear_form(raw)
        return cls.build(scale**exponent, [(form, exponent)])

    @property
    def nvars(self) -> Optional[int]:
        return self.factors[0][0].nvars if self.factors else None

    @property
    def is_zero(self) -> bool:
        return self.scalar == 0

    def numerator_factors(self) -> Factors:
        return tuple((f, e) for f, e in self.factors if e > 0)

    def denominator_factors(self) -> Factors:
        return tuple((f, -e) for f, e in self.factors if e < 0)

    def __mul__(self, other):
        if isinstance(other, FactoredRational):
            return factored_multiply(self, other)
        return FactoredRational.build(self.scalar * to_rat(other), self.factors)

    __rmul__ = __mul__

    def inverse(self) -> "FactoredRational":
        if self.scalar == 0:
            raise ZeroDivisionError("Cannot invert the zero FactoredRational")
        return FactoredRational(1 / self.scalar, tuple((f, -e) for f, e in self.factors))

    def __truediv__(self, other):
        if isinstance(other, FactoredRational):
            return self * other.inverse()
        return self * (1 / to_rat(other))

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return FactoredRational.build(self.scalar**exponent, [(f, e * exponent) for f, e in self.factors])

    def sort_key(self):
        return (tuple((f.coeffs, e) for f, e in self.factors), self.scalar)

    def evaluate(self, point: Sequence) -> Fraction:
        value = self.scalar
        for form, exp in self.factors:
            v = form.evaluate(point)
            if v == 0:
                if exp < 0:
                    raise PoleAtPoint(f"Factor {form} vanishes at {list(point)}")
                return Fraction(0)
            value *= v**exp
        return value

    def to_text(self) -> str:
        parts = []
        if self.scalar != 1 or not self.factors:
            parts.append(format_rat(self.scalar))
        parts.extend(f"{f.to_text()}^{e}" for f, e in self.factors)
        return " * ".join(parts)

    def pretty(self, names: Optional[Sequence[str]] = None) -> str:
        parts = []
        if self.scalar != 1 or not self.factors:
            parts.append(format_rat(self.scalar))
        for form, exp in self.factors:
            parts.append(f"({form.pretty(names)})^{exp}")
        return " * ".join(parts)

    def __str__(self):
        return self.to_text()


def factored_multiply(a: FactoredRational, b: FactoredRational) -> FactoredRational:
    return FactoredRational.build(a.scalar * b.scalar, list(a.factors) + list(b.factors))


@dataclass(frozen=True)
class RatExpr:
    """Polynomial numerator over a product of positive powers of linear forms, fully cancelled."""

    numerator: SparsePoly
    denominator: Factors = ()

    def __post_init__(self):
        den = tuple((f, int(e)) for f, e in self.denominator)
        if any(e <= 0 for _, e in den) or den != _canonical_factors(den):
            raise ValueError("RatExpr denominator must be sorted with positive exponents")
        if any(f.nvars != self.numerator.nvars for f, _ in den):
            raise ValueError("RatExpr denominator forms and numerator use different variables")
        if self.numerator.is_zero:
            den = ()
        object.__setattr__(self, "denominator", den)

    @property
    def nvars(self) -> int:
        return self.numerator.nvars

    @property
    def is_zero(self) -> bool:
        return self.numerator.is_zero

    def pure_y_poles(self) -> List[LinearForm]:
        return [f for f, _ in self.denominator if f.is_pure_y]

    def evaluate(self, point: Sequence) -> Fraction:
        den = Fraction(1)
        for form, exp in self.denominator:
            v = form.evaluate(point)
            if v == 0:
                raise PoleAtPoint(f"Denominator factor {form} vanishes at {list(point)}")
            den *= v**exp
        return self.numerator.evaluate(point) / den

    def as_factored(self) -> Optional[FactoredRational]:
        """The same value as a FactoredRational when the numerator is a constant."""
        c = self.numerator.constant_value()
        if c is None:
            return None
        return FactoredRational.build(c, [(f, -e) for f, e in self.denominator])

    def to_text(self, names: Optional[Sequence[str]] = None) -> str:
        num = self.numerator.to_text(names)
        if not self.denominator:
            return num
        den = " * ".join(f"{f.to_text()}^{e}" for f, e in self.denominator)
        return f"({num}) / ({den})"

    def __str__(self):
        return self.to_text()


def _probe_vanishes(p: SparsePoly, form: LinearForm) -> bool:
    """Evaluate ``p`` at one rational point of the hyperplane ``form = 0``."""
    pivot = max(i for i, c in enumerate(form.coeffs) if c)
    point = [Fraction(_PROBE_VALUES[i % len(_PROBE_VALUES)]) for i in range(form.nvars)]
    point[pivot] = Fraction(0)
    rest = sum(c * v for c, v in zip(form.coeffs, point))
    point[pivot] = -rest / form.coeffs[pivot]
    return p.evaluate(point) == 0


def divide_by_linear_form(p: SparsePoly, f: LinearForm) -> SparsePoly:
    """Exact quotient ``p / f``; raises NotDivisible when ``f`` does not divide ``p``."""
    if p.nvars != f.nvars:
        raise ValueError(f"Form {f} and polynomial use different variables")
    if p.is_zero:
        return p
    v = max(i for i, c in enumerate(f.coeffs) if c)
    c = Fraction(f.coeffs[v])
    rest = [(i, a) for i, a in enumerate(f.coeffs) if a and i != v]

    slices: Dict[int, Dict[Monomial, Fraction]] = {}
    for mono, coeff in p.terms.items():
        k = mono[v]
        base = mono[:v] + (0,) + mono[v + 1 :]
        slices.setdefault(k, {})[base] = coeff

    def times_rest(q: Dict[Monomial, Fraction]) -> Dict[Monomial, Fraction]:
        out: Dict[Monomial, Fraction] = {}
        for i, a in rest:
            for mono, coeff in q.items():
                shifted = mono[:i] + (mono[i] + 1,) + mono[i + 1 :]
                out[shifted] = out.get(shifted, 0) + a * coeff
        return out

    quotient: Dict[Monomial, Fraction] = {}
    prev: Dict[Monomial, Fraction] = {}
    for k in range(max(slices), 0, -1):
        current = dict(slices.get(k, {}))
        for mono, coeff in times_rest(prev).items():
            current[mono] = current.get(mono, 0) - coeff
        prev = {m: value / c for m, value in current.items() if value}
        for mono, coeff in prev.items():
            quotient[mono[:v] + (k - 1,) + mono[v + 1 :]] = coeff

    remainder = dict(slices.get(0, {}))
    for mono, coeff in times_rest(prev).items():
        remainder[mono] = remainder.get(mono, 0) - coeff
    if any(remainder.values()):
        raise NotDivisible(f"{f.pretty()} does not divide {p.to_text()}")
    return SparsePoly._raw(p.nvars, quotient)


def _reduce(numerator: SparsePoly, denominator: Mapping[LinearForm, int]) -> RatExpr:
    if numerator.is_zero:
        return RatExpr(numerator, ())
    remaining = {}
    for form in sorted(denominator):
        exp = denominator[form]
        while exp > 0 and _probe_vanishes(numerator, form):
            try:
                numerator = divide_by_linear_form(numerator, form)
            except NotDivisible:
                break
            exp -= 1
        if exp:
            remaining[form] = exp
    return RatExpr(numerator, _canonical_factors(remaining.items()))


def _expand_product(nvars: int, scalar: Fraction, exps: Mapping[LinearForm, int]) -> SparsePoly:
    terms: Dict[Monomial, Fraction] = {(0,) * nvars: Fraction(1)}
    for form in sorted(exps):
        for _ in range(exps[form]):
            terms = _mul_linear_dict(terms, form.coeffs)
    return SparsePoly._raw(nvars, {m: c * scalar for m, c in terms.items()})


def clear_and_sum(terms: Sequence[FactoredRational], nvars: Optional[int] = None) -> RatExpr:
    """Sum factored terms over their common denominator and cancel every linear factor that divides exactly."""
    if not terms:
        raise ValueError("clear_and_sum needs at least one term")
    if nvars is None:
        found = {t.nvars for t in terms if t.nvars is not None}
        # constant terms carry no ring, their sum lives in the one-variable ring
        if not found:
            found = {1}
        if len(found) != 1:
            raise ValueError("Cannot infer the number of variables, pass nvars explicitly")
        nvars = found.pop()
    ordered = sorted((t for t in terms if not t.is_zero), key=FactoredRational.sort_key)
    common: Dict[LinearForm, int] = {}
    for term in ordered:
        for form, exp in term.factors:
            if exp < 0:
                common[form] = max(common.get(form, 0), -exp)
    numerator = SparsePoly.zero(nvars)
    for term in ordered:
        exps = dict(common)
        for form, exp in term.factors:
            exps[form] = exps.get(form, 0) + exp
        numerator = numerator + _expand_product(nvars, term.scalar, exps)
    return _reduce(numerator, common)


def _check_invertible(matrix: Sequence[Sequence[int]], size: int):
    if len(matrix) != size or any(len(row) != size for row in matrix):
        raise ValueError(f"Expected a {size}x{size} matrix")
    if sympy.Matrix(matrix).det() == 0:
        raise SingularMatrix(f"Matrix {[list(r) for r in matrix]} is not invertible over Q")


def substitute_linear(p: SparsePoly, matrix: Sequence[Sequence[int]]) -> SparsePoly:
    """Replace each ``y_i`` by ``sum_j matrix[i][j] * y_j``; ``z`` is left alone."""
    r = p.nvars - 1
    _check_invertible(matrix, r)
    images = []
    for i in range(r):
        row = [Fraction(v) for v in matrix[i]] + [Fraction(0)]
        images.append(SparsePoly.linear(row))
    powers: Dict[Tuple[int, int], SparsePoly] = {}

    def power(i: int, e: int) -> SparsePoly:
        if (i, e) not in powers:
            powers[(i, e)] = images[i] ** e
        return powers[(i, e)]

    result = SparsePoly.zero(p.nvars)
    for mono, coeff in p.sorted_terms():
        z_mono = (0,) * r + (mono[-1],)
        term = SparsePoly._raw(p.nvars, {z_mono: coeff})
        for i in range(r):
            if mono[i]:
                term = term * power(i, mono[i])
        result = result + term
    return result


def substitute_linear_form(form: LinearForm, matrix: Sequence[Sequence[int]]) -> Tuple[LinearForm, Fraction]:
    """Image of a form under the same substitution, renormalized; returns the form and its scale."""
    r = form.nvars - 1
    raw = [sum(form.coeffs[i] * matrix[i][j] for i in range(r)) for j in range(r)] + [form.coeffs[-1]]
    return normalize_linear_form(raw)


def substitute_factored(term: FactoredRational, matrix: Sequence[Sequence[int]]) -> FactoredRational:
    if term.factors:
        _check_invertible(matrix, term.nvars - 1)
    scalar = term.scalar
    pairs = []
    for form, exp in term.factors:
        image, scale = substitute_linear_form(form, matrix)
        scalar *= scale**exp
        pairs.append((image, exp))
    return FactoredRational.build(scalar, pairs)


def substitute_ratexpr(expr: RatExpr, matrix: Sequence[Sequence[int]]) -> RatExpr:
    numerator = substitute_linear(expr.numerator, matrix)
    scalar = Fraction(1)
    pairs = []
    for form, exp in expr.denominator:
        image, scale = substitute_linear_form(form, matrix)
        scalar *= scale**exp
        pairs.append((image, exp))
    return RatExpr(numerator.scale(1 / scalar), _canonical_factors(pairs))


class NilExpansion:
    """Laurent expansion in ``z`` with nilpotent ``y`` variables.

    Stored as ``(y-monomial, z-exponent) -> coefficient``; ``terms`` gives the nested view.
    """

    __slots__ = ("bounds", "_coeffs")

    def __init__(self, bounds: Sequence[int], coeffs: Optional[Mapping[Tuple[Monomial, int], object]] = None):
        self.bounds = tuple(int(b) for b in bounds)
        cleaned = {}
        for (ymono, zexp), value in (coeffs or {}).items():
            value = to_rat(value)
            if value and self.allows(ymono):
                cleaned[(tuple(ymono), int(zexp))] = value
        self._coeffs = cleaned

    def allows(self, ymono: Monomial) -> bool:
        return all(e < b for e, b in zip(ymono, self.bounds))

    @property
    def terms(self) -> Dict[Monomial, Dict[int, Fraction]]:
        nested: Dict[Monomial, Dict[int, Fraction]] = {}
        for (ymono, zexp), value in sorted(self._coeffs.items()):
            nested.setdefault(ymono, {})[zexp] = value
        return nested

    def coefficient(self, ymono: Monomial, zexp: int) -> Fraction:
        return self._coeffs.get((tuple(ymono), zexp), Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, NilExpansion):
            return NotImplemented
        return self.bounds == other.bounds and self._coeffs == other._coeffs

    def __hash__(self):
        return hash((self.bounds, tuple(sorted(self._coeffs.items()))))

    def __mul__(self, other: "NilExpansion") -> "NilExpansion":
        if self.bounds != other.bounds:
            raise ValueError("Cannot multiply expansions with different nilpotency bounds")
        out: Dict[Tuple[Monomial, int], Fraction] = {}
        for (m1, z1), c1 in self._coeffs.items():
            for (m2, z2), c2 in other._coeffs.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                if not self.allows(mono):
                    continue
                key = (mono, z1 + z2)
                out[key] = out.get(key, 0) + c1 * c2
        return NilExpansion(self.bounds, out)

    def evaluate(self, point: Sequence) -> Fraction:
        point = [to_rat(v) for v in point]
        total = Fraction(0)
        for (ymono, zexp), value in self._coeffs.items():
            for v, e in zip(point, ymono):
                value *= v**e
            total += value * point[-1] ** zexp
        return total

    def to_text(self, names: Optional[Sequence[str]] = None) -> str:
        names = names or default_names(len(self.bounds) + 1)
        ordered = sorted(self._coeffs.items(), key=lambda item: (sum(item[0][0]), item[0][0], -item[0][1]))
        chunks = []
        for (ymono, zexp), value in ordered:
            factors = []
            ypart = _format_monomial(ymono + (0,), names)
            if ypart:
                factors.append(ypart)
            if zexp:
                factors.append(f"{names[-1]}^{zexp}" if zexp != 1 else names[-1])
            body = "*".join(factors)
            mag = abs(value)
            if not body:
                body = format_rat(mag)
            elif mag != 1:
                body = f"{format_rat(mag)}*{body}"
            chunks.append((value < 0, body))
        return _join_signed(chunks)

    def __str__(self):
        return self.to_text()


def _generalized_binomial(e: int, k: int) -> Fraction:
    value = Fraction(1)
    for i in range(k):
        value = value * (e - i) / (i + 1)
    return value


def _expand_form_power(form: LinearForm, exp: int, bounds: Tuple[int, ...]) -> NilExpansion:
    r = form.nvars - 1
    c = form.z_coefficient
    ell = {tuple(1 if j == i else 0 for j in range(r)): Fraction(a) for i, a in enumerate(form.coeffs[:-1]) if a}
    if c == 0:
        if exp < 0:
            raise NonExpandable(f"Denominator factor {form} has no z term, it cannot be expanded around y = 0")
        # pure y numerator factor
        power = NilExpansion(bounds, {((0,) * r, 0): 1})
        base = NilExpansion(bounds, {(m, 0): v for m, v in ell.items()})
        for _ in range(exp):
            power = power * base
        return power

    zero = (0,) * r
    out: Dict[Tuple[Monomial, int], Fraction] = {}
    ell_power: Dict[Monomial, Fraction] = {zero: Fraction(1)}
    k = 0
    while ell_power and (exp < 0 or k <= exp):
        coeff = _generalized_binomial(exp, k) * Fraction(c) ** (exp - k)
        if coeff:
            for mono, value in ell_power.items():
                key = (mono, exp - k)
                out[key] = out.get(key, 0) + coeff * value
        nxt: Dict[Monomial, Fraction] = {}
        for m1, v1 in ell_power.items():
            for m2, v2 in ell.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                if all(e < b for e, b in zip(mono, bounds)):
                    nxt[mono] = nxt.get(mono, 0) + v1 * v2
        ell_power = {m: v for m, v in nxt.items() if v}
        k += 1
    return NilExpansion(bounds, out)


def nilpotent_expand(expr: Union[RatExpr, FactoredRational, SparsePoly], bounds: Sequence[int]) -> NilExpansion:
    """Expand around ``y = 0`` with ``y_i ** bounds[i] = 0`` and ``z`` invertible, exactly."""
    bounds = tuple(int(b) for b in bounds)
    r = len(bounds)
    if isinstance(expr, FactoredRational):
        if expr.nvars is not None and expr.nvars != r + 1:
            raise ValueError(f"Expression has {expr.nvars - 1} Chern roots but {r} bounds were given")
        result = NilExpansion(bounds, {((0,) * r, 0): expr.scalar})
        for form, exp in expr.factors:
            result = result * _expand_form_power(form, exp, bounds)
        return result
    if isinstance(expr, SparsePoly):
        expr = RatExpr(expr, ())
    if expr.nvars != r + 1:
        raise ValueError(f"Expression has {expr.nvars - 1} Chern roots but {r} bounds were given")
    result = NilExpansion(bounds, {(mono[:-1], mono[-1]): c for mono, c in expr.numerator.terms.items()})
    for form, exp in expr.denominator:
        result = result * _expand_form_power(form, -exp, bounds)
    return result


def evaluate(expr, point: Sequence) -> Fraction:
    """Exact value of any expression type at a rational point ``(y_1, .., y_r, z)``."""
    if isinstance(expr, (SparsePoly, LinearForm, FactoredRational, RatExpr, NilExpansion)):
        return expr.evaluate(point)
    return to_rat(expr)
