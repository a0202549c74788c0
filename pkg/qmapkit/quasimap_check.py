"""Explicit quasimaps from P^1 to P^n and Gr(k, n) given by matrices of binary forms.

A quasimap to P^n is the case ``k = 1`` with ``n + 1`` columns. Basepoints are the common zeros of the maximal
minors (the entries themselves when ``k = 1``) and the length at a point is the minimal order of vanishing there,
read off from the multiplicities of the gcd.
"""
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple, Union

import sympy
from loguru import logger

from qmapkit.binary_forms import (
    BinaryForm,
    are_coprime,
    binary_gcd,
    exact_quotient,
    is_irreducible,
    multiplicity_decomposition,
)
from qmapkit.errors import AllZero, MalformedDatum, NotPrestable
from qmapkit.exact_arith import format_rat, to_rat


PROJECTIVE = "projective"
GRASSMANNIAN = "grassmannian"

Mark = Union[BinaryForm, Tuple[object, object]]


def make_mark(mark: Mark) -> BinaryForm:
    """A mark is a point ``(a, b)`` of P^1 over Q or an irreducible binary form."""
    if isinstance(mark, BinaryForm):
        if not is_irreducible(mark):
            raise MalformedDatum(f"Mark {mark} is not an irreducible binary form")
        return mark.monic()
    a, b = mark
    return BinaryForm.point(a, b)


@dataclass(frozen=True)
class PolyQuasimap:
    kind: str
    n: int
    row_degrees: Tuple[int, ...]
    entries: Tuple[Tuple[BinaryForm, ...], ...]
    marks: Tuple[BinaryForm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "row_degrees", tuple(int(d) for d in self.row_degrees))
        object.__setattr__(self, "entries", tuple(tuple(row) for row in self.entries))
        object.__setattr__(self, "marks", tuple(make_mark(m) for m in self.marks))
        if self.kind not in (PROJECTIVE, GRASSMANNIAN):
            raise MalformedDatum(f"Unknown target kind {self.kind!r}")
        if self.kind == PROJECTIVE and len(self.row_degrees) != 1:
            raise MalformedDatum("A quasimap to P^n has a single row degree")
        if len(self.entries) != self.k:
            raise MalformedDatum(f"Expected {self.k} rows of entries, got {len(self.entries)}")
        if self.kind == GRASSMANNIAN and not 1 <= self.k <= self.n:
            raise MalformedDatum(f"Gr(k, n) needs 1 <= k <= n, got k={self.k}, n={self.n}")
        for i, (row, d) in enumerate(zip(self.entries, self.row_degrees)):
            if d < 0:
                raise MalformedDatum(f"Row degree {d} is negative")
            if len(row) != self.columns:
                raise MalformedDatum(f"Row {i + 1} has {len(row)} entries, expected {self.columns}")
            for form in row:
                if form.degree != d:
                    raise MalformedDatum(f"Entry {form} in row {i + 1} does not have degree {d}")
        for a, b in combinations(self.marks, 2):
            if not are_coprime(a, b):
                raise MalformedDatum(f"Marks {a} and {b} are not distinct")

    @property
    def k(self) -> int:
        return len(self.row_degrees)

    @property
    def columns(self) -> int:
        return self.n + 1 if self.kind == PROJECTIVE else self.n

    def __str__(self):
        target = f"P{self.n}" if self.kind == PROJECTIVE else f"Gr({self.k},{self.n})"
        rows = "; ".join(", ".join(f.to_text() for f in row) for row in self.entries)
        return f"PolyQuasimap({target}, degrees={list(self.row_degrees)}, entries=[{rows}])"


@dataclass(frozen=True)
class BasepointDivisor:
    points: Tuple[Tuple[BinaryForm, int], ...] = ()

    @property
    def total_length(self) -> int:
        return sum(form.degree * length for form, length in self.points)

    @property
    def max_length(self) -> int:
        return max((length for _, length in self.points), default=0)

    def to_text(self) -> str:
        if not self.points:
            return "none"
        return ", ".join(f"({form.to_text()}, {length})" for form, length in self.points)

    def __str__(self):
        return self.to_text()


@dataclass(frozen=True)
class ComponentData:
    genus: int
    special_points: int
    line_degree: int


@dataclass(frozen=True)
class EpsilonInterval:
    lower: Fraction = Fraction(0)
    lower_strict: bool = True
    upper: Optional[Fraction] = None
    upper_strict: bool = True
    empty: bool = False

    @classmethod
    def never(cls) -> "EpsilonInterval":
        return cls(empty=True)

    def contains(self, eps) -> bool:
        eps = to_rat(eps)
        if self.empty or eps <= 0:
            return False
        if eps < self.lower or (self.lower_strict and eps == self.lower):
            return False
        if self.upper is not None and (eps > self.upper or (self.upper_strict and eps == self.upper)):
            return False
        return True

    def intersect(self, other: "EpsilonInterval") -> "EpsilonInterval":
        if self.empty or other.empty:
            return EpsilonInterval.never()
        if self.lower == other.lower:
            lower, lower_strict = self.lower, self.lower_strict or other.lower_strict
        else:
            lower, lower_strict = max((self.lower, self.lower_strict), (other.lower, other.lower_strict))
        bounds = ((self.upper, self.upper_strict), (other.upper, other.upper_strict))
        uppers = [(u, s) for u, s in bounds if u is not None]
        if not uppers:
            upper, upper_strict = None, True
        else:
            upper = min(u for u, _ in uppers)
            upper_strict = any(s for u, s in uppers if u == upper)
        if upper is not None and (lower > upper or (lower == upper and (lower_strict or upper_strict))):
            return EpsilonInterval.never()
        return EpsilonInterval(lower, lower_strict, upper, upper_strict)

    def to_text(self) -> str:
        if self.empty:
            return "never stable"
        left = "(" if self.lower_strict else "["
        if self.upper is None:
            return f"{left}{format_rat(self.lower)}, ∞)"
        right = ")" if self.upper_strict else "]"
        return f"{left}{format_rat(self.lower)}, {format_rat(self.upper)}{right}"

    def __str__(self):
        return self.to_text()


def quasimap_degree(q: PolyQuasimap) -> int:
    return sum(q.row_degrees)


def maximal_minors(q: PolyQuasimap) -> List[BinaryForm]:
    """The ``k x k`` minors of the entry matrix in lexicographic column order; the entries when ``k = 1``."""
    if q.k == 1:
        return list(q.entries[0])
    degree = quasimap_degree(q)
    matrix = [[form.to_sympy() for form in row] for row in q.entries]
    minors = []
    for cols in combinations(range(q.columns), q.k):
        det = sympy.Matrix([[row[c] for c in cols] for row in matrix]).det()
        minors.append(BinaryForm.from_sympy(sympy.expand(det), degree))
    return minors


def basepoint_divisor(q: PolyQuasimap) -> BasepointDivisor:
    try:
        g = binary_gcd(maximal_minors(q))
    except AllZero as e:
        raise NotPrestable(f"{q} lands in the unstable locus everywhere") from e
    if g.degree == 0:
        return BasepointDivisor()
    points = tuple(multiplicity_decomposition(g))
    for mark in q.marks:
        if not are_coprime(mark, g):
            raise NotPrestable(f"Mark {mark} is a basepoint of {q}")
    logger.debug(f"basepoints of {q}: {points}")
    return BasepointDivisor(points)


def is_prestable(q: PolyQuasimap) -> bool:
    try:
        basepoint_divisor(q)
    except NotPrestable:
        return False
    return True


def is_constant_map(q: PolyQuasimap) -> bool:
    """True iff the map induced after removing basepoints is constant."""
    basepoint_divisor(q)
    minors = maximal_minors(q)
    g = binary_gcd(minors)
    reduced = [exact_quotient(m, g).coefficients for m in minors]
    for u, v in combinations(reduced, 2):
        for i, j in combinations(range(len(u)), 2):
            if u[i] * v[j] - u[j] * v[i]:
                return False
    return True


def induced_map_degree(q: PolyQuasimap) -> int:
    """Degree of the honest map obtained by dividing out the basepoints."""
    return quasimap_degree(q) - basepoint_divisor(q).total_length


def component_stable(c: ComponentData, eps) -> bool:
    eps = to_rat(eps)
    if eps <= 0:
        raise MalformedDatum(f"epsilon must be positive, got {format_rat(eps)}")
    return 2 * c.genus - 2 + c.special_points + eps * c.line_degree > 0


def component_stability_range(c: ComponentData) -> EpsilonInterval:
    """All epsilon > 0 for which the positivity condition holds on one component."""
    a = 2 * c.genus - 2 + c.special_points
    d = c.line_degree
    if d > 0:
        return EpsilonInterval(lower=max(Fraction(0), Fraction(-a, d)), lower_strict=True)
    if d == 0:
        return EpsilonInterval() if a > 0 else EpsilonInterval.never()
    if a <= 0:
        return EpsilonInterval.never()
    return EpsilonInterval(upper=Fraction(a, -d), upper_strict=True)


def epsilon_stability_range(q: PolyQuasimap) -> EpsilonInterval:
    """Epsilon range on which ``q``, with its marks on an irreducible P^1, is stable."""
    divisor = basepoint_divisor(q)
    component = ComponentData(genus=0, special_points=len(q.marks), line_degree=quasimap_degree(q))
    interval = component_stability_range(component)
    if divisor.max_length:
        interval = interval.intersect(
            EpsilonInterval(upper=Fraction(1, divisor.max_length), upper_strict=False)
        )
    return interval


def apply_isomorphism(q: PolyQuasimap, a) -> PolyQuasimap:
    """Act by a bundle automorphism: a nonzero scalar for P^n, a ``k x k`` matrix of binary forms for Gr(k, n).

    Entry ``a[l][i]`` has degree ``d_l - d_i`` and is ``None`` (or zero) when that is negative.
    """
    if q.kind == PROJECTIVE:
        scalar = to_rat(a)
        if scalar == 0:
            raise MalformedDatum("Scaling by zero is not an isomorphism")
        return PolyQuasimap(q.kind, q.n, q.row_degrees, (tuple(f.scale(scalar) for f in q.entries[0]),), q.marks)
    if len(a) != q.k or any(len(row) != q.k for row in a):
        raise MalformedDatum(f"Expected a {q.k} x {q.k} matrix of binary forms")
    d = q.row_degrees
    matrix = []
    for l, row in enumerate(a):
        exprs = []
        for i, form in enumerate(row):
            expected = d[l] - d[i]
            if form is None or form.is_zero:
                exprs.append(sympy.Integer(0))
                continue
            if form.degree != expected:
                raise MalformedDatum(f"Automorphism entry ({l + 1}, {i + 1}) must have degree {expected}")
            exprs.append(form.to_sympy())
        matrix.append(exprs)
    det = sympy.expand(sympy.Matrix(matrix).det())
    if det == 0 or not det.is_number:
        raise MalformedDatum(f"Automorphism has determinant {det}, which is not a nonzero constant")
    rows = []
    for l in range(q.k):
        row = []
        for j in range(q.columns):
            expr = sum((matrix[l][i] * q.entries[i][j].to_sympy() for i in range(q.k)), sympy.Integer(0))
            row.append(BinaryForm.from_sympy(sympy.expand(expr), d[l]))
        rows.append(tuple(row))
    return PolyQuasimap(q.kind, q.n, q.row_degrees, tuple(rows), q.marks)


def reparametrize(q: PolyQuasimap, m: Sequence[Sequence]) -> PolyQuasimap:
    """Precompose entries and marks with ``[x:y] -> [a x + b y : c x + d y]``."""
    entries = tuple(tuple(f.compose(m) for f in row) for row in q.entries)
    marks = tuple(mark.compose(m).monic() for mark in q.marks)
    return PolyQuasimap(q.kind, q.n, q.row_degrees, entries, marks)


def graph_space_coordinates(q: PolyQuasimap) -> Tuple[Fraction, ...]:
    """The point of the graph space of P^n, a projective space, given by all coefficients of ``q``."""
    if q.kind != PROJECTIVE:
        raise MalformedDatum("Graph space coordinates are only defined for quasimaps to P^n")
    coords = [c for f in q.entries[0] for c in f.coefficients]
    lead = next((c for c in coords if c), None)
    if lead is None:
        raise NotPrestable(f"{q} has no nonzero coefficient")
    return tuple(c / lead for c in coords)


def is_fixed_by_rotation(q: PolyQuasimap) -> bool:
    """True iff row ``i`` only uses the monomial ``x^{d_i}``, so every basepoint sits at ``[0:1]``."""
    return all(not any(f.coefficients[1:]) for row in q.entries for f in row)
