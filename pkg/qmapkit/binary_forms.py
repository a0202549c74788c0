"""Homogeneous binary forms over Q: gcds, factorizations and parsing.

Forms are stored as coefficient vectors for ``x^d, x^(d-1) y, ..., y^d``; the heavy lifting is done by sympy.
"""
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import sympy

from qmapkit.errors import AllZero, MalformedDatum, SingularMatrix
from qmapkit.exact_arith import format_rat, to_rat


X, Y = sympy.symbols("x y")

_TERM = re.compile(
    r"""^(?P<coeff>\d+(?:/\d+)?)?(?:(?<=\d)\*(?=[xy]))?
        (?:x(?:\^(?P<xe>\d+))?(?P<xpresent>))?(?:(?<=[\dx])\*(?=y))?
        (?:y(?:\^(?P<ye>\d+))?(?P<ypresent>))?$""",
    re.VERBOSE,
)


@dataclass(frozen=True)
class BinaryForm:
    degree: int
    coefficients: Tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = tuple(to_rat(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if self.degree < 0:
            raise MalformedDatum(f"Binary form degree must be nonnegative, got {self.degree}")
        if len(coeffs) != self.degree + 1:
            raise MalformedDatum(
                f"A degree {self.degree} form needs {self.degree + 1} coefficients, got {len(coeffs)}"
            )

    @classmethod
    def zero(cls, degree: int) -> "BinaryForm":
        return cls(degree, (Fraction(0),) * (degree + 1))

    @classmethod
    def point(cls, a, b) -> "BinaryForm":
        """The linear form ``b x - a y`` vanishing at ``[a:b]``, made monic."""
        a, b = to_rat(a), to_rat(b)
        if a == 0 and b == 0:
            raise MalformedDatum("[0:0] is not a point of P^1")
        return cls(1, (b, -a)).monic()

    @classmethod
    def from_sympy(cls, expr, degree: Optional[int] = None) -> "BinaryForm":
        poly = sympy.Poly(expr, X, Y, domain="QQ")
        if poly.is_zero:
            if degree is None:
                raise MalformedDatum("The degree of a zero form must be given")
            return cls.zero(degree)
        if not poly.is_homogeneous:
            raise MalformedDatum(f"{expr} is not homogeneous in x, y")
        total = poly.total_degree()
        if degree is not None and degree != total:
            raise MalformedDatum(f"{expr} has degree {total}, expected {degree}")
        coeffs = [Fraction(0)] * (total + 1)
        for (ex, ey), c in poly.terms():
            coeffs[ey] = Fraction(int(c.p), int(c.q))
        return cls(total, tuple(coeffs))

    @classmethod
    def parse(cls, text: str, degree: Optional[int] = None) -> "BinaryForm":
        """Parse strings such as ``"3x^2y - 1/2 y^3"`` or ``"0"``."""
        cleaned = text.replace(" ", "")
        if not cleaned:
            raise MalformedDatum("Empty binary form")
        chunks = re.findall(r"[+-]?[^+-]+", cleaned)
        if "".join(chunks) != cleaned:
            raise MalformedDatum(f"Cannot parse binary form {text!r}")
        expr = sympy.Integer(0)
        for chunk in chunks:
            sign = -1 if chunk.startswith("-") else 1
            body = chunk.lstrip("+-")
            m = _TERM.match(body)
            if not m or not body:
                raise MalformedDatum(f"Cannot parse term {chunk!r} of {text!r}")
            coeff = sympy.Rational(m.group("coeff")) if m.group("coeff") else sympy.Integer(1)
            xe = int(m.group("xe") or 1) if m.group("xpresent") is not None else 0
            ye = int(m.group("ye") or 1) if m.group("ypresent") is not None else 0
            expr += sign * coeff * X**xe * Y**ye
        return cls.from_sympy(expr, degree)

    def to_sympy(self):
        d = self.degree
        terms = [
            sympy.Rational(c.numerator, c.denominator) * X ** (d - i) * Y**i for i, c in enumerate(self.coefficients)
        ]
        return sum(terms, sympy.Integer(0))

    def poly(self) -> sympy.Poly:
        return sympy.Poly(self.to_sympy(), X, Y, domain="QQ")

    @property
    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def monic(self) -> "BinaryForm":
        lead = next((c for c in self.coefficients if c), None)
        if lead is None:
            return self
        return BinaryForm(self.degree, tuple(c / lead for c in self.coefficients))

    def scale(self, value) -> "BinaryForm":
        value = to_rat(value)
        return BinaryForm(self.degree, tuple(c * value for c in self.coefficients))

    def evaluate(self, a, b) -> Fraction:
        a, b = to_rat(a), to_rat(b)
        d = self.degree
        return sum((c * a ** (d - i) * b**i for i, c in enumerate(self.coefficients)), Fraction(0))

    def compose(self, matrix: Sequence[Sequence]) -> "BinaryForm":
        """Precompose with ``[x:y] -> [a x + b y : c x + d y]``."""
        (a, b), (c, d) = [[sympy.Rational(str(to_rat(v))) for v in row] for row in matrix]
        if a * d - b * c == 0:
            raise SingularMatrix(f"Coordinate change {matrix} is not invertible")
        expr = self.to_sympy().subs({X: a * X + b * Y, Y: c * X + d * Y}, simultaneous=True)
        return BinaryForm.from_sympy(sympy.expand(expr), self.degree)

    def to_text(self) -> str:
        if self.is_zero:
            return "0"
        d = self.degree
        chunks = []
        for i, c in enumerate(self.coefficients):
            if not c:
                continue
            mono = "".join(
                part
                for part in (
                    "x" if d - i == 1 else (f"x^{d - i}" if d - i else ""),
                    "y" if i == 1 else (f"y^{i}" if i else ""),
                )
            )
            mag = abs(c)
            body = mono if mag == 1 and mono else (f"{format_rat(mag)}{mono}" if mono else format_rat(mag))
            chunks.append(("-" if c < 0 else "+", body))
        out = ("-" if chunks[0][0] == "-" else "") + chunks[0][1]
        for sign, body in chunks[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.to_text()


def _sort_key(form: BinaryForm):
    return (form.degree, sum(1 for c in form.coefficients if c), tuple(-c for c in form.coefficients))


def binary_gcd(forms: Sequence[BinaryForm]) -> BinaryForm:
    """Monic gcd of the nonzero forms; its order at each point is the minimum order of the inputs there."""
    nonzero = [f for f in forms if not f.is_zero]
    if not nonzero:
        raise AllZero("Every form is zero, so the quasimap is not prestable")
    g = nonzero[0].poly()
    for f in nonzero[1:]:
        g = sympy.gcd(g, f.poly())
    return BinaryForm.from_sympy(g.as_expr()).monic()


def multiplicity_decomposition(form: BinaryForm) -> List[Tuple[BinaryForm, int]]:
    """Irreducible factors over Q with multiplicities, monic and in a fixed order."""
    if form.is_zero:
        raise AllZero("Cannot decompose the zero form")
    _, factors = sympy.factor_list(form.to_sympy(), X, Y, domain="QQ")
    out = [(BinaryForm.from_sympy(f).monic(), int(m)) for f, m in factors]
    return sorted(out, key=lambda item: _sort_key(item[0]))


def is_irreducible(form: BinaryForm) -> bool:
    if form.is_zero or form.degree == 0:
        return False
    factors = multiplicity_decomposition(form)
    return len(factors) == 1 and factors[0][1] == 1


def are_coprime(a: BinaryForm, b: BinaryForm) -> bool:
    return binary_gcd([a, b]).degree == 0


def exact_quotient(p: BinaryForm, g: BinaryForm) -> BinaryForm:
    if p.is_zero:
        return BinaryForm.zero(p.degree - g.degree)
    q, r = sympy.div(p.poly(), g.poly())
    if not r.is_zero:
        raise MalformedDatum(f"{g} does not divide {p}")
    return BinaryForm.from_sympy(q.as_expr(), p.degree - g.degree)
