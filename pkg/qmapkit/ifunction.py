"""Quasimap I-function coefficients, exactly.

The abelian coefficient of a lifted degree is a product over the weights of telescoped shifted Chern roots. The
nonabelian coefficient of a degree is the sum over its effective lifts of the abelian coefficient twisted by a factor
for every pair of opposite roots. Each twist introduces a pole along the root hyperplane; those poles cancel in the
full sum over a Weyl-stable set of lifts.
"""
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple, Union

from loguru import logger

from qmapkit.errors import MalformedDatum, NotEffective, PoleSurvived
from qmapkit.exact_arith import (
    FactoredRational,
    LinearForm,
    NilExpansion,
    RatExpr,
    SparsePoly,
    clear_and_sum,
    nilpotent_expand,
    normalize_linear_form,
    substitute_factored,
    substitute_ratexpr,
)
from qmapkit.fixed_locus import DegreeVec, GroupDegree, coset_representatives, enumerate_effective, is_effective
from qmapkit.fixed_locus import weyl_orbit_partition
from qmapkit.git_model import Matrix, Target, levi_roots, pairing, root_pairs, transpose


Character = Union[LinearForm, Sequence[int]]


class Cohomology(str, Enum):
    H0 = "H0"
    H1 = "H1"


def _character(alpha: Character) -> Tuple[int, ...]:
    if isinstance(alpha, LinearForm):
        if alpha.z_coefficient:
            raise MalformedDatum(f"{alpha} involves z, it is not the Chern root of a character")
        return alpha.coeffs[:-1]
    return tuple(int(v) for v in alpha)


def _shifted_product(xi: Tuple[int, ...], ks: range, exponent: int) -> FactoredRational:
    """``prod_{k in ks} (xi + k z) ** exponent`` in canonical form."""
    scalar = 1
    pairs = []
    for k in ks:
        form, scale = normalize_linear_form(xi + (k,))
        scalar *= scale**exponent
        pairs.append((form, exponent))
    return FactoredRational.build(scalar, pairs)


def _weight_factor(xi: Tuple[int, ...], m: int) -> FactoredRational:
    if m >= 0:
        return _shifted_product(xi, range(1, m + 1), -1)
    return _shifted_product(xi, range(m + 1, 1), 1)


def toric_coefficient(t: Target, beta_t: Sequence[int]) -> FactoredRational:
    """Abelian coefficient, one telescoped factor per weight.

    A weight pairing to ``m >= 0`` gives ``1 / prod_{k=1}^m (xi + kz)``, one pairing to ``m < 0`` gives
    ``prod_{k=m+1}^0 (xi + kz)``.
    """
    result = FactoredRational.one()
    for xi in t.weights:
        result = result * _weight_factor(xi, pairing(beta_t, xi))
    return result


def root_factor_literal(alpha: Character, m: int) -> FactoredRational:
    """The root factor as written, before pairing ``alpha`` with ``-alpha``."""
    a = _character(alpha)
    if m >= 0:
        return _shifted_product(a, range(1, m + 1), 1)
    return _shifted_product(a, range(m + 1, 1), -1)


def root_pair_factor(alpha: Character, m: int) -> FactoredRational:
    """``(-1)^m (alpha + m z) / alpha``, the product of the literal factors of ``alpha`` and ``-alpha``."""
    a = _character(alpha)
    if m == 0:
        return FactoredRational.one()
    sign = -1 if m % 2 else 1
    return sign * _shifted_product(a, range(m, m + 1), 1) / _shifted_product(a, range(0, 1), 1)


def euler_pushforward_factor(xi: Character, m: int, which: Union[Cohomology, str]) -> FactoredRational:
    """Moving part of the Euler class of ``H^0`` or ``H^1`` of ``O(m)`` twisted by the character ``xi``.

    The weight ``k = 0`` piece of ``H^0`` is fixed, so ``H^0`` contributes ``k = 1 .. m`` and ``H^1`` contributes
    ``k = m + 1 .. -1``.
    """
    x = _character(xi)
    which = Cohomology(which)
    if which == Cohomology.H0:
        return _shifted_product(x, range(1, m + 1), 1) if m >= 0 else FactoredRational.one()
    return _shifted_product(x, range(m + 1, 0), 1) if m <= -2 else FactoredRational.one()


def twist_factor(t: Target, beta_t: Sequence[int]) -> FactoredRational:
    result = FactoredRational.one()
    for alpha in root_pairs(t):
        result = result * root_pair_factor(alpha, pairing(beta_t, alpha))
    return result


def abelian_term(t: Target, beta_t: Sequence[int]) -> FactoredRational:
    """Contribution of one lifted degree to the nonabelian coefficient."""
    return twist_factor(t, beta_t) * toric_coefficient(t, beta_t)


@dataclass(frozen=True)
class IFunCoefficient:
    beta: GroupDegree
    terms: Tuple[Tuple[DegreeVec, FactoredRational], ...]
    expr: RatExpr

    @property
    def factored(self) -> Optional[FactoredRational]:
        return self.expr.as_factored()

    def __str__(self):
        return f"IFunCoefficient(beta={list(self.beta)}, terms={len(self.terms)}, expr={self.expr.to_text()})"


def coefficient_from_terms(t: Target, beta: Sequence[int], lifts: Sequence[Sequence[int]]) -> IFunCoefficient:
    """Sum the abelian terms of the given lifts without checking that the poles cancel."""
    terms = tuple((tuple(b), abelian_term(t, b)) for b in lifts)
    if terms:
        expr = clear_and_sum([term for _, term in terms], nvars=t.nvars)
    else:
        expr = RatExpr(SparsePoly.zero(t.nvars))
    return IFunCoefficient(beta=tuple(beta), terms=terms, expr=expr)


def nonabelian_coefficient(t: Target, beta: Sequence[int], bound: Optional[int] = None) -> IFunCoefficient:
    lifts = enumerate_effective(t, beta, bound)
    coefficient = coefficient_from_terms(t, beta, lifts)
    poles = coefficient.expr.pure_y_poles()
    if poles:
        raise PoleSurvived(
            f"{t.name}: the coefficient of {list(beta)} keeps the poles {', '.join(str(f) for f in poles)}"
        )
    logger.debug(f"{t.name}: coefficient of {list(beta)} from {len(lifts)} lifts")
    return coefficient


def act_on_factored(f: FactoredRational, g: Matrix) -> FactoredRational:
    """Weyl element ``g`` (acting on characters) applied to a factored term."""
    return substitute_factored(f, transpose(g))


def orbit_sum_coefficient(t: Target, beta: Sequence[int], bound: Optional[int] = None) -> RatExpr:
    """The nonabelian coefficient summed orbit by orbit: each representative term moved by coset representatives."""
    lifts = enumerate_effective(t, beta, bound)
    if not lifts:
        return RatExpr(SparsePoly.zero(t.nvars))
    terms = []
    for orbit in weyl_orbit_partition(t, lifts):
        base = abelian_term(t, orbit.representative)
        for g in coset_representatives(t, orbit.representative):
            terms.append(act_on_factored(base, g))
    return clear_and_sum(terms, nvars=t.nvars)


@dataclass
class IFunctionSeries:
    target: str
    degree_bound: int
    coefficients: Dict[GroupDegree, IFunCoefficient] = field(default_factory=dict)

    def __str__(self):
        return f"IFunctionSeries(target={self.target}, bound={self.degree_bound}, size={len(self.coefficients)})"


def group_degrees(m: int, max_total_degree: int) -> List[GroupDegree]:
    """Nonzero integer ``m``-vectors with ``sum |beta_i| <= max_total_degree``, by total degree then value."""
    degrees = [
        beta
        for beta in product(range(-max_total_degree, max_total_degree + 1), repeat=m)
        if 0 < sum(abs(v) for v in beta) <= max_total_degree
    ]
    return sorted(degrees, key=lambda beta: (sum(abs(v) for v in beta), beta))


def assemble_series(t: Target, max_total_degree: int, bound: Optional[int] = None) -> IFunctionSeries:
    if max_total_degree < 1:
        raise MalformedDatum(f"The degree bound must be at least 1, got {max_total_degree}")
    if t.preset == "custom":
        logger.warning(f"{t.name}: fixed components are assumed smooth with unobstructed deformations")
    series = IFunctionSeries(target=t.name, degree_bound=max_total_degree)
    for beta in group_degrees(t.m, max_total_degree):
        if not enumerate_effective(t, beta, bound):
            continue
        series.coefficients[beta] = nonabelian_coefficient(t, beta, bound)
    logger.info(f"{t.name}: {len(series.coefficients)} coefficients up to degree {max_total_degree}")
    return series


def verify_proof_identities(t: Target, beta_t: Sequence[int]) -> bool:
    """Check that the localization Euler classes reproduce the abelian coefficient and the root twist."""
    beta_t = tuple(beta_t)
    if not is_effective(t, beta_t):
        raise NotEffective(f"{list(beta_t)} is not an effective lifted degree of {t.name}")

    b_side = FactoredRational.one()
    for xi in t.weights:
        m = pairing(beta_t, xi)
        if m < 0:
            b_side = b_side * FactoredRational.from_raw(xi + (0,))
        b_side = b_side * euler_pushforward_factor(xi, m, Cohomology.H1)
        b_side = b_side / euler_pushforward_factor(xi, m, Cohomology.H0)
    if b_side != toric_coefficient(t, beta_t):
        logger.debug(f"{t.name}: weight identity fails at {list(beta_t)}")
        return False

    _, positive = levi_roots(t, beta_t)
    a_side = FactoredRational.one()
    for alpha in t.roots:
        m = pairing(beta_t, alpha)
        a_side = a_side * euler_pushforward_factor(alpha, m, Cohomology.H0)
        a_side = a_side / euler_pushforward_factor(alpha, m, Cohomology.H1)
    for alpha in positive:
        a_side = a_side / FactoredRational.from_raw(tuple(-v for v in alpha) + (0,))
    if a_side != twist_factor(t, beta_t):
        logger.debug(f"{t.name}: root identity fails at {list(beta_t)}")
        return False
    return True


def check_weyl_invariance(t: Target, c: IFunCoefficient) -> bool:
    return all(substitute_ratexpr(c.expr, transpose(g)) == c.expr for g in t.weyl_gens)


def reduce_in_cohomology(c: IFunCoefficient, n: int) -> NilExpansion:
    """Expand a coefficient of P^n in ``z`` using ``H^(n+1) = 0``."""
    if c.expr.nvars != 2:
        raise MalformedDatum("Cohomology reduction needs a single Chern root")
    return nilpotent_expand(c.expr, (n + 1,))


def series_reduced_in_cohomology(series: IFunctionSeries, n: int) -> Dict[GroupDegree, NilExpansion]:
    out = {(0,): NilExpansion((n + 1,), {((0,), 0): 1})}
    for beta, c in series.coefficients.items():
        out[beta] = reduce_in_cohomology(c, n)
    return out
