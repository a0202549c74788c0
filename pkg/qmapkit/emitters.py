"""Text, JSON and LaTeX renderings of results.

Everything emitted is built from canonical forms only, so two runs on the same input print the same bytes.
"""
from typing import Dict, List, Mapping, Optional, Sequence, Union

import sympy

from qmapkit.errors import MalformedDatum
from qmapkit.exact_arith import FactoredRational, LinearForm, NilExpansion, RatExpr, SparsePoly, format_rat, to_rat
from qmapkit.fixed_locus import FixedComponent, WeylOrbit
from qmapkit.git_model import AssumptionReport, Target
from qmapkit.ifunction import IFunCoefficient, IFunctionSeries
from qmapkit.quasimap_check import BasepointDivisor, EpsilonInterval
from qmapkit.schemas import (
    CoefficientJSON,
    FactoredJSON,
    FactorJSON,
    FixedLociJSON,
    FixedLocusRowJSON,
    LiftJSON,
    QuasimapJSON,
    RatExprJSON,
    SeriesJSON,
    StabilityJSON,
    TermJSON,
)


CONVENTIONS = {
    "monomial_order": "graded lexicographic with y1 < ... < yr < z",
    "linear_forms": "primitive integer coefficients of y1 .. yr, z with positive leading coefficient",
    "euler_h0": "weights k = 1 .. m for m >= 0, the k = 0 weight is fixed",
    "euler_h1": "weights k = m + 1 .. -1 for m <= -2",
    "root_pairs": "one factor (-1)^m (a + m z) / a per pair of opposite roots",
    "virtual_class": "fixed components are smooth and unobstructed",
}


def support_text(support) -> str:
    return "{" + ",".join(str(j + 1) for j in sorted(support)) + "}"


def _one_based(support) -> List[int]:
    return [j + 1 for j in sorted(support)]


def factored_to_json(f: FactoredRational) -> FactoredJSON:
    return FactoredJSON(
        scalar=format_rat(f.scalar),
        factors=[FactorJSON(form=list(form.coeffs), exponent=e) for form, e in f.factors],
    )


def factored_from_json(data: Union[FactoredJSON, Mapping]) -> FactoredRational:
    model = data if isinstance(data, FactoredJSON) else FactoredJSON.model_validate(data)
    factors = [(LinearForm(tuple(f.form)), f.exponent) for f in model.factors]
    return FactoredRational.build(to_rat(model.scalar), factors)


def ratexpr_to_json(expr: RatExpr) -> RatExprJSON:
    return RatExprJSON(
        nvars=expr.nvars,
        numerator=[TermJSON(monomial=list(m), coefficient=format_rat(c)) for m, c in expr.numerator.sorted_terms()],
        denominator=[FactorJSON(form=list(form.coeffs), exponent=e) for form, e in expr.denominator],
    )


def ratexpr_from_json(data: Union[RatExprJSON, Mapping]) -> RatExpr:
    model = data if isinstance(data, RatExprJSON) else RatExprJSON.model_validate(data)
    numerator = SparsePoly(model.nvars, {tuple(t.monomial): to_rat(t.coefficient) for t in model.numerator})
    denominator = tuple(sorted((LinearForm(tuple(f.form)), f.exponent) for f in model.denominator))
    if any(e <= 0 for _, e in denominator):
        raise MalformedDatum("Denominator exponents must be positive")
    return RatExpr(numerator, denominator)


def coefficient_text(c: IFunCoefficient) -> str:
    factored = c.factored
    return factored.to_text() if factored is not None else c.expr.to_text()


def coefficient_pretty(c: IFunCoefficient, names: Sequence[str]) -> str:
    factored = c.factored
    if factored is not None:
        return factored.pretty(names)
    num = c.expr.numerator.to_text(names)
    if not c.expr.denominator:
        return num
    den = " * ".join(f"({form.pretty(names)})^{e}" for form, e in c.expr.denominator)
    return f"({num}) / ({den})"


def _sympy_poly(p: SparsePoly, symbols) -> sympy.Expr:
    return sympy.Add(
        *(
            sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*(s**e for s, e in zip(symbols, m)))
            for m, c in p.sorted_terms()
        )
    )


def _latex_form(form: LinearForm, symbols) -> str:
    return sympy.latex(_sympy_poly(form.to_poly(), symbols))


def _latex_power(form: LinearForm, exp: int, symbols) -> str:
    body = f"\\left({_latex_form(form, symbols)}\\right)"
    return body if exp == 1 else f"{body}^{{{exp}}}"


def ratexpr_to_latex(expr: RatExpr, names: Sequence[str]) -> str:
    symbols = sympy.symbols(list(names))
    num = sympy.latex(_sympy_poly(expr.numerator, symbols))
    if not expr.denominator:
        return num
    den = " ".join(_latex_power(form, e, symbols) for form, e in expr.denominator)
    return f"\\frac{{{num}}}{{{den}}}"


def factored_to_latex(f: FactoredRational, names: Sequence[str]) -> str:
    symbols = sympy.symbols(list(names))
    num = " ".join(_latex_power(form, e, symbols) for form, e in f.numerator_factors())
    den = " ".join(_latex_power(form, e, symbols) for form, e in f.denominator_factors())
    scalar = sympy.latex(sympy.Rational(f.scalar.numerator, f.scalar.denominator))
    if not num:
        num = scalar
    elif f.scalar == -1:
        num = f"-{num}"
    elif f.scalar != 1:
        num = f"{scalar} {num}"
    return f"\\frac{{{num}}}{{{den}}}" if den else num


def coefficient_latex(c: IFunCoefficient, names: Sequence[str]) -> str:
    factored = c.factored
    return factored_to_latex(factored, names) if factored is not None else ratexpr_to_latex(c.expr, names)


def series_text(
    series: IFunctionSeries,
    t: Target,
    checks: Optional[Mapping[tuple, Dict[str, bool]]] = None,
    reduced: Optional[Mapping[tuple, NilExpansion]] = None,
) -> str:
    names = t.variable_names
    lines = [f"I-function of {t.name} up to degree {series.degree_bound}", f"variables: {', '.join(names)}"]
    lines.append("beta=0: 1")
    for beta, c in series.coefficients.items():
        lines.append(f"beta={list(beta)}: {coefficient_text(c)}")
        lines.append(f"  = {coefficient_pretty(c, names)}")
        if checks is not None and beta in checks:
            lines.append("  checks: " + ", ".join(f"{k}={'pass' if v else 'FAIL'}" for k, v in checks[beta].items()))
    if reduced is not None:
        lines.append(f"reduced with {names[0]}^{t.preset_params[0] + 1} = 0:")
        for beta, nil in reduced.items():
            lines.append(f"beta={list(beta)}: {nil.to_text(names)}")
    return "\n".join(lines)


def series_latex(series: IFunctionSeries, t: Target) -> str:
    names = t.variable_names
    lines = ["1"]
    for beta, c in series.coefficients.items():
        q = " ".join(f"q_{{{i + 1}}}^{{{b}}}" for i, b in enumerate(beta)) if len(beta) > 1 else f"q^{{{beta[0]}}}"
        lines.append(f"+ {q} {coefficient_latex(c, names)}")
    return "\n".join(lines)


def series_json(
    series: IFunctionSeries,
    t: Target,
    checks: Optional[Mapping[tuple, Dict[str, bool]]] = None,
    reduced: Optional[Mapping[tuple, NilExpansion]] = None,
) -> str:
    names = t.variable_names
    coefficients = [
        CoefficientJSON(
            beta=list(beta),
            terms=[LiftJSON(beta_t=list(b), term=factored_to_json(f)) for b, f in c.terms],
            reduced=ratexpr_to_json(c.expr),
            text=coefficient_text(c),
            checks=None if checks is None else dict(checks.get(beta, {})),
        )
        for beta, c in series.coefficients.items()
    ]
    model = SeriesJSON(
        target=t.name,
        variables=list(names),
        degree_bound=series.degree_bound,
        conventions=CONVENTIONS,
        coefficients=coefficients,
        reduced_in_cohomology=None
        if reduced is None
        else {",".join(str(v) for v in beta): nil.to_text(names) for beta, nil in reduced.items()},
    )
    return model.model_dump_json(indent=2)


def stability_model(t: Target, supports=None, report: Optional[AssumptionReport] = None) -> StabilityJSON:
    model = StabilityJSON(target=t.name)
    if supports is not None:
        model.maximal_unstable_supports = [_one_based(s) for s in supports]
    if report is not None:
        model.ss_equals_s = report.ss_equals_s
        model.semistable_nonempty = report.semistable_nonempty
        model.action_free_on_stable = report.action_free_on_stable
        model.nonabelian_free_certified = report.nonabelian_free_certified
        model.witnesses = [_one_based(s) for s in report.witnesses]
    return model


def stability_text(t: Target, supports=None, report: Optional[AssumptionReport] = None) -> str:
    lines = [f"target: {t.name}"]
    if supports is not None:
        lines.append("maximal unstable supports: " + (", ".join(support_text(s) for s in supports) or "none"))
    if report is not None:
        lines.append(f"ss = s: {report.ss_equals_s}")
        lines.append(f"semistable locus nonempty: {report.semistable_nonempty}")
        lines.append(f"torus acts freely on stable locus: {report.action_free_on_stable}")
        certified = "unknown" if report.nonabelian_free_certified is None else report.nonabelian_free_certified
        lines.append(f"nonabelian freeness certified: {certified}")
        if report.witnesses:
            lines.append("witnesses: " + ", ".join(support_text(s) for s in report.witnesses))
    return "\n".join(lines)


def quasimap_model(degree: int, divisor: BasepointDivisor, constant: bool, interval: EpsilonInterval) -> QuasimapJSON:
    return QuasimapJSON(
        degree=degree,
        basepoints=[{"form": form.to_text(), "length": length} for form, length in divisor.points],
        constant=constant,
        epsilon_interval=interval.to_text(),
    )


def quasimap_text(degree: int, divisor: BasepointDivisor, constant: bool, interval: EpsilonInterval) -> str:
    return "\n".join(
        [
            f"degree: {degree}",
            f"basepoints: {divisor.to_text()}",
            f"constant: {constant}",
            f"epsilon-stable for: {interval.to_text()}",
        ]
    )


def _orbit_lookup(orbits: Sequence[WeylOrbit]) -> Dict[tuple, WeylOrbit]:
    return {member: orbit for orbit in orbits for member in orbit.members}


def fixed_loci_model(
    t: Target, beta: Sequence[int], components: Sequence[FixedComponent], orbits: Sequence[WeylOrbit]
) -> FixedLociJSON:
    lookup = _orbit_lookup(orbits)
    rows = []
    for c in components:
        orbit = lookup[c.beta_t]
        rows.append(
            FixedLocusRowJSON(
                beta_t=list(c.beta_t),
                dim_V=c.dim_V,
                dim_P=c.dim_P,
                dim_F=c.dim_F,
                orbit=list(orbit.representative),
                orbit_size=orbit.size,
                stabilizer=orbit.stabilizer,
            )
        )
    return FixedLociJSON(target=t.name, beta=list(beta), rows=rows)


def fixed_loci_text(
    t: Target, beta: Sequence[int], components: Sequence[FixedComponent], orbits: Sequence[WeylOrbit]
) -> str:
    lookup = _orbit_lookup(orbits)
    lines = [f"fixed components of {t.name} in degree {list(beta)}", "beta_t\tdim_V\tdim_P\tdim_F\torbit\tsize\tstab"]
    for c in components:
        orbit = lookup[c.beta_t]
        lines.append(
            f"{list(c.beta_t)}\t{c.dim_V}\t{c.dim_P}\t{c.dim_F}\t{list(orbit.representative)}\t{orbit.size}\t"
            f"{orbit.stabilizer}"
        )
    lines.append(f"{len(components)} effective lifts in {len(orbits)} Weyl orbits")
    return "\n".join(lines)
