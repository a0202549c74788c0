import random
from fractions import Fraction

import pytest
import sympy

from qmapkit.errors import NonExpandable, NotDivisible, PoleAtPoint, ZeroForm
from qmapkit.exact_arith import (
    FactoredRational,
    LinearForm,
    NilExpansion,
    RatExpr,
    SparsePoly,
    clear_and_sum,
    divide_by_linear_form,
    evaluate,
    factored_multiply,
    nilpotent_expand,
    normalize_linear_form,
    substitute_factored,
    substitute_linear,
)


def form(*coeffs):
    return LinearForm(tuple(coeffs))


def random_poly(rng, nvars=3, size=4):
    terms = {}
    for _ in range(size):
        mono = tuple(rng.randint(0, 2) for _ in range(nvars))
        terms[mono] = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
    return SparsePoly(nvars, terms)


def random_form(rng, nvars=3):
    raw = [0] * nvars
    while not any(raw):
        raw = [rng.randint(-3, 3) for _ in range(nvars)]
    return normalize_linear_form(raw)[0]


class TestSparsePoly:
    def test_text_is_graded_lex_with_z_largest(self):
        y, z = SparsePoly.variable(2, 0), SparsePoly.variable(2, 1)
        assert ((y + z) ** 2).to_text() == "z^2 + 2*y*z + y^2"
        assert (y - z).to_text() == "-z + y"
        assert SparsePoly.zero(2).to_text() == "0"

    def test_default_names_for_several_roots(self):
        p = SparsePoly.variable(3, 0) * SparsePoly.variable(3, 1)
        assert p.to_text() == "y1*y2"

    def test_rejects_floats(self):
        with pytest.raises(TypeError):
            SparsePoly(2, {(1, 0): 0.5})

    def test_zero_coefficients_are_dropped(self):
        p = SparsePoly(2, {(1, 0): 0, (0, 1): Fraction(1, 2)})
        assert p.terms == {(0, 1): Fraction(1, 2)}

    def test_ring_axioms(self):
        rng = random.Random(41)
        for _ in range(30):
            a, b, c = (random_poly(rng) for _ in range(3))
            assert (a + b) + c == a + (b + c)
            assert (a * b) * c == a * (b * c)
            assert a + b == b + a
            assert a * b == b * a
            assert a * (b + c) == a * b + a * c
            assert a - a == SparsePoly.zero(3)
            assert a * SparsePoly.one(3) == a

    def test_rebuilding_from_terms_is_idempotent(self):
        rng = random.Random(42)
        for _ in range(20):
            p = random_poly(rng)
            assert SparsePoly(3, p.terms) == p
            assert SparsePoly(3, p.terms).sorted_terms() == p.sorted_terms()

    def test_evaluate_matches_sympy(self):
        rng = random.Random(7)
        ys, zs = sympy.symbols("y z")
        for _ in range(20):
            terms = {(rng.randint(0, 3), rng.randint(0, 3)): rng.randint(-5, 5) for _ in range(4)}
            p = SparsePoly(2, terms)
            expr = sum(c * ys**a * zs**b for (a, b), c in terms.items())
            point = (Fraction(rng.randint(-4, 4), rng.randint(1, 3)), Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
            expected = expr.subs({ys: sympy.Rational(str(point[0])), zs: sympy.Rational(str(point[1]))})
            assert sympy.Rational(str(p.evaluate(point))) == expected


class TestLinearForm:
    def test_normalize_moves_content_and_sign_into_scale(self):
        f, scale = normalize_linear_form([-2, 4, 0])
        assert f == form(1, -2, 0)
        assert scale == -2

    def test_normalize_clears_denominators(self):
        f, scale = normalize_linear_form([Fraction(1, 2), Fraction(1, 3)])
        assert f == form(3, 2)
        assert scale == Fraction(1, 6)

    def test_zero_form(self):
        with pytest.raises(ZeroForm):
            form(0, 0)
        with pytest.raises(ZeroForm):
            normalize_linear_form([0, 0, 0])

    def test_non_canonical_forms_are_refused(self):
        with pytest.raises(ValueError):
            form(2, 4)
        with pytest.raises(ValueError):
            form(-1, 1)

    def test_normalizing_a_canonical_form_is_the_identity(self):
        rng = random.Random(43)
        for _ in range(30):
            f = random_form(rng)
            assert normalize_linear_form(f.coeffs) == (f, 1)

    def test_text(self):
        assert form(1, -1, 2).to_text() == "[1,-1,2]"
        assert form(1, 1).pretty(["H", "z"]) == "z + H"


class TestFactoredRational:
    def test_from_raw_keeps_the_scale(self):
        f = FactoredRational.from_raw([-1, 0], -1)
        assert f.scalar == -1
        assert f.factors == ((form(1, 0), -1),)
        assert f.to_text() == "-1 * [1,0]^-1"

    def test_text_omits_unit_scalar(self):
        f = FactoredRational.build(1, [(form(1, 2), -2), (form(1, 1), -2)])
        assert f.to_text() == "[1,1]^-2 * [1,2]^-2"
        assert FactoredRational.one().to_text() == "1"

    def test_factors_merge_and_cancel(self):
        a = FactoredRational.from_raw([1, 1], 2)
        b = FactoredRational.from_raw([2, 2], -2)
        assert a * b == FactoredRational.build(Fraction(1, 4))

    def test_multiply_adds_exponents(self):
        a = FactoredRational.build(2, [(form(1, 1), -1)])
        b = FactoredRational.build(3, [(form(1, 1), 2), (form(1, 2), -1)])
        expected = FactoredRational.build(6, [(form(1, 1), 1), (form(1, 2), -1)])
        assert factored_multiply(a, b) == expected
        assert a * b == expected

    def test_arithmetic_matches_evaluation(self):
        a = FactoredRational.build(3, [(form(1, 1), -1), (form(0, 1), 2)])
        b = FactoredRational.build(Fraction(-1, 2), [(form(1, -1), 1)])
        point = (Fraction(5), Fraction(2))
        assert (a * b).evaluate(point) == a.evaluate(point) * b.evaluate(point)
        assert (a / b).evaluate(point) == a.evaluate(point) / b.evaluate(point)
        assert (a**-2).evaluate(point) == a.evaluate(point) ** -2

    def test_rebuilding_is_idempotent(self):
        rng = random.Random(44)
        for _ in range(30):
            pairs = [(random_form(rng), rng.choice([-2, -1, 1, 3])) for _ in range(rng.randint(0, 4))]
            f = FactoredRational.build(Fraction(rng.randint(-5, 5), rng.randint(1, 5)), pairs)
            assert FactoredRational.build(f.scalar, f.factors) == f

    def test_pole_at_point(self):
        with pytest.raises(PoleAtPoint):
            FactoredRational.from_raw([1, 0], -1).evaluate([0, 1])

    def test_vanishing_numerator_evaluates_to_zero(self):
        assert FactoredRational.from_raw([1, -1]).evaluate([2, 2]) == 0


class TestClearAndSum:
    def test_difference_of_simple_poles(self):
        terms = [
            FactoredRational.build(1, [(form(1, 1), -1)]),
            FactoredRational.build(-1, [(form(1, 2), -1)]),
        ]
        expr = clear_and_sum(terms)
        assert expr.numerator == SparsePoly.variable(2, 1)
        assert expr.denominator == ((form(1, 1), 1), (form(1, 2), 1))

    def test_linear_factor_cancels(self):
        terms = [
            FactoredRational.build(1, [(form(1, 0), 1), (form(1, -1), -1)]),
            FactoredRational.build(-1, [(form(0, 1), 1), (form(1, -1), -1)]),
        ]
        expr = clear_and_sum(terms)
        assert expr.denominator == ()
        assert expr.numerator == SparsePoly.one(2)
        assert expr.as_factored() == FactoredRational.one()

    def test_cancellation_to_zero(self):
        t = FactoredRational.from_raw([1, 1, 1], -3)
        expr = clear_and_sum([t, -1 * t])
        assert expr.is_zero
        assert expr.denominator == ()

    def test_agrees_with_termwise_evaluation(self):
        rng = random.Random(11)
        for _ in range(25):
            terms = []
            for _ in range(rng.randint(1, 4)):
                pairs = []
                for _ in range(rng.randint(1, 3)):
                    raw = [rng.randint(-2, 2), rng.randint(-2, 2), rng.randint(1, 3)]
                    f, _ = normalize_linear_form(raw)
                    pairs.append((f, rng.choice([-2, -1, 1])))
                terms.append(FactoredRational.build(rng.randint(-3, 3), pairs))
            expr = clear_and_sum(terms, nvars=3)
            point = [Fraction(rng.randint(-9, 9), 7), Fraction(rng.randint(-9, 9), 5), Fraction(rng.randint(1, 9), 3)]
            if any(f.evaluate(point) == 0 for t in terms for f, _ in t.factors):
                continue
            assert expr.evaluate(point) == sum((t.evaluate(point) for t in terms), Fraction(0))

    def test_needs_a_term(self):
        with pytest.raises(ValueError):
            clear_and_sum([])

    def test_constant_terms(self):
        expr = clear_and_sum([FactoredRational.one(), FactoredRational.one()])
        assert expr.denominator == ()
        assert expr.as_factored() == FactoredRational.build(2)
        assert clear_and_sum([FactoredRational.one()], nvars=3).numerator == SparsePoly.constant(3, 1)

    def test_reduced_sum_is_a_fixed_point(self):
        rng = random.Random(45)
        for _ in range(15):
            terms = [
                FactoredRational.build(rng.randint(1, 4), [(random_form(rng), rng.choice([-2, -1, 1]))])
                for _ in range(3)
            ]
            expr = clear_and_sum(terms, nvars=3)
            assert RatExpr(expr.numerator, expr.denominator) == expr
            again = clear_and_sum([FactoredRational.build(1, [(f, -e) for f, e in expr.denominator])], nvars=3)
            assert again.denominator == expr.denominator


class TestDivision:
    def test_exact_quotient(self):
        y, z = SparsePoly.variable(2, 0), SparsePoly.variable(2, 1)
        p = (y + z) * (y - 2 * z)
        assert divide_by_linear_form(p, form(1, 1)) == y - 2 * z

    def test_multiplying_back_reproduces_the_input(self):
        rng = random.Random(46)
        for _ in range(40):
            f = random_form(rng)
            q = random_poly(rng)
            p = q * f.to_poly()
            quotient = divide_by_linear_form(p, f)
            assert quotient == q
            assert (quotient * f.to_poly()).terms == p.terms

    def test_not_divisible(self):
        y, z = SparsePoly.variable(2, 0), SparsePoly.variable(2, 1)
        with pytest.raises(NotDivisible):
            divide_by_linear_form(y * y + z, form(1, 1))


class TestSubstitution:
    def test_swap_of_roots(self):
        y1 = SparsePoly.variable(3, 0)
        assert substitute_linear(y1, [[0, 1], [1, 0]]) == SparsePoly.variable(3, 1)

    def test_factored_substitution_renormalizes(self):
        # y1 - y2 + z under the swap becomes -(y1 - y2 - z)
        f = FactoredRational.from_raw([1, -1, 1], -1)
        image = substitute_factored(f, [[0, 1], [1, 0]])
        assert image == FactoredRational.build(-1, [(form(1, -1, -1), -1)])

    def test_substitution_commutes_with_evaluation(self):
        f = FactoredRational.build(2, [(form(1, 2, 1), -1), (form(0, 1, -3), 2)])
        g = [[2, 1], [1, 1]]
        point = [Fraction(3), Fraction(-1), Fraction(2)]
        moved = [g[0][0] * point[0] + g[0][1] * point[1], g[1][0] * point[0] + g[1][1] * point[1], point[2]]
        assert substitute_factored(f, g).evaluate(point) == f.evaluate(moved)


class TestNilpotentExpansion:
    def test_p1_degree_one(self):
        nil = nilpotent_expand(FactoredRational.from_raw([1, 1], -2), (2,))
        assert nil.coefficient((0,), -2) == 1
        assert nil.coefficient((1,), -3) == -2
        assert nil.to_text(["H", "z"]) == "z^-2 - 2*H*z^-3"

    def test_p1_degree_two(self):
        f = FactoredRational.build(1, [(form(1, 1), -2), (form(1, 2), -2)])
        nil = nilpotent_expand(f, (2,))
        assert nil == NilExpansion((2,), {((0,), -4): Fraction(1, 4), ((1,), -5): Fraction(-3, 4)})

    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_projective_coefficients_against_sympy(self, n, d):
        H, z = sympy.symbols("H z", positive=True)
        f = sympy.Integer(1)
        for k in range(1, d + 1):
            f = f / (H + k * z) ** (n + 1)
        factored = FactoredRational.build(1, [(form(1, k), -(n + 1)) for k in range(1, d + 1)])
        nil = nilpotent_expand(factored, (n + 1,))
        for j in range(n + 1):
            expected = sympy.diff(f, H, j).subs(H, 0) / sympy.factorial(j)
            ours = sum(
                sympy.Rational(c.numerator, c.denominator) * z**e for e, c in nil.terms.get((j,), {}).items()
            )
            assert sympy.simplify(expected - ours) == 0

    def test_ratexpr_and_factored_agree(self):
        f = FactoredRational.build(3, [(form(1, 1), -1), (form(1, 3), -2), (form(1, 0), 1)])
        expr = clear_and_sum([f])
        assert nilpotent_expand(expr, (3,)) == nilpotent_expand(f, (3,))

    def test_root_killed_at_first_order(self):
        nil = nilpotent_expand(FactoredRational.from_raw([1, 1], -2), (1,))
        assert nil == NilExpansion((1,), {((0,), -2): 1})
        assert nil.to_text(["H", "z"]) == "z^-2"

    def test_root_in_the_numerator(self):
        f = FactoredRational.build(1, [(form(1, 0), 1), (form(1, 1), -1)])
        nil = nilpotent_expand(f, (2,))
        assert nil == NilExpansion((2,), {((1,), -1): 1})
        assert nil.to_text(["y", "z"]) == "y*z^-1"

    def test_pure_root_pole_cannot_be_expanded(self):
        with pytest.raises(NonExpandable):
            nilpotent_expand(FactoredRational.from_raw([1, 0], -1), (2,))

    def test_evaluate_dispatch(self):
        expr = RatExpr(SparsePoly.variable(2, 0), ((form(0, 1), 1),))
        assert evaluate(expr, [4, 2]) == 2
        assert evaluate(3, [0, 1]) == 3
