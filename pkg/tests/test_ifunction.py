import random
from fractions import Fraction
from itertools import product

import pytest
import sympy

from qmapkit.errors import MalformedDatum, PoleAtPoint, PoleSurvived
from qmapkit.exact_arith import FactoredRational, LinearForm, NilExpansion, clear_and_sum, nilpotent_expand
from qmapkit.fixed_locus import enumerate_effective, is_effective
from qmapkit.git_model import make_preset
from qmapkit.ifunction import (
    Cohomology,
    abelian_term,
    act_on_factored,
    assemble_series,
    check_weyl_invariance,
    coefficient_from_terms,
    euler_pushforward_factor,
    group_degrees,
    nonabelian_coefficient,
    orbit_sum_coefficient,
    reduce_in_cohomology,
    root_factor_literal,
    root_pair_factor,
    series_reduced_in_cohomology,
    toric_coefficient,
    verify_proof_identities,
)


def form(*coeffs):
    return LinearForm(tuple(coeffs))


def projective(n):
    return make_preset("projective", n=n)


def grassmannian(k, n):
    return make_preset("grassmannian", k=k, n=n)


def projective_closed_form(n, d):
    return FactoredRational.build(1, [(form(1, k), -(n + 1)) for k in range(1, d + 1)])


def random_point(rng, r):
    return [Fraction(rng.randint(-30, 30), rng.randint(1, 7)) for _ in range(r)] + [Fraction(rng.randint(1, 9))]


class TestToricCoefficient:
    @pytest.mark.parametrize("n", [1, 2, 4])
    @pytest.mark.parametrize("d", [0, 1, 3])
    def test_projective(self, n, d):
        assert toric_coefficient(projective(n), (d,)) == projective_closed_form(n, d)

    def test_negative_pairing_gives_numerator(self):
        t = make_preset("custom", r=1, weights=[[1]], theta=[1])
        # y (y - z) for beta = -2
        expected = FactoredRational.build(1, [(form(1, -1), 1), (form(1, 0), 1)])
        assert toric_coefficient(t, (-2,)) == expected

    def test_product_of_lines(self):
        t = make_preset("toric", weight_matrix=[[1, 1, 0, 0], [0, 0, 1, 1]], theta=[1, 1])
        expected = FactoredRational.build(1, [(form(1, 0, 1), -2), (form(0, 1, 1), -2), (form(0, 1, 2), -2)])
        assert toric_coefficient(t, (1, 2)) == expected


class TestRootFactors:
    def test_literal(self):
        alpha = (1, -1)
        assert root_factor_literal(alpha, 0) == FactoredRational.one()
        assert root_factor_literal(alpha, 2) == FactoredRational.build(1, [(form(1, -1, 1), 1), (form(1, -1, 2), 1)])
        assert root_factor_literal(alpha, -1) == FactoredRational.build(1, [(form(1, -1, 0), -1)])

    def test_pair(self):
        alpha = (1, -1)
        assert root_pair_factor(alpha, 1) == FactoredRational.build(-1, [(form(1, -1, 1), 1), (form(1, -1, 0), -1)])
        assert root_pair_factor(alpha, -2) == FactoredRational.build(1, [(form(1, -1, -2), 1), (form(1, -1, 0), -1)])

    def test_pair_is_product_of_literals(self):
        rng = random.Random(3)
        for _ in range(60):
            alpha = (0, 0)
            while not any(alpha):
                alpha = (rng.randint(-3, 3), rng.randint(-3, 3))
            negated = tuple(-v for v in alpha)
            for m in range(-6, 7):
                literal = root_factor_literal(alpha, m) * root_factor_literal(negated, -m)
                assert literal == root_pair_factor(alpha, m)

    def test_pair_does_not_depend_on_representative(self):
        for m in range(-5, 6):
            assert root_pair_factor((1, -1), m) == root_pair_factor((-1, 1), -m)

    def test_root_must_not_involve_z(self):
        with pytest.raises(MalformedDatum):
            root_pair_factor(form(1, -1, 1), 1)

    def test_euler_pushforwards(self):
        xi = (1,)
        assert euler_pushforward_factor(xi, 2, Cohomology.H0) == FactoredRational.build(
            1, [(form(1, 1), 1), (form(1, 2), 1)]
        )
        assert euler_pushforward_factor(xi, -1, "H0") == FactoredRational.one()
        assert euler_pushforward_factor(xi, -1, Cohomology.H1) == FactoredRational.one()
        assert euler_pushforward_factor(xi, -3, Cohomology.H1) == FactoredRational.build(
            1, [(form(1, -2), 1), (form(1, -1), 1)]
        )


class TestNonabelianCoefficient:
    @pytest.mark.parametrize("n", [1, 2, 4])
    @pytest.mark.parametrize("d", [1, 2, 4])
    def test_grassmannian_of_lines_is_projective_space(self, n, d):
        c = nonabelian_coefficient(grassmannian(1, n + 1), (d,))
        assert c.factored == projective_closed_form(n, d)

    def test_gr24_degree_one(self):
        t = grassmannian(2, 4)
        c = nonabelian_coefficient(t, (1,))
        assert [b for b, _ in c.terms] == [(1, 0), (0, 1)]
        assert c.expr.pure_y_poles() == []
        x1, x2, z = sympy.symbols("x1 x2 z")
        expected = -(x1 - x2 + z) / ((x1 - x2) * (x1 + z) ** 4) - (x2 - x1 + z) / ((x2 - x1) * (x2 + z) ** 4)
        rng = random.Random(1)
        for _ in range(10):
            point = random_point(rng, 2)
            if point[0] == point[1]:
                continue
            subs = {s: sympy.Rational(str(v)) for s, v in zip((x1, x2, z), point)}
            try:
                value = c.expr.evaluate(point)
            except PoleAtPoint:
                continue
            assert sympy.Rational(str(value)) == expected.subs(subs)

    @pytest.mark.parametrize("k, n", [(2, 3), (2, 4)])
    @pytest.mark.parametrize("beta", [1, 2, 3])
    def test_poles_cancel_and_result_is_symmetric(self, k, n, beta):
        t = grassmannian(k, n)
        c = nonabelian_coefficient(t, (beta,))
        assert c.expr.pure_y_poles() == []
        assert check_weyl_invariance(t, c)

    def test_gr35_degree_two(self):
        t = grassmannian(3, 5)
        c = nonabelian_coefficient(t, (2,))
        assert c.expr.pure_y_poles() == []
        assert check_weyl_invariance(t, c)

    def test_single_lift_is_not_symmetric(self):
        t = grassmannian(2, 4)
        c = coefficient_from_terms(t, (1,), [(1, 0)])
        assert c.expr.pure_y_poles() == [form(1, -1, 0)]
        assert not check_weyl_invariance(t, c)

    def test_toric_single_term(self):
        t = projective(2)
        c = nonabelian_coefficient(t, (2,))
        assert c.terms == (((2,), projective_closed_form(2, 2)),)
        assert check_weyl_invariance(t, c)

    def test_surviving_pole(self):
        # a rank two group whose degree map only sees the first character: the orbit of (1, 0) is cut in half
        t = make_preset(
            "custom",
            r=2,
            weights=[[1, 0], [1, 0], [0, 1], [0, 1]],
            theta=[1, 1],
            roots=[[1, -1], [-1, 1]],
            tau=[[1, 2]],
            effectivity_mode="nonnegative_gl",
        )
        with pytest.raises(PoleSurvived):
            nonabelian_coefficient(t, (1,))

    def test_weyl_action_moves_terms_along_the_orbit(self):
        t = grassmannian(2, 4)
        swap = ((0, 1), (1, 0))
        assert act_on_factored(abelian_term(t, (2, 0)), swap) == abelian_term(t, (0, 2))
        assert act_on_factored(abelian_term(t, (1, 0)), ((1, 0), (0, 1))) == abelian_term(t, (1, 0))

    @pytest.mark.parametrize("k, n, beta", [(2, 4, 1), (2, 4, 2), (3, 5, 1), (3, 5, 2)])
    def test_orbit_sum_matches_the_full_sum(self, k, n, beta):
        t = grassmannian(k, n)
        assert orbit_sum_coefficient(t, (beta,)) == nonabelian_coefficient(t, (beta,)).expr

    def test_specialization(self):
        t = grassmannian(2, 4)
        c = nonabelian_coefficient(t, (2,))
        rng = random.Random(9)
        checked = 0
        while checked < 20:
            point = random_point(rng, 2)
            if any(f.evaluate(point) == 0 for _, term in c.terms for f, _ in term.factors):
                continue
            expected = sum((term.evaluate(point) for _, term in c.terms), Fraction(0))
            assert c.expr.evaluate(point) == expected
            checked += 1


class TestProofIdentities:
    @pytest.mark.parametrize(
        "t",
        [projective(1), projective(2), projective(3), grassmannian(2, 3), grassmannian(2, 4), grassmannian(3, 5)],
        ids=["p1", "p2", "p3", "gr23", "gr24", "gr35"],
    )
    def test_identities_hold(self, t):
        checked = 0
        for beta_t in product(range(-4, 5), repeat=t.r):
            if is_effective(t, beta_t):
                assert verify_proof_identities(t, beta_t), beta_t
                checked += 1
        assert checked > 0

    def test_product_of_lines(self):
        t = make_preset("toric", weight_matrix=[[1, 1, 0, 0], [0, 0, 1, 1]], theta=[1, 1])
        for beta_t in product(range(0, 4), repeat=2):
            assert verify_proof_identities(t, beta_t)


class TestCohomologyReduction:
    def test_p1(self):
        series = assemble_series(projective(1), 2)
        assert reduce_in_cohomology(series.coefficients[(1,)], 1).to_text(["H", "z"]) == "z^-2 - 2*H*z^-3"
        assert reduce_in_cohomology(series.coefficients[(2,)], 1) == NilExpansion(
            (2,), {((0,), -4): Fraction(1, 4), ((1,), -5): Fraction(-3, 4)}
        )

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_matches_expansion_of_the_closed_form(self, n):
        series = assemble_series(projective(n), 3)
        for (d,), c in series.coefficients.items():
            assert reduce_in_cohomology(c, n) == nilpotent_expand(projective_closed_form(n, d), (n + 1,))

    def test_constant_term(self):
        reduced = series_reduced_in_cohomology(assemble_series(projective(2), 1), 2)
        assert list(reduced) == [(0,), (1,)]
        assert reduced[(0,)].to_text() == "1"

    def test_needs_one_chern_root(self):
        c = nonabelian_coefficient(grassmannian(2, 4), (1,))
        with pytest.raises(MalformedDatum):
            reduce_in_cohomology(c, 2)


class TestSeries:
    def test_projective_line(self):
        series = assemble_series(projective(1), 2)
        assert list(series.coefficients) == [(1,), (2,)]
        assert series.coefficients[(2,)].factored == projective_closed_form(1, 2)

    def test_grassmannian(self):
        series = assemble_series(grassmannian(2, 4), 2)
        assert list(series.coefficients) == [(1,), (2,)]

    def test_degrees_without_lifts_are_skipped(self):
        t = make_preset("custom", r=1, weights=[[1], [1]], theta=[1], tau=[[2]], effectivity_mode="toric")
        series = assemble_series(t, 1)
        assert series.coefficients == {}

    def test_group_degree_order(self):
        assert group_degrees(1, 2) == [(-1,), (1,), (-2,), (2,)]
        assert group_degrees(2, 1) == [(-1, 0), (0, -1), (0, 1), (1, 0)]

    def test_degree_bound(self):
        with pytest.raises(MalformedDatum):
            assemble_series(projective(1), 0)

    def test_sum_of_terms(self):
        t = grassmannian(2, 3)
        c = nonabelian_coefficient(t, (2,))
        terms = [abelian_term(t, b) for b in enumerate_effective(t, (2,))]
        assert c.expr == clear_and_sum(terms, nvars=t.nvars)
