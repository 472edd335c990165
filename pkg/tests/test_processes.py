"""
Tests for product spaces, partial sums, martingales, bounded sums and Rademacher walks.
"""

import itertools
from fractions import Fraction

import pytest

from riesz_core.condexp import ConditionalExpectation
from riesz_core.errors import DomainError, ResourceCapError
from riesz_core.partitions import refines
from riesz_core.space import e_mul
from riesz_probability.independence import sequence_independent
from riesz_probability.markov import is_markov
from riesz_probability.processes import (
    FAIR_COIN,
    BrownianProcess,
    bounded_sum_check,
    brownian_bounded,
    brownian_is_markov,
    cumulative,
    generated_histories_agree,
    is_martingale,
    natural_filtration,
    partial_sums,
    product_space,
    rademacher_walk,
    verify_brownian,
)
from riesz_verifier.generator import ScenarioGenerator
from tests.builders import expectation, two_coins


class TestProductSpace:
    """Tests for product_space."""

    def test_two_coins(self):
        ps = product_space([FAIR_COIN, FAIR_COIN])
        assert ps.base.atoms == ("0.0", "0.1", "1.0", "1.1")
        assert ps.base.weights == (Fraction(1, 4),) * 4
        assert [str(c) for c in ps.coordinates] == ["(1, 1, -1, -1)", "(1, -1, 1, -1)"]

    def test_product_weights(self):
        biased = [(0, "1/3"), (1, "2/3")]
        ps = product_space([biased, FAIR_COIN])
        assert ps.base.weights == (
            Fraction(1, 6),
            Fraction(1, 6),
            Fraction(1, 3),
            Fraction(1, 3),
        )
        assert ps.coordinates_independent().holds

    def test_expectation(self):
        ps = product_space([FAIR_COIN])
        assert ps.expectation.apply(ps.coordinates[0]).is_zero()

    def test_no_factors(self):
        with pytest.raises(DomainError):
            product_space([])

    def test_empty_factor(self):
        with pytest.raises(DomainError, match="no outcomes"):
            product_space([FAIR_COIN, []])

    def test_bad_weights(self):
        with pytest.raises(DomainError, match="must sum to 1"):
            product_space([[(0, "1/2"), (1, "1/3")]])

    def test_non_positive_weight(self):
        with pytest.raises(DomainError, match="non-positive"):
            product_space([[(0, 1), (1, 0)]])


class TestPartialSums:
    """Tests for partial_sums and generated histories."""

    def test_two_coin_walk(self):
        space, x1, x2 = two_coins()
        proc = partial_sums([x1, x2], expectation(space))
        assert proc.times == (1, 2)
        assert [str(s) for s in proc.elements] == ["(1, 1, -1, -1)", "(2, 0, 0, -2)"]
        assert is_markov(proc).holds

    def test_repeated_increment_is_still_markov(self):
        """f2 = f1 is not independent, yet S2 = 2 S1 is Markov."""
        space, x1, _ = two_coins()
        t = expectation(space)
        assert not sequence_independent(t, [x1, x1]).holds
        assert is_markov(partial_sums([x1, x1], t)).holds

    def test_histories_agree(self):
        space, x1, x2 = two_coins()
        assert generated_histories_agree([x1, x2], expectation(space))

    def test_cumulative(self):
        space, x1, x2 = two_coins()
        assert cumulative([]) == []
        assert cumulative([x1, x2])[-1] == x1 + x2

    def test_natural_filtration_increases(self):
        walk = rademacher_walk(3).process
        filtration = natural_filtration(walk)
        assert len(filtration) == 3
        for earlier, later in zip(filtration, filtration[1:]):
            assert refines(later.partition, earlier.partition)


class TestMartingale:
    """Tests for is_martingale."""

    def test_walk(self):
        assert is_martingale(rademacher_walk(3).process).holds

    def test_drift_breaks_it(self):
        """Adding a constant step gives a witness at i=1, j=2."""
        space, x1, _ = two_coins()
        proc = partial_sums([x1, space.ones()], expectation(space))
        report = is_martingale(proc)
        assert not report.holds
        assert (report.witness.i, report.witness.j) == (1, 2)
        assert str(report.witness.left) == "(2, 2, 0, 0)"
        assert str(report.witness.right) == "(1, 1, -1, -1)"

    def test_non_monotone_filtration(self):
        space, x1, x2 = two_coins()
        proc = partial_sums([x1, x2], expectation(space))
        filtration = [ConditionalExpectation.identity(space), expectation(space)]
        with pytest.raises(DomainError, match="non-monotone filtration"):
            is_martingale(proc, filtration)

    def test_filtration_length(self):
        space, x1, x2 = two_coins()
        proc = partial_sums([x1, x2], expectation(space))
        with pytest.raises(DomainError):
            is_martingale(proc, [expectation(space)])


class TestBoundedSums:
    """Tests for finite-horizon T-boundedness."""

    def test_unit_bound_holds(self):
        space, x1, x2 = two_coins()
        report = bounded_sum_check([x1, x2], expectation(space), space.ones(), 2)
        assert report.holds
        assert [str(r) for r in report.running] == ["(1, 1, 1, 1)", "(1, 1, 1, 1)"]

    def test_zero_bound_fails_at_one(self):
        space, x1, x2 = two_coins()
        report = bounded_sum_check([x1, x2], expectation(space), space.zero(), 2)
        assert not report.holds
        assert report.first_violation == 1

    def test_mean_zero_violations(self):
        space, x1, _ = two_coins()
        report = bounded_sum_check([x1, space.ones()], expectation(space), space.constant(5), 2)
        assert report.bound_holds
        assert report.mean_zero_violations == [2]
        assert not report.holds

    def test_horizon_range(self):
        space, x1, x2 = two_coins()
        with pytest.raises(DomainError, match="outside 0..2"):
            bounded_sum_check([x1, x2], expectation(space), space.ones(), 3)

    def test_zero_horizon(self):
        space, x1, _ = two_coins()
        report = bounded_sum_check([x1], expectation(space), space.zero(), 0)
        assert report.running == []
        assert report.bound_holds


class TestRademacherWalk:
    """Tests for rademacher_walk and the Brownian axioms."""

    @pytest.mark.parametrize("steps", [1, 2, 3, 4])
    def test_axioms_hold(self, steps):
        walk = rademacher_walk(steps)
        assert walk.steps == steps
        assert walk.process.space.size == 2**steps
        assert verify_brownian(walk).holds
        assert brownian_is_markov(walk)

    def test_variance_grows_linearly(self):
        walk = rademacher_walk(3)
        t, e = walk.process.t, walk.process.e
        d = walk.value(3) - walk.value(1)
        assert t.apply(e_mul(d, d, e)) == e * 2
        assert walk.value(0).is_zero()

    def test_step_count(self):
        with pytest.raises(DomainError):
            rademacher_walk(0)

    def test_cap(self):
        with pytest.raises(ResourceCapError) as excinfo:
            rademacher_walk(6)
        assert excinfo.value.cap_name == "walk_cap"
        with pytest.raises(ResourceCapError):
            rademacher_walk(3, cap=2)

    def test_repeated_increment_fails_axioms(self):
        """g2 = g1 breaks independence and the variance identity."""
        space, x1, _ = two_coins()
        bp = BrownianProcess.from_increments(expectation(space), [x1, x1])
        report = verify_brownian(bp)
        assert not report.holds
        assert not report.independence.holds
        assert report.mean_zero_violations == []
        assert (0, 2) in report.variance_violations

    def test_biased_increment(self):
        space, x1, _ = two_coins()
        bp = BrownianProcess.from_increments(expectation(space), [x1, space.ones()])
        assert verify_brownian(bp).mean_zero_violations == [2]

    def test_markov(self):
        assert brownian_is_markov(rademacher_walk(1))
        assert brownian_is_markov(rademacher_walk(3))

    def test_bounded(self):
        """E|S3| = 3/2, so the unit bound first fails at step 3."""
        walk = rademacher_walk(3)
        space = walk.process.space
        assert brownian_bounded(walk, space.constant(3)).holds
        report = brownian_bounded(walk, space.ones())
        assert report.first_violation == 3
        assert report.running[2] == space.constant(Fraction(3, 2))
        assert brownian_bounded(walk, space.ones(), horizon=2).holds


def mean_zero_product(count: int, seed: int):
    """Product of mean-zero factors; four factors share one binary law so the sums stay coarse."""
    generator = ScenarioGenerator(seed=seed)
    if count == 4:
        return product_space([generator.mean_zero_factor(2)] * 4)
    outcomes = 3 if count <= 2 else 2
    return product_space([generator.mean_zero_factor(outcomes) for _ in range(count)])


class TestIndependentIncrements:
    """Partial sums of independent mean-zero factors, over every subset of coordinates."""

    def test_factors_are_biased_and_centred(self):
        factor = ScenarioGenerator(seed=1).mean_zero_factor(3)
        assert sum(v * w for v, w in factor) == 0
        assert len({v for v, _ in factor}) == len(factor)

    @pytest.mark.parametrize("count", [1, 2, 3, 4])
    def test_partial_sums_are_markov_martingales(self, count):
        for seed in range(4):
            ps = mean_zero_product(count, seed)
            t = ps.expectation
            assert all(t.apply(c).is_zero() for c in ps.coordinates)
            for size in range(1, count + 1):
                for subset in itertools.combinations(ps.coordinates, size):
                    fs = list(subset)
                    proc = partial_sums(fs, t)
                    assert generated_histories_agree(fs, t)
                    assert is_martingale(proc).holds, (seed, size)
                    if size > 1:
                        assert is_markov(proc).holds, (seed, size)
