"""
Tests for the suite runner and report rendering.
"""

import dataclasses
import json
from fractions import Fraction

import numpy as np
import pytest

from riesz_core.settings import Settings
from riesz_verifier.report import (
    load_report,
    render_structured,
    render_text,
    to_plain,
)
from riesz_verifier.scenario import CheckSpec, load_bundled
from riesz_verifier.suite import CHECKS, run_check, run_suite, run_suite_async


@pytest.fixture
def two_coin():
    return load_bundled("two_coin")


@pytest.fixture
def non_markov():
    return load_bundled("non_markov")


def with_checks(scenario, *checks):
    return dataclasses.replace(scenario, checks=list(checks))


class TestRunSuite:
    """Tests for run_suite on the bundled scenarios."""

    def test_two_coin_passes(self, two_coin):
        report = run_suite(two_coin)
        assert [r.status for r in report.results] == ["pass"] * 15
        assert report.exit_code == 0
        assert report.passed

    def test_expected_failure_is_a_pass(self, two_coin):
        """E1 with itself is dependent, and every characterization says so."""
        result = run_suite(two_coin).results[1]
        assert result.status == "pass"
        assert result.details["band"] is False
        assert result.details["classical"] is False
        assert result.details["expect"] is False
        assert result.witness["type"] == "BandWitness"

    def test_non_markov_fails(self, non_markov):
        report = run_suite(non_markov)
        assert report.exit_code == 1
        statuses = {r.label: r.status for r in report.results}
        assert statuses["markov(process=echo)"] == "fail"
        assert statuses["future_products(process=echo)"] == "fail"
        assert statuses["chapman_kolmogorov(process=echo)"] == "fail"
        assert statuses["independence(first=G, second=G)"] == "pass"
        assert statuses["freudenthal(element=W, resolution=4)"] == "pass"

    def test_non_markov_is_consistent(self, non_markov):
        """Every Markov characterization and the classical oracle fail together."""
        markov = run_suite(non_markov).results[0]
        assert "consistent" not in markov.details
        assert set(markov.details.values()) == {False}
        assert markov.witness["type"] == "MarkovWitness"
        assert markov.witness["history"] == [1, 2]

    def test_empty_checks(self, two_coin):
        report = run_suite(with_checks(two_coin))
        assert report.results == []
        assert report.exit_code == 0

    def test_registry(self):
        assert {"independence", "markov", "brownian", "radon_nikodym"} <= set(CHECKS)


class TestRunCheck:
    """Tests for status assignment and error capture."""

    def test_unknown_check(self, two_coin):
        result = run_check(two_coin, 1, CheckSpec("bogus"), Settings())
        assert result.status == "error"
        assert result.message == "Unknown check 'bogus'"

    def test_missing_parameter(self, two_coin):
        result = run_check(two_coin, 1, CheckSpec("independence"), Settings())
        assert result.status == "error"
        assert "missing parameter" in result.message

    def test_domain_error_is_captured(self, two_coin):
        spec = CheckSpec("independence", {"first": "E1", "second": "trivial", "conditioning": "E2"})
        result = run_check(two_coin, 1, spec, Settings())
        assert result.status == "error"
        assert "does not contain R(T)" in result.message

    def test_cap_exceeded(self, two_coin):
        spec = CheckSpec("independence", {"first": "E1", "second": "E2"})
        result = run_check(two_coin, 1, spec, Settings(independence_cap_blocks=1))
        assert result.status == "cap_exceeded"
        assert "cap" in result.message

    def test_exit_code_precedence(self, two_coin):
        """A failure outranks a cap."""
        capped = with_checks(two_coin, CheckSpec("self_independence"))
        settings = Settings(cap_blocks=1)
        assert run_suite(capped, settings).exit_code == 3
        mixed = with_checks(
            two_coin,
            CheckSpec("self_independence"),
            CheckSpec("independence", {"first": "E1", "second": "E1"}),
        )
        assert run_suite(mixed, settings).exit_code == 1

    def test_bad_parameter_does_not_stop_suite(self, two_coin):
        """A malformed parameter fails its own check; later checks still run."""
        bad = CheckSpec(
            "bounded_sums", {"bound": "one", "elements": ["X1", "X2"], "horizon": "abc"}
        )
        report = run_suite(with_checks(two_coin, bad, CheckSpec("self_independence")))
        assert [r.status for r in report.results] == ["error", "pass"]
        assert "must be an integer" in report.results[0].message
        assert report.exit_code == 1

    @pytest.mark.parametrize(
        "spec",
        [
            CheckSpec("sequence_independence", {"elements": "X1"}),
            CheckSpec("freudenthal", {"element": "two", "resolution": [3]}),
            CheckSpec("unit_invariance", {"first": "E1", "second": "E2", "units": 0}),
        ],
    )
    def test_malformed_parameters(self, two_coin, spec):
        result = run_check(two_coin, 1, spec, Settings())
        assert result.status == "error"
        assert result.message

    def test_unexpected_exception_is_captured(self, two_coin, monkeypatch):
        def broken(scenario, params, settings):
            raise ZeroDivisionError("division by zero")

        monkeypatch.setitem(CHECKS, "broken", broken)
        walk = CheckSpec("markov", {"process": "walk"})
        report = run_suite(with_checks(two_coin, CheckSpec("broken"), walk))
        assert [r.status for r in report.results] == ["error", "pass"]
        assert report.results[0].message == "ZeroDivisionError: division by zero"

    def test_conditioning(self, two_coin):
        """Given E1, E1 is independent of anything."""
        spec = CheckSpec("independence", {"first": "E1", "second": "E1", "conditioning": "E1"})
        assert run_check(two_coin, 1, spec, Settings()).status == "pass"


class TestIndependenceWithRespectToS:
    """Tests for the independence_wrt check."""

    def test_coins_given_first_coin(self, two_coin):
        spec = CheckSpec(
            "independence_wrt", {"first": "E1", "second": "E2", "conditioning": "E1"}
        )
        result = run_check(two_coin, 1, spec, Settings())
        assert result.status == "pass"
        assert result.details == {"operator": True, "band": True, "classical": True}

    def test_second_coin_with_itself(self, two_coin):
        """Given the first coin, the second coin still depends on itself."""
        spec = CheckSpec(
            "independence_wrt",
            {"first": "E2", "second": "E2", "conditioning": "E1"},
            expect=False,
        )
        result = run_check(two_coin, 1, spec, Settings())
        assert result.status == "pass"
        assert result.details["operator"] is False
        assert result.details["classical"] is False
        assert result.witness["identity"] == "T1·T_J = T1·S·T_J"

    def test_bundled_scenario_reaches_check(self, non_markov):
        statuses = {r.label: r.status for r in run_suite(non_markov).results}
        assert statuses["independence_wrt(conditioning=discrete, first=G, second=G)"] == "pass"


class TestConcurrency:
    """Tests for the threaded runner."""

    @pytest.mark.asyncio
    async def test_matches_sequential(self, non_markov):
        concurrent = await run_suite_async(non_markov)
        sequential = run_suite(non_markov)
        assert render_text(concurrent, timings=False) == render_text(sequential, timings=False)


class TestRendering:
    """Tests for text and structured reports."""

    def test_deterministic_without_timings(self, non_markov):
        first = render_text(run_suite(non_markov), timings=False)
        second = render_text(run_suite(non_markov), timings=False)
        assert first == second
        assert "Timings:" not in first
        assert first.splitlines()[-1] == "Result: FAIL (exit 1)"

    def test_timings_section(self, two_coin):
        text = render_text(run_suite(two_coin), timings=True)
        assert "Timings:" in text
        data = json.loads(render_structured(run_suite(two_coin), timings=False))
        assert "timings" not in data
        assert data["summary"] == {"pass": 15, "fail": 0, "error": 0, "cap_exceeded": 0}

    def test_structured_round_trip(self, non_markov):
        report = run_suite(non_markov)
        loaded = load_report(render_structured(report))
        assert render_text(loaded, timings=False) == render_text(report, timings=False)
        assert loaded.exit_code == 1

    def test_plain_values(self):
        assert to_plain(Fraction(-1, 3)) == "-1/3"
        assert to_plain({1: (Fraction(2), None)}) == {"1": ["2", None]}
        matrix = np.array([[Fraction(1, 2), Fraction(0)]], dtype=object)
        assert to_plain(matrix) == ["[1/2 0]"]
        assert to_plain(frozenset({2, 1})) == [1, 2]
