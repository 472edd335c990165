"""
Tests for scenario loading, validation and canonical dumping.
"""

import json
from fractions import Fraction

import pytest

from riesz_core.errors import (
    ScenarioInvariantError,
    ScenarioParseError,
    UnresolvedNameError,
)
from riesz_core.partitions import Partition
from riesz_verifier.generator import ScenarioGenerator, walk_scenario
from riesz_verifier.scenario import (
    CheckSpec,
    Scenario,
    bundled_scenarios,
    dump_scenario,
    load_bundled,
    load_scenario,
)
from tests.builders import blocks


def minimal(**overrides) -> dict:
    """Smallest valid scenario document, with top-level fields replaced."""
    data = {
        "name": "tiny",
        "space": {"atoms": ["a", "b", "c"], "weights": ["1/3", "1/3", "1/3"]},
        "elements": {"x": ["1", "0", "1"]},
    }
    data.update(overrides)
    return data


def load(data: dict) -> Scenario:
    return load_scenario(json.dumps(data))


class TestLoading:
    """Tests for load_scenario."""

    def test_bundled_two_coin(self):
        scenario = load_bundled("two_coin")
        assert scenario.name == "two_coin"
        assert scenario.space.size == 4
        assert scenario.partitions["E1"] == blocks(scenario.space, "12", "34")
        assert scenario.partitions["E2"] == blocks(scenario.space, "13", "24")
        assert scenario.processes == {"walk": {1: "S1", 2: "S2"}}
        assert len(scenario.checks) == 15

    def test_bundled_names(self):
        assert bundled_scenarios() == ["non_markov", "two_coin"]

    def test_unknown_bundled(self):
        with pytest.raises(ScenarioParseError, match="No bundled scenario"):
            load_bundled("nope")

    def test_defaults(self):
        """Base defaults to the trivial partition and the unit to the constant one."""
        scenario = load(minimal())
        assert scenario.space.weights == (Fraction(1, 3),) * 3
        assert scenario.base == Partition.trivial(scenario.space)
        assert scenario.unit == scenario.space.ones()
        assert scenario.checks == []

    def test_reserved_partitions(self):
        scenario = load(minimal())
        assert scenario.partition("trivial") == Partition.trivial(scenario.space)
        assert scenario.partition("discrete") == Partition.discrete(scenario.space)
        assert scenario.partition("base") == scenario.base

    def test_generated_partition(self):
        scenario = load(minimal(partitions={"X": {"generated_by": ["x"]}}))
        assert scenario.partitions["X"].atom_blocks() == (("a", "c"), ("b",))

    def test_process(self):
        scenario = load(minimal(processes={"p": {"2": "x", "1": "x"}}))
        proc = scenario.process("p")
        assert proc.times == (1, 2)


class TestErrors:
    """Tests for the three error kinds and their field paths."""

    def test_malformed_json_position(self):
        with pytest.raises(ScenarioParseError) as excinfo:
            load_scenario('{\n  "name": "x",\n  oops\n}')
        assert excinfo.value.line == 3
        assert excinfo.value.column == 3
        assert "line 3, column 3" in str(excinfo.value)

    def test_float_weight(self):
        data = minimal(space={"atoms": ["a", "b"], "weights": [0.5, "1/2"]})
        with pytest.raises(ScenarioParseError) as excinfo:
            load(data)
        assert excinfo.value.field == "space.weights[0]"

    def test_weights_sum(self):
        data = minimal(space={"atoms": ["a", "b"], "weights": ["1/2", "2/5"]})
        with pytest.raises(ScenarioInvariantError, match="got 9/10") as excinfo:
            load(data)
        assert excinfo.value.field == "space.weights"

    def test_missing_space(self):
        with pytest.raises(ScenarioParseError, match="Missing field 'space'"):
            load({"name": "x"})

    def test_wrong_root_type(self):
        with pytest.raises(ScenarioParseError):
            load_scenario("[]")

    def test_format_version(self):
        with pytest.raises(ScenarioParseError) as excinfo:
            load(minimal(format_version=2))
        assert excinfo.value.field == "format_version"

    def test_unresolved_check_param(self):
        data = minimal(checks=[{"check": "markov", "params": {"process": "missing"}}])
        with pytest.raises(UnresolvedNameError) as excinfo:
            load(data)
        assert excinfo.value.name == "missing"
        assert excinfo.value.field == "checks[0].params.process"

    def test_unresolved_generator(self):
        data = minimal(partitions={"E": {"generated_by": ["y"]}})
        with pytest.raises(UnresolvedNameError) as excinfo:
            load(data)
        assert excinfo.value.field == "partitions.E.generated_by[0]"

    def test_unknown_atom_in_block(self):
        with pytest.raises(UnresolvedNameError):
            load(minimal(base=[["a", "b"], ["z"]]))

    def test_overlapping_blocks(self):
        with pytest.raises(ScenarioInvariantError) as excinfo:
            load(minimal(base=[["a", "b"], ["b", "c"]]))
        assert excinfo.value.field == "base"

    def test_unit_not_invariant(self):
        with pytest.raises(ScenarioInvariantError) as excinfo:
            load(minimal(unit=["1", "2", "1"]))
        assert excinfo.value.field == "unit"

    def test_reserved_name(self):
        with pytest.raises(ScenarioParseError, match="reserved"):
            load(minimal(partitions={"base": [["a", "b", "c"]]}))

    def test_element_length(self):
        with pytest.raises(ScenarioInvariantError) as excinfo:
            load(minimal(elements={"x": ["1"]}))
        assert excinfo.value.field == "elements.x"

    def test_non_integer_time(self):
        with pytest.raises(ScenarioParseError, match="not an integer"):
            load(minimal(processes={"p": {"one": "x"}}))

    def test_lookup_errors(self):
        scenario = load(minimal())
        with pytest.raises(UnresolvedNameError):
            scenario.element("nope")
        with pytest.raises(UnresolvedNameError):
            scenario.partition("nope")
        with pytest.raises(UnresolvedNameError):
            scenario.process("nope")


class TestDump:
    """Tests for the canonical form."""

    @pytest.mark.parametrize("name", ["two_coin", "non_markov"])
    def test_fixed_point(self, name):
        text = dump_scenario(load_bundled(name))
        assert dump_scenario(load_scenario(text)) == text

    def test_generated_scenario_keeps_seed(self):
        scenario = ScenarioGenerator(seed=5).scenario(max_atoms=6)
        text = dump_scenario(scenario)
        again = load_scenario(text)
        assert again.seed == 5
        assert dump_scenario(again) == text

    def test_walk_scenario(self):
        scenario = walk_scenario(3)
        assert scenario.name == "random_walk_3"
        assert [c.kind for c in scenario.checks] == [
            "brownian",
            "markov",
            "chapman_kolmogorov",
            "martingale",
            "bounded_sums",
        ]
        assert dump_scenario(load_scenario(dump_scenario(scenario))) == dump_scenario(scenario)

    def test_check_labels(self):
        assert CheckSpec("independence", {"second": "E2", "first": "E1"}).label == (
            "independence(first=E1, second=E2)"
        )
        assert CheckSpec("family_independence", {"partitions": ["E1", "E2"]}).label == (
            "family_independence(partitions=[E1,E2])"
        )

    def test_expect_only_when_given(self):
        assert "expect" not in CheckSpec("markov").to_dict()
        assert CheckSpec("markov", expect=False).to_dict()["expect"] is False
