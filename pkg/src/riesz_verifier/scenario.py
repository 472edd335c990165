"""
Scenario files: a sample space, a base operator, named elements, partitions,
processes, and the checks to run on them.

Scenarios are JSON documents. Rationals are strings such as "2/3" (or plain
integers), so values survive serialization exactly:

    {
      "format_version": 1,
      "name": "two_coin",
      "space": {"atoms": ["1", "2", "3", "4"], "weights": ["1/4", "1/4", "1/4", "1/4"]},
      "base": [["1", "2", "3", "4"]],
      "unit": ["1", "1", "1", "1"],
      "elements": {"X1": ["1", "1", "-1", "-1"]},
      "partitions": {"E1": {"generated_by": ["X1"]}, "F": [["1", "2"], ["3", "4"]]},
      "processes": {"walk": {"1": "S1", "2": "S2"}},
      "checks": [{"check": "markov", "params": {"process": "walk"}, "expect": true}]
    }

"base" and "unit" are optional (trivial partition, constant one). A partition
is either a list of atom blocks or {"generated_by": [element names]}, the
subspace generated by R(T) and those elements. Partition references may also
use the reserved names "base", "trivial" and "discrete".

``dump_scenario`` writes the canonical form: sorted keys, two-space indent,
partitions as resolved blocks, rationals in lowest terms.
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Any, Optional

from riesz_core.condexp import ConditionalExpectation
from riesz_core.errors import (
    RieszError,
    ScenarioInvariantError,
    ScenarioParseError,
    UnresolvedNameError,
)
from riesz_core.partitions import Partition, generated_partition
from riesz_core.space import RieszElement, SampleSpace, format_fraction, to_fraction
from riesz_probability.independence import require_invariant_unit
from riesz_probability.markov import Process

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
RESERVED_PARTITIONS = ("base", "trivial", "discrete")


@dataclass(frozen=True)
class CheckSpec:
    """
    One requested check.

    Attributes:
        kind: Registered check name (see ``riesz_verifier.suite.CHECKS``)
        params: Check parameters, usually names defined by the scenario
        expect: Expected verdict; None means the identity is expected to hold
    """

    kind: str
    params: dict[str, Any] = field(default_factory=dict)
    expect: Optional[bool] = None

    @property
    def label(self) -> str:
        args = ", ".join(f"{k}={_label_value(v)}" for k, v in sorted(self.params.items()))
        return f"{self.kind}({args})"

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"check": self.kind, "params": dict(self.params)}
        if self.expect is not None:
            data["expect"] = self.expect
        return data


def _label_value(value: Any) -> str:
    if isinstance(value, list):
        return "[" + ",".join(map(str, value)) + "]"
    return str(value)


@dataclass
class Scenario:
    """
    A fully resolved scenario.

    Attributes:
        name: Scenario name, used in reports
        space: The sample space
        base: Partition of the base conditional expectation T
        unit: T-invariant weak order unit
        elements: Named elements
        partitions: Named partitions, resolved to blocks
        processes: Named processes, as time -> element name
        checks: Checks to run, in order
        description: Free text
        seed: Seed of the generator that produced the scenario, if any
    """

    name: str
    space: SampleSpace
    base: Partition
    unit: RieszElement
    elements: dict[str, RieszElement] = field(default_factory=dict)
    partitions: dict[str, Partition] = field(default_factory=dict)
    processes: dict[str, dict[int, str]] = field(default_factory=dict)
    checks: list[CheckSpec] = field(default_factory=list)
    description: str = ""
    seed: Optional[int] = None
    format_version: int = FORMAT_VERSION

    @property
    def t(self) -> ConditionalExpectation:
        return ConditionalExpectation(self.base)

    def element(self, name: str, where: str = "params") -> RieszElement:
        """
        Raises:
            UnresolvedNameError: If no element has this name
        """
        try:
            return self.elements[name]
        except (KeyError, TypeError):
            raise UnresolvedNameError(str(name), where) from None

    def partition(self, name: str, where: str = "params") -> Partition:
        """
        Resolve a partition name, including the reserved names.

        Raises:
            UnresolvedNameError: If no partition has this name
        """
        if name == "base":
            return self.base
        if name == "trivial":
            return Partition.trivial(self.space)
        if name == "discrete":
            return Partition.discrete(self.space)
        try:
            return self.partitions[name]
        except (KeyError, TypeError):
            raise UnresolvedNameError(str(name), where) from None

    def process(self, name: str, where: str = "params") -> Process:
        """
        Build a fresh Process for a named process definition.

        Raises:
            UnresolvedNameError: If the process or one of its elements is undefined
        """
        try:
            definition = self.processes[name]
        except (KeyError, TypeError):
            raise UnresolvedNameError(str(name), where) from None
        elements = {
            time: self.element(ref, f"processes.{name}.{time}") for time, ref in definition.items()
        }
        return Process.of(self.t, elements, self.unit)

    def to_dict(self) -> dict[str, Any]:
        def values(f: RieszElement) -> list[str]:
            return [format_fraction(v) for v in f.values]

        data: dict[str, Any] = {
            "format_version": self.format_version,
            "name": self.name,
            "description": self.description,
            "space": {
                "atoms": list(self.space.atoms),
                "weights": [format_fraction(w) for w in self.space.weights],
            },
            "base": [list(b) for b in self.base.atom_blocks()],
            "unit": values(self.unit),
            "elements": {name: values(f) for name, f in self.elements.items()},
            "partitions": {
                name: [list(b) for b in p.atom_blocks()] for name, p in self.partitions.items()
            },
            "processes": {
                name: {str(time): ref for time, ref in sorted(d.items())}
                for name, d in self.processes.items()
            },
            "checks": [c.to_dict() for c in self.checks],
        }
        if self.seed is not None:
            data["seed"] = self.seed
        return data

    @classmethod
    def from_dict(cls, data: Any) -> "Scenario":
        """
        Resolve a decoded scenario document.

        Raises:
            ScenarioParseError: For missing fields, wrong types or malformed rationals
            UnresolvedNameError: For references to undefined names
            ScenarioInvariantError: For values that violate domain invariants
        """
        return _Resolver(data).resolve()


def _rational(value: Any, where: str) -> Fraction:
    if isinstance(value, float):
        raise ScenarioParseError(f"Inexact number {value!r}; write rationals as \"p/q\"", where)
    try:
        return to_fraction(value)
    except RieszError:
        raise ScenarioParseError(f"Not an exact rational: {value!r}", where) from None


def _require(mapping: dict, key: str, kind: type, where: str) -> Any:
    if key not in mapping:
        raise ScenarioParseError(f"Missing field '{key}'", where)
    return _typed(mapping[key], kind, f"{where}.{key}" if where else key)


def _typed(value: Any, kind: type, where: str) -> Any:
    if not isinstance(value, kind):
        raise ScenarioParseError(f"Expected {kind.__name__}, got {type(value).__name__}", where)
    return value


class _Resolver:
    """Turns a decoded document into a Scenario, naming the field of every problem."""

    def __init__(self, data: Any):
        self.data = _typed(data, dict, "<root>")

    def resolve(self) -> Scenario:
        data = self.data
        version = data.get("format_version", FORMAT_VERSION)
        if version != FORMAT_VERSION:
            raise ScenarioParseError(
                f"Unsupported format_version {version!r}, expected {FORMAT_VERSION}",
                "format_version",
            )
        name = _typed(data.get("name", "scenario"), str, "name")
        description = _typed(data.get("description", ""), str, "description")
        seed = data.get("seed")
        if seed is not None:
            _typed(seed, int, "seed")

        space = self._space(_require(data, "space", dict, ""))
        base = self._blocks(space, data.get("base"), "base") if "base" in data else None
        base = Partition.trivial(space) if base is None else base
        unit = self._unit(space, base, data.get("unit"))
        elements = {
            key: self._element(space, value, f"elements.{key}")
            for key, value in _typed(data.get("elements", {}), dict, "elements").items()
        }
        partitions = {}
        for key, value in _typed(data.get("partitions", {}), dict, "partitions").items():
            if key in RESERVED_PARTITIONS:
                raise ScenarioParseError(
                    f"'{key}' is a reserved partition name", f"partitions.{key}"
                )
            partitions[key] = self._partition(space, base, elements, value, f"partitions.{key}")
        processes = {
            key: self._process(elements, value, f"processes.{key}")
            for key, value in _typed(data.get("processes", {}), dict, "processes").items()
        }
        checks = [
            self._check(value, f"checks[{i}]")
            for i, value in enumerate(_typed(data.get("checks", []), list, "checks"))
        ]
        scenario = Scenario(
            name=name,
            space=space,
            base=base,
            unit=unit,
            elements=elements,
            partitions=partitions,
            processes=processes,
            checks=checks,
            description=description,
            seed=seed,
        )
        self._validate_processes(scenario)
        logger.debug(
            f"Resolved scenario {name!r}: {space.size} atoms, {len(elements)} elements, "
            f"{len(checks)} checks"
        )
        return scenario

    def _space(self, spec: dict) -> SampleSpace:
        atoms = _require(spec, "atoms", list, "space")
        weights = _require(spec, "weights", list, "space")
        for i, atom in enumerate(atoms):
            _typed(atom, str, f"space.atoms[{i}]")
        masses = [_rational(w, f"space.weights[{i}]") for i, w in enumerate(weights)]
        try:
            return SampleSpace(tuple(atoms), tuple(masses))
        except RieszError as e:
            raise ScenarioInvariantError(str(e), "space.weights") from None

    def _blocks(self, space: SampleSpace, blocks: Any, where: str) -> Partition:
        _typed(blocks, list, where)
        for i, block in enumerate(blocks):
            _typed(block, list, f"{where}[{i}]")
            for j, atom in enumerate(block):
                _typed(atom, str, f"{where}[{i}][{j}]")
                if atom not in space.atoms:
                    raise UnresolvedNameError(atom, f"{where}[{i}][{j}]")
        try:
            return Partition.from_atoms(space, blocks)
        except RieszError as e:
            raise ScenarioInvariantError(str(e), where) from None

    def _element(self, space: SampleSpace, values: Any, where: str) -> RieszElement:
        _typed(values, list, where)
        parsed = [_rational(v, f"{where}[{i}]") for i, v in enumerate(values)]
        try:
            return space.element(parsed)
        except RieszError as e:
            raise ScenarioInvariantError(str(e), where) from None

    def _unit(self, space: SampleSpace, base: Partition, values: Any) -> RieszElement:
        if values is None:
            return space.ones()
        unit = self._element(space, values, "unit")
        try:
            require_invariant_unit(ConditionalExpectation(base), unit)
        except RieszError as e:
            raise ScenarioInvariantError(str(e), "unit") from None
        return unit

    def _partition(
        self,
        space: SampleSpace,
        base: Partition,
        elements: dict[str, RieszElement],
        spec: Any,
        where: str,
    ) -> Partition:
        if isinstance(spec, dict):
            names = _require(spec, "generated_by", list, where)
            xs = []
            for i, ref in enumerate(names):
                if ref not in elements:
                    raise UnresolvedNameError(str(ref), f"{where}.generated_by[{i}]")
                xs.append(elements[ref])
            return generated_partition(base, xs)
        return self._blocks(space, spec, where)

    def _process(self, elements: dict[str, RieszElement], spec: Any, where: str) -> dict[int, str]:
        _typed(spec, dict, where)
        if not spec:
            raise ScenarioParseError("A process needs at least one time", where)
        result = {}
        for key, ref in spec.items():
            try:
                time = int(key)
            except ValueError:
                raise ScenarioParseError(f"Time {key!r} is not an integer", where) from None
            _typed(ref, str, f"{where}.{key}")
            if ref not in elements:
                raise UnresolvedNameError(ref, f"{where}.{key}")
            result[time] = ref
        return dict(sorted(result.items()))

    def _check(self, spec: Any, where: str) -> CheckSpec:
        _typed(spec, dict, where)
        kind = _require(spec, "check", str, where)
        params = _typed(spec.get("params", {}), dict, f"{where}.params")
        expect = spec.get("expect")
        if expect is not None:
            _typed(expect, bool, f"{where}.expect")
        self._check_names(params, f"{where}.params")
        return CheckSpec(kind, params, expect)

    def _check_names(self, params: dict, where: str) -> None:
        elements = self.data.get("elements", {})
        partitions = set(self.data.get("partitions", {})) | set(RESERVED_PARTITIONS)
        processes = self.data.get("processes", {})
        refs = {
            "element": elements,
            "bound": elements,
            "elements": elements,
            "increments": elements,
            "first": partitions,
            "second": partitions,
            "partition": partitions,
            "conditioning": partitions,
            "partitions": partitions,
            "process": processes,
        }
        for key, value in params.items():
            known = refs.get(key)
            if known is None:
                continue
            for ref in value if isinstance(value, list) else [value]:
                if ref not in known:
                    raise UnresolvedNameError(str(ref), f"{where}.{key}")

    def _validate_processes(self, scenario: Scenario) -> None:
        for name in scenario.processes:
            try:
                scenario.process(name)
            except RieszError as e:
                if isinstance(e, UnresolvedNameError):
                    raise
                raise ScenarioInvariantError(str(e), f"processes.{name}") from None


def load_scenario(text: str) -> Scenario:
    """
    Parse scenario text.

    Raises:
        ScenarioParseError: With line and column for malformed JSON
        UnresolvedNameError: For references to undefined names
        ScenarioInvariantError: For invariant violations
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioParseError(e.msg, line=e.lineno, column=e.colno) from None
    return Scenario.from_dict(data)


def dump_scenario(scenario: Scenario) -> str:
    """Canonical text of a scenario; loading it back gives an identical scenario."""
    return json.dumps(scenario.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def bundled_scenarios() -> list[str]:
    """Names of the scenarios shipped with the package."""
    root = resources.files("riesz_verifier.scenarios")
    suffix = ".scenario"
    return sorted(p.name.removesuffix(suffix) for p in root.iterdir() if p.name.endswith(suffix))


def load_bundled(name: str) -> Scenario:
    """
    Load a scenario shipped with the package, by name without extension.

    Raises:
        ScenarioParseError: If no such scenario is bundled
    """
    path = resources.files("riesz_verifier.scenarios") / f"{name}.scenario"
    if not path.is_file():
        raise ScenarioParseError(f"No bundled scenario named {name!r}")
    return load_scenario(path.read_text(encoding="utf-8"))
