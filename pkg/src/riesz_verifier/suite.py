"""
Verification suite runner.

Every check kind a scenario may request is a function registered in
``CHECKS``. A check returns a ``CheckOutcome``: its verdict, the details that
go into the report, an optional witness, and whether the characterizations
it compares agreed. Errors raised by a check are captured into its result
and never stop the suite.
"""

import asyncio
import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from riesz_core.condexp import (
    ConditionalExpectation,
    condexp_onto,
    freudenthal,
    matrices_equal,
    solve_radon_nikodym,
    verify_axioms,
    verify_radon_nikodym,
)
from riesz_core.errors import DomainError, ResourceCapError, RieszError
from riesz_core.partitions import enumerate_band_projections
from riesz_core.settings import Settings
from riesz_probability.independence import (
    family_independent,
    independent_via_condexp,
    independent_via_range_agreement,
    independent_wrt_S,
    invariant_units,
    self_independent_projections,
    sequence_independent,
    subspaces_independent,
    subspaces_independent_wrt,
)
from riesz_probability.markov import (
    chapman_kolmogorov_all,
    future_products,
    is_markov,
    markov_equivalence,
)
from riesz_probability.processes import (
    BrownianProcess,
    bounded_sum_check,
    brownian_is_markov,
    generated_histories_agree,
    is_martingale,
    partial_sums,
    verify_brownian,
)

from .oracles import (
    oracle_classical_independence,
    oracle_classical_markov,
    oracle_projection_condexp,
)
from .report import CheckResult, SuiteReport, describe_witness, to_plain
from .scenario import CheckSpec, Scenario

logger = logging.getLogger(__name__)


@dataclass
class CheckOutcome:
    """
    Raw result of a check function.

    Attributes:
        holds: The verdict of the identity under test
        details: Values to report
        witness: Counterexample dataclass, if any
        consistent: False when characterizations that must agree did not
    """

    holds: bool
    details: dict[str, Any] = field(default_factory=dict)
    witness: Any = None
    consistent: bool = True


CheckFunction = Callable[[Scenario, dict[str, Any], Settings], CheckOutcome]

CHECKS: dict[str, CheckFunction] = {}


def check(name: str) -> Callable[[CheckFunction], CheckFunction]:
    """Register a check function under a scenario check name."""

    def register(func: CheckFunction) -> CheckFunction:
        CHECKS[name] = func
        return func

    return register


def _int_param(params: dict[str, Any], name: str, default: int) -> int:
    """
    Raises:
        DomainError: If the value is not an integer or an integer string
    """
    value = params.get(name, default)
    if isinstance(value, (bool, float)):
        raise DomainError(f"Parameter '{name}' must be an integer, got {value!r}")
    try:
        return int(value)
    except (TypeError, ValueError):
        raise DomainError(f"Parameter '{name}' must be an integer, got {value!r}") from None


def _names(params: dict[str, Any], name: str) -> list[str]:
    value = params[name]
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise DomainError(f"Parameter '{name}' must be a list of names, got {value!r}")
    return value


def _conditioning(scenario: Scenario, params: dict[str, Any]):
    name = params.get("conditioning")
    if name is None:
        return scenario.t, scenario.unit
    t = ConditionalExpectation(scenario.partition(name, "params.conditioning"))
    return t, t.space.ones()


@check("independence")
def check_independence(
    scenario: Scenario, params: dict[str, Any], settings: Settings
) -> CheckOutcome:
    t, unit = _conditioning(scenario, params)
    e1 = scenario.partition(params["first"], "params.first")
    e2 = scenario.partition(params["second"], "params.second")
    cap = settings.independence_cap_blocks
    band = subspaces_independent(t, e1, e2, unit, cap)
    via_condexp = independent_via_condexp(t, e1, e2)
    via_range = independent_via_range_agreement(t, e1, e2)
    classical = oracle_classical_independence(scenario.space, e1, e2, t.partition, cap)
    verdicts = {
        "band": band.holds,
        "condexp": via_condexp.holds,
        "range_agreement": via_range.holds,
        "classical": classical,
    }
    return CheckOutcome(
        holds=band.holds,
        details=verdicts,
        witness=band.witness or via_condexp.mismatch,
        consistent=len(set(verdicts.values())) == 1,
    )


@check("independence_wrt")
def check_independence_wrt(
    scenario: Scenario, params: dict[str, Any], settings: Settings
) -> CheckOutcome:
    t = scenario.t
    s = ConditionalExpectation(scenario.partition(params["conditioning"], "params.conditioning"))
    e1 = scenario.partition(params["first"], "params.first")
    e2 = scenario.partition(params["second"], "params.second")
    cap = settings.independence_cap_blocks
    operator = independent_wrt_S(t, s, e1, e2)
    band = subspaces_independent_wrt(s, e1, e2, cap=cap)
    verdicts = {
        "operator": operator.holds,
        "band": band.holds,
        "classical": oracle_classical_independence(scenario.space, e1, e2, s.partition, cap),
    }
    return CheckOutcome(
        holds=operator.holds,
        details=verdicts,
        witness=operator.mismatch or band.witness,
        consistent=len(set(verdicts.values())) == 1,
    )


@check("unit_invariance")
def check_unit_invariance(
    scenario: Scenario, params: dict[str, Any], settings: Settings
) -> CheckOutcome:
    t = scenario.t
    e1 = scenario.partition(params["first"], "params.first")
    e2 = scenario.partition(params["second"], "params.second")
    units = invariant_units(
        t, _int_param(params, "units", 3), _int_param(params, "seed", settings.seed)
    )
    verdicts = [
        subspaces_independent(t, e1, e2, u, settings.independence_cap_blocks).holds for u in units
    ]
    return CheckOutcome(
        holds=len(set(verdicts)) == 1,
        details={"units": [str(u) for u in units], "verdicts": verdicts},
    )


@check("self_independence")
def check_self_independence(
    scenario: Scenario, params: dict[str, Any], settings: Settings
) -> CheckOutcome:
    t = scenario.t
    found = {p.support for p in self_independent_projections(t, scenario.unit, settings.cap_blocks)}
    expected = {p.support for p in enumerate_band_projections(t.partition, settings.cap_blocks)}
    return CheckOutcome(
        holds=found == expected,
        details={"self_independent": len(found), "unions_of_blocks": len(expected)},
    )


@check("radon_nikodym")
def check_radon_nikodym(
    scenario: Scenario, params: dict[str, Any], settings: Settings
) -> CheckOutcome:
    t = scenario.t
    f = scenario.partition(params["partition"], "params.partition")
    t_f = condexp_onto(t, f)
    solved = solve_radon_nikodym(t, f)
    oracle = oracle_projection_condexp(scenario.space, f)
    identity = all(
        verify_radon_nikodym(t, t_f, x, cap=settings.cap_blocks)
        for x in (scenario.space.indicator_of_indices([i]) for i in range(scenario.space.size))
    )
    details = {
        "identity": identity,
        "unique_solution_is_block_average": matrices_equal(solved, t_f.matrix),
        "normal_equations_agree": matrices_equal(oracle, t_f.matrix),
    }
    return CheckOutcome(holds=all(details.values()), details=details)


@check("condexp_axioms")
def check_condexp_axioms(
    scenario: Scenario, params: dict[str, Any], settings: Settings
) -> CheckOutcome:
    partition = scenario.partition(params.get("partition", "base"), "params.partition")
    report = verify_axioms(ConditionalExpectation(partition).matrix, scenario.space)
    return CheckOutcome(
        holds=report.holds,
        details={
            "failures": report.failures,
            "strictly_positive": report.strictly_positive,
            "range": to_plain(report.range_partition),
        },
    )


@check("freudenthal")
def check_freudenthal(
    scenario: Scenario, params: dict[str, Any], settings: Settings
) -> CheckOutcome:
    w = scenario.element(params["element"], "params.element")
    t = scenario.t
    exact = freudenthal(w, t, unit=scenario.unit)
    resolution = _int_param(params, "resolution", 4)
    staircase = freudenthal(w, t, resolution=resolution, unit=scenario.unit)
    errors = staircase.errors()
    stages = staircase.stages
    monotone = all(a <= b for a, b in zip(stages, stages[1:]))
    top = max(a / u for a, u in zip(w.values, scenario.unit.values))
    bound = scenario.unit.max() * top
    bounded = all(err <= bound / 2**k for k, err in enumerate(errors))
    details = {
        "exact": exact.value() == w,
        "monotone": monotone,
        "error_bound": bounded,
        "errors": [to_plain(err) for err in errors],
    }
    return CheckOutcome(
        holds=details["exact"] and monotone and bounded, details=details
    )


def _first_counterexample(*reports) -> Any:
    for report in reports:
        if not report.holds and report.counterexample is not None:
            return report.counterexample
    return None


@check("markov")
def check_markov(
    scenario: Scenario, params: dict[str, Any], settings: Settings
) -> CheckOutcome:
    proc = scenario.process(params["process"], "params.process")
    report = markov_equivalence(proc, settings.cap_blocks)
    verdicts = dict(report.verdicts)
    verdicts["classical"] = oracle_classical_markov(proc.space, proc.t.partition, proc.elements)
    witness = _first_counterexample(
        report.markov, report.operator_form, report.rao_ii, report.rao_iii
    )
    return CheckOutcome(
        holds=report.markov.holds,
        details=verdicts,
        witness=witness,
        consistent=len(set(verdicts.values())) == 1,
    )


@check("future_products")
def check_future_products(
    scenario: Scenario, params: dict[str, Any], settings: Settings
) -> CheckOutcome:
    proc = scenario.process(params["process"], "params.process")
    report = future_products(proc, settings.future_cap, settings.cap_blocks)
    markov = is_markov(proc, settings.cap_blocks)
    return CheckOutcome(
        holds=report.holds,
        details={
            "future_products": report.holds,
            "markov": markov.holds,
            "checked": report.checked,
        },
        witness=report.counterexample,
        consistent=report.holds == markov.holds,
    )


@check("chapman_kolmogorov")
def check_chapman_kolmogorov(
    scenario: Scenario, params: dict[str, Any], settings: Settings
) -> CheckOutcome:
    proc = scenario.process(params["process"], "params.process")
    report = chapman_kolmogorov_all(proc)
    markov = is_markov(proc, settings.cap_blocks).holds if len(proc.times) > 1 else True
    return CheckOutcome(
        holds=report.holds,
        details={"chapman_kolmogorov": report.holds, "markov": markov, "checked": report.checked},
        witness=report.counterexample,
        consistent=report.holds or not markov,
    )


@check("martingale")
def check_martingale(
    scenario: Scenario, params: dict[str, Any], settings: Settings
) -> CheckOutcome:
    proc = scenario.process(params["process"], "params.process")
    report = is_martingale(proc)
    return CheckOutcome(
        holds=report.holds, details={"martingale": report.holds}, witness=report.witness
    )


@check("partial_sums")
def check_partial_sums(
    scenario: Scenario, params: dict[str, Any], settings: Settings
) -> CheckOutcome:
    fs = [scenario.element(name, "params.elements") for name in _names(params, "elements")]
    t = scenario.t
    proc = partial_sums(fs, t, scenario.unit)
    independent = sequence_independent(
        t, fs, settings.max_pair_size, scenario.unit, settings.independence_cap_blocks,
        max(settings.family_cap, len(fs)),
    ).holds
    markov = is_markov(proc, settings.cap_blocks).holds if len(fs) > 1 else True
    histories = generated_histories_agree(fs, t)
    return CheckOutcome(
        holds=markov and histories,
        details={"independent": independent, "markov": markov, "histories_agree": histories},
        consistent=markov or not independent,
    )


@check("family_independence")
def check_family_independence(
    scenario: Scenario, params: dict[str, Any], settings: Settings
) -> CheckOutcome:
    parts = [
        scenario.partition(name, "params.partitions") for name in _names(params, "partitions")
    ]
    verdict = family_independent(
        scenario.t,
        parts,
        settings.max_pair_size,
        scenario.unit,
        settings.independence_cap_blocks,
        settings.family_cap,
    )
    details: dict[str, Any] = {"independent": verdict.holds, "checked": verdict.checked}
    if verdict.indices is not None:
        details["indices"] = [list(verdict.indices[0]), list(verdict.indices[1])]
    return CheckOutcome(holds=verdict.holds, details=details, witness=verdict.witness)


@check("sequence_independence")
def check_sequence_independence(
    scenario: Scenario, params: dict[str, Any], settings: Settings
) -> CheckOutcome:
    fs = [scenario.element(name, "params.elements") for name in _names(params, "elements")]
    verdict = sequence_independent(
        scenario.t,
        fs,
        settings.max_pair_size,
        scenario.unit,
        settings.independence_cap_blocks,
        settings.family_cap,
    )
    return CheckOutcome(
        holds=verdict.holds,
        details={"independent": verdict.holds, "checked": verdict.checked},
        witness=verdict.witness,
    )


@check("bounded_sums")
def check_bounded_sums(
    scenario: Scenario, params: dict[str, Any], settings: Settings
) -> CheckOutcome:
    fs = [scenario.element(name, "params.elements") for name in _names(params, "elements")]
    g = scenario.element(params["bound"], "params.bound")
    report = bounded_sum_check(fs, scenario.t, g, _int_param(params, "horizon", len(fs)))
    return CheckOutcome(
        holds=report.holds,
        details={
            "running": [str(x) for x in report.running],
            "first_violation": report.first_violation,
            "mean_zero_violations": report.mean_zero_violations,
        },
    )


@check("brownian")
def check_brownian(
    scenario: Scenario, params: dict[str, Any], settings: Settings
) -> CheckOutcome:
    increments = [
        scenario.element(name, "params.increments") for name in _names(params, "increments")
    ]
    bp = BrownianProcess.from_increments(scenario.t, increments, scenario.unit)
    report = verify_brownian(bp, settings.max_pair_size)
    markov = brownian_is_markov(bp)
    return CheckOutcome(
        holds=report.holds and markov,
        details={
            "independent_increments": report.independence.holds,
            "mean_zero_violations": report.mean_zero_violations,
            "variance_violations": [list(p) for p in report.variance_violations],
            "markov": markov,
        },
        witness=report.independence.witness,
        consistent=markov or not report.holds,
    )


def _status(spec: CheckSpec, outcome: CheckOutcome) -> str:
    expected = True if spec.expect is None else spec.expect
    return "pass" if outcome.consistent and outcome.holds == expected else "fail"


def run_check(scenario: Scenario, index: int, spec: CheckSpec, settings: Settings) -> CheckResult:
    """Run one check, capturing any toolkit error into the result."""
    result = CheckResult(index=index, label=spec.label, kind=spec.kind, status="error")
    started = time.perf_counter()
    try:
        func = CHECKS.get(spec.kind)
        if func is None:
            result.message = f"Unknown check '{spec.kind}'"
        else:
            outcome = func(scenario, spec.params, settings)
            result.status = _status(spec, outcome)
            result.details = to_plain(outcome.details)
            if not outcome.consistent:
                result.details["consistent"] = False
            if spec.expect is not None:
                result.details["expect"] = spec.expect
            if result.status == "fail" or not outcome.holds:
                result.witness = describe_witness(outcome.witness)
    except ResourceCapError as e:
        result.status = "cap_exceeded"
        result.message = str(e)
    except (RieszError, KeyError) as e:
        result.message = f"missing parameter {e}" if isinstance(e, KeyError) else str(e)
    except (ValueError, TypeError, ArithmeticError) as e:
        logger.warning(f"{result.key}: {type(e).__name__}: {e}")
        result.message = f"{type(e).__name__}: {e}"
    result.elapsed = time.perf_counter() - started
    logger.info(f"{result.key}: {result.status} ({result.elapsed:.3f}s)")
    return result


def _report(scenario: Scenario, results: list[CheckResult]) -> SuiteReport:
    return SuiteReport(
        scenario=scenario.name,
        results=results,
        seed=scenario.seed,
        format_version=scenario.format_version,
    )


def run_suite(scenario: Scenario, settings: Optional[Settings] = None) -> SuiteReport:
    """Run every check of the scenario in order."""
    settings = Settings() if settings is None else settings
    results = [run_check(scenario, i, spec, settings) for i, spec in enumerate(scenario.checks, 1)]
    return _report(scenario, results)


async def run_suite_async(scenario: Scenario, settings: Optional[Settings] = None) -> SuiteReport:
    """Run the checks concurrently in worker threads; results keep scenario order."""
    settings = Settings() if settings is None else settings
    tasks = [
        asyncio.to_thread(run_check, scenario, i, spec, settings)
        for i, spec in enumerate(scenario.checks, 1)
    ]
    results = await asyncio.gather(*tasks)
    return _report(scenario, list(results))
