"""
Process constructors: product spaces, partial sums, martingales and Rademacher walks.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from riesz_core.condexp import ConditionalExpectation
from riesz_core.errors import DomainError, ResourceCapError, RieszError
from riesz_core.partitions import generated_partition, refines
from riesz_core.settings import MAX_PAIR_SIZE, WALK_CAP
from riesz_core.space import (
    RieszElement,
    SampleSpace,
    Scalar,
    e_mul,
    require_same_space,
    to_fraction,
)

from .independence import IndependenceVerdict, sequence_independent
from .markov import Process, is_markov, past_condexp

logger = logging.getLogger(__name__)

Outcome = tuple[Scalar, Scalar]

FAIR_COIN: tuple[Outcome, ...] = ((1, Fraction(1, 2)), (-1, Fraction(1, 2)))


@dataclass(frozen=True)
class ProductSpace:
    """
    Product of finite factors, carrying one coordinate element per factor.

    Atom identifiers are the outcome indices joined with ".", first factor
    varying slowest, so "0.1" is outcome 0 of factor one and outcome 1 of factor two.

    Attributes:
        factor_outcomes: Per factor, the (value, weight) pairs
        base: The product sample space
        coordinates: Value of each factor at every atom
    """

    factor_outcomes: tuple[tuple[tuple[Fraction, Fraction], ...], ...]
    base: SampleSpace = field(repr=False)
    coordinates: tuple[RieszElement, ...] = field(repr=False)

    @property
    def expectation(self) -> ConditionalExpectation:
        return ConditionalExpectation.expectation(self.base)

    def coordinates_independent(self, max_pair_size: int = MAX_PAIR_SIZE) -> IndependenceVerdict:
        """Independence of the coordinates with respect to the plain expectation."""
        return sequence_independent(
            self.expectation,
            self.coordinates,
            max_pair_size=max_pair_size,
            family_cap=max(len(self.coordinates), 1),
        )


def product_space(factors: Sequence[Sequence[Outcome]]) -> ProductSpace:
    """
    Build the product measure of the given factors.

    Args:
        factors: Per factor, a nonempty list of (value, weight) pairs with positive
            weights summing to 1

    Raises:
        DomainError: If a factor is empty or its weights are invalid

    Examples:
        >>> ps = product_space([FAIR_COIN, FAIR_COIN])
        >>> [str(c) for c in ps.coordinates]
        ['(1, 1, -1, -1)', '(1, -1, 1, -1)']
    """
    if not factors:
        raise DomainError("A product space needs at least one factor")
    outcomes = []
    for k, factor in enumerate(factors, start=1):
        if not factor:
            raise DomainError(f"Factor {k} has no outcomes")
        pairs = tuple((to_fraction(v), to_fraction(w)) for v, w in factor)
        if any(w <= 0 for _, w in pairs):
            raise DomainError(f"Factor {k} has a non-positive weight")
        total = sum((w for _, w in pairs), Fraction(0))
        if total != 1:
            raise DomainError(f"Factor {k} weights must sum to 1, got {total}")
        outcomes.append(pairs)

    indices = list(itertools.product(*(range(len(f)) for f in outcomes)))
    base = SampleSpace(
        tuple(".".join(map(str, idx)) for idx in indices),
        tuple(
            math.prod((outcomes[k][i][1] for k, i in enumerate(idx)), start=Fraction(1))
            for idx in indices
        ),
    )
    coordinates = tuple(
        base.element([outcomes[k][idx[k]][0] for idx in indices]) for k in range(len(outcomes))
    )
    logger.debug(f"Product of {len(outcomes)} factors has {base.size} atoms")
    return ProductSpace(tuple(outcomes), base, coordinates)


def cumulative(fs: Sequence[RieszElement]) -> list[RieszElement]:
    """Running sums f1, f1 + f2, ..."""
    if not fs:
        return []
    require_same_space(*(f.space for f in fs))
    return list(itertools.accumulate(fs))


def partial_sums(
    fs: Sequence[RieszElement], t: ConditionalExpectation, e: Optional[RieszElement] = None
) -> Process:
    """
    The process S_n = f1 + ... + fn at times 1..N.

    When fs is T-conditionally independent the result is Markov.

    Raises:
        StructuralError: If the elements live on different spaces
        DomainError: If e is not a T-invariant unit
    """
    sums = cumulative(fs)
    require_same_space(t.space, *(s.space for s in sums))
    e = t.space.ones() if e is None else e
    return Process(t, e, tuple(range(1, len(sums) + 1)), tuple(sums))


def generated_histories_agree(fs: Sequence[RieszElement], t: ConditionalExpectation) -> bool:
    """True iff R(T), S1..Sn and R(T), f1..fn generate the same subspace for every n."""
    sums = cumulative(fs)
    return all(
        generated_partition(t.partition, sums[:n]) == generated_partition(t.partition, fs[:n])
        for n in range(1, len(fs) + 1)
    )


def natural_filtration(proc: Process) -> list[ConditionalExpectation]:
    """The past operators at every time, an increasing family."""
    return [past_condexp(proc, s) for s in proc.times]


@dataclass(frozen=True)
class MartingaleWitness:
    i: int
    j: int
    left: RieszElement
    right: RieszElement


@dataclass
class MartingaleReport:
    holds: bool
    witness: Optional[MartingaleWitness] = None


def is_martingale(
    proc: Process, filtration: Optional[Sequence[ConditionalExpectation]] = None
) -> MartingaleReport:
    """
    Check F_i X_j = X_i for all times i <= j.

    Args:
        proc: The process
        filtration: One conditional expectation per time, increasing
            (default: the natural filtration)

    Raises:
        DomainError: If the filtration is not increasing or has the wrong length
    """
    filtration = natural_filtration(proc) if filtration is None else list(filtration)
    if len(filtration) != len(proc.times):
        raise DomainError(f"Filtration has {len(filtration)} operators for {len(proc.times)} times")
    for earlier, later in zip(filtration, filtration[1:]):
        if not refines(later.partition, earlier.partition):
            raise DomainError("non-monotone filtration")
    for a, (fi, xi) in enumerate(zip(filtration, proc.elements)):
        for b in range(a, len(proc.times)):
            left = fi.apply(proc.elements[b])
            if left != xi:
                i, j = proc.times[a], proc.times[b]
                logger.info(f"Martingale identity fails at i={i}, j={j}")
                return MartingaleReport(False, MartingaleWitness(i, j, left, xi))
    return MartingaleReport(True)


@dataclass
class BoundedSumReport:
    """
    Finite-horizon T-boundedness of partial sums.

    Attributes:
        running: T|S_n| for n = 1..horizon
        first_violation: First n with T|S_n| not below g
        mean_zero_violations: Indices i with T f_i != 0
    """

    running: list[RieszElement]
    first_violation: Optional[int] = None
    mean_zero_violations: list[int] = field(default_factory=list)

    @property
    def bound_holds(self) -> bool:
        return self.first_violation is None

    @property
    def holds(self) -> bool:
        return self.bound_holds and not self.mean_zero_violations


def bounded_sum_check(
    fs: Sequence[RieszElement], t: ConditionalExpectation, g: RieszElement, horizon: int
) -> BoundedSumReport:
    """
    Check T|f1 + ... + fn| <= g for n up to horizon.

    Convergence itself is not decided: finite sequences converge trivially.

    Raises:
        DomainError: If the horizon exceeds the number of elements
    """
    if not 0 <= horizon <= len(fs):
        raise DomainError(f"Horizon {horizon} outside 0..{len(fs)}")
    report = BoundedSumReport(running=[])
    report.mean_zero_violations = [
        i for i, f in enumerate(fs, start=1) if not t.apply(f).is_zero()
    ]
    for n, s in enumerate(cumulative(fs[:horizon]), start=1):
        bound = t.apply(s.abs())
        report.running.append(bound)
        if report.first_violation is None and not bound <= g:
            report.first_violation = n
    return report


@dataclass(frozen=True)
class BrownianProcess:
    """
    Partial sums f_n of increments g_i, with f_0 = 0.

    Attributes:
        process: The partial-sum process at times 1..N
        increments: g_1..g_N
    """

    process: Process
    increments: tuple[RieszElement, ...]

    @classmethod
    def from_increments(
        cls,
        t: ConditionalExpectation,
        increments: Sequence[RieszElement],
        e: Optional[RieszElement] = None,
    ) -> "BrownianProcess":
        return cls(partial_sums(increments, t, e), tuple(increments))

    @property
    def steps(self) -> int:
        return len(self.increments)

    def value(self, n: int) -> RieszElement:
        """f_n, with f_0 the zero element."""
        if n == 0:
            return self.process.space.zero()
        return self.process.at(n)


@dataclass
class BrownianReport:
    """
    The three increment axioms.

    Attributes:
        independence: Verdict of sequence independence of the increments
        mean_zero_violations: Indices i with T g_i != 0
        variance_violations: Pairs (n, m) with T(f_n - f_m)^2 != |n - m| e
    """

    independence: IndependenceVerdict
    mean_zero_violations: list[int] = field(default_factory=list)
    variance_violations: list[tuple[int, int]] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return (
            self.independence.holds
            and not self.mean_zero_violations
            and not self.variance_violations
        )


def verify_brownian(bp: BrownianProcess, max_pair_size: int = MAX_PAIR_SIZE) -> BrownianReport:
    """
    Check independence of increments, T g_i = 0, and T(f_n - f_m)^2 = |n - m| e for all n, m.

    Squares are taken in the f-algebra with unit e, which is pointwise when e = 1.
    """
    t, e = bp.process.t, bp.process.e
    report = BrownianReport(
        independence=sequence_independent(
            t, bp.increments, max_pair_size=max_pair_size, family_cap=max(bp.steps, 1)
        )
    )
    report.mean_zero_violations = [
        i for i, g in enumerate(bp.increments, start=1) if not t.apply(g).is_zero()
    ]
    for n in range(bp.steps + 1):
        for m in range(bp.steps + 1):
            d = bp.value(n) - bp.value(m)
            if t.apply(e_mul(d, d, e)) != e * abs(n - m):
                report.variance_violations.append((n, m))
    if not report.holds:
        logger.info(f"Brownian axioms fail: {report}")
    return report


def rademacher_walk(n: int, cap: int = WALK_CAP) -> BrownianProcess:
    """
    Fair +-1 increments on the product of n coins, with T the plain expectation and e = 1.

    Raises:
        DomainError: If n < 1
        ResourceCapError: If n exceeds the cap (the space has 2**n atoms)
    """
    if n < 1:
        raise DomainError(f"A walk needs at least one step, got {n}")
    if n > cap:
        raise ResourceCapError("walk_cap", cap, n)
    ps = product_space([FAIR_COIN] * n)
    bp = BrownianProcess.from_increments(ps.expectation, ps.coordinates)
    report = verify_brownian(bp)
    if not report.holds:
        raise RieszError(f"Rademacher walk failed its own axioms: {report}")
    return bp


def brownian_is_markov(bp: BrownianProcess) -> bool:
    """Markov verdict of the underlying process; a single step is trivially Markov."""
    if bp.steps < 2:
        return True
    return is_markov(bp.process).holds


def brownian_bounded(
    bp: BrownianProcess, g: RieszElement, horizon: Optional[int] = None
) -> BoundedSumReport:
    """T-boundedness of the walk up to the horizon (default: every step)."""
    return bounded_sum_check(
        bp.increments, bp.process.t, g, bp.steps if horizon is None else horizon
    )
