"""
T-conditional independence of band projections, subspaces and families.

Band projections P and Q are T-conditionally independent when

    T·P·T·Q·e = T·P·Q·e = T·Q·T·P·e

for a T-invariant weak order unit e. Subspaces (partitions refining the range
of T) are independent when every pair of band projections with Pe, Qe in them
is. Each theorem relating this definition to conditional expectation
operators is exposed as its own checker, so the equivalences can be tested
against each other.
"""

import itertools
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Sequence

from riesz_core.condexp import (
    ConditionalExpectation,
    condexp_onto,
    matrices_equal,
    operator_matrix,
)
from riesz_core.errors import DomainError, ResourceCapError
from riesz_core.partitions import (
    Partition,
    check_refines,
    enumerate_band_projections,
    generated_partition,
    join,
    join_all,
)
from riesz_core.settings import (
    DEFAULT_CAP_BLOCKS,
    FAMILY_CAP,
    INDEPENDENCE_CAP_BLOCKS,
    MAX_PAIR_SIZE,
)
from riesz_core.space import BandProjection, RieszElement, is_weak_order_unit

logger = logging.getLogger(__name__)


def independence_sides(
    s: ConditionalExpectation, p: BandProjection, q: BandProjection, w: RieszElement
) -> tuple[RieszElement, RieszElement, RieszElement]:
    """The three elements S·P·S·Q·w, S·P·Q·w and S·Q·S·P·w."""
    return (
        s.apply(p.apply(s.apply(q.apply(w)))),
        s.apply(p.apply(q.apply(w))),
        s.apply(q.apply(s.apply(p.apply(w)))),
    )


@dataclass(frozen=True)
class BandWitness:
    """
    A pair of band projections for which the independence identity fails.

    Attributes:
        p: First band projection
        q: Second band projection
        w: Element the identity was evaluated at (the unit, or a range element)
        conditioning: The conditional expectation in the identity
        left: S·P·S·Q·w
        middle: S·P·Q·w
        right: S·Q·S·P·w
    """

    p: BandProjection
    q: BandProjection
    w: RieszElement
    conditioning: ConditionalExpectation
    left: RieszElement
    middle: RieszElement
    right: RieszElement

    def reevaluate(self) -> bool:
        """True iff recomputing the sides reproduces the recorded inequality."""
        sides = independence_sides(self.conditioning, self.p, self.q, self.w)
        return sides == (self.left, self.middle, self.right) and not (
            sides[0] == sides[1] == sides[2]
        )


@dataclass(frozen=True)
class OperatorMismatch:
    """An operator (or element) identity that fails, with both sides."""

    identity: str
    left: Any
    right: Any


@dataclass
class IndependenceVerdict:
    """
    Result of an independence check.

    Attributes:
        holds: Whether independence holds
        witness: First failing band projection pair, for band-level checks
        mismatch: First failing identity, for operator-level checks
        indices: Index subsets of the failing pair, for family checks
        checked: Number of identities evaluated
    """

    holds: bool
    witness: Optional[BandWitness] = None
    mismatch: Optional[OperatorMismatch] = None
    indices: Optional[tuple[tuple[int, ...], tuple[int, ...]]] = None
    checked: int = 0


def require_invariant_unit(t: ConditionalExpectation, e: RieszElement) -> None:
    """
    Raises:
        DomainError: Unless e is a weak order unit with T·e = e
    """
    if not (e.is_positive() and is_weak_order_unit(e)):
        raise DomainError(f"{e} is not a weak order unit")
    if not t.fixes(e):
        raise DomainError("unit not T-invariant")


def _compare(
    s: ConditionalExpectation, p: BandProjection, q: BandProjection, w: RieszElement
) -> Optional[BandWitness]:
    left, middle, right = independence_sides(s, p, q, w)
    if left == middle == right:
        return None
    return BandWitness(p, q, w, s, left, middle, right)


def bands_independent(
    t: ConditionalExpectation, p: BandProjection, q: BandProjection, e: RieszElement
) -> IndependenceVerdict:
    """
    Check T·P·T·Q·e = T·P·Q·e = T·Q·T·P·e exactly.

    Raises:
        DomainError: If e is not a T-invariant weak order unit
    """
    require_invariant_unit(t, e)
    witness = _compare(t, p, q, e)
    return IndependenceVerdict(holds=witness is None, witness=witness, checked=1)


def bands_independent_for_range(
    t: ConditionalExpectation, p: BandProjection, q: BandProjection
) -> IndependenceVerdict:
    """
    Check the independence identity with e replaced by every w in R(T).

    By linearity it suffices to test the block indicators of T's partition,
    which form a positive basis of R(T).
    """
    checked = 0
    for w in t.partition.block_indicators():
        checked += 1
        witness = _compare(t, p, q, w)
        if witness is not None:
            return IndependenceVerdict(holds=False, witness=witness, checked=checked)
    return IndependenceVerdict(holds=True, checked=checked)


def _require_contains_range(t: ConditionalExpectation, *parts: Partition) -> None:
    for part in parts:
        check_refines(part, t.partition, f"subspace {part} does not contain R(T)")


def _scan_pairs(
    s: ConditionalExpectation,
    e1: Partition,
    e2: Partition,
    unit: RieszElement,
    cap: int,
) -> IndependenceVerdict:
    firsts = list(enumerate_band_projections(e1, cap))
    seconds = list(enumerate_band_projections(e2, cap))
    checked = 0
    for p in firsts:
        for q in seconds:
            checked += 1
            witness = _compare(s, p, q, unit)
            if witness is not None:
                logger.info(f"Independence fails for {p} and {q}")
                return IndependenceVerdict(holds=False, witness=witness, checked=checked)
    logger.debug(f"Independence holds over {checked} projection pairs")
    return IndependenceVerdict(holds=True, checked=checked)


def subspaces_independent(
    t: ConditionalExpectation,
    e1: Partition,
    e2: Partition,
    unit: Optional[RieszElement] = None,
    cap: Optional[int] = None,
) -> IndependenceVerdict:
    """
    Check every pair (P, Q) with Pe in E1 and Qe in E2 for independence.

    Args:
        t: Base conditional expectation
        e1: First subspace, as a partition refining T's
        e2: Second subspace
        unit: T-invariant weak order unit (default: the constant one)
        cap: Block cap for each enumeration

    Raises:
        DomainError: If a subspace does not contain R(T) or the unit is invalid
        ResourceCapError: If a subspace has too many blocks
    """
    _require_contains_range(t, e1, e2)
    unit = t.space.ones() if unit is None else unit
    require_invariant_unit(t, unit)
    return _scan_pairs(t, e1, e2, unit, INDEPENDENCE_CAP_BLOCKS if cap is None else cap)


def bands_independent_via_subspaces(
    t: ConditionalExpectation,
    p: BandProjection,
    q: BandProjection,
    e: RieszElement,
    cap: Optional[int] = None,
) -> IndependenceVerdict:
    """Independence of P and Q decided on the subspaces generated by R(T) and Pe, Qe."""
    require_invariant_unit(t, e)
    e1 = generated_partition(t.partition, [p.apply(e)])
    e2 = generated_partition(t.partition, [q.apply(e)])
    return subspaces_independent(t, e1, e2, e, cap)


def independent_via_condexp(
    t: ConditionalExpectation, e1: Partition, e2: Partition
) -> IndependenceVerdict:
    """
    Check T1·T2 = T = T2·T1 where T_i is the conditional expectation onto E_i.

    Raises:
        DomainError: If a subspace does not contain R(T)
    """
    _require_contains_range(t, e1, e2)
    t1, t2 = condexp_onto(t, e1), condexp_onto(t, e2)
    products = (("T1·T2 = T", operator_matrix(t1, t2)), ("T2·T1 = T", operator_matrix(t2, t1)))
    for name, product in products:
        if not matrices_equal(product, t.matrix):
            return IndependenceVerdict(
                holds=False, mismatch=OperatorMismatch(name, product, t.matrix), checked=2
            )
    return IndependenceVerdict(holds=True, checked=2)


def independent_via_range_agreement(
    t: ConditionalExpectation, e1: Partition, e2: Partition
) -> IndependenceVerdict:
    """
    Check T_i·f = T·f for every f in E_{3-i}, i = 1, 2.

    Tested on the block indicators of E_{3-i}, a spanning set.
    """
    _require_contains_range(t, e1, e2)
    checked = 0
    sides = (
        ("T1·f = T·f", condexp_onto(t, e1), e2),
        ("T2·f = T·f", condexp_onto(t, e2), e1),
    )
    for name, ti, other in sides:
        for f in other.block_indicators():
            checked += 1
            left, right = ti.apply(f), t.apply(f)
            if left != right:
                return IndependenceVerdict(
                    holds=False,
                    mismatch=OperatorMismatch(f"{name} at f = {f}", left, right),
                    checked=checked,
                )
    return IndependenceVerdict(holds=True, checked=checked)


def require_dominates(s: ConditionalExpectation, t: ConditionalExpectation) -> None:
    """
    Raises:
        DomainError: Unless S·T = T
    """
    if not matrices_equal(operator_matrix(s, t), t.matrix):
        raise DomainError("S does not dominate T")


def independent_wrt_S(
    t: ConditionalExpectation,
    s: ConditionalExpectation,
    e1: Partition,
    e2: Partition,
) -> IndependenceVerdict:
    """
    Operator test for independence of E1 and E2 with respect to S.

    Checks T_i·T_J = T_i·S·T_J for i = 1, 2, where T_J is the conditional
    expectation onto the subspace generated by R(S) and E_{3-i}.

    Raises:
        DomainError: If S·T != T or a subspace does not contain R(T)
    """
    require_dominates(s, t)
    _require_contains_range(t, e1, e2)
    checked = 0
    for i, (mine, other) in enumerate(((e1, e2), (e2, e1)), start=1):
        ti = condexp_onto(t, mine)
        tj = condexp_onto(t, join(s.partition, other))
        left, right = operator_matrix(ti, tj), operator_matrix(ti, s, tj)
        checked += 1
        if not matrices_equal(left, right):
            return IndependenceVerdict(
                holds=False,
                mismatch=OperatorMismatch(f"T{i}·T_J = T{i}·S·T_J", left, right),
                checked=checked,
            )
    return IndependenceVerdict(holds=True, checked=checked)


def subspaces_independent_wrt(
    s: ConditionalExpectation,
    e1: Partition,
    e2: Partition,
    unit: Optional[RieszElement] = None,
    cap: Optional[int] = None,
) -> IndependenceVerdict:
    """Band-level test S·P·S·Q·e = S·P·Q·e = S·Q·S·P·e over all enumerated pairs."""
    unit = s.space.ones() if unit is None else unit
    require_invariant_unit(s, unit)
    return _scan_pairs(s, e1, e2, unit, INDEPENDENCE_CAP_BLOCKS if cap is None else cap)


def self_independent_projections(
    t: ConditionalExpectation, e: RieszElement, cap: Optional[int] = None
) -> list[BandProjection]:
    """
    Every band projection that is T-conditionally independent of itself.

    Scans all 2**|atoms| band projections; the result consists exactly of
    the projections onto unions of T's blocks.

    Raises:
        ResourceCapError: If the space has more atoms than the cap
    """
    require_invariant_unit(t, e)
    cap = DEFAULT_CAP_BLOCKS if cap is None else cap
    found = [
        p
        for p in enumerate_band_projections(Partition.discrete(t.space), cap)
        if _compare(t, p, p, e) is None
    ]
    logger.debug(f"{len(found)} self-independent band projections")
    return found


def index_pairs(count: int, max_pair_size: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """
    Unordered pairs of disjoint nonempty index subsets of size <= max_pair_size.

    Subsets are ordered by size then lexicographically; each pair appears once.
    """
    subsets = [
        combo
        for size in range(1, max_pair_size + 1)
        for combo in itertools.combinations(range(count), size)
    ]
    return [
        (a, b)
        for i, a in enumerate(subsets)
        for b in subsets[i + 1 :]
        if not set(a) & set(b)
    ]


def family_independent(
    t: ConditionalExpectation,
    parts: Sequence[Partition],
    max_pair_size: int = MAX_PAIR_SIZE,
    unit: Optional[RieszElement] = None,
    cap: Optional[int] = None,
    family_cap: int = FAMILY_CAP,
) -> IndependenceVerdict:
    """
    Check independence of a family: E_A and E_B for all disjoint index sets A, B.

    E_A is the subspace generated by the members indexed by A.

    Raises:
        DomainError: If a member does not contain R(T)
        ResourceCapError: If the family or a joined subspace is too large
    """
    if len(parts) > family_cap:
        raise ResourceCapError("family_cap", family_cap, len(parts))
    _require_contains_range(t, *parts)
    unit = t.space.ones() if unit is None else unit
    checked = 0
    for a, b in index_pairs(len(parts), max_pair_size):
        ea = join_all(t.partition, (parts[i] for i in a))
        eb = join_all(t.partition, (parts[i] for i in b))
        verdict = subspaces_independent(t, ea, eb, unit, cap)
        checked += verdict.checked
        if not verdict.holds:
            verdict.indices = (a, b)
            verdict.checked = checked
            return verdict
    return IndependenceVerdict(holds=True, checked=checked)


def sequence_independent(
    t: ConditionalExpectation,
    fs: Sequence[RieszElement],
    max_pair_size: int = MAX_PAIR_SIZE,
    unit: Optional[RieszElement] = None,
    cap: Optional[int] = None,
    family_cap: int = FAMILY_CAP,
) -> IndependenceVerdict:
    """Independence of a sequence: the family of subspaces generated by R(T) and each f_n."""
    parts = [generated_partition(t.partition, [f]) for f in fs]
    return family_independent(t, parts, max_pair_size, unit, cap, family_cap)


def invariant_units(t: ConditionalExpectation, count: int, seed: int = 0) -> list[RieszElement]:
    """
    Distinct strictly positive T-invariant units: the constant one, then random ones.

    T-invariant weak order units are exactly the strictly positive elements
    constant on T's blocks. Unit k takes a value strictly between k and k + 1
    on the first block, so any count yields distinct units.

    Raises:
        DomainError: If count is less than 1
    """
    if count < 1:
        raise DomainError(f"Need at least one unit, got {count}")
    rng = random.Random(seed)
    space = t.space
    owner = t.partition.block_of
    units = [space.ones()]
    for k in range(1, count):
        first = k + Fraction(rng.randint(1, 3), 4)
        rest = [Fraction(rng.randint(1, 9), rng.randint(1, 4)) for _ in t.partition.blocks[1:]]
        block_values = [first, *rest]
        units.append(space.element([block_values[owner[i]] for i in range(space.size)]))
    return units
