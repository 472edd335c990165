"""
Conditional expectation operators.

On a finite sample space every conditional expectation that commutes with the
base operator is a weighted block average over a partition: the value at an
atom is the mass-weighted mean of f over the atom's block. Operators carry
their partition; the matrix form is derived on demand for operator identities.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Union

import numpy as np
import sympy

from riesz_core.errors import DomainError, StructuralError
from riesz_core.partitions import Partition, check_refines, enumerate_band_projections
from riesz_core.space import (
    BandProjection,
    RieszElement,
    SampleSpace,
    e_mul,
    is_weak_order_unit,
    require_same_space,
    to_fraction,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConditionalExpectation:
    """
    Block-averaging projection onto the subspace of a partition.

    Positive, idempotent, strictly positive (all weights are nonzero) and fixes
    every block-constant element, in particular every T-invariant unit.

    Attributes:
        partition: The range, as the partition whose block-constant elements it holds

    Examples:
        >>> space = SampleSpace.uniform(4)
        >>> T = ConditionalExpectation(Partition.from_atoms(space, [["1", "2"], ["3", "4"]]))
        >>> str(T.apply(space.element([1, 3, 2, 6])))
        '(2, 2, 4, 4)'
    """

    partition: Partition

    @classmethod
    def expectation(cls, space: SampleSpace) -> "ConditionalExpectation":
        """The plain expectation: averaging over the trivial partition."""
        return cls(Partition.trivial(space))

    @classmethod
    def identity(cls, space: SampleSpace) -> "ConditionalExpectation":
        return cls(Partition.discrete(space))

    @property
    def space(self) -> SampleSpace:
        return self.partition.space

    def __str__(self) -> str:
        return f"T{self.partition}"

    @cached_property
    def _block_masses(self) -> tuple[Fraction, ...]:
        return tuple(self.space.mass(block) for block in self.partition.blocks)

    def apply(self, f: RieszElement) -> RieszElement:
        require_same_space(self.space, f.space)
        weights = self.space.weights
        averages = [
            sum((weights[i] * f.values[i] for i in block), Fraction(0)) / mass
            for block, mass in zip(self.partition.blocks, self._block_masses)
        ]
        owner = self.partition.block_of
        return RieszElement(self.space, tuple(averages[owner[i]] for i in range(self.space.size)))

    __call__ = apply

    def fixes(self, f: RieszElement) -> bool:
        return self.apply(f) == f

    @cached_property
    def matrix(self) -> np.ndarray:
        """Row ω, column ω': μ(ω')/μ(block(ω)) when ω' shares ω's block, else 0."""
        n = self.space.size
        m = np.full((n, n), Fraction(0), dtype=object)
        for block, mass in zip(self.partition.blocks, self._block_masses):
            for i in block:
                for j in block:
                    m[i, j] = self.space.weights[j] / mass
        return m


Factor = Union[ConditionalExpectation, BandProjection, np.ndarray]


def as_matrix(factor: Factor) -> np.ndarray:
    if isinstance(factor, (ConditionalExpectation, BandProjection)):
        return factor.matrix
    return factor


def operator_matrix(*factors: Factor) -> np.ndarray:
    """
    Matrix of the composition of the given operators, written left to right.

    ``operator_matrix(T, P)`` is the matrix of TP, which applies P first.
    """
    result = as_matrix(factors[0])
    for factor in factors[1:]:
        result = result @ as_matrix(factor)
    return result


def matrices_equal(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and bool((a == b).all())


def apply_matrix(m: np.ndarray, f: RieszElement) -> RieszElement:
    if m.shape != (f.space.size, f.space.size):
        raise StructuralError(f"Matrix of shape {m.shape} cannot act on {f.space.size} atoms")
    return RieszElement.from_array(f.space, m @ f.as_array())


def to_sympy(m: np.ndarray) -> sympy.Matrix:
    return sympy.Matrix(
        [[sympy.Rational(x.numerator, x.denominator) for x in row] for row in m.tolist()]
    )


def from_sympy(m: sympy.Matrix) -> np.ndarray:
    rows = [[Fraction(int(x.p), int(x.q)) for x in m.row(i)] for i in range(m.rows)]
    return np.array(rows, dtype=object)


@dataclass
class AxiomReport:
    """
    Outcome of checking a matrix against the conditional expectation axioms.

    Attributes:
        holds: True iff every axiom holds
        failures: Names of the failed axioms, in check order
        range_partition: Partition describing the range, when it could be derived
        strictly_positive: Whether f >= 0, Mf = 0 forces f = 0
        notes: Axioms that need no dynamic check, with the reason
    """

    holds: bool
    failures: list[str] = field(default_factory=list)
    range_partition: Optional[Partition] = None
    strictly_positive: bool = False
    notes: dict[str, str] = field(default_factory=dict)


def verify_axioms(matrix: np.ndarray, space: SampleSpace) -> AxiomReport:
    """
    Check whether a square rational matrix is a conditional expectation.

    Checks positivity, idempotence, that a weak order unit goes to a weak order
    unit, and that the range is a closed Riesz subspace: with u = M·1, the range
    must be exactly {u·h : h constant on blocks} for the partition grouping atoms
    on which every column of M has the same ratio to u. Order continuity holds
    for every positive operator in finite dimension and is only noted.

    Returns:
        AxiomReport; never raises for malformed input
    """
    n = space.size
    report = AxiomReport(holds=False)
    report.notes["order_continuity"] = "automatic in finite dimension"
    if getattr(matrix, "shape", None) != (n, n):
        report.failures.append("shape")
        return report
    try:
        m = np.array([[to_fraction(x) for x in row] for row in matrix.tolist()], dtype=object)
    except DomainError:
        report.failures.append("exactness")
        return report

    if any(x < 0 for x in m.flat):
        report.failures.append("positivity")
    if not matrices_equal(m @ m, m):
        report.failures.append("idempotence")

    u = RieszElement.from_array(space, m @ space.ones().as_array())
    unit_ok = u.is_positive() and is_weak_order_unit(u)
    if not unit_ok:
        report.failures.append("weak_order_unit")
    else:
        signatures: dict[tuple, list[int]] = {}
        for i in range(n):
            signatures.setdefault(tuple(m[i, j] / u[i] for j in range(n)), []).append(i)
        partition = Partition(space, tuple(tuple(g) for g in signatures.values()))
        if to_sympy(m).rank() == len(partition):
            report.range_partition = partition
        else:
            report.failures.append("range")

    report.strictly_positive = all(any(m[i, j] != 0 for i in range(n)) for j in range(n))
    report.holds = not report.failures
    logger.debug(f"Axiom check: failures={report.failures}")
    return report


def condexp_onto(t: ConditionalExpectation, f: Partition) -> ConditionalExpectation:
    """
    The unique conditional expectation T_F with range F and T·T_F = T = T_F·T.

    Raises:
        DomainError: If F does not refine the partition of T
    """
    require_same_space(t.space, f.space)
    check_refines(f, t.partition, "range does not contain R(T)")
    if f == t.partition:
        return t
    return ConditionalExpectation(f)


def verify_radon_nikodym(
    t: ConditionalExpectation,
    t_f: Union[ConditionalExpectation, np.ndarray],
    f: RieszElement,
    partition: Optional[Partition] = None,
    cap: Optional[int] = None,
) -> bool:
    """
    Check T·P·f = T·P·T_F·f for every band projection P with Pe in F.

    Args:
        t: The base conditional expectation
        t_f: The candidate for T_F, as an operator or a raw matrix
        f: Element to test
        partition: F; defaults to the candidate's partition
        cap: Block cap for the projection enumeration

    Raises:
        DomainError: If F does not contain R(T), or no partition is known
        ResourceCapError: If F has too many blocks
    """
    if partition is None:
        if not isinstance(t_f, ConditionalExpectation):
            raise DomainError("A partition is required for a raw candidate matrix")
        partition = t_f.partition
    check_refines(partition, t.partition, "range does not contain R(T)")
    image = apply_matrix(as_matrix(t_f), f)
    for p in enumerate_band_projections(partition, cap):
        if t.apply(p.apply(f)) != t.apply(p.apply(image)):
            logger.debug(f"Radon-Nikodym identity fails for {p}")
            return False
    return True


def solve_radon_nikodym(t: ConditionalExpectation, f: Partition) -> np.ndarray:
    """
    Solve the Radon-Nikodym system for T_F column by column.

    For each atom indicator x the unknown is y = Σ c_b 1_b in the subspace of
    F, constrained by T·P_b·y = T·P_b·x for every block b of F. Equations for
    unions of blocks are sums of these, so the system is complete. One row is
    kept per block of T since T's output is constant there.

    Returns:
        The unique solution as a matrix

    Raises:
        DomainError: If F does not contain R(T), or the solution is not unique
    """
    check_refines(f, t.partition, "range does not contain R(T)")
    space = t.space
    basis = f.block_indicators()
    projections = [BandProjection(space, frozenset(block)) for block in f.blocks]
    rows_of_t = [block[0] for block in t.partition.blocks]

    coefficients = []
    rhs = []
    for p in projections:
        columns = [t.apply(p.apply(b)) for b in basis]
        images = [t.apply(p.apply(space.indicator_of_indices([j]))) for j in range(space.size)]
        for r in rows_of_t:
            coefficients.append([c[r] for c in columns])
            rhs.append([img[r] for img in images])

    a = to_sympy(np.array(coefficients, dtype=object))
    b = to_sympy(np.array(rhs, dtype=object))
    if a.rank() != len(basis):
        raise DomainError("Radon-Nikodym system does not determine T_F uniquely")
    try:
        solution, free = a.gauss_jordan_solve(b)
    except ValueError:
        raise DomainError("Radon-Nikodym system is inconsistent") from None
    if free.shape[0] != 0:
        raise DomainError("Radon-Nikodym system does not determine T_F uniquely")
    c = from_sympy(solution)
    basis_matrix = np.array([list(v.values) for v in basis], dtype=object).T
    return basis_matrix @ c


@dataclass(frozen=True)
class FreudenthalRepresentation:
    """
    Approximation of a positive range element by band projections of the unit.

    ``coefficients`` and ``projections`` are the terms of the final stage;
    ``stages`` holds every partial approximation s_n = Σ_j a_j·Q_j·e.
    """

    target: RieszElement
    unit: RieszElement
    coefficients: tuple[Fraction, ...]
    projections: tuple[BandProjection, ...]
    stages: tuple[RieszElement, ...]

    def terms(self) -> list[tuple[Fraction, BandProjection]]:
        return list(zip(self.coefficients, self.projections))

    def value(self) -> RieszElement:
        total = self.target.space.zero()
        for a, q in self.terms():
            total = total + q.apply(self.unit) * a
        return total

    def errors(self) -> list[Fraction]:
        """max(w - s_n) for each stage."""
        return [(self.target - s).max() for s in self.stages]


def freudenthal(
    w: RieszElement,
    t: ConditionalExpectation,
    resolution: Optional[int] = None,
    unit: Optional[RieszElement] = None,
) -> FreudenthalRepresentation:
    """
    Write a positive element of R(T) through band projections applied to e.

    With ``resolution=None`` the representation is exact: one term per
    distinct positive value of w/e, accumulated in increasing order. With a
    resolution n the stages are the dyadic staircases s_0 <= ... <= s_n, where
    s_k has cut points a_j = j·max(w/e)·2^-k and max(w - s_k) <= max(e)·max(w/e)·2^-k.

    Raises:
        DomainError: If w is negative, not in R(T), or the unit is not T-invariant
    """
    space = require_same_space(w.space, t.space)
    unit = space.ones() if unit is None else unit
    if not w.is_positive():
        raise DomainError(f"Freudenthal target must be positive, got {w}")
    if not t.partition.contains(w):
        raise DomainError(f"Freudenthal target {w} is not in R(T)")
    if not (unit.is_positive() and is_weak_order_unit(unit) and t.fixes(unit)):
        raise DomainError(f"Unit {unit} is not a T-invariant weak order unit")
    if resolution is not None and resolution < 0:
        raise DomainError(f"Resolution must be non-negative, got {resolution}")

    ratio = [a / u for a, u in zip(w.values, unit.values)]

    def stage(levels: dict[Fraction, list[int]]):
        coefficients = tuple(sorted(a for a in levels if a > 0))
        projections = tuple(BandProjection(space, frozenset(levels[a])) for a in coefficients)
        return coefficients, projections

    def accumulate(coefficients, projections) -> RieszElement:
        total = space.zero()
        for a, q in zip(coefficients, projections):
            total = total + q.apply(unit) * a
        return total

    if resolution is None:
        levels: dict[Fraction, list[int]] = {}
        for i, r in enumerate(ratio):
            levels.setdefault(r, []).append(i)
        coefficients, projections = stage(levels)
        stages = []
        total = space.zero()
        for a, q in zip(coefficients, projections):
            total = total + q.apply(unit) * a
            stages.append(total)
        return FreudenthalRepresentation(w, unit, coefficients, projections, tuple(stages))

    top = max(ratio)
    stages = []
    coefficients: tuple[Fraction, ...] = ()
    projections: tuple[BandProjection, ...] = ()
    for k in range(resolution + 1):
        if top == 0:
            stages.append(space.zero())
            continue
        step = top / 2**k
        levels = {}
        for i, r in enumerate(ratio):
            levels.setdefault((r // step) * step, []).append(i)
        coefficients, projections = stage(levels)
        stages.append(accumulate(coefficients, projections))
    return FreudenthalRepresentation(w, unit, coefficients, projections, tuple(stages))


def commutes(t: ConditionalExpectation, p: BandProjection) -> bool:
    """True iff TP = PT as matrices."""
    require_same_space(t.space, p.space)
    return matrices_equal(operator_matrix(t, p), operator_matrix(p, t))


def is_averaging(
    t: ConditionalExpectation, f: RieszElement, g: RieszElement, e: RieszElement
) -> bool:
    """Averaging identity T(f ∘ Tg) = Tf ∘ Tg in the f-algebra with unit e."""
    tg = t.apply(g)
    return t.apply(e_mul(f, tg, e)) == e_mul(t.apply(f), tg, e)
