"""
Finite Riesz spaces with exact rational arithmetic.

A ``SampleSpace`` is a finite set of weighted atoms. The Riesz space over it is
the set of rational-valued functions on the atoms with the pointwise order;
``RieszElement`` is one such function. Band projections act by multiplying with
the indicator of a set of atoms.

All arithmetic uses ``fractions.Fraction``. Floats are rejected at the boundary
so no value is ever rounded.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from riesz_core.errors import DomainError, StructuralError

logger = logging.getLogger(__name__)

Scalar = Union[int, str, Fraction]


def to_fraction(value: Scalar) -> Fraction:
    """
    Convert an exact scalar to a Fraction.

    Accepts ints, Fractions and strings such as ``"2/3"`` or ``"-4"``.

    Raises:
        DomainError: For floats, bools or malformed strings
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError(f"Not an exact rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise DomainError(f"Not an exact rational: {value!r}") from None
    raise DomainError(f"Not an exact rational: {value!r}")


def format_fraction(value: Fraction) -> str:
    """Canonical text form: ``"3"`` for integers, ``"-2/3"`` otherwise."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class SampleSpace:
    """
    A finite probability space.

    The order of ``atoms`` fixes the coordinate layout of every element.

    Attributes:
        atoms: Unique atom identifiers
        weights: Strictly positive rational masses summing to 1

    Examples:
        >>> space = SampleSpace.uniform(["HH", "HT", "TH", "TT"])
        >>> space.weights[0]
        Fraction(1, 4)
    """

    atoms: tuple[str, ...]
    weights: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        atoms = tuple(str(a) for a in self.atoms)
        weights = tuple(to_fraction(w) for w in self.weights)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

        if not atoms:
            raise DomainError("A sample space needs at least one atom")
        if len(atoms) != len(weights):
            raise StructuralError(f"{len(atoms)} atoms but {len(weights)} weights")
        if len(set(atoms)) != len(atoms):
            raise DomainError(f"Atom identifiers must be unique: {list(atoms)}")
        for atom, weight in zip(atoms, weights):
            if weight <= 0:
                raise DomainError(f"Weight of atom {atom!r} must be positive, got {weight}")
        total = sum(weights, Fraction(0))
        if total != 1:
            raise DomainError(f"Weights must sum to 1, got {format_fraction(total)}")

    @classmethod
    def uniform(cls, atoms: Union[int, Sequence[str]]) -> "SampleSpace":
        """Uniform space over the given atoms, or over ``"1".."n"`` for an int."""
        if isinstance(atoms, int):
            atoms = [str(i) for i in range(1, atoms + 1)]
        n = len(atoms)
        return cls(tuple(atoms), tuple(Fraction(1, n) for _ in range(n)))

    @classmethod
    def normalized(cls, atoms: Sequence[str], masses: Sequence[Scalar]) -> "SampleSpace":
        """Space whose weights are the given positive masses rescaled to sum 1."""
        masses = [to_fraction(m) for m in masses]
        total = sum(masses, Fraction(0))
        if total <= 0:
            raise DomainError(f"Masses must have positive total, got {total}")
        return cls(tuple(atoms), tuple(m / total for m in masses))

    @property
    def size(self) -> int:
        return len(self.atoms)

    @cached_property
    def _positions(self) -> dict[str, int]:
        return {atom: i for i, atom in enumerate(self.atoms)}

    def index(self, atom: str) -> int:
        """Position of an atom in the coordinate layout."""
        try:
            return self._positions[str(atom)]
        except KeyError:
            raise StructuralError(f"Unknown atom {atom!r}") from None

    def mass(self, indices: Iterable[int]) -> Fraction:
        """Total weight of a set of atom positions."""
        return sum((self.weights[i] for i in indices), Fraction(0))

    def element(self, values: Sequence[Scalar]) -> "RieszElement":
        return RieszElement(self, tuple(values))

    def constant(self, value: Scalar) -> "RieszElement":
        c = to_fraction(value)
        return RieszElement(self, tuple(c for _ in self.atoms))

    def ones(self) -> "RieszElement":
        return self.constant(1)

    def zero(self) -> "RieszElement":
        return self.constant(0)

    def indicator(self, atoms: Iterable[str]) -> "RieszElement":
        """Indicator function of a set of atoms, given by identifier."""
        return self.indicator_of_indices(self.index(a) for a in atoms)

    def indicator_of_indices(self, indices: Iterable[int]) -> "RieszElement":
        chosen = set(indices)
        return RieszElement(
            self, tuple(Fraction(1) if i in chosen else Fraction(0) for i in range(self.size))
        )


def require_same_space(*spaces: SampleSpace) -> SampleSpace:
    """
    Check that every operand lives on one sample space.

    Raises:
        StructuralError: On the first mismatch
    """
    first = spaces[0]
    for other in spaces[1:]:
        if other is not first and other != first:
            raise StructuralError("Operands live on different sample spaces")
    return first


@dataclass(frozen=True)
class RieszElement:
    """
    An element of the finite Riesz space: one exact rational per atom.

    Supports vector arithmetic (``+``, ``-``, scalar ``*`` and ``/``), the
    pointwise order (``<=``, ``>=``) and the lattice operations.
    """

    space: SampleSpace = field(repr=False)
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        values = tuple(to_fraction(v) for v in self.values)
        if len(values) != self.space.size:
            raise StructuralError(
                f"Element has {len(values)} values but the space has {self.space.size} atoms"
            )
        object.__setattr__(self, "values", values)

    def __str__(self) -> str:
        return "(" + ", ".join(format_fraction(v) for v in self.values) + ")"

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i: int) -> Fraction:
        return self.values[i]

    def __len__(self) -> int:
        return len(self.values)

    def _zip(self, other: "RieszElement"):
        require_same_space(self.space, other.space)
        return zip(self.values, other.values)

    def __add__(self, other: "RieszElement") -> "RieszElement":
        return RieszElement(self.space, tuple(a + b for a, b in self._zip(other)))

    def __sub__(self, other: "RieszElement") -> "RieszElement":
        return RieszElement(self.space, tuple(a - b for a, b in self._zip(other)))

    def __neg__(self) -> "RieszElement":
        return RieszElement(self.space, tuple(-a for a in self.values))

    def __mul__(self, scalar: Scalar) -> "RieszElement":
        if isinstance(scalar, RieszElement):
            raise StructuralError("Use e_mul for products of elements")
        c = to_fraction(scalar)
        return RieszElement(self.space, tuple(c * a for a in self.values))

    __rmul__ = __mul__

    def __truediv__(self, scalar: Scalar) -> "RieszElement":
        c = to_fraction(scalar)
        if c == 0:
            raise DomainError("Division by zero")
        return RieszElement(self.space, tuple(a / c for a in self.values))

    def __le__(self, other: "RieszElement") -> bool:
        return all(a <= b for a, b in self._zip(other))

    def __ge__(self, other: "RieszElement") -> bool:
        return all(a >= b for a, b in self._zip(other))

    def sup(self, other: "RieszElement") -> "RieszElement":
        return RieszElement(self.space, tuple(max(a, b) for a, b in self._zip(other)))

    def inf(self, other: "RieszElement") -> "RieszElement":
        return RieszElement(self.space, tuple(min(a, b) for a, b in self._zip(other)))

    def abs(self) -> "RieszElement":
        return self.sup(-self)

    def positive_part(self) -> "RieszElement":
        return self.sup(self.space.zero())

    def negative_part(self) -> "RieszElement":
        return (-self).sup(self.space.zero())

    def is_positive(self) -> bool:
        """True iff the element lies in the positive cone (all values >= 0)."""
        return all(a >= 0 for a in self.values)

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.values)

    def support(self) -> frozenset[int]:
        """Positions where the element is nonzero."""
        return frozenset(i for i, a in enumerate(self.values) if a != 0)

    def max(self) -> Fraction:
        return max(self.values)

    def min(self) -> Fraction:
        return min(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=object)

    @classmethod
    def from_array(cls, space: SampleSpace, array: np.ndarray) -> "RieszElement":
        return cls(space, tuple(Fraction(v) for v in array))


def sup(f: RieszElement, g: RieszElement) -> RieszElement:
    """Pointwise maximum f ∨ g."""
    return f.sup(g)


def inf(f: RieszElement, g: RieszElement) -> RieszElement:
    """Pointwise minimum f ∧ g."""
    return f.inf(g)


def absolute(f: RieszElement) -> RieszElement:
    """|f| = f ∨ (-f)."""
    return f.abs()


def add(f: RieszElement, g: RieszElement) -> RieszElement:
    return f + g


def scale(c: Scalar, f: RieszElement) -> RieszElement:
    return f * c


def _require_positive(f: RieszElement, what: str) -> None:
    if not f.is_positive():
        raise DomainError(f"{what} must be positive, got {f}")


def is_weak_order_unit(f: RieszElement) -> bool:
    """
    Decide whether a positive element is a weak order unit.

    In finite dimension the band generated by f is the whole space exactly
    when f is nonzero on every atom.

    Raises:
        DomainError: If f has a negative value
    """
    _require_positive(f, "A weak order unit candidate")
    return all(a > 0 for a in f.values)


def sup_horizon(f: RieszElement, g: RieszElement) -> int:
    """
    Smallest N guaranteed to satisfy |g| ∧ N·f = P_f|g|.

    N = ceil(max|g| / min positive value of f); 0 when either side vanishes.
    """
    positive = [a for a in f.values if a > 0]
    top = g.abs().max()
    if not positive or top == 0:
        return 0
    return math.ceil(top / min(positive))


def is_weak_order_unit_by_sup(f: RieszElement) -> bool:
    """
    Same decision as ``is_weak_order_unit``, from the definition.

    Checks |g| ∧ N·f = |g| for every atom indicator g at the horizon N, which
    is where the increasing sequence |g| ∧ n·f stops moving.
    """
    _require_positive(f, "A weak order unit candidate")
    for i in range(f.space.size):
        g = f.space.indicator_of_indices([i])
        n = sup_horizon(f, g)
        if g.inf(f * n) != g:
            return False
    return True


@dataclass(frozen=True)
class BandProjection:
    """
    Projection onto the band of elements supported inside ``support``.

    Acts by multiplication with the indicator of ``support``; positive,
    idempotent, and any two band projections commute.

    Attributes:
        space: The sample space
        support: Atom positions kept by the projection
    """

    space: SampleSpace = field(repr=False)
    support: frozenset[int]

    def __post_init__(self) -> None:
        support = frozenset(self.support)
        for i in support:
            if not 0 <= i < self.space.size:
                raise StructuralError(f"Atom position {i} outside the space")
        object.__setattr__(self, "support", support)

    @classmethod
    def of_atoms(cls, space: SampleSpace, atoms: Iterable[str]) -> "BandProjection":
        return cls(space, frozenset(space.index(a) for a in atoms))

    @classmethod
    def identity(cls, space: SampleSpace) -> "BandProjection":
        return cls(space, frozenset(range(space.size)))

    @classmethod
    def zero(cls, space: SampleSpace) -> "BandProjection":
        return cls(space, frozenset())

    def __str__(self) -> str:
        return "P{" + ",".join(self.atoms()) + "}"

    def atoms(self) -> tuple[str, ...]:
        return tuple(self.space.atoms[i] for i in sorted(self.support))

    def apply(self, f: RieszElement) -> RieszElement:
        require_same_space(self.space, f.space)
        return RieszElement(
            self.space,
            tuple(a if i in self.support else Fraction(0) for i, a in enumerate(f.values)),
        )

    __call__ = apply

    def complement(self) -> "BandProjection":
        return BandProjection(self.space, frozenset(range(self.space.size)) - self.support)

    def compose(self, other: "BandProjection") -> "BandProjection":
        """The product PQ, i.e. the projection onto the intersection of the bands."""
        require_same_space(self.space, other.space)
        return BandProjection(self.space, self.support & other.support)

    def is_identity(self) -> bool:
        return len(self.support) == self.space.size

    def is_zero(self) -> bool:
        return not self.support

    @cached_property
    def matrix(self) -> np.ndarray:
        n = self.space.size
        m = np.full((n, n), Fraction(0), dtype=object)
        for i in self.support:
            m[i, i] = Fraction(1)
        return m


def band_projection_of(f: RieszElement) -> BandProjection:
    """
    The band projection P_f onto the band generated by f.

    Raises:
        DomainError: If f is not positive
    """
    _require_positive(f, "The generator of a band")
    return BandProjection(f.space, frozenset(i for i, a in enumerate(f.values) if a > 0))


@dataclass(frozen=True)
class SupFormulaTrace:
    """
    Stages of P_f g = sup_n g ∧ n·f for the band projection P_f.

    For signed g the formula is applied to g⁺ and g⁻ separately, so
    ``stages[n] = (g⁺ ∧ n·f) - (g⁻ ∧ n·f)`` after taking running suprema.

    Attributes:
        horizon: The computed bound N
        stages: Stage n for n = 0..N
        stabilized_at: First n whose stage equals the stage at N
    """

    horizon: int
    stages: tuple[RieszElement, ...]
    stabilized_at: int

    @property
    def result(self) -> RieszElement:
        return self.stages[-1]


def sup_formula_trace(f: RieszElement, g: RieszElement) -> SupFormulaTrace:
    """
    Evaluate the supremum formula for P_f g stage by stage up to its horizon.

    Raises:
        DomainError: If f is not positive
        StructuralError: If f and g live on different spaces
    """
    _require_positive(f, "The generator of a band")
    require_same_space(f.space, g.space)
    horizon = sup_horizon(f, g)
    g_pos, g_neg = g.positive_part(), g.negative_part()
    upper = lower = f.space.zero()
    stages = []
    for n in range(horizon + 1):
        upper = upper.sup(g_pos.inf(f * n))
        lower = lower.sup(g_neg.inf(f * n))
        stages.append(upper - lower)
    final = stages[-1]
    stabilized_at = next(n for n, stage in enumerate(stages) if stage == final)
    logger.debug(f"sup formula horizon {horizon}, stabilized at {stabilized_at}")
    return SupFormulaTrace(horizon, tuple(stages), stabilized_at)


def verify_band_projection(f: RieszElement, g: RieszElement) -> bool:
    """True iff the supremum formula at its horizon agrees with the indicator action."""
    return sup_formula_trace(f, g).result == band_projection_of(f).apply(g)


def e_mul(f: RieszElement, g: RieszElement, e: RieszElement) -> RieszElement:
    """
    Product in the f-algebra whose multiplicative unit is e.

    Pointwise f·g/e; commutative and associative with e_mul(f, e, e) = f.

    Raises:
        DomainError: If e is not a weak order unit
    """
    require_same_space(f.space, g.space, e.space)
    if not is_weak_order_unit(e):
        raise DomainError(f"The f-algebra unit must be a weak order unit, got {e}")
    return RieszElement(
        f.space, tuple(a * b / u for a, b, u in zip(f.values, g.values, e.values))
    )
