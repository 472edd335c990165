"""
Partitions of the atom set.

A partition stands for the closed Riesz subspace of elements that are constant
on each of its blocks. Finer partitions are larger subspaces, so "H refines G"
means the subspace of G is contained in that of H.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

from riesz_core.errors import DomainError, ResourceCapError, StructuralError
from riesz_core.settings import DEFAULT_CAP_BLOCKS
from riesz_core.space import BandProjection, RieszElement, SampleSpace, require_same_space

logger = logging.getLogger(__name__)


def _canonical(blocks: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0] if b else -1))


@dataclass(frozen=True)
class Partition:
    """
    A disjoint cover of the atoms by nonempty blocks.

    Blocks hold atom positions, each block sorted, blocks ordered by their least
    atom, so two partitions are equal exactly when they have the same blocks.

    Attributes:
        space: The sample space
        blocks: Canonically ordered blocks of atom positions

    Examples:
        >>> space = SampleSpace.uniform(4)
        >>> Partition.from_atoms(space, [["3", "4"], ["1", "2"]]).blocks
        ((0, 1), (2, 3))
    """

    space: SampleSpace = field(repr=False)
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        blocks = _canonical(self.blocks)
        seen: set[int] = set()
        for block in blocks:
            if not block:
                raise DomainError("Partition blocks must be nonempty")
            for i in block:
                if not 0 <= i < self.space.size:
                    raise StructuralError(f"Atom position {i} outside the space")
                if i in seen:
                    raise DomainError(f"Atom {self.space.atoms[i]!r} appears in two blocks")
                seen.add(i)
        if len(seen) != self.space.size:
            missing = [self.space.atoms[i] for i in range(self.space.size) if i not in seen]
            raise DomainError(f"Partition does not cover atoms {missing}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_atoms(cls, space: SampleSpace, blocks: Iterable[Iterable[str]]) -> "Partition":
        """Build a partition from blocks of atom identifiers."""
        return cls(space, tuple(tuple(space.index(a) for a in block) for block in blocks))

    @classmethod
    def trivial(cls, space: SampleSpace) -> "Partition":
        return cls(space, (tuple(range(space.size)),))

    @classmethod
    def discrete(cls, space: SampleSpace) -> "Partition":
        return cls(space, tuple((i,) for i in range(space.size)))

    @classmethod
    def level_sets(cls, f: RieszElement) -> "Partition":
        """Partition of the atoms into the level sets of f (exact equality)."""
        groups: dict = {}
        for i, value in enumerate(f.values):
            groups.setdefault(value, []).append(i)
        return cls(f.space, tuple(tuple(g) for g in groups.values()))

    def __str__(self) -> str:
        return "{" + ", ".join("{" + ",".join(b) + "}" for b in self.atom_blocks()) + "}"

    def __len__(self) -> int:
        return len(self.blocks)

    def atom_blocks(self) -> tuple[tuple[str, ...], ...]:
        return tuple(tuple(self.space.atoms[i] for i in block) for block in self.blocks)

    @cached_property
    def block_of(self) -> tuple[int, ...]:
        """Block number of every atom position."""
        owner = [0] * self.space.size
        for k, block in enumerate(self.blocks):
            for i in block:
                owner[i] = k
        return tuple(owner)

    def contains(self, f: RieszElement) -> bool:
        """True iff f is constant on every block, i.e. f lies in the subspace."""
        require_same_space(self.space, f.space)
        return all(len({f.values[i] for i in block}) == 1 for block in self.blocks)

    def block_indicators(self) -> list[RieszElement]:
        """Indicators of the blocks: a positive basis of the subspace."""
        return [self.space.indicator_of_indices(block) for block in self.blocks]

    def is_union_of_blocks(self, projection: BandProjection) -> bool:
        """True iff the projection's support is a union of blocks (Pe lies in the subspace)."""
        require_same_space(self.space, projection.space)
        return all(
            set(block) <= projection.support or not (set(block) & projection.support)
            for block in self.blocks
        )


def refines(h: Partition, g: Partition) -> bool:
    """
    True iff every block of h lies inside a block of g.

    Equivalently the subspace of g is contained in the subspace of h.

    Raises:
        StructuralError: If the partitions live on different spaces
    """
    require_same_space(h.space, g.space)
    owner = g.block_of
    return all(len({owner[i] for i in block}) == 1 for block in h.blocks)


def join(h1: Partition, h2: Partition) -> Partition:
    """
    Common refinement of two partitions.

    Its subspace is the closed Riesz subspace generated by the two subspaces.
    """
    require_same_space(h1.space, h2.space)
    groups: dict[tuple[int, int], list[int]] = {}
    for i in range(h1.space.size):
        groups.setdefault((h1.block_of[i], h2.block_of[i]), []).append(i)
    return Partition(h1.space, tuple(tuple(g) for g in groups.values()))


def join_all(base: Partition, others: Iterable[Partition]) -> Partition:
    result = base
    for other in others:
        result = join(result, other)
    return result


def generated_partition(g: Partition, xs: Sequence[RieszElement]) -> Partition:
    """
    Coarsest refinement of g on which every element of xs is block-constant.

    Realizes the closed Riesz subspace generated by the subspace of g and xs.
    """
    result = g
    for x in xs:
        require_same_space(g.space, x.space)
        result = join(result, Partition.level_sets(x))
    return result


def enumerate_band_projections(
    h: Partition, cap: Optional[int] = None
) -> Iterator[BandProjection]:
    """
    Yield every band projection P with Pe in the subspace of h.

    These are the indicators of unions of blocks, 2**len(h) of them, in
    bitmask order (bit k selects block k).

    Raises:
        ResourceCapError: If h has more blocks than the cap
    """
    cap = DEFAULT_CAP_BLOCKS if cap is None else cap
    k = len(h.blocks)
    if k > cap:
        raise ResourceCapError("cap_blocks", cap, k)
    logger.debug(f"Enumerating {2 ** k} band projections over {k} blocks")
    for mask in range(2**k):
        support = frozenset(
            i for bit, block in enumerate(h.blocks) if mask >> bit & 1 for i in block
        )
        yield BandProjection(h.space, support)


def check_refines(finer: Partition, coarser: Partition, message: str) -> None:
    """Raise DomainError with ``message`` unless ``finer`` refines ``coarser``."""
    if not refines(finer, coarser):
        raise DomainError(message)
