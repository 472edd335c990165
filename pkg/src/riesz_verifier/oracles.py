"""
Brute-force oracles that reimplement the classical notions directly.

Nothing here calls the operator machinery of ``riesz_core.condexp`` or
``riesz_probability``: verdicts are computed from atom sets and masses (or
from the normal equations) so that they can cross-check the operator-based
checkers. Partitions are only read as lists of blocks.
"""

import itertools
import logging
from fractions import Fraction
from typing import Iterator, Optional, Sequence

import numpy as np
import sympy

from riesz_core.condexp import from_sympy
from riesz_core.errors import ResourceCapError
from riesz_core.partitions import Partition
from riesz_core.settings import INDEPENDENCE_CAP_BLOCKS
from riesz_core.space import RieszElement, SampleSpace

logger = logging.getLogger(__name__)

PARTITION_ENUMERATION_CAP = 7


def _mass(space: SampleSpace, atoms: set[int]) -> Fraction:
    return sum((space.weights[i] for i in atoms), Fraction(0))


def _unions(blocks: Sequence[Sequence[int]], cap: int) -> list[set[int]]:
    if len(blocks) > cap:
        raise ResourceCapError("independence_cap_blocks", cap, len(blocks))
    return [
        set().union(*(blocks[k] for k in range(len(blocks)) if mask >> k & 1))
        for mask in range(2 ** len(blocks))
    ]


def oracle_classical_independence(
    space: SampleSpace,
    e1: Partition,
    e2: Partition,
    g: Partition,
    cap: Optional[int] = None,
) -> bool:
    """
    Classical conditional independence of two partitions given a third.

    True iff for every G-block B, every union A1 of E1-blocks and every union
    A2 of E2-blocks: mu(A1 & A2 & B) * mu(B) = mu(A1 & B) * mu(A2 & B).
    """
    cap = INDEPENDENCE_CAP_BLOCKS if cap is None else cap
    firsts = _unions(e1.blocks, cap)
    seconds = _unions(e2.blocks, cap)
    for block in g.blocks:
        b = set(block)
        mb = _mass(space, b)
        first_masses = [(a1 & b, _mass(space, a1 & b)) for a1 in firsts]
        second_masses = [(a2 & b, _mass(space, a2 & b)) for a2 in seconds]
        for a1b, m1 in first_masses:
            for a2b, m2 in second_masses:
                if _mass(space, a1b & a2b) * mb != m1 * m2:
                    return False
    return True


def oracle_projection_condexp(space: SampleSpace, f: Partition) -> np.ndarray:
    """
    Weighted orthogonal projection onto the F-measurable vectors.

    Solves the normal equations (B^T W B) c = B^T W for the block-indicator
    basis B and the diagonal mass matrix W, then returns B c.
    """
    n, k = space.size, len(f.blocks)
    basis = sympy.zeros(n, k)
    for col, block in enumerate(f.blocks):
        for i in block:
            basis[i, col] = 1
    w = sympy.diag(*[sympy.Rational(x.numerator, x.denominator) for x in space.weights])
    gram = basis.T * w * basis
    coefficients = gram.LUsolve(basis.T * w)
    return from_sympy(basis * coefficients)


def oracle_classical_markov(
    space: SampleSpace, base: Partition, elements: Sequence[RieszElement]
) -> bool:
    """
    Classical Markov property by counting conditional probabilities.

    For every time k, every nonempty set H of earlier times with last time
    h, and every cell C (a base block intersected with a level set of X_k):
    P(C | base, X_H) = P(C | base, X_h), compared atom by atom.
    """
    owner = {i: b for b, block in enumerate(base.blocks) for i in block}

    def cell_key(i: int, times: Sequence[int]) -> tuple:
        return (owner[i],) + tuple(elements[s].values[i] for s in times)

    def cells(times: Sequence[int]) -> dict[tuple, set[int]]:
        grouped: dict[tuple, set[int]] = {}
        for i in range(space.size):
            grouped.setdefault(cell_key(i, times), set()).add(i)
        return grouped

    for k in range(1, len(elements)):
        targets = list(cells([k]).values())
        for size in range(1, k + 1):
            for history in itertools.combinations(range(k), size):
                by_history = cells(history)
                by_last = cells(history[-1:])
                for i in range(space.size):
                    h_cell = by_history[cell_key(i, history)]
                    l_cell = by_last[cell_key(i, history[-1:])]
                    mh, ml = _mass(space, h_cell), _mass(space, l_cell)
                    for target in targets:
                        if _mass(space, target & h_cell) * ml != _mass(space, target & l_cell) * mh:
                            return False
    return True


def enumerate_partitions(n: int, cap: int = PARTITION_ENUMERATION_CAP) -> Iterator[list[list[int]]]:
    """
    Every set partition of range(n), as lists of blocks.

    Generated from restricted growth strings; there are Bell(n) of them.

    Raises:
        ResourceCapError: If n exceeds the cap
    """
    if n > cap:
        raise ResourceCapError("partition_enumeration", cap, n)
    if n == 0:
        yield []
        return

    def grow(prefix: list[int], top: int) -> Iterator[list[int]]:
        if len(prefix) == n:
            yield prefix
            return
        for label in range(top + 2):
            yield from grow(prefix + [label], max(top, label))

    for labels in grow([0], 0):
        blocks: list[list[int]] = [[] for _ in range(max(labels) + 1)]
        for i, label in enumerate(labels):
            blocks[label].append(i)
        yield blocks


def oracle_generated_partition(
    space: SampleSpace, g: Partition, xs: Sequence[RieszElement]
) -> list[list[int]]:
    """
    Coarsest partition finer than g on which every x is constant, by exhaustive search.

    Among all candidate partitions, returns the one with the fewest blocks;
    it is unique because candidates are closed under common coarsening.
    """
    owner = {i: b for b, block in enumerate(g.blocks) for i in block}
    best: Optional[list[list[int]]] = None
    for blocks in enumerate_partitions(space.size):
        admissible = all(
            len({owner[i] for i in block}) == 1
            and all(len({x.values[i] for i in block}) == 1 for x in xs)
            for block in blocks
        )
        if admissible and (best is None or len(blocks) < len(best)):
            best = blocks
    assert best is not None
    return best
