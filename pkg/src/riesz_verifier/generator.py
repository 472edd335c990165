"""
Seeded random scenarios for the equivalence batteries.

Everything is drawn from one ``random.Random(seed)``, so a seed reproduces
the same spaces, partitions, elements and processes on every run.
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from riesz_core.condexp import ConditionalExpectation
from riesz_core.partitions import Partition, generated_partition
from riesz_core.settings import DEFAULT_SEED, WALK_CAP
from riesz_core.space import RieszElement, SampleSpace
from riesz_probability.markov import Process
from riesz_probability.processes import partial_sums, product_space, rademacher_walk

from .scenario import CheckSpec, Scenario

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IndependenceCase:
    """A base partition G with two refinements E1, E2 on one space."""

    space: SampleSpace
    g: Partition
    e1: Partition
    e2: Partition

    @property
    def t(self) -> ConditionalExpectation:
        return ConditionalExpectation(self.g)


class ScenarioGenerator:
    """
    Random spaces, partitions, elements and processes from one seed.

    Args:
        seed: Seed of the underlying ``random.Random``

    Examples:
        >>> gen = ScenarioGenerator(seed=7)
        >>> gen.space(max_atoms=6).size <= 6
        True
    """

    def __init__(self, seed: int = DEFAULT_SEED):
        self.seed = seed
        self.rng = random.Random(seed)

    def space(self, max_atoms: int = 8, min_atoms: int = 2) -> SampleSpace:
        n = self.rng.randint(min_atoms, max_atoms)
        masses = [self.rng.randint(1, 6) for _ in range(n)]
        return SampleSpace.normalized([str(i) for i in range(1, n + 1)], masses)

    def partition(self, space: SampleSpace, max_blocks: int) -> Partition:
        """Random partition with at most max_blocks blocks."""
        k = self.rng.randint(1, min(max_blocks, space.size))
        labels = [self.rng.randrange(k) for _ in range(space.size)]
        groups: dict[int, list[int]] = {}
        for i, label in enumerate(labels):
            groups.setdefault(label, []).append(i)
        return Partition(space, tuple(tuple(g) for g in groups.values()))

    def refinement(self, coarse: Partition, max_blocks: int) -> Partition:
        """Random partition finer than coarse, with at most max_blocks blocks when possible."""
        spare = max(max_blocks - len(coarse.blocks), 0)
        blocks: list[tuple[int, ...]] = []
        for block in coarse.blocks:
            pieces = 1
            if spare and len(block) > 1:
                pieces = self.rng.randint(1, min(len(block), spare + 1))
                spare -= pieces - 1
            groups: dict[int, list[int]] = {}
            for i in block:
                groups.setdefault(self.rng.randrange(pieces), []).append(i)
            blocks.extend(tuple(g) for g in groups.values())
        return Partition(coarse.space, tuple(blocks))

    def element(
        self, space: SampleSpace, values: tuple[int, ...] = (0, 1), on: Optional[Partition] = None
    ) -> RieszElement:
        """Random element with entries from values, constant on the blocks of ``on`` if given."""
        if on is None:
            return space.element([self.rng.choice(values) for _ in range(space.size)])
        per_block = [self.rng.choice(values) for _ in on.blocks]
        return space.element([per_block[on.block_of[i]] for i in range(space.size)])

    def independence_case(self, max_atoms: int = 12, max_blocks: int = 6) -> IndependenceCase:
        """
        A random G with refinements E1, E2.

        Half of the cases come from a product of two random factors, where E1
        and E2 are the coordinate subspaces and independence holds; the rest
        are unstructured and mostly dependent.
        """
        if self.rng.random() < 0.5:
            left = self._factor(max(2, min(3, max_atoms // 2)))
            right = self._factor(max(2, min(3, max_atoms // len(left))))
            ps = product_space([left, right])
            g = Partition.trivial(ps.base)
            e1 = generated_partition(g, [ps.coordinates[0]])
            e2 = generated_partition(g, [ps.coordinates[1]])
            return IndependenceCase(ps.base, g, e1, e2)
        space = self.space(max_atoms)
        g = self.partition(space, max(1, max_blocks // 2))
        return IndependenceCase(
            space, g, self.refinement(g, max_blocks), self.refinement(g, max_blocks)
        )

    def _factor(self, max_outcomes: int) -> list[tuple[int, Fraction]]:
        n = self.rng.randint(2, max_outcomes)
        masses = [self.rng.randint(1, 4) for _ in range(n)]
        total = sum(masses)
        return [(k, Fraction(m, total)) for k, m in enumerate(masses)]

    def mean_zero_factor(self, max_outcomes: int = 3) -> list[tuple[Fraction, Fraction]]:
        """A random factor with distinct integer values, shifted so its mean is zero."""
        factor = self._factor(max_outcomes)
        values = self.rng.sample(range(-4, 5), len(factor))
        mean = sum((v * w for v, (_, w) in zip(values, factor)), Fraction(0))
        return [(v - mean, w) for v, (_, w) in zip(values, factor)]

    def process(self, max_atoms: int = 8, times: int = 3) -> Process:
        """
        A random process on a small space.

        Half are partial sums of independent factors (Markov by construction);
        the rest use random 0/1 elements, which may or may not be Markov.
        """
        if self.rng.random() < 0.5:
            factors = [self._factor(2) for _ in range(times)]
            ps = product_space(factors)
            return partial_sums(list(ps.coordinates), ps.expectation)
        space = self.space(max_atoms, min_atoms=3)
        t = ConditionalExpectation(self.partition(space, 2))
        elements = {s: self.element(space) for s in range(1, times + 1)}
        return Process.of(t, elements)

    def scenario(self, max_atoms: int = 8) -> Scenario:
        """A random scenario with an independence check and a Markov check; records the seed."""
        case = self.independence_case(max_atoms=max_atoms, max_blocks=4)
        space = case.space
        elements = {f"X{k}": self.element(space) for k in (1, 2, 3)}
        return Scenario(
            name=f"random_{self.seed}",
            description="Generated scenario",
            space=space,
            base=case.g,
            unit=space.ones(),
            elements=elements,
            partitions={"E1": case.e1, "E2": case.e2},
            processes={"proc": {1: "X1", 2: "X2", 3: "X3"}},
            checks=[
                CheckSpec("independence", {"first": "E1", "second": "E2"}),
                CheckSpec("markov", {"process": "proc"}),
            ],
            seed=self.seed,
        )


def walk_scenario(steps: int, cap: int = WALK_CAP) -> Scenario:
    """
    Scenario for a Rademacher walk: increments G1..Gn and partial sums S1..Sn.

    Raises:
        ResourceCapError: If steps exceeds the cap
    """
    walk = rademacher_walk(steps, cap)
    space = walk.process.space
    elements: dict[str, RieszElement] = {}
    for k, g in enumerate(walk.increments, start=1):
        elements[f"G{k}"] = g
    for k, s in zip(walk.process.times, walk.process.elements):
        elements[f"S{k}"] = s
    elements["bound"] = space.constant(steps)
    increments = [f"G{k}" for k in range(1, steps + 1)]
    checks = [
        CheckSpec("brownian", {"increments": increments}),
        CheckSpec("martingale", {"process": "walk"}),
        CheckSpec("bounded_sums", {"elements": increments, "bound": "bound"}),
    ]
    if steps >= 2:
        checks.insert(1, CheckSpec("markov", {"process": "walk"}))
    if steps >= 3:
        checks.insert(2, CheckSpec("chapman_kolmogorov", {"process": "walk"}))
    logger.debug(f"Walk scenario with {steps} steps on {space.size} atoms")
    return Scenario(
        name=f"random_walk_{steps}",
        description=f"Rademacher walk with {steps} fair +-1 steps",
        space=space,
        base=walk.process.t.partition,
        unit=walk.process.e,
        elements=elements,
        processes={"walk": {k: f"S{k}" for k in walk.process.times}},
        checks=checks,
    )
