"""
Tests for partitions, joins, generated subspaces and band projection enumeration.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riesz_core.errors import DomainError, ResourceCapError, StructuralError
from riesz_core.partitions import (
    Partition,
    check_refines,
    enumerate_band_projections,
    generated_partition,
    join,
    join_all,
    refines,
)
from riesz_core.space import BandProjection, SampleSpace
from riesz_verifier.oracles import oracle_generated_partition
from tests.builders import blocks, four_atoms, partitions, skewed_space, spaces

SPACE = four_atoms()


class TestPartition:
    """Tests for Partition construction."""

    def test_canonical_order(self):
        """Blocks are sorted inside and ordered by least atom."""
        p = Partition.from_atoms(SPACE, [["4", "3"], ["2", "1"]])
        assert p.blocks == ((0, 1), (2, 3))
        assert str(p) == "{{1,2}, {3,4}}"

    def test_equality_ignores_input_order(self):
        assert blocks(SPACE, "12", "34") == blocks(SPACE, "43", "21")

    def test_overlap_rejected(self):
        with pytest.raises(DomainError, match="two blocks"):
            blocks(SPACE, "12", "234")

    def test_cover_required(self):
        with pytest.raises(DomainError, match="does not cover"):
            blocks(SPACE, "12", "3")

    def test_empty_block_rejected(self):
        with pytest.raises(DomainError, match="nonempty"):
            Partition(SPACE, ((0, 1, 2, 3), ()))

    def test_level_sets(self):
        p = Partition.level_sets(SPACE.element([1, 0, 1, 0]))
        assert p == blocks(SPACE, "13", "24")

    def test_contains(self):
        p = blocks(SPACE, "12", "34")
        assert p.contains(SPACE.element([5, 5, -1, -1]))
        assert not p.contains(SPACE.element([5, 4, -1, -1]))

    def test_block_of(self):
        assert blocks(SPACE, "13", "24").block_of == (0, 1, 0, 1)

    def test_union_of_blocks(self):
        p = blocks(SPACE, "12", "34")
        assert p.is_union_of_blocks(BandProjection.of_atoms(SPACE, ["3", "4"]))
        assert not p.is_union_of_blocks(BandProjection.of_atoms(SPACE, ["2", "3"]))


class TestRefinement:
    """Tests for refines, join and generated_partition."""

    def test_trivial_and_discrete(self):
        """Everything refines the trivial partition; the discrete one refines everything."""
        p = blocks(SPACE, "12", "34")
        assert refines(p, Partition.trivial(SPACE))
        assert refines(Partition.discrete(SPACE), p)
        assert not refines(Partition.trivial(SPACE), p)

    def test_join(self):
        h1 = blocks(SPACE, "12", "34")
        h2 = blocks(SPACE, "13", "24")
        assert join(h1, h2) == Partition.discrete(SPACE)
        assert join(h1, Partition.trivial(SPACE)) == h1

    def test_join_all(self):
        others = [blocks(SPACE, "123", "4"), blocks(SPACE, "1", "234")]
        h = join_all(Partition.trivial(SPACE), others)
        assert h == blocks(SPACE, "1", "23", "4")

    def test_different_spaces(self):
        with pytest.raises(StructuralError):
            refines(Partition.trivial(SPACE), Partition.trivial(skewed_space()))

    def test_generated_partition(self):
        g = blocks(SPACE, "12", "34")
        h = generated_partition(g, [SPACE.element([1, 0, 1, 1])])
        assert h == blocks(SPACE, "1", "2", "34")

    def test_check_refines_message(self):
        with pytest.raises(DomainError, match="range does not contain R\\(T\\)"):
            check_refines(
                Partition.trivial(SPACE), blocks(SPACE, "12", "34"), "range does not contain R(T)"
            )

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_generated_matches_exhaustive_search(self, data):
        """The level-set join is the coarsest admissible refinement."""
        space = data.draw(spaces(max_atoms=5))
        g = data.draw(partitions(space))
        values = st.lists(st.integers(0, 2), min_size=space.size, max_size=space.size)
        xs = [space.element(data.draw(values)) for _ in range(data.draw(st.integers(0, 2)))]
        found = oracle_generated_partition(space, g, xs)
        expected = Partition(space, tuple(tuple(b) for b in found))
        assert generated_partition(g, xs) == expected


class TestEnumeration:
    """Tests for enumerate_band_projections."""

    def test_unions_of_blocks(self):
        """2**k projections, in bitmask order over the blocks."""
        found = list(enumerate_band_projections(blocks(SPACE, "12", "34")))
        assert [str(p) for p in found] == ["P{}", "P{1,2}", "P{3,4}", "P{1,2,3,4}"]

    def test_every_result_is_a_union_of_blocks(self):
        h = blocks(SPACE, "1", "23", "4")
        assert all(h.is_union_of_blocks(p) for p in enumerate_band_projections(h))

    def test_cap(self):
        """The cap is checked when iteration starts."""
        space = SampleSpace.uniform(5)
        projections = enumerate_band_projections(Partition.discrete(space), cap=4)
        with pytest.raises(ResourceCapError) as excinfo:
            list(projections)
        assert excinfo.value.cap_name == "cap_blocks"
        assert excinfo.value.requested == 5
        assert excinfo.value.cap == 4
