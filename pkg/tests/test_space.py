"""
Tests for sample spaces, Riesz elements and band projections.
"""

from fractions import Fraction

import pytest
from hypothesis import given

from riesz_core.errors import DomainError, StructuralError
from riesz_core.space import (
    BandProjection,
    SampleSpace,
    absolute,
    add,
    band_projection_of,
    e_mul,
    format_fraction,
    inf,
    is_weak_order_unit,
    is_weak_order_unit_by_sup,
    scale,
    sup,
    sup_formula_trace,
    sup_horizon,
    to_fraction,
    verify_band_projection,
)
from tests.builders import elements, four_atoms, skewed_space

SPACE = four_atoms()


class TestScalars:
    """Tests for exact scalar conversion."""

    def test_strings_and_ints(self):
        """Strings and ints convert exactly."""
        assert to_fraction("2/3") == Fraction(2, 3)
        assert to_fraction(" -4 ") == Fraction(-4)
        assert to_fraction(5) == Fraction(5)

    def test_floats_rejected(self):
        """Floats never enter the kernel."""
        with pytest.raises(DomainError):
            to_fraction(0.5)

    def test_bools_rejected(self):
        with pytest.raises(DomainError):
            to_fraction(True)

    def test_malformed_string(self):
        with pytest.raises(DomainError, match="Not an exact rational"):
            to_fraction("1/0")

    def test_format(self):
        """Integers print bare, other rationals as p/q."""
        assert format_fraction(Fraction(3)) == "3"
        assert format_fraction(Fraction(-2, 6)) == "-1/3"


class TestSampleSpace:
    """Tests for SampleSpace validation and constructors."""

    def test_uniform(self):
        space = SampleSpace.uniform(3)
        assert space.atoms == ("1", "2", "3")
        assert space.weights == (Fraction(1, 3),) * 3

    def test_weights_must_sum_to_one(self):
        """The error names the actual total."""
        with pytest.raises(DomainError, match="got 9/10"):
            SampleSpace(("a", "b"), ("1/2", "2/5"))

    def test_weights_must_be_positive(self):
        with pytest.raises(DomainError, match="must be positive"):
            SampleSpace(("a", "b"), (1, 0))

    def test_duplicate_atoms(self):
        with pytest.raises(DomainError, match="unique"):
            SampleSpace(("a", "a"), ("1/2", "1/2"))

    def test_length_mismatch(self):
        with pytest.raises(StructuralError):
            SampleSpace(("a", "b"), (1,))

    def test_empty_space(self):
        with pytest.raises(DomainError):
            SampleSpace((), ())

    def test_normalized(self):
        """Masses are rescaled to sum one."""
        space = SampleSpace.normalized(["x", "y"], [1, 3])
        assert space.weights == (Fraction(1, 4), Fraction(3, 4))

    def test_unknown_atom(self):
        with pytest.raises(StructuralError, match="Unknown atom"):
            SPACE.index("9")

    def test_indicator(self):
        assert str(SPACE.indicator(["2", "4"])) == "(0, 1, 0, 1)"


class TestRieszElement:
    """Tests for element arithmetic and the lattice operations."""

    def test_str(self):
        assert str(SPACE.element([1, "1/2", 0, -3])) == "(1, 1/2, 0, -3)"

    def test_wrong_length(self):
        with pytest.raises(StructuralError):
            SPACE.element([1, 2])

    def test_different_spaces(self):
        """Elements of different spaces never mix."""
        with pytest.raises(StructuralError, match="different sample spaces"):
            SPACE.ones() + skewed_space().ones()

    def test_element_products_need_a_unit(self):
        with pytest.raises(StructuralError, match="e_mul"):
            SPACE.ones() * SPACE.ones()

    def test_division_by_zero(self):
        with pytest.raises(DomainError):
            SPACE.ones() / 0

    def test_lattice_functions(self):
        two = SampleSpace.uniform(2)
        f, g = two.element([1, 0]), two.element([0, 1])
        assert sup(f, g) == two.element([1, 1])
        assert inf(f, f) == f
        assert absolute(two.element([-2, 3])) == two.element([2, 3])
        assert add(f, g) == two.ones()
        assert scale("1/2", g) == two.element([0, "1/2"])

    def test_parts(self):
        f = SPACE.element([2, -1, 0, "-1/2"])
        assert str(f.positive_part()) == "(2, 0, 0, 0)"
        assert str(f.negative_part()) == "(0, 1, 0, 1/2)"
        assert str(f.abs()) == "(2, 1, 0, 1/2)"
        assert f.support() == frozenset({0, 1, 3})

    @given(elements(SPACE))
    def test_decomposition(self, f):
        """f = f+ - f- and |f| = f+ + f-."""
        assert f.positive_part() - f.negative_part() == f
        assert f.positive_part() + f.negative_part() == f.abs()
        assert f.positive_part().inf(f.negative_part()).is_zero()

    @given(elements(SPACE), elements(SPACE), elements(SPACE))
    def test_distributive(self, f, g, h):
        """The lattice is distributive."""
        assert f.inf(g.sup(h)) == f.inf(g).sup(f.inf(h))
        assert f.sup(g.inf(h)) == f.sup(g).inf(f.sup(h))

    @given(elements(SPACE), elements(SPACE))
    def test_sum_of_sup_and_inf(self, f, g):
        assert f.sup(g) + f.inf(g) == f + g

    @given(elements(SPACE), elements(SPACE), elements(SPACE))
    def test_translation_invariance(self, f, g, h):
        """Adding h preserves order and commutes with sup."""
        assert (f + h).sup(g + h) == f.sup(g) + h
        if f <= g:
            assert f + h <= g + h


class TestWeakOrderUnits:
    """Tests for weak order units and the supremum formula."""

    def test_unit_detection(self):
        assert is_weak_order_unit(SPACE.element([1, 2, 3, "1/5"]))
        assert not is_weak_order_unit(SPACE.element([1, 0, 3, 1]))

    def test_negative_candidate(self):
        with pytest.raises(DomainError):
            is_weak_order_unit(SPACE.element([1, -1, 1, 1]))

    @given(elements(SPACE, positive=True))
    def test_definition_agrees(self, f):
        """The sup-based decision matches the support-based one."""
        assert is_weak_order_unit_by_sup(f) == is_weak_order_unit(f)

    def test_horizon(self):
        f = SPACE.element(["1/2", 1, 0, 0])
        g = SPACE.element([3, 0, 0, -1])
        assert sup_horizon(f, g) == 6
        assert sup_horizon(SPACE.zero(), g) == 0

    def test_trace_stabilizes(self):
        """The stages stop moving at or before the horizon."""
        f = SPACE.element(["1/2", 1, 0, 0])
        g = SPACE.element([3, -2, 5, 0])
        trace = sup_formula_trace(f, g)
        assert trace.result == SPACE.element([3, -2, 0, 0])
        assert trace.stabilized_at <= trace.horizon
        assert trace.stages[0].is_zero()

    @given(elements(SPACE, positive=True), elements(SPACE))
    def test_sup_formula_matches_indicator(self, f, g):
        assert verify_band_projection(f, g)


class TestBandProjection:
    """Tests for band projections."""

    def test_of_element(self):
        p = band_projection_of(SPACE.element([0, 2, "1/3", 0]))
        assert str(p) == "P{2,3}"

    def test_requires_positive_generator(self):
        with pytest.raises(DomainError):
            band_projection_of(SPACE.element([0, -2, 1, 0]))

    def test_complement_and_compose(self):
        p = BandProjection.of_atoms(SPACE, ["1", "2"])
        q = BandProjection.of_atoms(SPACE, ["2", "3"])
        assert str(p.complement()) == "P{3,4}"
        assert str(p.compose(q)) == "P{2}"
        assert p.compose(p.complement()).is_zero()
        assert BandProjection.identity(SPACE).is_identity()

    @given(elements(SPACE))
    def test_idempotent(self, f):
        p = BandProjection.of_atoms(SPACE, ["1", "4"])
        assert p.apply(p.apply(f)) == p.apply(f)
        assert p.apply(f) + p.complement().apply(f) == f

    def test_outside_space(self):
        with pytest.raises(StructuralError):
            BandProjection(SPACE, frozenset({7}))


class TestFAlgebra:
    """Tests for the f-algebra product."""

    def test_unit_is_neutral(self):
        e = SPACE.element([2, 1, "1/2", 3])
        f = SPACE.element([1, -4, 3, 0])
        assert e_mul(f, e, e) == f

    def test_pointwise_for_constant_one(self):
        f = SPACE.element([1, -2, 3, 0])
        assert str(e_mul(f, f, SPACE.ones())) == "(1, 4, 9, 0)"

    @given(elements(SPACE), elements(SPACE), elements(SPACE))
    def test_commutative_associative(self, f, g, h):
        e = SPACE.element([2, 1, "1/2", 3])
        assert e_mul(f, g, e) == e_mul(g, f, e)
        assert e_mul(e_mul(f, g, e), h, e) == e_mul(f, e_mul(g, h, e), e)

    def test_unit_must_be_weak_order_unit(self):
        f = SPACE.ones()
        with pytest.raises(DomainError, match="weak order unit"):
            e_mul(f, f, SPACE.element([1, 0, 1, 1]))
