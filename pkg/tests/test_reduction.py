"""
Tests for pointwise reduction

Nondegeneracy, A1, A2, C1 and Albert's condition on hand-checked actions,
plus the linear reduction and its dimension bookkeeping.
"""

from pathlib import Path

import pytest

from adapters.storage.json_storage import JsonStorageAdapter
from core.algebra.exactlin import Subspace
from core.domain.errors import (ActionDataError, InputError, MissingEtaError,
                                PreconditionError)
from core.domain.models import ActionPointData, ConditionId, StructureTag
from core.geometry.reduction import (check_condition, derive_geometry,
                                     dimension_check, isotropy_bounds,
                                     level_kernel_identity, linear_reduce)
from core.geometry.standard_models import (StandardCoordinates,
                                           a1_redundancy_family,
                                           a1_redundancy_instance)
from core.geometry.structures import identify_structure

DATA = Path(__file__).resolve().parent.parent / "data"


def _action(coords: StandardCoordinates, indices, **kwargs) -> ActionPointData:
    forms = coords.forms()
    return ActionPointData(forms=forms, gtilde=Subspace.coordinate(forms.dim, indices), **kwargs)


def irregular_counterexample() -> ActionPointData:
    """k = 2, n = 1 with g̃ = span{∂p¹}: A2 holds while nondegeneracy fails"""
    coords = StandardCoordinates(2, 1, False)
    return _action(coords, [coords.p(0, 0)])


class TestDerivedGeometry:
    """Level tangent space and isotropy"""

    def test_position_translation(self):
        coords = StandardCoordinates(1, 2, False)
        geo = derive_geometry(_action(coords, [coords.q(0)]))
        assert geo.level_tangent == Subspace.coordinate(coords.dim, [0, 1, coords.p(0, 1)])
        assert geo.isotropy == Subspace.coordinate(coords.dim, [coords.q(0)])

    def test_eta_must_vanish_on_gtilde(self):
        coords = StandardCoordinates(1, 1, True)
        with pytest.raises(ActionDataError):
            _action(coords, [coords.t(0)])


class TestConditions:
    """Condition checkers on known instances"""

    def test_bad_action_fails_a2_and_nondegeneracy(self):
        data = JsonStorageAdapter().load_action(DATA / "bad_action.json")
        geo = derive_geometry(data)
        assert geo.level_tangent.codim == data.forms.k * data.gtilde.dim
        a2 = check_condition(data, ConditionId.A2)
        nondeg = check_condition(data, ConditionId.NONDEG_POLYSYM)
        assert not a2.holds and not nondeg.holds
        assert (a2.lhs.dim, a2.rhs.dim) == (1, 2)
        assert nondeg.rhs.dim == 4
        assert not check_condition(data, ConditionId.A1).holds

    def test_a2_without_regularity_does_not_force_nondegeneracy(self):
        data = irregular_counterexample()
        geo = derive_geometry(data)
        assert geo.level_tangent.codim < data.forms.k * data.gtilde.dim
        assert check_condition(data, ConditionId.A2).holds
        assert not check_condition(data, ConditionId.NONDEG_POLYSYM).holds

    def test_a1_is_stronger_than_needed(self):
        data = a1_redundancy_instance()
        a1 = check_condition(data, ConditionId.A1)
        assert check_condition(data, ConditionId.NONDEG_POLYSYM).holds
        assert check_condition(data, ConditionId.A2).holds
        assert not a1.holds
        assert [c.holds for c in a1.per_index] == [False, True]
        assert a1.lhs == a1.per_index[0].lhs

    @pytest.mark.parametrize("extra,lagrangian", [(1, []), (1, [0]), (2, [1]), (3, [0, 2])])
    def test_a1_redundancy_persists_in_products(self, extra, lagrangian):
        data = a1_redundancy_family(extra, lagrangian)
        assert data.forms.dim == 6 + 3 * extra
        assert data.gtilde.dim == 1 + len(lagrangian)
        assert identify_structure(data.forms).tag == StructureTag.POLYSYMPLECTIC
        assert derive_geometry(data).level_tangent.codim == 2 * data.gtilde.dim
        assert check_condition(data, ConditionId.NONDEG_POLYSYM).holds
        assert check_condition(data, ConditionId.A2).holds
        a1 = check_condition(data, ConditionId.A1)
        assert [c.holds for c in a1.per_index] == [False, True]

    def test_a1_redundancy_family_bounds(self):
        assert a1_redundancy_family(0) == a1_redundancy_instance()
        with pytest.raises(InputError):
            a1_redundancy_family(1, [1])

    def test_cross_product_family(self):
        data = JsonStorageAdapter().load_action(DATA / "r6_action.json")
        report = check_condition(data, ConditionId.NONDEG_POLYCO)
        assert report.holds
        assert report.direct_sum is True
        assert report.lhs == Subspace.coordinate(6, [0, 1, 2])

    def test_albert_condition(self):
        coords = StandardCoordinates(1, 1, True)
        data = _action(coords, [coords.q(0)])
        report = check_condition(data, ConditionId.ALBERT_K1)
        assert report.holds
        assert report.lhs == Subspace.coordinate(coords.dim, [coords.t(0), coords.q(0)])

    def test_albert_needs_a_single_form(self):
        coords = StandardCoordinates(2, 1, True)
        with pytest.raises(PreconditionError):
            check_condition(_action(coords, [coords.q(0)]), ConditionId.ALBERT_K1)

    @pytest.mark.parametrize("condition", [ConditionId.NONDEG_POLYCO, ConditionId.C1, ConditionId.ALBERT_K1])
    def test_eta_conditions_need_eta(self, condition):
        coords = StandardCoordinates(1, 1, False)
        with pytest.raises(MissingEtaError):
            check_condition(_action(coords, [coords.q(0)]), condition)

    def test_condition_accepts_plain_strings(self):
        assert check_condition(a1_redundancy_instance(), "A2").condition_id == ConditionId.A2


class TestLinearReduce:
    """Reduced structure and its agreement with the nondegeneracy verdict"""

    def test_symplectic_reduction_by_translation(self):
        coords = StandardCoordinates(1, 2, False)
        reduction = linear_reduce(_action(coords, [coords.q(0)]))
        assert reduction.reduced.dim == 2
        assert reduction.kind.tag == StructureTag.POLYSYMPLECTIC
        assert reduction.condition.holds
        assert reduction.well_defined and reduction.consistent
        assert reduction.projection.rows == 2 and reduction.projection.cols == coords.dim

    def test_failed_condition_gives_invalid_reduction(self):
        data = JsonStorageAdapter().load_action(DATA / "bad_action.json")
        reduction = linear_reduce(data)
        assert reduction.reduced.dim == 3
        assert reduction.kind.tag == StructureTag.INVALID
        assert not reduction.condition.holds
        assert reduction.consistent and reduction.well_defined

    def test_irregular_reduction_is_still_consistent(self):
        reduction = linear_reduce(irregular_counterexample())
        assert not reduction.condition.holds
        assert reduction.consistent

    def test_cosymplectic_reduction(self):
        coords = StandardCoordinates(1, 1, True)
        reduction = linear_reduce(_action(coords, [coords.q(0)]))
        assert reduction.reduced.dim == 1
        assert reduction.kind.tag == StructureTag.POLYCOSYMPLECTIC


class TestDimensionCheck:
    """dim M_μ = dim M − k·dim G − dim G_μ"""

    def test_formula(self):
        coords = StandardCoordinates(1, 2, False)
        report = dimension_check(_action(coords, [coords.q(0)], g_dim=1), 1)
        assert report.reduced_dim == 2
        assert report.formula_holds and report.regularity_consistent

    def test_bad_action_dimensions(self):
        data = JsonStorageAdapter().load_action(DATA / "bad_action.json")
        report = dimension_check(data, 1)
        assert (report.isotropy_dim, report.reduced_dim, report.formula_dim) == (1, 3, 3)

    def test_irregular_value_is_reported(self):
        report = dimension_check(irregular_counterexample(), 1)
        assert not report.regularity_consistent

    def test_preconditions(self):
        coords = StandardCoordinates(1, 2, False)
        with pytest.raises(PreconditionError):
            dimension_check(_action(coords, [coords.q(0)], regular=False), 1)
        with pytest.raises(PreconditionError):
            dimension_check(_action(coords, [coords.q(0)]), 2)


class TestSupplementaryIdentities:
    """Single-form level kernel identity and isotropy bounds"""

    def test_level_kernel_identity(self):
        coords = StandardCoordinates(1, 2, False)
        side = level_kernel_identity(_action(coords, [coords.q(0), coords.p(0, 1)]))
        assert side.holds

    def test_level_kernel_identity_needs_k1(self):
        with pytest.raises(PreconditionError):
            level_kernel_identity(a1_redundancy_instance())

    @pytest.mark.parametrize("data", [a1_redundancy_instance(), irregular_counterexample()])
    def test_isotropy_bounds(self, data):
        assert all(isotropy_bounds(data).values())
