"""
Tests for poly(co)symplectic structure identification

Covers the structure axioms, Reeb frames, the poly-orthogonal operator and
the linear k-(co)symplectic distribution checks.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.algebra.exactlin import Matrix, Subspace, subspace_sum, unit_vector
from core.domain.errors import (DimensionMismatchError, InputError,
                                MissingEtaError, PreconditionError,
                                StructureError)
from core.domain.models import FormFamily, StructureTag
from core.geometry.reduction import presymplectic_double_orthogonal
from core.geometry.standard_models import StandardCoordinates, standard_model
from core.geometry.structures import (ETA_DEPENDENT, JOINT_KERNEL_NONTRIVIAL,
                                      OMEGA_KERNEL_RANK, distribution_checks,
                                      double_orthogonal, eta_splitting_holds,
                                      form_kernel, identify_structure,
                                      is_isotropic, joint_kernel,
                                      poly_orthogonal, reeb_solve)
from tests.strategies import skew_matrices, subspaces


def _momentum_distribution(coords: StandardCoordinates) -> Subspace:
    return Subspace.coordinate(coords.dim, [coords.p(a, i) for a in range(coords.k) for i in range(coords.n)])


class TestFormFamily:
    """Validation of raw form data"""

    def test_rejects_non_skew(self):
        with pytest.raises(StructureError):
            FormFamily.build([[[1, 0], [0, 0]]])

    def test_rejects_bad_eta(self):
        with pytest.raises(StructureError):
            FormFamily.build([[[0, 1], [-1, 0]]], [[1, 0], [0, 1]])
        with pytest.raises(DimensionMismatchError):
            FormFamily.build([[[0, 1], [-1, 0]]], [[1, 0, 0]])

    def test_missing_eta(self):
        with pytest.raises(MissingEtaError):
            standard_model(1, 1, False).require_eta()


class TestIdentifyStructure:
    """Polysymplectic, polycosymplectic, presymplectic or invalid"""

    @pytest.mark.parametrize("k,n", [(1, 1), (2, 1), (3, 2)])
    def test_standard_models(self, k, n):
        assert identify_structure(standard_model(k, n, False)).tag == StructureTag.POLYSYMPLECTIC
        assert identify_structure(standard_model(k, n, True)).tag == StructureTag.POLYCOSYMPLECTIC

    def test_single_degenerate_form_is_presymplectic(self):
        forms = FormFamily.build([[[0, 1, 0], [-1, 0, 0], [0, 0, 0]]])
        kind = identify_structure(forms)
        assert kind.tag == StructureTag.PRESYMPLECTIC_SINGLE
        assert kind.diagnostics == (JOINT_KERNEL_NONTRIVIAL,)

    def test_degenerate_family_is_invalid(self):
        base = standard_model(2, 1, False)
        padded = FormFamily.build(
            [[list(w.row(i)) + [0] for i in range(3)] + [[0] * 4] for w in base.omega])
        assert identify_structure(padded).tag == StructureTag.INVALID

    def test_dependent_eta(self):
        base = standard_model(2, 1, True)
        forms = FormFamily(dim=base.dim, k=2, omega=base.omega, eta=(base.eta[0], base.eta[0]))
        kind = identify_structure(forms)
        assert kind.tag == StructureTag.INVALID
        assert ETA_DEPENDENT in kind.diagnostics

    def test_joint_kernel_detected(self):
        # replacing η² by dq leaves ∂t² in every kernel
        coords = StandardCoordinates(2, 1, True)
        base = coords.forms()
        forms = FormFamily(dim=base.dim, k=2, omega=base.omega,
                           eta=(base.eta[0], unit_vector(base.dim, coords.q(0))))
        kind = identify_structure(forms)
        assert kind.tag == StructureTag.INVALID
        assert kind.diagnostics == (JOINT_KERNEL_NONTRIVIAL,)
        assert kind.metrics["joint_kernel_dim"] == 1

    def test_omega_kernel_rank(self):
        forms = FormFamily.build([[[0, 0, 0], [0, 0, 0], [0, 0, 0]]], [[1, 0, 0]])
        assert OMEGA_KERNEL_RANK in identify_structure(forms).diagnostics


class TestReeb:
    """Reeb frames of polycosymplectic families"""

    def test_standard_reeb_is_time_directions(self):
        forms = standard_model(2, 2, True)
        frame = reeb_solve(forms)
        assert list(frame.reeb) == [unit_vector(forms.dim, 0), unit_vector(forms.dim, 1)]
        assert frame.span == joint_kernel(forms)
        assert eta_splitting_holds(forms, frame)

    def test_needs_polycosymplectic(self):
        with pytest.raises(PreconditionError):
            reeb_solve(FormFamily.build([[[0, 0], [0, 0]]], [[1, 0]]))


class TestPolyOrthogonal:
    """S^ω over a subset of the forms"""

    def test_orthogonal_of_position_direction(self):
        coords = StandardCoordinates(2, 1, True)
        forms = coords.forms()
        s = Subspace.coordinate(forms.dim, [coords.q(0)])
        expected = Subspace.coordinate(forms.dim, [0, 1, coords.q(0)])
        assert poly_orthogonal(s, forms) == expected
        assert double_orthogonal(s, forms) == expected
        assert poly_orthogonal(s, forms, [0]) == Subspace.coordinate(
            forms.dim, [0, 1, coords.q(0), coords.p(1, 0)])

    def test_zero_subspace_is_orthogonal_to_everything(self):
        forms = standard_model(2, 1, False)
        assert poly_orthogonal(Subspace.zero(forms.dim), forms).is_full()

    def test_indices_are_validated(self):
        forms = standard_model(2, 1, False)
        s = Subspace.zero(forms.dim)
        with pytest.raises(InputError):
            poly_orthogonal(s, forms, [2])
        with pytest.raises(InputError):
            poly_orthogonal(s, forms, [])
        with pytest.raises(DimensionMismatchError):
            poly_orthogonal(Subspace.zero(forms.dim + 1), forms)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 6).flatmap(lambda n: st.tuples(skew_matrices(n), subspaces(n))))
    def test_single_form_double_orthogonal(self, pair):
        w, s = pair
        side = presymplectic_double_orthogonal(w, s)
        assert side.holds
        assert side.rhs == subspace_sum(s, form_kernel(w))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 6).flatmap(lambda n: st.tuples(skew_matrices(n), skew_matrices(n), subspaces(n))))
    def test_orthogonal_contains_double(self, triple):
        w1, w2, s = triple
        forms = FormFamily(dim=w1.rows, k=2, omega=(w1, w2))
        assert s.is_subset(double_orthogonal(s, forms))


class TestDistributionChecks:
    """Linear k-symplectic and k-cosymplectic axioms"""

    def test_standard_polycosymplectic_model(self):
        coords = StandardCoordinates(2, 2, True)
        report = distribution_checks(coords.forms(), _momentum_distribution(coords))
        assert report.kcosymplectic_holds
        assert not report.ksymplectic_holds
        assert "reeb_bracket" in report.not_checkable

    def test_standard_polysymplectic_model(self):
        coords = StandardCoordinates(2, 2, False)
        report = distribution_checks(coords.forms(), _momentum_distribution(coords))
        assert report.ksymplectic_holds
        assert report.kcosymplectic is None
        assert report.not_checkable == ("involutivity",)

    def test_non_isotropic_distribution(self):
        coords = StandardCoordinates(1, 1, False)
        forms = coords.forms()
        assert not is_isotropic(Subspace.full(2), forms.omega[0])
        report = distribution_checks(forms, Subspace.coordinate(2, [coords.q(0)]))
        assert report.ksymplectic["isotropic"]
        assert report.ksymplectic["rank"]

    def test_reeb_must_be_transversal(self):
        coords = StandardCoordinates(1, 1, True)
        v = Subspace.coordinate(coords.dim, [coords.t(0)])
        report = distribution_checks(coords.forms(), v)
        assert not report.kcosymplectic["reeb_transversal"]


def test_form_kernel_matches_matrix_nullspace():
    w = Matrix.from_rows([[0, 2, 0], [-2, 0, 0], [0, 0, 0]])
    assert form_kernel(w) == Subspace.coordinate(3, [2])
    assert Fraction(2) == w.bilinear(unit_vector(3, 0), unit_vector(3, 1))
