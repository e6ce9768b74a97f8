"""Tests for the M × ℝ lift of polycosymplectic data"""

from pathlib import Path

import pytest

from adapters.storage.json_storage import JsonStorageAdapter
from core.algebra.exactlin import Subspace
from core.domain.errors import PreconditionError
from core.domain.models import ActionPointData, FormFamily, InstanceKind, StructureTag
from core.geometry.examples import cross_product_family
from core.geometry.lift import (equivalence_check, lift_action,
                                lift_distribution_check, lift_structure,
                                lift_subspace, recover, verify_lift_lemma)
from core.geometry.random_instances import random_instance
from core.geometry.standard_models import StandardCoordinates, standard_model

DATA = Path(__file__).resolve().parent.parent / "data"


class TestLiftStructure:
    """ω̃^a = pr*ω^a + ds ∧ pr*η^a"""

    def test_standard_model_lifts_to_polysymplectic(self):
        forms = standard_model(2, 1, True)
        lifted = lift_structure(forms)
        assert lifted.lifted.dim == forms.dim + 1
        assert lifted.s_index == forms.dim
        assert lifted.lemma_applies
        assert lifted.lifted_kind.tag == StructureTag.POLYSYMPLECTIC
        assert lifted.lifted.eta is None

    def test_bordering_signs(self):
        forms = standard_model(1, 1, True)
        w = lift_structure(forms).lifted.omega[0]
        s = forms.dim
        # ω̃(∂t, ∂s) = −η(∂t) and ω̃(∂s, ∂t) = η(∂t)
        assert w[0, s] == -1 and w[s, 0] == 1

    def test_recover_inverts_lift(self):
        forms = cross_product_family()
        assert recover(lift_structure(forms)) == forms

    def test_lemma_premises(self):
        base = standard_model(2, 1, True)
        dependent = FormFamily(dim=base.dim, k=2, omega=base.omega, eta=(base.eta[0], base.eta[0]))
        lifted = lift_structure(dependent)
        assert not lifted.lemma_applies
        assert lifted.base_kind.tag == StructureTag.INVALID

    def test_invalid_base_has_invalid_lift(self):
        coords = StandardCoordinates(2, 1, True)
        base = coords.forms()
        eta = (base.eta[0], tuple(1 if j == coords.q(0) else 0 for j in range(base.dim)))
        forms = FormFamily.build([w.to_lists() for w in base.omega], eta)
        lifted = lift_structure(forms)
        assert lifted.lemma_applies
        assert lifted.base_kind.tag == StructureTag.INVALID
        assert lifted.lifted_kind.tag != StructureTag.POLYSYMPLECTIC

    @pytest.mark.parametrize("seed", range(6))
    def test_random_instances(self, seed):
        forms = random_instance(seed, 1, 2, InstanceKind.POLYCOSYMPLECTIC)
        lifted = lift_structure(forms)
        assert lifted.lifted_kind.tag == StructureTag.POLYSYMPLECTIC
        assert recover(lifted) == forms


class TestLiftAction:
    """Lifted actions, their orthogonal relations and reducibility"""

    def test_cross_product_action(self):
        data = JsonStorageAdapter().load_action(DATA / "r6_action.json")
        lifted = lift_action(data)
        assert lifted.gtilde == data.gtilde.embed(1)
        assert verify_lift_lemma(data).holds
        report = equivalence_check(data)
        assert report.base.holds and report.lifted.holds
        assert report.chain_agree

    def test_needs_polycosymplectic_data(self):
        coords = StandardCoordinates(2, 1, True)
        base = coords.forms()
        broken = FormFamily(dim=base.dim, k=2, omega=base.omega, eta=(base.eta[0], base.eta[0]))
        data = ActionPointData(forms=broken, gtilde=Subspace.zero(base.dim))
        with pytest.raises(PreconditionError):
            lift_action(data)

    @pytest.mark.parametrize("seed", range(8))
    def test_random_actions(self, seed):
        data = random_instance(seed, 1, 2, InstanceKind.ACTION_POLYCOSYMPLECTIC)
        lemma = verify_lift_lemma(data)
        assert lemma.holds
        assert lemma.regularity_preserved
        report = equivalence_check(data, strict=False)
        assert report.verdicts_agree and report.chain_agree

    def test_adversarial_action_is_not_reducible_on_either_side(self):
        data = random_instance(3, 1, 2, InstanceKind.ACTION_POLYCOSYMPLECTIC, adversarial=True)
        report = equivalence_check(data)
        assert not report.base.holds
        assert not report.lifted.holds


class TestLiftDistribution:
    """k-symplectic axioms for the lifted (𝒱 ⊕ D) × {0}"""

    def test_stable_cosymplectic_data(self):
        forms = FormFamily.build([[[0, 0, 0], [0, 0, 1], [0, -1, 0]]], [[1, 0, 0]])
        report = lift_distribution_check(forms, Subspace.from_generators(3, [(0, 1, 1)]))
        assert report.holds
        assert report.w_dim == 2
        assert report.lifted_w == lift_subspace(Subspace.from_generators(3, [(0, 1, 1), (1, 0, 0)]))

    def test_requires_kcosymplectic_axioms(self):
        forms = standard_model(1, 1, True)
        with pytest.raises(PreconditionError):
            lift_distribution_check(forms, Subspace.full(3))
