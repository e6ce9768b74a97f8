"""Tests for seeded random instances"""

import hashlib
import random

import pytest

from core.algebra.exactlin import Subspace, rank
from core.domain.errors import InputError
from core.domain.models import ActionPointData, InstanceKind, StructureTag
from core.geometry.random_instances import (MAX_AMBIENT, change_basis,
                                            random_instance, random_invertible,
                                            random_polynomial, random_shape,
                                            random_singular, random_subspace,
                                            trial_seed)
from core.geometry.standard_models import StandardCoordinates, standard_model
from core.geometry.structures import identify_structure


class TestSeeds:
    """Per-trial seed derivation"""

    def test_trial_seed_is_sha256_prefix(self):
        digest = hashlib.sha256(b"7:3").digest()
        assert trial_seed(7, 3) == int.from_bytes(digest[:8], "big")

    def test_trial_seeds_differ(self):
        assert len({trial_seed(20240501, t) for t in range(50)}) == 50

    def test_same_seed_same_instance(self):
        a = random_instance(11, 2, 2, InstanceKind.ACTION_POLYCOSYMPLECTIC)
        b = random_instance(11, 2, 2, "action_polycosymplectic")
        assert a == b


class TestMatrices:
    """Random change-of-basis matrices"""

    @pytest.mark.parametrize("n", [1, 3, 6])
    def test_invertible(self, n):
        assert rank(random_invertible(random.Random(n), n)) == n

    @pytest.mark.parametrize("n", [1, 3, 6])
    def test_singular(self, n):
        assert rank(random_singular(random.Random(n), n)) < n

    def test_change_basis_preserves_structure(self):
        forms = standard_model(2, 2, True)
        moved = change_basis(forms, random_invertible(random.Random(5), forms.dim))
        assert identify_structure(moved).tag == StructureTag.POLYCOSYMPLECTIC

    def test_random_subspace_dimension(self):
        within = Subspace.coordinate(5, [0, 2, 4])
        space = random_subspace(random.Random(1), within, 2)
        assert space.dim == 2 and space.is_subset(within)
        with pytest.raises(InputError):
            random_subspace(random.Random(1), within, 4)


class TestRandomInstance:
    """Valid draws and planted failures"""

    @pytest.mark.parametrize("seed", range(5))
    def test_valid_draws(self, seed):
        assert identify_structure(random_instance(seed, 2, 2, "polysymplectic")).tag == StructureTag.POLYSYMPLECTIC
        assert identify_structure(random_instance(seed, 2, 2, "polycosymplectic")).tag == \
            StructureTag.POLYCOSYMPLECTIC
        cosym = random_instance(seed, 2, 3, InstanceKind.COSYMPLECTIC)
        assert cosym.k == 1
        assert identify_structure(cosym).tag == StructureTag.POLYCOSYMPLECTIC

    @pytest.mark.parametrize("seed", range(5))
    def test_adversarial_draws(self, seed):
        polysym = random_instance(seed, 2, 2, "polysymplectic", adversarial=True)
        assert identify_structure(polysym).tag != StructureTag.POLYSYMPLECTIC
        polyco = random_instance(seed, 2, 2, "polycosymplectic", adversarial=True)
        assert identify_structure(polyco).tag == StructureTag.INVALID

    @pytest.mark.parametrize("seed", range(5))
    def test_action_draws(self, seed):
        data = random_instance(seed, 1, 2, InstanceKind.ACTION_POLYCOSYMPLECTIC)
        assert isinstance(data, ActionPointData)
        assert data.forms.dim == StandardCoordinates(2, 1).dim
        assert data.gtilde.dim <= 3

    def test_presymplectic_dimension(self):
        forms = random_instance(3, 7, 1, InstanceKind.PRESYMPLECTIC)
        assert forms.dim == 7 and forms.k == 1
        with pytest.raises(InputError):
            random_instance(3, MAX_AMBIENT + 1, 1, InstanceKind.PRESYMPLECTIC)

    def test_rejects_bad_parameters(self):
        with pytest.raises(InputError):
            random_instance(0, 1, 0, "polysymplectic")
        with pytest.raises(InputError):
            random_instance(0, 1, 1, "no-such-kind")
        with pytest.raises(InputError):
            random_instance(0, 0, 2, "polycosymplectic", adversarial=True)


class TestShapesAndPolynomials:
    """Shapes within a dimension budget and sparse polynomials"""

    @pytest.mark.parametrize("seed", range(10))
    def test_shape_fits_budget(self, seed):
        k, n = random_shape(random.Random(seed), 12, 3, True)
        assert 1 <= k <= 3
        assert (k + 1) * n + k <= 12

    def test_polysymplectic_shape_needs_room(self):
        with pytest.raises(InputError):
            random_shape(random.Random(0), 2, 3, False, k_fixed=3)

    def test_polynomial_avoids_excluded_variables(self):
        names = StandardCoordinates(2, 1).names()
        p = random_polynomial(random.Random(4), names, degree=3, terms=6, exclude=["q1", "t1"])
        assert p.degree_in("q1") == 0 and p.degree_in("t1") == 0
        assert p.total_degree() <= 3
