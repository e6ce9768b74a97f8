"""
Seeded random instances for property campaigns

Every instance is a standard model (or a planted counterexample) pushed
through a random invertible change of basis with small integer entries, so
nothing about its geometry is visible from the coordinates.
"""

import hashlib
import random
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import structlog

from core.algebra.exactlin import (Matrix, Subspace, Vector, inverse, rank,
                                   subspace_intersect)
from core.algebra.polynomials import MultiPoly
from core.domain.errors import InputError
from core.domain.models import ActionPointData, FormFamily, InstanceKind
from core.geometry.standard_models import (StandardCoordinates,
                                           a1_redundancy_family,
                                           standard_model)
from core.geometry.structures import covector_kernel, form_kernel

logger = structlog.get_logger(__name__)

DEFAULT_BOX = 2
MAX_AMBIENT = 40
_MAX_TRIES = 64

Instance = Union[FormFamily, ActionPointData]


def trial_seed(master_seed: int, trial: int) -> int:
    """First 8 bytes of sha256("master:trial") as a big-endian integer"""
    digest = hashlib.sha256(f"{master_seed}:{trial}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def random_matrix(rng: random.Random, rows: int, cols: int, box: int = DEFAULT_BOX) -> Matrix:
    return Matrix.from_rows([[rng.randint(-box, box) for _ in range(cols)] for _ in range(rows)], cols)


def random_invertible(rng: random.Random, n: int, box: int = DEFAULT_BOX) -> Matrix:
    """Rejection-sample an invertible integer matrix"""
    for _ in range(_MAX_TRIES):
        m = random_matrix(rng, n, n, box)
        if rank(m) == n:
            return m
    # unimodular fallback: identity plus a random strictly upper triangle
    grid = [[Fraction(1 if i == j else (rng.randint(-box, box) if j > i else 0)) for j in range(n)]
            for i in range(n)]
    return Matrix.from_rows(grid, n)


def random_singular(rng: random.Random, n: int, box: int = DEFAULT_BOX) -> Matrix:
    """Random matrix whose last column is a combination of the others"""
    base = random_invertible(rng, n, box)
    if n == 1:
        return Matrix.zeros(1, 1)
    coeffs = [rng.randint(-box, box) for _ in range(n - 1)]
    grid = base.to_lists()
    for row in grid:
        row[-1] = sum((c * x for c, x in zip(coeffs, row[:-1])), Fraction(0))
    return Matrix.from_rows(grid, n)


def random_subspace(rng: random.Random, within: Subspace, dim: int, box: int = DEFAULT_BOX) -> Subspace:
    """A random subspace of ``within`` of the requested dimension"""
    if dim > within.dim:
        raise InputError(f"cannot draw a {dim}-dimensional subspace from one of dimension {within.dim}")
    basis = within.vectors()
    for _ in range(_MAX_TRIES):
        gens = []
        for _ in range(dim):
            coeffs = [rng.randint(-box, box) for _ in basis]
            gens.append(tuple(sum((c * v[j] for c, v in zip(coeffs, basis)), Fraction(0))
                              for j in range(within.ambient_dim)))
        space = Subspace.from_generators(within.ambient_dim, gens)
        if space.dim == dim:
            return space
    chosen = rng.sample(range(len(basis)), dim)
    return Subspace.from_generators(within.ambient_dim, [basis[i] for i in sorted(chosen)])


def change_basis(forms: FormFamily, b: Matrix) -> FormFamily:
    """Pull back along v ↦ B·v: W ↦ Bᵀ·W·B and η ↦ η·B"""
    bt = b.transpose()
    omega = tuple(bt @ w @ b for w in forms.omega)
    eta = tuple(b.covector_apply(e) for e in forms.eta) if forms.has_eta else None
    return FormFamily(dim=forms.dim, k=forms.k, omega=omega, eta=eta)


def transform_subspace(space: Subspace, m: Matrix) -> Subspace:
    return Subspace.from_generators(space.ambient_dim, [m.apply(v) for v in space.vectors()])


def change_action_basis(data: ActionPointData, b: Matrix) -> ActionPointData:
    b_inv = inverse(b)
    return ActionPointData(forms=change_basis(data.forms, b), gtilde=transform_subspace(data.gtilde, b_inv),
                           regular=data.regular, g_dim=data.g_dim)


def _presymplectic(rng: random.Random, dim: int, box: int) -> FormFamily:
    r = rng.randint(0, dim // 2)
    grid = [[Fraction(0)] * dim for _ in range(dim)]
    for i in range(r):
        grid[2 * i][2 * i + 1], grid[2 * i + 1][2 * i] = Fraction(1), Fraction(-1)
    return change_basis(FormFamily.build([grid]), random_invertible(rng, dim, box))


def _break_joint_kernel(coords: StandardCoordinates) -> FormFamily:
    """Replace η^k by dq¹: η stays independent and dim ∩ker ω = k, but ∂t_k is in every kernel"""
    base = standard_model(coords.k, coords.n, True)
    eta = list(base.eta)
    eta[-1] = tuple(Fraction(1 if j == coords.q(0) else 0) for j in range(base.dim))
    return FormFamily(dim=base.dim, k=base.k, omega=base.omega, eta=tuple(eta))


def _dependent_eta(coords: StandardCoordinates) -> FormFamily:
    base = standard_model(coords.k, coords.n, True)
    eta = list(base.eta)
    eta[-1] = eta[0]
    return FormFamily(dim=base.dim, k=base.k, omega=base.omega, eta=tuple(eta))


def _gtilde_dim(rng: random.Random, space: Subspace) -> int:
    return rng.randint(0, min(space.dim, 3))


def random_instance(seed: int, n: int, k: int, kind: Union[InstanceKind, str], adversarial: bool = False,
                    box: int = DEFAULT_BOX) -> Instance:
    """
    Draw one instance.

    ``n`` is the ambient dimension for presymplectic draws and the number of
    base coordinates of the standard model otherwise. Adversarial draws plant
    a failure of the property the kind is usually used for.
    """
    try:
        kind = InstanceKind(kind)
    except ValueError:
        raise InputError(f"unknown instance kind {kind!r}") from None
    if k < 1 or n < 0:
        raise InputError(f"need k ≥ 1 and n ≥ 0, got k={k}, n={n}")
    rng = random.Random(seed)

    if kind == InstanceKind.PRESYMPLECTIC:
        if not 1 <= n <= MAX_AMBIENT:
            raise InputError(f"presymplectic dimension must lie in [1, {MAX_AMBIENT}], got {n}")
        return _presymplectic(rng, n, box)

    cosym = kind in (InstanceKind.POLYCOSYMPLECTIC, InstanceKind.COSYMPLECTIC,
                     InstanceKind.ACTION_POLYCOSYMPLECTIC)
    if kind == InstanceKind.COSYMPLECTIC:
        k = 1
    coords = StandardCoordinates(k, n, cosym)
    if coords.dim > MAX_AMBIENT or coords.dim == 0:
        raise InputError(f"model dimension {coords.dim} outside [1, {MAX_AMBIENT}]")
    b = random_invertible(rng, coords.dim, box)

    if kind == InstanceKind.POLYSYMPLECTIC:
        if adversarial:
            # planted kernel vector: pull back along a singular map
            return change_basis(standard_model(k, n, False), random_singular(rng, coords.dim, box))
        return change_basis(standard_model(k, n, False), b)

    if kind in (InstanceKind.POLYCOSYMPLECTIC, InstanceKind.COSYMPLECTIC):
        if adversarial:
            if n < 1:
                raise InputError("adversarial polycosymplectic draws need n ≥ 1")
            planted = _break_joint_kernel(coords) if rng.random() < 0.75 or k == 1 else _dependent_eta(coords)
            return change_basis(planted, b)
        return change_basis(coords.forms(), b)

    if kind == InstanceKind.ACTION_POLYSYMPLECTIC:
        if adversarial:
            if rng.random() < 0.5:
                # A1 fails, A2 and nondegeneracy hold; padded to the requested size when there is room
                extra = max(0, (coords.dim - 6) // 3)
                lagrangian = rng.sample(range(extra), rng.randint(0, extra))
                data = a1_redundancy_family(extra, lagrangian)
                return change_action_basis(data, random_invertible(rng, data.forms.dim, box))
            if n >= 2 and k >= 2:
                # regular, but T = T^ω is larger than g̃ = span{∂p¹₁ + ∂p²₂}
                forms = coords.forms()
                gen = [Fraction(0)] * forms.dim
                gen[coords.p(0, 0)] = gen[coords.p(1, 1)] = Fraction(1)
                space = Subspace.from_generators(forms.dim, [gen])
                return change_action_basis(ActionPointData(forms=forms, gtilde=space), b)
            if n >= 1 and k >= 2:
                # g̃ inside ker ω¹: the momentum constraints collapse and μ is not regular
                forms = coords.forms()
                space = random_subspace(rng, form_kernel(forms.omega[0]), 1, box)
                return change_action_basis(ActionPointData(forms=forms, gtilde=space), b)
        forms = coords.forms()
        full = Subspace.full(forms.dim)
        space = random_subspace(rng, full, _gtilde_dim(rng, full), box)
        return change_action_basis(ActionPointData(forms=forms, gtilde=space), b)

    forms = coords.forms()
    if adversarial and k >= 2 and n >= 1:
        # span{∂p^1_1} breaks nondegeneracy as soon as k ≥ 2
        space = Subspace.coordinate(forms.dim, [coords.p(0, 0)])
        return change_action_basis(ActionPointData(forms=forms, gtilde=space), b)
    eta_kernel = Subspace.full(forms.dim)
    for e in forms.eta:
        eta_kernel = subspace_intersect(eta_kernel, covector_kernel(e, forms.dim))
    space = random_subspace(rng, eta_kernel, _gtilde_dim(rng, eta_kernel), box)
    return change_action_basis(ActionPointData(forms=forms, gtilde=space), b)


def random_polynomial(rng: random.Random, variables: Sequence[str], degree: int = 2, terms: int = 4,
                      box: int = DEFAULT_BOX, exclude: Sequence[str] = ()) -> MultiPoly:
    """Sparse random polynomial of bounded total degree avoiding the ``exclude`` variables"""
    allowed = [i for i, v in enumerate(variables) if v not in set(exclude)]
    out: List[Tuple[int, Tuple[int, ...]]] = []
    for _ in range(terms):
        exps = [0] * len(variables)
        if allowed:
            for _ in range(rng.randint(0, degree)):
                exps[rng.choice(allowed)] += 1
        out.append((rng.randint(-box, box), tuple(exps)))
    return MultiPoly.from_terms(variables, out)


def random_point(rng: random.Random, dim: int, box: int = DEFAULT_BOX) -> Vector:
    return tuple(Fraction(rng.randint(-box, box)) for _ in range(dim))


def random_shape(rng: random.Random, dim_max: int, k_max: int, cosymplectic: bool,
                 k_min: int = 1, k_fixed: Optional[int] = None) -> Tuple[int, int]:
    """A (k, n) with (k+1)·n (+k) ≤ dim_max, n ≥ 1 whenever that fits"""
    k = k_fixed if k_fixed is not None else rng.randint(k_min, max(k_min, k_max))
    extra = k if cosymplectic else 0
    n_max = max(0, (dim_max - extra) // (k + 1))
    n = rng.randint(1, n_max) if n_max >= 1 else 0
    if n == 0 and not cosymplectic:
        raise InputError(f"dim_max={dim_max} leaves no room for a polysymplectic model with k={k}")
    return k, n
