"""
Pointwise reduction geometry of a Hamiltonian G-space

Everything is derived from ActionPointData: the level tangent space
T = g̃^ω, the isotropy g̃_μ = g̃ ∩ T and its per-form components
g̃_{μ_a} = g̃ ∩ g̃^{ω^a}. Condition checkers compare two canonical subspaces.
"""

from fractions import Fraction
from typing import List

import structlog

from core.algebra.exactlin import (Matrix, Subspace, intersect_all, quotient_map,
                                   subspace_intersect, subspace_sum)
from core.domain.errors import PreconditionError
from core.domain.models import (ActionPointData, ConditionId, ConditionReport,
                                DerivedGeometry, DimensionReport, FormFamily,
                                LinearReduction, SideComparison)
from core.geometry.structures import (covector_kernel, double_orthogonal,
                                      form_kernel, identify_structure,
                                      poly_orthogonal, reeb_solve)

logger = structlog.get_logger(__name__)

ETA_CONDITIONS = (ConditionId.NONDEG_POLYCO, ConditionId.C1, ConditionId.ALBERT_K1)


def derive_geometry(data: ActionPointData) -> DerivedGeometry:
    forms, g = data.forms, data.gtilde
    level = poly_orthogonal(g, forms)
    isotropy = subspace_intersect(g, level)
    components = tuple(
        subspace_intersect(g, poly_orthogonal(g, forms, [a])) for a in range(forms.k)
    )
    kernels = tuple(form_kernel(w) for w in forms.omega)
    logger.debug("derived geometry", level_dim=level.dim, isotropy_dim=isotropy.dim,
                 gtilde_dim=g.dim)
    return DerivedGeometry(level_tangent=level, isotropy=isotropy,
                           isotropy_component=components, per_form_kernel=kernels)


def _compare(condition_id: ConditionId, lhs: Subspace, rhs: Subspace, **extra) -> ConditionReport:
    holds = lhs == rhs
    if extra.get("direct_sum") is False:
        holds = False
    return ConditionReport(condition_id=condition_id, holds=holds, lhs=lhs, rhs=rhs, **extra)


def _nondeg_polyco(data: ActionPointData, geo: DerivedGeometry, condition_id: ConditionId) -> ConditionReport:
    reeb_span = reeb_solve(data.forms).span
    lhs = subspace_sum(reeb_span, geo.isotropy)
    direct = subspace_intersect(reeb_span, geo.isotropy).is_zero()
    level = geo.level_tangent
    rhs = subspace_intersect(level, poly_orthogonal(level, data.forms))
    return _compare(condition_id, lhs, rhs, direct_sum=direct)


def _intersected_condition(data: ActionPointData, geo: DerivedGeometry,
                           kernels: List[Subspace], condition_id: ConditionId) -> ConditionReport:
    dim = data.forms.dim
    pieces = [subspace_sum(geo.isotropy_component[a], kernels[a]) for a in range(data.forms.k)]
    rhs = intersect_all(pieces + [geo.level_tangent], dim)
    return _compare(condition_id, geo.isotropy, rhs)


def check_condition(data: ActionPointData, condition_id: ConditionId) -> ConditionReport:
    condition_id = ConditionId(condition_id)
    forms = data.forms
    if condition_id in ETA_CONDITIONS:
        forms.require_eta()
    geo = derive_geometry(data)

    if condition_id == ConditionId.NONDEG_POLYSYM:
        level = geo.level_tangent
        report = _compare(condition_id, geo.isotropy,
                          subspace_intersect(level, poly_orthogonal(level, forms)))

    elif condition_id == ConditionId.NONDEG_POLYCO:
        report = _nondeg_polyco(data, geo, condition_id)

    elif condition_id == ConditionId.ALBERT_K1:
        if forms.k != 1:
            raise PreconditionError(f"Albert's condition concerns k = 1, got k = {forms.k}")
        report = _nondeg_polyco(data, geo, condition_id)

    elif condition_id == ConditionId.A1:
        per_index = []
        for a in range(forms.k):
            lhs = poly_orthogonal(data.gtilde, forms, [a])
            rhs = subspace_sum(subspace_sum(geo.level_tangent, geo.per_form_kernel[a]),
                               geo.isotropy_component[a])
            per_index.append(SideComparison(index=a, holds=lhs == rhs, lhs=lhs, rhs=rhs))
        shown = next((c for c in per_index if not c.holds), per_index[0])
        report = ConditionReport(condition_id=condition_id,
                                 holds=all(c.holds for c in per_index),
                                 lhs=shown.lhs, rhs=shown.rhs, per_index=tuple(per_index))

    elif condition_id == ConditionId.A2:
        report = _intersected_condition(data, geo, list(geo.per_form_kernel), condition_id)

    else:
        eta = forms.require_eta()
        kernels = [subspace_intersect(geo.per_form_kernel[a], covector_kernel(eta[a], forms.dim))
                   for a in range(forms.k)]
        report = _intersected_condition(data, geo, kernels, condition_id)

    logger.debug("checked condition", condition=condition_id.value, holds=report.holds)
    return report


def linear_reduce(data: ActionPointData) -> LinearReduction:
    """Push the forms down to T / (g̃ ∩ T)"""
    forms = data.forms
    geo = derive_geometry(data)
    qm = quotient_map(geo.level_tangent, geo.isotropy)
    section = qm.section

    # classes are independent of representatives iff g̃_μ is in every ker(ω^a|_T) and ker η^a
    iso_vectors = geo.isotropy.vectors()
    level_vectors = geo.level_tangent.vectors()
    well_defined = all(w.bilinear(u, t) == 0 for w in forms.omega
                       for u in iso_vectors for t in level_vectors)
    if forms.has_eta:
        well_defined = well_defined and all(
            sum((x * y for x, y in zip(e, u)), Fraction(0)) == 0
            for e in forms.eta for u in iso_vectors)

    m = qm.projected_dim
    omega = tuple(w.congruence(section) if m else Matrix(0, 0, ()) for w in forms.omega)
    eta = None
    if forms.has_eta:
        eta = tuple(section.apply(e) if m else () for e in forms.eta)
    reduced = FormFamily(dim=m, k=forms.k, omega=omega, eta=eta)

    condition = check_condition(
        data, ConditionId.NONDEG_POLYCO if forms.has_eta else ConditionId.NONDEG_POLYSYM)
    kind = identify_structure(reduced)
    result = LinearReduction(reduced=reduced, projection=qm.projection_matrix(), kind=kind,
                             condition=condition, well_defined=well_defined)
    if not result.consistent:
        logger.warning("reduced structure disagrees with nondegeneracy verdict",
                       tag=kind.tag.value, condition=condition.holds)
    return result


def dimension_check(data: ActionPointData, g_dim: int) -> DimensionReport:
    """dim M_μ = dim M − k·dim G − dim G_μ at the linear level, with a regularity audit"""
    if not data.regular:
        raise PreconditionError("dimension bookkeeping needs μ asserted regular")
    if data.gtilde.dim != g_dim:
        raise PreconditionError(
            f"free action expected: dim g̃ = {data.gtilde.dim} but dim g = {g_dim}"
        )
    geo = derive_geometry(data)
    dim, k = data.forms.dim, data.forms.k
    report = DimensionReport(
        ambient_dim=dim,
        g_dim=g_dim,
        isotropy_dim=geo.isotropy.dim,
        reduced_dim=geo.level_tangent.dim - geo.isotropy.dim,
        formula_dim=dim - k * g_dim - geo.isotropy.dim,
        level_codim=geo.level_tangent.codim,
        expected_codim=k * g_dim,
    )
    if not report.regularity_consistent:
        logger.warning("regularity assertion inconsistent with the level tangent space",
                       level_codim=report.level_codim, expected_codim=report.expected_codim)
    return report


def presymplectic_double_orthogonal(omega: Matrix, space: Subspace) -> SideComparison:
    """S^{ΩΩ} against S + ker Ω for a single form"""
    forms = FormFamily(dim=omega.rows, k=1, omega=(omega,))
    lhs = double_orthogonal(space, forms)
    rhs = subspace_sum(space, form_kernel(omega))
    return SideComparison(index=0, holds=lhs == rhs, lhs=lhs, rhs=rhs)


def level_kernel_identity(data: ActionPointData) -> SideComparison:
    """For k = 1: ker(Ω|_T) = T ∩ T^Ω equals ker Ω + g̃_μ"""
    forms = data.forms
    if forms.k != 1:
        raise PreconditionError(f"the level kernel identity concerns a single form, got k = {forms.k}")
    geo = derive_geometry(data)
    level = geo.level_tangent
    lhs = subspace_intersect(level, poly_orthogonal(level, forms))
    rhs = subspace_sum(geo.per_form_kernel[0], geo.isotropy)
    return SideComparison(index=0, holds=lhs == rhs, lhs=lhs, rhs=rhs)


def isotropy_bounds(data: ActionPointData) -> dict:
    """Inclusions that hold for every action: g̃_μ ⊆ g̃^ω ∩ g̃^{ωω} and g̃ ⊆ g̃^{ωω}"""
    geo = derive_geometry(data)
    double = double_orthogonal(data.gtilde, data.forms)
    return {
        "isotropy_in_level_kernel": geo.isotropy.is_subset(
            subspace_intersect(geo.level_tangent, double)),
        "gtilde_in_double_orthogonal": data.gtilde.is_subset(double),
    }
