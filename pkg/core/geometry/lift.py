"""
The M × ℝ lift of a polycosymplectic family

ω̃^a(v⊕σ, w⊕τ) = ω^a(v, w) + σ·η^a(w) − τ·η^a(v), with the new coordinate s
appended last.
"""

from fractions import Fraction
from typing import List

import structlog

from core.algebra.exactlin import Matrix, Subspace, intersect_all, subspace_sum
from core.domain.errors import InvariantViolation, PreconditionError
from core.domain.models import (ActionPointData, ConditionId, EquivalenceReport,
                                FormFamily, LiftDistributionReport, LiftedFamily,
                                LiftLemmaReport, SideComparison, StructureTag)
from core.geometry.reduction import check_condition, derive_geometry
from core.geometry.structures import (ETA_DEPENDENT, OMEGA_KERNEL_RANK,
                                      covector_kernel, distribution_checks,
                                      double_orthogonal, identify_structure,
                                      reeb_solve)

logger = structlog.get_logger(__name__)


def _lifted_matrix(w: Matrix, eta) -> Matrix:
    n = w.rows
    grid: List[List[Fraction]] = [list(w.row(i)) + [-eta[i]] for i in range(n)]
    grid.append(list(eta) + [Fraction(0)])
    return Matrix.from_rows(grid, n + 1)


def lift_structure(forms: FormFamily, strict: bool = True) -> LiftedFamily:
    """
    Build ω̃^a = pr*ω^a + ds ∧ pr*η^a on ℚ^(n+1).

    When η is independent and the joint ω-kernel has dimension k, the lift is
    polysymplectic exactly when the base is polycosymplectic; a mismatch
    there raises InvariantViolation (``strict``) or is logged.
    """
    eta = forms.require_eta()
    lifted = FormFamily(dim=forms.dim + 1, k=forms.k,
                        omega=tuple(_lifted_matrix(w, e) for w, e in zip(forms.omega, eta)))
    base_kind = identify_structure(forms)
    lifted_kind = identify_structure(lifted)
    applies = not ({ETA_DEPENDENT, OMEGA_KERNEL_RANK} & set(base_kind.diagnostics))

    if applies:
        base_ok = base_kind.tag == StructureTag.POLYCOSYMPLECTIC
        lifted_ok = lifted_kind.tag == StructureTag.POLYSYMPLECTIC
        if base_ok != lifted_ok:
            logger.error("lift verdict mismatch", base=base_kind.tag.value, lifted=lifted_kind.tag.value)
            if strict:
                raise InvariantViolation(
                    f"base is {base_kind.tag.value} but its lift is {lifted_kind.tag.value}"
                )

    return LiftedFamily(base=forms, lifted=lifted, s_index=forms.dim, base_kind=base_kind,
                        lifted_kind=lifted_kind, lemma_applies=applies)


def recover(lifted: LiftedFamily) -> FormFamily:
    """ω^a = i₀*ω̃^a and η^a = i₀*(i_{∂s} ω̃^a)"""
    s = lifted.s_index
    keep = [i for i in range(lifted.lifted.dim) if i != s]
    omega = tuple(w.submatrix(keep, keep) for w in lifted.lifted.omega)
    eta = tuple(tuple(w[s, j] for j in keep) for w in lifted.lifted.omega)
    return FormFamily(dim=len(keep), k=lifted.lifted.k, omega=omega, eta=eta)


def _require_polycosymplectic(data: ActionPointData) -> None:
    data.forms.require_eta()
    kind = identify_structure(data.forms)
    if kind.tag != StructureTag.POLYCOSYMPLECTIC:
        raise PreconditionError(
            f"lifting an action needs polycosymplectic data, got {kind.tag.value} {list(kind.diagnostics)}"
        )


def lift_action(data: ActionPointData) -> ActionPointData:
    """(ω̃^a, g̃ × {0}); the lifted momentum map is J∘pr"""
    _require_polycosymplectic(data)
    lifted = lift_structure(data.forms)
    return ActionPointData(forms=lifted.lifted, gtilde=data.gtilde.embed(1),
                           regular=data.regular, g_dim=data.g_dim)


def _side(index: int, lhs: Subspace, rhs: Subspace) -> SideComparison:
    return SideComparison(index=index, holds=lhs == rhs, lhs=lhs, rhs=rhs)


def verify_lift_lemma(data: ActionPointData) -> LiftLemmaReport:
    """Orthogonal relations between an action and its lift"""
    _require_polycosymplectic(data)
    forms = data.forms
    lifted = lift_action(data)
    base = derive_geometry(data)
    top = derive_geometry(lifted)

    eta_kernels = [covector_kernel(e, forms.dim) for e in forms.eta]
    double = double_orthogonal(data.gtilde, forms)
    report = LiftLemmaReport(
        isotropy=_side(0, top.isotropy, base.isotropy.embed(1)),
        orthogonal=_side(1, top.level_tangent, base.level_tangent.product(Subspace.full(1))),
        double_orthogonal=_side(
            2,
            double_orthogonal(lifted.gtilde, lifted.forms),
            intersect_all(eta_kernels + [double], forms.dim).embed(1),
        ),
        regularity_preserved=top.level_tangent.codim == base.level_tangent.codim,
    )
    if not report.holds:
        logger.error("lift lemma identity failed", isotropy=report.isotropy.holds,
                     orthogonal=report.orthogonal.holds,
                     double_orthogonal=report.double_orthogonal.holds)
    return report


def equivalence_check(data: ActionPointData, strict: bool = True) -> EquivalenceReport:
    """Reducibility of the base against reducibility of its lift, plus C1 against A2 on the lift"""
    _require_polycosymplectic(data)
    lifted = lift_action(data)
    report = EquivalenceReport(
        base=check_condition(data, ConditionId.NONDEG_POLYCO),
        lifted=check_condition(lifted, ConditionId.NONDEG_POLYSYM),
        c1=check_condition(data, ConditionId.C1),
        a2_lifted=check_condition(lifted, ConditionId.A2),
    )
    if not (report.verdicts_agree and report.chain_agree):
        logger.error("reduction verdicts of base and lift disagree",
                     base=report.base.holds, lifted=report.lifted.holds,
                     c1=report.c1.holds, a2_lifted=report.a2_lifted.holds)
        if strict:
            raise InvariantViolation("base and lifted reduction verdicts disagree")
    return report


def lift_subspace(space: Subspace) -> Subspace:
    """W ↦ W × {0}"""
    return space.embed(1)


def lift_distribution_check(forms: FormFamily, distribution: Subspace) -> LiftDistributionReport:
    """k-symplectic linear axioms for (ω̃^a, (𝒱 ⊕ D) × {0})"""
    base_report = distribution_checks(forms, distribution)
    if not base_report.kcosymplectic_holds:
        failed = [name for name, ok in (base_report.kcosymplectic or {}).items() if not ok]
        raise PreconditionError(f"k-cosymplectic linear axioms fail: {failed or ['missing eta']}")
    widened = subspace_sum(distribution, reeb_solve(forms).span)
    lifted = lift_structure(forms)
    lifted_w = lift_subspace(widened)
    top_report = distribution_checks(lifted.lifted, lifted_w)
    return LiftDistributionReport(
        w_dim=widened.dim,
        lifted_w=lifted_w,
        rank_holds=top_report.ksymplectic["dimension"] and top_report.ksymplectic["rank"],
        isotropic=top_report.ksymplectic["isotropic"],
        lifted_structure=lifted.lifted_kind,
    )
