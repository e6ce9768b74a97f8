"""
Poly(co)symplectic linear structures

Validation of a FormFamily against the structure axioms, Reeb frames and the
poly-orthogonal operator. Forms act by ω(v, w) = vᵀ·W·w, so i_v ω is the row
vᵀ·W and ker ω is the nullspace of W.
"""

from fractions import Fraction
from typing import Iterable, List, Optional, Sequence

import structlog

from core.algebra.exactlin import (Matrix, Subspace, nullspace, rank, solve,
                                   subspace_intersect, unit_vector)
from core.domain.errors import (DimensionMismatchError, InputError,
                                InvariantViolation, PreconditionError)
from core.domain.models import (DistributionReport, FormFamily, ReebFrame,
                                StructureKind, StructureTag)

logger = structlog.get_logger(__name__)

ETA_DEPENDENT = "eta_dependent"
JOINT_KERNEL_NONTRIVIAL = "joint_kernel_nontrivial"
OMEGA_KERNEL_RANK = "omega_kernel_rank"


def form_kernel(w: Matrix) -> Subspace:
    return nullspace(w)


def covector_kernel(eta: Sequence[Fraction], dim: int) -> Subspace:
    return nullspace(Matrix.from_rows([eta], dim))


def joint_kernel(forms: FormFamily, use_eta: bool = False) -> Subspace:
    """∩ ker ω^a, and also ∩ ker η^a when ``use_eta`` is set"""
    rows: List[Sequence[Fraction]] = []
    for w in forms.omega:
        rows.extend(w.row_list())
    if use_eta:
        rows.extend(forms.require_eta())
    if not rows:
        return Subspace.full(forms.dim)
    return nullspace(Matrix.from_rows(rows, forms.dim))


def identify_structure(forms: FormFamily) -> StructureKind:
    omega_kernel = joint_kernel(forms)
    metrics = {"omega_kernel_dim": omega_kernel.dim}
    diagnostics: List[str] = []

    if forms.has_eta:
        eta_rank = rank(forms.eta_matrix())
        full_kernel = joint_kernel(forms, use_eta=True)
        metrics.update(eta_rank=eta_rank, joint_kernel_dim=full_kernel.dim)
        if eta_rank != forms.k:
            diagnostics.append(ETA_DEPENDENT)
        if not full_kernel.is_zero():
            diagnostics.append(JOINT_KERNEL_NONTRIVIAL)
        if omega_kernel.dim != forms.k:
            diagnostics.append(OMEGA_KERNEL_RANK)
        tag = StructureTag.INVALID if diagnostics else StructureTag.POLYCOSYMPLECTIC
    else:
        if omega_kernel.is_zero():
            tag = StructureTag.POLYSYMPLECTIC
        else:
            diagnostics.append(JOINT_KERNEL_NONTRIVIAL)
            tag = StructureTag.PRESYMPLECTIC_SINGLE if forms.k == 1 else StructureTag.INVALID

    logger.debug("identified structure", tag=tag.value, diagnostics=diagnostics, **metrics)
    return StructureKind(tag=tag, diagnostics=tuple(diagnostics), metrics=metrics)


def reeb_solve(forms: FormFamily) -> ReebFrame:
    """The unique R_a with i_{R_a}ω^b = 0 and η^b(R_a) = δ_a^b"""
    kind = identify_structure(forms)
    if kind.tag != StructureTag.POLYCOSYMPLECTIC:
        raise PreconditionError(
            f"Reeb vectors need a polycosymplectic family, got {kind.tag.value} {list(kind.diagnostics)}"
        )
    eta = forms.require_eta()
    system = Matrix.from_rows([r for w in forms.omega for r in w.row_list()] + list(eta), forms.dim)
    zeros = [Fraction(0)] * (forms.k * forms.dim)
    reeb = []
    for a in range(forms.k):
        particular, freedom = solve(system, zeros + list(unit_vector(forms.k, a)))
        if not freedom.is_zero():
            raise InvariantViolation(f"Reeb vector R_{a + 1} is not unique ({freedom.dim} free directions)")
        reeb.append(particular)
    return ReebFrame(reeb=tuple(reeb), span=Subspace.from_generators(forms.dim, reeb))


def _normalize_indices(forms: FormFamily, indices: Optional[Iterable[int]]) -> List[int]:
    if indices is None:
        return list(range(forms.k))
    idx = sorted(set(indices))
    if not idx:
        raise InputError("poly-orthogonal needs a non-empty set of form indices")
    bad = [a for a in idx if not 0 <= a < forms.k]
    if bad:
        raise InputError(f"form indices {bad} out of range for k={forms.k}")
    return idx


def poly_orthogonal(space: Subspace, forms: FormFamily,
                    indices: Optional[Iterable[int]] = None) -> Subspace:
    """{v : ω^a(v, S) = 0 for a in indices}; indices are 0-based, default all"""
    if space.ambient_dim != forms.dim:
        raise DimensionMismatchError(
            f"subspace in dimension {space.ambient_dim}, forms in dimension {forms.dim}"
        )
    idx = _normalize_indices(forms, indices)
    rows = [forms.omega[a].covector_apply(s) for a in idx for s in space.vectors()]
    if not rows:
        return Subspace.full(forms.dim)
    return nullspace(Matrix.from_rows(rows, forms.dim))


def double_orthogonal(space: Subspace, forms: FormFamily,
                      indices: Optional[Iterable[int]] = None) -> Subspace:
    idx = None if indices is None else list(indices)
    return poly_orthogonal(poly_orthogonal(space, forms, idx), forms, idx)


def eta_splitting_holds(forms: FormFamily, frame: ReebFrame) -> bool:
    """For each a: R_a ∉ ker η^a and ker η^a is a hyperplane"""
    for a, e in enumerate(forms.require_eta()):
        ker = covector_kernel(e, forms.dim)
        if ker.contains(frame.reeb[a]) or ker.dim != forms.dim - 1:
            return False
    return True


def is_isotropic(space: Subspace, w: Matrix) -> bool:
    vecs = space.vectors()
    return all(w.bilinear(u, v) == 0 for u in vecs for v in vecs)


def distribution_checks(forms: FormFamily, distribution: Subspace) -> DistributionReport:
    """Linear-level axioms of k-symplectic and k-cosymplectic structures for (F, 𝒱)"""
    if distribution.ambient_dim != forms.dim:
        raise DimensionMismatchError(
            f"distribution in dimension {distribution.ambient_dim}, forms in dimension {forms.dim}"
        )
    k, dim, v_dim = forms.k, forms.dim, distribution.dim
    isotropic = all(is_isotropic(distribution, w) for w in forms.omega)
    omega_kind = identify_structure(forms.without_eta())

    n_sym, rem_sym = divmod(dim, k + 1)
    ksym = {
        "polysymplectic": omega_kind.tag == StructureTag.POLYSYMPLECTIC,
        "dimension": rem_sym == 0,
        "rank": rem_sym == 0 and v_dim == n_sym * k,
        "isotropic": isotropic,
    }

    kcosym = None
    not_checkable = ["involutivity"]
    if forms.has_eta:
        n_co, rem_co = divmod(dim - k, k + 1)
        kind = identify_structure(forms)
        co_ok = kind.tag == StructureTag.POLYCOSYMPLECTIC
        kcosym = {
            "polycosymplectic": co_ok,
            "dimension": dim >= k and rem_co == 0,
            "rank": dim >= k and rem_co == 0 and v_dim == n_co * k,
            "isotropic": isotropic,
            "reeb_transversal": co_ok and subspace_intersect(reeb_solve(forms).span, distribution).is_zero(),
        }
        not_checkable.append("reeb_bracket")

    return DistributionReport(ambient_dim=dim, k=k, v_dim=v_dim, ksymplectic=ksym,
                              kcosymplectic=kcosym, not_checkable=tuple(not_checkable))
