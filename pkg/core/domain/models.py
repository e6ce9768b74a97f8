from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field, field_validator

from core.algebra.exactlin import Matrix, Subspace, Vector, to_fraction, vector
from core.algebra.polynomials import MultiPoly
from core.domain.errors import (ActionDataError, DimensionMismatchError,
                                InputError, MissingEtaError, StructureError)


class StructureTag(str, Enum):
    POLYSYMPLECTIC = "Polysymplectic"
    POLYCOSYMPLECTIC = "Polycosymplectic"
    PRESYMPLECTIC_SINGLE = "PresymplecticSingle"
    INVALID = "Invalid"


class ConditionId(str, Enum):
    NONDEG_POLYSYM = "NONDEG_POLYSYM"
    NONDEG_POLYCO = "NONDEG_POLYCO"
    A1 = "A1"
    A2 = "A2"
    C1 = "C1"
    ALBERT_K1 = "ALBERT_K1"


class PropertyId(str, Enum):
    PRESYM_DOUBLE_ORTHO = "PRESYM_DOUBLE_ORTHO"
    A2_IMPLIES_NONDEG = "A2_IMPLIES_NONDEG"
    LIFT_IFF = "LIFT_IFF"
    LIFT_LEMMA_43 = "LIFT_LEMMA_43"
    EQUIVALENCE_44 = "EQUIVALENCE_44"
    ALBERT_K1 = "ALBERT_K1"
    PRODUCT_REDUCTION = "PRODUCT_REDUCTION"
    KSYM_KCOSYM_CONSISTENCY = "KSYM_KCOSYM_CONSISTENCY"
    TRANSLATION_REDUCTION = "TRANSLATION_REDUCTION"


class SolveMode(str, Enum):
    KSYM = "kSym"
    KCOSYM = "kCosym"


class InstanceKind(str, Enum):
    PRESYMPLECTIC = "presymplectic"
    POLYSYMPLECTIC = "polysymplectic"
    POLYCOSYMPLECTIC = "polycosymplectic"
    COSYMPLECTIC = "cosymplectic"
    ACTION_POLYSYMPLECTIC = "action_polysymplectic"
    ACTION_POLYCOSYMPLECTIC = "action_polycosymplectic"


@dataclass(frozen=True)
class FormFamily:
    """k skew forms ω^a on ℚⁿ, optionally with k covectors η^a"""
    dim: int
    k: int
    omega: Tuple[Matrix, ...]
    eta: Optional[Tuple[Vector, ...]] = None

    def __post_init__(self):
        if self.k < 1:
            raise StructureError(f"k must be at least 1, got {self.k}")
        if len(self.omega) != self.k:
            raise StructureError(f"expected {self.k} two-forms, got {len(self.omega)}")
        for a, w in enumerate(self.omega):
            if (w.rows, w.cols) != (self.dim, self.dim):
                raise DimensionMismatchError(
                    f"omega[{a}] has shape {w.rows}x{w.cols}, expected {self.dim}x{self.dim}"
                )
            if not w.is_skew():
                raise StructureError(f"omega[{a}] is not skew-symmetric")
        if self.eta is not None:
            if len(self.eta) != self.k:
                raise StructureError(f"expected {self.k} one-forms, got {len(self.eta)}")
            for a, e in enumerate(self.eta):
                if len(e) != self.dim:
                    raise DimensionMismatchError(f"eta[{a}] has length {len(e)}, expected {self.dim}")

    @classmethod
    def build(cls, omega: Sequence[Sequence[Sequence[Any]]],
              eta: Optional[Sequence[Sequence[Any]]] = None) -> "FormFamily":
        """Build from nested lists of scalars"""
        if not omega:
            raise StructureError("at least one two-form is required")
        mats = tuple(Matrix.from_rows(w, len(w)) for w in omega)
        dim = mats[0].rows
        etas = tuple(vector(e) for e in eta) if eta is not None else None
        return cls(dim=dim, k=len(mats), omega=mats, eta=etas)

    @property
    def has_eta(self) -> bool:
        return self.eta is not None

    def require_eta(self) -> Tuple[Vector, ...]:
        if self.eta is None:
            raise MissingEtaError("operation needs the one-forms eta but none were given")
        return self.eta

    def without_eta(self) -> "FormFamily":
        return FormFamily(self.dim, self.k, self.omega, None)

    def eta_matrix(self) -> Matrix:
        return Matrix.from_rows(self.require_eta(), self.dim)


@dataclass(frozen=True)
class StructureKind:
    tag: StructureTag
    diagnostics: Tuple[str, ...] = ()
    metrics: Dict[str, Any] = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class ReebFrame:
    reeb: Tuple[Vector, ...]
    span: Subspace


@dataclass(frozen=True)
class ActionPointData:
    """A form family at a point together with the tangent image g̃ of the infinitesimal action"""
    forms: FormFamily
    gtilde: Subspace
    regular: bool = True
    g_dim: Optional[int] = None

    def __post_init__(self):
        if self.gtilde.ambient_dim != self.forms.dim:
            raise DimensionMismatchError(
                f"g̃ lives in dimension {self.gtilde.ambient_dim}, forms in {self.forms.dim}"
            )
        if self.forms.eta is not None:
            for a, e in enumerate(self.forms.eta):
                if any(sum(x * y for x, y in zip(e, g)) != 0 for g in self.gtilde.vectors()):
                    raise ActionDataError(f"eta[{a}] does not vanish on g̃")

    @property
    def is_polycosymplectic(self) -> bool:
        return self.forms.has_eta


@dataclass(frozen=True)
class DerivedGeometry:
    level_tangent: Subspace
    isotropy: Subspace
    isotropy_component: Tuple[Subspace, ...]
    per_form_kernel: Tuple[Subspace, ...]


@dataclass(frozen=True)
class SideComparison:
    index: int
    holds: bool
    lhs: Subspace
    rhs: Subspace


@dataclass(frozen=True)
class ConditionReport:
    condition_id: ConditionId
    holds: bool
    lhs: Subspace
    rhs: Subspace
    per_index: Tuple[SideComparison, ...] = ()
    direct_sum: Optional[bool] = None


@dataclass(frozen=True)
class LinearReduction:
    reduced: FormFamily
    projection: Matrix
    kind: StructureKind
    condition: ConditionReport
    well_defined: bool

    @property
    def consistent(self) -> bool:
        """Reduced structure is valid exactly when the nondegeneracy condition holds"""
        valid = self.kind.tag in (StructureTag.POLYSYMPLECTIC, StructureTag.POLYCOSYMPLECTIC)
        return valid == self.condition.holds


@dataclass(frozen=True)
class DimensionReport:
    ambient_dim: int
    g_dim: int
    isotropy_dim: int
    reduced_dim: int
    formula_dim: int
    level_codim: int
    expected_codim: int

    @property
    def formula_holds(self) -> bool:
        return self.reduced_dim == self.formula_dim

    @property
    def regularity_consistent(self) -> bool:
        return self.level_codim == self.expected_codim


@dataclass(frozen=True)
class DistributionReport:
    ambient_dim: int
    k: int
    v_dim: int
    ksymplectic: Dict[str, bool]
    kcosymplectic: Optional[Dict[str, bool]]
    not_checkable: Tuple[str, ...]

    @property
    def ksymplectic_holds(self) -> bool:
        return all(self.ksymplectic.values())

    @property
    def kcosymplectic_holds(self) -> bool:
        return self.kcosymplectic is not None and all(self.kcosymplectic.values())


@dataclass(frozen=True)
class LiftedFamily:
    base: FormFamily
    lifted: FormFamily
    s_index: int
    base_kind: Optional[StructureKind] = None
    lifted_kind: Optional[StructureKind] = None
    lemma_applies: bool = False


@dataclass(frozen=True)
class LiftLemmaReport:
    isotropy: SideComparison
    orthogonal: SideComparison
    double_orthogonal: SideComparison
    regularity_preserved: bool

    @property
    def holds(self) -> bool:
        return self.isotropy.holds and self.orthogonal.holds and self.double_orthogonal.holds


@dataclass(frozen=True)
class EquivalenceReport:
    base: ConditionReport
    lifted: ConditionReport
    c1: ConditionReport
    a2_lifted: ConditionReport

    @property
    def verdicts_agree(self) -> bool:
        return self.base.holds == self.lifted.holds

    @property
    def chain_agree(self) -> bool:
        return self.c1.holds == self.a2_lifted.holds


@dataclass(frozen=True)
class LiftDistributionReport:
    w_dim: int
    lifted_w: Subspace
    rank_holds: bool
    isotropic: bool
    lifted_structure: StructureKind

    @property
    def holds(self) -> bool:
        return self.rank_holds and self.isotropic and self.lifted_structure.tag == StructureTag.POLYSYMPLECTIC


@dataclass
class Expectation:
    """One machine-checked claim attached to a worked example"""
    name: str
    holds: bool
    detail: Optional[str] = None


@dataclass
class ModelSpec:
    name: str
    parameters: Dict[str, Any] = field(default_factory=dict)


@dataclass
class ExampleBundle:
    spec: ModelSpec
    forms: Dict[str, FormFamily]
    subspaces: Dict[str, Subspace]
    expectations: List[Expectation]
    extras: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(e.holds for e in self.expectations)


@dataclass(frozen=True)
class PolySection:
    """A map t ↦ (t, ψ^i(t), ψ^a_i(t)) into the standard (k, n) model"""
    k: int
    n: int
    psi: Tuple[MultiPoly, ...]
    momenta: Tuple[Tuple[MultiPoly, ...], ...]

    def __post_init__(self):
        tvars = tuple(f"t{a + 1}" for a in range(self.k))
        if len(self.psi) != self.n or len(self.momenta) != self.k:
            raise InputError(f"section shape does not match the (k={self.k}, n={self.n}) model")
        for row in self.momenta:
            if len(row) != self.n:
                raise InputError(f"each momentum block needs {self.n} components")
        for p in list(self.psi) + [c for row in self.momenta for c in row]:
            if p.variables != tvars:
                raise InputError(f"section components must be polynomials in {list(tvars)}")

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(f"t{a + 1}" for a in range(self.k))


@dataclass(frozen=True)
class PolyKVector:
    """k polynomial vector fields on a coordinate space, one component per coordinate"""
    variables: Tuple[str, ...]
    legs: Tuple[Tuple[MultiPoly, ...], ...]

    def __post_init__(self):
        for a, leg in enumerate(self.legs):
            if len(leg) != len(self.variables):
                raise InputError(
                    f"leg {a} has {len(leg)} components for {len(self.variables)} coordinates"
                )
            for c in leg:
                if c.variables != self.variables:
                    raise InputError(f"leg {a} components must be polynomials in {list(self.variables)}")

    @property
    def k(self) -> int:
        return len(self.legs)


class CampaignConfig(BaseModel):
    """Validated parameters of a randomized property campaign"""
    property_id: PropertyId
    trials: int = Field(default=1000, ge=1)
    master_seed: int = Field(default=20240501)
    dim_max: int = Field(default=12, ge=2, le=40)
    k_max: int = Field(default=3, ge=1, le=8)
    adversarial_fraction: str = Field(default="1/4")

    @field_validator("adversarial_fraction", mode="before")
    @classmethod
    def _check_fraction(cls, value: Any) -> str:
        try:
            ratio = to_fraction(value if not isinstance(value, float) else str(value))
        except InputError as e:
            raise ValueError(str(e)) from e
        if not 0 <= ratio <= 1:
            raise ValueError("adversarial_fraction must lie in [0, 1]")
        return f"{ratio.numerator}/{ratio.denominator}"

    @property
    def adversarial_ratio(self) -> Fraction:
        return Fraction(self.adversarial_fraction)


@dataclass
class TrialOutcome:
    trial: int
    seed: int
    passed: bool
    adversarial: bool
    details: Dict[str, Any] = field(default_factory=dict)
    instance: Optional[Dict[str, Any]] = None
    duration_seconds: float = 0.0


@dataclass
class CampaignReport:
    config: CampaignConfig
    outcomes: List[TrialOutcome]
    counters: Dict[str, int]
    duration_seconds: float = 0.0

    @property
    def passed(self) -> int:
        return sum(1 for o in self.outcomes if o.passed)

    @property
    def failed(self) -> int:
        return len(self.outcomes) - self.passed

    @property
    def success(self) -> bool:
        return self.failed == 0
