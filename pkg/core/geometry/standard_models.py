"""
Canonical constructors: Darboux models, products of cosymplectic spaces and
cotangent-lifted momentum data.

Coordinate order of the standard model is fixed once:
(t1..tk | q1..qn | p1_1..p1_n | ... | pk_1..pk_n), the t-block being absent
for the polysymplectic model. ``p{a}_{i}`` is the momentum p^a_i.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import structlog

from core.algebra.exactlin import (Matrix, Scalar, Subspace, Vector, dot,
                                   vector, zero_vector)
from core.algebra.polynomials import MultiPoly
from core.domain.errors import (InputError, InvariantViolation,
                                PreconditionError, StructureError)
from core.domain.models import (ActionPointData, FormFamily, LinearReduction,
                                StructureTag)
from core.geometry.reduction import linear_reduce
from core.geometry.structures import identify_structure, reeb_solve

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class StandardCoordinates:
    k: int
    n: int
    cosymplectic: bool = True

    def __post_init__(self):
        if self.k < 1 or self.n < 0:
            raise InputError(f"standard model needs k ≥ 1 and n ≥ 0, got k={self.k}, n={self.n}")

    @property
    def offset(self) -> int:
        return self.k if self.cosymplectic else 0

    @property
    def dim(self) -> int:
        return (self.k + 1) * self.n + self.offset

    def t(self, a: int) -> int:
        if not self.cosymplectic:
            raise InputError("the polysymplectic model has no t coordinates")
        return a

    def q(self, i: int) -> int:
        return self.offset + i

    def p(self, a: int, i: int) -> int:
        return self.offset + self.n + a * self.n + i

    def names(self) -> List[str]:
        out = [f"t{a + 1}" for a in range(self.offset)]
        out += [f"q{i + 1}" for i in range(self.n)]
        out += [f"p{a + 1}_{i + 1}" for a in range(self.k) for i in range(self.n)]
        return out

    def time_names(self) -> List[str]:
        return [f"t{a + 1}" for a in range(self.k)]

    def forms(self) -> FormFamily:
        return standard_model(self.k, self.n, self.cosymplectic)


def coordinate_names(k: int, n: int, cosymplectic: bool = True) -> List[str]:
    return StandardCoordinates(k, n, cosymplectic).names()


def standard_model(k: int, n: int, cosymplectic: bool = True) -> FormFamily:
    """ω^a = dq^i ∧ dp^a_i, and η^a = dt^a in the cosymplectic case"""
    coords = StandardCoordinates(k, n, cosymplectic)
    dim = coords.dim
    omega = []
    for a in range(k):
        grid = [[Fraction(0)] * dim for _ in range(dim)]
        for i in range(n):
            grid[coords.q(i)][coords.p(a, i)] = Fraction(1)
            grid[coords.p(a, i)][coords.q(i)] = Fraction(-1)
        omega.append(Matrix(dim, dim, tuple(x for row in grid for x in row)))
    eta = None
    if cosymplectic:
        eta = tuple(tuple(Fraction(1 if j == a else 0) for j in range(dim)) for a in range(k))
    return FormFamily(dim=dim, k=k, omega=tuple(omega), eta=eta)


def assemble_product(factors: Sequence[FormFamily]) -> FormFamily:
    """Block-diagonal family with ω^a = pr_a*Ω_a and η^a = pr_a*λ_a, without validation"""
    sizes = [f.dim for f in factors]
    dim = sum(sizes)
    omega, eta = [], []
    start = 0
    for f, size in zip(factors, sizes):
        blocks = [Matrix.zeros(s, s) for s in sizes]
        blocks[len(omega)] = f.omega[0]
        omega.append(Matrix.block_diagonal(blocks))
        lam = list(zero_vector(dim))
        for j, x in enumerate(f.require_eta()[0]):
            lam[start + j] = x
        eta.append(tuple(lam))
        start += size
    return FormFamily(dim=dim, k=len(factors), omega=tuple(omega), eta=tuple(eta))


def product_cosymplectic(factors: Sequence[FormFamily]) -> FormFamily:
    if not factors:
        raise InputError("a product needs at least one factor")
    frames = []
    for idx, f in enumerate(factors):
        kind = identify_structure(f) if f.k == 1 else None
        if kind is None or kind.tag != StructureTag.POLYCOSYMPLECTIC:
            raise StructureError(f"factor {idx} is not a cosymplectic (k = 1) family")
        frames.append(reeb_solve(f).reeb[0])

    product = assemble_product(factors)
    if identify_structure(product).tag != StructureTag.POLYCOSYMPLECTIC:
        raise InvariantViolation("product of cosymplectic factors is not polycosymplectic")

    expected, start = [], 0
    for f, r in zip(factors, frames):
        v = list(zero_vector(product.dim))
        v[start:start + f.dim] = r
        expected.append(tuple(v))
        start += f.dim
    if list(reeb_solve(product).reeb) != expected:
        raise InvariantViolation("Reeb frame of the product is not blockwise")
    return product


def product_reduction_check(factors: Sequence[FormFamily],
                            gtildes: Sequence[Subspace]) -> Tuple[bool, LinearReduction, FormFamily]:
    """
    Reduce the product at ⊕ g̃_a and compare with the product of the k = 1
    reductions. Returns (equal, product reduction, assembled factor reductions).
    """
    if len(factors) != len(gtildes):
        raise InputError("one g̃ per factor is required")
    product = product_cosymplectic(factors)
    g = gtildes[0]
    for extra in gtildes[1:]:
        g = g.product(extra)
    whole = linear_reduce(ActionPointData(forms=product, gtilde=g))
    parts = [linear_reduce(ActionPointData(forms=f, gtilde=s)).reduced for f, s in zip(factors, gtildes)]
    assembled = assemble_product(parts)
    return whole.reduced == assembled, whole, assembled


@dataclass(frozen=True)
class CotangentGenerator:
    """Affine vector field q ↦ A·q + b on Q = ℚⁿ"""
    matrix: Matrix
    offset: Vector

    @classmethod
    def build(cls, matrix: Sequence[Sequence[Scalar]], offset: Optional[Sequence[Scalar]] = None) -> "CotangentGenerator":
        m = Matrix.from_rows(matrix, len(matrix))
        b = vector(offset) if offset is not None else zero_vector(m.rows)
        return cls(m, b)

    def at(self, q: Sequence[Fraction]) -> Vector:
        return tuple(x + y for x, y in zip(self.matrix.apply(q), self.offset))


@dataclass(frozen=True)
class CotangentMomentumData:
    action: ActionPointData
    point: Vector
    momentum: Tuple[Tuple[Fraction, ...], ...]


def cotangent_lift_vector(coords: StandardCoordinates, gen: CotangentGenerator,
                          q: Sequence[Fraction], momenta: Sequence[Sequence[Fraction]]) -> Vector:
    """(ṫ, q̇, ṗ^a) = (0, A·q + b, −Aᵀ·p^a) at the given point"""
    v = list(zero_vector(coords.dim))
    qdot = gen.at(q)
    for i in range(coords.n):
        v[coords.q(i)] = qdot[i]
    for a in range(coords.k):
        pdot = gen.matrix.covector_apply(momenta[a])
        for i in range(coords.n):
            v[coords.p(a, i)] = -pdot[i]
    return tuple(v)


def cotangent_momentum_data(generators: Sequence[CotangentGenerator], base_point: Sequence[Scalar],
                            k: int, momenta: Sequence[Sequence[Scalar]],
                            times: Optional[Sequence[Scalar]] = None) -> CotangentMomentumData:
    """Standard polycosymplectic model at (t, q, p) with g̃ spanned by cotangent-lifted generators"""
    q = vector(base_point)
    n = len(q)
    if len(momenta) != k or any(len(p) != n for p in momenta):
        raise InputError(f"need {k} momentum vectors of length {n}")
    ps = [vector(p) for p in momenta]
    t = vector(times) if times is not None else zero_vector(k)
    coords = StandardCoordinates(k, n, True)
    for idx, gen in enumerate(generators):
        if gen.matrix.rows != n:
            raise InputError(f"generator {idx} acts on dimension {gen.matrix.rows}, expected {n}")
        if all(x == 0 for x in gen.at(q)):
            raise PreconditionError(f"generator {idx} vanishes at q")
    base_vectors = [gen.at(q) for gen in generators]
    if Subspace.from_generators(n, base_vectors).dim != len(generators):
        raise PreconditionError("generators are not independent at q; the action is not free there")

    point = tuple(t) + tuple(q) + tuple(x for p in ps for x in p)
    lifted = [cotangent_lift_vector(coords, gen, q, ps) for gen in generators]
    action = ActionPointData(forms=coords.forms(), gtilde=Subspace.from_generators(coords.dim, lifted),
                             regular=True, g_dim=len(generators))
    momentum = tuple(tuple(dot(ps[a], gen.at(q)) for a in range(k)) for gen in generators)
    return CotangentMomentumData(action=action, point=point, momentum=momentum)


def cotangent_lift_field(coords: StandardCoordinates, gen: CotangentGenerator) -> Tuple[MultiPoly, ...]:
    """The infinitesimal generator ξ_M as polynomial components over the model coordinates"""
    names = coords.names()
    qs = [MultiPoly.variable(names, f"q{i + 1}") for i in range(coords.n)]
    comps = [MultiPoly.zero(names) for _ in names]
    for i in range(coords.n):
        expr = MultiPoly.constant(names, gen.offset[i])
        for j in range(coords.n):
            if gen.matrix[i, j]:
                expr = expr + qs[j] * gen.matrix[i, j]
        comps[coords.q(i)] = expr
    for a in range(coords.k):
        pa = [MultiPoly.variable(names, f"p{a + 1}_{i + 1}") for i in range(coords.n)]
        for i in range(coords.n):
            expr = MultiPoly.zero(names)
            for j in range(coords.n):
                if gen.matrix[j, i]:
                    expr = expr - pa[j] * gen.matrix[j, i]
            comps[coords.p(a, i)] = expr
    return tuple(comps)


def momentum_components(coords: StandardCoordinates, gen: CotangentGenerator) -> Tuple[MultiPoly, ...]:
    """J^a_ξ = ⟨p^a, A·q + b⟩ for a = 1..k"""
    field = cotangent_lift_field(coords, gen)
    names = coords.names()
    out = []
    for a in range(coords.k):
        total = MultiPoly.zero(names)
        for i in range(coords.n):
            total = total + MultiPoly.variable(names, f"p{a + 1}_{i + 1}") * field[coords.q(i)]
        out.append(total)
    return tuple(out)


def contract(field: Sequence[MultiPoly], w: Matrix) -> List[MultiPoly]:
    """Coefficients of i_X ω as a polynomial one-form"""
    names = field[0].variables
    out = []
    for j in range(w.cols):
        total = MultiPoly.zero(names)
        for i, comp in enumerate(field):
            if w[i, j] and not comp.is_zero():
                total = total + comp * w[i, j]
        out.append(total)
    return out


def exterior_derivative(f: MultiPoly) -> List[MultiPoly]:
    return [f.differentiate(v) for v in f.variables]


def momentum_map_residual(coords: StandardCoordinates, gen: CotangentGenerator) -> List[List[MultiPoly]]:
    """i_{ξ_M}ω^a − dJ^a_ξ, one list of coefficients per a"""
    forms = coords.forms()
    field = cotangent_lift_field(coords, gen)
    out = []
    for a, j_a in enumerate(momentum_components(coords, gen)):
        lhs = contract(field, forms.omega[a])
        out.append([x - y for x, y in zip(lhs, exterior_derivative(j_a))])
    return out


def flat_pairing_residual(coords: StandardCoordinates, legs: Sequence[CotangentGenerator]) -> List[MultiPoly]:
    """Σ_a i_{(ξ_a)_M}ω^a − dĴ(ξ_1, …, ξ_k) with Ĵ(ξ_1, …, ξ_k) = Σ_a J^a_{ξ_a}"""
    if len(legs) != coords.k:
        raise InputError(f"need one generator per form, got {len(legs)} for k={coords.k}")
    forms = coords.forms()
    names = coords.names()
    lhs = [MultiPoly.zero(names) for _ in names]
    pairing = MultiPoly.zero(names)
    for a, gen in enumerate(legs):
        lhs = [x + y for x, y in zip(lhs, contract(cotangent_lift_field(coords, gen), forms.omega[a]))]
        pairing = pairing + momentum_components(coords, gen)[a]
    return [x - y for x, y in zip(lhs, exterior_derivative(pairing))]


def a1_redundancy_instance() -> ActionPointData:
    """
    Polysymplectic data on ℚ⁶ = (x1, y1, x2, y2, x3, y3) with
    ω¹ = Σ dx_i∧dy_i, ω² = dx1∧dy2 + dx2∧dx3 and g̃ = span{∂x1}:
    nondegeneracy and A2 hold while A1 fails for ω¹.
    """
    dim = 6
    w1 = [[Fraction(0)] * dim for _ in range(dim)]
    for i in range(3):
        w1[2 * i][2 * i + 1], w1[2 * i + 1][2 * i] = Fraction(1), Fraction(-1)
    w2 = [[Fraction(0)] * dim for _ in range(dim)]
    w2[0][3], w2[3][0] = Fraction(1), Fraction(-1)
    w2[2][4], w2[4][2] = Fraction(1), Fraction(-1)
    forms = FormFamily.build([w1, w2])
    return ActionPointData(forms=forms, gtilde=Subspace.coordinate(dim, [0]), regular=True, g_dim=1)


def a1_redundancy_family(extra: int, lagrangian: Sequence[int] = ()) -> ActionPointData:
    """
    The ℚ⁶ redundancy instance times the standard 2-polysymplectic model on
    ℚ^{3·extra}, acting there by translations along the ``lagrangian`` q
    directions. The second factor satisfies nondegeneracy, A1 and A2 at a
    regular value, and every condition splits over the product, so A1 still
    fails while nondegeneracy and A2 hold.
    """
    base = a1_redundancy_instance()
    if extra == 0:
        return base
    picked = sorted(set(lagrangian))
    if extra < 0 or any(not 0 <= i < extra for i in picked):
        raise InputError(f"need extra ≥ 0 and q indices in 0..{extra - 1}, got {extra}, {picked}")
    coords = StandardCoordinates(2, extra, False)
    model = coords.forms()
    omega = [Matrix.block_diagonal([w, v]) for w, v in zip(base.forms.omega, model.omega)]
    dim = base.forms.dim + model.dim
    gens = [list(g) + [Fraction(0)] * model.dim for g in base.gtilde.vectors()]
    gens += [[Fraction(1 if j == base.forms.dim + coords.q(i) else 0) for j in range(dim)] for i in picked]
    return ActionPointData(forms=FormFamily(dim=dim, k=2, omega=tuple(omega)),
                           gtilde=Subspace.from_generators(dim, gens), regular=True, g_dim=len(gens))
