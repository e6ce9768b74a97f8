"""
Symbolic Hamiltonian dynamics on the standard models

Hamiltonians, sections and k-vector fields are MultiPoly objects over the
model's coordinate names. All identities are checked by exact polynomial
arithmetic.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import structlog

from core.algebra.exactlin import Matrix, Subspace, Vector, solve, to_fraction, vector
from core.algebra.polynomials import MultiPoly
from core.domain.errors import (DimensionMismatchError, InputError,
                                InvariantViolation, PreconditionError,
                                UnknownVariableError)
from core.domain.models import (ActionPointData, DimensionReport, FormFamily,
                                PolyKVector, PolySection, SolveMode)
from core.geometry.lift import lift_structure
from core.geometry.reduction import dimension_check
from core.geometry.standard_models import (StandardCoordinates, contract,
                                           exterior_derivative)
from core.geometry.structures import reeb_solve

logger = structlog.get_logger(__name__)

LIFT_VARIABLE = "s"

VectorField = Tuple[MultiPoly, ...]


def _require_variables(h: MultiPoly, names: Sequence[str]) -> None:
    if list(h.variables) != list(names):
        raise UnknownVariableError(f"expected a polynomial in {list(names)}, got one in {list(h.variables)}")


@dataclass(frozen=True)
class HddwResidual:
    q_residuals: Tuple[MultiPoly, ...]
    p_residuals: Tuple[Tuple[MultiPoly, ...], ...]

    @property
    def solves(self) -> bool:
        return all(r.is_zero() for r in self.q_residuals) and all(
            r.is_zero() for row in self.p_residuals for r in row)


def hddw_residual(h: MultiPoly, section: PolySection) -> HddwResidual:
    """
    Residuals of the polycosymplectic Hamilton–De Donder–Weyl equations along
    φ(t) = (t, ψ(t), ψ^a(t)):

        ∂H/∂q^i ∘ φ + Σ_a ∂ψ^a_i/∂t^a   and   ∂H/∂p^a_i ∘ φ − ∂ψ^i/∂t^a
    """
    coords = StandardCoordinates(section.k, section.n, True)
    _require_variables(h, coords.names())
    tvars = list(section.variables)
    pullback: Dict[str, MultiPoly] = {t: MultiPoly.variable(tvars, t) for t in tvars}
    for i in range(coords.n):
        pullback[f"q{i + 1}"] = section.psi[i]
        for a in range(coords.k):
            pullback[f"p{a + 1}_{i + 1}"] = section.momenta[a][i]

    def along(f: MultiPoly) -> MultiPoly:
        return f.substitute(pullback, tvars)

    q_res = []
    for i in range(coords.n):
        total = along(h.differentiate(f"q{i + 1}"))
        for a in range(coords.k):
            total = total + section.momenta[a][i].differentiate(tvars[a])
        q_res.append(total)
    p_res = tuple(
        tuple(along(h.differentiate(f"p{a + 1}_{i + 1}")) - section.psi[i].differentiate(tvars[a])
              for i in range(coords.n))
        for a in range(coords.k)
    )
    return HddwResidual(q_residuals=tuple(q_res), p_residuals=p_res)


@dataclass(frozen=True)
class KVectorSolution:
    """Pointwise solutions X_1..X_k: a particular one and the homogeneous solution space"""
    mode: SolveMode
    dim: int
    k: int
    particular: Tuple[Vector, ...]
    homogeneous: Subspace

    @property
    def freedom(self) -> int:
        return self.homogeneous.dim

    def flatten(self, legs: Sequence[Sequence[Fraction]]) -> Vector:
        if len(legs) != self.k or any(len(leg) != self.dim for leg in legs):
            raise DimensionMismatchError(f"expected {self.k} legs of length {self.dim}")
        return tuple(to_fraction(x) for leg in legs for x in leg)

    def contains(self, legs: Sequence[Sequence[Fraction]]) -> bool:
        flat = self.flatten(legs)
        base = self.flatten(self.particular)
        return self.homogeneous.contains(tuple(x - y for x, y in zip(flat, base)))


def _reeb_values(forms: FormFamily, gradient: Sequence[Fraction]) -> List[Fraction]:
    return [sum((x * y for x, y in zip(r, gradient)), Fraction(0)) for r in reeb_solve(forms).reeb]


def solve_hamiltonian_kvector(forms: FormFamily, h: MultiPoly, point: Sequence,
                              mode: SolveMode = SolveMode.KSYM) -> KVectorSolution:
    """
    Solve at one point

        kSym:   Σ_a i_{X_a} ω^a = dH
        kCosym: Σ_a i_{X_a} ω^a = dH − Σ_a R_a(H) η^a,  η^a(X_b) = δ^a_b

    for the unknown legs X_a. Raises InconsistentSystemError when there is no
    solution.
    """
    mode = SolveMode(mode)
    dim, k = forms.dim, forms.k
    if len(h.variables) != dim:
        raise DimensionMismatchError(f"Hamiltonian in {len(h.variables)} variables on a {dim}-dimensional model")
    point = vector(point)
    if len(point) != dim:
        raise DimensionMismatchError(f"point has {len(point)} coordinates, expected {dim}")
    gradient = [h.differentiate(v).evaluate(point) for v in h.variables]

    rhs = list(gradient)
    # unknown index a·dim + i carries X_a^i; equation j reads Σ_a Σ_i X_a^i W^a[i][j]
    rows = [[Fraction(0)] * (k * dim) for _ in range(dim)]
    for a, w in enumerate(forms.omega):
        for i in range(dim):
            for j in range(dim):
                if w[i, j]:
                    rows[j][a * dim + i] = w[i, j]
    if mode == SolveMode.KCOSYM:
        eta = forms.require_eta()
        for a, value in enumerate(_reeb_values(forms, gradient)):
            rhs = [x - value * e for x, e in zip(rhs, eta[a])]
        for a in range(k):
            for b in range(k):
                row = [Fraction(0)] * (k * dim)
                for i in range(dim):
                    row[b * dim + i] = eta[a][i]
                rows.append(row)
                rhs.append(Fraction(1 if a == b else 0))

    system = Matrix.from_rows(rows, k * dim)
    particular, homogeneous = solve(system, rhs)
    if system.apply(particular) != tuple(rhs):
        raise InvariantViolation("back-substitution of the k-vector solution failed")
    legs = tuple(particular[a * dim:(a + 1) * dim] for a in range(k))
    logger.debug("solved k-vector equation", mode=mode.value, freedom=homogeneous.dim)
    return KVectorSolution(mode=mode, dim=dim, k=k, particular=legs, homogeneous=homogeneous)


def hamiltonian_kvector(coords: StandardCoordinates, h: MultiPoly) -> PolyKVector:
    """
    Canonical solution on the standard model:
    X_a^{t^b} = δ, X_a^{q^i} = ∂H/∂p^a_i, X_a^{p^a_i} = −(1/k)·∂H/∂q^i, other
    momentum components zero.
    """
    names = coords.names()
    _require_variables(h, names)
    share = Fraction(-1, coords.k)
    legs = []
    for a in range(coords.k):
        leg = [MultiPoly.zero(names) for _ in names]
        if coords.cosymplectic:
            leg[coords.t(a)] = MultiPoly.constant(names, 1)
        for i in range(coords.n):
            leg[coords.q(i)] = h.differentiate(f"p{a + 1}_{i + 1}")
            leg[coords.p(a, i)] = h.differentiate(f"q{i + 1}") * share
        legs.append(tuple(leg))
    return PolyKVector(variables=tuple(names), legs=tuple(legs))


@dataclass(frozen=True)
class KVectorResidual:
    form_residual: Tuple[MultiPoly, ...]
    normalization: Tuple[Tuple[MultiPoly, ...], ...] = ()

    @property
    def solves(self) -> bool:
        return all(r.is_zero() for r in self.form_residual) and all(
            r.is_zero() for row in self.normalization for r in row)


def kvector_residual(forms: FormFamily, h: MultiPoly, x: PolyKVector,
                     mode: SolveMode = SolveMode.KSYM) -> KVectorResidual:
    """Σ_a i_{X_a}ω^a − dH (+ Σ_a R_a(H)η^a and η^a(X_b) − δ in kCosym mode)"""
    mode = SolveMode(mode)
    _require_variables(h, x.variables)
    if forms.dim != len(x.variables) or forms.k != x.k:
        raise DimensionMismatchError(
            f"k-vector with {x.k} legs over {len(x.variables)} coordinates for a (k={forms.k}, dim={forms.dim}) family"
        )
    names = x.variables
    lhs = [MultiPoly.zero(names) for _ in names]
    for a, leg in enumerate(x.legs):
        lhs = [u + v for u, v in zip(lhs, contract(leg, forms.omega[a]))]
    rhs = exterior_derivative(h)

    normalization: Tuple[Tuple[MultiPoly, ...], ...] = ()
    if mode == SolveMode.KCOSYM:
        eta = forms.require_eta()
        for a, r in enumerate(reeb_solve(forms).reeb):
            reeb_h = MultiPoly.zero(names)
            for i, c in enumerate(r):
                if c:
                    reeb_h = reeb_h + rhs[i] * c
            rhs = [u - reeb_h * e if e else u for u, e in zip(rhs, eta[a])]
        normalization = tuple(
            tuple(_pair(eta[a], x.legs[b]) - MultiPoly.constant(names, 1 if a == b else 0)
                  for b in range(forms.k))
            for a in range(forms.k)
        )
    return KVectorResidual(form_residual=tuple(u - v for u, v in zip(lhs, rhs)), normalization=normalization)


def _pair(covector: Sequence[Fraction], field_: Sequence[MultiPoly]) -> MultiPoly:
    total = MultiPoly.zero(field_[0].variables)
    for c, comp in zip(covector, field_):
        if c:
            total = total + comp * c
    return total


def apply_field(field_: Sequence[MultiPoly], f: MultiPoly) -> MultiPoly:
    """X(f) = Σ_i X^i ∂f/∂x^i"""
    total = MultiPoly.zero(f.variables)
    for comp, name in zip(field_, f.variables):
        if not comp.is_zero():
            total = total + comp * f.differentiate(name)
    return total


def _reexpress(values: Sequence[MultiPoly], names: Sequence[str]) -> Tuple[MultiPoly, ...]:
    return tuple(v.with_variables(names) for v in values)


@dataclass(frozen=True)
class LiftDynamicsReport:
    lifted_hamiltonian: MultiPoly
    lifted_kvector: PolyKVector
    residual: KVectorResidual

    @property
    def holds(self) -> bool:
        return self.residual.solves


def lift_dynamics_verify(h: MultiPoly, x: PolyKVector, coords: StandardCoordinates) -> LiftDynamicsReport:
    """
    H̃ = H∘pr − k·s and X̃_a = X_a ⊕ R_a(H)·∂s must solve the k-symplectic
    equation on the lifted family whenever X solves the k-cosymplectic one.
    """
    if not coords.cosymplectic:
        raise InputError("lifting dynamics needs the polycosymplectic model")
    forms = coords.forms()
    if not kvector_residual(forms, h, x, SolveMode.KCOSYM).solves:
        raise PreconditionError("the k-vector does not solve the k-cosymplectic equations")
    lifted = lift_structure(forms).lifted
    names = list(x.variables) + [LIFT_VARIABLE]
    h_lift = h.with_variables(names) - MultiPoly.variable(names, LIFT_VARIABLE) * coords.k
    grad = exterior_derivative(h)
    legs = []
    for a, leg in enumerate(x.legs):
        reeb_h = _pair(reeb_solve(forms).reeb[a], grad).with_variables(names)
        legs.append(_reexpress(leg, names) + (reeb_h,))
    x_lift = PolyKVector(variables=tuple(names), legs=tuple(legs))
    report = LiftDynamicsReport(lifted_hamiltonian=h_lift, lifted_kvector=x_lift,
                                residual=kvector_residual(lifted, h_lift, x_lift, SolveMode.KSYM))
    if not report.holds:
        logger.error("lifted k-vector does not solve the lifted equation")
    return report


def integrability_obstruction(h: MultiPoly, x: PolyKVector, coords: StandardCoordinates) -> List[List[MultiPoly]]:
    """c_ab = X_a(R_b H) − X_b(R_a H); [X_a, X_b] = 0 forces every c_ab to vanish"""
    if not coords.cosymplectic:
        raise InputError("the obstruction is defined on the polycosymplectic model")
    _require_variables(h, x.variables)
    reeb_h = [h.differentiate(t) for t in coords.time_names()]
    return [[apply_field(x.legs[a], reeb_h[b]) - apply_field(x.legs[b], reeb_h[a])
             for b in range(coords.k)] for a in range(coords.k)]


def lifted_section_obstruction(h: MultiPoly, section: PolySection) -> List[List[MultiPoly]]:
    """
    Mixed-partial mismatch of the s-component of a lifted section: with
    g_a = ∂H/∂t^a ∘ φ the entry (a, b) is ∂g_a/∂t^b − ∂g_b/∂t^a.
    """
    coords = StandardCoordinates(section.k, section.n, True)
    _require_variables(h, coords.names())
    tvars = list(section.variables)
    pullback: Dict[str, MultiPoly] = {t: MultiPoly.variable(tvars, t) for t in tvars}
    for i in range(coords.n):
        pullback[f"q{i + 1}"] = section.psi[i]
        for a in range(coords.k):
            pullback[f"p{a + 1}_{i + 1}"] = section.momenta[a][i]
    g = [h.differentiate(t).substitute(pullback, tvars) for t in tvars]
    return [[g[a].differentiate(tvars[b]) - g[b].differentiate(tvars[a])
             for b in range(coords.k)] for a in range(coords.k)]


def noether_residual(h: MultiPoly, x: PolyKVector, momentum: Sequence[MultiPoly],
                     generator: Sequence[MultiPoly], coords: StandardCoordinates) -> MultiPoly:
    """Σ_a X_a(J^a) for an invariant H; zero when the momentum is conserved"""
    forms = coords.forms()
    if len(momentum) != coords.k:
        raise InputError(f"need {coords.k} momentum components, got {len(momentum)}")
    mode = SolveMode.KCOSYM if coords.cosymplectic else SolveMode.KSYM
    if not kvector_residual(forms, h, x, mode).solves:
        raise PreconditionError("the k-vector does not solve the Hamiltonian equations")
    if not apply_field(generator, h).is_zero():
        raise PreconditionError("the Hamiltonian is not invariant under the generator")
    total = MultiPoly.zero(h.variables)
    for leg, j_a in zip(x.legs, momentum):
        total = total + apply_field(leg, j_a)
    return total


@dataclass(frozen=True)
class TranslationReductionReport:
    reduced_coordinates: StandardCoordinates
    reduced_hamiltonian: MultiPoly
    projected: PolyKVector
    residual: KVectorResidual
    dimension: DimensionReport

    @property
    def holds(self) -> bool:
        return (self.residual.solves and self.dimension.formula_holds
                and self.dimension.reduced_dim == self.reduced_coordinates.dim)


def translation_reduce_verify(h: MultiPoly, x: PolyKVector, k: int, n: int,
                              mu: Sequence) -> TranslationReductionReport:
    """
    Reduce the standard (k, n) model by translations in q¹ at the level
    p^a_1 = μ_a and check the projected k-vector solves the reduced equations.
    """
    if n < 1:
        raise InputError("translation reduction needs n ≥ 1")
    mu = vector(mu)
    if len(mu) != k:
        raise InputError(f"need {k} momentum values, got {len(mu)}")
    coords = StandardCoordinates(k, n, True)
    names = coords.names()
    _require_variables(h, names)
    if h.degree_in("q1"):
        raise PreconditionError("the Hamiltonian depends on q1")
    if not kvector_residual(coords.forms(), h, x, SolveMode.KCOSYM).solves:
        raise PreconditionError("the k-vector does not solve the k-cosymplectic equations")
    if any(c.degree_in("q1") for leg in x.legs for c in leg):
        raise PreconditionError("the k-vector depends on q1")

    reduced = StandardCoordinates(k, n - 1, True)
    target = reduced.names()
    level = {f"p{a + 1}_1": MultiPoly.constant(target, mu[a]) for a in range(k)}
    rename: Dict[str, MultiPoly] = dict(level)
    for a in range(k):
        rename[f"t{a + 1}"] = MultiPoly.variable(target, f"t{a + 1}")
    for i in range(1, n):
        rename[f"q{i + 1}"] = MultiPoly.variable(target, f"q{i}")
        for a in range(k):
            rename[f"p{a + 1}_{i + 1}"] = MultiPoly.variable(target, f"p{a + 1}_{i}")
    rename["q1"] = MultiPoly.zero(target)

    for a, leg in enumerate(x.legs):
        for b in range(k):
            if not leg[coords.p(b, 0)].substitute(rename, target).is_zero():
                raise PreconditionError("the k-vector is not tangent to the momentum level set")

    dropped = {coords.q(0)} | {coords.p(a, 0) for a in range(k)}
    legs = tuple(tuple(c.substitute(rename, target) for j, c in enumerate(leg) if j not in dropped)
                 for leg in x.legs)
    projected = PolyKVector(variables=tuple(target), legs=legs)
    h_mu = h.substitute(rename, target)
    residual = kvector_residual(reduced.forms(), h_mu, projected, SolveMode.KCOSYM)

    data = ActionPointData(forms=coords.forms(), gtilde=Subspace.coordinate(coords.dim, [coords.q(0)]),
                           regular=True, g_dim=1)
    report = TranslationReductionReport(reduced_coordinates=reduced, reduced_hamiltonian=h_mu,
                                        projected=projected, residual=residual,
                                        dimension=dimension_check(data, 1))
    logger.debug("translation reduction", holds=report.holds, reduced_dim=reduced.dim)
    return report


def strip_time(x: PolyKVector, coords: StandardCoordinates) -> PolyKVector:
    """Drop the t-components of a k-vector whose coefficients do not involve t"""
    if not coords.cosymplectic:
        raise InputError("only polycosymplectic k-vectors carry t-components")
    target = StandardCoordinates(coords.k, coords.n, False).names()
    if not target:
        raise InputError("stripping time from an n = 0 model leaves no coordinates")
    legs = tuple(tuple(c.with_variables(target) for c in leg[coords.k:]) for leg in x.legs)
    return PolyKVector(variables=tuple(target), legs=legs)


def lie_bracket(x: Sequence[MultiPoly], y: Sequence[MultiPoly]) -> VectorField:
    """[X, Y]^i = X(Y^i) − Y(X^i)"""
    if len(x) != len(y):
        raise DimensionMismatchError("vector fields of different dimensions")
    return tuple(apply_field(x, yi) - apply_field(y, xi) for xi, yi in zip(x, y))


def field_in_distribution(value: Sequence[MultiPoly], distribution: Sequence[Sequence[MultiPoly]],
                          point: Sequence) -> bool:
    """Whether a field lies in the span of the given fields at one point"""
    point = vector(point)
    dim = len(value)

    def at(f):
        return tuple(c.evaluate(point) for c in f)

    return Subspace.from_generators(dim, [at(f) for f in distribution]).contains(at(value))


@dataclass
class ExampleHamiltonianData:
    """Second-order field theory Hamiltonian with its known section"""
    coords: StandardCoordinates
    hamiltonian: MultiPoly
    printed_hamiltonian: MultiPoly
    section: PolySection
    extras: Dict[str, MultiPoly] = field(default_factory=dict)


def example_hamiltonian(sign: int = -1) -> MultiPoly:
    coords = StandardCoordinates(2, 1, True)
    text = f"{sign}*q1*t1*t2 + (p1_1**2 + p2_1**2)/2"
    return MultiPoly.from_expr(coords.names(), text)


def example_section_data() -> ExampleHamiltonianData:
    """H = −q·t¹t² + ((p¹)² + (p²)²)/2 with ψ = (t¹)³t²/6, ψ¹ = (t¹)²t²/2, ψ² = (t¹)³/6"""
    coords = StandardCoordinates(2, 1, True)
    tvars = coords.time_names()
    section = PolySection(
        k=2, n=1,
        psi=(MultiPoly.from_expr(tvars, "t1**3*t2/6"),),
        momenta=((MultiPoly.from_expr(tvars, "t1**2*t2/2"),), (MultiPoly.from_expr(tvars, "t1**3/6"),)),
    )
    return ExampleHamiltonianData(coords=coords, hamiltonian=example_hamiltonian(-1),
                                  printed_hamiltonian=example_hamiltonian(1), section=section)


def section_kvector(section: PolySection, point_t: Sequence) -> Tuple[Vector, ...]:
    """Legs of the tangent k-vector of φ at t: X_a = ∂φ/∂t^a"""
    coords = StandardCoordinates(section.k, section.n, True)
    t = vector(point_t)
    legs = []
    for a, name in enumerate(section.variables):
        leg = [Fraction(0)] * coords.dim
        leg[coords.t(a)] = Fraction(1)
        for i in range(coords.n):
            leg[coords.q(i)] = section.psi[i].differentiate(name).evaluate(t)
            for b in range(coords.k):
                leg[coords.p(b, i)] = section.momenta[b][i].differentiate(name).evaluate(t)
        legs.append(tuple(leg))
    return tuple(legs)


def section_point(section: PolySection, point_t: Sequence) -> Vector:
    t = vector(point_t)
    return tuple(t) + tuple(p.evaluate(t) for p in section.psi) + tuple(
        c.evaluate(t) for row in section.momenta for c in row)


def constant_kvector(variables: Sequence[str], legs: Sequence[Sequence[Fraction]]) -> PolyKVector:
    return PolyKVector(variables=tuple(variables),
                       legs=tuple(tuple(MultiPoly.constant(variables, c) for c in leg) for leg in legs))


def add_kvectors(x: PolyKVector, y: PolyKVector) -> PolyKVector:
    if x.variables != y.variables or x.k != y.k:
        raise DimensionMismatchError("k-vectors over different coordinates")
    return PolyKVector(variables=x.variables,
                       legs=tuple(tuple(u + v for u, v in zip(a, b)) for a, b in zip(x.legs, y.legs)))
