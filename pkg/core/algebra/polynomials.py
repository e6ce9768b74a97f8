"""
Multivariate polynomials with rational coefficients.

Thin immutable wrapper over ``sympy.Poly`` on the domain QQ with an explicit,
ordered variable list. Coefficients cross the boundary as ``Fraction``.
"""

from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import sympy
from sympy.polys.polyerrors import BasePolynomialError

from core.algebra.exactlin import Scalar, to_fraction
from core.domain.errors import InputError, UnknownVariableError

Term = Tuple[Fraction, Tuple[int, ...]]


def _q(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def _frac(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


class MultiPoly:
    """Polynomial over ℚ in a fixed, ordered list of named variables"""

    __slots__ = ("variables", "poly")

    def __init__(self, variables: Sequence[str], poly: sympy.Poly):
        self.variables: Tuple[str, ...] = tuple(variables)
        self.poly = poly

    # construction

    @staticmethod
    def symbols(variables: Sequence[str]) -> Tuple[sympy.Symbol, ...]:
        if not variables:
            raise InputError("a polynomial needs at least one variable")
        if len(set(variables)) != len(variables):
            raise InputError(f"duplicate variable names in {list(variables)}")
        return tuple(sympy.Symbol(v) for v in variables)

    @classmethod
    def from_sympy(cls, variables: Sequence[str], expr) -> "MultiPoly":
        gens = cls.symbols(variables)
        try:
            poly = sympy.Poly(expr, *gens, domain=sympy.QQ)
        except BasePolynomialError as e:
            raise InputError(f"not a polynomial in {list(variables)}: {expr}") from e
        return cls(variables, poly)

    @classmethod
    def from_terms(cls, variables: Sequence[str], terms: Iterable[Tuple[Scalar, Sequence[int]]]) -> "MultiPoly":
        gens = cls.symbols(variables)
        data: Dict[Tuple[int, ...], sympy.Rational] = {}
        for coeff, exps in terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(gens) or any(e < 0 for e in exps):
                raise InputError(f"bad exponent vector {list(exps)} for variables {list(variables)}")
            data[exps] = data.get(exps, sympy.Integer(0)) + _q(to_fraction(coeff))
        data = {e: c for e, c in data.items() if c != 0}
        if not data:
            return cls.zero(variables)
        return cls(variables, sympy.Poly.from_dict(data, *gens, domain=sympy.QQ))

    @classmethod
    def from_expr(cls, variables: Sequence[str], text: str) -> "MultiPoly":
        """Parse an expression such as ``"-q1*t1*t2 + (p1_1**2 + p2_1**2)/2"``"""
        gens = cls.symbols(variables)
        try:
            expr = sympy.sympify(text, locals={g.name: g for g in gens}, rational=True)
        except (sympy.SympifyError, TypeError, SyntaxError) as e:
            raise InputError(f"cannot parse polynomial {text!r}: {e}") from e
        stray = {s.name for s in expr.free_symbols} - set(variables)
        if stray:
            raise UnknownVariableError(f"unknown variables {sorted(stray)} in {text!r}")
        return cls.from_sympy(variables, expr)

    @classmethod
    def constant(cls, variables: Sequence[str], value: Scalar) -> "MultiPoly":
        return cls.from_sympy(variables, _q(to_fraction(value)))

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "MultiPoly":
        return cls.constant(variables, 0)

    @classmethod
    def variable(cls, variables: Sequence[str], name: str) -> "MultiPoly":
        if name not in variables:
            raise UnknownVariableError(f"{name!r} is not one of {list(variables)}")
        return cls.from_sympy(variables, sympy.Symbol(name))

    # arithmetic

    def _coerce(self, other: Union["MultiPoly", Scalar]) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.variables != self.variables:
                raise UnknownVariableError(
                    f"variable lists differ: {list(self.variables)} vs {list(other.variables)}"
                )
            return other
        return MultiPoly.constant(self.variables, other)

    def __add__(self, other) -> "MultiPoly":
        return MultiPoly(self.variables, self.poly + self._coerce(other).poly)

    __radd__ = __add__

    def __sub__(self, other) -> "MultiPoly":
        return MultiPoly(self.variables, self.poly - self._coerce(other).poly)

    def __rsub__(self, other) -> "MultiPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "MultiPoly":
        return MultiPoly(self.variables, self.poly * self._coerce(other).poly)

    __rmul__ = __mul__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.variables, -self.poly)

    def __pow__(self, exponent: int) -> "MultiPoly":
        return MultiPoly(self.variables, self.poly ** int(exponent))

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            if isinstance(other, (int, Fraction)):
                return self.is_constant() and self.constant_value() == other
            return NotImplemented
        return self.variables == other.variables and self.poly.as_dict() == other.poly.as_dict()

    def __hash__(self) -> int:
        return hash((self.variables, tuple(self.to_terms())))

    def __repr__(self) -> str:
        return f"MultiPoly({self.as_expr()}; vars={list(self.variables)})"

    def __str__(self) -> str:
        return str(self.as_expr())

    # calculus

    def _symbol(self, name: str) -> sympy.Symbol:
        if name not in self.variables:
            raise UnknownVariableError(f"{name!r} is not one of {list(self.variables)}")
        return sympy.Symbol(name)

    def differentiate(self, name: str) -> "MultiPoly":
        return MultiPoly(self.variables, self.poly.diff(self._symbol(name)))

    def evaluate(self, point: Union[Mapping[str, Scalar], Sequence[Scalar]]) -> Fraction:
        if isinstance(point, Mapping):
            missing = [v for v in self.variables if v not in point]
            if missing:
                raise UnknownVariableError(f"no value given for {missing}")
            values = [to_fraction(point[v]) for v in self.variables]
        else:
            if len(point) != len(self.variables):
                raise InputError(f"point has {len(point)} coordinates for {len(self.variables)} variables")
            values = [to_fraction(x) for x in point]
        total = Fraction(0)
        for coeff, exps in self.to_terms():
            term = coeff
            for x, e in zip(values, exps):
                if e:
                    term *= x ** e
            total += term
        return total

    def substitute(self, mapping: Mapping[str, "MultiPoly"], variables: Sequence[str]) -> "MultiPoly":
        """Compose: replace each named variable by a polynomial in ``variables``"""
        replacements = {}
        for name, value in mapping.items():
            replacements[self._symbol(name)] = value.as_expr() if isinstance(value, MultiPoly) else _q(to_fraction(value))
        expr = self.as_expr().xreplace(replacements)
        stray = {s.name for s in expr.free_symbols} - set(variables)
        if stray:
            raise UnknownVariableError(f"substitution leaves variables {sorted(stray)} outside {list(variables)}")
        return MultiPoly.from_sympy(variables, expr)

    def with_variables(self, variables: Sequence[str]) -> "MultiPoly":
        """Re-express over another variable list that contains every variable actually used"""
        used = set(self.free_variables())
        if not used <= set(variables):
            raise UnknownVariableError(
                f"polynomial uses {sorted(used - set(variables))} outside {list(variables)}"
            )
        return MultiPoly.from_sympy(variables, self.as_expr())

    # inspection

    def as_expr(self):
        return self.poly.as_expr()

    def degree_in(self, name: str) -> int:
        if self.is_zero():
            return 0
        return int(self.poly.degree(self._symbol(name)))

    def total_degree(self) -> int:
        return 0 if self.is_zero() else int(self.poly.total_degree())

    def free_variables(self) -> List[str]:
        return [v for v in self.variables if self.degree_in(v) > 0]

    def is_zero(self) -> bool:
        return self.poly.is_zero

    def is_constant(self) -> bool:
        return self.is_zero() or self.total_degree() == 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise InputError(f"{self} is not constant")
        return Fraction(0) if self.is_zero() else _frac(self.poly.LC())

    def to_terms(self) -> List[Term]:
        """Nonzero terms in descending graded lexicographic order"""
        if self.is_zero():
            return []
        return [(_frac(c), tuple(int(e) for e in m)) for m, c in self.poly.terms(order="grlex")]
