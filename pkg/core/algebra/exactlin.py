"""
Exact rational linear algebra

Matrices over Fraction, reduced row-echelon forms and a canonical Subspace
type whose basis is the list of nonzero RREF rows. Two Subspace values are
equal as sets iff they compare equal as dataclasses.
"""

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from core.domain.errors import (DimensionMismatchError, InconsistentSystemError,
                                InputError, NotASubspaceError)

Scalar = Union[int, Fraction, str]
Vector = Tuple[Fraction, ...]


def to_fraction(value: Scalar) -> Fraction:
    """Parse an exact scalar. Floats are refused."""
    if isinstance(value, bool):
        raise InputError(f"boolean is not a rational scalar: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise InputError(f"invalid rational literal {value!r}: {e}") from e
    raise InputError(f"unsupported scalar type {type(value).__name__}: {value!r}")


def format_fraction(value: Fraction) -> str:
    """Render as "p" or "p/q" """
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def vector(values: Iterable[Scalar]) -> Vector:
    return tuple(to_fraction(v) for v in values)


def zero_vector(n: int) -> Vector:
    return tuple(Fraction(0) for _ in range(n))


def unit_vector(n: int, i: int) -> Vector:
    return tuple(Fraction(1 if j == i else 0) for j in range(n))


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise DimensionMismatchError(f"vector lengths differ: {len(u)} vs {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def vec_add(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    if len(u) != len(v):
        raise DimensionMismatchError(f"vector lengths differ: {len(u)} vs {len(v)}")
    return tuple(a + b for a, b in zip(u, v))


def vec_scale(c: Fraction, v: Sequence[Fraction]) -> Vector:
    return tuple(c * a for a in v)


def is_zero_vector(v: Sequence[Fraction]) -> bool:
    return all(a == 0 for a in v)


@dataclass(frozen=True)
class Matrix:
    """Dense rational matrix, entries stored row-major"""

    rows: int
    cols: int
    entries: Tuple[Fraction, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise InputError(f"negative matrix shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise InputError(
                f"matrix of shape {self.rows}x{self.cols} needs "
                f"{self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Scalar]], cols: Optional[int] = None) -> "Matrix":
        rows = list(rows)
        if cols is None:
            if not rows:
                raise InputError("cannot infer column count of an empty matrix")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise DimensionMismatchError(f"ragged matrix row: expected {cols} entries, got {len(r)}")
        return cls(len(rows), cols, tuple(to_fraction(x) for r in rows for x in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols, tuple(Fraction(0) for _ in range(rows * cols)))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, tuple(Fraction(1 if i == j else 0) for i in range(n) for j in range(n)))

    @classmethod
    def block_diagonal(cls, blocks: Sequence["Matrix"]) -> "Matrix":
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        grid = [[Fraction(0)] * cols for _ in range(rows)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    grid[r0 + i][c0 + j] = b[i, j]
            r0 += b.rows
            c0 += b.cols
        return cls.from_rows(grid, cols)

    def __getitem__(self, index: Tuple[int, int]) -> Fraction:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> Vector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def row_list(self) -> List[Vector]:
        return [self.row(i) for i in range(self.rows)]

    def to_lists(self) -> List[List[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "Matrix":
        return Matrix.from_rows([self.column(j) for j in range(self.cols)], self.rows)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionMismatchError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        cols = [other.column(j) for j in range(other.cols)]
        return Matrix.from_rows(
            [[dot(self.row(i), c) for c in cols] for i in range(self.rows)], other.cols
        )

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError("matrix shapes differ")
        return Matrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c: Scalar) -> "Matrix":
        c = to_fraction(c)
        return Matrix(self.rows, self.cols, tuple(c * a for a in self.entries))

    def apply(self, v: Sequence[Fraction]) -> Vector:
        """Matrix-vector product m·v"""
        if len(v) != self.cols:
            raise DimensionMismatchError(f"vector of length {len(v)} for {self.cols} columns")
        return tuple(dot(self.row(i), v) for i in range(self.rows))

    def covector_apply(self, v: Sequence[Fraction]) -> Vector:
        """Row-vector product vᵀ·m"""
        if len(v) != self.rows:
            raise DimensionMismatchError(f"covector of length {len(v)} for {self.rows} rows")
        return tuple(dot(v, self.column(j)) for j in range(self.cols))

    def bilinear(self, v: Sequence[Fraction], w: Sequence[Fraction]) -> Fraction:
        """vᵀ·m·w"""
        return dot(self.covector_apply(v), w)

    def congruence(self, basis: "Matrix") -> "Matrix":
        """B·m·Bᵀ: the form restricted to the rows of ``basis``"""
        return basis @ self @ basis.transpose()

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_skew(self) -> bool:
        if not self.is_square():
            return False
        return all(self[i, j] == -self[j, i] for i in range(self.rows) for j in range(i, self.cols))

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.entries)

    def stack(self, other: "Matrix") -> "Matrix":
        if self.cols != other.cols:
            raise DimensionMismatchError("cannot stack matrices with different column counts")
        return Matrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "Matrix":
        return Matrix.from_rows(
            [[self[i, j] for j in col_idx] for i in row_idx], len(col_idx)
        )


def _rref_grid(grid: List[List[Fraction]], cols: int) -> List[int]:
    """In-place Gauss-Jordan elimination, returns the pivot columns"""
    pivots: List[int] = []
    pivot_row = 0
    n_rows = len(grid)
    for c in range(cols):
        if pivot_row == n_rows:
            break
        source = next((r for r in range(pivot_row, n_rows) if grid[r][c] != 0), None)
        if source is None:
            continue
        grid[pivot_row], grid[source] = grid[source], grid[pivot_row]
        lead = grid[pivot_row][c]
        if lead != 1:
            grid[pivot_row] = [x / lead for x in grid[pivot_row]]
        prow = grid[pivot_row]
        for r in range(n_rows):
            if r != pivot_row and grid[r][c] != 0:
                factor = grid[r][c]
                grid[r] = [x - factor * y for x, y in zip(grid[r], prow)]
        pivots.append(c)
        pivot_row += 1
    return pivots


def rref_with_pivots(m: Matrix) -> Tuple[Matrix, Tuple[int, ...]]:
    grid = m.to_lists()
    pivots = _rref_grid(grid, m.cols)
    return Matrix.from_rows(grid, m.cols) if m.rows else m, tuple(pivots)


def rref(m: Matrix) -> Matrix:
    """Reduced row-echelon form, same shape as ``m`` (zero rows kept at the bottom)"""
    return rref_with_pivots(m)[0]


def rank(m: Matrix) -> int:
    return len(rref_with_pivots(m)[1])


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of ℚⁿ held by its canonical RREF basis"""

    ambient_dim: int
    basis: Matrix

    def __post_init__(self):
        if self.basis.cols != self.ambient_dim:
            raise DimensionMismatchError(
                f"basis has {self.basis.cols} columns for ambient dimension {self.ambient_dim}"
            )

    @classmethod
    def from_generators(cls, ambient_dim: int, generators: Iterable[Sequence[Scalar]]) -> "Subspace":
        rows = [vector(g) for g in generators]
        for g in rows:
            if len(g) != ambient_dim:
                raise DimensionMismatchError(
                    f"generator of length {len(g)} in ambient dimension {ambient_dim}"
                )
        if not rows:
            return cls.zero(ambient_dim)
        reduced, pivots = rref_with_pivots(Matrix.from_rows(rows, ambient_dim))
        return cls(ambient_dim, Matrix(len(pivots), ambient_dim, reduced.entries[:len(pivots) * ambient_dim]))

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, Matrix(0, ambient_dim, ()))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, Matrix.identity(ambient_dim))

    @classmethod
    def coordinate(cls, ambient_dim: int, indices: Iterable[int]) -> "Subspace":
        return cls.from_generators(ambient_dim, [unit_vector(ambient_dim, i) for i in indices])

    @property
    def dim(self) -> int:
        return self.basis.rows

    @property
    def codim(self) -> int:
        return self.ambient_dim - self.dim

    @property
    def pivots(self) -> Tuple[int, ...]:
        return tuple(next(j for j, x in enumerate(self.basis.row(i)) if x != 0)
                     for i in range(self.dim))

    def vectors(self) -> List[Vector]:
        return self.basis.row_list()

    def is_zero(self) -> bool:
        return self.dim == 0

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def reduce(self, v: Sequence[Fraction]) -> Vector:
        """Remainder of ``v`` after clearing the pivot columns of the basis"""
        if len(v) != self.ambient_dim:
            raise DimensionMismatchError(f"vector of length {len(v)} in ambient dimension {self.ambient_dim}")
        out = list(v)
        for row, p in zip(self.vectors(), self.pivots):
            c = out[p]
            if c != 0:
                out = [x - c * y for x, y in zip(out, row)]
        return tuple(out)

    def contains(self, v: Sequence[Scalar]) -> bool:
        return is_zero_vector(self.reduce(vector(v)))

    def is_subset(self, other: "Subspace") -> bool:
        _check_same_ambient(self, other)
        return all(other.contains(v) for v in self.vectors())

    def coordinates(self, v: Sequence[Fraction]) -> Vector:
        """Coordinates of a member vector in the canonical basis"""
        if not self.contains(v):
            raise NotASubspaceError("vector does not lie in the subspace")
        return tuple(Fraction(v[p]) for p in self.pivots)

    def annihilator(self) -> "Subspace":
        """{w : u·w = 0 for all u in self}"""
        if self.is_zero():
            return Subspace.full(self.ambient_dim)
        return nullspace(self.basis)

    def product(self, other: "Subspace") -> "Subspace":
        """self × other inside ℚ^(n+m)"""
        n, m = self.ambient_dim, other.ambient_dim
        gens = [tuple(v) + zero_vector(m) for v in self.vectors()]
        gens += [zero_vector(n) + tuple(w) for w in other.vectors()]
        return Subspace.from_generators(n + m, gens)

    def embed(self, extra: int) -> "Subspace":
        """self × {0} with ``extra`` zero coordinates appended"""
        return self.product(Subspace.zero(extra))


def _check_same_ambient(a: Subspace, b: Subspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatchError(
            f"subspaces live in different ambient spaces: {a.ambient_dim} vs {b.ambient_dim}"
        )


def nullspace(m: Matrix) -> Subspace:
    """{v : m·v = 0} in canonical form"""
    reduced, pivots = rref_with_pivots(m)
    pivot_set = set(pivots)
    gens = []
    for f in range(m.cols):
        if f in pivot_set:
            continue
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -reduced[r, f]
        gens.append(v)
    return Subspace.from_generators(m.cols, gens)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_same_ambient(a, b)
    return Subspace.from_generators(a.ambient_dim, a.vectors() + b.vectors())


def subspace_intersect(a: Subspace, b: Subspace) -> Subspace:
    """Exact intersection, computed as the common kernel of both annihilators"""
    _check_same_ambient(a, b)
    constraints = a.annihilator().vectors() + b.annihilator().vectors()
    if not constraints:
        return Subspace.full(a.ambient_dim)
    return nullspace(Matrix.from_rows(constraints, a.ambient_dim))


def sum_all(spaces: Sequence[Subspace], ambient_dim: int) -> Subspace:
    out = Subspace.zero(ambient_dim)
    for s in spaces:
        out = subspace_sum(out, s)
    return out


def intersect_all(spaces: Sequence[Subspace], ambient_dim: int) -> Subspace:
    out = Subspace.full(ambient_dim)
    for s in spaces:
        out = subspace_intersect(out, s)
    return out


@dataclass(frozen=True)
class QuotientMap:
    """
    Coordinates on A/B.

    The complement of B inside A is spanned by the A-basis vectors whose
    index is a non-pivot column of rref(B written in A-coordinates).
    ``representative_matrix`` has one row per A-basis vector giving its class
    in complement coordinates; ``section`` rows are the complement vectors.
    """

    source: Subspace
    kernel: Subspace
    complement: Tuple[int, ...]
    representative_matrix: Matrix
    section: Matrix
    _kernel_rref: Matrix
    _kernel_pivots: Tuple[int, ...]

    @property
    def projected_dim(self) -> int:
        return len(self.complement)

    def _reduce_coords(self, y: Sequence[Fraction]) -> Vector:
        return _complement_coords(y, self._kernel_rref, self._kernel_pivots, self.complement)

    def project(self, v: Sequence[Fraction]) -> Vector:
        """Quotient coordinates of a vector of A"""
        return self._reduce_coords(self.source.coordinates(v))

    def lift(self, coords: Sequence[Fraction]) -> Vector:
        """Section of the projection: complement vector with the given coordinates"""
        if len(coords) != self.projected_dim:
            raise DimensionMismatchError(f"expected {self.projected_dim} quotient coordinates")
        if not coords:
            return zero_vector(self.source.ambient_dim)
        return self.section.covector_apply(coords)

    def projection_matrix(self) -> Matrix:
        """projected_dim × ambient matrix P with P·v = project(v) for v in A"""
        grid = [[Fraction(0)] * self.source.ambient_dim for _ in range(self.projected_dim)]
        for i, p in enumerate(self.source.pivots):
            for j in range(self.projected_dim):
                grid[j][p] = self.representative_matrix[i, j]
        return Matrix(self.projected_dim, self.source.ambient_dim,
                      tuple(x for row in grid for x in row))


def quotient_map(a: Subspace, b: Subspace) -> QuotientMap:
    _check_same_ambient(a, b)
    if not b.is_subset(a):
        raise NotASubspaceError("quotient A/B requires B ⊆ A")
    r = a.dim
    coords = [a.coordinates(v) for v in b.vectors()]
    if coords:
        reduced, pivots = rref_with_pivots(Matrix.from_rows(coords, r))
        kernel_rref = Matrix(len(pivots), r, reduced.entries[:len(pivots) * r])
    else:
        pivots, kernel_rref = (), Matrix(0, r, ())
    pivot_set = set(pivots)
    complement = tuple(j for j in range(r) if j not in pivot_set)
    reps = [_complement_coords(unit_vector(r, i), kernel_rref, pivots, complement) for i in range(r)]
    return QuotientMap(
        source=a,
        kernel=b,
        complement=complement,
        representative_matrix=Matrix(r, len(complement), tuple(x for row in reps for x in row)),
        section=Matrix(len(complement), a.ambient_dim,
                       tuple(x for j in complement for x in a.basis.row(j))),
        _kernel_rref=kernel_rref,
        _kernel_pivots=tuple(pivots),
    )


def _complement_coords(y: Sequence[Fraction], kernel_rref: Matrix,
                       kernel_pivots: Sequence[int], complement: Sequence[int]) -> Vector:
    out = list(y)
    for r, p in enumerate(kernel_pivots):
        c = out[p]
        if c != 0:
            out = [x - c * z for x, z in zip(out, kernel_rref.row(r))]
    return tuple(out[j] for j in complement)


def solve(m: Matrix, rhs: Sequence[Scalar]) -> Tuple[Vector, Subspace]:
    """
    Solve m·x = rhs exactly.

    Returns the particular solution obtained by setting every free variable
    to zero, together with the solution space of the homogeneous system.
    """
    rhs = vector(rhs)
    if len(rhs) != m.rows:
        raise DimensionMismatchError(f"right-hand side of length {len(rhs)} for {m.rows} equations")
    grid = [list(m.row(i)) + [rhs[i]] for i in range(m.rows)]
    pivots = _rref_grid(grid, m.cols + 1)
    if m.cols in pivots:
        raise InconsistentSystemError("linear system has no solution")
    x = [Fraction(0)] * m.cols
    for r, p in enumerate(pivots):
        x[p] = grid[r][m.cols]
    return tuple(x), nullspace(m)


def inverse(m: Matrix) -> Matrix:
    """Exact inverse of a square matrix; raises InconsistentSystemError when singular"""
    if not m.is_square():
        raise DimensionMismatchError(f"cannot invert a {m.rows}x{m.cols} matrix")
    n = m.rows
    grid = [list(m.row(i)) + [Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    pivots = _rref_grid(grid, 2 * n)
    if tuple(pivots[:n]) != tuple(range(n)):
        raise InconsistentSystemError("matrix is singular")
    return Matrix.from_rows([row[n:] for row in grid], n)
