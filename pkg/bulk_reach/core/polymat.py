"""Truncated polynomials and polynomial matrices over GF(2).

A TruncatedPoly keeps the coefficients of degrees 0..b of a power series over
GF(2) packed into one Python int (bit i is the coefficient of x^i). Addition
is XOR and multiplication is carry-less multiplication followed by masking.

PolyMatrix is an immutable matrix of such polynomials sharing one bound b.
Inversion works over the local ring GF(2)[x]/(x^(b+1)): an element is a unit
exactly when its constant coefficient is 1, so Gauss-Jordan elimination with
unit pivots succeeds iff the constant-term matrix is invertible over GF(2).
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import reduce

from bulk_reach.core.errors import (
    BoundMismatchError,
    GuardExceededError,
    NonInvertibleError,
    SeriesPreconditionError,
)

Edge = tuple[int, int]

# Cofactor expansion is exponential in the dimension
ADJUGATE_MAX_DIM = 6


def _mask(bound: int) -> int:
    return (1 << (bound + 1)) - 1


def _clmul(a: int, b: int, mask: int) -> int:
    """Carry-less product of two bitsets, truncated by mask."""
    if a.bit_count() > b.bit_count():
        a, b = b, a
    result = 0
    while a:
        low = a & -a
        result ^= b << (low.bit_length() - 1)
        a ^= low
    return result & mask


def _series_inverse_bits(p: int, bound: int) -> int:
    if not p & 1:
        raise NonInvertibleError("Power series with constant term 0 is not a unit.")
    mask = _mask(bound)
    q, precision = 1, 1
    # pq = 1 + e with e = 0 mod x^k gives p(pq^2) = 1 + e^2 in characteristic 2
    while precision < bound + 1:
        q = _clmul(p, _clmul(q, q, mask), mask)
        precision *= 2
    return q


@dataclass(frozen=True)
class TruncatedPoly:
    """A polynomial over GF(2) truncated above degree `bound`.

    Attributes:
        bits: Coefficient bitset, bit i for x^i.
        bound: Degree bound b; coefficients above b are always zero.
    """

    bits: int
    bound: int

    def __post_init__(self) -> None:
        if self.bound < 0:
            raise BoundMismatchError(f"Degree bound must be >= 0, got {self.bound}.")
        object.__setattr__(self, "bits", self.bits & _mask(self.bound))

    @classmethod
    def zero(cls, bound: int) -> TruncatedPoly:
        return cls(0, bound)

    @classmethod
    def one(cls, bound: int) -> TruncatedPoly:
        return cls(1, bound)

    @classmethod
    def monomial(cls, exponent: int, bound: int) -> TruncatedPoly:
        """x^exponent, which is 0 when exponent > bound."""
        return cls(1 << exponent if exponent <= bound else 0, bound)

    @classmethod
    def from_exponents(cls, exponents: Iterable[int], bound: int) -> TruncatedPoly:
        bits = 0
        for e in exponents:
            bits ^= 1 << e
        return cls(bits, bound)

    def exponents(self) -> list[int]:
        """Degrees with coefficient 1, ascending."""
        return [i for i in range(self.bits.bit_length()) if self.bits >> i & 1]

    def coefficient(self, i: int) -> int:
        return self.bits >> i & 1

    @property
    def degree(self) -> int:
        """Highest degree with coefficient 1, or -1 for the zero polynomial."""
        return self.bits.bit_length() - 1

    @property
    def lowest_degree(self) -> int:
        """Lowest degree with coefficient 1, or -1 for the zero polynomial."""
        return (self.bits & -self.bits).bit_length() - 1

    def is_zero(self) -> bool:
        return self.bits == 0

    def is_unit(self) -> bool:
        return bool(self.bits & 1)

    def truncate_to(self, bound: int) -> TruncatedPoly:
        return TruncatedPoly(self.bits, bound)

    def __add__(self, other: TruncatedPoly) -> TruncatedPoly:
        return poly_add(self, other)

    def __mul__(self, other: TruncatedPoly) -> TruncatedPoly:
        return poly_mul(self, other)

    def __str__(self) -> str:
        if not self.bits:
            return "0"
        terms = ["1" if e == 0 else "x" if e == 1 else f"x^{e}" for e in self.exponents()]
        return " + ".join(terms)


def _same_bound(p: TruncatedPoly, q: TruncatedPoly) -> None:
    if p.bound != q.bound:
        raise BoundMismatchError(f"Degree bounds differ: {p.bound} vs {q.bound}.")


def poly_add(p: TruncatedPoly, q: TruncatedPoly) -> TruncatedPoly:
    """Coefficientwise XOR.

    Raises:
        BoundMismatchError: If the bounds differ.
    """
    _same_bound(p, q)
    return TruncatedPoly(p.bits ^ q.bits, p.bound)


def poly_mul(p: TruncatedPoly, q: TruncatedPoly) -> TruncatedPoly:
    """Convolution mod 2, truncated at the shared bound.

    Raises:
        BoundMismatchError: If the bounds differ.
    """
    _same_bound(p, q)
    return TruncatedPoly(_clmul(p.bits, q.bits, _mask(p.bound)), p.bound)


def poly_series_inverse(p: TruncatedPoly) -> TruncatedPoly:
    """The q with p*q = 1 up to degree b, by Newton doubling.

    Raises:
        NonInvertibleError: If p has constant coefficient 0.
    """
    return TruncatedPoly(_series_inverse_bits(p.bits, p.bound), p.bound)


@dataclass(frozen=True, eq=False)
class PolyMatrix:
    """A rows x cols matrix of TruncatedPoly entries with a shared bound.

    Entries are stored as raw coefficient bitsets; `entry` wraps one as a
    TruncatedPoly.

    Attributes:
        data: Row-major bitsets, already masked to the bound.
        bound: Shared degree bound b.
        n_cols: Column count (kept explicitly so 0-row matrices have a shape).
    """

    data: tuple[tuple[int, ...], ...]
    bound: int
    n_cols: int

    def __post_init__(self) -> None:
        mask = _mask(self.bound)
        rows = tuple(tuple(x & mask for x in row) for row in self.data)
        for row in rows:
            if len(row) != self.n_cols:
                raise BoundMismatchError(
                    f"Ragged matrix: row of length {len(row)}, expected {self.n_cols}."
                )
        object.__setattr__(self, "data", rows)

    # Construction

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], bound: int, n_cols: int | None = None) -> PolyMatrix:
        cols = len(rows[0]) if rows and n_cols is None else (n_cols or 0)
        return cls(tuple(tuple(r) for r in rows), bound, cols)

    @classmethod
    def from_polys(cls, rows: Sequence[Sequence[TruncatedPoly]]) -> PolyMatrix:
        bound = rows[0][0].bound
        for row in rows:
            for p in row:
                if p.bound != bound:
                    raise BoundMismatchError("Entries disagree on the degree bound.")
        return cls.from_rows([[p.bits for p in row] for row in rows], bound)

    @classmethod
    def zeros(cls, rows: int, cols: int, bound: int) -> PolyMatrix:
        return cls(tuple((0,) * cols for _ in range(rows)), bound, cols)

    @classmethod
    def identity(cls, n: int, bound: int) -> PolyMatrix:
        return cls(
            tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)), bound, n
        )

    @classmethod
    def from_edges(cls, n: int, weights: Mapping[Edge, int], bound: int) -> PolyMatrix:
        """The weighted adjacency matrix A(x): entry (u, v) is x^w(u,v).

        Weights above the bound vanish under truncation.
        """
        rows = [[0] * n for _ in range(n)]
        for (u, v), w in weights.items():
            if w <= bound:
                rows[u][v] ^= 1 << w
        return cls.from_rows(rows, bound, n)

    # Access

    @property
    def rows(self) -> int:
        return len(self.data)

    @property
    def cols(self) -> int:
        return self.n_cols

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def bits(self, i: int, j: int) -> int:
        return self.data[i][j]

    def entry(self, i: int, j: int) -> TruncatedPoly:
        return TruncatedPoly(self.data[i][j], self.bound)

    def constant_term_matrix(self) -> list[list[int]]:
        """Entries mod x, as a 0/1 matrix over GF(2)."""
        return [[x & 1 for x in row] for row in self.data]

    def truncate_to(self, bound: int) -> PolyMatrix:
        return PolyMatrix(self.data, bound, self.n_cols)

    def take_rows(self, indices: Sequence[int]) -> PolyMatrix:
        return PolyMatrix(tuple(self.data[i] for i in indices), self.bound, self.n_cols)

    def take_cols(self, indices: Sequence[int]) -> PolyMatrix:
        return PolyMatrix(
            tuple(tuple(row[j] for j in indices) for row in self.data),
            self.bound,
            len(indices),
        )

    def nonzero_entries(self) -> list[tuple[int, int]]:
        return [
            (i, j) for i, row in enumerate(self.data) for j, x in enumerate(row) if x
        ]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return (
            self.bound == other.bound
            and self.shape == other.shape
            and self.data == other.data
        )

    def __hash__(self) -> int:
        return hash((self.data, self.bound, self.n_cols))

    def __add__(self, other: PolyMatrix) -> PolyMatrix:
        return mat_add(self, other)

    def __matmul__(self, other: PolyMatrix) -> PolyMatrix:
        return mat_mul(self, other)

    def dump(self) -> str:
        """Debug text: one `r c : d1,d2,...` line per nonzero entry."""
        lines = []
        for i, j in self.nonzero_entries():
            exps = ",".join(map(str, self.entry(i, j).exponents()))
            lines.append(f"{i} {j} : {exps}")
        return "\n".join(lines) + ("\n" if lines else "")


def _check_bounds(a: PolyMatrix, b: PolyMatrix) -> None:
    if a.bound != b.bound:
        raise BoundMismatchError(f"Degree bounds differ: {a.bound} vs {b.bound}.")


def mat_add(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    """Entrywise sum (XOR).

    Raises:
        BoundMismatchError: On shape or bound mismatch.
    """
    _check_bounds(a, b)
    if a.shape != b.shape:
        raise BoundMismatchError(f"Cannot add {a.shape} and {b.shape} matrices.")
    return PolyMatrix(
        tuple(tuple(x ^ y for x, y in zip(ra, rb, strict=True)) for ra, rb in zip(a.data, b.data, strict=True)),
        a.bound,
        a.n_cols,
    )


def mat_mul(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    """Matrix product over GF(2)[x]/(x^(b+1)).

    Raises:
        BoundMismatchError: On non-conformant shapes or a bound mismatch.
    """
    _check_bounds(a, b)
    if a.cols != b.rows:
        raise BoundMismatchError(f"Cannot multiply {a.shape} by {b.shape}.")
    mask = _mask(a.bound)
    out = []
    for row in a.data:
        acc = [0] * b.cols
        for k, x in enumerate(row):
            if not x:
                continue
            for j, y in enumerate(b.data[k]):
                if y:
                    acc[j] ^= _clmul(x, y, mask)
        out.append(tuple(acc))
    return PolyMatrix(tuple(out), a.bound, b.cols)


def mat_inverse_local(m: PolyMatrix) -> PolyMatrix:
    """Inverse over the local ring by Gauss-Jordan elimination.

    Each column takes as pivot the first remaining row whose entry is a unit;
    the pivot is inverted as a power series.

    Raises:
        BoundMismatchError: If m is not square.
        NonInvertibleError: If the constant-term matrix is singular over GF(2).
    """
    n = m.rows
    if m.cols != n:
        raise BoundMismatchError(f"Cannot invert a {m.shape} matrix.")
    mask = _mask(m.bound)
    left = [list(row) for row in m.data]
    right = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    for c in range(n):
        pivot = next((r for r in range(c, n) if left[r][c] & 1), None)
        if pivot is None:
            raise NonInvertibleError(
                f"Constant-term matrix is singular (no unit pivot in column {c})."
            )
        left[c], left[pivot] = left[pivot], left[c]
        right[c], right[pivot] = right[pivot], right[c]

        inv = _series_inverse_bits(left[c][c], m.bound)
        left[c] = [_clmul(inv, x, mask) for x in left[c]]
        right[c] = [_clmul(inv, x, mask) for x in right[c]]

        for r in range(n):
            factor = left[r][c]
            if r == c or not factor:
                continue
            left[r] = [x ^ _clmul(factor, y, mask) for x, y in zip(left[r], left[c], strict=True)]
            right[r] = [x ^ _clmul(factor, y, mask) for x, y in zip(right[r], right[c], strict=True)]

    return PolyMatrix.from_rows(right, m.bound, n)


def _determinant(rows: list[list[int]], mask: int) -> int:
    # Cofactor expansion along the first row; signs vanish in characteristic 2.
    if not rows:
        return 1
    det = 0
    for j, x in enumerate(rows[0]):
        if x:
            minor = [row[:j] + row[j + 1 :] for row in rows[1:]]
            det ^= _clmul(x, _determinant(minor, mask), mask)
    return det


def mat_inverse_adjugate(m: PolyMatrix) -> PolyMatrix:
    """Debug inverse via adjugate and determinant, for cross-checking.

    Raises:
        GuardExceededError: If the dimension exceeds ADJUGATE_MAX_DIM.
        BoundMismatchError: If m is not square.
        NonInvertibleError: If the determinant is not a unit.
    """
    n = m.rows
    if m.cols != n:
        raise BoundMismatchError(f"Cannot invert a {m.shape} matrix.")
    if n > ADJUGATE_MAX_DIM:
        raise GuardExceededError(
            f"Adjugate inversion is limited to {ADJUGATE_MAX_DIM}x{ADJUGATE_MAX_DIM}, got {n}x{n}."
        )
    mask = _mask(m.bound)
    rows = [list(r) for r in m.data]
    det_inv = _series_inverse_bits(_determinant(rows, mask), m.bound)

    def cofactor(i: int, j: int) -> int:
        minor = [r[:j] + r[j + 1 :] for k, r in enumerate(rows) if k != i]
        return _determinant(minor, mask)

    inverse = [[_clmul(det_inv, cofactor(j, i), mask) for j in range(n)] for i in range(n)]
    return PolyMatrix.from_rows(inverse, m.bound, n)


@dataclass(frozen=True)
class UBVDecomposition:
    """A sparse change written as U * B * V with 0/1 selectors U and V.

    Attributes:
        U: n x |R| selector of the affected rows R.
        B: Dense |R| x |C| block of changed entries.
        V: |C| x n selector of the affected columns C.
        row_indices: R, ascending.
        col_indices: C, ascending.
    """

    U: PolyMatrix
    B: PolyMatrix
    V: PolyMatrix
    row_indices: tuple[int, ...]
    col_indices: tuple[int, ...]

    @property
    def rank(self) -> int:
        """r = |R| + |C| (not minimized)."""
        return len(self.row_indices) + len(self.col_indices)

    @property
    def is_empty(self) -> bool:
        return not self.row_indices

    def reassemble(self) -> PolyMatrix:
        return mat_mul(mat_mul(self.U, self.B), self.V)


def decompose_delta(
    entries: Iterable[tuple[int, int, TruncatedPoly]], n: int, bound: int
) -> UBVDecomposition:
    """Factor a sparse n x n change into row and column selectors.

    Repeated (row, col) entries are summed.

    Args:
        entries: (row, col, poly) triples of the change.
        n: Dimension of the changed matrix.
        bound: Shared degree bound.

    Returns:
        UBVDecomposition with U * B * V equal to the change.

    Raises:
        BoundMismatchError: If an entry has another bound.
    """
    block: dict[tuple[int, int], int] = {}
    for r, c, p in entries:
        if p.bound != bound:
            raise BoundMismatchError(f"Entry ({r},{c}) has bound {p.bound}, expected {bound}.")
        block[(r, c)] = block.get((r, c), 0) ^ p.bits
    block = {rc: bits for rc, bits in block.items() if bits}

    rows = tuple(sorted({r for r, _ in block}))
    cols = tuple(sorted({c for _, c in block}))
    u = [[1 if i == r else 0 for r in rows] for i in range(n)]
    b = [[block.get((r, c), 0) for c in cols] for r in rows]
    v = [[1 if j == c else 0 for j in range(n)] for c in cols]
    return UBVDecomposition(
        U=PolyMatrix.from_rows(u, bound, len(rows)),
        B=PolyMatrix.from_rows(b, bound, len(cols)),
        V=PolyMatrix.from_rows(v, bound, n),
        row_indices=rows,
        col_indices=cols,
    )


def _check_constant_terms(c: PolyMatrix, d: UBVDecomposition) -> None:
    # the correction must vanish mod x
    for i, row in enumerate(c.data):
        for j, x in enumerate(row):
            if x & 1 != (i == j):
                raise SeriesPreconditionError(
                    f"Approximate inverse is not I mod x at ({i},{j})."
                )
    for r, row in zip(d.row_indices, d.B.data, strict=True):
        for col, x in zip(d.col_indices, row, strict=True):
            if x & 1:
                raise SeriesPreconditionError(f"Change entry ({r},{col}) has a constant term.")


def smw_update(c: PolyMatrix, d: UBVDecomposition) -> PolyMatrix:
    """Update an approximate inverse after a low-rank change.

    Given C approximating M^-1, returns C + C U (I + B V C U)^-1 B V C, which
    approximates (M + U B V)^-1 to the same degree bound (in characteristic 2
    subtraction is addition). U and V are selectors, so C U and V C are
    taken as column and row slices of C.

    Raises:
        BoundMismatchError: If C and the decomposition disagree on bound or shape.
        NonInvertibleError: If the inner matrix is not invertible, which means
            M + U B V is singular or C is not an approximate inverse.
        SeriesPreconditionError: If C is not I mod x, or B has a constant term.
    """
    if d.is_empty:
        return c
    _check_bounds(c, d.B)
    if c.rows != c.cols or d.U.rows != c.rows:
        raise BoundMismatchError(f"Decomposition of dimension {d.U.rows} does not fit {c.shape}.")
    _check_constant_terms(c, d)

    cu = c.take_cols(d.row_indices)
    vc = c.take_rows(d.col_indices)
    inner = mat_add(
        PolyMatrix.identity(len(d.row_indices), c.bound),
        mat_mul(d.B, vc.take_cols(d.row_indices)),
    )
    correction = reduce(mat_mul, (cu, mat_inverse_local(inner), d.B, vc))
    return mat_add(c, correction)
