"""Dense exact matrices, determinants, Pfaffians and volumes.

Vectors are tuples of Fractions. System vectors are kept unnormalized
(``f_i - f_j`` rather than ``(f_i - f_j)/sqrt(2)``); callers divide out squared
norms according to how often each vector occurs in a term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import List, Sequence, Tuple

from .ring import Polynomial, Radical, RingElement, is_zero, radical_normalize, simplify

VectorQ = Tuple[Fraction, ...]


class NonSquareError(ValueError):
    pass


class NotSkewSymmetricError(ValueError):
    pass


class OddSizeError(ValueError):
    pass


class DimensionMismatchError(ValueError):
    pass


class SpanMismatchError(ValueError):
    pass


class NotInvariantError(ValueError):
    pass


class DependentBasisError(ValueError):
    pass


def vec(*xs) -> VectorQ:
    return tuple(Fraction(x) for x in xs)


def dot(a: Sequence, b: Sequence):
    if len(a) != len(b):
        raise DimensionMismatchError(f"{len(a)} != {len(b)}")
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


class Matrix:
    """Immutable row-major matrix over Fractions and/or Polynomials."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows):
        rows = tuple(tuple(simplify(x) for x in r) for r in rows)
        self.nrows = len(rows)
        self.ncols = len(rows[0]) if rows else 0
        if any(len(r) != self.ncols for r in rows):
            raise DimensionMismatchError("ragged rows")
        self.rows = rows

    @classmethod
    def zeros(cls, n, m=None):
        m = n if m is None else m
        return cls([[Fraction(0)] * m for _ in range(n)])

    @classmethod
    def identity(cls, n):
        return cls([[Fraction(int(i == j)) for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, cols):
        cols = list(cols)
        return cls([[c[i] for c in cols] for i in range(len(cols[0]))])

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j):
        return tuple(r[j] for r in self.rows)

    @property
    def T(self):
        return Matrix(zip(*self.rows)) if self.rows else self

    def __add__(self, other):
        if self.shape != other.shape:
            raise DimensionMismatchError(f"{self.shape} vs {other.shape}")
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return self + (-1) * other

    def __neg__(self):
        return (-1) * self

    def __mul__(self, c):
        if isinstance(c, Matrix):
            return NotImplemented
        return Matrix([[c * a for a in r] for r in self.rows])

    __rmul__ = __mul__

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise DimensionMismatchError(f"{self.shape} @ {other.shape}")
        cols = list(zip(*other.rows))
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = Fraction(0)
                for a, b in zip(r, c):
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return Matrix(out)

    def apply(self, v):
        return tuple(sum((a * x for a, x in zip(r, v)), Fraction(0)) for r in self.rows)

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def is_zero(self):
        return all(is_zero(x) for r in self.rows for x in r)

    def is_rational(self):
        return not any(isinstance(x, Polynomial) for r in self.rows for x in r)

    def submatrix(self, rows, cols):
        return Matrix([[self.rows[i][j] for j in cols] for i in rows])

    def map(self, f):
        return Matrix([[f(x) for x in r] for r in self.rows])

    def __repr__(self):
        return f"Matrix({[[str(x) for x in r] for r in self.rows]})"


# determinants ---------------------------------------------------------------


def det_cofactor(m: Matrix) -> RingElement:
    """Division-free Laplace expansion, memoised over the set of used columns."""
    n = m.nrows
    if m.ncols != n:
        raise NonSquareError(m.shape)
    if n == 0:
        return Fraction(1)
    rows = m.rows
    memo = {}

    def minor(r, cols):
        # determinant of rows r.. against the column tuple `cols`
        if r == n:
            return Fraction(1)
        key = cols
        if key in memo:
            return memo[key]
        acc = Fraction(0)
        for pos, c in enumerate(cols):
            a = rows[r][c]
            if is_zero(a):
                continue
            sub = minor(r + 1, cols[:pos] + cols[pos + 1:])
            if is_zero(sub):
                continue
            term = a * sub
            acc = acc + term if pos % 2 == 0 else acc - term
        memo[key] = acc
        return acc

    return simplify(minor(0, tuple(range(n))))


def det_bareiss(m: Matrix) -> Fraction:
    """Fraction-free elimination for rational matrices."""
    n = m.nrows
    if m.ncols != n:
        raise NonSquareError(m.shape)
    if not m.is_rational():
        raise TypeError("det_bareiss needs rational entries")
    if n == 0:
        return Fraction(1)
    # clear denominators so the elimination runs over the integers
    den = 1
    for r in m.rows:
        for x in r:
            den = den * x.denominator // math.gcd(den, x.denominator)
    a = [[int(x * den) for x in r] for r in m.rows]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return Fraction(sign * a[n - 1][n - 1], den ** n)


def determinant(m: Matrix) -> RingElement:
    if m.nrows != m.ncols:
        raise NonSquareError(m.shape)
    if m.nrows > 4 and m.is_rational():
        return det_bareiss(m)
    return det_cofactor(m)


def pfaffian(m: Matrix) -> RingElement:
    """Pfaffian by expansion along the first row; Pf([[0, a], [-a, 0]]) = a."""
    n = m.nrows
    if m.ncols != n:
        raise NonSquareError(m.shape)
    for i in range(n):
        for j in range(i, n):
            if m[i, j] != -m[j, i]:
                raise NotSkewSymmetricError((i, j))
    if n % 2:
        raise OddSizeError(n)
    rows = m.rows
    memo = {}

    def pf(idx):
        if not idx:
            return Fraction(1)
        if idx in memo:
            return memo[idx]
        i, rest = idx[0], idx[1:]
        acc = Fraction(0)
        for pos, j in enumerate(rest):
            a = rows[i][j]
            if is_zero(a):
                continue
            sub = pf(rest[:pos] + rest[pos + 1:])
            if is_zero(sub):
                continue
            acc = acc + a * sub if pos % 2 == 0 else acc - a * sub
        memo[idx] = acc
        return acc

    return simplify(pf(tuple(range(n))))


# volumes --------------------------------------------------------------------


def _check_dims(vectors):
    dims = {len(v) for v in vectors}
    if len(dims) > 1:
        raise DimensionMismatchError(sorted(dims))


def gram_matrix(v: Sequence[VectorQ]) -> Matrix:
    _check_dims(v)
    return Matrix([[dot(a, b) for b in v] for a in v])


def rank(vectors: Sequence[VectorQ]) -> int:
    rows = [list(map(Fraction, v)) for v in vectors]
    if not rows:
        return 0
    r = 0
    ncols = len(rows[0])
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c] / rows[r][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


def paired_volume(b: Sequence[VectorQ], c: Sequence[VectorQ]) -> Fraction:
    """vol(b) * vol(c) as the determinant of the cross-Gram matrix ``(b_i, c_j)``."""
    if len(b) != len(c):
        raise DimensionMismatchError(f"{len(b)} vs {len(c)} vectors")
    _check_dims(list(b) + list(c))
    n = len(b)
    if n == 0:
        return Fraction(1)
    if rank(b) < n or rank(c) < n:
        return Fraction(0)
    if rank(list(b) + list(c)) != n:
        raise SpanMismatchError("b and c span different subspaces")
    return determinant(Matrix([[dot(x, y) for y in c] for x in b]))


def sign(x) -> int:
    return (x > 0) - (x < 0)


def oriented_volume(b: Sequence[VectorQ], reference: Sequence[VectorQ]) -> Radical:
    """Signed volume of ``b`` in the orientation fixed by ``reference``."""
    if len(b) != len(reference):
        raise DimensionMismatchError(f"{len(b)} vs {len(reference)} vectors")
    if rank(b) < len(b):
        return Radical(0)
    s = sign(paired_volume(b, reference))
    return radical_normalize(Fraction(s), determinant(gram_matrix(b)))


def reference_prefix(vectors: Sequence[VectorQ]) -> List[int]:
    """Indices of the first maximal linearly independent prefix-greedy subset."""
    chosen: List[int] = []
    for i, v in enumerate(vectors):
        if rank([vectors[j] for j in chosen] + [v]) > len(chosen):
            chosen.append(i)
    return chosen


def solve_rational(a: Matrix, b: Matrix) -> Matrix:
    """Solve ``a x = b`` for square invertible rational ``a`` (b may hold polynomials)."""
    n = a.nrows
    aug = [list(a.rows[i]) + list(b.rows[i]) for i in range(n)]
    for c in range(n):
        piv = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if piv is None:
            raise DependentBasisError("singular system")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / Fraction(aug[c][c])
        aug[c] = [x * inv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return Matrix([row[n:] for row in aug])


def operator_on_subspace(p: Matrix, basis: Sequence[VectorQ]) -> Matrix:
    """Matrix ``M`` with ``p B = B M`` where ``B`` has the basis vectors as columns."""
    basis = list(basis)
    if not basis:
        return Matrix([])
    _check_dims(basis)
    if p.nrows != p.ncols or p.nrows != len(basis[0]):
        raise DimensionMismatchError(f"{p.shape} vs dimension {len(basis[0])}")
    if rank(basis) < len(basis):
        raise DependentBasisError("basis vectors are linearly dependent")
    B = Matrix.from_columns(basis)
    PB = p @ B
    M = solve_rational(B.T @ B, B.T @ PB)
    if B @ M != PB:
        raise NotInvariantError("operator does not preserve the span of the basis")
    return M


def bilinear_on_subspace(p: Matrix, basis: Sequence[VectorQ]) -> Matrix:
    """The form ``(b_i, p b_j)`` restricted to the span of ``basis``."""
    B = Matrix.from_columns(list(basis))
    return B.T @ p @ B


def orthonormal_pfaffian(p: Matrix, basis: Sequence[VectorQ]) -> Radical:
    """Pfaffian of a skew operator on span(basis), orthonormal frame oriented like ``basis``.

    With G the Gram matrix of the basis and A = B^T p B, an oriented orthonormal
    frame O = B C has det C = 1/sqrt(det G), so Pf = Pf(A)/sqrt(det G).
    """
    g = determinant(gram_matrix(list(basis)))
    pf = pfaffian(bilinear_on_subspace(p, basis))
    return radical_normalize(simplify(pf * (1 / g)), g)


def float_orthonormal_matrix(p: Matrix, basis: Sequence[VectorQ]):
    """Float matrix of ``p`` in a Gram-Schmidt orthonormalisation of ``basis``."""
    import numpy as np

    B = np.array([[float(x) for x in v] for v in basis]).T
    q, r = np.linalg.qr(B)
    # keep the orientation of the basis
    q = q * np.sign(np.diag(r))
    P = np.array([[float(x) for x in row] for row in p.rows])
    return q.T @ P @ q


def float_pfaffian(a) -> float:
    """Pfaffian of a small float skew matrix by row expansion."""
    n = a.shape[0]

    @lru_cache(maxsize=None)
    def pf(idx):
        if not idx:
            return 1.0
        i, rest = idx[0], idx[1:]
        acc = 0.0
        for pos, j in enumerate(rest):
            s = 1.0 if pos % 2 == 0 else -1.0
            acc += s * a[i, j] * pf(rest[:pos] + rest[pos + 1:])
        return acc

    return pf(tuple(range(n)))


@dataclass(frozen=True)
class VectorSystem:
    """Nonzero rational vectors ``e_1..e_N`` plus an orienting basis of their span.

    All indices (``reference_basis``, :meth:`vector`, :meth:`inner`) are 1-based,
    matching weight multi-indices.
    """

    vectors: Tuple[VectorQ, ...]
    reference_basis: Tuple[int, ...] = ()
    norms_sq: Tuple[Fraction, ...] = field(init=False)

    def __post_init__(self):
        vs = tuple(tuple(Fraction(x) for x in v) for v in self.vectors)
        if not vs:
            raise ValueError("empty vector system")
        _check_dims(vs)
        norms = tuple(dot(v, v) for v in vs)
        if any(n == 0 for n in norms):
            raise ValueError("zero vector in system")
        object.__setattr__(self, "vectors", vs)
        object.__setattr__(self, "norms_sq", norms)
        ref = tuple(self.reference_basis) or tuple(i + 1 for i in reference_prefix(vs))
        if any(not 1 <= i <= len(vs) for i in ref):
            raise IndexError(f"reference basis {ref} out of range")
        ref_vs = [vs[i - 1] for i in ref]
        if rank(ref_vs) != len(ref) or rank(list(vs)) != len(ref):
            raise DependentBasisError("reference basis must be a basis of the span")
        object.__setattr__(self, "reference_basis", ref)

    @property
    def N(self) -> int:
        return len(self.vectors)

    @property
    def ambient_dim(self) -> int:
        return len(self.vectors[0])

    @property
    def n(self) -> int:
        """Dimension of the span."""
        return len(self.reference_basis)

    def vector(self, p: int) -> VectorQ:
        return self.vectors[p - 1]

    def norm_sq(self, p: int) -> Fraction:
        return self.norms_sq[p - 1]

    def inner(self, p: int, q: int) -> Fraction:
        return dot(self.vectors[p - 1], self.vectors[q - 1])

    def basis_vectors(self):
        return [self.vectors[i - 1] for i in self.reference_basis]
