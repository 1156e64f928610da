"""A_n, B_n and D_n vector systems and the Kirchhoff / T / T_w matrices.

A_n vertex labels run 0..n; system indices run 1..N. ``RootFamily.index_map``
is the only place the two are tied together.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

from .commutators import WeightAssignment
from .enumeration import b_edges
from .linalg import Matrix, VectorSystem
from .ring import Polynomial, Radical, RingElement, radical_normalize, simplify

Root = Tuple  # A: (i, j); B/D: ("+", i, j) | ("-", i, j) | ("loop", i)


@dataclass(frozen=True)
class RootFamily:
    family: str
    n: int
    roots: Tuple[Root, ...]
    system: VectorSystem

    @property
    def index_map(self) -> Dict[Root, int]:
        return {r: i for i, r in enumerate(self.roots, start=1)}

    def index(self, root: Root) -> int:
        return self.roots.index(root) + 1

    def root(self, index: int) -> Root:
        return self.roots[index - 1]

    @property
    def label(self) -> str:
        return f"{self.family.lower()}n:{self.n}"


def _basis(d: int, i: int) -> List[int]:
    v = [0] * d
    v[i] = 1
    return v


def a_root_vector(n: int, i: int, j: int) -> Tuple[int, ...]:
    v = [0] * (n + 1)
    v[i] += 1
    v[j] -= 1
    return tuple(v)


def b_root_vector(n: int, root: Root) -> Tuple[int, ...]:
    v = [0] * n
    if root[0] == "loop":
        v[root[1] - 1] = 1
    else:
        _, i, j = root
        v[i - 1] = 1
        v[j - 1] = 1 if root[0] == "+" else -1
    return tuple(v)


def build_family(family: str, n: int) -> RootFamily:
    family = family.upper()
    if n < 1:
        raise ValueError("rank must be at least 1")
    if family == "A":
        roots = tuple(itertools.combinations(range(n + 1), 2))
        vectors = [a_root_vector(n, i, j) for i, j in roots]
        ref = tuple(roots.index((i, i + 1)) + 1 for i in range(n))
    elif family in ("B", "D"):
        roots = tuple(e for e in b_edges(n) if family == "B" or e[0] != "loop")
        if not roots:
            raise ValueError("D_1 has no roots")
        vectors = [b_root_vector(n, r) for r in roots]
        simple = [("-", i, i + 1) for i in range(1, n)]
        if family == "B":
            simple.append(("loop", n))
        else:
            simple.append(("+", n - 1, n))
        ref = tuple(roots.index(r) + 1 for r in simple)
    else:
        raise ValueError(f"unknown family {family!r}")
    return RootFamily(family, n, roots, VectorSystem(tuple(vectors), ref))


def parse_family(spec: str) -> RootFamily:
    """``an:3``, ``bn:2`` or ``dn:3``."""
    kind, _, rank = spec.partition(":")
    kind = kind.lower()
    if kind not in ("an", "bn", "dn") or not rank.isdigit():
        raise ValueError(f"bad family spec {spec!r}")
    return build_family(kind[0], int(rank))


def unit_inner(system: VectorSystem, p: int, q: int) -> Radical:
    """(e_p, e_q) for the unit vectors along system vectors p and q."""
    return radical_normalize(system.inner(p, q), Fraction(1) / (system.norm_sq(p) * system.norm_sq(q)))


# weights -------------------------------------------------------------------


class SymmetricPairWeights:
    """w_{ij} = w_{ji}, looked up as ``w[(i, j)]``.

    Missing pairs resolve through ``resolve(name, (min, max))``, by default a
    fresh indeterminate.
    """

    def __init__(self, name: str = "w", values=None, resolve=Polynomial.var):
        self.name = name
        self.values = {tuple(sorted(k)): v for k, v in (values or {}).items()}
        self.resolve = resolve

    def __getitem__(self, ij) -> RingElement:
        key = tuple(sorted(ij))
        if key in self.values:
            return self.values[key]
        return self.resolve(self.name, key)


class VertexWeights:
    def __init__(self, name: str = "wl", values=None, resolve=Polynomial.var):
        self.name = name
        self.values = dict(values or {})
        self.resolve = resolve

    def __getitem__(self, i) -> RingElement:
        if i in self.values:
            return self.values[i]
        return self.resolve(self.name, (i,))


class TripleWeights:
    """w_{ijk}, standing for the weight of the ordered root pair ({i,j}, {j,k})."""

    def __init__(self, name: str = "w", resolve=Polynomial.var):
        self.name = name
        self.resolve = resolve

    def __call__(self, i: int, j: int, k: int) -> RingElement:
        return self.resolve(self.name, (i, j, k))


def a_k1_weights(fam: RootFamily, w_pair) -> WeightAssignment:
    """Arity-1 system weights w_{e_ij} := w_pair[(i, j)]."""
    return WeightAssignment(1, {(fam.index(r),): w_pair[r] for r in fam.roots})


def b_k1_weights(fam: RootFamily, w_plus, w_minus, w_loop) -> WeightAssignment:
    entries = {}
    for r in fam.roots:
        if r[0] == "+":
            entries[(fam.index(r),)] = w_plus[(r[1], r[2])]
        elif r[0] == "-":
            entries[(fam.index(r),)] = w_minus[(r[1], r[2])]
        else:
            entries[(fam.index(r),)] = w_loop[r[1]]
    return WeightAssignment(1, entries)


def triple_var(i: int, j: int, k: int, name: str = "w") -> Polynomial:
    return Polynomial.var(name, (i, j, k))


def a_mv_weights(fam: RootFamily, w_triple=triple_var) -> WeightAssignment:
    """Arity-2 weights: w_{ij,jk} := w_triple(i, j, k) on adjacent root pairs, zero elsewhere.

    An ordered pair of distinct roots sharing one vertex j determines the
    triple (i, j, k) with i the other vertex of the first root.
    """
    entries = {}
    for r1 in fam.roots:
        for r2 in fam.roots:
            common = set(r1) & set(r2)
            if r1 == r2 or len(common) != 1:
                continue
            (j,) = common
            (i,) = set(r1) - common
            (k,) = set(r2) - common
            entries[(fam.index(r1), fam.index(r2))] = w_triple(i, j, k)
    return WeightAssignment(2, entries, default="zero")


# named matrices --------------------------------------------------------------


def kirchhoff_matrix(n: int, w_pair=None) -> Matrix:
    """(n+1)x(n+1) Laplacian: off-diagonal -w_ij, diagonal sum_{j != i} w_ij."""
    w_pair = w_pair if w_pair is not None else SymmetricPairWeights()
    rows = []
    for i in range(n + 1):
        row = []
        for j in range(n + 1):
            if i == j:
                acc: RingElement = Fraction(0)
                for l in range(n + 1):
                    if l != i:
                        acc = acc + w_pair[(i, l)]
                row.append(acc)
            else:
                row.append(-w_pair[(i, j)])
        rows.append(row)
    return Matrix(rows)


def alternation(w_triple, i: int, j: int, k: int) -> RingElement:
    """lambda_ijk = w_ijk - w_ikj - w_jik - w_kji + w_jki + w_kij (zero on repeated indices)."""
    if len({i, j, k}) < 3:
        return Fraction(0)
    return simplify(
        w_triple(i, j, k) - w_triple(i, k, j) - w_triple(j, i, k)
        - w_triple(k, j, i) + w_triple(j, k, i) + w_triple(k, i, j)
    )


def mv_matrix(n: int, w_triple=triple_var) -> Matrix:
    """Skew (n+1)x(n+1) matrix t_pq = sum_r lambda_pqr on vertices 0..n."""
    rows = []
    for p in range(n + 1):
        row = []
        for q in range(n + 1):
            acc: RingElement = Fraction(0)
            for r in range(n + 1):
                acc = acc + alternation(w_triple, p, q, r)
            row.append(acc)
        rows.append(row)
    return Matrix(rows)


def bn_matrix(n: int, w_plus=None, w_minus=None, w_loop=None) -> Matrix:
    """Symmetric n x n matrix T_w on vertices 1..n; ``w_loop=False`` drops loops (D_n)."""
    w_plus = w_plus if w_plus is not None else SymmetricPairWeights("wp")
    w_minus = w_minus if w_minus is not None else SymmetricPairWeights("wm")
    if w_loop is None:
        w_loop = VertexWeights("wl")
    rows = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            if i == j:
                acc: RingElement = 2 * w_loop[i] if w_loop is not False else Fraction(0)
                for l in range(1, n + 1):
                    if l != i:
                        acc = acc + w_plus[(i, l)] + w_minus[(i, l)]
                row.append(acc)
            else:
                row.append(w_plus[(i, j)] - w_minus[(i, j)])
        rows.append(row)
    return Matrix(rows)


def principal_submatrix(m: Matrix, remove_index: int) -> Matrix:
    if m.nrows != m.ncols:
        raise ValueError("principal submatrix of a non-square matrix")
    if not 0 <= remove_index < m.nrows:
        raise IndexError(remove_index)
    keep = [i for i in range(m.nrows) if i != remove_index]
    return m.submatrix(keep, keep)
