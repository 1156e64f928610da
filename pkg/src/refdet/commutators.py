"""Reflections, rank-one chain operators and weighted nested commutators.

Two independent constructions of the weighted operator are provided:
``build_p_nested`` multiplies out commutators of reflection matrices, and
``build_p_via_q`` sums chain operators against the derived weights ``u``.
Their agreement is the group-algebra identity behind everything else.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, Mapping, Sequence, Tuple, Union

from .linalg import DimensionMismatchError, Matrix, VectorQ, VectorSystem, dot
from .ring import Polynomial, RingElement, simplify

Permutation = Tuple[int, ...]  # images of 1..k, 1-based


class ZeroVectorError(ValueError):
    pass


class ArityMismatchError(ValueError):
    pass


# permutations and the group algebra -----------------------------------------


def identity_perm(k: int) -> Permutation:
    return tuple(range(1, k + 1))


def cycle_prefix(ell: int, k: int) -> Permutation:
    """tau_ell: 1 -> 2 -> ... -> ell -> 1, fixing everything above ell."""
    return tuple([i + 1 for i in range(1, ell)] + [1] + list(range(ell + 1, k + 1)))


def compose(s: Permutation, r: Permutation) -> Permutation:
    """(s o r)(i) = s(r(i)): r is applied first."""
    return tuple(s[r[i] - 1] for i in range(len(r)))


def inverse(s: Permutation) -> Permutation:
    out = [0] * len(s)
    for i, si in enumerate(s, start=1):
        out[si - 1] = i
    return tuple(out)


def perm_sign(s: Sequence[int]) -> int:
    """Sign of a permutation given as any sequence of distinct comparable items."""
    s = list(s)
    inv = sum(1 for a in range(len(s)) for b in range(a + 1, len(s)) if s[a] > s[b])
    return -1 if inv % 2 else 1


GroupAlgebraElement = Dict[Permutation, Fraction]


def ga_mul(a: GroupAlgebraElement, b: GroupAlgebraElement, convention: str = "right") -> GroupAlgebraElement:
    """Product in Q[S_k]. ``right``: sr means apply r first; ``left``: apply s first."""
    out: Dict[Permutation, Fraction] = {}
    for s, cs in a.items():
        for r, cr in b.items():
            p = compose(s, r) if convention == "right" else compose(r, s)
            out[p] = out.get(p, 0) + cs * cr
    return {p: c for p, c in out.items() if c}


CONVENTIONS = ("right", "left", "right-inverse", "left-inverse")


@lru_cache(maxsize=None)
def _x_coefficients(k: int, convention: str) -> Tuple[Tuple[Permutation, Fraction], ...]:
    if k < 2:
        raise ValueError("x_k is defined for k >= 2")
    product, _, inv = convention.partition("-")
    e = identity_perm(k)
    x: GroupAlgebraElement = {e: Fraction(-(2 ** k))}
    for ell in range(k, 1, -1):
        x = ga_mul(x, {cycle_prefix(ell, k): Fraction(1), e: Fraction(-1)}, product)
    if inv:
        # read every group element through its inverse
        x = {inverse(p): c for p, c in x.items()}
    return tuple(sorted(x.items()))


def x_coefficients(k: int, convention: str | None = None) -> GroupAlgebraElement:
    """Coefficients a_k(sigma) of x_k = -2^k (tau_k - 1)...(tau_2 - 1).

    ``sigma`` acts on a tuple by ``sigma(e) = (e_sigma(1), ..., e_sigma(k))``.
    The product order and whether elements are read through their inverses are
    fixed by :func:`composition_convention` unless ``convention`` is given.
    """
    if convention is None:
        convention = composition_convention()
    return dict(_x_coefficients(k, convention))


# vectors and operators ------------------------------------------------------


def reflection_matrix(e: VectorQ) -> Matrix:
    n2 = dot(e, e)
    if n2 == 0:
        raise ZeroVectorError(e)
    d = len(e)
    return Matrix([[Fraction(int(a == b)) - 2 * e[a] * e[b] / n2 for b in range(d)] for a in range(d)])


def q_operator(e_tuple: Sequence[VectorQ]) -> Matrix:
    """Q(v) = (v,e_1)(e_1,e_2)...(e_{k-1},e_k) e_k for unit vectors along the given ones."""
    if not e_tuple:
        raise ValueError("empty tuple")
    dims = {len(e) for e in e_tuple}
    if len(dims) != 1:
        raise DimensionMismatchError(sorted(dims))
    c = Fraction(1)
    for a, b in zip(e_tuple, e_tuple[1:]):
        c *= dot(a, b)
    for e in e_tuple:
        c /= dot(e, e)
    first, last = e_tuple[0], e_tuple[-1]
    return Matrix([[c * last[a] * first[b] for b in range(len(first))] for a in range(len(last))])


def nested_commutator(mats: Sequence[Matrix]) -> Matrix:
    """[m_k, [m_{k-1}, ..., [m_2, m_1]...]] with m_1 innermost."""
    c = mats[0]
    for m in mats[1:]:
        c = m @ c - c @ m
    return c


# weights --------------------------------------------------------------------


@dataclass(frozen=True)
class WeightAssignment:
    """Weights w_{i_1..i_k} on 1-based multi-indices.

    Entries not listed resolve to a fresh indeterminate ``name[i_1,...,i_k]``
    (``default="symbolic"``), to zero (``default="zero"``), or to
    ``default(name, j)`` when ``default`` is callable.
    """

    k: int
    entries: Mapping[Tuple[int, ...], RingElement] = field(default_factory=dict)
    default: Union[str, Callable[[str, Tuple[int, ...]], RingElement]] = "symbolic"
    name: str = "w"

    def __getitem__(self, j) -> RingElement:
        j = tuple(j)
        if len(j) != self.k:
            raise ArityMismatchError(f"multi-index {j} for arity {self.k}")
        if j in self.entries:
            return self.entries[j]
        if callable(self.default):
            return self.default(self.name, j)
        if self.default == "symbolic":
            return Polynomial.var(self.name, j)
        return Fraction(0)


def u_from_w(w: WeightAssignment, j: Sequence[int], convention: str | None = None) -> RingElement:
    """u_j = sum_sigma a_k(sigma^{-1}) w_{j o sigma}; for k = 1, u_i = w_i."""
    j = tuple(j)
    if len(j) != w.k:
        raise ArityMismatchError(f"multi-index {j} for arity {w.k}")
    if w.k == 1:
        return w[j]
    acc: RingElement = Fraction(0)
    for sigma, a in x_coefficients(w.k, convention).items():
        si = inverse(sigma)
        acc = acc + a * w[tuple(j[si[t] - 1] for t in range(w.k))]
    return simplify(acc)


def _accumulate(dim: int, pieces: Iterable[Tuple[RingElement, Matrix]]) -> Matrix:
    acc = [[Fraction(0)] * dim for _ in range(dim)]
    for coeff, m in pieces:
        for a in range(dim):
            row = m.rows[a]
            for b in range(dim):
                x = row[b]
                if x:
                    acc[a][b] = acc[a][b] + coeff * x
    return Matrix(acc)


def build_p_nested(system: VectorSystem, w: WeightAssignment, k: int) -> Matrix:
    """Weighted sum of nested reflection commutators (k = 1: sum w_i (I - s_i))."""
    if w.k != k:
        raise ArityMismatchError(f"weights of arity {w.k} for k={k}")
    d = system.ambient_dim
    refl = [reflection_matrix(e) for e in system.vectors]
    ident = Matrix.identity(d)

    def pieces():
        if k == 1:
            for i in range(1, system.N + 1):
                yield w[(i,)], ident - refl[i - 1]
            return
        for idx in itertools.product(range(1, system.N + 1), repeat=k):
            c = nested_commutator([refl[i - 1] for i in idx])
            if not c.is_zero():
                yield w[idx], c

    return _accumulate(d, pieces())


def build_p_via_q(system: VectorSystem, w: WeightAssignment, k: int, convention: str | None = None) -> Matrix:
    """The same operator as sum_j u_j Q(e_{j_1},...,e_{j_k}); k = 1 uses 2 w_i Q(e_i)."""
    if w.k != k:
        raise ArityMismatchError(f"weights of arity {w.k} for k={k}")
    d = system.ambient_dim

    def pieces():
        if k == 1:
            for i in range(1, system.N + 1):
                yield 2 * w[(i,)], q_operator([system.vector(i)])
            return
        for idx in itertools.product(range(1, system.N + 1), repeat=k):
            q = q_operator([system.vector(i) for i in idx])
            if q.is_zero():
                continue
            u = u_from_w(w, idx, convention)
            if u:
                yield u, q

    return _accumulate(d, pieces())


@lru_cache(maxsize=None)
def composition_convention() -> str:
    """Pick the reading of x_k that reproduces the commutator oracle.

    Checked on a fixed generic rational system in dimension 3 for k = 3, 4.
    """
    system = VectorSystem(((1, 2, 0), (0, 1, -1), (3, 0, 1)))
    for convention in CONVENTIONS:
        if all(
            build_p_nested(system, WeightAssignment(k), k)
            == build_p_via_q(system, WeightAssignment(k), k, convention)
            for k in (3, 4)
        ):
            return convention
    raise RuntimeError("neither product convention reproduces the nested commutators")
