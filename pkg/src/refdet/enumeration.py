"""Combinatorial structures of the right-hand sides and their weighted sums.

Vertices of DOOMBs and pair matchings are system indices 1..N. Trees and
3-trees live on vertex labels 0..n. B-basic graphs live on 1..n.

Normalisation: system vectors are raw, so every term divides by the squared
norm of each vector instance. That is only valid if each instance occurs
exactly twice in the raw expression; :func:`occurrence_divisor_shape` checks
this once per term shape.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Sequence, Tuple

from .commutators import WeightAssignment, perm_sign, u_from_w
from .linalg import VectorSystem, determinant, gram_matrix, paired_volume, sign
from .ring import Radical, RingElement, radical_normalize, simplify

Edge = Tuple[int, int]


class NotSingleCycleError(ValueError):
    pass


class NotATreeError(ValueError):
    pass


# DOOMBs ---------------------------------------------------------------------


def _components(vertices, edges):
    """Connected components (as sorted vertex lists) of an undirected multigraph."""
    parent = {v: v for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups = defaultdict(list)
    for v in vertices:
        groups[find(v)].append(v)
    return sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])


def classify_doomb(edges: Sequence[Edge]) -> dict:
    """Check in/out-degree <= 1 and split into oriented chains and cycles."""
    edges = list(edges)
    outd = Counter(s for s, _ in edges)
    ind = Counter(e for _, e in edges)
    if len(set(edges)) != len(edges) or any(c > 1 for c in outd.values()) or any(c > 1 for c in ind.values()):
        return {"valid": False, "components": []}
    verts = sorted({v for e in edges for v in e})
    comps = []
    for comp in _components(verts, edges):
        cs = set(comp)
        size = sum(1 for s, _ in edges if s in cs)
        # a component is a cycle iff every vertex in it has an outgoing edge
        kind = "cycle" if all(outd[v] == 1 for v in comp) else "chain"
        comps.append((kind, size))
    return {"valid": True, "components": comps}


def enumerate_doombs(N: int, n: int) -> Iterator[Tuple[Edge, ...]]:
    """All DOOMBs with n edges on vertices 1..N, edges sorted lexicographically."""
    pairs = [(s, e) for s in range(1, N + 1) for e in range(1, N + 1)]
    out_used = [False] * (N + 1)
    in_used = [False] * (N + 1)
    chosen: List[Edge] = []

    def rec(start):
        if len(chosen) == n:
            yield tuple(chosen)
            return
        for idx in range(start, len(pairs) - (n - len(chosen)) + 1):
            s, e = pairs[idx]
            if out_used[s] or in_used[e]:
                continue
            out_used[s] = in_used[e] = True
            chosen.append((s, e))
            yield from rec(idx + 1)
            chosen.pop()
            out_used[s] = in_used[e] = False

    if n < 0:
        return
    yield from rec(0)


def enumerate_pair_matchings(N: int, n_edges: int) -> Iterator[Tuple[Edge, ...]]:
    """Directed partial pair matchings on 1..N with n_edges edges (no loops)."""
    for verts in itertools.combinations(range(1, N + 1), 2 * n_edges):
        for pairing in _perfect_pairings(verts):
            for flips in itertools.product((False, True), repeat=n_edges):
                yield tuple(sorted((b, a) if f else (a, b) for (a, b), f in zip(pairing, flips)))


def _perfect_pairings(verts):
    if not verts:
        yield ()
        return
    a, rest = verts[0], verts[1:]
    for i, b in enumerate(rest):
        for tail in _perfect_pairings(rest[:i] + rest[i + 1:]):
            yield ((a, b),) + tail


# path weights ---------------------------------------------------------------


@lru_cache(maxsize=None)
def occurrence_divisor_shape(k: int, n: int) -> bool:
    """Assert that every vector instance of a term occurs exactly twice.

    Instances are (path t, position s). A path contributes the inner-product
    chain along consecutive positions; its first and last positions also enter
    a volume factor (two volumes in the determinant form, one volume over all
    endpoints in the Pfaffian form; the count per instance is the same).
    """
    count: Counter = Counter()
    for t in range(n):
        for s in range(k - 1):
            count[(t, s)] += 1
            count[(t, s + 1)] += 1
        count[(t, 0)] += 1
        count[(t, k - 1)] += 1
    bad = {inst: c for inst, c in count.items() if c != 2}
    if bad:
        raise AssertionError(f"unbalanced vector occurrences for k={k}, n={n}: {bad}")
    return True


class KWeights:
    """Cached u-weights and k-weights of a system.

    ``kw(p, q)`` is the sum over paths (p, j_2, ..., j_{k-1}, q) of
    u_path * chain of inner products, already divided by the squared norms of
    the interior path vertices. The endpoints' norms are divided out when the
    term is assembled together with its volumes.
    """

    def __init__(self, system: VectorSystem, w: WeightAssignment, k: int):
        self.system, self.w, self.k = system, w, k
        self._u: Dict[Tuple[int, ...], RingElement] = {}
        self._kw: Dict[Edge, RingElement] = {}
        self._ip = {
            (p, q): system.inner(p, q) for p in range(1, system.N + 1) for q in range(1, system.N + 1)
        }

    def u(self, j) -> RingElement:
        j = tuple(j)
        if j not in self._u:
            self._u[j] = u_from_w(self.w, j)
        return self._u[j]

    def chain(self, j) -> Fraction:
        c = Fraction(1)
        for a, b in zip(j, j[1:]):
            c *= self._ip[(a, b)]
            if not c:
                return c
        return c

    def kw(self, p: int, q: int) -> RingElement:
        key = (p, q)
        if key in self._kw:
            return self._kw[key]
        k, N = self.k, self.system.N
        acc: RingElement = Fraction(0)
        if k == 1:
            acc = self.u((p,)) if p == q else Fraction(0)
        for mid in itertools.product(range(1, N + 1), repeat=k - 2) if k > 1 else ():
            j = (p,) + mid + (q,)
            c = self.chain(j)
            if not c:
                continue
            for m in mid:
                c /= self.system.norm_sq(m)
            u = self.u(j)
            if u:
                acc = acc + u * c
        self._kw[key] = simplify(acc)
        return self._kw[key]


def k_weight(system: VectorSystem, w: WeightAssignment, k: int, p: int, q: int, unit: bool = True) -> RingElement:
    """k-weight of the edge p -> q. With ``unit`` the endpoint norms are divided out too."""
    val = KWeights(system, w, k).kw(p, q)
    if unit:
        val = simplify(val * (1 / (system.norm_sq(p) * system.norm_sq(q))))
    return val


def _paired_cache(system: VectorSystem):
    cache: Dict[tuple, Fraction] = {}

    def pv(starts, ends):
        key = (starts, ends)
        if key not in cache:
            cache[key] = paired_volume([system.vector(p) for p in starts], [system.vector(q) for q in ends])
        return cache[key]

    return pv


# determinant identity ---------------------------------------------------------


def rhs_gendet(system: VectorSystem, w: WeightAssignment, k: int, form: str = "doomb", stats: dict | None = None) -> RingElement:
    """Combinatorial side of the determinant identity, over multi-indices or DOOMBs."""
    n, N = system.n, system.N
    if k < 2:
        raise ValueError("the determinant sum needs k >= 2; use rhs_k1 for k = 1")
    occurrence_divisor_shape(k, n)
    if n > N:
        return Fraction(0)
    pv = _paired_cache(system)
    total: RingElement = Fraction(0)
    terms = 0
    if form == "multiindex":
        kws = KWeights(system, w, k)
        interiors = list(itertools.product(range(1, N + 1), repeat=k - 2))
        for ends in itertools.combinations(range(1, N + 1), n):
            for starts in itertools.product(range(1, N + 1), repeat=n):
                vol2 = pv(starts, ends)
                if not vol2:
                    continue
                for interior in itertools.product(interiors, repeat=n):
                    paths = [(starts[t],) + interior[t] + (ends[t],) for t in range(n)]
                    coef = vol2
                    for j in paths:
                        coef *= kws.chain(j)
                        if not coef:
                            break
                    if not coef:
                        continue
                    for j in paths:
                        for v in j:
                            coef /= system.norm_sq(v)
                    term: RingElement = coef
                    for j in paths:
                        term = term * kws.u(j)
                        if not term:
                            break
                    if term:
                        total = total + term
                        terms += 1
    elif form == "doomb":
        kws = KWeights(system, w, k)
        for g in enumerate_doombs(N, n):
            starts = tuple(p for p, _ in g)
            ends = tuple(q for _, q in g)
            vol2 = pv(starts, ends)
            if not vol2:
                continue
            term: RingElement = vol2
            for p, q in g:
                term = term * kws.kw(p, q) * (1 / (system.norm_sq(p) * system.norm_sq(q)))
                if not term:
                    break
            if term:
                total = total + term
                terms += 1
    else:
        raise ValueError(f"unknown form {form!r}")
    if stats is not None:
        stats["term_count"] = terms
    return simplify(total)


def doomb_term(system: VectorSystem, kws: KWeights, edges: Sequence[Edge]) -> RingElement:
    """Contribution of one numbered DOOMB: k-weights times vol(starts) vol(ends)."""
    starts = [system.vector(p) for p, _ in edges]
    ends = [system.vector(q) for _, q in edges]
    term: RingElement = paired_volume(starts, ends)
    for p, q in edges:
        term = term * kws.kw(p, q) * (1 / (system.norm_sq(p) * system.norm_sq(q)))
    return simplify(term)


def rhs_k1(system: VectorSystem, w: WeightAssignment, stats: dict | None = None) -> RingElement:
    """2^n sum over n-subsets of w-products times the squared unit volume."""
    n, N = system.n, system.N
    total: RingElement = Fraction(0)
    terms = 0
    for idx in itertools.combinations(range(1, N + 1), n):
        vs = [system.vector(i) for i in idx]
        g = determinant(gram_matrix(vs))
        if not g:
            continue
        for i in idx:
            g /= system.norm_sq(i)
        term: RingElement = g * 2 ** n
        for i in idx:
            term = term * w[(i,)]
        total = total + term
        terms += 1
    if stats is not None:
        stats["term_count"] = terms
    return simplify(total)


# Pfaffian identity ----------------------------------------------------------


def matching_vertex_order(edges: Sequence[Edge]) -> Tuple[int, ...]:
    """Volume argument order for a matching: p_1, q_1, p_2, q_2, ... ."""
    return tuple(v for e in edges for v in e)


def rhs_keven_pf(system: VectorSystem, w: WeightAssignment, k: int, mode: str = "exact_radical", stats: dict | None = None):
    """Sum over directed partial pair matchings with n/2 edges of k-weights times one volume.

    The volume is taken over p_1, q_1, p_2, q_2, ... in the orientation of the
    system's reference basis.
    """
    n, N = system.n, system.N
    if k % 2 or n % 2:
        raise ValueError("needs k and n even")
    occurrence_divisor_shape(k, n // 2)
    kws = KWeights(system, w, k)
    ref = system.basis_vectors()
    exact = mode == "exact_radical"
    total = Radical(0) if exact else 0.0
    terms = 0
    for g in enumerate_pair_matchings(N, n // 2):
        verts = matching_vertex_order(g)
        vs = [system.vector(v) for v in verts]
        orient = sign(paired_volume(vs, ref))
        if not orient:
            continue
        coef: RingElement = Fraction(orient)
        for p, q in g:
            coef = coef * kws.kw(p, q)
            if not coef:
                break
        if not coef:
            continue
        for v in verts:
            coef = coef * (1 / system.norm_sq(v))
        term = radical_normalize(simplify(coef), determinant(gram_matrix(vs)))
        terms += 1
        if exact:
            total = total + term
        else:
            total += float(term)
    if stats is not None:
        stats["term_count"] = terms
    return total


# trees ----------------------------------------------------------------------


def prufer_decode(seq: Sequence[int], v: int) -> Tuple[Edge, ...]:
    degree = [1] * v
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(i for i in range(v) if degree[i] == 1)
        edges.append((min(leaf, x), max(leaf, x)))
        degree[leaf] -= 1
        degree[x] -= 1
    a, b = [i for i in range(v) if degree[i] == 1]
    edges.append((a, b))
    return tuple(sorted(edges))


def enumerate_trees(v: int) -> Iterator[Tuple[Edge, ...]]:
    """All labelled trees on vertices 0..v-1 via Pruefer sequences."""
    if v < 1:
        raise ValueError("need at least one vertex")
    if v == 1:
        yield ()
        return
    for seq in itertools.product(range(v), repeat=v - 2):
        yield prufer_decode(seq, v)


def is_tree(v: int, edges: Sequence[Edge]) -> bool:
    if len(edges) != v - 1:
        return False
    return len(_components(range(v), edges)) == 1


def rhs_matrix_tree(v: int, w) -> RingElement:
    """Sum over labelled trees on 0..v-1 of the product of edge weights ``w[(i, j)]``, i < j."""
    total: RingElement = Fraction(0)
    for t in enumerate_trees(v):
        term: RingElement = Fraction(1)
        for e in t:
            term = term * w[e]
        total = total + term
    return simplify(total)


def tree_volume_sign(edges: Sequence[Edge], root: int = 0) -> int:
    """Sign of vol(e_{i_1 j_1}, ..., e_{i_n j_n}) for a directed tree on 0..n.

    Product of the sign of the outer-endpoint permutation and (-1)^(number of
    edges pointing towards the root).
    """
    n = len(edges)
    if not is_tree(n + 1, [tuple(sorted(e)) for e in edges]) or any(a == b for a, b in edges):
        raise NotATreeError(edges)
    adj = defaultdict(list)
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    parent = {root: None}
    stack = [root]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in parent:
                parent[y] = x
                stack.append(y)
    outer, towards = [], 0
    for a, b in edges:
        if parent.get(a) == b:
            outer.append(a)
            towards += 1
        else:
            outer.append(b)
    return perm_sign(outer) * (-1) ** towards


# 3-trees --------------------------------------------------------------------


def enumerate_3trees(m: int, v: int) -> Iterator[Tuple[Tuple[int, int, int], ...]]:
    """Sets of m increasing triples on 0..v-1 covering all v = 2m+1 vertices, connected."""
    if v != 2 * m + 1:
        raise ValueError(f"a 3-tree with {m} triangles has {2 * m + 1} vertices, not {v}")
    triples = list(itertools.combinations(range(v), 3))
    for combo in itertools.combinations(triples, m):
        covered = {x for t in combo for x in t}
        if len(covered) != v:
            continue
        links = [(t[0], t[1]) for t in combo] + [(t[1], t[2]) for t in combo]
        if len(_components(range(v), links)) == 1:
            yield combo


def permutation_product(cycles: Sequence[Sequence[int]], order: str = "right") -> Dict[int, int]:
    """Product of cycles as a map; ``right`` applies the last cycle first."""
    verts = sorted({x for c in cycles for x in c})
    perm = {x: x for x in verts}
    seq = list(cycles)[::-1] if order == "right" else list(cycles)
    for c in seq:
        step = {c[i]: c[(i + 1) % len(c)] for i in range(len(c))}
        perm = {x: step.get(perm[x], perm[x]) for x in verts}
    return perm


def delta_sign(triangles: Sequence[Sequence[int]], order: str = "right") -> int:
    """Parity of the vertex order inside the single cycle (i_1 j_1 k_1)...(i_m j_m k_m)."""
    perm = permutation_product(triangles, order)
    verts = sorted(perm)
    a = [verts[0]]
    while perm[a[-1]] != a[0]:
        a.append(perm[a[-1]])
        if len(a) > len(verts):
            break
    if len(a) != len(verts):
        raise NotSingleCycleError(triangles)
    return perm_sign(a)


def three_tree_edges(triangles: Sequence[Sequence[int]]) -> List[Edge]:
    """The tree edges (i, j), (j, k) of each triangle, in numbering order."""
    out = []
    for i, j, k in triangles:
        out += [(i, j), (j, k)]
    return out


def euler_characteristic(triangles: Sequence[Sequence[int]]) -> int:
    verts = {x for t in triangles for x in t}
    sides = {tuple(sorted(p)) for t in triangles for p in itertools.combinations(t, 2)}
    return len(verts) - len(sides) + len(triangles)


# B-basic graphs -------------------------------------------------------------

BEdge = Tuple  # ("+", i, j) | ("-", i, j) | ("loop", i)


@dataclass(frozen=True)
class BBasicGraph:
    n: int
    minus_edges: Tuple[Edge, ...]
    plus_edges: Tuple[Edge, ...]
    loops: Tuple[int, ...]

    @property
    def edges(self) -> Tuple[BEdge, ...]:
        return (
            tuple(("-",) + e for e in self.minus_edges)
            + tuple(("+",) + e for e in self.plus_edges)
            + tuple(("loop", i) for i in self.loops)
        )

    def components(self):
        return _components(range(1, self.n + 1), [(e[1], e[-1]) for e in self.edges])

    @property
    def d(self) -> int:
        return len(self.components())

    @property
    def ell(self) -> int:
        return len(self.loops)


def b_edges(n: int) -> List[BEdge]:
    """Edge types of B_n roots in a fixed order: for each i<j, '+' then '-'; then loops."""
    out: List[BEdge] = []
    for i, j in itertools.combinations(range(1, n + 1), 2):
        out.append(("+", i, j))
        out.append(("-", i, j))
    out += [("loop", i) for i in range(1, n + 1)]
    return out


def is_bbasic(n: int, edges: Sequence[BEdge]) -> bool:
    """Each component has exactly one cycle, and it is a loop or has an odd number of '+'-edges."""
    if len(edges) != n:
        return False
    ends = [(e[1], e[-1]) for e in edges]
    for comp in _components(range(1, n + 1), ends):
        cs = set(comp)
        live = [i for i, (a, _) in enumerate(ends) if a in cs]
        if len(live) != len(comp):
            return False
        # strip leaves until only the cycle remains
        live = set(live)
        while True:
            deg = Counter()
            for i in live:
                a, b = ends[i]
                deg[a] += 1
                deg[b] += 1
            leaves = {i for i in live if deg[ends[i][0]] == 1 or deg[ends[i][1]] == 1}
            if not leaves:
                break
            live -= leaves
        cycle = [edges[i] for i in live]
        if len(cycle) == 1 and cycle[0][0] == "loop":
            continue
        if any(e[0] == "loop" for e in cycle):
            return False
        if sum(1 for e in cycle if e[0] == "+") % 2 == 0:
            return False
    return True


def make_bgraph(n: int, edges: Sequence[BEdge]) -> BBasicGraph:
    return BBasicGraph(
        n,
        tuple(sorted((e[1], e[2]) for e in edges if e[0] == "-")),
        tuple(sorted((e[1], e[2]) for e in edges if e[0] == "+")),
        tuple(sorted(e[1] for e in edges if e[0] == "loop")),
    )


def enumerate_bbasic(n: int, loops: bool = True) -> Iterator[BBasicGraph]:
    """B-basic graphs on 1..n; '-'-edges are oriented from the smaller vertex."""
    if n < 1:
        raise ValueError("need at least one vertex")
    universe = [e for e in b_edges(n) if loops or e[0] != "loop"]
    for combo in itertools.combinations(universe, n):
        if is_bbasic(n, combo):
            yield make_bgraph(n, combo)


def rhs_bn_tree(n: int, w_plus, w_minus, w_loop, loops: bool = True, exponent=lambda d, ell: 2 * d - ell) -> RingElement:
    """Sum over B-basic graphs of 2^exponent(d, l) times the product of edge weights."""
    total: RingElement = Fraction(0)
    for g in enumerate_bbasic(n, loops):
        term: RingElement = Fraction(2) ** exponent(g.d, g.ell)
        for e in g.plus_edges:
            term = term * w_plus[e]
        for e in g.minus_edges:
            term = term * w_minus[e]
        for i in g.loops:
            term = term * w_loop[i]
        total = total + term
    return simplify(total)


# MV 3-tree sum ---------------------------------------------------------------


def rhs_mv(m: int, u_triangle, order: str = "right") -> RingElement:
    """Sum over spanning 3-trees on 0..2m of delta * prod of triangle weights ``u_triangle(i, j, k)``."""
    total: RingElement = Fraction(0)
    for t in enumerate_3trees(m, 2 * m + 1):
        term: RingElement = Fraction(delta_sign(t, order))
        for tri in t:
            term = term * u_triangle(*tri)
            if not term:
                break
        total = total + term
    return simplify(total)

