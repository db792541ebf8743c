"""Hopf algebra structure on chord diagrams.

Products and coproducts act on chord-diagram combinations; Feynman
diagrams are STU-resolved first.  Tensor elements of A (x) A are compared
through bigraded normal forms in ``basis(A, k) (x) basis(A, n - k)``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .diagrams import (
    DiagramError,
    FeynmanDiagram,
    canonicalize,
    chord_diagram,
    chord_splits,
    connected_sum,
    empty,
    feynman,
    from_key,
    hanging_tree_candidates,
    theta,
)
from .span_reduce import (
    Basis,
    LinearCombination,
    SpaceSpec,
    as_lc,
    basis,
    normal_form,
    stu_resolve,
)

__all__ = [
    "TensorElement2",
    "product",
    "power",
    "coproduct",
    "is_primitive",
    "primitive_basis",
    "hanging_tree_reduce",
    "deframe_project",
    "counit",
    "bigraded_normal_form",
]

EMPTY_KEY = canonicalize(empty()).key


def _chords(x) -> LinearCombination:
    return stu_resolve(as_lc(x))


def product(x, y) -> LinearCombination:
    """Bilinear connected sum."""
    out: dict = {}
    for k1, v1 in _chords(x).items():
        d1 = from_key(k1)
        for k2, v2 in _chords(y).items():
            c = canonicalize(connected_sum(d1, from_key(k2)))
            out[c.key] = out.get(c.key, 0) + c.sign * v1 * v2
    return LinearCombination(out)


def power(x, k: int) -> LinearCombination:
    out = LinearCombination({EMPTY_KEY: 1})
    for _ in range(k):
        out = product(out, x)
    return out


class TensorElement2:
    """Sparse element of A (x) A: (key, key) -> Fraction."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v}

    @classmethod
    def pure(cls, x, y) -> "TensorElement2":
        out = {}
        for k1, v1 in as_lc(x).items():
            for k2, v2 in as_lc(y).items():
                out[k1, k2] = out.get((k1, k2), 0) + v1 * v2
        return cls(out)

    def __add__(self, other):
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return TensorElement2(t)

    def __neg__(self):
        return TensorElement2({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, TensorElement2):
            s = Fraction(other)
            return TensorElement2({k: v * s for k, v in self.terms.items()})
        out: dict = {}
        for (a1, a2), v in self.terms.items():
            for (b1, b2), w in other.terms.items():
                c1 = canonicalize(connected_sum(from_key(a1), from_key(b1)))
                c2 = canonicalize(connected_sum(from_key(a2), from_key(b2)))
                k = (c1.key, c2.key)
                out[k] = out.get(k, 0) + c1.sign * c2.sign * v * w
        return TensorElement2(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, TensorElement2) and self.terms == other.terms

    def __len__(self):
        return len(self.terms)

    def bidegrees(self) -> set:
        return {(from_key(a).order, from_key(b).order) for a, b in self.terms}


def coproduct(x) -> TensorElement2:
    """Sum over chord subsets E of E (x) (D - E)."""
    out: dict = {}
    for k, v in _chords(x).items():
        for e, rest in chord_splits(from_key(k)):
            key = (canonicalize(e).key, canonicalize(rest).key)
            out[key] = out.get(key, 0) + v
    return TensorElement2(out)


def bigraded_normal_form(t: TensorElement2) -> dict:
    """{(k, l): {(i, j): coeff}} in the A-bases of orders k and l."""
    out: dict = {}
    cache: dict = {}

    def nf(key):
        if key not in cache:
            n = from_key(key).order
            cache[key] = normal_form(LinearCombination({key: 1}), basis(SpaceSpec("A", n)))
        return cache[key]

    for (a, b), v in t.terms.items():
        va, vb = nf(a), nf(b)
        deg = (from_key(a).order, from_key(b).order)
        comp = out.setdefault(deg, {})
        for i, x in enumerate(va):
            if not x:
                continue
            for j, y in enumerate(vb):
                if y:
                    comp[i, j] = comp.get((i, j), 0) + v * x * y
    return {deg: {k: v for k, v in comp.items() if v} for deg, comp in out.items()}


def is_primitive(x) -> bool:
    """True iff Delta(x) - 1 (x) x - x (x) 1 vanishes in every bidegree."""
    lc = _chords(x)
    one = LinearCombination({EMPTY_KEY: 1})
    diff = coproduct(lc) - TensorElement2.pure(one, lc) - TensorElement2.pure(lc, one)
    return not any(bigraded_normal_form(diff).values())


def primitive_basis(n: int, legs: int | None = None, cap: int | None = None) -> Basis:
    """Basis of P_n, or of its leg filtration piece with <= legs legs."""
    if legs is None:
        return basis(SpaceSpec("P", n), cap=cap)
    return basis(SpaceSpec("P_filtered", n, legs), cap=cap)


def counit(x) -> Fraction:
    return as_lc(x).terms.get(EMPTY_KEY, Fraction(0))


def deframe_project(x) -> LinearCombination:
    """phi(D) = sum over chord subsets J of (-Theta)^{|J|} (D - J)."""
    out = LinearCombination()
    th = theta()
    for k, v in _chords(x).items():
        d = from_key(k)
        chords = d.chords()
        n = len(chords)
        for r in range(n + 1):
            for J in combinations(range(n), r):
                rest = [c for c in range(n) if c not in J]
                slots = sorted(s for c in rest for s in chords[c])
                where = {s: i for i, s in enumerate(slots)}
                g = chord_diagram([(where[chords[c][0]], where[chords[c][1]]) for c in rest])
                for _ in range(r):
                    g = connected_sum(th, g)
                out = out + LinearCombination.of(g, v * (-1) ** r)
    return out


# ---------------------------------------------------------------- hanging trees


def _contiguous_start(positions, m):
    """First position of a cyclic run covering ``positions``, or None."""
    s = set(positions)
    starts = [p for p in positions if (p - 1) % m not in s]
    if len(starts) != 1:
        return None if len(s) < m else min(positions)
    return starts[0]


def _planar(d: FeynmanDiagram, tree, start: int) -> bool:
    """Every subtree's legs form a sub-arc of the tree's arc."""
    m = d.n_legs
    rank = {(start + i) % m: i for i in range(tree.d)}
    loc = d.location

    def below(h):
        """Arc ranks of the legs reached through half-edge h (at a vertex)."""
        k, _ = loc[h]
        out = []
        for x in d.vertices[k]:
            if x == h:
                continue
            p = d.partner[x]
            pk, ps = loc[p]
            sub = [rank[ps]] if pk < 0 else below(p)
            if sub is None or max(sub) - min(sub) + 1 != len(sub):
                return None
            out += sub
        return out

    got = below(tree.attach)
    return got is not None and max(got) - min(got) + 1 == len(got)


def _bubble_chain(d: FeynmanDiagram, tree, start_pos: int, flip: bool) -> FeynmanDiagram:
    drop_v = set(tree.vertices)
    drop_h = {h for k in drop_v for h in d.vertices[k]}
    tree_leg_h = {d.legs[p] for p in tree.legs}
    keep_leg = d.legs[start_pos]
    drop_h |= tree_leg_h - {keep_leg}
    legs = [h for h in d.legs if h == keep_leg or h not in tree_leg_h]
    verts = [v for k, v in enumerate(d.vertices) if k not in drop_v]
    edges = [(a, b) for a, b in d.edges() if a not in drop_h and b not in drop_h and a != keep_leg and b != keep_leg]
    nxt = d.n_half_edges
    prev = keep_leg
    for i in range(tree.d - 1):
        i_in, p, q, o, q2, p2 = range(nxt, nxt + 6)
        nxt += 6
        u = (i_in, q, p) if (flip and i == 0) else (i_in, p, q)
        verts += [u, (o, q2, p2)]
        edges += [(prev, i_in), (p, p2), (q, q2)]
        prev = o
    edges.append((prev, tree.root))
    return feynman(legs, verts, edges)


def hanging_tree_reduce(d: FeynmanDiagram):
    """Replace a hanging tree with d contiguous legs by a single leg
    carrying d - 1 bubbles: F = 2^{-(d-1)} F'.

    The bubble orientation is fixed by comparing both orientations in the
    normal form of A_n; a tree whose reduction fails this check raises.
    """
    m = d.n_legs
    for tree in hanging_tree_candidates(d):
        if tree.d < 2:
            continue
        start = _contiguous_start(tree.legs, m)
        if start is None or not _planar(d, tree, start):
            continue
        scalar = Fraction(1, 2 ** (tree.d - 1))
        b = basis(SpaceSpec("A", d.order))
        lhs = normal_form(d, b)
        for flip in (False, True):
            g = _bubble_chain(d, tree, start, flip)
            rhs = normal_form(g, b)
            if lhs == [scalar * x for x in rhs]:
                return scalar, g
        raise DiagramError("hanging tree reduction failed the normal-form check")
    raise DiagramError("no planar hanging tree with contiguous legs")
