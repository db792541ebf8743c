"""Linear combinations of diagrams, defining relations, and reduced bases.

Spaces handled here (``order`` = n throughout):

``A``        chord diagrams modulo 4T
``Abar``     chord diagrams modulo 4T and 1T
``A_filtered``  subspace of A spanned by Feynman diagrams with <= legs_cap legs
``P``        primitives, spanned by connected diagrams without hanging trees
``P_filtered``  the same restricted to <= legs_cap legs
``P_connected`` span of *all* connected diagrams with <= legs_cap legs
                 (hanging trees allowed); used to test the leg filtration
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

from .diagrams import (
    FeynmanDiagram,
    ResourceLimitError,
    analyze,
    canonicalize,
    chord_diagram,
    enumerate_chord_diagrams,
    feynman,
    from_key,
)
from .echelon import Echelon

__all__ = [
    "LinearCombination",
    "ResourceLimitError",
    "OrderMismatch",
    "NotInSpan",
    "SpaceSpec",
    "Basis",
    "MAX_ORDER",
    "FOUR_T_SIGNS",
    "in_span",
    "relations",
    "stu_step",
    "stu_resolve",
    "feynman_diagrams",
    "connected_diagrams",
    "basis",
    "normal_form",
    "save_basis",
    "load_basis",
    "cache_dir",
]

#: Highest order any basis computation accepts unless overridden.
MAX_ORDER = 6


class OrderMismatch(ValueError):
    pass


class NotInSpan(ValueError):
    pass


def _check_cap(n: int, cap: int | None = None):
    cap = MAX_ORDER if cap is None else cap
    if n > cap:
        raise ResourceLimitError(f"order {n} exceeds the configured cap {cap}")


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class LinearCombination:
    """Finite formal sum of canonical diagram keys with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        t = {}
        for k, v in (terms or {}).items():
            v = _frac(v)
            if v:
                t[k] = v
        self.terms = t

    @classmethod
    def of(cls, d: FeynmanDiagram, coeff=1) -> "LinearCombination":
        c = canonicalize(d)
        if c.sign == 0 or not coeff:
            return cls()
        return cls({c.key: c.sign * _frac(coeff)})

    @classmethod
    def sum_of(cls, pairs) -> "LinearCombination":
        """Sum of ``coeff * diagram`` for ``(coeff, diagram)`` pairs."""
        acc: dict = {}
        for coeff, d in pairs:
            c = canonicalize(d)
            if c.sign == 0 or not coeff:
                continue
            acc[c.key] = acc.get(c.key, 0) + c.sign * _frac(coeff)
        return cls(acc)

    def __iter__(self):
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def items(self):
        return self.terms.items()

    def diagrams(self):
        for k, v in sorted(self.terms.items()):
            yield v, from_key(k)

    @property
    def orders(self) -> set:
        return {from_key(k).order for k in self.terms}

    @property
    def order(self) -> int | None:
        o = self.orders
        if len(o) > 1:
            raise OrderMismatch("inhomogeneous combination")
        return o.pop() if o else None

    def __add__(self, other):
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return LinearCombination(t)

    def __neg__(self):
        return LinearCombination({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        s = _frac(scalar)
        return LinearCombination({k: s * v for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, LinearCombination) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        inner = " + ".join(f"{v}*[{k}]" for k, v in sorted(self.terms.items()))
        return f"LinearCombination({inner or '0'})"

    def to_json(self) -> str:
        return json.dumps(
            {
                "order": self.order,
                "terms": [
                    {"key": k, "coeff": f"{v.numerator}/{v.denominator}"}
                    for k, v in sorted(self.terms.items())
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "LinearCombination":
        data = json.loads(text)
        return cls({t["key"]: Fraction(t["coeff"]) for t in data["terms"]})


def as_lc(x) -> LinearCombination:
    if isinstance(x, LinearCombination):
        return x
    if isinstance(x, FeynmanDiagram):
        return LinearCombination.of(x)
    raise TypeError(f"expected a diagram or LinearCombination, got {type(x).__name__}")


# ---------------------------------------------------------------- relations


def _word_to_diagram(word) -> FeynmanDiagram:
    first = {}
    pairs = []
    for i, c in enumerate(word):
        if c in first:
            pairs.append((first[c], i))
        else:
            first[c] = i
    return chord_diagram(pairs)


def _normalized(lc: LinearCombination):
    if not lc:
        return None
    k0 = min(lc.terms)
    s = 1 / lc.terms[k0]
    return lc * s


def has_isolated_chord(d: FeynmanDiagram) -> bool:
    m = d.n_legs
    return any((j - i) in (1, m - 1) for i, j in d.chords())


FOUR_T_SIGNS = (1, -1, 1, -1)


@lru_cache(maxsize=None)
def _relations(kind: str, n: int, signs: tuple = FOUR_T_SIGNS) -> tuple:
    if n < 1:
        return ()
    keys = enumerate_chord_diagrams(n)
    seen = {}
    if kind == "1T":
        for k in keys:
            d = from_key(k)
            if has_isolated_chord(d):
                seen[k] = LinearCombination({k: 1})
        return tuple(seen[k] for k in sorted(seen))
    if kind != "4T":
        raise ValueError(f"unknown relation kind {kind!r}")
    for k in keys:
        d = from_key(k)
        word = [None] * (2 * n)
        for c, (i, j) in enumerate(d.chords()):
            word[i] = word[j] = c
        for x in range(2 * n):
            b = word[x]
            w = word[:x] + word[x + 1 :]
            for a in set(w) - {b}:
                idx = [i for i, c in enumerate(w) if c == a]
                terms = []
                for t, i in enumerate(idx):
                    terms.append((signs[2 * t], _word_to_diagram(w[:i] + [b] + w[i:])))
                    terms.append((signs[2 * t + 1], _word_to_diagram(w[: i + 1] + [b] + w[i + 1 :])))
                rel = _normalized(LinearCombination.sum_of(terms))
                if rel is not None:
                    seen[tuple(sorted(rel.terms.items()))] = rel
    return tuple(seen[k] for k in sorted(seen))


def relations(kind: str, n: int, signs=FOUR_T_SIGNS) -> list[LinearCombination]:
    """Distinct 4T or 1T relations among chord diagrams of order n.

    A 4T relation slides one chord endpoint x around both endpoints of
    another chord a: sum over the endpoints e of a of
    [x just before e] - [x just after e].  ``signs`` gives the four term
    signs in that order; anything but the default is a deliberately broken
    relation, used to test that the verification suite notices.
    """
    return list(_relations(kind, n, tuple(signs)))


# ---------------------------------------------------------------- STU


def stu_step(d: FeynmanDiagram, leg_pos: int):
    """Resolve the trivalent vertex at leg position ``leg_pos``.

    Returns ``(D_par, D_cross)`` with ``d = D_par - D_cross``.  If the
    vertex reads (leg, x, y) cyclically, ``D_par`` carries x then y at the
    leg's place on the Wilson line and ``D_cross`` carries y then x.
    """
    h = d.legs[leg_pos]
    p = d.partner[h]
    k, s = d.location[p]
    if k < 0:
        raise ValueError("leg is not attached to a trivalent vertex")
    cyc = d.vertices[k]
    x, y = cyc[(s + 1) % 3], cyc[(s + 2) % 3]
    verts = d.vertices[:k] + d.vertices[k + 1 :]
    edges = [(a, b) for a, b in d.edges() if a not in (h, p) and b not in (h, p)]
    before, after = list(d.legs[:leg_pos]), list(d.legs[leg_pos + 1 :])
    par = feynman(before + [x, y] + after, verts, edges)
    cross = feynman(before + [y, x] + after, verts, edges)
    return par, cross


def _pick_leg(d: FeynmanDiagram, policy: str) -> int:
    cands = [i for i, h in enumerate(d.legs) if d.location[d.partner[h]][0] >= 0]
    if policy == "least":
        return cands[0]
    if policy == "greatest":
        return cands[-1]
    raise ValueError(f"unknown STU policy {policy!r}")


@lru_cache(maxsize=None)
def _resolve_key(key: str, policy: str) -> LinearCombination:
    d = from_key(key)
    if d.is_chord_diagram():
        return LinearCombination({key: 1})
    par, cross = stu_step(d, _pick_leg(d, policy))
    out = LinearCombination()
    for coeff, part in ((1, par), (-1, cross)):
        c = canonicalize(part)
        if c.sign:
            out = out + _resolve_key(c.key, policy) * (coeff * c.sign)
    return out


def stu_resolve(x, policy: str = "least") -> LinearCombination:
    """Rewrite diagrams into chord diagrams with D_Y = D_par - D_cross.

    ``policy`` picks the vertex at the least (default) or greatest leg
    attached to a trivalent vertex.
    """
    out = LinearCombination()
    for k, v in as_lc(x).items():
        out = out + _resolve_key(k, policy) * v
    return out


# ---------------------------------------------------------------- enumeration


def _merge_adjacent(d: FeynmanDiagram, i: int) -> FeynmanDiagram:
    """Inverse of the parallel STU term: legs i, i+1 meet at a new vertex."""
    m = d.n_legs
    legs = list(d.legs[i:]) + list(d.legs[:i])  # rotate so the pair is first
    x, y = legs[0], legs[1]
    H = d.n_half_edges
    leg, inner = H, H + 1
    verts = list(d.vertices) + [(inner, x, y)]
    return feynman([leg] + legs[2:], verts, d.edges() + [(leg, inner)])


@lru_cache(maxsize=None)
def feynman_diagrams(n: int, cap: int | None = None) -> tuple[tuple[str, ...], ...]:
    """Keys of all Feynman diagrams of order n, grouped by trivalent count.

    Every diagram with t >= 1 trivalent vertices is obtained from one with
    t - 1 by joining two neighbouring legs at a new vertex, so the levels
    are grown from the chord diagrams upward.
    """
    _check_cap(n, cap)
    levels = [tuple(enumerate_chord_diagrams(n))]
    while True:
        nxt = set()
        for key in levels[-1]:
            d = from_key(key)
            if d.n_legs < 2:
                continue
            for i in range(d.n_legs):
                nxt.add(canonicalize(_merge_adjacent(d, i)).key)
        if not nxt:
            break
        levels.append(tuple(sorted(nxt)))
    return tuple(levels)


@lru_cache(maxsize=None)
def connected_diagrams(n: int, max_legs: int | None = None, hanging: bool = False):
    """Connected diagrams of order n with <= max_legs legs, sorted by
    (legs, key).  Diagrams with hanging trees are dropped unless
    ``hanging`` is set; diagrams equal to their own negative are dropped.
    """
    max_legs = 2 * n if max_legs is None else max_legs
    out = []
    for level in feynman_diagrams(n):
        for key in level:
            d = from_key(key)
            if d.n_legs > max_legs or canonicalize(d).sign == 0:
                continue
            a = analyze(d)
            if a.components != 1:
                continue
            if not hanging and a.hanging_tree is not None:
                continue
            out.append(key)
    out.sort(key=lambda k: (from_key(k).n_legs, k))
    return tuple(out)


# ---------------------------------------------------------------- bases

SPACES = ("A", "Abar", "A_filtered", "P", "P_filtered", "P_connected")


@dataclass(frozen=True)
class SpaceSpec:
    space: str
    order: int
    legs: int | None = None

    def __post_init__(self):
        if self.space not in SPACES:
            raise ValueError(f"unknown space {self.space!r}")
        if self.order < 0:
            raise ValueError("order must be nonnegative")
        if self.legs is not None and self.legs < 0:
            raise ValueError("legs cap must be nonnegative")
        if self.space.endswith(("filtered", "connected")) and self.legs is None:
            raise ValueError(f"{self.space} needs a legs cap")


@dataclass
class Basis:
    spec: SpaceSpec
    representatives: tuple
    relation_rank: int
    reducer: Echelon = field(repr=False)
    ambient: "Basis | None" = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return len(self.representatives)

    @property
    def order(self) -> int:
        return self.spec.order

    def to_json(self) -> str:
        return json.dumps(
            {
                "space": self.spec.space,
                "order": self.spec.order,
                "legs_cap": self.spec.legs,
                "representatives": list(self.representatives),
                "relation_rank": self.relation_rank,
            },
            indent=1,
        )


def _chord_rank(n: int) -> dict:
    return {k: i for i, k in enumerate(enumerate_chord_diagrams(n))}


@lru_cache(maxsize=None)
def _chord_basis(space: str, n: int, pivot: str, reverse: bool, signs: tuple = FOUR_T_SIGNS) -> Basis:
    keys = enumerate_chord_diagrams(n)
    rank = _chord_rank(n)
    if reverse:
        rank = {k: len(keys) - 1 - i for k, i in rank.items()}
    ech = Echelon(rank, pivot=pivot)
    rels = list(relations("4T", n, signs))
    if space == "Abar":
        rels += relations("1T", n)
    if reverse:
        rels.reverse()
    for r in rels:
        ech.add(r.terms)
    reps = tuple(k for k in keys if k not in ech.rows)
    return Basis(SpaceSpec(space, n), reps, len(ech), ech)


def basis(
    spec: SpaceSpec, pivot: str = "last", reverse: bool = False, cap: int | None = None, signs=FOUR_T_SIGNS
) -> Basis:
    """Build the reduced basis of a space.

    ``pivot`` and ``reverse`` select the elimination strategy and the
    enumeration order; they change representatives but never dimensions.
    """
    _check_cap(spec.order, cap)
    n = spec.order
    if spec.space in ("A", "Abar"):
        return _chord_basis(spec.space, n, pivot, reverse, tuple(signs))
    return _span_basis(spec, pivot, reverse, tuple(signs))


@lru_cache(maxsize=None)
def _span_basis(spec: SpaceSpec, pivot: str, reverse: bool, signs: tuple = FOUR_T_SIGNS) -> Basis:
    n = spec.order
    amb = _chord_basis("A", n, pivot, reverse, signs)
    if spec.space == "A_filtered":
        cands = [k for level in feynman_diagrams(n) for k in level if from_key(k).n_legs <= spec.legs]
        cands.sort(key=lambda k: (from_key(k).n_legs, k))
    elif spec.space == "P_connected":
        cands = list(connected_diagrams(n, spec.legs, hanging=True))
    else:
        legs = spec.legs if spec.space == "P_filtered" else None
        cands = list(connected_diagrams(n, legs, hanging=False))
    if reverse:
        cands.reverse()
    ech = Echelon(_ambient_rank(amb), pivot="last", track=True)
    reps = []
    for k in cands:
        vec = amb.reducer.reduce(stu_resolve(from_key(k)).terms)
        if ech.add(vec, tag=len(reps)):
            reps.append(k)
    return Basis(spec, tuple(reps), len(reps), ech, ambient=amb)


def _ambient_rank(amb: Basis) -> dict:
    return {k: i for i, k in enumerate(amb.representatives)}


def normal_form(x, b: Basis) -> list[Fraction]:
    """Coordinates of x with respect to ``b.representatives``.

    For A and Abar this is the quotient map; for the spanned subspaces it
    raises :class:`NotInSpan` when x lies outside the subspace.
    """
    lc = stu_resolve(as_lc(x))
    for k in lc.terms:
        if from_key(k).order != b.order:
            raise OrderMismatch(f"diagram of order {from_key(k).order} in a basis of order {b.order}")
    if b.ambient is None:
        red = b.reducer.reduce(lc.terms)
        return [red.get(k, Fraction(0)) for k in b.representatives]
    vec = b.ambient.reducer.reduce(lc.terms)
    combo = b.reducer.solve(vec)
    if combo is None:
        raise NotInSpan("element lies outside the subspace")
    return [combo.get(i, Fraction(0)) for i in range(len(b.representatives))]


def in_span(x, b: Basis) -> bool:
    try:
        normal_form(x, b)
    except NotInSpan:
        return False
    return True


# ---------------------------------------------------------------- cache files


def cache_dir(path=None) -> Path | None:
    p = path or os.environ.get("WSFORGE_CACHE")
    return Path(p) if p else None


def _cache_name(spec: SpaceSpec) -> str:
    legs = "all" if spec.legs is None else spec.legs
    return f"{spec.space}_n{spec.order}_l{legs}.json"


def save_basis(b: Basis, directory) -> Path:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    out = d / _cache_name(b.spec)
    out.write_text(b.to_json(), encoding="utf-8")
    return out


def load_basis(spec: SpaceSpec, directory) -> dict | None:
    """Read a cached basis record; the reduction table is rebuilt on use."""
    f = Path(directory) / _cache_name(spec)
    if not f.exists():
        return None
    return json.loads(f.read_text(encoding="utf-8"))
