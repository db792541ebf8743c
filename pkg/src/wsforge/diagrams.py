"""Chord diagrams and Feynman (Jacobi) diagrams.

A diagram is stored as a set of half-edges ``0..H-1``.  Every half-edge sits
either on the Wilson line (a *leg*) or in one slot of a trivalent vertex, and
the fixed-point-free involution ``partner`` glues half-edges into edges.
Legs are listed in counterclockwise order along the oriented Wilson line;
each vertex is a triple read as its cyclic order.  Chord diagrams are the
diagrams with no trivalent vertices.

Equality of diagrams is equality of :func:`canonicalize` keys.  The key
forgets vertex orientations; the accompanying sign records how the
orientations of the input compare with those of the canonical
representative (antisymmetry), and is 0 for diagrams that equal their own
negative.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from functools import lru_cache

__all__ = [
    "DiagramError",
    "ResourceLimitError",
    "FeynmanDiagram",
    "CanonicalKey",
    "HangingTree",
    "DiagramAnalysis",
    "chord_diagram",
    "feynman",
    "wheel",
    "theta",
    "empty",
    "construct",
    "parse",
    "parse_file",
    "from_key",
    "canonicalize",
    "analyze",
    "enumerate_chord_diagrams",
    "connected_sum",
    "chord_splits",
    "ENUMERATION_CAP",
]

#: Soft cap on the number of raw pairings scanned by enumerations.
ENUMERATION_CAP = 3_000_000


class ResourceLimitError(RuntimeError):
    """A configured size cap would be exceeded."""


class DiagramError(ValueError):
    """Raised for malformed diagram descriptions."""


@dataclass(frozen=True)
class FeynmanDiagram:
    legs: tuple[int, ...]
    vertices: tuple[tuple[int, int, int], ...]
    partner: tuple[int, ...]

    @property
    def n_legs(self) -> int:
        return len(self.legs)

    @property
    def n_trivalent(self) -> int:
        return len(self.vertices)

    @property
    def order(self) -> int:
        return (len(self.legs) + len(self.vertices)) // 2

    @property
    def n_half_edges(self) -> int:
        return len(self.partner)

    def is_chord_diagram(self) -> bool:
        return not self.vertices

    def edges(self) -> list[tuple[int, int]]:
        return [(h, p) for h, p in enumerate(self.partner) if h < p]

    @property
    def location(self) -> tuple[tuple[int, int], ...]:
        """``location[h]`` is ``(-1, leg_position)`` or ``(vertex, slot)``."""
        return _locations(self)

    def chords(self) -> list[tuple[int, int]]:
        """Chords as pairs of leg positions ``(i, j)`` with ``i < j``."""
        if self.vertices:
            raise DiagramError("not a chord diagram")
        pos = {h: i for i, h in enumerate(self.legs)}
        out = []
        for i, h in enumerate(self.legs):
            j = pos[self.partner[h]]
            if i < j:
                out.append((i, j))
        return out

    def components(self) -> list[list[int]]:
        """Connected components as sorted lists of half-edges."""
        return _components(self)

    def to_text(self) -> str:
        if not self.vertices:
            pairs = "".join(f"({i} {j})" for i, j in self.chords())
            return f"CD n={self.order}; pairs={pairs}"
        parts = [f"FD n={self.order}", "legs=[" + ",".join(map(str, self.legs)) + "]"]
        for v in self.vertices:
            parts.append("vertex=(%d,%d,%d)" % v)
        parts.append("edges=" + "".join(f"({a} {b})" for a, b in self.edges()))
        return "; ".join(parts)

    def __str__(self) -> str:
        return self.to_text()


@lru_cache(maxsize=None)
def _locations(d: FeynmanDiagram):
    loc = [None] * len(d.partner)
    for i, h in enumerate(d.legs):
        loc[h] = (-1, i)
    for k, v in enumerate(d.vertices):
        for s, h in enumerate(v):
            loc[h] = (k, s)
    return tuple(loc)


def _components(d: FeynmanDiagram) -> list[list[int]]:
    parent = list(range(d.n_half_edges))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for a, b in d.edges():
        union(a, b)
    for v in d.vertices:
        union(v[0], v[1])
        union(v[0], v[2])
    groups: dict[int, list[int]] = {}
    for h in range(d.n_half_edges):
        groups.setdefault(find(h), []).append(h)
    return sorted(groups.values())


# ---------------------------------------------------------------- construction


def feynman(legs, vertices, edges) -> FeynmanDiagram:
    """Build and validate a diagram from arbitrary nonnegative half-edge ids."""
    legs = [int(h) for h in legs]
    vertices = [tuple(int(h) for h in v) for v in vertices]
    for v in vertices:
        if len(v) != 3:
            raise DiagramError(f"vertex {v} is not a triple")
    slots = legs + [h for v in vertices for h in v]
    if len(set(slots)) != len(slots):
        raise DiagramError("a half-edge is attached twice")
    if any(h < 0 for h in slots):
        raise DiagramError("half-edge ids must be nonnegative")
    if (len(legs) + len(vertices)) % 2:
        raise DiagramError("odd vertex count")
    index = {h: i for i, h in enumerate(slots)}
    partner = [None] * len(slots)
    for a, b in edges:
        a, b = int(a), int(b)
        for h in (a, b):
            if h not in index:
                raise DiagramError(f"edge uses unknown half-edge {h}")
        ia, ib = index[a], index[b]
        if ia == ib or partner[ia] is not None or partner[ib] is not None:
            raise DiagramError(f"half-edge paired twice in edge ({a} {b})")
        partner[ia], partner[ib] = ib, ia
    missing = [slots[i] for i, p in enumerate(partner) if p is None]
    if missing:
        raise DiagramError(f"unmatched half-edge {missing[0]}")
    nl = len(legs)
    d = FeynmanDiagram(
        legs=tuple(range(nl)),
        vertices=tuple(tuple(range(nl + 3 * k, nl + 3 * k + 3)) for k in range(len(vertices))),
        partner=tuple(partner),
    )
    for comp in d.components():
        if not any(h < nl for h in comp):
            raise DiagramError("component without a leg")
    return d


def chord_diagram(pairs) -> FeynmanDiagram:
    """Chord diagram from a pairing of slots ``0..2n-1`` (counterclockwise)."""
    pairs = [tuple(p) for p in pairs]
    slots = sorted(h for p in pairs for h in p)
    if slots != list(range(len(slots))):
        raise DiagramError("chord endpoints must be exactly the slots 0..2n-1")
    return feynman(range(len(slots)), [], pairs)


def empty() -> FeynmanDiagram:
    return FeynmanDiagram((), (), ())


def theta() -> FeynmanDiagram:
    """The one-chord diagram."""
    return chord_diagram([(0, 1)])


def wheel(n: int) -> FeynmanDiagram:
    """The n-spoke wheel, drawn planar with the hub inside the Wilson line.

    Vertex ``k`` carries the cyclic order (spoke, edge to k+1, edge to k-1),
    which is counterclockwise in the planar picture.
    """
    if n < 2:
        raise DiagramError("wheel(n) needs n >= 2")
    legs = list(range(n))
    # vertex k: half-edges spoke=S(k), next=N(k), prev=P(k)
    S = lambda k: n + 3 * k
    N = lambda k: n + 3 * k + 1
    P = lambda k: n + 3 * k + 2
    vertices = [(S(k), N(k), P(k)) for k in range(n)]
    edges = [(k, S(k)) for k in range(n)]
    edges += [(N(k), P((k + 1) % n)) for k in range(n)]
    return feynman(legs, vertices, edges)


def construct(kind: str, *args, **kwargs) -> FeynmanDiagram:
    """Dispatch to ``chord_diagram``, ``feynman``, ``wheel`` or ``theta``."""
    table = {
        "chord-pairing": chord_diagram,
        "feynman-description": feynman,
        "wheel": wheel,
        "theta": theta,
        "empty": empty,
    }
    try:
        fn = table[kind]
    except KeyError:
        raise DiagramError(f"unknown diagram kind {kind!r}") from None
    return fn(*args, **kwargs)


# ---------------------------------------------------------------- text format

_PAIR = re.compile(r"\(\s*(\d+)\s+(\d+)\s*\)")


def parse(text: str) -> FeynmanDiagram:
    """Parse one ``CD ...`` or ``FD ...`` description."""
    text = text.strip()
    fields = [f.strip() for f in text.split(";") if f.strip()]
    if not fields:
        raise DiagramError("empty description")
    head = fields[0].split()
    if len(head) != 2 or head[0] not in ("CD", "FD") or not head[1].startswith("n="):
        raise DiagramError(f"bad header {fields[0]!r}")
    try:
        n = int(head[1][2:])
    except ValueError:
        raise DiagramError(f"bad order in {fields[0]!r}") from None
    if head[0] == "CD":
        pairs = None
        for f in fields[1:]:
            key, _, val = f.partition("=")
            if key.strip() != "pairs":
                raise DiagramError(f"unknown field {key.strip()!r}")
            pairs = _parse_pairs(val)
        if pairs is None:
            pairs = []
        d = chord_diagram(pairs)
    else:
        legs, vertices, edges = None, [], []
        for f in fields[1:]:
            key, _, val = f.partition("=")
            key, val = key.strip(), val.strip()
            if key == "legs":
                if not (val.startswith("[") and val.endswith("]")):
                    raise DiagramError(f"bad legs field {val!r}")
                inner = val[1:-1].strip()
                legs = [int(x) for x in inner.split(",")] if inner else []
            elif key == "vertex":
                if not (val.startswith("(") and val.endswith(")")):
                    raise DiagramError(f"bad vertex field {val!r}")
                vertices.append(tuple(int(x) for x in val[1:-1].split(",")))
            elif key == "edges":
                edges = _parse_pairs(val)
            else:
                raise DiagramError(f"unknown field {key!r}")
        if legs is None:
            raise DiagramError("missing legs field")
        d = feynman(legs, vertices, edges)
    if d.order != n:
        raise DiagramError(f"declared order {n} but diagram has order {d.order}")
    return d


def _parse_pairs(val: str) -> list[tuple[int, int]]:
    val = val.strip()
    pairs = [(int(a), int(b)) for a, b in _PAIR.findall(val)]
    if _PAIR.sub("", val).strip():
        raise DiagramError(f"bad pair list {val!r}")
    return pairs


def parse_file(text: str) -> list[FeynmanDiagram]:
    """One diagram per non-blank line; ``#`` starts a comment line."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            out.append(parse(s))
        except (DiagramError, ValueError) as exc:
            raise DiagramError(f"line {lineno}: {exc}") from None
    return out


# ---------------------------------------------------------------- canonical form


@dataclass(frozen=True)
class CanonicalKey:
    key: str
    sign: int

    def to_json(self) -> str:
        return json.dumps({"key": self.key, "sign": self.sign})


def _orientation_sign(cyclic, ordered) -> int:
    a, b, c = cyclic
    if tuple(ordered) in ((a, b, c), (b, c, a), (c, a, b)):
        return 1
    return -1


def canonicalize(d: FeynmanDiagram) -> CanonicalKey:
    key, sign, _ = _canonical(d)
    return CanonicalKey(key, sign)


@lru_cache(maxsize=200_000)
def _canonical(d: FeynmanDiagram):
    """Return ``(key, sign, labeling)``.

    Minimizes a BFS code over all Wilson-line rotations and, for each newly
    reached trivalent vertex, both ways of reading its two remaining slots.
    ``labeling`` lists the half-edges of ``d`` in canonical order for the
    first optimal branch found.
    """
    L = len(d.legs)
    if L == 0:
        return "CD n=0; pairs=", 1, ()
    partner = d.partner
    loc = _locations(d)
    t = len(d.vertices)

    best: list = [None, None]  # code, node orders
    signs: set = set()
    vlabel = [-1] * t
    vorder: list = [None] * t
    nodes: list = []
    code: list = []
    rot = [0]

    def go(ni, si, sign, cmp):
        npush = 0
        try:
            while ni < len(nodes):
                hs = nodes[ni]
                while si < len(hs):
                    p = partner[hs[si]]
                    k, s = loc[p]
                    fresh = k >= 0 and vlabel[k] < 0
                    if k < 0:
                        val = 3 * ((s - rot[0]) % L)
                    elif not fresh:
                        val = 3 * (L + vlabel[k]) + vorder[k].index(p)
                    else:
                        val = 3 * len(nodes)
                    if cmp == 0:
                        bv = best[0][len(code)]
                        if val > bv:
                            return
                        if val < bv:
                            cmp = -1
                    code.append(val)
                    npush += 1
                    si += 1
                    if fresh:
                        cyc = d.vertices[k]
                        i = cyc.index(p)
                        lab = len(nodes) - L
                        for flip in (False, True):
                            if flip:
                                order = (p, cyc[(i + 2) % 3], cyc[(i + 1) % 3])
                            else:
                                order = (p, cyc[(i + 1) % 3], cyc[(i + 2) % 3])
                            if best[0] is None or code < best[0][: len(code)]:
                                c = -1
                            else:
                                c = 0
                            vlabel[k], vorder[k] = lab, order
                            nodes.append(order)
                            go(ni, si, -sign if flip else sign, c)
                            nodes.pop()
                        vlabel[k], vorder[k] = -1, None
                        return
                ni += 1
                si = 0
            if cmp == -1 or best[0] is None:
                best[0] = list(code)
                best[1] = list(nodes)
                signs.clear()
            signs.add(sign)
        finally:
            for _ in range(npush):
                code.pop()

    for r in range(L):
        rot[0] = r
        nodes[:] = [(d.legs[(r + i) % L],) for i in range(L)]
        go(0, 0, 1, 0 if best[0] is not None else -1)

    labeling = tuple(h for node in best[1] for h in node)
    sign = 0 if len(signs) > 1 else next(iter(signs))
    return _code_to_text(best[0], L, t), sign, labeling


def _code_to_text(code, L, t) -> str:
    # canonical half-edge of (label, slot): legs i -> i, vertex label k -> L+3k+s
    def hid(v):
        lab, s = divmod(v, 3)
        return lab if lab < L else L + 3 * (lab - L) + s

    edges = set()
    pos = 0
    for lab in range(L + t):
        for s in range(1 if lab < L else 3):
            me = lab if lab < L else L + 3 * (lab - L) + s
            other = hid(code[pos])
            edges.add((min(me, other), max(me, other)))
            pos += 1
    n = (L + t) // 2
    if t == 0:
        return f"CD n={n}; pairs=" + "".join(f"({a} {b})" for a, b in sorted(edges))
    parts = [f"FD n={n}", "legs=[" + ",".join(map(str, range(L))) + "]"]
    for k in range(t):
        b = L + 3 * k
        parts.append(f"vertex=({b},{b + 1},{b + 2})")
    parts.append("edges=" + "".join(f"({a} {b})" for a, b in sorted(edges)))
    return "; ".join(parts)


@lru_cache(maxsize=200_000)
def from_key(key: str) -> FeynmanDiagram:
    """The canonical representative diagram of a key."""
    return parse(key)


# ---------------------------------------------------------------- analysis


@dataclass(frozen=True)
class HangingTree:
    root: int  # half-edge outside the tree at the attaching edge
    attach: int  # half-edge of the tree at the attaching edge
    vertices: tuple[int, ...]  # trivalent vertex indices in the tree
    legs: tuple[int, ...]  # leg positions of the tree

    @property
    def d(self) -> int:
        return len(self.legs)


@dataclass(frozen=True)
class DiagramAnalysis:
    legs: int
    order: int
    components: int
    betti: int
    hanging_tree: HangingTree | None = field(default=None)

    def to_json(self) -> str:
        return json.dumps(
            {
                "legs": self.legs,
                "order": self.order,
                "components": self.components,
                "betti": self.betti,
            }
        )


def analyze(d: FeynmanDiagram) -> DiagramAnalysis:
    nodes = len(d.legs) + len(d.vertices)
    # cycle rank via a spanning forest on nodes
    loc = _locations(d)
    node_of = [k + len(d.legs) if k >= 0 else s for k, s in loc]
    parent = list(range(nodes))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    cycles = 0
    for a, b in d.edges():
        ra, rb = find(node_of[a]), find(node_of[b])
        if ra == rb:
            cycles += 1
        else:
            parent[ra] = rb
    ncomp = len({find(x) for x in range(nodes)})
    return DiagramAnalysis(
        legs=len(d.legs),
        order=d.order,
        components=ncomp,
        betti=cycles,
        hanging_tree=find_hanging_tree(d),
    )


def hanging_tree_candidates(d: FeynmanDiagram) -> list[HangingTree]:
    """All hanging trees, one per attaching edge, sorted."""
    loc = _locations(d)
    out = []
    for root in range(d.n_half_edges):
        attach = d.partner[root]
        k, _ = loc[attach]
        if k < 0:
            continue
        side = _side(d, root, attach)
        if side is None:
            continue
        verts, legs, n_edges = side
        # a tree: edges inside (excluding the attaching one) = nodes - 1
        if n_edges != len(verts) + len(legs) - 1:
            continue
        out.append(HangingTree(root, attach, tuple(sorted(verts)), tuple(sorted(legs))))
    out.sort(key=lambda T: (T.legs, T.vertices, T.root))
    return out


def find_hanging_tree(d: FeynmanDiagram) -> HangingTree | None:
    c = hanging_tree_candidates(d)
    return c[0] if c else None


def _side(d: FeynmanDiagram, root: int, attach: int):
    """Nodes reachable from ``attach`` without crossing the edge root-attach.

    Returns None when the root's own node is reachable (edge is no bridge).
    """
    loc = _locations(d)
    rk, rs = loc[root]
    root_node = ("v", rk) if rk >= 0 else ("l", rs)
    start = ("v", loc[attach][0])
    seen = {start}
    stack = [start]
    inner_half_edges = 0
    while stack:
        node = stack.pop()
        hs = d.vertices[node[1]] if node[0] == "v" else (d.legs[node[1]],)
        for h in hs:
            if h == attach:
                continue
            inner_half_edges += 1
            p = d.partner[h]
            k, s = loc[p]
            nxt = ("v", k) if k >= 0 else ("l", s)
            if nxt == root_node and p == root:
                return None
            if nxt == root_node:
                return None
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    verts = [n[1] for n in seen if n[0] == "v"]
    legs = [n[1] for n in seen if n[0] == "l"]
    return verts, legs, inner_half_edges // 2


# ---------------------------------------------------------------- chord diagrams


def _rotation_min_code(pairs_of, m):
    best = None
    for r in range(m):
        code = tuple((pairs_of[(i + r) % m] - r) % m for i in range(m))
        if best is None or code < best:
            best = code
    return best


def enumerate_chord_diagrams(n: int, cap: int | None = None) -> list[str]:
    """Keys of all chord diagrams of order n up to rotation, sorted.

    Grows diagrams one chord at a time, inserting a new chord at every pair
    of gaps of each order-(n-1) diagram.
    """
    if n < 0:
        raise ValueError("order must be nonnegative")
    cap = ENUMERATION_CAP if cap is None else cap
    return list(_enumerate_chords(n, cap))


@lru_cache(maxsize=None)
def _enumerate_chords(n: int, cap: int) -> tuple[str, ...]:
    if n == 0:
        return (canonicalize(empty()).key,)
    prev = _enumerate_chords(n - 1, cap)
    seen = set()
    work = 0
    m = 2 * n
    for key in prev:
        chords = from_key(key).chords() if n > 1 else []
        for a, b in itertools.combinations_with_replacement(range(m - 1), 2):
            work += 1
            if work > cap:
                raise ResourceLimitError(f"chord enumeration exceeded cap {cap}")
            # insert new endpoints into gaps a <= b of the old 2n-2 slots
            def shift(x, a=a, b=b):
                return x + (x >= a) + (x >= b)

            new = [(shift(i), shift(j)) for i, j in chords]
            new.append((a, b + 1))
            pairs_of = [0] * m
            for i, j in new:
                pairs_of[i], pairs_of[j] = j, i
            seen.add(_rotation_min_code(pairs_of, m))
    keys = set()
    for code in seen:
        pairs = [(i, j) for i, j in enumerate(code) if i < j]
        keys.add(canonicalize(chord_diagram(pairs)).key)
    return tuple(sorted(keys))


def connected_sum(d1: FeynmanDiagram, d2: FeynmanDiagram) -> FeynmanDiagram:
    """Cut both Wilson lines after their last leg and concatenate."""
    off = d1.n_half_edges
    legs = list(d1.legs) + [h + off for h in d2.legs]
    verts = list(d1.vertices) + [tuple(h + off for h in v) for v in d2.vertices]
    edges = d1.edges() + [(a + off, b + off) for a, b in d2.edges()]
    return feynman(legs, verts, edges)


def sub_chord_diagram(d: FeynmanDiagram, keep) -> FeynmanDiagram:
    """The chord diagram formed by the chords with indices in ``keep``."""
    chords = d.chords()
    slots = sorted(x for c in keep for x in chords[c])
    where = {s: i for i, s in enumerate(slots)}
    return chord_diagram([(where[chords[c][0]], where[chords[c][1]]) for c in keep])


def chord_splits(d: FeynmanDiagram) -> list[tuple[FeynmanDiagram, FeynmanDiagram]]:
    """All ``(E, D minus E)`` over the 2^n subsets E of chords."""
    n = len(d.chords())
    out = []
    for mask in range(1 << n):
        inside = [c for c in range(n) if mask >> c & 1]
        outside = [c for c in range(n) if not mask >> c & 1]
        out.append((sub_chord_diagram(d, inside), sub_chord_diagram(d, outside)))
    return out
