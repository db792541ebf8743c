"""The sl2 and Alexander-Conway weight systems.

``eval_sl2`` is a memoized recursion on diagrams:

* a trivalent vertex with a loop at itself gives 0;
* an inner edge joining vertices (e, a, b) and (e', c, d) is removed with
  the four-index identity  F = lam * F[a-d, b-c] - lam * F[a-c, b-d],
  each closed loop contributing the dimension;
* otherwise the vertex next to the first leg is resolved by STU;
* chord diagrams use the chord recursion obtained by moving one end of a
  chord a = (p, q) past the legs X strictly between p and q:

      V(D) = c V(D-a) - (kappa/2) |X| V(D-a) + sum_{r<t in X} P(r, t)

  where for r, t with partners r', t'
      P = lam (dim - 1) V(D-a)                       if r, t form a chord
      P = lam V(D-a; r t, r' t') - lam V(D-a; r t', t r')   otherwise.

``kappa`` is the ratio of the bubble to the plain edge and ``lam`` the
Lagrange coefficient.  ``eval_sl2_oracle`` goes through the tensor
contraction in :mod:`wsforge.lie_tensor` and certifies the recursion.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb

from .diagrams import (
    DiagramError,
    FeynmanDiagram,
    ResourceLimitError,
    canonicalize,
    chord_diagram,
    chord_splits,
    connected_sum,
    empty,
    feynman,
    from_key,
)
from .lie_tensor import CenterPolynomial, gl11, sl2, universal
from .span_reduce import LinearCombination, as_lc, stu_resolve, stu_step

__all__ = [
    "Sl2Rules",
    "SL2_RULES",
    "ConwayFormError",
    "eval_sl2",
    "eval_sl2_oracle",
    "eval_gl11",
    "eval_conway",
    "deframed_sl2",
    "tilde_v",
    "mm_coefficients",
    "single_chord_components",
    "VassilievSeries",
    "series_product",
    "epsilon",
    "ORACLE_MAX_LEGS",
    "insert_bubble_chord",
    "insert_bubble_edge",
    "verify_conway_relations",
]

ORACLE_MAX_LEGS = 12


@dataclass(frozen=True)
class Sl2Rules:
    lam: Fraction = Fraction(2)
    kappa: Fraction = Fraction(4)
    dim: int = 3


SL2_RULES = Sl2Rules()


# ---------------------------------------------------------------- polynomials in c
# tuples of Fractions, index = power of c


def _padd(a, b, s=1):
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, v in enumerate(a):
        out[i] += v
    for i, v in enumerate(b):
        out[i] += s * v
    while out and not out[-1]:
        out.pop()
    return tuple(out)


def _pscale(a, s):
    if not s:
        return ()
    return tuple(v * s for v in a)


def _pshift(a, k=1):
    return (Fraction(0),) * k + tuple(a) if a else ()


def _to_center(p) -> CenterPolynomial:
    return CenterPolynomial.c_poly(dict(enumerate(p)))


# ---------------------------------------------------------------- sl2 recursion


def _remove_positions(pairs, drop):
    """Chord pairs on the positions that remain after dropping ``drop``."""
    allpos = sorted({p for pr in pairs for p in pr})
    keep = [p for p in allpos if p not in drop]
    idx = {p: i for i, p in enumerate(keep)}
    return [(idx[a], idx[b]) for a, b in pairs if a not in drop and b not in drop]


def _chord_value(pairs, rules) -> tuple:
    if not pairs:
        return (Fraction(1),)
    return _sl2_key(canonicalize(chord_diagram(pairs)).key, rules)


def _chord_recursion(d: FeynmanDiagram, rules: Sl2Rules) -> tuple:
    m = d.n_legs
    chords = d.chords()
    mate = {}
    for i, j in chords:
        mate[i], mate[j] = j, i

    # chord with the fewest legs on one side
    best = None
    for i, j in chords:
        for p, q in ((i, j), (j, i)):
            between = [(p + s) % m for s in range(1, (q - p) % m)]
            if best is None or len(between) < len(best[2]):
                best = (p, q, between)
    p, q, X = best
    rest = [(i, j) for i, j in chords if {i, j} != {p, q}]
    base = _chord_value(_remove_positions(rest, (p, q)), rules)
    out = _pshift(base)
    out = _padd(out, _pscale(base, -rules.kappa / 2 * len(X)))
    for r, t in combinations(X, 2):
        if mate[r] == t:
            out = _padd(out, _pscale(base, rules.lam * (rules.dim - 1)))
            continue
        rp, tp = mate[r], mate[t]
        others = [(i, j) for i, j in rest if i not in (r, t) and j not in (r, t)]
        swap = others + [(r, tp), (t, rp)]
        para = others + [(r, t), (rp, tp)]
        out = _padd(out, _pscale(_chord_value(_remove_positions(swap, (p, q)), rules), -rules.lam))
        out = _padd(out, _pscale(_chord_value(_remove_positions(para, (p, q)), rules), rules.lam))
    return out


def _rejoin(d: FeynmanDiagram, drop_vertices, joins: dict):
    """Remove vertices and splice their slots according to ``joins``.

    Returns (diagram, loops) or None when a component loses all its legs.
    """
    removed = {h for k in drop_vertices for h in d.vertices[k]}
    partner = d.partner
    new_edges, seen = [], set()
    for h in range(d.n_half_edges):
        if h in removed or h in seen or partner[h] not in removed:
            continue
        s = partner[h]
        while True:
            seen.add(s)
            s2 = joins[s]
            seen.add(s2)
            nxt = partner[s2]
            if nxt not in removed:
                break
            s = nxt
        seen.add(h)
        seen.add(nxt)
        new_edges.append((h, nxt))
    loops = 0
    for s in joins:
        if s in seen:
            continue
        loops += 1
        t = s
        while t not in seen:
            seen.add(t)
            t2 = joins[t]
            seen.add(t2)
            t = partner[t2]
    edges = [(a, b) for a, b in d.edges() if a not in removed and b not in removed] + new_edges
    verts = [v for k, v in enumerate(d.vertices) if k not in drop_vertices]
    try:
        return feynman(list(d.legs), verts, edges), loops
    except DiagramError:
        return None


def _lagrange_terms(d: FeynmanDiagram):
    """First inner edge whose four-index expansion keeps every component
    attached to the Wilson line; returns [(sign, diagram, loops), ...]."""
    loc = d.location
    for a0, b0 in d.edges():
        ku, kv = loc[a0][0], loc[b0][0]
        if ku < 0 or kv < 0 or ku == kv:
            continue
        u, v = d.vertices[ku], d.vertices[kv]
        i, j = u.index(a0), v.index(b0)
        a, b = u[(i + 1) % 3], u[(i + 2) % 3]
        c, dd = v[(j + 1) % 3], v[(j + 2) % 3]
        t1 = _rejoin(d, (ku, kv), {a: dd, dd: a, b: c, c: b})
        t2 = _rejoin(d, (ku, kv), {a: c, c: a, b: dd, dd: b})
        if t1 is None or t2 is None:
            continue
        return [(1, *t1), (-1, *t2)]
    return None


@lru_cache(maxsize=None)
def _sl2_key(key: str, rules: Sl2Rules) -> tuple:
    d = from_key(key)
    if d.n_legs == 0:
        return (Fraction(1),)
    if d.is_chord_diagram():
        return _chord_recursion(d, rules)
    for cyc in d.vertices:
        if any(d.partner[h] in cyc for h in cyc):
            return ()
    terms = _lagrange_terms(d)
    if terms is not None:
        out = ()
        for s, g, loops in terms:
            out = _padd(out, _pscale(_sl2_diagram(g, rules), s * rules.lam * rules.dim**loops))
        return out
    i = next(i for i, h in enumerate(d.legs) if d.location[d.partner[h]][0] >= 0)
    par, cross = stu_step(d, i)
    return _padd(_sl2_diagram(par, rules), _sl2_diagram(cross, rules), -1)


def _sl2_diagram(d: FeynmanDiagram, rules: Sl2Rules) -> tuple:
    c = canonicalize(d)
    if c.sign == 0:
        return ()
    return _pscale(_sl2_key(c.key, rules), c.sign)


def _linear(x, fn, zero):
    if isinstance(x, FeynmanDiagram):
        return fn(x)
    out = zero
    for k, v in as_lc(x).items():
        out = out + fn(from_key(k)) * v
    return out


def eval_sl2(x, rules: Sl2Rules = SL2_RULES) -> CenterPolynomial:
    """Universal sl2 weight system (trace form) as a polynomial in c."""
    return _linear(x, lambda d: _to_center(_sl2_diagram(d, rules)), CenterPolynomial.zero())


def eval_sl2_oracle(x, max_legs: int = ORACLE_MAX_LEGS, seed: int | None = None) -> CenterPolynomial:
    """The same value through full tensor contraction in U(sl2); ``seed``
    shuffles the contraction schedule."""

    def one(d):
        if d.n_legs > max_legs:
            raise ResourceLimitError(f"oracle limited to {max_legs} legs")
        return universal(d, sl2(), seed=seed)

    return _linear(x, one, CenterPolynomial.zero())


# ---------------------------------------------------------------- deframing


def single_chord_components(d: FeynmanDiagram) -> list:
    """Leg positions (i, j) of the components that are a bare chord."""
    pos = {h: i for i, h in enumerate(d.legs)}
    out = []
    for i, h in enumerate(d.legs):
        p = d.partner[h]
        if p in pos and i < pos[p]:
            out.append((i, pos[p]))
    return out


def _remove_chords(d: FeynmanDiagram, chords) -> FeynmanDiagram:
    drop = {d.legs[i] for pr in chords for i in pr}
    legs = [h for h in d.legs if h not in drop]
    edges = [(a, b) for a, b in d.edges() if a not in drop]
    return feynman(legs, list(d.vertices), edges)


def _deframe_terms(d: FeynmanDiagram):
    """(|J|, D - J) over subsets J of the bare-chord components."""
    sc = single_chord_components(d)
    for r in range(len(sc) + 1):
        for J in combinations(sc, r):
            yield r, _remove_chords(d, J)


def deframed_sl2(x, rules: Sl2Rules = SL2_RULES) -> CenterPolynomial:
    """sl2 weight system composed with the deframing projection."""

    def one(d):
        out = ()
        for r, g in _deframe_terms(d):
            part = _sl2_diagram(g, rules)
            out = _padd(out, _pscale(_pshift(part, r), (-1) ** r))
        return _to_center(out)

    return _linear(x, one, CenterPolynomial.zero())


def tilde_v(x, order: int | None = None, rules: Sl2Rules = SL2_RULES) -> Fraction:
    """2^{-n/2} times the coefficient of c^{n/2} in the deframed sl2 value
    (0 for odd n)."""
    if isinstance(x, FeynmanDiagram):
        n = x.order
    else:
        n = as_lc(x).order
    if order is not None and n is not None and order != n:
        raise ValueError(f"order mismatch: {n} != {order}")
    n = order if n is None else n
    if n is None or n % 2:
        return Fraction(0)
    return deframed_sl2(x, rules).coeff(n // 2) / 2 ** (n // 2)


def mm_coefficients(x, rules: Sl2Rules = SL2_RULES) -> dict:
    """{i: w_i} with deframed_sl2(x) evaluated at c = (d^2 - 1)/2 written as
    sum w_i d^i; this is the Casimir value on the d-dimensional
    irreducible representation."""
    out: dict = {}
    for (k,), v in deframed_sl2(x, rules).terms:
        # ((d^2 - 1)/2)^k = 2^-k sum_j C(k, j) d^(2j) (-1)^(k-j)
        for j in range(k + 1):
            out[2 * j] = out.get(2 * j, 0) + v * Fraction(comb(k, j) * (-1) ** (k - j), 2**k)
    return {i: c for i, c in sorted(out.items()) if c}


# ---------------------------------------------------------------- gl(1|1)


class ConwayFormError(ArithmeticError):
    pass


@lru_cache(maxsize=None)
def _gl11_key(key: str) -> CenterPolynomial:
    return universal(from_key(key), gl11())


def eval_gl11(d: FeynmanDiagram) -> CenterPolynomial:
    """Universal gl(1|1) weight system in C[h, c]."""
    c = canonicalize(d)
    if c.sign == 0:
        return CenterPolynomial.zero(("h", "c"))
    return _gl11_key(c.key) * c.sign


def _conway_one(d: FeynmanDiagram) -> Fraction:
    total = CenterPolynomial.zero(("h", "c"))
    cvar = CenterPolynomial.make(("h", "c"), {(0, 1): 1})
    for r, g in _deframe_terms(d):
        part = eval_gl11(g)
        for _ in range(r):
            part = part * cvar
        total = total + part * (-1) ** r
    n = d.order
    extra = [k for k, _ in total.terms if k != (n, 0)]
    if extra:
        raise ConwayFormError(f"deframed gl(1|1) value {total} is not a multiple of h^{n}")
    return total.coeff(n, 0)


def eval_conway(x) -> Fraction:
    """Alexander-Conway weight system via deframed gl(1|1).

    The deframed value is C(F) h^n for a diagram of order n; C(F) is
    returned.  Deframing removes bare-chord components, which agrees with
    deframing the STU resolution term by term.
    """
    return _linear(x, _conway_one, Fraction(0))


def eval_conway_resolved(x) -> Fraction:
    """eval_conway computed on the chord-diagram resolution instead."""
    return eval_conway(stu_resolve(x))


# ---------------------------------------------------------------- series


@dataclass(frozen=True)
class VassilievSeries:
    """A weight system given on chord diagrams; extended linearly."""

    name: str
    evaluator: object
    multiplicative: bool = False

    def __call__(self, x):
        lc = stu_resolve(x)
        out = None
        for k, v in lc.items():
            term = self.evaluator(from_key(k)) * v
            out = term if out is None else out + term
        if out is None:
            return self.evaluator(empty()) * 0
        return out


def epsilon() -> VassilievSeries:
    return VassilievSeries("epsilon", lambda d: Fraction(int(d.order == 0)), True)


def series_product(w1: VassilievSeries, w2: VassilievSeries) -> VassilievSeries:
    """(W1 W2)(D) = sum over chord subsets E of W1(E) W2(D - E)."""

    def ev(d: FeynmanDiagram):
        out = None
        for e, rest in chord_splits(d):
            term = w1.evaluator(e) * w2.evaluator(rest)
            out = term if out is None else out + term
        return out

    return VassilievSeries(f"({w1.name}*{w2.name})", ev)


def sl2_series(rules: Sl2Rules = SL2_RULES) -> VassilievSeries:
    return VassilievSeries("sl2", lambda d: eval_sl2(d, rules), True)


def conway_series() -> VassilievSeries:
    return VassilievSeries("conway", eval_conway, True)


def product_diagram(d1: FeynmanDiagram, d2: FeynmanDiagram) -> LinearCombination:
    """Connected sum of the chord resolutions of two diagrams."""
    out = LinearCombination()
    for k1, v1 in stu_resolve(d1).items():
        for k2, v2 in stu_resolve(d2).items():
            out = out + LinearCombination.of(connected_sum(from_key(k1), from_key(k2)), v1 * v2)
    return out


# ---------------------------------------------------------------- Conway relations


def _splice_bubble(verts, edges, nxt, x, y):
    """Join half-edges x and y through a bubble; returns the next free id.

    The bubble reads (in, p, q) at the x end and (out, q', p') at the y
    end; as a chord between two legs this is wheel(2).
    """
    i_in, p, q, o, q2, p2 = range(nxt, nxt + 6)
    verts += [(i_in, p, q), (o, q2, p2)]
    edges += [(x, i_in), (p, p2), (q, q2), (o, y)]
    return nxt + 6


def insert_bubble_chord(d: FeynmanDiagram, i: int, j: int) -> FeynmanDiagram:
    """Add a bubbled chord whose legs land before positions i <= j of d."""
    h = d.n_half_edges
    x, y = h, h + 1
    legs = list(d.legs)
    legs.insert(j, y)
    legs.insert(i, x)
    verts, edges = list(d.vertices), d.edges()
    _splice_bubble(verts, edges, h + 2, x, y)
    return feynman(legs, verts, edges)


def insert_bubble_edge(d: FeynmanDiagram, a: int, b: int) -> FeynmanDiagram:
    """Put a bubble on the edge a-b (a before b in the bubble's reading)."""
    verts = list(d.vertices)
    edges = [e for e in d.edges() if set(e) != {a, b}]
    _splice_bubble(verts, edges, d.n_half_edges, a, b)
    return feynman(list(d.legs), verts, edges)


def _k_fragment_terms(d: FeynmanDiagram, a0: int, b0: int):
    """The four diagrams replacing the inner edge a0-b0 in the gl(1|1)
    exchange relation, with signs; None when the two vertices share more
    than this edge."""
    loc = d.location
    ku, kv = loc[a0][0], loc[b0][0]
    u, v = d.vertices[ku], d.vertices[kv]
    i, j = u.index(a0), v.index(b0)
    a, b = u[(i + 1) % 3], u[(i + 2) % 3]
    c, dd = v[(j + 1) % 3], v[(j + 2) % 3]
    slots = {a, b, c, dd}
    P = {s: d.partner[s] for s in slots}
    if any(p in slots or p in (a0, b0) for p in P.values()):
        return None
    removed = set(u) | set(v)
    base_edges = [e for e in d.edges() if not (set(e) & removed)]
    verts = [w for k, w in enumerate(d.vertices) if k not in (ku, kv)]
    out = []
    for sign, bub, plain in ((1, (a, c), (b, dd)), (1, (b, dd), (a, c)), (-1, (b, c), (a, dd)), (-1, (a, dd), (b, c))):
        vs, es = list(verts), list(base_edges) + [(P[plain[0]], P[plain[1]])]
        _splice_bubble(vs, es, d.n_half_edges, P[bub[0]], P[bub[1]])
        try:
            out.append((sign, feynman(list(d.legs), vs, es)))
        except DiagramError:
            return None
    return out


def _inner_edges(d: FeynmanDiagram):
    loc = d.location
    return [(a, b) for a, b in d.edges() if loc[a][0] >= 0 and loc[b][0] >= 0 and loc[a][0] != loc[b][0]]


def _all_diagrams(max_order: int):
    from .span_reduce import feynman_diagrams

    for n in range(max_order + 1):
        for level in feynman_diagrams(n):
            for k in level:
                if canonicalize(from_key(k)).sign:
                    yield from_key(k)


def verify_conway_relations(max_order: int, iv_coeff=Fraction(1, 2), limit: int | None = None) -> dict:
    """Check the four local relations of the Conway weight system.

    (i)   a bubbled chord contributes a factor -2;
    (ii)  a vertex with a bubble on one of its edges gives 0;
    (iii) a vertex whose three neighbours are trivalent gives 0;
    (iv)  an inner edge between (e, a, b) and (e', c, d) equals
          iv_coeff * (B(a,c)C(b,d) + C(a,c)B(b,d) - C(a,d)B(b,c) - B(a,d)C(b,c))
          with B a bubbled and C a plain connection.

    Returns {relation: {"instances": int, "verified": [key, ...],
    "failures": [...]}}; a key repeats when one diagram yields several
    instances.
    ``limit`` caps the instances per relation (deterministic prefix).
    """
    iv_coeff = Fraction(iv_coeff)
    report = {r: {"instances": 0, "verified": [], "failures": []} for r in ("i", "ii", "iii", "iv")}

    def record(rel, key, lhs, rhs):
        report[rel]["instances"] += 1
        if lhs == rhs:
            report[rel]["verified"].append(key)
        else:
            report[rel]["failures"].append({"diagram": key, "lhs": str(lhs), "rhs": str(rhs)})

    def full(rel):
        return limit is not None and report[rel]["instances"] >= limit

    small = list(_all_diagrams(max_order - 2))
    for d in small:
        base = eval_conway(d)
        m = d.n_legs
        for i in range(m + 1):
            for j in range(i, m + 1):
                if full("i"):
                    break
                g = insert_bubble_chord(d, i, j)
                record("i", canonicalize(g).key, eval_conway(g), -2 * base)
        if d.n_trivalent:
            loc = d.location
            for a, b in d.edges():
                if full("ii"):
                    break
                if loc[a][0] < 0 and loc[b][0] < 0:
                    continue
                g = insert_bubble_edge(d, a, b)
                record("ii", canonicalize(g).key, eval_conway(g), 0)
    for d in _all_diagrams(max_order):
        if not d.n_trivalent:
            continue
        loc = d.location
        for k, cyc in enumerate(d.vertices):
            nb = [loc[d.partner[h]][0] for h in cyc]
            if all(x >= 0 for x in nb) and len(set(nb)) == 3 and k not in nb:
                if not full("iii"):
                    record("iii", canonicalize(d).key, eval_conway(d), 0)
                break
        for a0, b0 in _inner_edges(d):
            if full("iv"):
                break
            terms = _k_fragment_terms(d, a0, b0)
            if terms is None:
                continue
            rhs = iv_coeff * sum((s * eval_conway(g) for s, g in terms), Fraction(0))
            record("iv", canonicalize(d).key, eval_conway(d), rhs)
    return report
