"""Metrized Lie (super)algebras, diagram tensors and their images in U(L).

Conventions
-----------
* Basis elements carry a parity 0 (even) or 1 (odd).  The bracket is the
  super commutator ``[x, y] = xy - (-1)^{|x||y|} yx`` of the defining
  matrices and ``b`` is the (super)trace form ``str(xy)``.
* ``f[i, j, k]`` are the components of the covector ``b([x, y], z)`` with
  all indices lowered (for odd entries this includes the Koszul sign of
  pairing dual symbols with vectors); ``omega = b^{-1}`` gives the Casimir tensor
  ``sum omega[i, j] e_i (x) e_j``.
* A diagram is contracted with one index per half-edge.  Every vertex
  contributes ``f`` over its slots in cyclic order, every edge
  contributes ``omega``.  Symbols are created vertex by vertex, then
  edge by edge, and moved so that each inner covector/vector pair is
  adjacent and the legs are in Wilson-line order; odd symbols passing
  each other contribute -1.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from .diagrams import FeynmanDiagram

__all__ = [
    "LieSuperAlgebraData",
    "ValidationReport",
    "MultiTensor",
    "UEA",
    "CenterPolynomial",
    "NotCentral",
    "sl2",
    "gl11",
    "validate",
    "contract",
    "wilson_close",
    "center_poly",
    "universal",
]

Matrix = tuple  # tuple of tuples of Fraction


def _mat(rows) -> Matrix:
    return tuple(tuple(Fraction(x) for x in r) for r in rows)


def _mul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n))


def _inverse(m: Matrix) -> Matrix:
    n = len(m)
    a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ValueError("singular metric")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                fac = a[r][col]
                a[r] = [x - fac * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(r[n:]) for r in a)


@dataclass(frozen=True)
class LieSuperAlgebraData:
    name: str
    names: tuple
    parity: tuple
    metric: Matrix
    bracket: tuple  # bracket[i][j] = ((k, coeff), ...)

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    @property
    def omega(self) -> Matrix:
        return _omega(self)

    @property
    def f(self) -> dict:
        """Nonzero entries of the lowered structure tensor."""
        return _structure(self)

    def bracket_vec(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for i, a in x.items():
            for j, b in y.items():
                for k, c in self.bracket[i][j]:
                    out[k] = out.get(k, 0) + a * b * c
        return {k: v for k, v in out.items() if v}

    def form(self, x: dict, y: dict) -> Fraction:
        return sum((a * b * self.metric[i][j] for i, a in x.items() for j, b in y.items()), Fraction(0))

    def scaled(self, s) -> "LieSuperAlgebraData":
        s = Fraction(s)
        m = tuple(tuple(s * x for x in r) for r in self.metric)
        return LieSuperAlgebraData(f"{self.name}*{s}", self.names, self.parity, m, self.bracket)

    def to_json(self) -> str:
        d = self.dim
        return json.dumps(
            {
                "name": self.name,
                "basis": list(self.names),
                "parity": list(self.parity),
                "metric": [[str(x) for x in r] for r in self.metric],
                "structure": [
                    [[str(self.f.get((i, j, k), 0)) for k in range(d)] for j in range(d)] for i in range(d)
                ],
            }
        )


@lru_cache(maxsize=None)
def _omega(L: LieSuperAlgebraData) -> Matrix:
    return _inverse(L.metric)


@lru_cache(maxsize=None)
def _structure(L: LieSuperAlgebraData) -> dict:
    out = {}
    for i in range(L.dim):
        for j in range(L.dim):
            for k in range(L.dim):
                v = sum((c * L.metric[m][k] for m, c in L.bracket[i][j]), Fraction(0))
                if v:
                    # components of the covector: Koszul sign of pairing
                    # X_i X_j X_k against e_i e_j e_k
                    p = L.parity
                    if (p[i] * p[j] + p[i] * p[k] + p[j] * p[k]) % 2:
                        v = -v
                    out[i, j, k] = v
    return out


def _from_matrices(name, names, mats, parity, supertrace) -> LieSuperAlgebraData:
    d = len(mats)
    grading = (1, -1) if supertrace else (1, 1)

    def tr(m):
        return sum(g * m[i][i] for i, g in enumerate(grading))

    metric = tuple(tuple(tr(_mul(mats[i], mats[j])) for j in range(d)) for i in range(d))
    omega = _inverse(metric)
    bracket = []
    for i in range(d):
        row = []
        for j in range(d):
            s = -1 if parity[i] and parity[j] else 1
            ab, ba = _mul(mats[i], mats[j]), _mul(mats[j], mats[i])
            com = tuple(tuple(x - s * y for x, y in zip(r1, r2)) for r1, r2 in zip(ab, ba))
            # coordinates through the nondegenerate form: b(com, e_k) = sum_m x_m b_mk
            v = [tr(_mul(com, mats[k])) for k in range(d)]
            coords = [sum(v[k] * omega[k][m] for k in range(d)) for m in range(d)]
            row.append(tuple((m, c) for m, c in enumerate(coords) if c))
        bracket.append(tuple(row))
    return LieSuperAlgebraData(name, tuple(names), tuple(parity), metric, tuple(bracket))


@lru_cache(maxsize=None)
def sl2() -> LieSuperAlgebraData:
    """sl_2 with basis h, e, f and the trace form of the defining representation."""
    h = _mat([[1, 0], [0, -1]])
    e = _mat([[0, 1], [0, 0]])
    f = _mat([[0, 0], [1, 0]])
    return _from_matrices("sl2", ("h", "e", "f"), (h, e, f), (0, 0, 0), supertrace=False)


@lru_cache(maxsize=None)
def gl11() -> LieSuperAlgebraData:
    """gl(1|1) with even h = id, n = E11, odd p = E12, q = E21, supertrace form."""
    h = _mat([[1, 0], [0, 1]])
    n = _mat([[1, 0], [0, 0]])
    p = _mat([[0, 1], [0, 0]])
    q = _mat([[0, 0], [1, 0]])
    return _from_matrices("gl11", ("h", "n", "p", "q"), (h, n, p, q), (0, 0, 1, 1), supertrace=True)


# ---------------------------------------------------------------- validation


@dataclass
class ValidationReport:
    algebra: str
    checks: dict  # name -> list of failing tuples

    @property
    def ok(self) -> bool:
        return not any(self.checks.values())

    def passed(self, name: str) -> bool:
        return not self.checks[name]

    def counts(self) -> dict:
        return {k: len(v) for k, v in self.checks.items()}


def _e(i) -> dict:
    return {i: Fraction(1)}


def _sub(x: dict, y: dict) -> dict:
    out = dict(x)
    for k, v in y.items():
        out[k] = out.get(k, 0) - v
    return {k: v for k, v in out.items() if v}


def _scale(x: dict, s) -> dict:
    return {k: v * s for k, v in x.items() if v * s}


def validate(L: LieSuperAlgebraData, lagrange_coeff=2) -> ValidationReport:
    """Check every structural identity over all basis tuples.

    sl2 additionally gets the four-index Lagrange identity
    ``<[a,b],[c,d]> = k<a,d><b,c> - k<a,c><b,d>`` with ``k = lagrange_coeff``;
    gl11 gets depth-three solvability ``[[[a,b],[c,d]],g] = 0``.
    """
    d, p, b = L.dim, L.parity, L.metric
    rng = range(d)
    checks = {}
    checks["metric_even"] = [(i, j) for i in rng for j in rng if b[i][j] and p[i] != p[j]]
    checks["metric_supersymmetric"] = [
        (i, j) for i in rng for j in rng if b[i][j] != (-1) ** (p[i] * p[j]) * b[j][i]
    ]
    checks["bracket_parity"] = [
        (i, j) for i in rng for j in rng for k, _ in L.bracket[i][j] if p[k] != (p[i] + p[j]) % 2
    ]
    checks["antisymmetry"] = [
        (i, j)
        for i in rng
        for j in rng
        if L.bracket_vec(_e(i), _e(j)) != _scale(L.bracket_vec(_e(j), _e(i)), -((-1) ** (p[i] * p[j])))
    ]
    checks["invariance"] = [
        (i, j, k)
        for i in rng
        for j in rng
        for k in rng
        if L.form(L.bracket_vec(_e(i), _e(j)), _e(k)) != L.form(_e(i), L.bracket_vec(_e(j), _e(k)))
    ]
    jac = []
    for i, j, k in product(rng, repeat=3):
        lhs = L.bracket_vec(_e(i), L.bracket_vec(_e(j), _e(k)))
        r1 = L.bracket_vec(L.bracket_vec(_e(i), _e(j)), _e(k))
        r2 = _scale(L.bracket_vec(_e(j), L.bracket_vec(_e(i), _e(k))), (-1) ** (p[i] * p[j]))
        if _sub(_sub(lhs, r1), r2):
            jac.append((i, j, k))
    checks["jacobi"] = jac
    f = L.f
    checks["f_cyclic"] = [
        (i, j, k)
        for i, j, k in product(rng, repeat=3)
        if f.get((j, k, i), 0) != (-1) ** (p[i] * (p[j] + p[k])) * f.get((i, j, k), 0)
    ]
    if L.names == ("h", "e", "f"):
        lam = Fraction(lagrange_coeff)
        bad = []
        for a, bb, c, dd in product(rng, repeat=4):
            lhs = L.form(L.bracket_vec(_e(a), _e(bb)), L.bracket_vec(_e(c), _e(dd)))
            rhs = lam * b[a][dd] * b[bb][c] - lam * b[a][c] * b[bb][dd]
            if lhs != rhs:
                bad.append((a, bb, c, dd))
        checks["lagrange"] = bad
    if L.names == ("h", "n", "p", "q"):
        bad = []
        for a, bb, c, dd, g in product(rng, repeat=5):
            x = L.bracket_vec(L.bracket_vec(_e(a), _e(bb)), L.bracket_vec(_e(c), _e(dd)))
            if L.bracket_vec(x, _e(g)):
                bad.append((a, bb, c, dd, g))
        checks["depth3_solvable"] = bad
    return ValidationReport(L.name, checks)


# ---------------------------------------------------------------- contraction


def _koszul(seq) -> int:
    """Sign of sorting ``seq`` of (position, parity) into position order."""
    odd = [pos for pos, par in seq if par]
    inv = sum(1 for a in range(len(odd)) for b in range(a + 1, len(odd)) if odd[a] > odd[b])
    return -1 if inv % 2 else 1


class MultiTensor:
    """Sparse element of L^{(x) m}: leg-index tuple -> coefficient."""

    __slots__ = ("algebra", "m", "entries")

    def __init__(self, algebra: LieSuperAlgebraData, m: int, entries: dict):
        self.algebra = algebra
        self.m = m
        self.entries = {k: v for k, v in entries.items() if v}

    def __eq__(self, other):
        return (
            isinstance(other, MultiTensor)
            and self.algebra == other.algebra
            and self.m == other.m
            and self.entries == other.entries
        )

    def __sub__(self, other):
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, 0) - v
        return MultiTensor(self.algebra, self.m, out)

    def __mul__(self, s):
        return MultiTensor(self.algebra, self.m, {k: v * s for k, v in self.entries.items()})

    __rmul__ = __mul__

    def to_array(self) -> np.ndarray:
        arr = np.full((self.algebra.dim,) * self.m, Fraction(0), dtype=object)
        for k, v in self.entries.items():
            arr[k] = v
        return arr

    def act(self, x: int) -> "MultiTensor":
        """Diagonal (super) action of basis element x."""
        L = self.algebra
        px = L.parity[x]
        out: dict = {}
        for idx, v in self.entries.items():
            sgn = 1
            for s, i in enumerate(idx):
                for k, c in L.bracket[x][i]:
                    key = idx[:s] + (k,) + idx[s + 1 :]
                    out[key] = out.get(key, 0) + sgn * c * v
                if px and L.parity[i]:
                    sgn = -sgn
        return MultiTensor(L, self.m, out)


def _schedule(d: FeynmanDiagram, rng: random.Random | None):
    """Order in which edges get their indices: BFS from the first leg so
    that vertices are completed early; shuffled when ``rng`` is given."""
    edges = d.edges()
    if rng is not None:
        edges = list(edges)
        rng.shuffle(edges)
        return edges
    loc = d.location
    seen_v, order, done = set(), [], set()
    frontier = list(d.legs)
    while frontier:
        h = frontier.pop(0)
        e = tuple(sorted((h, d.partner[h])))
        if e in done:
            continue
        done.add(e)
        order.append(e)
        for x in e:
            k = loc[x][0]
            if k >= 0 and k not in seen_v:
                seen_v.add(k)
                frontier.extend(y for y in d.vertices[k] if y != x)
    for e in edges:
        if tuple(sorted(e)) not in done:
            order.append(tuple(sorted(e)))
    return order


def contract(
    d: FeynmanDiagram,
    L: LieSuperAlgebraData,
    cut: int = 0,
    seed: int | None = None,
) -> MultiTensor:
    """Tensor of the diagram with output slots in leg order starting at ``cut``.

    ``seed`` shuffles the internal contraction schedule and the symbol
    creation order; the result must not depend on it.
    """
    rng = random.Random(seed) if seed is not None else None
    om = L.omega
    f = L.f
    par = L.parity
    om_pairs = [(i, j, om[i][j]) for i in range(L.dim) for j in range(L.dim) if om[i][j]]
    edges = _schedule(d, rng)
    if rng is not None:
        edges = [e if rng.random() < 0.5 else (e[1], e[0]) for e in edges]
    vorder = list(range(d.n_trivalent))
    vrot = [0] * d.n_trivalent
    if rng is not None:
        rng.shuffle(vorder)
        vrot = [rng.randrange(3) for _ in vorder]
    verts = [tuple(d.vertices[k][(r + s) % 3] for s in range(3)) for k, r in zip(range(d.n_trivalent), vrot)]
    loc = d.location
    legs = d.legs[cut:] + d.legs[:cut]
    leg_set = set(legs)

    # Symbol positions.  Creation order: vertex blocks, then edge blocks.
    # Target order: pairs (X_h, Y_h) for inner half-edges, then legs.
    created_x, pos = {}, 0
    for k in vorder:
        for h in verts[k]:
            created_x[h] = pos
            pos += 1
    created_y = {}
    for a, b in edges:
        created_y[a] = pos
        created_y[b] = pos + 1
        pos += 2
    inner = [h for h in range(d.n_half_edges) if h not in leg_set]
    target = {}
    t = 0
    for h in inner:
        target["x", h] = t
        target["y", h] = t + 1
        t += 2
    for h in legs:
        target["y", h] = t
        t += 1
    # the permutation sign only depends on parities; pre-sort symbols by
    # creation position and record their target positions
    symbols = sorted(
        [(created_x[h], ("x", h)) for h in inner] + [(created_y[h], ("y", h)) for h in created_y]
    )
    sym_half = [s[1][1] for s in symbols]
    sym_target = [target[s[1]] for s in symbols]

    # which vertices are complete once the first i edges are assigned
    assigned_at = {}
    for i, (a, b) in enumerate(edges):
        assigned_at[a] = i
        assigned_at[b] = i
    check_after: dict = {}
    for k in range(d.n_trivalent):
        last = max(assigned_at[h] for h in verts[k])
        check_after.setdefault(last, []).append(k)

    idx = [0] * d.n_half_edges
    out: dict = {}

    def go(i, w):
        if i == len(edges):
            sgn = _koszul([(sym_target[s], par[idx[sym_half[s]]]) for s in range(len(sym_half))])
            key = tuple(idx[h] for h in legs)
            out[key] = out.get(key, 0) + sgn * w
            return
        a, b = edges[i]
        for x, y, c in om_pairs:
            idx[a], idx[b] = x, y
            w2 = w * c
            for k in check_after.get(i, ()):
                v = verts[k]
                fv = f.get((idx[v[0]], idx[v[1]], idx[v[2]]))
                if fv is None:
                    break
                w2 = w2 * fv
            else:
                go(i + 1, w2)

    go(0, Fraction(1))
    return MultiTensor(L, len(legs), out)


# ---------------------------------------------------------------- U(L)


class UEA:
    """Universal enveloping algebra in PBW normal form.

    Monomials are nondecreasing index tuples in the fixed basis order
    (even generators first) with odd generators appearing at most once.
    Elements are dicts monomial -> Fraction.
    """

    def __init__(self, L: LieSuperAlgebraData):
        order = sorted(range(L.dim), key=lambda i: (L.parity[i], i))
        if order != list(range(L.dim)):
            raise ValueError("PBW order needs even basis elements first")
        self.L = L
        self._mul_gen = lru_cache(maxsize=None)(self._mul_gen_raw)
        self._word = lru_cache(maxsize=None)(self._word_raw)

    def _mul_gen_raw(self, mono: tuple, k: int):
        """Normal form of mono * e_k as a tuple of (monomial, coeff)."""
        L = self.L
        if not mono or mono[-1] < k or (mono[-1] == k and not L.parity[k]):
            return ((mono + (k,), Fraction(1)),)
        a = mono[-1]
        rest = mono[:-1]
        out: dict = {}
        if a == k:  # odd square: e_a e_a = 1/2 [e_a, e_a]
            for j, c in L.bracket[a][a]:
                for m, v in self._mul_gen(rest, j):
                    out[m] = out.get(m, 0) + v * c / 2
        else:
            # e_a e_k = s e_k e_a + [e_a, e_k]
            s = -1 if L.parity[a] and L.parity[k] else 1
            for m, v in self._mul_gen(rest, k):
                for m2, v2 in self._mul_gen(m, a):
                    out[m2] = out.get(m2, 0) + s * v * v2
            for j, c in L.bracket[a][k]:
                for m, v in self._mul_gen(rest, j):
                    out[m] = out.get(m, 0) + v * c
        return tuple((m, v) for m, v in out.items() if v)

    def mul_gen(self, x: dict, k: int) -> dict:
        out: dict = {}
        for m, v in x.items():
            for m2, v2 in self._mul_gen(m, k):
                out[m2] = out.get(m2, 0) + v * v2
        return {m: v for m, v in out.items() if v}

    def _word_raw(self, word: tuple):
        if not word:
            return (((), Fraction(1)),)
        prev = dict(self._word(word[:-1]))
        return tuple(self.mul_gen(prev, word[-1]).items())

    def word(self, word) -> dict:
        return dict(self._word(tuple(word)))

    def mul(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for m, v in y.items():
            part = x
            for k in m:
                part = self.mul_gen(part, k)
            for m2, v2 in part.items():
                out[m2] = out.get(m2, 0) + v * v2
        return {m: v for m, v in out.items() if v}

    def add(self, x: dict, y: dict, s=1) -> dict:
        out = dict(x)
        for m, v in y.items():
            out[m] = out.get(m, 0) + s * v
        return {m: v for m, v in out.items() if v}

    def commutator(self, x: dict, k: int) -> dict:
        """[x, e_k] for even x."""
        left = self.mul_gen(x, k)
        right = self.mul({(k,): Fraction(1)}, x)
        return self.add(left, right, -1)

    def casimir(self) -> dict:
        om = self.L.omega
        d = self.L.dim
        out: dict = {}
        for i in range(d):
            for j in range(d):
                if om[i][j]:
                    out = self.add(out, {m: v * om[i][j] for m, v in self.word((i, j)).items()})
        return out


@lru_cache(maxsize=None)
def uea(L: LieSuperAlgebraData) -> UEA:
    return UEA(L)


def wilson_close(t: MultiTensor) -> dict:
    """Multiply the tensor slots in order inside U(L), PBW-normalized."""
    U = uea(t.algebra)
    out: dict = {}
    for word, v in t.entries.items():
        for m, c in U._word(word):
            out[m] = out.get(m, 0) + v * c
    return {m: v for m, v in out.items() if v}


# ---------------------------------------------------------------- center


class NotCentral(ValueError):
    pass


@dataclass(frozen=True)
class CenterPolynomial:
    """Polynomial in the Casimir c (and h for gl(1|1)); terms map
    exponent tuples ``(c_exp,)`` or ``(h_exp, c_exp)`` to Fractions."""

    variables: tuple
    terms: tuple  # sorted ((exps, coeff), ...)

    @classmethod
    def make(cls, variables, terms: dict) -> "CenterPolynomial":
        return cls(tuple(variables), tuple(sorted((tuple(k), Fraction(v)) for k, v in terms.items() if v)))

    @classmethod
    def zero(cls, variables=("c",)):
        return cls(tuple(variables), ())

    @classmethod
    def c_poly(cls, coeffs: dict) -> "CenterPolynomial":
        """From ``{power: coeff}`` in the single variable c."""
        return cls.make(("c",), {(k,): v for k, v in coeffs.items()})

    @property
    def as_dict(self) -> dict:
        return dict(self.terms)

    def coeff(self, *exps) -> Fraction:
        return self.as_dict.get(tuple(exps), Fraction(0))

    def degree(self, var: str = "c") -> int:
        i = self.variables.index(var)
        return max((k[i] for k, _ in self.terms), default=-1)

    def leading(self, var: str = "c") -> Fraction:
        """Coefficient of the highest power of ``var`` (single-variable use)."""
        deg = self.degree(var)
        i = self.variables.index(var)
        return sum((v for k, v in self.terms if k[i] == deg), Fraction(0))

    def __bool__(self):
        return bool(self.terms)

    def _combine(self, other, s):
        if self.variables != other.variables:
            raise ValueError("variable mismatch")
        t = self.as_dict
        for k, v in other.terms:
            t[k] = t.get(k, 0) + s * v
        return CenterPolynomial.make(self.variables, t)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self * -1

    def __mul__(self, other):
        if isinstance(other, CenterPolynomial):
            if self.variables != other.variables:
                raise ValueError("variable mismatch")
            t: dict = {}
            for k1, v1 in self.terms:
                for k2, v2 in other.terms:
                    k = tuple(a + b for a, b in zip(k1, k2))
                    t[k] = t.get(k, 0) + v1 * v2
            return CenterPolynomial.make(self.variables, t)
        s = Fraction(other)
        return CenterPolynomial.make(self.variables, {k: v * s for k, v in self.terms})

    __rmul__ = __mul__

    def __call__(self, **values):
        return sum(
            (v * np.prod([Fraction(values[n]) ** e for n, e in zip(self.variables, k)]) for k, v in self.terms),
            Fraction(0),
        )

    def to_json_dict(self) -> dict:
        out = {}
        for k, v in sorted(self.terms, key=lambda kv: tuple(-e for e in kv[0])):
            name = "*".join(
                (n if e == 1 else f"{n}^{e}") for n, e in zip(self.variables, k) if e
            ) or "1"
            out[name] = f"{v.numerator}/{v.denominator}"
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, v in sorted(self.terms, key=lambda kv: tuple(-e for e in kv[0])):
            mono = "*".join((n if e == 1 else f"{n}^{e}") for n, e in zip(self.variables, k) if e)
            if not mono:
                parts.append(str(v))
            elif v == 1:
                parts.append(mono)
            elif v == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{v}*{mono}" if v.denominator != 1 else f"{v}{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _variables(L: LieSuperAlgebraData):
    return ("h", "c") if L.parity.count(1) else ("c",)


@lru_cache(maxsize=None)
def _center_table(L: LieSuperAlgebraData, degree: int):
    """Echelon over PBW images of the center monomials of degree <= degree."""
    from .echelon import Echelon

    U = uea(L)
    c = U.casimir()
    hv = {(0,): Fraction(1)}
    ech = Echelon(track=True)
    cp = [{(): Fraction(1)}]
    for _ in range(degree // 2):
        cp.append(U.mul(cp[-1], c))
    if _variables(L) == ("c",):
        for b, x in enumerate(cp):
            ech.add(x, tag=(b,))
    else:
        hp = [{(): Fraction(1)}]
        for _ in range(degree):
            hp.append(U.mul(hp[-1], hv))
        for a in range(degree + 1):
            for b in range((degree - a) // 2 + 1):
                ech.add(U.mul(hp[a], cp[b]), tag=(a, b))
    return ech


def center_poly(u: dict, L: LieSuperAlgebraData) -> CenterPolynomial:
    """Express a central PBW element through c (and h)."""
    degree = max((len(m) for m in u), default=0)
    combo = _center_table(L, degree).solve(u)
    if combo is None:
        raise NotCentral("element is not in the span of the center monomials")
    return CenterPolynomial.make(_variables(L), combo)


def universal(d: FeynmanDiagram, L: LieSuperAlgebraData, cut: int = 0, seed: int | None = None) -> CenterPolynomial:
    """contract, close along the Wilson line and read off the center polynomial."""
    if d.n_legs == 0:
        return CenterPolynomial.make(_variables(L), {(0,) * len(_variables(L)): 1})
    return center_poly(wilson_close(contract(d, L, cut=cut, seed=seed)), L)
