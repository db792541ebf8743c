"""Weight-system level check that the diagonal of the sl2 series inverts
the Conway series.

Concretely, the diagonal part W of the deframed sl2 series
(``tilde_v``) is the convolution inverse of the Conway weight system.
Both series are multiplicative, so it is enough to check:

* triangularity: deg_c of the deframed sl2 value of a primitive of order n
  is at most n/2, so W only sees the top coefficient;
* diagonal: W(F) + C(F) = 0 for every primitive basis element F.

The remaining checks cover the wheel values and the leg filtration of the
primitive space that the argument relies on, plus a battery of relation
and algebra identities.  ``run_all`` gathers everything into an
:class:`MMReport`.
"""

from __future__ import annotations

import json
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .diagrams import canonicalize, enumerate_chord_diagrams, from_key, wheel
from .lie_tensor import CenterPolynomial, gl11, sl2, validate
from .span_reduce import (
    FOUR_T_SIGNS,
    LinearCombination,
    SpaceSpec,
    basis,
    feynman_diagrams,
    in_span,
    normal_form,
    relations,
    stu_resolve,
)
from .weight_systems import (
    SL2_RULES,
    Sl2Rules,
    VassilievSeries,
    conway_series,
    deframed_sl2,
    epsilon,
    eval_conway,
    eval_gl11,
    eval_sl2,
    mm_coefficients,
    series_product,
    tilde_v,
    verify_conway_relations,
)

__all__ = [
    "CheckResult",
    "MMReport",
    "CHECKS",
    "verify_triangular",
    "verify_diagonal",
    "verify_wheels",
    "verify_filtration",
    "verify_convolution",
    "verify_relation_suite",
    "run_all",
]

DEFAULT_MAX_ORDER = 5


@dataclass
class CheckResult:
    name: str
    witnesses: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self, include_timings: bool = False) -> dict:
        out = {"name": self.name, "status": self.status, "witnesses": self.witnesses}
        if self.failures:
            out["failures"] = self.failures
        if self.notes:
            out["notes"] = self.notes
        if include_timings:
            out["seconds"] = round(self.seconds, 3)
        return out


def _versions() -> dict:
    import numpy

    from . import __version__

    return {"wsforge": __version__, "python": platform.python_version(), "numpy": numpy.__version__}


@dataclass
class MMReport:
    max_order: int
    checks: list
    versions: dict = field(default_factory=_versions)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self, include_timings: bool = False) -> str:
        """Stable JSON; timings are left out unless asked for so that two
        runs produce identical bytes."""
        return json.dumps(
            {
                "max_order": self.max_order,
                "status": "pass" if self.passed else "fail",
                "checks": [c.to_dict(include_timings) for c in self.checks],
                "versions": self.versions,
            },
            indent=1,
            ensure_ascii=False,
        )


def _timed(fn):
    def run(*args, **kwargs):
        t = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t
        return res

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


def _primitives(n: int, signs):
    return basis(SpaceSpec("P", n), signs=signs).representatives


# ---------------------------------------------------------------- checks


@_timed
def verify_triangular(max_order: int, rules: Sl2Rules = SL2_RULES, signs=FOUR_T_SIGNS) -> CheckResult:
    """deg_c of the deframed sl2 value is at most n/2 on every primitive
    basis element of order 1..max_order."""
    res = CheckResult("triangularity")
    res.notes["reduction"] = (
        "both series are multiplicative and A is generated by primitives, "
        "so the bound on a primitive basis implies w_in = 0 for i > n"
    )
    for n in range(1, max_order + 1):
        for k in _primitives(n, signs):
            p = deframed_sl2(from_key(k), rules)
            wd = max(mm_coefficients(from_key(k), rules), default=0)
            w = {"order": n, "diagram": k, "value": str(p), "degree": p.degree(), "d_degree": wd}
            (res.witnesses if 2 * max(p.degree(), 0) <= n and wd <= n else res.failures).append(w)
    return res


@_timed
def verify_diagonal(max_order: int, rules: Sl2Rules = SL2_RULES, signs=FOUR_T_SIGNS) -> CheckResult:
    """tilde_v(F) + C(F) = 0 for primitive basis elements of order >= 2."""
    res = CheckResult("diagonal")
    res.notes["low_orders"] = "orders 0 and 1 hold trivially"
    for n in range(2, max_order + 1):
        for k in _primitives(n, signs):
            d = from_key(k)
            tv, cv = tilde_v(d, rules=rules), eval_conway(d)
            w = {"order": n, "diagram": k, "tilde_v": str(tv), "conway": str(cv)}
            (res.witnesses if tv + cv == 0 else res.failures).append(w)
    return res


def _wheel_checks(max_n: int, rules: Sl2Rules):
    sl, cw = CheckResult("wheels_sl2"), CheckResult("wheels_conway")
    for n in range(2, max_n + 1):
        d = wheel(n)
        key = canonicalize(d).key
        if n % 2 == 0:
            k = n // 2
            v = eval_sl2(d, rules)
            ok = v.degree() == k and v.coeff(k) == 2 ** (k + 1)
            if n == 2:
                ok = ok and v == CenterPolynomial.c_poly({1: 4})
            w = {"n": n, "diagram": key, "value": str(v), "leading": str(v.coeff(k))}
            (sl.witnesses if ok else sl.failures).append(w)
        c = eval_conway(d)
        want = -2 if n % 2 == 0 else 0
        w = {"n": n, "diagram": key, "value": str(c), "expected": want}
        (cw.witnesses if c == want else cw.failures).append(w)
    return sl, cw


def verify_wheels(max_n: int, rules: Sl2Rules = SL2_RULES) -> CheckResult:
    """Leading sl2 coefficients 2^{k+1} c^k of w_2k (with V(w_2) = 4c) and
    Conway values -2 / 0 for even / odd wheels, n = 2..max_n."""
    t = time.perf_counter()
    sl, cw = _wheel_checks(max_n, rules)
    res = CheckResult("wheels", sl.witnesses + cw.witnesses, sl.failures + cw.failures)
    res.seconds = time.perf_counter() - t
    return res


@_timed
def verify_filtration(max_order: int, signs=FOUR_T_SIGNS) -> CheckResult:
    """Leg filtration of the primitive space, spanned by all connected
    diagrams: ranks are constant from l = n on, the jump at l = n is at
    most 1, and when it is 1 the wheel with n spokes accounts for it."""
    res = CheckResult("filtration")
    nonzero = {}
    for n in range(2, max_order + 1):
        ranks = [basis(SpaceSpec("P_connected", n, l), signs=signs).dim for l in range(0, n + 2)]
        # a connected diagram of order n has at most n + 1 legs
        prim = basis(SpaceSpec("P", n), signs=signs).dim
        jump = ranks[n] - ranks[n - 1]
        w = {"order": n, "ranks": ranks[1:], "dim": prim, "jump": jump}
        ok = ranks[n] == ranks[n + 1] == prim and jump <= 1
        if jump == 1:
            below = basis(SpaceSpec("P_connected", n, n - 1), signs=signs)
            at = basis(SpaceSpec("P_connected", n, n), signs=signs)
            gen = in_span(wheel(n), at) and not in_span(wheel(n), below)
            w["wheel_generates"] = gen
            ok = ok and gen
        nonzero[n] = jump == 1
        (res.witnesses if ok else res.failures).append(w)
    res.notes["top_quotient_nonzero"] = {str(n): v for n, v in nonzero.items()}
    res.notes["nonzero_exactly_for_even_n"] = all(v == (n % 2 == 0) for n, v in nonzero.items())
    return res


@_timed
def verify_convolution(max_order: int, rules: Sl2Rules = SL2_RULES) -> CheckResult:
    """(W * C)(D) = epsilon(D) on every chord diagram, W = tilde_v."""
    res = CheckResult("convolution")
    w = VassilievSeries("tilde_v", lambda d: tilde_v(d, rules=rules), True)
    prod = series_product(w, conway_series())
    eps = epsilon()
    for n in range(0, max_order + 1):
        for k in enumerate_chord_diagrams(n):
            d = from_key(k)
            got, want = prod.evaluator(d), eps.evaluator(d)
            rec = {"order": n, "diagram": k, "value": str(got)}
            (res.witnesses if got == want else res.failures).append(rec)
    return res


def _suite_part(res: CheckResult, part: str, key, ok: bool, **extra):
    rec = {"part": part, "diagram": key, **{k: str(v) for k, v in extra.items()}}
    (res.witnesses if ok else res.failures).append(rec)


def _vertex_flip(d, k):
    verts = list(d.vertices)
    a, b, c = verts[k]
    verts[k] = (a, c, b)
    return type(d)(d.legs, tuple(verts), d.partner)


def _ihx_variant(d, a0, b0, word):
    loc = d.location
    ku, kv = loc[a0][0], loc[b0][0]
    u, v = d.vertices[ku], d.vertices[kv]
    i, j = u.index(a0), v.index(b0)
    slot = {"a": u[(i + 1) % 3], "b": u[(i + 2) % 3], "c": v[(j + 1) % 3], "d": v[(j + 2) % 3]}
    p, q, r, s = (slot[x] for x in word)
    verts = list(d.vertices)
    verts[ku], verts[kv] = (a0, p, q), (b0, r, s)
    return type(d)(d.legs, tuple(verts), d.partner)


def _feynman(n):
    for level in feynman_diagrams(n):
        for k in level:
            yield k


@_timed
def verify_relation_suite(
    max_order: int,
    rules: Sl2Rules = SL2_RULES,
    signs=FOUR_T_SIGNS,
    iv_coeff=Fraction(1, 2),
) -> CheckResult:
    """STU resolution-order independence, AS and IHX, 4T/1T vanishing
    under both weight systems, the four Conway local relations, and the
    Lie (super)algebra identities."""
    res = CheckResult("relation_suite")
    for n in range(1, max_order + 1):
        amb = basis(SpaceSpec("A", n), signs=signs)
        for k in _feynman(n):
            d = from_key(k)
            if d.is_chord_diagram():
                continue
            a = normal_form(stu_resolve(d, "least"), amb)
            b = normal_form(stu_resolve(d, "greatest"), amb)
            _suite_part(res, "stu_order", k, a == b)
            for v in range(d.n_trivalent):
                f = _vertex_flip(d, v)
                lc = LinearCombination.of(d) + LinearCombination.of(f)
                _suite_part(res, "AS", k, not lc and eval_sl2(f, rules) == -eval_sl2(d, rules), vertex=v)
            loc = d.location
            for a0, b0 in d.edges():
                ku, kv = loc[a0][0], loc[b0][0]
                if ku < 0 or kv < 0 or ku == kv or a0 > b0:
                    continue
                lc = (
                    LinearCombination.of(_ihx_variant(d, a0, b0, "abcd"))
                    - LinearCombination.of(_ihx_variant(d, a0, b0, "acbd"))
                    + LinearCombination.of(_ihx_variant(d, a0, b0, "adbc"))
                )
                _suite_part(res, "IHX", k, not any(normal_form(lc, amb)), edge=(a0, b0))
        for i, r in enumerate(relations("4T", n, signs)):
            s, c = eval_sl2(r, rules), eval_conway(r)
            _suite_part(res, "4T", i, not s and c == 0, order=n, sl2=s, conway=c)
        for i, r in enumerate(relations("1T", n)):
            s, c = deframed_sl2(r, rules), eval_conway(r)
            _suite_part(res, "1T", i, not s and c == 0, order=n, sl2=s, conway=c)
    rep = verify_conway_relations(max_order, iv_coeff)
    for rel, data in rep.items():
        for key in data["verified"]:
            _suite_part(res, f"conway_{rel}", key, True)
        for f in data["failures"]:
            _suite_part(res, f"conway_{rel}", f["diagram"], False, lhs=f["lhs"], rhs=f["rhs"])
    for alg in (sl2(), gl11()):
        vr = validate(alg)
        for name, failing in vr.checks.items():
            _suite_part(res, f"algebra_{alg.name}", name, not failing, failing=len(failing))
    bub = eval_gl11(wheel(2))
    _suite_part(res, "gl11_bubble", canonicalize(wheel(2)).key, str(bub) == "-2h^2", value=bub)
    return res


CHECKS = ("triangular", "diagonal", "wheels", "filtration", "convolution", "relations")


def run_all(
    max_order: int = DEFAULT_MAX_ORDER,
    rules: Sl2Rules = SL2_RULES,
    signs=FOUR_T_SIGNS,
    iv_coeff=Fraction(1, 2),
    checks=CHECKS,
    threads: int = 1,
) -> MMReport:
    """Run the selected checks and assemble the report in a fixed order.

    The diagonal convolution is also expanded directly on chord diagrams
    of order <= 3 as an independent confirmation.
    """
    signs = tuple(signs)
    table = {
        "triangular": lambda: [verify_triangular(max_order, rules, signs)],
        "diagonal": lambda: [verify_diagonal(max_order, rules, signs)],
        "wheels": lambda: _timed_wheels(max_order, rules),
        "filtration": lambda: [verify_filtration(max_order, signs)],
        "convolution": lambda: [verify_convolution(min(max_order, 3), rules)],
        "relations": lambda: [verify_relation_suite(max_order, rules, signs, iv_coeff)],
    }
    for c in checks:
        if c not in table:
            raise ValueError(f"unknown check {c!r}")
    jobs = [(c, table[c]) for c in checks]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda job: _safe(*job), jobs))
    else:
        parts = [_safe(*job) for job in jobs]
    return MMReport(max_order, [r for part in parts for r in part])


def _timed_wheels(max_n, rules):
    t = time.perf_counter()
    sl, cw = _wheel_checks(max_n, rules)
    sl.seconds = cw.seconds = (time.perf_counter() - t) / 2
    return [sl, cw]


def _safe(name, task):
    """Run a check; an exception becomes a failed check instead of a crash."""
    try:
        return task()
    except Exception as exc:  # noqa: BLE001
        return [CheckResult(name, failures=[{"error": f"{type(exc).__name__}: {exc}"}])]
