import json
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from wsforge.diagrams import ResourceLimitError, enumerate_chord_diagrams, canonicalize, chord_diagram, from_key, parse, theta, wheel
from wsforge.span_reduce import (
    FOUR_T_SIGNS,
    LinearCombination,
    NotInSpan,
    OrderMismatch,
    SpaceSpec,
    basis,
    connected_diagrams,
    feynman_diagrams,
    in_span,
    load_basis,
    normal_form,
    relations,
    save_basis,
    stu_resolve,
    stu_step,
)

# ---------------------------------------------------------------- independent oracle


def _canon_word(word):
    """Rotation-minimal relabelled form of a circular chord word."""
    m = len(word)
    best = None
    for r in range(m):
        rot = word[r:] + word[:r]
        names, out = {}, []
        for c in rot:
            names.setdefault(c, len(names))
            out.append(names[c])
        t = tuple(out)
        best = t if best is None or t < best else best
    return best


def _words(n):
    out = set()

    def rec(word, free):
        if not free:
            out.add(_canon_word(word))
            return
        i = free[0]
        for j in free[1:]:
            w = list(word)
            w[i] = w[j] = len([x for x in word if x is not None]) // 2
            rec(w, [k for k in free if k not in (i, j)])

    rec([None] * (2 * n), list(range(2 * n)))
    return sorted(out)


def oracle_dims(n, one_term=False):
    """dim A_n (or Abar_n) from 4T relations generated by sliding a free
    chord end past both ends of another chord, ranked with sympy."""
    words = _words(n)
    index = {w: i for i, w in enumerate(words)}
    rows = []
    base = [w for w in _words(n - 1)] if n > 1 else [()]
    for w in base:
        m = len(w)
        for g in range(m + 1):
            # fixed end of the new chord 'X' sits in gap g of the linear word
            lin = list(w[:g]) + ["X"] + list(w[g:])
            for a in set(w):
                row = [0] * len(words)
                for e in [i for i, c in enumerate(lin) if c == a]:
                    for off, sgn in ((0, 1), (1, -1)):
                        z = lin[: e + off] + ["X"] + lin[e + off :]
                        row[index[_canon_word(z)]] += sgn
                if any(row):
                    rows.append(row)
    if one_term:
        for w, i in index.items():
            m = len(w)
            if any(w[k] == w[(k + 1) % m] for k in range(m)):
                row = [0] * len(words)
                row[i] = 1
                rows.append(row)
    rank = sympy.Matrix(rows).rank() if rows else 0
    return len(words) - rank


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_dims_agree_with_independent_oracle(n):
    assert basis(SpaceSpec("A", n)).dim == oracle_dims(n)
    assert basis(SpaceSpec("Abar", n)).dim == oracle_dims(n, one_term=True)


def test_abar_dims():
    assert [basis(SpaceSpec("Abar", n)).dim for n in range(6)] == [1, 0, 1, 1, 3, 4]


def test_a_dims_compose_from_abar():
    # A = Abar[Theta]: dim A_n = sum_k dim Abar_k
    abar = [basis(SpaceSpec("Abar", n)).dim for n in range(6)]
    assert [basis(SpaceSpec("A", n)).dim for n in range(6)] == [sum(abar[: n + 1]) for n in range(6)]


def test_primitive_dims():
    assert [basis(SpaceSpec("P", n)).dim for n in range(1, 6)] == [1, 1, 1, 2, 3]


@pytest.mark.parametrize("n", [3, 4, 5])
def test_pivot_strategies_agree(n):
    dims = {basis(SpaceSpec("Abar", n), pivot=p, reverse=r).dim for p in ("last", "first", "markowitz") for r in (False, True)}
    assert len(dims) == 1


# ---------------------------------------------------------------- relations


def test_relation_edge_cases():
    assert relations("4T", 1) == []
    one_t = relations("1T", 1)
    assert len(one_t) == 1 and one_t[0] == LinearCombination.of(theta())
    with pytest.raises(ValueError):
        relations("5T", 2)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_relations_vanish_in_normal_form(n):
    b = basis(SpaceSpec("A", n))
    for r in relations("4T", n):
        assert not any(normal_form(r, b))
    bb = basis(SpaceSpec("Abar", n))
    for r in relations("1T", n):
        assert not any(normal_form(r, bb))


def test_mutated_four_term_changes_the_quotient():
    bad = (1, -1, 1, 1)
    assert basis(SpaceSpec("A", 3), signs=bad).dim != basis(SpaceSpec("A", 3)).dim
    assert FOUR_T_SIGNS == (1, -1, 1, -1)


# ---------------------------------------------------------------- linear combinations


def test_sign_handling():
    w = wheel(3)
    flipped = parse(w.to_text())
    v = list(flipped.vertices)
    v[0] = (v[0][0], v[0][2], v[0][1])
    flipped = type(w)(w.legs, tuple(v), w.partner)
    assert LinearCombination.of(w) + LinearCombination.of(flipped) == LinearCombination()
    zero = parse("FD n=1; legs=[0]; vertex=(1,2,3); edges=(0 1)(2 3)")
    assert not LinearCombination.of(zero)


def test_json_round_trip():
    x = LinearCombination.of(wheel(2), Fraction(3, 4)) - LinearCombination.of(chord_diagram([(0, 2), (1, 3)]))
    text = x.to_json()
    data = json.loads(text)
    # wheel(2) has canonical sign -1, so its coefficient flips
    assert data["order"] == 2
    assert sorted(t["coeff"] for t in data["terms"]) == ["-1/1", "-3/4"]
    assert LinearCombination.from_json(text) == x


def test_mixed_orders():
    x = LinearCombination.of(theta()) + LinearCombination.of(wheel(2))
    assert x.orders == {1, 2}
    with pytest.raises(OrderMismatch):
        x.order
    assert LinearCombination().order is None


# ---------------------------------------------------------------- STU


def test_stu_on_chord_diagram_is_identity():
    d = chord_diagram([(0, 2), (1, 3)])
    assert stu_resolve(d) == LinearCombination.of(d)


def test_stu_step_on_tripod():
    d = parse("FD n=3; legs=[0,1,2,3,4]; vertex=(5,6,7); edges=(0 1)(2 5)(3 6)(4 7)")
    par, cross = stu_step(d, 2)
    assert par.is_chord_diagram() and cross.is_chord_diagram()
    assert len(stu_resolve(d)) <= 2


def test_stu_policy_independence_wheel2():
    b = basis(SpaceSpec("A", 2))
    assert normal_form(stu_resolve(wheel(2), "least"), b) == normal_form(stu_resolve(wheel(2), "greatest"), b)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10**6))
def test_stu_policy_independence_random(n, seed):
    rng = random.Random(seed)
    keys = list(connected_diagrams(n, None, hanging=True))
    k = rng.choice(keys)
    b = basis(SpaceSpec("A", n))
    assert normal_form(stu_resolve(from_key(k), "least"), b) == normal_form(stu_resolve(from_key(k), "greatest"), b)


def test_odd_automorphism_vanishes_in_normal_form():
    d = parse("FD n=2; legs=[0,1,2]; vertex=(3,4,5); edges=(0 1)(2 3)(4 5)")
    assert canonicalize(d).sign == 0
    assert not any(normal_form(LinearCombination.of(d), basis(SpaceSpec("A", 2))))


# ---------------------------------------------------------------- normal forms and spans


def test_theta_dies_in_abar():
    assert normal_form(theta(), basis(SpaceSpec("Abar", 1))) == []
    assert normal_form(theta(), basis(SpaceSpec("A", 1))) == [1]


def test_order_mismatch():
    with pytest.raises(OrderMismatch):
        normal_form(theta(), basis(SpaceSpec("A", 2)))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=18, max_size=18), st.lists(st.integers(-3, 3), min_size=18, max_size=18))
def test_normal_form_is_linear(cx, cy):
    keys = enumerate_chord_diagrams(4)
    b = basis(SpaceSpec("A", 4))
    x = LinearCombination({k: c for k, c in zip(keys, cx)})
    y = LinearCombination({k: c for k, c in zip(keys, cy)})
    zero = [0] * b.dim
    nx = normal_form(x, b) if x else zero
    ny = normal_form(y, b) if y else zero
    nxy = normal_form(x + y, b) if x + y else zero
    assert nxy == [a + c for a, c in zip(nx, ny)]


def test_filtered_spaces():
    a4 = basis(SpaceSpec("A", 4)).dim
    assert basis(SpaceSpec("A_filtered", 4, 8)).dim == a4
    assert basis(SpaceSpec("A_filtered", 2, 0)).dim == 0
    p = basis(SpaceSpec("P_filtered", 4, 3))
    assert p.dim == 1
    assert not in_span(wheel(4), p)
    with pytest.raises(NotInSpan):
        normal_form(wheel(4), p)


def test_space_spec_validation():
    with pytest.raises(ValueError):
        SpaceSpec("B", 2)
    with pytest.raises(ValueError):
        SpaceSpec("A", -1)
    with pytest.raises(ValueError):
        SpaceSpec("P_filtered", 2)


def test_cap():
    with pytest.raises(ResourceLimitError):
        basis(SpaceSpec("A", 7))
    with pytest.raises(ResourceLimitError):
        basis(SpaceSpec("A", 3), cap=2)


def test_feynman_enumeration_levels():
    levels = feynman_diagrams(2)
    assert [len(x) for x in levels][0] == 2  # two chord diagrams of order 2


def test_cache_round_trip(tmp_path):
    b = basis(SpaceSpec("P_filtered", 4, 3))
    path = save_basis(b, tmp_path)
    assert path.name == "P_filtered_n4_l3.json"
    rec = load_basis(SpaceSpec("P_filtered", 4, 3), tmp_path)
    assert rec == {"space": "P_filtered", "order": 4, "legs_cap": 3, "representatives": list(b.representatives), "relation_rank": b.relation_rank}
    assert load_basis(SpaceSpec("A", 2), tmp_path) is None
