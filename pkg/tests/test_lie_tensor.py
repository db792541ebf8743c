import json
from fractions import Fraction

import numpy as np
import pytest

from wsforge.diagrams import chord_diagram, connected_sum, from_key, theta, wheel
from wsforge.lie_tensor import (
    CenterPolynomial,
    NotCentral,
    center_poly,
    contract,
    gl11,
    sl2,
    uea,
    universal,
    validate,
    wilson_close,
)
from wsforge.span_reduce import feynman_diagrams


def e(i):
    return {i: Fraction(1)}


def _diagrams(max_order):
    for n in range(1, max_order + 1):
        for level in feynman_diagrams(n):
            for k in level:
                yield from_key(k)


# ---------------------------------------------------------------- algebra data


def test_sl2_data():
    L = sl2()
    h, E, F = (L.index(x) for x in "hef")
    assert L.form(e(E), e(F)) == 1 and L.form(e(h), e(h)) == 2
    assert L.bracket_vec(e(E), e(F)) == e(h)
    assert L.bracket_vec(e(h), e(E)) == {E: 2}


def test_gl11_data():
    L = gl11()
    h = L.index("h")
    assert L.form(e(h), e(h)) == 0
    assert L.parity.count(1) == 2 and L.parity[h] == 0
    for x in range(L.dim):
        assert L.bracket_vec(e(h), e(x)) == {}


@pytest.mark.parametrize("L", [sl2(), gl11()], ids=["sl2", "gl11"])
def test_validate_passes(L):
    rep = validate(L)
    assert rep.ok, {k: v[:3] for k, v in rep.checks.items() if v}


def test_named_identities_are_checked():
    assert "lagrange" in validate(sl2()).checks
    assert "depth3_solvable" in validate(gl11()).checks


def test_scaled_metric_breaks_lagrange_only():
    rep = validate(sl2().scaled(2))
    assert rep.passed("invariance") and rep.passed("jacobi")
    assert not rep.passed("lagrange")


def test_algebra_json():
    data = json.loads(gl11().to_json())
    assert data["parity"] == [0, 0, 1, 1]
    assert set(data) == {"name", "basis", "parity", "metric", "structure"}


# ---------------------------------------------------------------- contraction


def casimir_tensor(L):
    om = L.omega
    return {(i, j): om[i][j] for i in range(L.dim) for j in range(L.dim) if om[i][j]}


@pytest.mark.parametrize("L", [sl2(), gl11()], ids=["sl2", "gl11"])
def test_chord_gives_casimir_tensor(L):
    assert contract(theta(), L).entries == casimir_tensor(L)


def test_bubble_is_four_chords_for_sl2():
    L = sl2()
    assert contract(wheel(2), L) == contract(theta(), L) * 4


def test_bubble_is_minus_two_h_squared_for_gl11():
    L = gl11()
    h = L.index("h")
    assert contract(wheel(2), L).entries == {(h, h): -2}
    assert str(universal(wheel(2), L)) == "-2h^2"


def test_to_array():
    arr = contract(theta(), sl2()).to_array()
    assert arr.shape == (3, 3) and arr.dtype == object
    assert arr[1, 2] == 1 and np.count_nonzero(arr != 0) == 3


@pytest.mark.parametrize("L", [sl2(), gl11()], ids=["sl2", "gl11"])
def test_invariance_under_the_algebra(L):
    for d in _diagrams(3):
        t = contract(d, L)
        for x in range(L.dim):
            assert not t.act(x).entries


@pytest.mark.parametrize("L", [sl2(), gl11()], ids=["sl2", "gl11"])
def test_schedule_independence(L):
    for d in (wheel(3), wheel(4), from_key(feynman_diagrams(3)[2][5])):
        ref = contract(d, L)
        for seed in range(50):
            assert contract(d, L, seed=seed) == ref


@pytest.mark.parametrize("L", [sl2(), gl11()], ids=["sl2", "gl11"])
def test_cut_independence(L):
    for d in _diagrams(3):
        vals = {universal(d, L, cut=c) for c in range(max(d.n_legs, 1))}
        assert len(vals) == 1


# ---------------------------------------------------------------- enveloping algebra and center


def test_casimir_is_central():
    U = uea(sl2())
    c = U.casimir()
    for k in range(3):
        assert U.commutator(c, k) == {}


def test_center_round_trip():
    U = uea(sl2())
    c = U.casimir()
    assert center_poly(U.mul(c, c), sl2()) == CenterPolynomial.c_poly({2: 1})


def test_theta_closes_to_casimir():
    L = sl2()
    assert wilson_close(contract(theta(), L)) == uea(L).casimir()


def test_multiplicativity_on_theta_squared():
    assert universal(connected_sum(theta(), theta()), sl2()) == CenterPolynomial.c_poly({2: 1})


def test_non_central_element_is_rejected():
    with pytest.raises(NotCentral):
        center_poly({(1,): Fraction(1)}, sl2())


def test_degree_bound():
    for d in _diagrams(3):
        assert universal(d, sl2()).degree() <= d.n_legs // 2


def test_gl11_values_are_polynomials_in_h_and_c():
    L = gl11()
    for d in _diagrams(3):
        assert universal(d, L).variables == ("h", "c")


# ---------------------------------------------------------------- polynomials


def test_center_polynomial_formatting():
    p = CenterPolynomial.c_poly({3: 16, 2: 48, 1: -64})
    assert str(p) == "16c^3 + 48c^2 - 64c"
    assert p.to_json_dict() == {"c^3": "16/1", "c^2": "48/1", "c": "-64/1"}
    assert p.degree() == 3 and p.leading() == 16
    assert p(c=1) == 0
    assert str(CenterPolynomial.zero()) == "0"


def test_center_polynomial_arithmetic():
    c = CenterPolynomial.c_poly({1: 1})
    one = CenterPolynomial.c_poly({0: 1})
    assert (c + one) * (c - one) == c * c - one
    assert -c + c == CenterPolynomial.zero()
    assert c * Fraction(1, 2) == CenterPolynomial.c_poly({1: Fraction(1, 2)})


def test_chord_diagram_values_match_known_small_cases():
    # one chord: c; two parallel chords: c^2; two crossing chords: c^2 - 2c
    L = sl2()
    assert str(universal(theta(), L)) == "c"
    assert str(universal(chord_diagram([(0, 1), (2, 3)]), L)) == "c^2"
    assert universal(chord_diagram([(0, 2), (1, 3)]), L) == CenterPolynomial.c_poly({2: 1, 1: -2})
