from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from wsforge.echelon import Echelon

small = st.integers(-3, 3)
rows_st = st.lists(st.lists(small, min_size=5, max_size=5), min_size=1, max_size=7)


def as_vec(row):
    return {i: Fraction(v) for i, v in enumerate(row) if v}


@settings(max_examples=80, deadline=None)
@given(rows_st)
def test_rank_matches_sympy(rows):
    want = sympy.Matrix(rows).rank()
    for pivot in ("last", "first", "markowitz"):
        e = Echelon(pivot=pivot)
        for r in rows:
            e.add(as_vec(r))
        assert len(e) == want


@settings(max_examples=60, deadline=None)
@given(rows_st, st.lists(small, min_size=len(range(7)), max_size=7))
def test_solve_reconstructs_combinations(rows, coeffs):
    e = Echelon(track=True)
    for i, r in enumerate(rows):
        e.add(as_vec(r), tag=i)
    target = {}
    for c, r in zip(coeffs, rows):
        for j, v in as_vec(r).items():
            target[j] = target.get(j, 0) + c * v
    combo = e.solve(target)
    assert combo is not None
    got = {}
    for i, c in combo.items():
        for j, v in as_vec(rows[i]).items():
            got[j] = got.get(j, 0) + c * v
    assert {k: v for k, v in got.items() if v} == {k: v for k, v in target.items() if v}


def test_rows_are_fully_reduced():
    e = Echelon()
    for r in ([1, 2, 0], [0, 1, 1], [1, 0, 5]):
        e.add(as_vec(r))
    for piv, row in e.rows.items():
        assert row[piv] == 1
        assert all(piv not in other for p, other in e.rows.items() if p != piv)


def test_outside_span():
    e = Echelon(track=True)
    e.add({0: Fraction(1)}, tag=0)
    assert e.solve({1: Fraction(1)}) is None
    assert not e.contains({1: Fraction(2)})


def test_bad_pivot_and_untracked_solve():
    with pytest.raises(ValueError):
        Echelon(pivot="middle")
    with pytest.raises(ValueError):
        Echelon().solve({0: 1})
