import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURES
from wsforge.diagrams import (
    DiagramError,
    ResourceLimitError,
    analyze,
    canonicalize,
    chord_diagram,
    chord_splits,
    connected_sum,
    construct,
    empty,
    enumerate_chord_diagrams,
    feynman,
    find_hanging_tree,
    from_key,
    parse,
    parse_file,
    theta,
    wheel,
)


def relabel(d, rng):
    """Same diagram with shuffled half-edge names."""
    h = d.n_half_edges
    perm = list(range(h))
    rng.shuffle(perm)
    legs = [perm[x] for x in d.legs]
    verts = [tuple(perm[x] for x in v) for v in d.vertices]
    edges = [(perm[a], perm[b]) for a, b in d.edges()]
    return feynman(legs, verts, edges)


def rotate_vertices(d, rng):
    verts = []
    for v in d.vertices:
        k = rng.randrange(3)
        verts.append(v[k:] + v[:k])
    return feynman(list(d.legs), verts, d.edges())


def brute_force_circle_count(n):
    """Perfect matchings of 2n points on a circle up to rotation."""
    seen = set()
    pts = list(range(2 * n))

    def matchings(rest):
        if not rest:
            yield []
            return
        a = rest[0]
        for i in range(1, len(rest)):
            for m in matchings(rest[1:i] + rest[i + 1 :]):
                yield [(a, rest[i])] + m

    for m in matchings(pts):
        word = [0] * (2 * n)
        for a, b in m:
            word[a] = b - a
            word[b] = a - b + 2 * n
        forms = []
        for r in range(2 * n):
            forms.append(tuple(word[(r + i) % (2 * n)] % (2 * n) for i in range(2 * n)))
        seen.add(min(forms))
    return len(seen)


def test_theta_and_empty():
    assert theta().order == 1 and theta().is_chord_diagram()
    assert empty().order == 0 and empty().n_half_edges == 0


def test_wheel_shape():
    w = wheel(4)
    assert (w.n_legs, w.n_trivalent, w.order) == (4, 4, 4)
    assert analyze(w).betti == 1
    with pytest.raises(DiagramError):
        wheel(1)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_chord_diagram_counts_match_brute_force(n):
    assert len(enumerate_chord_diagrams(n)) == brute_force_circle_count(n)


def test_chord_diagram_counts():
    assert [len(enumerate_chord_diagrams(n)) for n in range(5)] == [1, 1, 2, 5, 18]


def test_enumeration_cap():
    with pytest.raises(ResourceLimitError):
        enumerate_chord_diagrams(5, cap=10)


def test_rotation_invariance_of_chord_keys():
    d = chord_diagram([(0, 2), (1, 4), (3, 5)])
    rotated = chord_diagram([((a + 1) % 6, (b + 1) % 6) for a, b in d.chords()])
    assert canonicalize(d).key == canonicalize(rotated).key


def test_reflection_not_identified():
    # the Wilson line is oriented: this diagram and its mirror image differ
    d = chord_diagram([(0, 1), (2, 5), (3, 7), (4, 6)])
    mirror = chord_diagram([(7 - a, 7 - b) for a, b in d.chords()])
    assert canonicalize(d).key != canonicalize(mirror).key
    assert canonicalize(mirror).key == canonicalize(chord_diagram([(0, 1), (2, 6), (3, 5), (4, 7)])).key


def test_antisymmetry_sign():
    w = wheel(3)
    flipped = feynman(list(w.legs), [(v[0], v[2], v[1]) if i == 0 else v for i, v in enumerate(w.vertices)], w.edges())
    a, b = canonicalize(w), canonicalize(flipped)
    assert a.key == b.key and a.sign == -b.sign != 0


def test_odd_automorphism_gives_zero_sign():
    d = parse("FD n=1; legs=[0]; vertex=(1,2,3); edges=(0 1)(2 3)")
    assert canonicalize(d).sign == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10**6))
def test_canonical_key_ignores_labels(n, seed):
    rng = random.Random(seed)
    d = wheel(n)
    e = relabel(rotate_vertices(d, rng), rng)
    assert canonicalize(d) == canonicalize(e)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10**6))
def test_from_key_round_trip(n, seed):
    rng = random.Random(seed)
    pts = list(range(2 * n))
    rng.shuffle(pts)
    d = chord_diagram(list(zip(pts[::2], pts[1::2])))
    c = canonicalize(d)
    back = canonicalize(from_key(c.key))
    assert back.key == c.key and back.sign == 1


@pytest.mark.parametrize("name", ["theta.txt", "wheels.txt", "chords_le4.txt"])
def test_fixture_round_trip(name):
    ds = parse_file((FIXTURES / name).read_text())
    assert ds
    for d in ds:
        again = parse(d.to_text())
        assert canonicalize(again) == canonicalize(d)


def test_fixture_sizes():
    assert len(parse_file((FIXTURES / "chords_le4.txt").read_text())) == 26
    assert len(parse_file((FIXTURES / "wheels.txt").read_text())) == 7


def test_parse_errors_carry_line_numbers():
    text = "CD n=1; pairs=(0 1)\n\nFD n=2; legs=[0]\n"
    with pytest.raises(DiagramError, match="line 3"):
        parse_file(text)


@pytest.mark.parametrize(
    "text",
    [
        "XX n=1; pairs=(0 1)",
        "CD n=2; pairs=(0 1)",
        "CD n=1; pairs=(0 0)",
        "FD n=1; vertex=(1,2,3)",
        "CD n=1; colour=(0 1)",
    ],
)
def test_bad_descriptions(text):
    with pytest.raises(DiagramError):
        parse(text)


def test_feynman_validation():
    with pytest.raises(DiagramError):
        feynman([0, 1], [], [(0, 0)])
    with pytest.raises(DiagramError):
        feynman([0, 1], [(2, 3, 4)], [(0, 1), (2, 3)])


def test_construct_dispatch():
    assert canonicalize(construct("wheel", 3)) == canonicalize(wheel(3))
    with pytest.raises(DiagramError):
        construct("knot")


def test_connected_sum_and_splits():
    d = connected_sum(theta(), theta())
    assert d.order == 2 and d.chords() == [(0, 1), (2, 3)]
    splits = chord_splits(chord_diagram([(0, 2), (1, 3)]))
    assert len(splits) == 4
    assert sorted((a.order, b.order) for a, b in splits) == [(0, 2), (1, 1), (1, 1), (2, 0)]


def test_analysis_of_wheel_and_tree():
    a = analyze(wheel(2))
    assert a.legs == 2 and a.components == 1 and a.betti == 1
    assert a.hanging_tree is None
    tree = parse("FD n=2; legs=[0,1,2]; vertex=(3,4,5); edges=(0 3)(1 4)(2 5)")
    t = find_hanging_tree(tree)
    assert t is not None and t.d == 2 and len(t.legs) == 2


def test_key_is_deterministic_text():
    keys = [canonicalize(d).key for d in itertools.repeat(wheel(5), 3)]
    assert len(set(keys)) == 1 and keys[0].startswith("FD n=5")
