"""Incremental sparse row echelon form over the rationals.

Rows are kept fully reduced (RREF): a row's pivot column appears in no
other row.  Vectors are ``dict`` column -> ``Fraction``.
"""

from __future__ import annotations

from fractions import Fraction

PIVOT_STRATEGIES = ("last", "first", "markowitz")


class Echelon:
    """Row space of the vectors added so far.

    ``rank`` maps columns to sort positions; the pivot strategy chooses the
    pivot of a new row among its columns: ``last`` (highest rank), ``first``
    (lowest rank) or ``markowitz`` (column touching the fewest stored rows,
    ties by rank).  With ``track=True`` every row remembers which added
    vectors it is a combination of, so :meth:`solve` can express a vector
    in terms of the inputs.
    """

    def __init__(self, rank=None, pivot: str = "last", track: bool = False):
        if pivot not in PIVOT_STRATEGIES:
            raise ValueError(f"unknown pivot strategy {pivot!r}")
        self._rank = rank
        self.pivot = pivot
        self.track = track
        self.rows: dict = {}
        self.combos: dict = {}
        self._col_rows: dict = {}

    def __len__(self) -> int:
        return len(self.rows)

    def _r(self, col):
        return self._rank[col] if self._rank is not None else col

    def reduce(self, vec, combo=None):
        """Return ``vec`` minus its projection onto the pivot columns.

        When ``combo`` is a dict it is updated in place with the tagged
        combination subtracted.
        """
        out = {c: Fraction(v) for c, v in vec.items() if v}
        for col in [c for c in out if c in self.rows]:
            coeff = out.get(col)
            if not coeff:
                continue
            for c, v in self.rows[col].items():
                nv = out.get(c, 0) - coeff * v
                if nv:
                    out[c] = nv
                else:
                    out.pop(c, None)
            if combo is not None:
                for t, v in self.combos[col].items():
                    nv = combo.get(t, 0) + coeff * v
                    if nv:
                        combo[t] = nv
                    else:
                        combo.pop(t, None)
        return out

    def add(self, vec, tag=None) -> bool:
        """Insert a vector; return True when the rank grows."""
        combo = {} if self.track else None
        red = self.reduce(vec, combo)
        if not red:
            return False
        if self.track:
            # red = vec - sum(combo) ; as a combination of inputs
            combo = {t: -v for t, v in combo.items()}
            combo[tag] = combo.get(tag, 0) + 1
        piv = self._choose(red)
        inv = 1 / red[piv]
        row = {c: v * inv for c, v in red.items()}
        if self.track:
            combo = {t: v * inv for t, v in combo.items() if v}
        # clear the new pivot from existing rows
        for p in list(self._col_rows.get(piv, ())):
            other = self.rows[p]
            coeff = other[piv]
            for c, v in row.items():
                nv = other.get(c, 0) - coeff * v
                if nv:
                    if c not in other:
                        self._col_rows.setdefault(c, set()).add(p)
                    other[c] = nv
                else:
                    if c in other:
                        del other[c]
                        self._col_rows[c].discard(p)
            if self.track:
                oc = self.combos[p]
                for t, v in combo.items():
                    nv = oc.get(t, 0) - coeff * v
                    if nv:
                        oc[t] = nv
                    else:
                        oc.pop(t, None)
        self._col_rows.pop(piv, None)
        self.rows[piv] = row
        for c in row:
            if c != piv:
                self._col_rows.setdefault(c, set()).add(piv)
        if self.track:
            self.combos[piv] = combo
        return True

    def _choose(self, red):
        if self.pivot == "last":
            return max(red, key=self._r)
        if self.pivot == "first":
            return min(red, key=self._r)
        return min(red, key=lambda c: (len(self._col_rows.get(c, ())), self._r(c)))

    def contains(self, vec) -> bool:
        return not self.reduce(vec)

    def solve(self, vec):
        """Express ``vec`` via the tagged inputs, or None if outside the span."""
        if not self.track:
            raise ValueError("solve needs track=True")
        combo: dict = {}
        red = self.reduce(vec, combo)
        if red:
            return None
        return combo
