"""Finite unions of disjoint integer intervals.

Bounds use ``None`` for −∞ (as a low bound) and +∞ (as a high bound).
Canonical form: intervals sorted, disjoint, with a gap of at least one
integer between consecutive intervals.
"""

from __future__ import annotations

from typing import Iterable, Optional


def _lo_le(a: Optional[int], b: Optional[int]) -> bool:
    """a <= b where None means −∞."""
    if a is None:
        return True
    if b is None:
        return False
    return a <= b


def _hi_ge(a: Optional[int], b: Optional[int]) -> bool:
    """a >= b where None means +∞."""
    if a is None:
        return True
    if b is None:
        return False
    return a >= b


class IntervalSet:
    """Canonical finite union of integer intervals [lo, hi]."""

    __slots__ = ("intervals",)

    def __init__(self, intervals: Iterable[tuple]):
        self.intervals = tuple(intervals)

    @staticmethod
    def empty() -> "IntervalSet":
        return _EMPTY

    @staticmethod
    def full() -> "IntervalSet":
        return _FULL

    @staticmethod
    def point(v: int) -> "IntervalSet":
        return IntervalSet(((v, v),))

    @staticmethod
    def range(lo: Optional[int], hi: Optional[int]) -> "IntervalSet":
        if lo is not None and hi is not None and lo > hi:
            return _EMPTY
        return IntervalSet(((lo, hi),))

    @staticmethod
    def from_intervals(intervals: Iterable[tuple]) -> "IntervalSet":
        """Canonicalize arbitrary intervals: sort, drop empties, merge."""
        items = [
            (lo, hi)
            for lo, hi in intervals
            if lo is None or hi is None or lo <= hi
        ]
        items.sort(key=lambda iv: (iv[0] is not None, iv[0] if iv[0] is not None else 0))
        out: list[tuple] = []
        for lo, hi in items:
            if out:
                plo, phi = out[-1]
                if phi is None or lo is None or lo <= phi + 1:
                    if phi is None or hi is None:
                        nhi = None
                    else:
                        nhi = max(phi, hi)
                    out[-1] = (plo, nhi)
                    continue
            out.append((lo, hi))
        return IntervalSet(out)

    def is_empty(self) -> bool:
        return not self.intervals

    def is_full(self) -> bool:
        return self.intervals == ((None, None),)

    def singleton_value(self) -> Optional[int]:
        """The unique member, or None if not a singleton."""
        if len(self.intervals) == 1:
            lo, hi = self.intervals[0]
            if lo is not None and lo == hi:
                return lo
        return None

    def __contains__(self, v: int) -> bool:
        return self._find(v) >= 0

    def _find(self, v: int) -> int:
        """Index of the interval containing v, or ``−(gap+1)`` if absent.

        Gap g means v lies strictly between intervals g−1 and g.
        """
        ivs = self.intervals
        left, right = 0, len(ivs)
        while left < right:
            mid = (left + right) // 2
            lo = ivs[mid][0]
            if lo is None or lo <= v:
                left = mid + 1
            else:
                right = mid
        i = left - 1  # last interval with lo <= v, or −1
        if i >= 0 and _hi_ge(ivs[i][1], v):
            return i
        return -(i + 2)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        a, b = self.intervals, other.intervals
        i = j = 0
        while i < len(a) and j < len(b):
            alo, ahi = a[i]
            blo, bhi = b[j]
            lo = blo if _lo_le(alo, blo) else alo
            if _hi_ge(bhi, ahi):
                hi = ahi
                hi_from_a = True
            else:
                hi = bhi
                hi_from_a = False
            if lo is None or hi is None or lo <= hi:
                out.append((lo, hi))
            if hi_from_a:
                i += 1
            else:
                j += 1
        return IntervalSet(out)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet.from_intervals(list(self.intervals) + list(other.intervals))

    def complement(self) -> "IntervalSet":
        if not self.intervals:
            return _FULL
        out = []
        first_lo = self.intervals[0][0]
        if first_lo is not None:
            out.append((None, first_lo - 1))
        for k in range(len(self.intervals) - 1):
            hi = self.intervals[k][1]
            nlo = self.intervals[k + 1][0]
            out.append((hi + 1, nlo - 1))
        last_hi = self.intervals[-1][1]
        if last_hi is not None:
            out.append((last_hi + 1, None))
        return IntervalSet(out)

    def pick_value(self, hint: Optional[int] = None) -> int:
        """hint if a member, else the member with minimal |v| (ties → ≥ 0)."""
        assert self.intervals, "pick_value on empty set"
        if hint is not None and hint in self:
            return hint
        idx = self._find(0)
        if idx >= 0:
            return 0
        gap = -(idx + 1)
        candidates = []
        if gap - 1 >= 0:
            hi = self.intervals[gap - 1][1]
            if hi is not None:
                candidates.append(hi)
        if gap < len(self.intervals):
            lo = self.intervals[gap][0]
            if lo is not None:
                candidates.append(lo)
        return min(candidates, key=lambda v: (abs(v), v < 0))

    def pick_in_interval(self, index: int, hint: Optional[int] = None) -> int:
        """pick_value restricted to one member interval."""
        lo, hi = self.intervals[index]
        if hint is not None and _lo_le(lo, hint) and _hi_ge(hi, hint):
            return hint
        if _lo_le(lo, 0) and _hi_ge(hi, 0):
            return 0
        if lo is not None and lo > 0:
            return lo
        return hi

    def containing_and_neighbors(self, v: int):
        """(index-or-gap, left interval, right interval) around value v.

        If v lies in interval j, neighbors are intervals j−1 / j+1; if v lies
        in a gap, they are the nearest intervals on each side.  A gap position
        g is encoded as −(g+1).
        """
        assert self.intervals
        idx = self._find(v)
        if idx >= 0:
            left = self.intervals[idx - 1] if idx - 1 >= 0 else None
            right = self.intervals[idx + 1] if idx + 1 < len(self.intervals) else None
            return idx, left, right
        gap = -(idx + 1)
        left = self.intervals[gap - 1] if gap - 1 >= 0 else None
        right = self.intervals[gap] if gap < len(self.intervals) else None
        return idx, left, right

    def remove_point(self, v: int) -> "IntervalSet":
        idx = self._find(v)
        if idx < 0:
            return self
        lo, hi = self.intervals[idx]
        repl = []
        if lo is None or lo <= v - 1:
            repl.append((lo, v - 1))
        if hi is None or v + 1 <= hi:
            repl.append((v + 1, hi))
        return IntervalSet(self.intervals[:idx] + tuple(repl) + self.intervals[idx + 1:])

    def count_up_to(self, limit: int) -> int:
        """Number of members, saturated at limit; unbounded sets return limit."""
        n = 0
        for lo, hi in self.intervals:
            if lo is None or hi is None:
                return limit
            n += hi - lo + 1
            if n >= limit:
                return limit
        return n

    def members(self):
        """Iterate members of a fully bounded set."""
        for lo, hi in self.intervals:
            assert lo is not None and hi is not None
            yield from range(lo, hi + 1)

    def __eq__(self, other):
        return isinstance(other, IntervalSet) and self.intervals == other.intervals

    def __hash__(self):
        return hash(self.intervals)

    def __repr__(self):
        if not self.intervals:
            return "{}"

        def fmt(iv):
            lo, hi = iv
            return f"[{'-inf' if lo is None else lo}, {'+inf' if hi is None else hi}]"

        return " u ".join(fmt(iv) for iv in self.intervals)


_EMPTY = IntervalSet(())
_FULL = IntervalSet(((None, None),))
