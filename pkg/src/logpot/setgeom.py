"""Compact subsets of the real line given as finite unions of closed intervals."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BadRatio, BadScale, EmptySet, MalformedInterval

MERGE_TOL = 1e-12
MAX_CANTOR_LEVEL = 20


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted, pairwise disjoint closed intervals ``[(a_1, b_1), ...]``.

    Instances are immutable; build them through :func:`normalize` (or
    :meth:`from_pairs`) so the ordering and disjointness invariants hold.
    """

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.intervals:
            raise EmptySet("an interval union needs at least one interval")
        prev_b = -np.inf
        for a, b in self.intervals:
            if not (np.isfinite(a) and np.isfinite(b)):
                raise MalformedInterval(f"non-finite endpoint in ({a}, {b})")
            if not b > a:
                raise MalformedInterval(f"degenerate or reversed interval ({a}, {b})")
            if not a > prev_b:
                raise MalformedInterval("intervals must be sorted and disjoint")
            prev_b = b

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[float]]) -> "IntervalUnion":
        return normalize(pairs)

    # -- derived quantities -------------------------------------------------
    @property
    def n_intervals(self) -> int:
        return len(self.intervals)

    @property
    def n_gaps(self) -> int:
        return len(self.intervals) - 1

    @property
    def left(self) -> np.ndarray:
        return np.array([a for a, _ in self.intervals])

    @property
    def right(self) -> np.ndarray:
        return np.array([b for _, b in self.intervals])

    @property
    def endpoints(self) -> np.ndarray:
        return np.array([x for ab in self.intervals for x in ab])

    @property
    def gaps(self) -> list[tuple[float, float]]:
        return [(self.intervals[j][1], self.intervals[j + 1][0]) for j in range(self.n_gaps)]

    @property
    def hull(self) -> tuple[float, float]:
        return self.intervals[0][0], self.intervals[-1][1]

    def contains(self, x, tol: float = 0.0):
        """Vectorised membership test (real ``x`` only)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for a, b in self.intervals:
            out |= (x >= a - tol) & (x <= b + tol)
        return out

    def is_subset_of(self, other: "IntervalUnion", tol: float = MERGE_TOL) -> bool:
        for a, b in self.intervals:
            if not any(a >= c - tol and b <= d + tol for c, d in other.intervals):
                return False
        return True

    def to_json(self) -> str:
        return json.dumps({"intervals": [[a, b] for a, b in self.intervals]})

    @classmethod
    def from_json(cls, text: str) -> "IntervalUnion":
        data = json.loads(text)
        if not isinstance(data, dict) or set(data) != {"intervals"}:
            raise ValueError('expected {"intervals": [[a, b], ...]}')
        return normalize(data["intervals"])


def normalize(raw_intervals: Iterable[Sequence[float]]) -> IntervalUnion:
    """Sort and merge overlapping or touching intervals.

    >>> normalize([(2, 3), (0, 1), (0.5, 2.2)]).intervals
    ((0.0, 3.0),)
    """
    pairs = []
    for item in raw_intervals:
        try:
            a, b = (float(v) for v in item)
        except (TypeError, ValueError) as exc:
            raise MalformedInterval(f"cannot read interval {item!r}") from exc
        if a > b:
            raise MalformedInterval(f"left endpoint exceeds right in ({a}, {b})")
        pairs.append((a, b))
    if not pairs:
        raise EmptySet("empty interval list")
    pairs.sort()
    merged = [list(pairs[0])]
    for a, b in pairs[1:]:
        if a <= merged[-1][1] + MERGE_TOL:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return IntervalUnion(tuple((a, b) for a, b in merged))


def lebesgue(E: IntervalUnion) -> float:
    return float(sum(b - a for a, b in E.intervals))


def scale_translate(E: IntervalUnion, lam: float, t: float) -> IntervalUnion:
    """Image of ``E`` under ``x -> lam * x + t``."""
    if not lam > 0:
        raise BadScale(f"scale must be positive, got {lam}")
    return IntervalUnion(tuple((lam * a + t, lam * b + t) for a, b in E.intervals))


def cantor_approximant(level: int, ratio: float = 1.0 / 3.0) -> IntervalUnion:
    """Level-``level`` prefractal of the symmetric Cantor set on [0, 1].

    Each step keeps the outer sub-intervals of relative length ``ratio``.
    """
    if not 0.0 < ratio < 0.5:
        raise BadRatio(f"ratio must lie in (0, 1/2), got {ratio}")
    if not 0 <= level <= MAX_CANTOR_LEVEL:
        raise ValueError(f"level must be in [0, {MAX_CANTOR_LEVEL}]")
    lefts = np.zeros(1)
    length = 1.0
    for _ in range(level):
        new_length = length * ratio
        lefts = np.concatenate([lefts, lefts + length - new_length])
        lefts.sort()
        length = new_length
    return IntervalUnion(tuple((float(a), float(a + length)) for a in lefts))
