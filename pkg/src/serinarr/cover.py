"""First optimization: tile the zone axis with descriptors.

For each verbosity v the solver picks exactly v non-overlapping
descriptors whose ranges cover all zones, each spanning at least
ceil(n / 2**v) zones, minimizing the summed per-zone error.  The
search is an exact dynamic program over cut positions, so the result
is provably optimal, and all tie-breaks are fixed (cheapest segment
first by kind order then id; among equal-cost partitions the earliest
cuts win), which makes the output independent of pool ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SolveError
from .fitting import Descriptor, DescriptorPool

_INF = float("inf")


@dataclass(frozen=True)
class VerbosityLevel:
    """Optimal tiling of the zone axis by exactly ``v`` descriptors."""

    v: int
    chosen: tuple[int, ...]  # descriptor ids ordered by zone_start
    cost: float
    feasible: bool
    max_zone_err: float  # largest per-zone error among the chosen fits

    def __post_init__(self):
        if self.feasible and len(self.chosen) != self.v:
            raise ValueError(f"level v={self.v} holds {len(self.chosen)} descriptors")


def min_segment_zones(n_zones: int, v: int) -> int:
    """Minimum zone span of a segment at verbosity v."""
    return math.ceil(n_zones / 2 ** v)


def segment_table(
    pool: DescriptorPool,
) -> dict[tuple[int, int], tuple[float, int]]:
    """Cheapest descriptor per zone range.

    Cost of a descriptor is the sum of its per-zone errors.  Ties go to
    the smaller kind (line < bilinear < tooth < sinusoid), then the
    smaller id, so the table does not depend on pool order.
    """
    table: dict[tuple[int, int], tuple[float, int, int]] = {}
    for d in pool:
        key = (d.zone_start, d.zone_end)
        entry = (d.total_err, int(d.kind), d.id)
        cur = table.get(key)
        if cur is None or entry < cur:
            table[key] = entry
    return {k: (cost, id_) for k, (cost, _, id_) in table.items()}


def solve_cover(pool: DescriptorPool, v_max: int) -> list[VerbosityLevel]:
    """Optimal tilings for every verbosity 1..v_max.

    A verbosity whose segment count or minimum length cannot be met by
    any partition is returned with ``feasible=False`` and an empty
    choice, and later stages skip it.
    """
    if v_max < 1:
        raise SolveError(f"verbosity bound must be >= 1, got {v_max}")
    n = pool.n_zones
    table = segment_table(pool)

    levels = []
    for v in range(1, v_max + 1):
        min_len = min_segment_zones(n, v)
        if v * min_len > n:
            levels.append(
                VerbosityLevel(v=v, chosen=(), cost=_INF, feasible=False,
                               max_zone_err=_INF)
            )
            continue

        # dp[p][k]: best cost covering zones [0, k) with p segments
        dp = [[_INF] * (n + 1) for _ in range(v + 1)]
        cut = [[-1] * (n + 1) for _ in range(v + 1)]
        dp[0][0] = 0.0
        for p in range(1, v + 1):
            for k in range(p * min_len, n + 1):
                best, best_m = _INF, -1
                for m in range((p - 1) * min_len, k - min_len + 1):
                    if dp[p - 1][m] == _INF:
                        continue
                    seg = table.get((m, k - 1))
                    if seg is None:
                        continue
                    cand = dp[p - 1][m] + seg[0]
                    if cand < best:
                        best, best_m = cand, m
                dp[p][k] = best
                cut[p][k] = best_m

        if dp[v][n] == _INF:
            levels.append(
                VerbosityLevel(v=v, chosen=(), cost=_INF, feasible=False,
                               max_zone_err=_INF)
            )
            continue

        segments = []
        k = n
        for p in range(v, 0, -1):
            m = cut[p][k]
            segments.append((m, k - 1))
            k = m
        segments.reverse()
        ids = tuple(table[seg][1] for seg in segments)
        max_err = max(pool.get(i).max_err for i in ids)
        levels.append(
            VerbosityLevel(
                v=v, chosen=ids, cost=dp[v][n], feasible=True, max_zone_err=max_err
            )
        )
    return levels


def level_error_matrix(
    levels: list[VerbosityLevel], pool: DescriptorPool
) -> tuple[list[int], np.ndarray]:
    """Per-zone error of the covering descriptor, one row per feasible level.

    Returns the row labels (verbosity values) and a rectangular matrix
    of shape (len(labels), n_zones).
    """
    rows = []
    labels = []
    for level in levels:
        if not level.feasible:
            continue
        row = np.empty(pool.n_zones)
        for id_ in level.chosen:
            d = pool.get(id_)
            row[d.zone_start : d.zone_end + 1] = d.zone_errs
        labels.append(level.v)
        rows.append(row)
    if not rows:
        raise SolveError("no feasible verbosity level")
    return labels, np.vstack(rows)
