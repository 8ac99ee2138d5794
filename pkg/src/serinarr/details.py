"""Second optimization: pick the detail descriptors worth narrating.

Given the per-verbosity tilings, the summary is the smallest verbosity
whose worst per-zone error stays under ``max_thr``.  Detail candidates
are every descriptor appearing in any tiling up to the verbosity
bound, minus the summary's own descriptors.  A feasible detail set

* improves on every coarser selected descriptor it overlaps by more
  than ``min_thr`` on at least one shared zone (pairs with disjoint
  ranges are always fine), and
* contains no descriptor whose range is fully covered by selected
  details from strictly higher verbosity levels.

Among feasible sets of at most ``v`` details the solver maximizes the
summed per-zone spread between the worst and best selected error,
minus a tiny penalty per covered zone that discourages redundant
overlap.  Candidate counts stay small (a handful per level), so an
exhaustive search with pairwise pruning is exact and instant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cover import VerbosityLevel
from .errors import SolveError
from .fitting import Descriptor, DescriptorPool

DEFAULT_MAX_THR = 0.15
DEFAULT_MIN_THR = 0.02
DEFAULT_PENALTY_EPS = 1e-4


@dataclass(frozen=True)
class SelectionConfig:
    max_thr: float = DEFAULT_MAX_THR
    min_thr: float = DEFAULT_MIN_THR
    v: int = 5
    penalty_eps: float = DEFAULT_PENALTY_EPS

    def __post_init__(self):
        if not (self.max_thr > self.min_thr > 0):
            raise ValueError(
                f"need max_thr > min_thr > 0, got {self.max_thr}, {self.min_thr}"
            )
        if self.penalty_eps <= 0:
            raise ValueError(f"penalty_eps must be > 0, got {self.penalty_eps}")
        if self.v < 1:
            raise ValueError(f"verbosity bound must be >= 1, got {self.v}")

    def check_penalty(self, n_zones: int) -> None:
        """The overlap penalty must stay below the improvement threshold."""
        bound = self.penalty_eps * self.v * n_zones
        if bound >= self.min_thr:
            raise ValueError(
                f"penalty_eps * v * n_zones = {bound:g} must stay under "
                f"min_thr = {self.min_thr:g}; lower penalty_eps"
            )


@dataclass(frozen=True)
class SelectionResult:
    s: int  # summary verbosity level
    summary: tuple[int, ...]  # descriptor ids of the summary tiling
    details: tuple[tuple[int, int], ...]  # (descriptor id, source level)
    objective: float
    per_zone_gain: dict[int, float] = field(repr=False)
    global_rmse: float = 0.0
    threshold_met: bool = True

    def as_dict(self) -> dict:
        return {
            "summary_level": self.s,
            "summary_ids": list(self.summary),
            "details": [{"id": i, "level": lv} for i, lv in self.details],
            "objective": self.objective,
            "per_zone_gain": {str(z): g for z, g in sorted(self.per_zone_gain.items())},
            "global_rmse": self.global_rmse,
            "threshold_met": self.threshold_met,
        }


def pick_summary(levels: list[VerbosityLevel], max_thr: float) -> tuple[int, bool]:
    """Smallest verbosity whose worst zone error is under max_thr.

    When no level passes, fall back to the level with the smallest
    worst-zone error and flag the miss so narration can hedge.
    """
    feasible = [lv for lv in levels if lv.feasible]
    if not feasible:
        raise SolveError("no feasible verbosity level to summarize")
    for lv in feasible:
        if lv.max_zone_err < max_thr:
            return lv.v, True
    best = min(feasible, key=lambda lv: lv.max_zone_err)
    return best.v, False


def check_improvement(d: Descriptor, d_higher: Descriptor, min_thr: float) -> bool:
    """True when the pair may coexist across verbosity levels.

    ``d`` comes from the coarser level.  Either the two ranges are
    disjoint, or the finer descriptor must beat the coarser one by
    strictly more than ``min_thr`` on at least one shared zone.
    """
    lo = max(d.zone_start, d_higher.zone_start)
    hi = min(d.zone_end, d_higher.zone_end)
    if lo > hi:
        return True
    for z in range(lo, hi + 1):
        if d.err(z) - d_higher.err(z) > min_thr:
            return True
    return False


def _pair_ok(a: Descriptor, lv_a: int, b: Descriptor, lv_b: int, min_thr: float) -> bool:
    if lv_a == lv_b:
        return True  # same-level descriptors come from one tiling
    if lv_a < lv_b:
        return check_improvement(a, b, min_thr)
    return check_improvement(b, a, min_thr)


def _objective(
    summary_err: list[float],
    chosen: list[tuple[Descriptor, int]],
    penalty_eps: float,
) -> tuple[float, dict[int, float]]:
    """Summed per-zone spread minus the overlap penalty, zones ascending."""
    gains: dict[int, float] = {}
    total = 0.0
    cover_count = 0
    n = len(summary_err)
    for z in range(n):
        lo = hi = summary_err[z]
        covered = 0
        for d, _ in chosen:
            if d.covers(z):
                covered += 1
                e = d.err(z)
                if e < lo:
                    lo = e
                if e > hi:
                    hi = e
        if covered:
            gain = hi - lo
            gains[z] = gain
            total += gain
            cover_count += covered
    return total - penalty_eps * cover_count, gains


def _redundancy_free(chosen: list[tuple[Descriptor, int]]) -> bool:
    """No detail may be fully covered by details from higher levels."""
    for d, lv in chosen:
        covered = set()
        for other, lv_o in chosen:
            if lv_o > lv:
                covered.update(other.zones)
        if all(z in covered for z in d.zones):
            return False
    return True


def solve_details(
    pool: DescriptorPool,
    levels: list[VerbosityLevel],
    s: int,
    cfg: SelectionConfig,
    threshold_met: bool = True,
) -> SelectionResult:
    """Exact search for the best admissible detail set."""
    cfg.check_penalty(pool.n_zones)
    by_v = {lv.v: lv for lv in levels if lv.feasible}
    if s not in by_v:
        raise SolveError(f"summary level {s} is not a feasible verbosity")
    summary_ids = by_v[s].chosen
    summary = [pool.get(i) for i in summary_ids]

    summary_err = [0.0] * pool.n_zones
    for d in summary:
        for z in d.zones:
            summary_err[z] = d.err(z)

    # Candidates: every tiling member up to the bound, minus the summary.
    # A descriptor appearing at several levels keeps its lowest level.
    source_level: dict[int, int] = {}
    for v in range(1, cfg.v + 1):
        lv = by_v.get(v)
        if lv is None:
            continue
        for id_ in lv.chosen:
            if id_ not in summary_ids and id_ not in source_level:
                source_level[id_] = v

    candidates = [
        (pool.get(id_), lv) for id_, lv in sorted(source_level.items())
    ]
    # A candidate that cannot coexist with the summary never enters a set.
    candidates = [
        (d, lv)
        for d, lv in candidates
        if all(_pair_ok(d, lv, sd, s, cfg.min_thr) for sd in summary)
    ]

    best_key: tuple | None = None
    best: tuple[float, dict[int, float], list[tuple[int, int]]] | None = None

    chosen: list[tuple[Descriptor, int]] = []

    def visit():
        nonlocal best_key, best
        if not _redundancy_free(chosen):
            return
        obj, gains = _objective(summary_err, chosen, cfg.penalty_eps)
        ids = sorted(d.id for d, _ in chosen)
        key = (-obj, len(chosen), tuple(ids))
        if best_key is None or key < best_key:
            best_key = key
            best = (obj, gains, [(d.id, lv) for d, lv in chosen])

    def search(start: int):
        visit()
        if len(chosen) >= cfg.v:
            return
        for idx in range(start, len(candidates)):
            d, lv = candidates[idx]
            if all(_pair_ok(d, lv, e, lv_e, cfg.min_thr) for e, lv_e in chosen):
                chosen.append((d, lv))
                search(idx + 1)
                chosen.pop()

    search(0)
    assert best is not None  # the empty set always visits
    obj, gains, detail_ids = best

    selected = summary + [pool.get(i) for i, _ in detail_ids]
    total = 0.0
    for z in range(pool.n_zones):
        total += min(d.err(z) for d in selected if d.covers(z))
    global_rmse = total / pool.n_zones

    return SelectionResult(
        s=s,
        summary=tuple(summary_ids),
        details=tuple(sorted(detail_ids)),
        objective=obj,
        per_zone_gain=gains,
        global_rmse=global_rmse,
        threshold_met=threshold_met,
    )
