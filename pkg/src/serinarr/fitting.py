"""Descriptor fitting: least-squares curves over every zone range.

A descriptor is one prototype fitted to one contiguous zone range
[i, j] together with its per-zone RMSE.  The pool holds the fits for
all kinds over all n*(n+1)/2 ranges; ranges with fewer samples than
the kind's parameter count are skipped and only counted.

Fitting strategy per kind:

* line: closed-form ordinary least squares.
* bilinear: the breakpoint is searched over the sample x positions
  strictly inside the range (range midpoint if there are none); the
  three y values follow from a linear solve that keeps the polyline
  continuous.  Ties prefer the smaller breakpoint.
* tooth: plateau edges are searched over the zone boundaries inside
  the range, plus the sample positions when the range spans at most 4
  zones; the three levels are segment means.  Ties prefer the wider
  plateau.
* sinusoid: frequency scanned over a geometric grid of 0.5..8 cycles
  per range width (32 steps), amplitude and phase by a linear solve in
  the sin/cos basis, then the best frequency is refined by golden
  section search to relative tolerance 1e-3.  The offset is pinned to
  the sample mean of the range.

All candidate scans are vectorized with prefix sums, so a full pool at
32 zones builds in well under a minute.
"""

from __future__ import annotations

import concurrent.futures
import json
import math
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import FitError
from .ingest import TimeSeries
from .prototypes import (
    PARAM_COUNTS,
    BilinearParams,
    CurveKind,
    CurveParams,
    LineParams,
    SinusoidParams,
    ToothParams,
    evaluate,
    params_from_dict,
    params_to_dict,
)

DEFAULT_KINDS = (CurveKind.LINE, CurveKind.BILINEAR, CurveKind.TOOTH)

_SIN_GRID_LO = 0.5  # cycles per range width
_SIN_GRID_HI = 8.0
_SIN_GRID_STEPS = 32
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Descriptor:
    """One fitted curve over zones [zone_start, zone_end] inclusive."""

    id: int
    kind: CurveKind
    params: CurveParams
    zone_start: int
    zone_end: int
    zone_errs: tuple[float, ...]
    n_zones: int

    def __post_init__(self):
        if not (0 <= self.zone_start <= self.zone_end < self.n_zones):
            raise ValueError(
                f"bad zone range [{self.zone_start}, {self.zone_end}] "
                f"for {self.n_zones} zones"
            )
        if len(self.zone_errs) != self.zone_end - self.zone_start + 1:
            raise ValueError("zone_errs length does not match the zone range")

    @property
    def zones(self) -> range:
        return range(self.zone_start, self.zone_end + 1)

    @property
    def width(self) -> int:
        return self.zone_end - self.zone_start + 1

    @property
    def x_lo(self) -> float:
        return self.zone_start / self.n_zones

    @property
    def x_hi(self) -> float:
        return (self.zone_end + 1) / self.n_zones

    def err(self, zone: int) -> float:
        """Per-zone RMSE; zone must lie inside the descriptor's range."""
        return self.zone_errs[zone - self.zone_start]

    def covers(self, zone: int) -> bool:
        return self.zone_start <= zone <= self.zone_end

    @property
    def total_err(self) -> float:
        return float(sum(self.zone_errs))

    @property
    def max_err(self) -> float:
        return float(max(self.zone_errs))


@dataclass(frozen=True)
class DescriptorPool:
    """All feasible descriptors for a series, in (kind, i, j) id order."""

    descriptors: tuple[Descriptor, ...]
    n_zones: int
    kinds: tuple[CurveKind, ...]
    n_infeasible: int = 0

    def __len__(self) -> int:
        return len(self.descriptors)

    def __iter__(self):
        return iter(self.descriptors)

    def get(self, id: int) -> Descriptor:
        d = self._by_id.get(id)
        if d is None:
            raise KeyError(f"no descriptor with id {id}")
        return d

    @cached_property
    def _by_id(self) -> dict[int, Descriptor]:
        return {d.id: d for d in self.descriptors}

    @cached_property
    def _by_range(self) -> dict[tuple[int, int], tuple[Descriptor, ...]]:
        out: dict[tuple[int, int], list[Descriptor]] = {}
        for d in self.descriptors:
            out.setdefault((d.zone_start, d.zone_end), []).append(d)
        return {k: tuple(v) for k, v in out.items()}

    def by_range(self, i: int, j: int) -> tuple[Descriptor, ...]:
        return self._by_range.get((i, j), ())

    @property
    def expected_size(self) -> int:
        n = self.n_zones
        return len(self.kinds) * n * (n + 1) // 2


# ----------------------------------------------------------------------
# per-kind fitters; each returns (params, predicted values) or None
# ----------------------------------------------------------------------


def _fit_line(x: np.ndarray, y: np.ndarray, x_lo: float, x_hi: float):
    n = len(x)
    sx = float(x.sum())
    sy = float(y.sum())
    sxx = float((x * x).sum())
    sxy = float((x * y).sum())
    denom = n * sxx - sx * sx
    if denom <= 0:
        return None
    b = (n * sxy - sx * sy) / denom
    a = (sy - b * sx) / n
    return LineParams(a=a, b=b), a + b * x


def _fit_bilinear(x: np.ndarray, y: np.ndarray, x_lo: float, x_hi: float):
    n = len(x)
    inside = np.nonzero((x > x_lo) & (x < x_hi))[0]
    if inside.size == 0:
        cands = np.array([0.5 * (x_lo + x_hi)])
        left_counts = np.array([int(np.searchsorted(x, cands[0], side="right"))])
    else:
        cands = x[inside]
        left_counts = inside + 1  # samples 0..k have x <= x[k]

    # prefix sums over the sorted samples
    p1 = np.arange(n + 1, dtype=float)
    px = np.concatenate(([0.0], np.cumsum(x)))
    pxx = np.concatenate(([0.0], np.cumsum(x * x)))
    py = np.concatenate(([0.0], np.cumsum(y)))
    pxy = np.concatenate(([0.0], np.cumsum(x * y)))
    syy = float((y * y).sum())

    k = left_counts
    c = cands
    n_l, sx_l, sxx_l = p1[k], px[k], pxx[k]
    sy_l, sxy_l = py[k], pxy[k]
    n_r, sx_r, sxx_r = n - n_l, px[n] - sx_l, pxx[n] - sxx_l
    sy_r, sxy_r = py[n] - sy_l, pxy[n] - sxy_l

    dl = c - x_lo
    dr = x_hi - c

    m = np.zeros((len(c), 3, 3))
    rhs = np.zeros((len(c), 3))
    # left segment: y_l weight (c - x)/dl, y_b weight (x - x_lo)/dl
    m[:, 0, 0] = (c * c * n_l - 2 * c * sx_l + sxx_l) / (dl * dl)
    m[:, 0, 1] = ((c + x_lo) * sx_l - c * x_lo * n_l - sxx_l) / (dl * dl)
    m[:, 1, 1] = (sxx_l - 2 * x_lo * sx_l + x_lo * x_lo * n_l) / (dl * dl)
    rhs[:, 0] = (c * sy_l - sxy_l) / dl
    rhs[:, 1] = (sxy_l - x_lo * sy_l) / dl
    # right segment: y_b weight (x_hi - x)/dr, y_r weight (x - c)/dr
    m[:, 1, 1] += (x_hi * x_hi * n_r - 2 * x_hi * sx_r + sxx_r) / (dr * dr)
    m[:, 1, 2] = ((x_hi + c) * sx_r - x_hi * c * n_r - sxx_r) / (dr * dr)
    m[:, 2, 2] = (sxx_r - 2 * c * sx_r + c * c * n_r) / (dr * dr)
    rhs[:, 1] += (x_hi * sy_r - sxy_r) / dr
    rhs[:, 2] = (sxy_r - c * sy_r) / dr
    m[:, 1, 0] = m[:, 0, 1]
    m[:, 2, 1] = m[:, 1, 2]

    dets = np.linalg.det(m)
    ok = np.abs(dets) > 1e-12
    if not ok.any():
        return None
    theta = np.full((len(c), 3), np.nan)
    theta[ok] = np.linalg.solve(m[ok], rhs[ok][..., None])[..., 0]
    sse = syy - 2 * np.einsum("ki,ki->k", theta, rhs) + np.einsum(
        "ki,kij,kj->k", theta, m, theta
    )
    sse = np.where(ok, np.maximum(sse, 0.0), np.inf)

    best = int(np.argmin(sse))  # first index wins ties: smallest breakpoint
    if not np.isfinite(sse[best]):
        return None
    y_l, y_b, y_r = (float(v) for v in theta[best])
    params = BilinearParams(
        x_b=float(c[best]), y_l=y_l, y_b=y_b, y_r=y_r, x_lo=x_lo, x_hi=x_hi
    )
    return params, evaluate(CurveKind.BILINEAR, params, x)


def _fit_tooth(
    x: np.ndarray,
    y: np.ndarray,
    x_lo: float,
    x_hi: float,
    boundaries: np.ndarray,
    add_samples: bool,
):
    n = len(x)
    positions = boundaries
    if add_samples:
        positions = np.unique(np.concatenate([boundaries, x]))
    positions = positions[(positions >= x_lo) & (positions <= x_hi)]
    if len(positions) < 2:
        return None

    lo_idx = np.searchsorted(x, positions, side="left")
    hi_idx = np.searchsorted(x, positions, side="right")

    py = np.concatenate(([0.0], np.cumsum(y)))
    pyy = np.concatenate(([0.0], np.cumsum(y * y)))

    a, b = np.triu_indices(len(positions), k=1)  # all pairs x_s < x_e
    start, stop = lo_idx[a], hi_idx[b]  # plateau sample index range
    n_p = (stop - start).astype(float)
    valid = n_p > 0
    if not valid.any():
        return None

    def seg_sse(lo, hi):
        cnt = (hi - lo).astype(float)
        s = py[hi] - py[lo]
        ss = pyy[hi] - pyy[lo]
        with np.errstate(invalid="ignore", divide="ignore"):
            out = ss - np.where(cnt > 0, s * s / np.where(cnt > 0, cnt, 1.0), 0.0)
        return np.maximum(out, 0.0)

    zeros = np.zeros_like(start)
    ns = np.full_like(start, n)
    sse = seg_sse(zeros, start) + seg_sse(start, stop) + seg_sse(stop, ns)
    sse = np.where(valid, sse, np.inf)

    width = positions[b] - positions[a]
    order = np.lexsort((positions[a], -width, sse))
    best = int(order[0])
    if not np.isfinite(sse[best]):
        return None

    s_i, e_i = int(start[best]), int(stop[best])
    y_in = float((py[e_i] - py[s_i]) / (e_i - s_i))
    y_out_l = float(py[s_i] / s_i) if s_i > 0 else y_in
    y_out_r = float((py[n] - py[e_i]) / (n - e_i)) if e_i < n else y_in
    params = ToothParams(
        y_out_l=y_out_l,
        y_out_r=y_out_r,
        x_s=float(positions[a[best]]),
        x_e=float(positions[b[best]]),
        y_in=y_in,
    )
    return params, evaluate(CurveKind.TOOTH, params, x)


def _sin_solve(x, r, freq):
    """Least squares of r against sin/cos at one frequency."""
    arg = 2 * math.pi * freq * x
    s = np.sin(arg)
    co = np.cos(arg)
    m00 = float((s * s).sum())
    m01 = float((s * co).sum())
    m11 = float((co * co).sum())
    b0 = float((s * r).sum())
    b1 = float((co * r).sum())
    det = m00 * m11 - m01 * m01
    if abs(det) < 1e-14:
        return None
    a = (m11 * b0 - m01 * b1) / det
    b = (m00 * b1 - m01 * b0) / det
    sse = float((r * r).sum()) - (a * b0 + b * b1)
    return a, b, max(sse, 0.0)


def _fit_sinusoid(x: np.ndarray, y: np.ndarray, x_lo: float, x_hi: float):
    width = x_hi - x_lo
    mean = float(y.mean())
    r = y - mean

    grid = np.geomspace(_SIN_GRID_LO, _SIN_GRID_HI, _SIN_GRID_STEPS)
    sses = np.full(len(grid), np.inf)
    for idx, f_range in enumerate(grid):
        sol = _sin_solve(x, r, f_range / width)
        if sol is not None:
            sses[idx] = sol[2]
    if not np.isfinite(sses).any():
        return None
    k = int(np.argmin(sses))

    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    # golden section on the bracket around the best grid frequency
    c1 = hi - _GOLDEN * (hi - lo)
    c2 = lo + _GOLDEN * (hi - lo)

    def sse_at(f_range):
        sol = _sin_solve(x, r, f_range / width)
        return sol[2] if sol is not None else np.inf

    f1, f2 = sse_at(c1), sse_at(c2)
    while (hi - lo) > 1e-3 * (0.5 * (hi + lo)):
        if f1 <= f2:
            hi, c2, f2 = c2, c1, f1
            c1 = hi - _GOLDEN * (hi - lo)
            f1 = sse_at(c1)
        else:
            lo, c1, f1 = c1, c2, f2
            c2 = lo + _GOLDEN * (hi - lo)
            f2 = sse_at(c2)

    best_range = min(
        [grid[k], 0.5 * (lo + hi)],
        key=lambda fr: sse_at(fr),
    )
    freq = best_range / width
    sol = _sin_solve(x, r, freq)
    if sol is None:
        return None
    a, b, _ = sol
    amp = math.hypot(a, b)
    phase = math.atan2(b, a) % (2 * math.pi)
    if phase >= 2 * math.pi:
        phase = 0.0
    params = SinusoidParams(amp=amp, freq=freq, phase=phase, mean=mean)
    return params, evaluate(CurveKind.SINUSOID, params, x)


_FITTERS = {
    CurveKind.LINE: _fit_line,
    CurveKind.BILINEAR: _fit_bilinear,
    CurveKind.TOOTH: _fit_tooth,
    CurveKind.SINUSOID: _fit_sinusoid,
}


# ----------------------------------------------------------------------
# public fitting entry points
# ----------------------------------------------------------------------


def fit_one(
    series: TimeSeries, kind: CurveKind, i: int, j: int
) -> Descriptor | None:
    """Fit one prototype over zones [i, j].

    Returns None when the range holds fewer samples than the kind has
    free parameters.  The returned descriptor carries id -1; ids are
    assigned when a pool is assembled.
    """
    if not (0 <= i <= j < series.n_zones):
        raise FitError(f"bad zone range [{i}, {j}] for {series.n_zones} zones")
    sl = series.zone_slice(i, j)
    x = series.xs[sl]
    y = series.ys[sl]
    if len(x) < PARAM_COUNTS[kind]:
        return None
    x_lo, x_hi = series.zone_x_range(i, j)

    if kind is CurveKind.TOOTH:
        boundaries = np.arange(i, j + 2, dtype=float) / series.n_zones
        fit = _fit_tooth(x, y, x_lo, x_hi, boundaries, add_samples=(j - i + 1) <= 4)
    else:
        fit = _FITTERS[kind](x, y, x_lo, x_hi)
    if fit is None:
        return None
    params, predicted = fit

    res_sq = np.square(y - predicted)
    offset = sl.start
    errs = []
    for z in range(i, j + 1):
        z_lo, z_hi = series.zone_bounds[z]
        errs.append(float(np.sqrt(res_sq[z_lo - offset : z_hi - offset].mean())))
    return Descriptor(
        id=-1,
        kind=kind,
        params=params,
        zone_start=i,
        zone_end=j,
        zone_errs=tuple(errs),
        n_zones=series.n_zones,
    )


def build_pool(
    series: TimeSeries,
    kinds: tuple[CurveKind, ...] = DEFAULT_KINDS,
    max_workers: int = 1,
) -> DescriptorPool:
    """Fit every kind over every contiguous zone range.

    Ids are assigned in (kind, zone_start, zone_end) order over the
    feasible fits, so the pool is deterministic regardless of worker
    count: parallel execution only maps the same pure fits and the
    merge keeps task order.
    """
    if not kinds:
        raise FitError("at least one curve kind is required")
    kinds = tuple(sorted(set(kinds)))
    n = series.n_zones
    tasks = [
        (kind, i, j)
        for kind in kinds
        for i in range(n)
        for j in range(i, n)
    ]

    if max_workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(
                pool.map(lambda t: fit_one(series, t[0], t[1], t[2]), tasks)
            )
    else:
        results = [fit_one(series, kind, i, j) for kind, i, j in tasks]

    descriptors = []
    n_infeasible = 0
    for fitted in results:
        if fitted is None:
            n_infeasible += 1
        else:
            descriptors.append(replace(fitted, id=len(descriptors)))
    if not descriptors:
        raise FitError("no feasible descriptors; series too sparse for the zone grid")
    return DescriptorPool(
        descriptors=tuple(descriptors),
        n_zones=n,
        kinds=kinds,
        n_infeasible=n_infeasible,
    )


# ----------------------------------------------------------------------
# pool dump / reload
# ----------------------------------------------------------------------


def dump_pool(pool: DescriptorPool, path: str | Path) -> None:
    """Write one json record per descriptor, line delimited."""
    lines = []
    for d in pool:
        lines.append(
            json.dumps(
                {
                    "id": d.id,
                    "kind": d.kind.label,
                    "zone_start": d.zone_start,
                    "zone_end": d.zone_end,
                    "params": params_to_dict(d.params),
                    "zone_errs": list(d.zone_errs),
                },
                sort_keys=True,
            )
        )
    header = json.dumps(
        {
            "n_zones": pool.n_zones,
            "kinds": [k.label for k in pool.kinds],
            "n_infeasible": pool.n_infeasible,
        },
        sort_keys=True,
    )
    Path(path).write_text("\n".join([header] + lines) + "\n")


def load_pool(path: str | Path) -> DescriptorPool:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise FitError(f"empty pool dump {path}")
    header = json.loads(lines[0])
    descriptors = []
    for line in lines[1:]:
        if not line.strip():
            continue
        rec = json.loads(line)
        kind = CurveKind.from_label(rec["kind"])
        descriptors.append(
            Descriptor(
                id=rec["id"],
                kind=kind,
                params=params_from_dict(kind, rec["params"]),
                zone_start=rec["zone_start"],
                zone_end=rec["zone_end"],
                zone_errs=tuple(rec["zone_errs"]),
                n_zones=header["n_zones"],
            )
        )
    return DescriptorPool(
        descriptors=tuple(descriptors),
        n_zones=header["n_zones"],
        kinds=tuple(CurveKind.from_label(k) for k in header["kinds"]),
        n_infeasible=header.get("n_infeasible", 0),
    )
