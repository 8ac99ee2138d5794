"""Loading and normalization of scalar time series.

Supported input formats:

``csv``
    Plain ``t,y`` rows with an optional header line.  A single-column
    file is accepted too, in which case the row index becomes the time
    axis.

``trends_csv``
    The CSV export shape used by the Google Trends UI: two metadata
    lines, a header, then ``date,value`` rows.  Values below the
    reporting floor appear as ``"<1"`` and are read as 0.5.  The date
    column only fixes the ordering; rows are treated as evenly spaced.

``json``
    Either ``{"points": [{"t": ..., "v": ...}, ...]}`` or
    ``{"values": [...]}``.

After loading, :func:`normalize` min-max scales both axes into the unit
square and attaches the zone grid used by every later stage.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyZoneError, IngestError

FORMATS = ("csv", "trends_csv", "json")


@dataclass(frozen=True)
class RawSeries:
    """An ordered sequence of (timestamp, value) pairs as read from disk."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.points) < 2:
            raise IngestError(f"need at least 2 points, got {len(self.points)}")
        ts = [t for t, _ in self.points]
        for k in range(1, len(ts)):
            if not ts[k] > ts[k - 1]:
                raise IngestError(
                    f"timestamps must be strictly increasing "
                    f"(t[{k - 1}]={ts[k - 1]!r} >= t[{k}]={ts[k]!r})"
                )
        for t, y in self.points:
            if not (math.isfinite(t) and math.isfinite(y)):
                raise IngestError("non-finite timestamp or value in input")

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class TimeSeries:
    """A normalized series on the unit square plus its zone grid.

    ``xs`` and ``ys`` live in [0, 1].  ``y_min``/``y_max`` keep the raw
    value range so outputs can be mapped back.  ``zone_of[k]`` is the
    zone index of sample k; ``zone_bounds[z]`` is the half-open sample
    index range of zone z, so slicing a contiguous zone range never
    rescans the series.
    """

    xs: np.ndarray
    ys: np.ndarray
    y_min: float
    y_max: float
    n_zones: int
    zone_of: np.ndarray
    zone_bounds: tuple[tuple[int, int], ...] = field(repr=False)

    def __len__(self) -> int:
        return len(self.xs)

    def zone_slice(self, i: int, j: int) -> slice:
        """Sample index slice covering zones i..j inclusive."""
        return slice(self.zone_bounds[i][0], self.zone_bounds[j][1])

    def zone_x_range(self, i: int, j: int) -> tuple[float, float]:
        """The x interval [i/n, (j+1)/n] spanned by zones i..j."""
        return i / self.n_zones, (j + 1) / self.n_zones

    def denormalize_y(self, y: float) -> float:
        return self.y_min + y * (self.y_max - self.y_min)


# ----------------------------------------------------------------------
# loaders
# ----------------------------------------------------------------------


def _parse_value(token: str) -> float:
    token = token.strip().strip('"')
    if token.startswith("<"):
        # Trends reports sub-floor weeks as "<1"; take half the floor.
        return float(token[1:]) / 2.0
    return float(token)


def _load_csv(text: str) -> RawSeries:
    points = []
    row_index = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        cells = line.split(",")
        try:
            if len(cells) == 1:
                points.append((float(row_index), _parse_value(cells[0])))
            else:
                points.append((float(cells[0]), _parse_value(cells[1])))
        except ValueError:
            if points:
                raise IngestError(f"line {lineno}: cannot parse {line!r}") from None
            # tolerate a single header line before any data
            continue
        row_index += 1
    if not points:
        raise IngestError("no data rows found in csv input")
    return RawSeries(tuple(points))


def _load_trends_csv(text: str) -> RawSeries:
    lines = text.splitlines()
    if len(lines) < 4:
        raise IngestError("trends_csv input too short")
    # Two metadata lines (category line and a blank), then the header.
    data_lines = [ln for ln in lines[3:] if ln.strip()]
    points = []
    for offset, line in enumerate(data_lines):
        cells = line.split(",")
        if len(cells) < 2:
            raise IngestError(f"trends_csv row {offset + 4}: expected date,value")
        try:
            value = _parse_value(cells[1])
        except ValueError:
            raise IngestError(
                f"trends_csv row {offset + 4}: bad value {cells[1]!r}"
            ) from None
        # The date only orders the rows; positions are the row indexes.
        points.append((float(offset), value))
    if not points:
        raise IngestError("no data rows found in trends_csv input")
    return RawSeries(tuple(points))


def _load_json(text: str) -> RawSeries:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IngestError(f"invalid json: {exc}") from None
    if isinstance(doc, dict) and "points" in doc:
        try:
            points = tuple(
                (float(p["t"]), float(p["v"])) for p in doc["points"]
            )
        except (TypeError, KeyError, ValueError):
            raise IngestError('json "points" entries need numeric "t" and "v"') from None
    elif isinstance(doc, dict) and "values" in doc:
        try:
            points = tuple(
                (float(k), float(v)) for k, v in enumerate(doc["values"])
            )
        except (TypeError, ValueError):
            raise IngestError('json "values" must be a list of numbers') from None
    else:
        raise IngestError('json input needs a "points" or "values" key')
    return RawSeries(points)


_LOADERS = {
    "csv": _load_csv,
    "trends_csv": _load_trends_csv,
    "json": _load_json,
}


def load(path: str | Path, format: str = "csv") -> RawSeries:
    """Read a series from ``path`` in the given format."""
    if format not in _LOADERS:
        raise IngestError(f"unknown format {format!r}, expected one of {FORMATS}")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from None
    return _LOADERS[format](text)


# ----------------------------------------------------------------------
# normalization and the zone grid
# ----------------------------------------------------------------------


def normalize(raw: RawSeries, levels: int) -> TimeSeries:
    """Min-max scale a raw series onto [0,1] x [0,1] and build 2**levels zones.

    A constant series maps to the flat line y = 0.5.  Every zone must
    receive at least one sample; otherwise the requested zone count is
    too fine for the series and the first empty zone is reported.

    Applying normalize to an already normalized series reproduces it
    bit for bit.
    """
    if levels < 1:
        raise IngestError(f"levels must be >= 1, got {levels}")
    n_zones = 2 ** levels
    if n_zones > len(raw):
        raise IngestError(
            f"{n_zones} zones need at least {n_zones} points, series has {len(raw)}"
        )

    ts = np.array([t for t, _ in raw.points], dtype=float)
    vs = np.array([v for _, v in raw.points], dtype=float)

    xs = (ts - ts[0]) / (ts[-1] - ts[0])
    y_min = float(vs.min())
    y_max = float(vs.max())
    if y_max > y_min:
        ys = (vs - y_min) / (y_max - y_min)
    else:
        ys = np.full_like(vs, 0.5)

    zone_of = np.minimum(np.floor(xs * n_zones).astype(int), n_zones - 1)

    bounds = []
    start = 0
    for z in range(n_zones):
        end = int(np.searchsorted(zone_of, z, side="right"))
        if end == start:
            raise EmptyZoneError(z, n_zones)
        bounds.append((start, end))
        start = end

    for arr in (xs, ys, zone_of):
        arr.flags.writeable = False
    return TimeSeries(
        xs=xs,
        ys=ys,
        y_min=y_min,
        y_max=y_max,
        n_zones=n_zones,
        zone_of=zone_of,
        zone_bounds=tuple(bounds),
    )


def load_series(path: str | Path, format: str, levels: int) -> TimeSeries:
    """Convenience wrapper: load then normalize."""
    return normalize(load(path, format), levels)
