import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_series, raw_series
from serinarr.errors import EmptyZoneError, IngestError
from serinarr.ingest import (
    RawSeries,
    _parse_value,
    load,
    load_series,
    normalize,
)

FIXTURE = Path(__file__).parent / "data" / "concert_weekly.csv"


# ---------------------------------------------------------------- loaders


def test_trends_fixture_row_count_matches_file():
    # independent oracle: count the non-blank rows after the 3 header lines
    lines = FIXTURE.read_text().splitlines()
    expected = sum(1 for ln in lines[3:] if ln.strip())
    raw = load(FIXTURE, "trends_csv")
    assert len(raw) == expected == 261


def test_trends_fixture_shape():
    raw = load(FIXTURE, "trends_csv")
    ts = [t for t, _ in raw.points]
    vs = [v for _, v in raw.points]
    assert ts == [float(k) for k in range(261)]
    assert all(0.0 <= v <= 100.0 for v in vs)
    # the fixture contains sub-floor cells, which must come through as 0.5
    assert any(v == 0.5 for v in vs)


def test_parse_value_floor_token():
    assert _parse_value("<1") == 0.5
    assert _parse_value("<5") == 2.5
    assert _parse_value(' "42" ') == 42.0


def test_trends_csv_inline(tmp_path):
    text = (
        "Category: All categories\n"
        "\n"
        "Week,thing: (Worldwide)\n"
        "2020-01-05,10\n"
        "2020-01-12,<1\n"
        "2020-01-19,33\n"
    )
    p = tmp_path / "t.csv"
    p.write_text(text)
    raw = load(p, "trends_csv")
    assert raw.points == ((0.0, 10.0), (1.0, 0.5), (2.0, 33.0))


def test_trends_csv_too_short(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("just one line\n")
    with pytest.raises(IngestError):
        load(p, "trends_csv")


def test_csv_two_columns_with_header(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("t,y\n0,1.5\n1,2.5\n2,3.5\n")
    raw = load(p, "csv")
    assert raw.points == ((0.0, 1.5), (1.0, 2.5), (2.0, 3.5))


def test_csv_single_column_uses_row_index(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("5\n7\n9\n")
    raw = load(p, "csv")
    assert raw.points == ((0.0, 5.0), (1.0, 7.0), (2.0, 9.0))


def test_csv_bad_row_after_data_raises(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("0,1\nnot,a,number\n")
    with pytest.raises(IngestError, match="line 2"):
        load(p, "csv")


def test_json_points_form(tmp_path):
    p = tmp_path / "s.json"
    p.write_text('{"points": [{"t": 0, "v": 1}, {"t": 2, "v": 5}]}')
    raw = load(p, "json")
    assert raw.points == ((0.0, 1.0), (2.0, 5.0))


def test_json_values_form(tmp_path):
    p = tmp_path / "s.json"
    p.write_text('{"values": [3, 1, 4, 1, 5]}')
    raw = load(p, "json")
    assert [v for _, v in raw.points] == [3.0, 1.0, 4.0, 1.0, 5.0]


def test_json_rejects_other_shapes(tmp_path):
    p = tmp_path / "s.json"
    p.write_text('{"rows": []}')
    with pytest.raises(IngestError):
        load(p, "json")
    p.write_text("not json at all")
    with pytest.raises(IngestError):
        load(p, "json")


def test_unknown_format_rejected():
    with pytest.raises(IngestError, match="unknown format"):
        load(FIXTURE, "xml")


def test_missing_file_rejected(tmp_path):
    with pytest.raises(IngestError):
        load(tmp_path / "nope.csv", "csv")


# ---------------------------------------------------------------- RawSeries


def test_raw_series_needs_two_points():
    with pytest.raises(IngestError):
        RawSeries(((0.0, 1.0),))


def test_raw_series_requires_increasing_time():
    with pytest.raises(IngestError, match="strictly increasing"):
        RawSeries(((0.0, 1.0), (0.0, 2.0)))


def test_raw_series_rejects_non_finite():
    with pytest.raises(IngestError):
        RawSeries(((0.0, 1.0), (1.0, math.nan)))


# ---------------------------------------------------------------- normalize


def test_normalize_unit_square():
    s = make_series([3.0, 9.0, 6.0, 3.0], levels=1)
    assert s.xs[0] == 0.0 and s.xs[-1] == 1.0
    assert s.ys.min() == 0.0 and s.ys.max() == 1.0
    assert s.y_min == 3.0 and s.y_max == 9.0
    assert s.n_zones == 2


def test_normalize_constant_series_is_half():
    s = make_series([4.0, 4.0, 4.0, 4.0], levels=1)
    assert np.all(s.ys == 0.5)


def test_normalize_zone_bookkeeping():
    s = make_series(list(range(16)), levels=2)
    assert s.n_zones == 4
    # bounds partition the sample index range in order
    flat = [k for lo, hi in s.zone_bounds for k in range(lo, hi)]
    assert flat == list(range(len(s)))
    for z, (lo, hi) in enumerate(s.zone_bounds):
        assert np.all(s.zone_of[lo:hi] == z)
    assert s.zone_x_range(1, 2) == (0.25, 0.75)
    assert s.zone_slice(0, 3) == slice(0, 16)


def test_normalize_rejects_bad_levels():
    with pytest.raises(IngestError):
        make_series([1.0, 2.0], levels=0)


def test_normalize_rejects_too_few_points():
    with pytest.raises(IngestError, match="at least"):
        make_series([1.0, 2.0, 3.0], levels=2)


def test_empty_zone_reported_with_index():
    # 4 zones, all samples bunched at the ends: zone 1 gets nothing
    raw = raw_series([1.0, 2.0, 3.0, 4.0], ts=[0.0, 0.05, 3.9, 4.0])
    with pytest.raises(EmptyZoneError) as exc:
        normalize(raw, levels=2)
    assert exc.value.zone == 1


def test_normalize_is_idempotent_bitwise():
    s1 = make_series([5.0, 1.0, 7.0, 2.0, 9.0, 9.0, 0.0, 3.0], levels=2)
    again = RawSeries(tuple(zip(s1.xs.tolist(), s1.ys.tolist())))
    s2 = normalize(again, levels=2)
    assert s2.xs.tobytes() == s1.xs.tobytes()
    assert s2.ys.tobytes() == s1.ys.tobytes()
    assert s2.zone_bounds == s1.zone_bounds


def test_series_arrays_are_read_only():
    s = make_series([1.0, 2.0, 3.0, 4.0], levels=1)
    with pytest.raises(ValueError):
        s.ys[0] = 9.0


def test_load_series_wrapper():
    s = load_series(FIXTURE, "trends_csv", levels=4)
    assert s.n_zones == 16
    assert len(s) == 261


@settings(max_examples=60)
@given(
    st.lists(
        st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
        min_size=4,
        max_size=40,
    )
)
def test_denormalize_round_trip(values):
    if max(values) == min(values):
        values[0] = min(values) - 1.0
    s = make_series(values, levels=1)
    for k, v in enumerate(values):
        back = s.denormalize_y(float(s.ys[k]))
        assert back == pytest.approx(v, rel=1e-12, abs=1e-9)


@settings(max_examples=40)
@given(st.integers(min_value=1, max_value=4), st.integers(min_value=0, max_value=9999))
def test_zone_assignment_matches_formula(levels, seed):
    import random

    r = random.Random(seed)
    n_zones = 2 ** levels
    count = r.randint(n_zones * 3, n_zones * 6)
    values = [r.uniform(0, 10) for _ in range(count)]
    s = make_series(values, levels)
    for k in range(len(s)):
        z = min(int(math.floor(s.xs[k] * n_zones)), n_zones - 1)
        assert s.zone_of[k] == z
