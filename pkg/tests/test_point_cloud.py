from __future__ import annotations

import csv

import numpy as np
import pytest
from ridgesearch.core.errors import DataFormatError, DomainError
from ridgesearch.core.point_cloud import BoxFilter, emit, ingest, make_cloud


def _write(path, text):
    path.write_text(text)
    return path


def test_three_rows_no_filter(tmp_path):
    path = _write(tmp_path / "data.csv", "a,b\n1,2\n3,4\n5,6\n")
    cloud = ingest(path)
    assert cloud.n == 3
    assert cloud.labels == ("a", "b")
    np.testing.assert_array_equal(cloud.points, [[1, 2], [3, 4], [5, 6]])


def test_filter_excluding_everything(tmp_path):
    path = _write(tmp_path / "data.csv", "a,b\n1,2\n3,4\n")
    with pytest.raises(DataFormatError, match="zero rows"):
        ingest(path, [BoxFilter.parse("a:10:20")])


def test_malformed_row_reports_line(tmp_path):
    path = _write(tmp_path / "data.csv", "a,b\n1,2\n3,oops\n")
    with pytest.raises(DataFormatError) as info:
        ingest(path)
    assert info.value.line == 3


def test_missing_file(tmp_path):
    with pytest.raises(DataFormatError):
        ingest(tmp_path / "missing.csv")


def test_column_selection_keeps_order(tmp_path):
    path = _write(tmp_path / "data.csv", "a,b,c\n1,2,3\n4,5,6\n")
    cloud = ingest(path, columns=["c", "a"])
    assert cloud.labels == ("c", "a")
    np.testing.assert_array_equal(cloud.points, [[3, 1], [6, 4]])


def test_galaxy_slice_box_count(galaxy_slice):
    with open(galaxy_slice) as f:
        rows = list(csv.DictReader(f))
    expected = sum(130 <= float(r["ra"]) <= 180 and 0 <= float(r["dec"]) <= 50 for r in rows)
    assert expected == 226

    cloud = ingest(galaxy_slice, [BoxFilter.parse("ra:130:180"), BoxFilter.parse("dec:0:50")], columns=["ra", "dec"])
    assert cloud.n == expected
    assert cloud.points[:, 0].min() >= 130
    assert cloud.points[:, 1].max() <= 50


def test_round_trip_is_exact(tmp_path, rng):
    cloud = make_cloud(rng.normal(size=(50, 3)) * 10 ** rng.uniform(-8, 8, size=(50, 1)), ["u", "v", "w"])
    emit(cloud, tmp_path / "cloud.csv")
    back = ingest(tmp_path / "cloud.csv")
    assert back.labels == cloud.labels
    np.testing.assert_array_equal(back.points, cloud.points)


@pytest.mark.parametrize("spec", ["a:1", "a:x:2", "a:3:1"])
def test_invalid_filters(spec):
    with pytest.raises(DomainError):
        BoxFilter.parse(spec)


def test_filter_column_with_colon():
    assert BoxFilter.parse("ra:deg:1.5:2") == BoxFilter("ra:deg", 1.5, 2.0)


def test_make_cloud_rejects_non_finite():
    with pytest.raises(DomainError):
        make_cloud([[0.0, np.nan]])
