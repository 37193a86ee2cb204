import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dms.errors import DuplicateKey, ValidationError
from dms.geo import EARTH_RADIUS_M, GeoPoint, build_index, haversine_distance

from conftest import random_point, vector_angle_distance

# Frozen before implementation, via the independent vector oracle in conftest.
MINNA = GeoPoint(9.582, 6.546)
ABUJA = GeoPoint(9.0765, 7.3986)
MINNA_ABUJA_M = 109138.34721907953

lat_st = st.floats(min_value=-90.0, max_value=90.0, allow_nan=False)
lon_st = st.floats(min_value=-179.999, max_value=180.0, allow_nan=False)
point_st = st.builds(GeoPoint, lat_st, lon_st)


class TestGeoPoint:
    def test_bounds_accepted(self):
        GeoPoint(90.0, 180.0)
        GeoPoint(-90.0, -179.999999)

    @pytest.mark.parametrize(
        "lat,lon",
        [(90.0001, 0.0), (-91.0, 0.0), (0.0, 180.0001), (0.0, -180.0),
         (float("nan"), 0.0), (0.0, float("inf"))],
    )
    def test_out_of_bounds_rejected(self, lat, lon):
        with pytest.raises(ValidationError):
            GeoPoint(lat, lon)


class TestHaversine:
    def test_identity(self):
        p = GeoPoint(9.582, 6.546)
        assert haversine_distance(p, p) == 0.0

    def test_antipodal_equator_is_half_circumference(self):
        d = haversine_distance(GeoPoint(0.0, 0.0), GeoPoint(0.0, 180.0))
        assert d == pytest.approx(math.pi * EARTH_RADIUS_M, abs=1e-6)

    def test_minna_to_abuja_matches_frozen_oracle(self):
        d = haversine_distance(MINNA, ABUJA)
        assert d == pytest.approx(MINNA_ABUJA_M, rel=1e-3)

    @given(point_st, point_st)
    def test_symmetry(self, a, b):
        assert haversine_distance(a, b) == haversine_distance(b, a)

    @given(point_st, point_st)
    def test_non_negative_and_bounded(self, a, b):
        d = haversine_distance(a, b)
        assert 0.0 <= d <= math.pi * EARTH_RADIUS_M * (1 + 1e-12)

    @given(point_st, point_st, point_st)
    @settings(max_examples=300)
    def test_triangle_inequality(self, a, b, c):
        ab = haversine_distance(a, b)
        bc = haversine_distance(b, c)
        ac = haversine_distance(a, c)
        assert ac <= ab + bc + 1e-6 * max(1.0, ab + bc)

    @given(point_st, point_st)
    @settings(max_examples=300)
    def test_agrees_with_vector_oracle(self, a, b):
        d = haversine_distance(a, b)
        expected = vector_angle_distance(a, b)
        assert d == pytest.approx(expected, rel=1e-3, abs=1e-3)


def linear_scan_nearest(entries, origin, k):
    scored = sorted((haversine_distance(origin, p), key) for key, p in entries)
    return [(key, d) for d, key in scored[:k]]


def linear_scan_within(entries, origin, r):
    scored = sorted(
        (haversine_distance(origin, p), key)
        for key, p in entries
        if haversine_distance(origin, p) <= r
    )
    return [(key, d) for d, key in scored]


class TestSpatialIndex:
    def test_empty_index(self):
        idx = build_index([])
        assert len(idx) == 0
        assert idx.nearest(GeoPoint(0, 0), 3) == []
        assert idx.within_radius(GeoPoint(0, 0), 1000.0) == []

    def test_singleton_nearest_self(self):
        p = GeoPoint(9.6, 6.5)
        idx = build_index([("a", p)])
        assert idx.nearest(p, 1) == [("a", 0.0)]

    def test_duplicate_key_rejected(self):
        p = GeoPoint(0, 0)
        with pytest.raises(DuplicateKey):
            build_index([("a", p), ("a", GeoPoint(1, 1))])

    def test_k_zero_rejected(self):
        idx = build_index([("a", GeoPoint(0, 0))])
        with pytest.raises(ValidationError):
            idx.nearest(GeoPoint(0, 0), 0)

    def test_radius_nonpositive_rejected(self):
        idx = build_index([("a", GeoPoint(0, 0))])
        with pytest.raises(ValidationError):
            idx.within_radius(GeoPoint(0, 0), 0.0)
        with pytest.raises(ValidationError):
            idx.within_radius(GeoPoint(0, 0), -5.0)

    def test_k_larger_than_index_returns_all_sorted(self):
        entries = [("b", GeoPoint(1.0, 1.0)), ("a", GeoPoint(0.5, 0.5)), ("c", GeoPoint(2.0, 2.0))]
        idx = build_index(entries)
        got = idx.nearest(GeoPoint(0.0, 0.0), 10)
        assert got == linear_scan_nearest(entries, GeoPoint(0.0, 0.0), 10)
        assert len(got) == 3

    def test_radius_just_below_nearest_is_empty(self):
        origin = GeoPoint(0.0, 0.0)
        p = GeoPoint(0.1, 0.0)
        d = haversine_distance(origin, p)
        idx = build_index([("a", p)])
        assert idx.within_radius(origin, d * 0.999) == []
        assert idx.within_radius(origin, d) == [("a", d)]

    def test_origin_on_indexed_point_included_at_zero(self):
        p = GeoPoint(9.6, 6.5)
        idx = build_index([("a", p), ("b", GeoPoint(9.7, 6.5))])
        got = idx.within_radius(p, 1.0)
        assert got[0] == ("a", 0.0)

    def test_nearest_matches_linear_scan_500_points(self):
        rng = random.Random(7)
        entries = [(f"k{i:03d}", random_point(rng)) for i in range(500)]
        idx = build_index(entries)
        origin = random_point(rng)
        assert idx.nearest(origin, 10) == linear_scan_nearest(entries, origin, 10)

    def test_randomized_equivalence_with_linear_scan(self):
        rng = random.Random(42)
        for trial in range(200):
            n = rng.randint(0, 120)
            entries = [(f"k{i:03d}", random_point(rng)) for i in range(n)]
            idx = build_index(entries)
            origin = random_point(rng)
            k = rng.randint(1, 15)
            assert idx.nearest(origin, k) == linear_scan_nearest(entries, origin, k), trial
            r = rng.uniform(1.0, 2.2e7)
            assert idx.within_radius(origin, r) == linear_scan_within(entries, origin, r), trial

    def test_tie_break_by_key(self):
        origin = GeoPoint(0.0, 0.0)
        p = GeoPoint(1.0, 0.0)
        idx = build_index([("z", p), ("a", p)])
        got = idx.nearest(origin, 2)
        assert [key for key, _ in got] == ["a", "z"]
