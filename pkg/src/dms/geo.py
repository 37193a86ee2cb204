"""Geographic primitives: coordinates, great-circle distance, proximity queries.

Distances are meters on a sphere of mean radius 6,371,008.8 m. Degrees appear
only at the boundary (GeoPoint fields); everything internal works in radians.
"""
from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

from .errors import DuplicateKey, ValidationError

EARTH_RADIUS_M = 6_371_008.8

# Safety margin (radians) added to latitude-band pruning bounds. A pruned
# point is guaranteed to sit further than the bound by ~R*margin = 6 mm,
# which dwarfs float rounding in the haversine evaluation, so pruning can
# never change a query result relative to a full linear scan.
_BAND_MARGIN_RAD = 1e-9


@dataclass(frozen=True)
class GeoPoint:
    """A WGS-ish latitude/longitude pair in decimal degrees.

    lat in [-90, +90], lon in (-180, +180], both finite.
    """

    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lat) and math.isfinite(self.lon)):
            raise ValidationError(f"coordinates must be finite, got ({self.lat}, {self.lon})")
        if not -90.0 <= self.lat <= 90.0:
            raise ValidationError(f"latitude {self.lat} outside [-90, 90]")
        if not -180.0 < self.lon <= 180.0:
            raise ValidationError(f"longitude {self.lon} outside (-180, 180]")


def haversine_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in meters between two points.

    Symmetric by construction: both delta terms are squared, so swapping the
    arguments produces bit-identical intermediate values.
    """
    lat1 = math.radians(a.lat)
    lat2 = math.radians(b.lat)
    dlat = math.radians(b.lat - a.lat)
    dlon = math.radians(b.lon - a.lon)
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.atan2(math.sqrt(h), math.sqrt(max(0.0, 1.0 - h)))


class SpatialIndex:
    """Immutable proximity index over (key, GeoPoint) entries.

    Acceleration structure: entries sorted by latitude; queries scan only a
    latitude band wide enough to provably contain every possible match (the
    great-circle distance between two points is at least their latitude
    difference). Distances reported to callers always come from
    haversine_distance, so results are identical to a linear scan.
    """

    def __init__(self, entries: list[tuple[str, GeoPoint]]):
        self._entries = sorted(entries, key=lambda e: (e[1].lat, e[0]))
        self._lats = [p.lat for _, p in self._entries]

    def __len__(self) -> int:
        return len(self._entries)

    def entries(self) -> list[tuple[str, GeoPoint]]:
        return list(self._entries)

    def _band(self, lat0: float, half_width_deg: float) -> tuple[int, int]:
        lo = bisect_left(self._lats, lat0 - half_width_deg)
        hi = bisect_right(self._lats, lat0 + half_width_deg)
        return lo, hi

    def nearest(self, origin: GeoPoint, k: int) -> list[tuple[str, float]]:
        """The k entries closest to origin, ascending by (distance, key)."""
        if k < 1:
            raise ValidationError(f"k must be >= 1, got {k}")
        n = len(self._entries)
        if n == 0:
            return []
        want = min(k, n)

        half_deg = 0.5
        scored: list[tuple[float, str]] = []
        # Scanned window [lo, hi) grows monotonically and always contains the
        # origin's insertion point, so each expansion scores only new entries.
        lo = hi = bisect_left(self._lats, origin.lat)
        while True:
            nlo, nhi = self._band(origin.lat, half_deg)
            for i in range(nlo, lo):
                key, p = self._entries[i]
                scored.append((haversine_distance(origin, p), key))
            for i in range(hi, nhi):
                key, p = self._entries[i]
                scored.append((haversine_distance(origin, p), key))
            lo, hi = nlo, nhi
            whole = lo == 0 and hi == n
            if len(scored) >= want:
                scored.sort()
                guarantee = EARTH_RADIUS_M * (math.radians(half_deg) - _BAND_MARGIN_RAD)
                if whole or scored[want - 1][0] <= guarantee:
                    return [(key, d) for d, key in scored[:want]]
            elif whole:
                scored.sort()
                return [(key, d) for d, key in scored]
            half_deg *= 2.0

    def within_radius(self, origin: GeoPoint, radius_m: float) -> list[tuple[str, float]]:
        """Exactly the entries at distance <= radius_m, ascending by (distance, key)."""
        if not (math.isfinite(radius_m) and radius_m > 0):
            raise ValidationError(f"radius must be > 0, got {radius_m}")
        half_deg = math.degrees(radius_m / EARTH_RADIUS_M + _BAND_MARGIN_RAD)
        lo, hi = self._band(origin.lat, half_deg)
        hits = []
        for key, p in self._entries[lo:hi]:
            d = haversine_distance(origin, p)
            if d <= radius_m:
                hits.append((d, key))
        hits.sort()
        return [(key, d) for d, key in hits]


def build_index(points: list[tuple[str, GeoPoint]]) -> SpatialIndex:
    """Build an immutable SpatialIndex; keys must be unique."""
    seen = set()
    for key, _ in points:
        if key in seen:
            raise DuplicateKey(f"duplicate key in spatial index: {key!r}")
        seen.add(key)
    return SpatialIndex(list(points))
