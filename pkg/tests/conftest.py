import math
import random

import pytest

from dms.geo import GeoPoint


def vector_angle_distance(a: GeoPoint, b: GeoPoint, radius: float = 6_371_008.8) -> float:
    """Independent great-circle oracle: angle via 3D unit vectors.

    theta = atan2(|u x v|, u . v) — a different formulation than the
    implementation under test, numerically stable at all separations.
    """
    u = _unit(a)
    v = _unit(b)
    cx = (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )
    cross = math.sqrt(cx[0] ** 2 + cx[1] ** 2 + cx[2] ** 2)
    dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
    return radius * math.atan2(cross, dot)


def _unit(p: GeoPoint) -> tuple[float, float, float]:
    lat = math.radians(p.lat)
    lon = math.radians(p.lon)
    return (math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat))


def random_point(rng: random.Random) -> GeoPoint:
    return GeoPoint(rng.uniform(-90.0, 90.0), rng.uniform(-179.999, 180.0))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xD35)
