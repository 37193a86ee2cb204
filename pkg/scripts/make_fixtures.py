#!/usr/bin/env python3
"""Generate the synthetic fixture dataset under data/fixtures/.

A small road grid and a handful of tour sites and hotels around Minna
(9.58N, 6.55E). Deterministic: re-running reproduces identical files.
"""
from __future__ import annotations

import csv
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from dms.geo import GeoPoint, haversine_distance  # noqa: E402

OUT = Path(__file__).resolve().parents[1] / "data" / "fixtures"

DESTINATIONS = [
    ("gurara-falls", "Gurara Falls", "Ecological", 9.3030, 6.6880,
     "Broad waterfall on the Gurara River", "daily 08:00-18:00"),
    ("zuma-rock", "Zuma Rock", "Cultural", 9.1290, 7.2340,
     "Monolith north of Abuja, visible from the highway", "always open"),
    ("shiroro-lake", "Shiroro Lake", "Ecological", 9.9700, 6.8350,
     "Reservoir with boating and fishing", "daily 07:00-19:00"),
    ("kainji-park", "Kainji National Park", "Ecological", 9.8500, 4.5400,
     "Savannah wildlife reserve", "seasonal, ask rangers"),
    ("minna-central-market", "Minna Central Market", "Modern", 9.6140, 6.5560,
     "City market quarter", "Mon-Sat 08:00-17:00"),
    ("bida-brassworks", "Bida Brassworks", "Cultural", 9.0830, 6.0100,
     "Traditional brass casting workshops", "Mon-Sat 09:00-16:00"),
    ("zungeru-ruins", "Zungeru Colonial Ruins", "Cultural", 9.8060, 6.1540,
     "Remains of the former colonial capital", "daily 09:00-17:00"),
    ("tagwai-dam", "Tagwai Dam", "Ecological", 9.5800, 6.6700,
     "Dam and picnic grounds east of Minna", "daily 08:00-18:00"),
]

# 4x4 grid of map nodes over Minna, ids m00..m33, ~1.1 km apart
GRID_ORIGIN = (9.580, 6.520)
GRID_STEP = 0.010
GRID_N = 4

HOTELS = [
    ("minna-grand", "Minna Grand Hotel", 9.6120, 6.5500, "minna-central-market",
     [("standard", 2, 8, 15000), ("suite", 4, 2, 42000)]),
    ("gurara-lodge", "Gurara View Lodge", 9.3100, 6.6900, "gurara-falls",
     [("standard", 2, 5, 9000)]),
    ("riverside-inn", "Riverside Inn", 9.5900, 6.5400, "",
     [("standard", 3, 6, 11000), ("family", 5, 2, 20000)]),
    ("zuma-rest", "Zuma Rest House", 9.1350, 7.2300, "zuma-rock",
     [("standard", 2, 4, 7000)]),
]


def grid_nodes():
    nodes = {}
    for i in range(GRID_N):
        for j in range(GRID_N):
            nodes[f"m{i}{j}"] = GeoPoint(
                GRID_ORIGIN[0] + i * GRID_STEP, GRID_ORIGIN[1] + j * GRID_STEP
            )
    return nodes


def grid_edges(nodes):
    """Streets along the grid; road length is straight-line plus a wiggle."""
    edges = []
    for i in range(GRID_N):
        for j in range(GRID_N):
            here = f"m{i}{j}"
            for di, dj in ((0, 1), (1, 0)):
                ni, nj = i + di, j + dj
                if ni >= GRID_N or nj >= GRID_N:
                    continue
                there = f"m{ni}{nj}"
                straight = haversine_distance(nodes[here], nodes[there])
                length = round(straight * (1.15 if (i + j) % 2 == 0 else 1.35), 1)
                mode = "drive" if i % 2 == 0 else "walk"
                edges.append((here, there, length, mode, "true"))
    # one-way expressway across the diagonal
    straight = haversine_distance(nodes["m00"], nodes["m33"])
    edges.append(("m00", "m33", round(straight * 1.05, 1), "drive", "false"))
    return edges


def main():
    OUT.mkdir(parents=True, exist_ok=True)

    with open(OUT / "destinations.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "name", "category", "lat", "lon", "description", "open_info"])
        w.writerows(DESTINATIONS)

    nodes = grid_nodes()
    with open(OUT / "nodes.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "lat", "lon"])
        for node_id in sorted(nodes):
            p = nodes[node_id]
            w.writerow([node_id, f"{p.lat:.6f}", f"{p.lon:.6f}"])

    with open(OUT / "edges.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["from", "to", "length_m", "mode", "bidirectional"])
        w.writerows(grid_edges(nodes))

    with open(OUT / "hotels.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["hotel_id", "name", "lat", "lon", "destination_id",
                    "room_type", "capacity", "count", "nightly_rate_minor"])
        for hotel_id, name, lat, lon, dest, room_types in HOTELS:
            for rt_name, capacity, count, rate in room_types:
                w.writerow([hotel_id, name, lat, lon, dest, rt_name, capacity, count, rate])

    print(f"fixtures written to {OUT}")


if __name__ == "__main__":
    main()
