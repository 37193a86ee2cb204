#!/usr/bin/env python3
"""End-to-end demo: boot a service on an ephemeral port, ingest the fixture
dataset, and walk the tourist flow over real HTTP.

Usage: python scripts/demo_flow.py
"""
from __future__ import annotations

import sys
from datetime import date, timedelta
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import requests  # noqa: E402

from dms.config import ServiceConfig  # noqa: E402
from dms.service import Service  # noqa: E402

FIXTURES = Path(__file__).resolve().parents[1] / "data" / "fixtures"


def step(label, resp):
    print(f"-> {label}: {resp.status_code}")
    return resp.json()


def main():
    config = ServiceConfig(port=0, backend="memory").validate()
    service = Service(config)
    app = service.app
    report = app.ingest_destinations(str(FIXTURES / "destinations.csv"))
    print(f"destinations ingested: {report.accepted}")
    rejected = app.load_road_graph(str(FIXTURES / "nodes.csv"), str(FIXTURES / "edges.csv"))
    print(f"road graph: {len(app.graph.nodes)} nodes, {len(app.graph.edges)} edges, "
          f"{len(rejected)} rows rejected")
    report = app.ingest_hotels(str(FIXTURES / "hotels.csv"))
    print(f"hotels ingested: {report.accepted}")
    service.start()
    base = service.base_url
    print(f"service at {base}\n")

    try:
        step("health", requests.get(f"{base}/api/health"))

        step("register", requests.post(f"{base}/api/users",
                                       json={"username": "demo", "password": "wanderlust9"}))
        session = step("login", requests.post(f"{base}/api/session",
                                              json={"username": "demo",
                                                    "password": "wanderlust9"}))
        auth = {"Authorization": f"Bearer {session['token']}"}

        sites = step("search ecological sites",
                     requests.get(f"{base}/api/destinations",
                                  params={"category": "Ecological"}))
        for d in sites:
            print(f"     {d['id']}: {d['name']}")

        route = step("route across town",
                     requests.get(f"{base}/api/route",
                                  params={"from": "9.58,6.52", "to": "9.61,6.55",
                                          "metric": "time"}))
        print(f"     {' -> '.join(route['nodes'])}  "
              f"{route['total_length_m']:.0f} m, {route['est_time_s']:.0f} s")

        check_in = date.today().isoformat()
        check_out = (date.today() + timedelta(days=2)).isoformat()
        offers = step("hotel availability",
                      requests.get(f"{base}/api/hotels/availability",
                                   params={"check_in": check_in, "check_out": check_out,
                                           "rooms": 1, "near": "9.6,6.55",
                                           "radius_m": 5000}))
        for offer in offers:
            print(f"     {offer['hotel_id']} {offer['room_type']}: "
                  f"{offer['available']} free @ {offer['nightly_rate_minor']} minor/night")

        booking = step("hold a room",
                       requests.post(f"{base}/api/bookings/hold", headers=auth,
                                     json={"hotel_id": offers[0]["hotel_id"],
                                           "room_type": offers[0]["room_type"],
                                           "check_in": check_in,
                                           "check_out": check_out, "rooms": 1}))
        booking = step("confirm the hold",
                       requests.post(f"{base}/api/bookings/{booking['id']}/confirm",
                                     headers=auth))
        print(f"     booking {booking['id']} is {booking['state']}")

        step("logout", requests.delete(f"{base}/api/session", headers=auth))
        print("\ndemo complete")
    finally:
        service.stop()


if __name__ == "__main__":
    main()
