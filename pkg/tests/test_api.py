import itertools
import json
import random
from datetime import date, timedelta

import pytest
import requests

from dms.api import handle_request
from dms.config import ServiceConfig
from dms.errors import ConfigError
from dms.geo import GeoPoint
from dms.reservations import Hotel, RoomType
from dms.routing import Edge, RoadGraph, shortest_route, snap_to_graph
from dms.service import AppState, Service, start_service

D0 = date(2026, 3, 1)


def det_kwargs(seed=1234):
    """Deterministic clock/token/id sources so two backends given the same
    request script produce byte-identical responses."""
    rng = random.Random(seed)
    ticks = itertools.count(1_000_000)
    return dict(
        clock=lambda: float(next(ticks)),
        token_source=lambda: f"{rng.getrandbits(128):032x}",
        id_source=lambda: f"{rng.getrandbits(64):016x}",
    )


def make_config(backend, tmp_path):
    return ServiceConfig(
        backend=backend,
        data_dir=str(tmp_path / "data") if backend == "disk" else None,
        hash_iterations=1000,
        hold_ttl_s=900.0,
    ).validate()


FIXTURE_GRAPH = RoadGraph(
    {
        "A": GeoPoint(9.600, 6.500),
        "B": GeoPoint(9.610, 6.500),
        "C": GeoPoint(9.620, 6.500),
        "D": GeoPoint(9.620, 6.520),
    },
    [
        Edge("A", "B", 2000.0, "walk"),
        Edge("B", "A", 2000.0, "walk"),
        Edge("B", "C", 3000.0, "walk"),
        Edge("C", "B", 3000.0, "walk"),
        Edge("C", "D", 2500.0, "drive"),
    ],
)


def seed_app(app: AppState):
    """Data a deployment would load via CLI: accounts, graph, hotels, places."""
    app.identity.register_user("root", "admin-pass-1", "admin")
    manager_id = app.identity.register_user("mgr", "manager-pass", "site_manager")
    app.set_graph(FIXTURE_GRAPH)
    app.reservations.upsert_hotel(Hotel(
        "h1", "Minna Grand", GeoPoint(9.61, 6.55), None,
        (RoomType("standard", 2, 5, 12000), RoomType("suite", 4, 1, 40000)),
    ))
    app.reservations.upsert_hotel(Hotel(
        "h2", "Riverside Inn", GeoPoint(9.30, 6.69), None,
        (RoomType("standard", 2, 3, 8000),),
    ))
    return manager_id


@pytest.fixture(params=["memory", "disk"])
def app(request, tmp_path):
    app = AppState(make_config(request.param, tmp_path), **det_kwargs())
    seed_app(app)
    yield app
    app.close()


class Client:
    """In-process API client mirroring an HTTP client's shape."""

    def __init__(self, app):
        self.app = app
        self.token = None

    def call(self, method, path, body=None, token="default"):
        headers = {}
        tok = self.token if token == "default" else token
        if tok:
            headers["Authorization"] = f"Bearer {tok}"
        raw = json.dumps(body) if body is not None else None
        return handle_request(self.app, method, path, headers, raw)

    def login(self, username, password):
        status, payload = self.call("POST", "/api/session",
                                    {"username": username, "password": password})
        assert status == 200, payload
        self.token = payload["token"]
        return payload

    def register(self, username, password, role="tourist"):
        return self.call("POST", "/api/users",
                         {"username": username, "password": password, "role": role})


@pytest.fixture
def client(app):
    return Client(app)


class TestHealthAndDispatch:
    def test_health(self, client):
        assert client.call("GET", "/api/health") == (200, {"status": "ok"})

    def test_unknown_path_404(self, client):
        status, body = client.call("GET", "/api/nope")
        assert status == 404

    def test_wrong_method_405(self, client):
        status, _ = client.call("PUT", "/api/health")
        assert status == 405

    def test_malformed_json_400(self, app):
        status, body = handle_request(app, "POST", "/api/users", {}, b"{nope")
        assert status == 400
        assert body["error"] == "ValidationError"


class TestAccountsAndSessions:
    def test_register_login_flow(self, client):
        status, payload = client.register("amina", "longenough")
        assert status == 201 and "user_id" in payload
        session = client.login("amina", "longenough")
        assert session["role"] == "tourist"
        assert session["expires_at"] > session["issued_at"]

    def test_duplicate_username_409(self, client):
        client.register("amina", "longenough")
        status, body = client.register("amina", "longenough")
        assert status == 409 and body["error"] == "DuplicateUsername"

    def test_weak_password_400(self, client):
        status, body = client.register("amina", "short")
        assert status == 400 and body["error"] == "WeakPassword"

    def test_admin_registration_forbidden(self, client):
        status, body = client.register("evil", "longenough", role="admin")
        assert status == 403

    def test_bad_credentials_401(self, client):
        client.register("amina", "longenough")
        status, body = client.call("POST", "/api/session",
                                   {"username": "amina", "password": "wrong-pass"})
        assert status == 401
        status2, body2 = client.call("POST", "/api/session",
                                     {"username": "ghost", "password": "wrong-pass"})
        assert status2 == 401 and body2 == body

    def test_logout_revokes_token(self, client):
        client.register("amina", "longenough")
        client.login("amina", "longenough")
        assert client.call("DELETE", "/api/session")[0] == 200
        status, _ = client.call("POST", "/api/bookings/hold", {})
        assert status == 401
        # idempotent
        assert client.call("DELETE", "/api/session")[0] == 200


def create_destination(client, dest_id="gurara", name="Gurara Falls",
                       category="Ecological", lat=9.303, lon=6.688, **extra):
    client.login("mgr", "manager-pass")
    body = {"name": name, "category": category, "lat": lat, "lon": lon, **extra}
    return client.call("POST", f"/api/destinations/{dest_id}", body)


class TestDestinations:
    def test_create_then_get(self, client):
        status, created = create_destination(client, description="waterfall")
        assert status == 201
        status, got = client.call("GET", "/api/destinations/gurara", token=None)
        assert status == 200
        assert got == created
        assert got["manager_id"] == self_id(client)

    def test_create_requires_manager_role(self, client):
        client.register("amina", "longenough")
        client.login("amina", "longenough")
        status, _ = client.call("POST", "/api/destinations/x",
                                {"name": "X", "category": "Modern", "lat": 1, "lon": 1})
        assert status == 403

    def test_create_requires_token(self, client):
        status, _ = client.call("POST", "/api/destinations/x",
                                {"name": "X", "category": "Modern", "lat": 1, "lon": 1},
                                token=None)
        assert status == 401

    def test_duplicate_409(self, client):
        create_destination(client)
        status, body = create_destination(client)
        assert status == 409 and body["error"] == "DuplicateId"

    def test_bad_category_400(self, client):
        status, body = create_destination(client, dest_id="b", category="Beach")
        assert status == 400

    def test_unknown_404(self, client):
        status, _ = client.call("GET", "/api/destinations/nope")
        assert status == 404

    def test_list_with_filters(self, client):
        create_destination(client, "gurara", "Gurara Falls", "Ecological", 9.303, 6.688)
        create_destination(client, "zuma", "Zuma Rock", "Cultural", 9.129, 7.234)
        status, all_dests = client.call("GET", "/api/destinations", token=None)
        assert status == 200 and [d["id"] for d in all_dests] == ["gurara", "zuma"]
        _, by_q = client.call("GET", "/api/destinations?q=FALLS")
        assert [d["id"] for d in by_q] == ["gurara"]
        _, by_cat = client.call("GET", "/api/destinations?category=Cultural")
        assert [d["id"] for d in by_cat] == ["zuma"]
        _, near = client.call("GET", "/api/destinations?near=9.3,6.7&radius_m=5000")
        assert [d["id"] for d in near] == ["gurara"]
        status, _ = client.call("GET", "/api/destinations?near=9.3,6.7&radius_m=0")
        assert status == 400
        status, _ = client.call("GET", "/api/destinations?near=9.3,6.7")
        assert status == 400


def self_id(client):
    status, payload = client.call("POST", "/api/session",
                                  {"username": "mgr", "password": "manager-pass"})
    return payload["user_id"]


class TestRouteAndMap:
    def test_route_matches_module_call(self, app, client):
        status, body = client.call(
            "GET", "/api/route?from=9.6,6.5&to=9.62,6.5&metric=distance")
        assert status == 200
        direct = shortest_route(app.graph, "A", "C", "distance",
                                speeds_kmh=app.config.mode_speeds_kmh)
        assert body["nodes"] == list(direct.node_sequence)
        assert body["total_length_m"] == direct.total_length
        assert body["est_time_s"] == direct.est_time
        assert body["from_node"] == "A" and body["to_node"] == "C"

    def test_route_snaps_to_nearest_node(self, app):
        snapped = snap_to_graph(app.graph, GeoPoint(9.6001, 6.5001))
        assert snapped == "A"
        status, body = handle_request(app, "GET", "/api/route?from=9.6001,6.5001&to=9.62,6.5")
        assert status == 200 and body["from_node"] == "A"

    def test_metric_toggle_changes_cost_basis(self, client):
        _, dist = client.call("GET", "/api/route?from=9.6,6.5&to=9.62,6.5&metric=distance")
        _, tim = client.call("GET", "/api/route?from=9.6,6.5&to=9.62,6.5&metric=time")
        assert dist["metric"] == "distance" and tim["metric"] == "time"
        assert dist["total_length_m"] == tim["total_length_m"]

    def test_unreachable_409(self, client):
        status, body = client.call("GET", "/api/route?from=9.62,6.52&to=9.6,6.5")
        assert status == 409 and body["error"] == "Unreachable"

    def test_zero_length_route(self, client):
        status, body = client.call("GET", "/api/route?from=9.6,6.5&to=9.6,6.5")
        assert status == 200
        assert body["total_length_m"] == 0.0 and body["nodes"] == ["A"]

    def test_bad_params_400(self, client):
        assert client.call("GET", "/api/route?from=x&to=9.6,6.5")[0] == 400
        assert client.call("GET", "/api/route?from=9.6,6.5&to=9.62,6.5&metric=hops")[0] == 400

    def test_map_bbox_filters(self, client):
        create_destination(client)
        status, body = client.call("GET", "/api/map?bbox=9.59,6.49,9.615,6.51", token=None)
        assert status == 200
        assert [n["id"] for n in body["nodes"]] == ["A", "B"]
        assert {(e["from"], e["to"]) for e in body["edges"]} == {("A", "B"), ("B", "A")}
        assert body["pois"] == []
        status, wide = client.call("GET", "/api/map?bbox=9.0,6.0,10.0,7.0")
        assert [d["id"] for d in wide["pois"]] == ["gurara"]
        assert client.call("GET", "/api/map?bbox=9.0,6.0")[0] == 400
        assert client.call("GET", "/api/map?bbox=9.5,6.5,9.0,6.0")[0] == 400


def iso(day_offset):
    return (D0 + timedelta(days=day_offset)).isoformat()


class TestBookingsOverApi:
    def hold_payload(self, rooms=1, hotel="h1", room_type="standard", ci=0, co=2):
        return {"hotel_id": hotel, "room_type": room_type,
                "check_in": iso(ci), "check_out": iso(co), "rooms": rooms}

    def test_availability_endpoint(self, client):
        status, rows = client.call(
            "GET", f"/api/hotels/availability?check_in={iso(0)}&check_out={iso(2)}&rooms=1")
        assert status == 200
        assert [(r["hotel_id"], r["room_type"]) for r in rows] == [
            ("h2", "standard"), ("h1", "standard"), ("h1", "suite")]
        status, rows = client.call(
            "GET",
            f"/api/hotels/availability?check_in={iso(0)}&check_out={iso(2)}&rooms=1"
            f"&near=9.61,6.55&radius_m=10000")
        assert [r["hotel_id"] for r in rows] == ["h1", "h1"]

    def test_availability_param_validation(self, client):
        assert client.call("GET", "/api/hotels/availability?check_in=bogus"
                                  f"&check_out={iso(1)}")[0] == 400
        assert client.call("GET", f"/api/hotels/availability?check_in={iso(1)}"
                                  f"&check_out={iso(0)}")[0] == 400

    def test_hold_requires_token(self, client):
        status, _ = client.call("POST", "/api/bookings/hold", self.hold_payload(), token=None)
        assert status == 401

    def test_full_booking_lifecycle(self, client):
        client.register("amina", "longenough")
        client.login("amina", "longenough")
        status, booking = client.call("POST", "/api/bookings/hold", self.hold_payload())
        assert status == 201
        assert booking["state"] == "held"
        assert booking["hold_expires_at"] is not None

        status, got = client.call("GET", f"/api/bookings/{booking['id']}")
        assert status == 200 and got == booking

        status, confirmed = client.call("POST", f"/api/bookings/{booking['id']}/confirm")
        assert status == 200 and confirmed["state"] == "confirmed"

        status, cancelled = client.call("DELETE", f"/api/bookings/{booking['id']}")
        assert status == 200 and cancelled["state"] == "cancelled"

        status, body = client.call("DELETE", f"/api/bookings/{booking['id']}")
        assert status == 409 and body["error"] == "InvalidState"

    def test_no_availability_409(self, client):
        client.register("amina", "longenough")
        client.login("amina", "longenough")
        status, body = client.call("POST", "/api/bookings/hold", self.hold_payload(rooms=6))
        assert status == 409 and body["error"] == "NoAvailability"

    def test_foreign_booking_forbidden(self, client):
        client.register("amina", "longenough")
        client.register("bola", "longenough")
        client.login("amina", "longenough")
        _, booking = client.call("POST", "/api/bookings/hold", self.hold_payload())
        client.login("bola", "longenough")
        assert client.call("POST", f"/api/bookings/{booking['id']}/confirm")[0] == 403
        assert client.call("GET", f"/api/bookings/{booking['id']}")[0] == 403
        client.login("root", "admin-pass-1")
        assert client.call("GET", f"/api/bookings/{booking['id']}")[0] == 200

    def test_expired_hold_confirm_409(self, app, client):
        client.register("amina", "longenough")
        client.login("amina", "longenough")
        _, booking = client.call("POST", "/api/bookings/hold", self.hold_payload())
        # the deterministic clock ticks 1 s per call; jump past the TTL
        for _ in range(int(app.config.hold_ttl_s) + 5):
            app.clock()
        status, body = client.call("POST", f"/api/bookings/{booking['id']}/confirm")
        assert status == 409 and body["error"] == "HoldExpired"
        _, got = client.call("GET", f"/api/bookings/{booking['id']}")
        assert got["state"] == "expired"


class TestThreadsOverApi:
    def test_thread_flow(self, client):
        create_destination(client)
        client.register("amina", "longenough")
        client.login("amina", "longenough")
        status, body = client.call("POST", "/api/destinations/gurara/threads",
                                   {"title": "Best season?"})
        assert status == 201
        tid = body["thread_id"]
        status, body = client.call("POST", f"/api/threads/{tid}/posts",
                                   {"body": "After the rains."})
        assert status == 201
        status, threads = client.call("GET", "/api/destinations/gurara/threads", token=None)
        assert status == 200 and len(threads) == 1
        assert threads[0]["title"] == "Best season?"
        assert [p["body"] for p in threads[0]["posts"]] == ["After the rains."]

    def test_thread_requires_existing_destination(self, client):
        client.register("amina", "longenough")
        client.login("amina", "longenough")
        status, _ = client.call("POST", "/api/destinations/nope/threads", {"title": "?"})
        assert status == 404
        assert client.call("GET", "/api/destinations/nope/threads")[0] == 404

    def test_reply_to_missing_thread_404(self, client):
        client.register("amina", "longenough")
        client.login("amina", "longenough")
        assert client.call("POST", "/api/threads/t9/posts", {"body": "x"})[0] == 404

    def test_post_deletion_rules(self, client):
        create_destination(client)  # mgr manages gurara
        client.register("amina", "longenough")
        client.login("amina", "longenough")
        _, t = client.call("POST", "/api/destinations/gurara/threads", {"title": "hi"})
        _, p = client.call("POST", f"/api/threads/{t['thread_id']}/posts", {"body": "spam"})
        assert client.call("DELETE", f"/api/posts/{p['post_id']}")[0] == 403
        client.login("mgr", "manager-pass")
        assert client.call("DELETE", f"/api/posts/{p['post_id']}")[0] == 200
        assert client.call("DELETE", f"/api/posts/{p['post_id']}")[0] == 404


TOURIST_SCRIPT = [
    ("GET", "/api/health", None, False),
    ("POST", "/api/users", {"username": "amina", "password": "longenough"}, False),
    ("POST", "/api/session", {"username": "amina", "password": "longenough"}, False),
    ("GET", "/api/destinations?q=falls", None, False),
    ("GET", "/api/route?from=9.6,6.5&to=9.62,6.5&metric=distance", None, False),
    ("GET", "/api/map?bbox=9.59,6.49,9.63,6.53", None, False),
    ("GET", f"/api/hotels/availability?check_in={iso(0)}&check_out={iso(2)}&rooms=1",
     None, False),
    ("POST", "/api/bookings/hold",
     {"hotel_id": "h1", "room_type": "standard",
      "check_in": iso(0), "check_out": iso(2), "rooms": 1}, True),
    ("HOLD_CONFIRM", None, None, True),
    ("GET", f"/api/hotels/availability?check_in={iso(0)}&check_out={iso(2)}&rooms=5",
     None, False),
    ("DELETE", "/api/session", None, True),
]


def run_script(call):
    """Drive the tourist flow through any transport; returns (status, body) list."""
    results = []
    token = None
    booking_id = None
    for method, path, body, needs_token in TOURIST_SCRIPT:
        if method == "HOLD_CONFIRM":
            method, path = "POST", f"/api/bookings/{booking_id}/confirm"
        status, payload = call(method, path, body, token if needs_token else None)
        if path == "/api/session" and method == "POST":
            token = payload["token"]
        if path == "/api/bookings/hold":
            booking_id = payload["id"]
        results.append((status, payload))
    return results


class TestWireTransparency:
    """The same flow in-process and over a real socket must agree exactly."""

    def test_http_equals_in_process(self, tmp_path):
        config = make_config("memory", tmp_path)
        config.port = 0
        service = Service(config, **det_kwargs())
        seed_app(service.app)
        service.start()
        try:
            def over_wire(method, path, body, token):
                headers = {"Authorization": f"Bearer {token}"} if token else {}
                resp = requests.request(
                    method, service.base_url + path, json=body, headers=headers, timeout=5)
                return resp.status_code, resp.json()

            wire_results = run_script(over_wire)
        finally:
            service.stop()

        app2 = AppState(make_config("memory", tmp_path), **det_kwargs())
        seed_app(app2)

        def in_process(method, path, body, token):
            headers = {"Authorization": f"Bearer {token}"} if token else {}
            raw = json.dumps(body) if body is not None else None
            return handle_request(app2, method, path, headers, raw)

        local_results = run_script(in_process)
        app2.close()
        assert wire_results == local_results

    def test_wire_route_matches_direct_module_operation(self, tmp_path):
        config = make_config("memory", tmp_path)
        config.port = 0
        service = Service(config, **det_kwargs())
        seed_app(service.app)
        service.start()
        try:
            resp = requests.get(
                service.base_url + "/api/route",
                params={"from": "9.6,6.5", "to": "9.62,6.5", "metric": "time"},
                timeout=5,
            )
            direct = shortest_route(service.app.graph, "A", "C", "time",
                                    speeds_kmh=config.mode_speeds_kmh)
            assert resp.status_code == 200
            assert resp.json()["est_time_s"] == direct.est_time
            assert resp.json()["total_length_m"] == direct.total_length
        finally:
            service.stop()


class TestBackendEquivalence:
    def test_identical_responses_across_backends(self, tmp_path):
        results = {}
        for backend in ("memory", "disk"):
            app = AppState(make_config(backend, tmp_path / backend), **det_kwargs(seed=77))
            seed_app(app)

            def call(method, path, body, token, app=app):
                headers = {"Authorization": f"Bearer {token}"} if token else {}
                raw = json.dumps(body) if body is not None else None
                return handle_request(app, method, path, headers, raw)

            results[backend] = run_script(call)
            app.close()
        assert results["memory"] == results["disk"]

    def test_disk_backend_resumes_identically_after_restart(self, tmp_path):
        config = make_config("disk", tmp_path)
        app = AppState(config, **det_kwargs(seed=9))
        seed_app(app)
        c = Client(app)
        c.register("amina", "longenough")
        c.login("amina", "longenough")
        _, booking = c.call("POST", "/api/bookings/hold", {
            "hotel_id": "h1", "room_type": "standard",
            "check_in": iso(0), "check_out": iso(2), "rooms": 2})
        token = c.token
        app.close()

        app2 = AppState(make_config("disk", tmp_path), **det_kwargs(seed=9))
        c2 = Client(app2)
        c2.token = token
        status, got = c2.call("GET", f"/api/bookings/{booking['id']}")
        assert status == 200 and got == booking
        status, rows = c2.call(
            "GET", f"/api/hotels/availability?check_in={iso(0)}&check_out={iso(2)}&rooms=1")
        h1 = next(r for r in rows if r["hotel_id"] == "h1" and r["room_type"] == "standard")
        assert h1["available"] == 3
        app2.close()


class TestServiceLifecycle:
    def test_invalid_ttl_rejected_before_binding(self, tmp_path):
        with pytest.raises(ConfigError):
            ServiceConfig(hold_ttl_s=0.0).validate()

    def test_start_empty_then_health(self, tmp_path):
        config = make_config("disk", tmp_path)
        config.port = 0
        service = start_service(config)
        try:
            resp = requests.get(service.base_url + "/api/health", timeout=5)
            assert resp.status_code == 200 and resp.json() == {"status": "ok"}
        finally:
            service.stop()

    def test_write_stop_restart_preserves_data(self, tmp_path):
        config = make_config("disk", tmp_path)
        config.port = 0
        service = Service(config, **det_kwargs())
        seed_app(service.app)
        service.start()
        try:
            requests.post(service.base_url + "/api/users",
                          json={"username": "amina", "password": "longenough"},
                          timeout=5).raise_for_status()
        finally:
            service.stop()

        config2 = make_config("disk", tmp_path)
        config2.port = 0
        service2 = start_service(config2)
        try:
            resp = requests.post(service2.base_url + "/api/session",
                                 json={"username": "amina", "password": "longenough"},
                                 timeout=5)
            assert resp.status_code == 200
        finally:
            service2.stop()

    def test_address_in_use(self, tmp_path):
        config = make_config("memory", tmp_path)
        config.port = 0
        service = start_service(config)
        try:
            from dms.errors import AddressInUse
            config2 = make_config("memory", tmp_path)
            config2.port = service.address[1]
            with pytest.raises(AddressInUse):
                start_service(config2)
        finally:
            service.stop()
