"""HTTP/JSON wire protocol: request dispatch over the domain modules.

handle_request is a pure function from (method, path, headers, body) to
(status, payload); the socket layer in service.py is a thin adapter around
it, so the same dispatch logic can be driven in-process by tests and over
the wire by clients, and both must produce identical results.
"""
from __future__ import annotations

import json
import re
from datetime import date
from typing import Any

from . import catalog as catalog_mod
from . import routing
from .errors import (
    CapacityConflict,
    DomainError,
    DuplicateId,
    EmptyGraph,
    Forbidden,
    FormatError,
    HoldExpired,
    InvalidState,
    IoError,
    NoAvailability,
    NotFound,
    Unauthorized,
    Unreachable,
    ValidationError,
)
from .geo import GeoPoint
from .reservations import booking_to_dict

_STATUS_MAP: list[tuple[type, int]] = [
    (ValidationError, 400),
    (FormatError, 400),
    (Unauthorized, 401),
    (Forbidden, 403),
    (NotFound, 404),
    (DuplicateId, 409),
    (NoAvailability, 409),
    (CapacityConflict, 409),
    (InvalidState, 409),
    (HoldExpired, 409),
    (Unreachable, 409),
    (EmptyGraph, 409),
    (IoError, 500),
]


def _status_for(exc: DomainError) -> int:
    for cls, code in _STATUS_MAP:
        if isinstance(exc, cls):
            return code
    return 500


def _error_body(exc: DomainError) -> dict:
    return {"error": type(exc).__name__, "detail": str(exc)}


def handle_request(app, method: str, path: str, headers: dict | None = None,
                   body: Any = None) -> tuple[int, Any]:
    """Dispatch one request; total over its inputs — failures become 4xx/5xx."""
    headers = {k.lower(): v for k, v in (headers or {}).items()}
    raw_path, _, raw_query = path.partition("?")
    try:
        params = _parse_query(raw_query)
        payload = _parse_body(body)
        for rule_method, pattern, needs_auth, handler in _ROUTES:
            m = pattern.match(raw_path)
            if not m:
                continue
            if method != rule_method:
                continue
            user = _require_user(app, headers) if needs_auth else None
            return handler(app, user, m, params, payload, headers)
        if any(p.match(raw_path) for _, p, _, _ in _ROUTES):
            return 405, {"error": "MethodNotAllowed", "detail": f"{method} {raw_path}"}
        return 404, {"error": "NotFound", "detail": f"no endpoint {raw_path}"}
    except DomainError as exc:
        return _status_for(exc), _error_body(exc)
    except Exception as exc:  # internal fault, never an expected outcome
        return 500, {"error": "InternalError", "detail": f"{type(exc).__name__}: {exc}"}


# -- parsing helpers ---------------------------------------------------------

def _parse_body(body: Any) -> dict:
    if body is None or body == b"" or body == "":
        return {}
    if isinstance(body, (bytes, str)):
        try:
            parsed = json.loads(body)
        except (json.JSONDecodeError, UnicodeDecodeError):
            raise ValidationError("request body is not valid JSON") from None
    else:
        parsed = body
    if not isinstance(parsed, dict):
        raise ValidationError("request body must be a JSON object")
    return parsed


def _parse_query(raw: str) -> dict[str, str]:
    from urllib.parse import parse_qsl

    return dict(parse_qsl(raw, keep_blank_values=True))


def _require_user(app, headers: dict):
    auth = headers.get("authorization", "")
    if not auth.startswith("Bearer "):
        raise Unauthorized("missing bearer token")
    return app.identity.authenticate(auth[len("Bearer "):].strip(), now=app.clock())


def _parse_latlon(raw: str, what: str) -> GeoPoint:
    parts = raw.split(",")
    if len(parts) != 2:
        raise ValidationError(f"{what} must be lat,lon, got {raw!r}")
    try:
        return GeoPoint(float(parts[0]), float(parts[1]))
    except ValueError:
        raise ValidationError(f"{what} must be numeric lat,lon, got {raw!r}") from None


def _parse_date(raw: str | None, what: str) -> date:
    if not raw:
        raise ValidationError(f"missing {what}")
    try:
        return date.fromisoformat(raw)
    except ValueError:
        raise ValidationError(f"{what} must be an ISO date (YYYY-MM-DD), got {raw!r}") from None


def _parse_near(params: dict) -> tuple[GeoPoint, float] | None:
    if "near" not in params and "radius_m" not in params:
        return None
    if "near" not in params or "radius_m" not in params:
        raise ValidationError("near and radius_m must be supplied together")
    try:
        radius = float(params["radius_m"])
    except ValueError:
        raise ValidationError(f"radius_m must be numeric, got {params['radius_m']!r}") from None
    return _parse_latlon(params["near"], "near"), radius


def _field(payload: dict, name: str, kind=str):
    if name not in payload:
        raise ValidationError(f"missing field {name!r}")
    value = payload[name]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise ValidationError(f"field {name!r} must be an integer")
    if kind is str and not isinstance(value, str):
        raise ValidationError(f"field {name!r} must be a string")
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(f"field {name!r} must be a number")
        value = float(value)
    return value


# -- handlers ------------------------------------------------------------------

def _h_health(app, user, m, params, payload, headers):
    return 200, {"status": "ok"}


def _h_register(app, user, m, params, payload, headers):
    username = _field(payload, "username")
    password = _field(payload, "password")
    role = payload.get("role", "tourist")
    if role == "admin":
        raise Forbidden("admin accounts are created from the CLI only")
    user_id = app.identity.register_user(username, password, role)
    return 201, {"user_id": user_id}


def _h_login(app, user, m, params, payload, headers):
    session = app.identity.login(
        _field(payload, "username"), _field(payload, "password"), now=app.clock()
    )
    account = app.identity.get_user(session.user_id)
    return 200, {
        "token": session.token,
        "user_id": session.user_id,
        "username": account.username,
        "role": account.role,
        "issued_at": session.issued_at,
        "expires_at": session.expires_at,
    }


def _h_logout(app, user, m, params, payload, headers):
    """Revoke the presented token; idempotent, succeeds even if never issued."""
    auth = headers.get("authorization", "")
    if auth.startswith("Bearer "):
        app.identity.logout(auth[len("Bearer "):].strip())
    return 200, {"status": "ok"}


def _h_list_destinations(app, user, m, params, payload, headers):
    category = params.get("category") or None
    query = params.get("q") or None
    near = _parse_near(params)
    results = app.catalog.search(query=query, category=category, near=near)
    return 200, [catalog_mod.destination_to_dict(d) for d in results]


def _h_get_destination(app, user, m, params, payload, headers):
    return 200, catalog_mod.destination_to_dict(app.catalog.get(m.group("id")))


def _h_create_destination(app, user, m, params, payload, headers):
    if user.role not in ("site_manager", "admin"):
        raise Forbidden("only site managers and admins may create destinations")
    manager_id = payload.get("manager_id")
    if manager_id is None and user.role == "site_manager":
        manager_id = user.id
    dest = catalog_mod.Destination(
        id=m.group("id"),
        name=_field(payload, "name"),
        category=_field(payload, "category"),
        location=GeoPoint(_field(payload, "lat", float), _field(payload, "lon", float)),
        description=payload.get("description", ""),
        media=tuple(payload.get("media") or ()),
        open_info=payload.get("open_info", ""),
        manager_id=manager_id,
    )
    app.catalog.add(dest)
    return 201, catalog_mod.destination_to_dict(dest)


def _h_route(app, user, m, params, payload, headers):
    graph = app.graph
    src_point = _parse_latlon(params.get("from", ""), "from")
    dst_point = _parse_latlon(params.get("to", ""), "to")
    metric = params.get("metric", "distance")
    src = routing.snap_to_graph(graph, src_point)
    dst = routing.snap_to_graph(graph, dst_point)
    route = routing.shortest_route(graph, src, dst, metric,
                                   speeds_kmh=app.config.mode_speeds_kmh)
    return 200, {
        "from_node": src,
        "to_node": dst,
        "nodes": list(route.node_sequence),
        "coordinates": [
            {"id": n, "lat": graph.nodes[n].lat, "lon": graph.nodes[n].lon}
            for n in route.node_sequence
        ],
        "legs": [
            {"from": e.src, "to": e.dst, "length_m": e.length_m, "mode": e.mode}
            for e in route.edges
        ],
        "total_length_m": route.total_length,
        "est_time_s": route.est_time,
        "metric": route.metric,
    }


def _h_map(app, user, m, params, payload, headers):
    raw = params.get("bbox", "")
    parts = raw.split(",")
    if len(parts) != 4:
        raise ValidationError(f"bbox must be s,w,n,e, got {raw!r}")
    try:
        s, w, n, e = (float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"bbox must be numeric s,w,n,e, got {raw!r}") from None
    if s > n or w > e:
        raise ValidationError(f"bbox south/west must not exceed north/east: {raw}")

    def inside(p: GeoPoint) -> bool:
        return s <= p.lat <= n and w <= p.lon <= e

    graph = app.graph
    nodes = [
        {"id": node_id, "lat": p.lat, "lon": p.lon}
        for node_id, p in sorted(graph.nodes.items()) if inside(p)
    ]
    visible = {node["id"] for node in nodes}
    edges = [
        {"from": edge.src, "to": edge.dst, "length_m": edge.length_m, "mode": edge.mode}
        for edge in sorted(graph.edges, key=lambda e: (e.src, e.dst, e.length_m, e.mode))
        if edge.src in visible and edge.dst in visible
    ]
    pois = [
        catalog_mod.destination_to_dict(d)
        for d in app.catalog.search() if inside(d.location)
    ]
    return 200, {"bbox": [s, w, n, e], "nodes": nodes, "edges": edges, "pois": pois}


def _h_availability(app, user, m, params, payload, headers):
    check_in = _parse_date(params.get("check_in"), "check_in")
    check_out = _parse_date(params.get("check_out"), "check_out")
    try:
        rooms = int(params.get("rooms", "1"))
    except ValueError:
        raise ValidationError(f"rooms must be an integer, got {params['rooms']!r}") from None
    near = _parse_near(params)
    rows = app.reservations.search_availability(check_in, check_out, rooms, near=near)
    return 200, [
        {"hotel_id": h, "room_type": rt, "available": free, "nightly_rate_minor": rate}
        for h, rt, free, rate in rows
    ]


def _h_hold(app, user, m, params, payload, headers):
    booking = app.reservations.hold_booking(
        guest_id=user.id,
        hotel_id=_field(payload, "hotel_id"),
        room_type=_field(payload, "room_type"),
        check_in=_parse_date(payload.get("check_in"), "check_in"),
        check_out=_parse_date(payload.get("check_out"), "check_out"),
        rooms=_field(payload, "rooms", int),
        now=app.clock(),
    )
    return 201, booking_to_dict(booking)


def _own_booking(app, user, booking_id: str):
    booking = app.reservations.get_booking(booking_id)
    if booking.guest_id != user.id and user.role != "admin":
        raise Forbidden("not your booking")
    return booking


def _h_confirm(app, user, m, params, payload, headers):
    _own_booking(app, user, m.group("id"))
    booking = app.reservations.confirm_booking(m.group("id"), now=app.clock())
    return 200, booking_to_dict(booking)


def _h_cancel(app, user, m, params, payload, headers):
    _own_booking(app, user, m.group("id"))
    booking = app.reservations.cancel_booking(m.group("id"))
    return 200, booking_to_dict(booking)


def _h_get_booking(app, user, m, params, payload, headers):
    return 200, booking_to_dict(_own_booking(app, user, m.group("id")))


def _thread_dict(thread, posts) -> dict:
    return {
        "id": thread.id,
        "destination_id": thread.destination_id,
        "title": thread.title,
        "author_id": thread.author_id,
        "created_at": thread.created_at,
        "posts": [
            {"id": p.id, "thread_id": p.thread_id, "author_id": p.author_id,
             "body": p.body, "created_at": p.created_at}
            for p in posts
        ],
    }


def _h_list_threads(app, user, m, params, payload, headers):
    dest_id = m.group("id")
    app.catalog.get(dest_id)  # 404 for unknown destinations
    return 200, [_thread_dict(t, posts) for t, posts in app.community.list_threads(dest_id)]


def _h_create_thread(app, user, m, params, payload, headers):
    thread_id = app.community.create_thread(
        author_id=user.id,
        destination_id=m.group("id"),
        title=_field(payload, "title"),
        now=app.clock(),
    )
    return 201, {"thread_id": thread_id}


def _h_post_reply(app, user, m, params, payload, headers):
    post_id = app.community.post_reply(
        author_id=user.id,
        thread_id=m.group("id"),
        body=_field(payload, "body"),
        now=app.clock(),
    )
    return 201, {"post_id": post_id}


def _h_delete_post(app, user, m, params, payload, headers):
    app.community.delete_post(user, m.group("id"))
    return 200, {"status": "deleted"}


_ID = r"(?P<id>[^/]+)"

_ROUTES: list[tuple[str, re.Pattern, bool, Any]] = [
    ("GET", re.compile(r"^/api/health$"), False, _h_health),
    ("POST", re.compile(r"^/api/session$"), False, _h_login),
    ("DELETE", re.compile(r"^/api/session$"), False, _h_logout),
    ("POST", re.compile(r"^/api/users$"), False, _h_register),
    ("GET", re.compile(r"^/api/destinations$"), False, _h_list_destinations),
    ("GET", re.compile(rf"^/api/destinations/{_ID}$"), False, _h_get_destination),
    ("POST", re.compile(rf"^/api/destinations/{_ID}$"), True, _h_create_destination),
    ("GET", re.compile(r"^/api/route$"), False, _h_route),
    ("GET", re.compile(r"^/api/map$"), False, _h_map),
    ("GET", re.compile(r"^/api/hotels/availability$"), False, _h_availability),
    ("POST", re.compile(r"^/api/bookings/hold$"), True, _h_hold),
    ("POST", re.compile(rf"^/api/bookings/{_ID}/confirm$"), True, _h_confirm),
    ("DELETE", re.compile(rf"^/api/bookings/{_ID}$"), True, _h_cancel),
    ("GET", re.compile(rf"^/api/bookings/{_ID}$"), True, _h_get_booking),
    ("GET", re.compile(rf"^/api/destinations/{_ID}/threads$"), False, _h_list_threads),
    ("POST", re.compile(rf"^/api/destinations/{_ID}/threads$"), True, _h_create_thread),
    ("POST", re.compile(rf"^/api/threads/{_ID}/posts$"), True, _h_post_reply),
    ("DELETE", re.compile(rf"^/api/posts/{_ID}$"), True, _h_delete_post),
]
