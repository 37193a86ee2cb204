"""Hotel inventory and the hold -> confirm -> cancel booking lifecycle.

Stays are half-open date intervals [check_in, check_out): the guest occupies
nights check_in .. check_out-1, so back-to-back stays never collide. The
capacity invariant — for every hotel, room type and night, held+confirmed
rooms never exceed the room count — is re-checked after every mutation.
"""
from __future__ import annotations

import csv
import threading
import uuid
from dataclasses import dataclass, replace
from datetime import date
from typing import Callable, Optional

from . import geo
from .errors import (
    CapacityConflict,
    FormatError,
    HoldExpired,
    InvalidState,
    IoError,
    NoAvailability,
    NotFound,
    ValidationError,
)

DEFAULT_HOLD_TTL_S = 900.0

STATES = ("held", "confirmed", "cancelled", "expired")
_TRANSITIONS = {
    "held": {"confirmed", "cancelled", "expired"},
    "confirmed": {"cancelled"},
    "cancelled": set(),
    "expired": set(),
}

HOTEL_CSV_HEADER = [
    "hotel_id", "name", "lat", "lon", "destination_id",
    "room_type", "capacity", "count", "nightly_rate_minor",
]

EmitFn = Callable[[str, dict], None]


@dataclass(frozen=True)
class RoomType:
    name: str
    capacity: int
    count: int
    nightly_rate: int


@dataclass(frozen=True)
class Hotel:
    id: str
    name: str
    location: geo.GeoPoint
    destination_id: Optional[str]
    room_types: tuple[RoomType, ...]


@dataclass(frozen=True)
class Booking:
    id: str
    guest_id: str
    hotel_id: str
    room_type: str
    check_in: date
    check_out: date
    rooms: int
    state: str
    hold_expires_at: Optional[float]

    def nights(self) -> range:
        return range(self.check_in.toordinal(), self.check_out.toordinal())

    @property
    def active(self) -> bool:
        return self.state in ("held", "confirmed")


def _validate_hotel(hotel: Hotel) -> None:
    if not hotel.id or not hotel.id.strip():
        raise ValidationError("hotel id must be non-empty")
    if not hotel.name or not hotel.name.strip():
        raise ValidationError("hotel name must be non-empty")
    if not isinstance(hotel.location, geo.GeoPoint):
        raise ValidationError("hotel location must be a GeoPoint")
    names = set()
    for rt in hotel.room_types:
        if not rt.name or not rt.name.strip():
            raise ValidationError("room type name must be non-empty")
        if rt.name in names:
            raise ValidationError(f"duplicate room type {rt.name!r} in hotel {hotel.id!r}")
        names.add(rt.name)
        if rt.capacity < 1:
            raise ValidationError(f"room type {rt.name!r}: capacity must be >= 1")
        if rt.count < 0:
            raise ValidationError(f"room type {rt.name!r}: count must be >= 0")
        if rt.nightly_rate < 0:
            raise ValidationError(f"room type {rt.name!r}: nightly_rate must be >= 0")


def _validate_stay(check_in: date, check_out: date) -> None:
    if not isinstance(check_in, date) or not isinstance(check_out, date):
        raise ValidationError("check_in/check_out must be dates")
    if not check_in < check_out:
        raise ValidationError(f"stay [{check_in}, {check_out}) is empty")


class ReservationBook:
    """Hotels, bookings, and linearizable capacity-safe mutations.

    A single lock serializes all mutations, which is stronger than the
    required per-(hotel, room_type) linearizability but costs nothing at
    this scale. Events go to the emit hook before being applied locally.
    """

    def __init__(
        self,
        hold_ttl: float = DEFAULT_HOLD_TTL_S,
        emit: EmitFn | None = None,
        id_source: Callable[[], str] | None = None,
    ):
        self._hotels: dict[str, Hotel] = {}
        self._bookings: dict[str, Booking] = {}
        self._lock = threading.RLock()
        self._emit = emit
        self.hold_ttl = hold_ttl
        self._new_id = id_source or (lambda: uuid.uuid4().hex)

    def set_emit(self, emit: EmitFn | None) -> None:
        self._emit = emit

    # -- helpers -------------------------------------------------------------

    def _commit(self, kind: str, data: dict) -> None:
        if self._emit:
            self._emit(kind, data)
        self.apply(kind, data)

    def get_hotel(self, hotel_id: str) -> Hotel:
        try:
            return self._hotels[hotel_id]
        except KeyError:
            raise NotFound(f"hotel {hotel_id!r} not found") from None

    def get_booking(self, booking_id: str) -> Booking:
        try:
            return self._bookings[booking_id]
        except KeyError:
            raise NotFound(f"booking {booking_id!r} not found") from None

    def hotels(self) -> list[Hotel]:
        with self._lock:
            return sorted(self._hotels.values(), key=lambda h: h.id)

    def _active_per_night(self, hotel_id: str, room_type: str) -> dict[int, int]:
        taken: dict[int, int] = {}
        for b in self._bookings.values():
            if b.hotel_id == hotel_id and b.room_type == room_type and b.active:
                for night in b.nights():
                    taken[night] = taken.get(night, 0) + b.rooms
        return taken

    def _free_over(self, hotel_id: str, room_type: RoomType, nights: range) -> int:
        taken = self._active_per_night(hotel_id, room_type.name)
        return min((room_type.count - taken.get(n, 0) for n in nights), default=room_type.count)

    def _assert_capacity(self, hotel_id: str, room_type_name: str) -> None:
        hotel = self._hotels.get(hotel_id)
        if hotel is None:
            return
        rt = next((r for r in hotel.room_types if r.name == room_type_name), None)
        count = rt.count if rt else 0
        taken = self._active_per_night(hotel_id, room_type_name)
        for night, used in taken.items():
            assert used <= count, (
                f"capacity invariant violated: {hotel_id}/{room_type_name} "
                f"night {date.fromordinal(night)}: {used} > {count}"
            )

    # -- operations ----------------------------------------------------------

    def upsert_hotel(self, hotel: Hotel) -> str:
        with self._lock:
            _validate_hotel(hotel)
            new_counts = {rt.name: rt.count for rt in hotel.room_types}
            if hotel.id in self._hotels:
                booked_types = {
                    b.room_type for b in self._bookings.values()
                    if b.hotel_id == hotel.id and b.active
                }
                for name in booked_types:
                    new_count = new_counts.get(name, 0)
                    peak = max(self._active_per_night(hotel.id, name).values(), default=0)
                    if new_count < peak:
                        raise CapacityConflict(
                            f"cannot shrink {hotel.id}/{name} to {new_count}: "
                            f"{peak} rooms already booked on some night"
                        )
            self._commit("reservations/hotel_upserted", hotel_to_dict(hotel))
            for name in new_counts:
                self._assert_capacity(hotel.id, name)
            return hotel.id

    def search_availability(
        self,
        check_in: date,
        check_out: date,
        rooms: int,
        near: tuple[geo.GeoPoint, float] | None = None,
    ) -> list[tuple[str, str, int, int]]:
        """(hotel_id, room_type, min free rooms over the stay, nightly_rate)
        for every room type able to host the request on all nights,
        ordered by (nightly_rate, hotel_id, room_type)."""
        _validate_stay(check_in, check_out)
        if rooms < 1:
            raise ValidationError(f"rooms must be >= 1, got {rooms}")
        if near is not None and not near[1] > 0:
            raise ValidationError(f"radius must be > 0, got {near[1]}")
        nights = range(check_in.toordinal(), check_out.toordinal())
        with self._lock:
            rows = []
            for hotel in self._hotels.values():
                if near is not None:
                    if geo.haversine_distance(near[0], hotel.location) > near[1]:
                        continue
                for rt in hotel.room_types:
                    free = self._free_over(hotel.id, rt, nights)
                    if free >= rooms:
                        rows.append((hotel.id, rt.name, free, rt.nightly_rate))
        return sorted(rows, key=lambda r: (r[3], r[0], r[1]))

    def hold_booking(
        self,
        guest_id: str,
        hotel_id: str,
        room_type: str,
        check_in: date,
        check_out: date,
        rooms: int,
        now: float,
    ) -> Booking:
        """Atomically check capacity and reserve; the hold expires at now + hold_ttl."""
        _validate_stay(check_in, check_out)
        if rooms < 1:
            raise ValidationError(f"rooms must be >= 1, got {rooms}")
        if not guest_id:
            raise ValidationError("guest_id must be non-empty")
        with self._lock:
            hotel = self.get_hotel(hotel_id)
            rt = next((r for r in hotel.room_types if r.name == room_type), None)
            if rt is None:
                raise NotFound(f"room type {room_type!r} not in hotel {hotel_id!r}")
            nights = range(check_in.toordinal(), check_out.toordinal())
            if self._free_over(hotel_id, rt, nights) < rooms:
                raise NoAvailability(
                    f"{hotel_id}/{room_type}: fewer than {rooms} rooms free over "
                    f"[{check_in}, {check_out})"
                )
            booking = Booking(
                id=self._new_id(),
                guest_id=guest_id,
                hotel_id=hotel_id,
                room_type=room_type,
                check_in=check_in,
                check_out=check_out,
                rooms=rooms,
                state="held",
                hold_expires_at=now + self.hold_ttl,
            )
            self._commit("reservations/booking_held", booking_to_dict(booking))
            self._assert_capacity(hotel_id, room_type)
            return booking

    def confirm_booking(self, booking_id: str, now: float) -> Booking:
        with self._lock:
            b = self.get_booking(booking_id)
            if b.state != "held":
                raise InvalidState(f"booking {booking_id!r} is {b.state}, not held")
            if now >= b.hold_expires_at:
                self._commit("reservations/holds_expired", {"ids": [b.id], "now": now})
                raise HoldExpired(f"hold on booking {booking_id!r} expired")
            self._commit("reservations/booking_confirmed", {"id": booking_id})
            return self._bookings[booking_id]

    def cancel_booking(self, booking_id: str) -> Booking:
        with self._lock:
            b = self.get_booking(booking_id)
            if b.state not in ("held", "confirmed"):
                raise InvalidState(f"booking {booking_id!r} is {b.state}")
            self._commit("reservations/booking_cancelled", {"id": booking_id})
            self._assert_capacity(b.hotel_id, b.room_type)
            return self._bookings[booking_id]

    def expire_holds(self, now: float) -> int:
        """Expire every held booking whose TTL has passed; idempotent for a fixed now."""
        with self._lock:
            ids = sorted(
                b.id for b in self._bookings.values()
                if b.state == "held" and b.hold_expires_at <= now
            )
            if ids:
                self._commit("reservations/holds_expired", {"ids": ids, "now": now})
            return len(ids)

    # -- persistence ----------------------------------------------------------

    def apply(self, kind: str, data: dict) -> None:
        with self._lock:
            if kind == "reservations/hotel_upserted":
                hotel = hotel_from_dict(data)
                self._hotels[hotel.id] = hotel
            elif kind == "reservations/booking_held":
                b = booking_from_dict(data)
                self._bookings[b.id] = b
            elif kind == "reservations/booking_confirmed":
                b = self._bookings[data["id"]]
                self._bookings[b.id] = replace(b, state="confirmed", hold_expires_at=None)
            elif kind == "reservations/booking_cancelled":
                b = self._bookings[data["id"]]
                self._bookings[b.id] = replace(b, state="cancelled", hold_expires_at=None)
            elif kind == "reservations/holds_expired":
                for booking_id in data["ids"]:
                    b = self._bookings[booking_id]
                    self._bookings[b.id] = replace(b, state="expired", hold_expires_at=None)
            else:
                raise ValueError(f"unknown reservations event {kind!r}")

    def dump(self) -> dict:
        with self._lock:
            return {
                "hotels": [hotel_to_dict(h) for h in self._hotels.values()],
                "bookings": [booking_to_dict(b) for b in self._bookings.values()],
            }

    def load(self, state: dict) -> None:
        with self._lock:
            self._hotels = {h["id"]: hotel_from_dict(h) for h in state.get("hotels", [])}
            self._bookings = {
                b["id"]: booking_from_dict(b) for b in state.get("bookings", [])
            }


def hotel_to_dict(h: Hotel) -> dict:
    return {
        "id": h.id,
        "name": h.name,
        "lat": h.location.lat,
        "lon": h.location.lon,
        "destination_id": h.destination_id,
        "room_types": [
            {"name": rt.name, "capacity": rt.capacity, "count": rt.count,
             "nightly_rate": rt.nightly_rate}
            for rt in h.room_types
        ],
    }


def hotel_from_dict(data: dict) -> Hotel:
    return Hotel(
        id=data["id"],
        name=data["name"],
        location=geo.GeoPoint(data["lat"], data["lon"]),
        destination_id=data.get("destination_id"),
        room_types=tuple(
            RoomType(rt["name"], rt["capacity"], rt["count"], rt["nightly_rate"])
            for rt in data["room_types"]
        ),
    )


def booking_to_dict(b: Booking) -> dict:
    return {
        "id": b.id,
        "guest_id": b.guest_id,
        "hotel_id": b.hotel_id,
        "room_type": b.room_type,
        "check_in": b.check_in.isoformat(),
        "check_out": b.check_out.isoformat(),
        "rooms": b.rooms,
        "state": b.state,
        "hold_expires_at": b.hold_expires_at,
    }


def booking_from_dict(data: dict) -> Booking:
    return Booking(
        id=data["id"],
        guest_id=data["guest_id"],
        hotel_id=data["hotel_id"],
        room_type=data["room_type"],
        check_in=date.fromisoformat(data["check_in"]),
        check_out=date.fromisoformat(data["check_out"]),
        rooms=data["rooms"],
        state=data["state"],
        hold_expires_at=data.get("hold_expires_at"),
    )


def load_hotels_csv(path: str) -> tuple[list[Hotel], list[tuple[int, str]]]:
    """Parse hotel inventory CSV (one row per room type) into Hotel values.

    Rows of the same hotel_id must agree on name/location/destination; rows
    that conflict, repeat a room type, or fail validation are reported as
    (line, reason) and skipped.
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    partial: dict[str, dict] = {}
    errors: list[tuple[int, str]] = []
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty file, expected header {','.join(HOTEL_CSV_HEADER)}")
        if [h.strip().lower() for h in header] != HOTEL_CSV_HEADER:
            raise FormatError(
                f"{path}: bad header {','.join(header)!r}, expected {','.join(HOTEL_CSV_HEADER)}"
            )
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(HOTEL_CSV_HEADER):
                errors.append((line_no, f"expected {len(HOTEL_CSV_HEADER)} fields, got {len(row)}"))
                continue
            raw = dict(zip(HOTEL_CSV_HEADER, (c.strip() for c in row)))
            try:
                location = geo.GeoPoint(float(raw["lat"]), float(raw["lon"]))
                rt = RoomType(
                    name=raw["room_type"],
                    capacity=int(raw["capacity"]),
                    count=int(raw["count"]),
                    nightly_rate=int(raw["nightly_rate_minor"]),
                )
            except (ValueError, ValidationError) as exc:
                errors.append((line_no, str(exc)))
                continue
            head = (raw["name"], location, raw["destination_id"] or None)
            entry = partial.setdefault(raw["hotel_id"], {"head": head, "types": {}})
            if entry["head"] != head:
                errors.append((line_no, f"hotel {raw['hotel_id']!r}: conflicting name/location"))
                continue
            if rt.name in entry["types"]:
                errors.append((line_no, f"hotel {raw['hotel_id']!r}: duplicate room type {rt.name!r}"))
                continue
            entry["types"][rt.name] = rt

    hotels = []
    for hotel_id, entry in partial.items():
        name, location, destination_id = entry["head"]
        hotel = Hotel(
            id=hotel_id,
            name=name,
            location=location,
            destination_id=destination_id,
            room_types=tuple(entry["types"].values()),
        )
        try:
            _validate_hotel(hotel)
        except ValidationError as exc:
            errors.append((0, f"hotel {hotel_id!r}: {exc}"))
            continue
        hotels.append(hotel)
    return hotels, errors
