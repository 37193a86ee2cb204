"""Destination catalog: tour sites with category taxonomy, search and CSV ingestion.

Categories follow the three-way taxonomy used for tourism data classification:
Cultural, Ecological, Modern.
"""
from __future__ import annotations

import csv
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import geo
from .errors import DuplicateId, FormatError, IoError, NotFound, ValidationError

CATEGORIES = ("Cultural", "Ecological", "Modern")

CSV_HEADER = ["id", "name", "category", "lat", "lon", "description", "open_info"]

EmitFn = Callable[[str, dict], None]


@dataclass(frozen=True)
class Destination:
    id: str
    name: str
    category: str
    location: geo.GeoPoint
    description: str = ""
    media: tuple[str, ...] = ()
    open_info: str = ""
    manager_id: Optional[str] = None


def validate_destination(dest: Destination) -> None:
    if not dest.id or not str(dest.id).strip():
        raise ValidationError("destination id must be non-empty")
    if not dest.name or not dest.name.strip():
        raise ValidationError("destination name must be non-empty")
    if dest.category not in CATEGORIES:
        raise ValidationError(
            f"category {dest.category!r} not one of {', '.join(CATEGORIES)}"
        )
    if not isinstance(dest.location, geo.GeoPoint):
        raise ValidationError("location must be a GeoPoint")


@dataclass
class IngestReport:
    accepted: int = 0
    rejected: int = 0
    errors: list[tuple[int, str]] = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.accepted + self.rejected


class Catalog:
    """In-memory destination store; writes serialized, reads lock-free snapshots.

    Mutations are validated, then handed to the optional emit hook (the
    storage journal) before being applied, so a journaled event is always a
    fully validated one.
    """

    def __init__(self, emit: EmitFn | None = None):
        self._items: dict[str, Destination] = {}
        self._lock = threading.RLock()
        self._emit = emit

    def set_emit(self, emit: EmitFn | None) -> None:
        self._emit = emit

    def __len__(self) -> int:
        return len(self._items)

    # -- operations ---------------------------------------------------------

    def add(self, dest: Destination) -> str:
        with self._lock:
            validate_destination(dest)
            if dest.id in self._items:
                raise DuplicateId(f"destination {dest.id!r} already exists")
            event = destination_to_dict(dest)
            if self._emit:
                self._emit("catalog/added", event)
            self.apply("catalog/added", event)
            return dest.id

    def get(self, dest_id: str) -> Destination:
        try:
            return self._items[dest_id]
        except KeyError:
            raise NotFound(f"destination {dest_id!r} not found") from None

    def exists(self, dest_id: str) -> bool:
        return dest_id in self._items

    def manager_of(self, dest_id: str) -> Optional[str]:
        return self.get(dest_id).manager_id

    def search(
        self,
        query: str | None = None,
        category: str | None = None,
        near: tuple[geo.GeoPoint, float] | None = None,
    ) -> list[Destination]:
        """All destinations passing every supplied filter, sorted by (name, id).

        Text matching is case-insensitive substring over name and description.
        """
        if category is not None and category not in CATEGORIES:
            raise ValidationError(f"category {category!r} not one of {', '.join(CATEGORIES)}")
        with self._lock:
            items = list(self._items.values())
        if near is not None:
            origin, radius = near
            if not radius > 0:
                raise ValidationError(f"radius must be > 0, got {radius}")
            index = geo.build_index([(d.id, d.location) for d in items])
            keep = {key for key, _ in index.within_radius(origin, radius)}
            items = [d for d in items if d.id in keep]
        if category is not None:
            items = [d for d in items if d.category == category]
        if query is not None:
            needle = query.lower()
            items = [
                d for d in items
                if needle in d.name.lower() or needle in d.description.lower()
            ]
        return sorted(items, key=lambda d: (d.name, d.id))

    def ingest_csv(self, path: str) -> IngestReport:
        """Load destinations from a CSV file with header id,name,category,lat,lon,description,open_info.

        Malformed rows are reported with their line number and never partially
        inserted; re-ingesting a file counts already-present ids as rejected.
        """
        try:
            fh = open(path, newline="", encoding="utf-8")
        except OSError as exc:
            raise IoError(f"cannot read {path}: {exc}") from exc
        report = IngestReport()
        with fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise FormatError(f"{path}: empty file, expected header {','.join(CSV_HEADER)}")
            except csv.Error as exc:
                raise FormatError(f"{path}: unparseable header: {exc}") from exc
            if [h.strip().lower() for h in header] != CSV_HEADER:
                raise FormatError(
                    f"{path}: bad header {','.join(header)!r}, expected {','.join(CSV_HEADER)}"
                )
            for line_no, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    dest = _parse_row(row)
                    self.add(dest)
                except (ValidationError, DuplicateId) as exc:
                    report.rejected += 1
                    report.errors.append((line_no, str(exc)))
                else:
                    report.accepted += 1
        return report

    # -- persistence --------------------------------------------------------

    def apply(self, kind: str, data: dict) -> None:
        if kind == "catalog/added":
            dest = destination_from_dict(data)
            with self._lock:
                self._items[dest.id] = dest
        else:
            raise ValueError(f"unknown catalog event {kind!r}")

    def dump(self) -> dict:
        with self._lock:
            return {"destinations": [destination_to_dict(d) for d in self._items.values()]}

    def load(self, state: dict) -> None:
        with self._lock:
            self._items = {
                d["id"]: destination_from_dict(d) for d in state.get("destinations", [])
            }


def _parse_row(row: list[str]) -> Destination:
    if len(row) != len(CSV_HEADER):
        raise ValidationError(f"expected {len(CSV_HEADER)} fields, got {len(row)}")
    raw = dict(zip(CSV_HEADER, (cell.strip() for cell in row)))
    try:
        lat = float(raw["lat"])
        lon = float(raw["lon"])
    except ValueError:
        raise ValidationError(f"bad coordinates lat={raw['lat']!r} lon={raw['lon']!r}") from None
    return Destination(
        id=raw["id"],
        name=raw["name"],
        category=raw["category"],
        location=geo.GeoPoint(lat, lon),
        description=raw["description"],
        open_info=raw["open_info"],
    )


def destination_to_dict(dest: Destination) -> dict:
    return {
        "id": dest.id,
        "name": dest.name,
        "category": dest.category,
        "lat": dest.location.lat,
        "lon": dest.location.lon,
        "description": dest.description,
        "media": list(dest.media),
        "open_info": dest.open_info,
        "manager_id": dest.manager_id,
    }


def destination_from_dict(data: dict) -> Destination:
    return Destination(
        id=data["id"],
        name=data["name"],
        category=data["category"],
        location=geo.GeoPoint(data["lat"], data["lon"]),
        description=data.get("description", ""),
        media=tuple(data.get("media") or ()),
        open_info=data.get("open_info", ""),
        manager_id=data.get("manager_id"),
    )
