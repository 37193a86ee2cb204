"""The deployable service: application state over a storage backend, the
HTTP adapter around the api dispatcher, and background hold expiry."""
from __future__ import annotations

import errno
import json
import threading
import time
from contextlib import contextmanager
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable

from . import routing
from .api import handle_request
from .catalog import Catalog, IngestReport
from .config import ServiceConfig
from .errors import AddressInUse, IoError
from .geo import GeoPoint
from .identity import CommunityBoard, IdentityStore
from .reservations import ReservationBook, load_hotels_csv
from .storage import open_backend, read_snapshot_file, write_snapshot_file


class AppState:
    """All domain stores wired to one storage backend.

    Mutations flow: store validates under its own lock, hands the event to
    the journal (write-ahead), then applies it in memory. Restore replays
    snapshot + journal through the same apply paths with journaling off.
    """

    def __init__(
        self,
        config: ServiceConfig,
        clock: Callable[[], float] = time.time,
        token_source: Callable[[], str] | None = None,
        id_source: Callable[[], str] | None = None,
    ):
        self.config = config
        self.clock = clock
        self.backend = open_backend(config.backend, config.data_dir, config.fsync)
        self._seq = 0
        self._seq_lock = threading.Lock()

        self.catalog = Catalog()
        self.reservations = ReservationBook(hold_ttl=config.hold_ttl_s, id_source=id_source)
        self.identity = IdentityStore(
            session_ttl=config.session_ttl_s,
            hash_iterations=config.hash_iterations,
            token_source=token_source,
            id_source=id_source,
        )
        self.community = CommunityBoard(
            destination_exists=self.catalog.exists,
            destination_manager=self._manager_of,
        )
        self.graph = routing.RoadGraph({}, [])
        self._graph_lock = threading.RLock()

        state, events = self.backend.load()
        if state is not None:
            self.load_state(state)
        for seq, kind, data in events:
            self.apply_event(kind, data)
            self._seq = max(self._seq, seq)
        if state is not None:
            self._seq = max(self._seq, state.get("__seq__", 0))

        emit = self._journal_emit
        self.catalog.set_emit(emit)
        self.reservations.set_emit(emit)
        self.identity.set_emit(emit)
        self.community.set_emit(emit)

    def _manager_of(self, destination_id: str):
        try:
            return self.catalog.manager_of(destination_id)
        except Exception:
            return None

    def _journal_emit(self, kind: str, data: dict) -> None:
        with self._seq_lock:
            self._seq += 1
            self.backend.append(self._seq, kind, data)

    # -- event plumbing -------------------------------------------------------

    def apply_event(self, kind: str, data: dict) -> None:
        prefix = kind.split("/", 1)[0]
        if prefix == "catalog":
            self.catalog.apply(kind, data)
        elif prefix == "reservations":
            self.reservations.apply(kind, data)
        elif prefix == "identity":
            self.identity.apply(kind, data)
        elif prefix == "community":
            self.community.apply(kind, data)
        elif kind == "routing/graph_loaded":
            self._apply_graph(data)
        else:
            raise ValueError(f"unknown event kind {kind!r}")

    def _apply_graph(self, data: dict) -> None:
        nodes = {n["id"]: GeoPoint(n["lat"], n["lon"]) for n in data["nodes"]}
        edges = [
            routing.Edge(e["from"], e["to"], e["length_m"], e["mode"])
            for e in data["edges"]
        ]
        with self._graph_lock:
            self.graph = routing.RoadGraph(nodes, edges)

    def set_graph(self, graph: routing.RoadGraph) -> None:
        data = {
            "nodes": [
                {"id": node_id, "lat": p.lat, "lon": p.lon}
                for node_id, p in sorted(graph.nodes.items())
            ],
            "edges": [
                {"from": e.src, "to": e.dst, "length_m": e.length_m, "mode": e.mode}
                for e in graph.edges
            ],
        }
        with self._graph_lock:
            self._journal_emit("routing/graph_loaded", data)
            self._apply_graph(data)

    # -- ingestion (CLI surface) ----------------------------------------------

    def ingest_destinations(self, path: str) -> IngestReport:
        return self.catalog.ingest_csv(path)

    def load_road_graph(self, node_path: str, edge_path: str) -> list[tuple[int, str]]:
        graph, rejected = routing.load_graph(node_path, edge_path)
        self.set_graph(graph)
        return rejected

    def ingest_hotels(self, path: str) -> IngestReport:
        hotels, errors = load_hotels_csv(path)
        report = IngestReport(rejected=len(errors), errors=list(errors))
        for hotel in hotels:
            self.reservations.upsert_hotel(hotel)
            report.accepted += 1
        return report

    # -- snapshots --------------------------------------------------------------

    @contextmanager
    def _quiesced(self):
        # Taking every store lock (fixed order) blocks all mutations, so the
        # dump is a consistent point-in-time across stores.
        with self.catalog._lock, self.reservations._lock, self.identity._lock, \
                self.community._lock, self._graph_lock:
            yield

    def dump_state(self) -> dict:
        with self._quiesced():
            graph = self.graph
            return {
                "catalog": self.catalog.dump(),
                "reservations": self.reservations.dump(),
                "identity": self.identity.dump(),
                "community": self.community.dump(),
                "graph": {
                    "nodes": [
                        {"id": node_id, "lat": p.lat, "lon": p.lon}
                        for node_id, p in sorted(graph.nodes.items())
                    ],
                    "edges": [
                        {"from": e.src, "to": e.dst, "length_m": e.length_m, "mode": e.mode}
                        for e in graph.edges
                    ],
                },
                "__seq__": self._seq,
            }

    def load_state(self, state: dict) -> None:
        self.catalog.load(state.get("catalog", {}))
        self.reservations.load(state.get("reservations", {}))
        self.identity.load(state.get("identity", {}))
        self.community.load(state.get("community", {}))
        graph = state.get("graph")
        if graph:
            self._apply_graph(graph)
        self._seq = max(self._seq, state.get("__seq__", 0))

    def snapshot(self) -> str | None:
        """Persist a snapshot through the backend (disk: truncates the journal)."""
        with self._quiesced():
            state = self.dump_state()
            return self.backend.snapshot(state, self._seq)

    def snapshot_to(self, path: str) -> str:
        """Write a standalone snapshot artifact (works on any backend)."""
        state = self.dump_state()
        return write_snapshot_file(path, state, state["__seq__"])

    @classmethod
    def restore_from(cls, path: str, config: ServiceConfig, **kwargs) -> "AppState":
        """Build a fresh AppState from a snapshot artifact."""
        state, _seq = read_snapshot_file(path)
        app = cls(config, **kwargs)
        app.load_state(state)
        return app

    def close(self) -> None:
        self.backend.close()


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "dms"

    def _dispatch(self):
        length = int(self.headers.get("Content-Length") or 0)
        body = self.rfile.read(length) if length else None
        status, payload = handle_request(
            self.server.app, self.command, self.path, dict(self.headers), body
        )
        data = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    do_GET = do_POST = do_DELETE = do_PUT = _dispatch

    def log_message(self, fmt, *args):  # quiet by default
        pass


class Service:
    """A running instance: HTTP listener plus the periodic hold-expiry sweep."""

    def __init__(self, config: ServiceConfig, **app_kwargs):
        config.validate()
        self.config = config
        self.app = AppState(config, **app_kwargs)
        self._httpd: ThreadingHTTPServer | None = None
        self._threads: list[threading.Thread] = []
        self._stop = threading.Event()

    @property
    def address(self) -> tuple[str, int]:
        assert self._httpd is not None, "service not started"
        return self._httpd.server_address[:2]

    @property
    def base_url(self) -> str:
        host, port = self.address
        return f"http://{host}:{port}"

    def start(self) -> "Service":
        try:
            self._httpd = ThreadingHTTPServer((self.config.host, self.config.port), _Handler)
        except OSError as exc:
            if exc.errno == errno.EADDRINUSE:
                raise AddressInUse(f"{self.config.host}:{self.config.port} already bound") from exc
            raise IoError(str(exc)) from exc
        self._httpd.app = self.app
        self._httpd.daemon_threads = True
        serve = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        serve.start()
        sweeper = threading.Thread(target=self._expiry_loop, daemon=True)
        sweeper.start()
        self._threads = [serve, sweeper]
        return self

    def _expiry_loop(self) -> None:
        while not self._stop.wait(self.config.hold_expiry_interval_s):
            try:
                self.app.reservations.expire_holds(self.app.clock())
            except Exception:
                pass

    def stop(self) -> None:
        self._stop.set()
        if self._httpd is not None:
            self._httpd.shutdown()
            self._httpd.server_close()
        self.app.close()


def start_service(config: ServiceConfig, **app_kwargs) -> Service:
    """Validate config, restore prior state, bind, and serve."""
    return Service(config, **app_kwargs).start()
