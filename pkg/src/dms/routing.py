"""Road-graph routing: adjacency, optimal routes, point snapping, tour legs.

Graphs are directed and weighted; every edge length must be at least the
great-circle distance between its endpoints, which keeps the straight-line
heuristic admissible for A*.
"""
from __future__ import annotations

import csv
import heapq
import math
from dataclasses import dataclass

from . import geo
from .errors import (
    DanglingEdge,
    EmptyGraph,
    FormatError,
    IoError,
    NotFound,
    Unreachable,
    ValidationError,
)

MODES = ("walk", "drive")

# km/h defaults, overridable through ServiceConfig.
DEFAULT_SPEEDS_KMH = {"walk": 5.0, "drive": 40.0}

NODE_CSV_HEADER = ["id", "lat", "lon"]
EDGE_CSV_HEADER = ["from", "to", "length_m", "mode", "bidirectional"]


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    length_m: float
    mode: str


@dataclass(frozen=True)
class Route:
    node_sequence: tuple[str, ...]
    edges: tuple[Edge, ...]
    total_length: float
    est_time: float
    metric: str

    @property
    def cost(self) -> float:
        return self.total_length if self.metric == "distance" else self.est_time


class RoadGraph:
    """Immutable directed road graph; all queries are pure functions."""

    def __init__(self, nodes: dict[str, geo.GeoPoint], edges: list[Edge]):
        self.nodes = dict(nodes)
        self._adj: dict[str, list[Edge]] = {node_id: [] for node_id in self.nodes}
        for e in edges:
            if e.src not in self.nodes or e.dst not in self.nodes:
                raise DanglingEdge(f"edge {e.src}->{e.dst} references a missing node")
            if not e.length_m > 0:
                raise ValidationError(f"edge {e.src}->{e.dst} has non-positive length")
            if e.mode not in MODES:
                raise ValidationError(f"edge {e.src}->{e.dst} has unknown mode {e.mode!r}")
            straight = geo.haversine_distance(self.nodes[e.src], self.nodes[e.dst])
            if e.length_m < straight:
                raise ValidationError(
                    f"edge {e.src}->{e.dst} length {e.length_m} shorter than "
                    f"straight-line {straight:.1f}"
                )
            self._adj[e.src].append(e)

    @property
    def edges(self) -> list[Edge]:
        return [e for out in self._adj.values() for e in out]

    def out_edges(self, node_id: str) -> list[Edge]:
        try:
            return self._adj[node_id]
        except KeyError:
            raise NotFound(f"node {node_id!r} not in graph") from None


def _speeds_mps(speeds_kmh: dict[str, float] | None) -> dict[str, float]:
    kmh = dict(DEFAULT_SPEEDS_KMH)
    if speeds_kmh:
        kmh.update(speeds_kmh)
    for mode, v in kmh.items():
        if not v > 0:
            raise ValidationError(f"speed for {mode} must be > 0, got {v}")
    return {mode: v * 1000.0 / 3600.0 for mode, v in kmh.items()}


def _edge_cost(e: Edge, metric: str, mps: dict[str, float]) -> float:
    return e.length_m if metric == "distance" else e.length_m / mps[e.mode]


def adjacent(graph: RoadGraph, node_id: str) -> list[tuple[str, float, str]]:
    """Out-edges of a node as (neighbor, meters, mode), ascending by (length, neighbor)."""
    out = graph.out_edges(node_id)
    return [(e.dst, e.length_m, e.mode) for e in
            sorted(out, key=lambda e: (e.length_m, e.dst, e.mode))]


def _build_route(graph: RoadGraph, path_edges: list[Edge], src: str,
                 metric: str, mps: dict[str, float]) -> Route:
    seq = [src] + [e.dst for e in path_edges]
    total_length = 0.0
    est_time = 0.0
    for e in path_edges:
        total_length += e.length_m
        est_time += e.length_m / mps[e.mode]
    route = Route(tuple(seq), tuple(path_edges), total_length, est_time, metric)
    _assert_well_formed(graph, route, mps)
    return route


def _assert_well_formed(graph: RoadGraph, route: Route, mps: dict[str, float]) -> None:
    # Cheap output self-check: edge chain matches the node sequence and the
    # totals re-sum exactly in traversal order.
    assert len(route.node_sequence) == len(route.edges) + 1
    length = 0.0
    time = 0.0
    for i, e in enumerate(route.edges):
        assert e.src == route.node_sequence[i] and e.dst == route.node_sequence[i + 1]
        assert e in graph.out_edges(e.src)
        length += e.length_m
        time += e.length_m / mps[e.mode]
    assert length == route.total_length and time == route.est_time


def shortest_route(
    graph: RoadGraph,
    src: str,
    dst: str,
    metric: str = "distance",
    speeds_kmh: dict[str, float] | None = None,
    algorithm: str = "dijkstra",
) -> Route:
    """Minimum-cost route from src to dst under the given metric.

    Ties between equal-cost predecessors resolve toward the lexicographically
    smaller (node id, length, mode), making the returned path deterministic.
    algorithm="astar" uses the great-circle heuristic and returns a route of
    identical cost.
    """
    if metric not in ("distance", "time"):
        raise ValidationError(f"metric must be distance or time, got {metric!r}")
    if algorithm not in ("dijkstra", "astar"):
        raise ValidationError(f"unknown algorithm {algorithm!r}")
    if src not in graph.nodes:
        raise NotFound(f"node {src!r} not in graph")
    if dst not in graph.nodes:
        raise NotFound(f"node {dst!r} not in graph")
    mps = _speeds_mps(speeds_kmh)
    if src == dst:
        return _build_route(graph, [], src, metric, mps)

    if algorithm == "astar":
        pred = _astar(graph, src, dst, metric, mps)
    else:
        pred = _dijkstra(graph, src, metric, mps)
    if dst not in pred:
        raise Unreachable(f"no path from {src!r} to {dst!r}")
    path_edges: list[Edge] = []
    node = dst
    while node != src:
        e = pred[node]
        path_edges.append(e)
        node = e.src
    path_edges.reverse()
    return _build_route(graph, path_edges, src, metric, mps)


def _dijkstra(graph: RoadGraph, src: str, metric: str, mps: dict[str, float]) -> dict[str, Edge]:
    """Full single-source run; returns the deterministic predecessor-edge tree.

    Runs to exhaustion (no early exit) so the equal-cost tie rule sees every
    candidate relaxation regardless of heap order.
    """
    dist: dict[str, float] = {src: 0.0}
    pred: dict[str, Edge] = {}
    done: set[str] = set()
    heap: list[tuple[float, str]] = [(0.0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for e in graph.out_edges(u):
            c = d + _edge_cost(e, metric, mps)
            v = e.dst
            if v not in dist or c < dist[v]:
                dist[v] = c
                pred[v] = e
                heapq.heappush(heap, (c, v))
            elif c == dist[v] and v in pred:
                cur = pred[v]
                if (e.src, e.length_m, e.mode) < (cur.src, cur.length_m, cur.mode):
                    pred[v] = e
    return pred


def _astar(graph: RoadGraph, src: str, dst: str, metric: str,
           mps: dict[str, float]) -> dict[str, Edge]:
    """A* with the straight-line heuristic, shrunk a hair below admissible
    so float rounding can never make it overestimate."""
    vmax = max(mps.values())
    goal = graph.nodes[dst]
    hcache: dict[str, float] = {}

    def h(node_id: str) -> float:
        val = hcache.get(node_id)
        if val is None:
            straight = geo.haversine_distance(graph.nodes[node_id], goal)
            if metric == "time":
                straight /= vmax
            val = hcache[node_id] = straight * (1.0 - 1e-9)
        return val

    g: dict[str, float] = {src: 0.0}
    pred: dict[str, Edge] = {}
    heap: list[tuple[float, float, str]] = [(h(src), 0.0, src)]
    while heap:
        _, gu, u = heapq.heappop(heap)
        if gu > g[u]:
            continue
        if u == dst:
            return pred
        for e in graph.out_edges(u):
            c = gu + _edge_cost(e, metric, mps)
            v = e.dst
            if v not in g or c < g[v]:
                g[v] = c
                pred[v] = e
                heapq.heappush(heap, (c + h(v), c, v))
    return pred


def snap_to_graph(graph: RoadGraph, p: geo.GeoPoint) -> str:
    """The graph node nearest to p; ties break toward the smaller node id."""
    if not graph.nodes:
        raise EmptyGraph("cannot snap to an empty graph")
    best = min(
        ((geo.haversine_distance(p, q), node_id) for node_id, q in graph.nodes.items()),
    )
    return best[1]


def plan_tour(
    graph: RoadGraph,
    waypoints: list[str],
    metric: str = "distance",
    speeds_kmh: dict[str, float] | None = None,
) -> Route:
    """Route visiting the waypoints in the given order (no reordering).

    Concatenates shortest legs between consecutive waypoints; seam nodes are
    not duplicated.
    """
    if len(waypoints) < 2:
        raise ValidationError("tour needs at least 2 waypoints")
    mps = _speeds_mps(speeds_kmh)
    all_edges: list[Edge] = []
    for a, b in zip(waypoints, waypoints[1:]):
        leg = shortest_route(graph, a, b, metric, speeds_kmh)
        all_edges.extend(leg.edges)
    return _build_route(graph, all_edges, waypoints[0], metric, mps)


def load_graph(node_path: str, edge_path: str) -> tuple[RoadGraph, list[tuple[int, str]]]:
    """Load a road graph from node and edge CSV files.

    Node rows: id,lat,lon. Edge rows: from,to,length_m,mode,bidirectional
    (bidirectional=true emits both directions). Edges shorter than the
    straight-line distance between their endpoints (or non-positive) are
    rejected and reported as (line number, reason); an edge naming an unknown
    node is a hard DanglingEdge error.
    """
    nodes: dict[str, geo.GeoPoint] = {}
    for line_no, row in _read_rows(node_path, NODE_CSV_HEADER):
        if len(row) != 3:
            raise FormatError(f"{node_path}:{line_no}: expected 3 fields, got {len(row)}")
        node_id = row[0].strip()
        if not node_id:
            raise FormatError(f"{node_path}:{line_no}: empty node id")
        if node_id in nodes:
            raise FormatError(f"{node_path}:{line_no}: duplicate node id {node_id!r}")
        try:
            nodes[node_id] = geo.GeoPoint(float(row[1]), float(row[2]))
        except (ValueError, ValidationError) as exc:
            raise FormatError(f"{node_path}:{line_no}: {exc}") from None

    edges: list[Edge] = []
    rejected: list[tuple[int, str]] = []
    for line_no, row in _read_rows(edge_path, EDGE_CSV_HEADER):
        if len(row) != 5:
            raise FormatError(f"{edge_path}:{line_no}: expected 5 fields, got {len(row)}")
        src, dst, raw_len, mode, bidi = (cell.strip() for cell in row)
        if src not in nodes:
            raise DanglingEdge(f"{edge_path}:{line_no}: unknown node {src!r}")
        if dst not in nodes:
            raise DanglingEdge(f"{edge_path}:{line_no}: unknown node {dst!r}")
        if mode not in MODES:
            raise FormatError(f"{edge_path}:{line_no}: unknown mode {mode!r}")
        if bidi.lower() not in ("true", "false"):
            raise FormatError(f"{edge_path}:{line_no}: bidirectional must be true/false")
        try:
            length = float(raw_len)
        except ValueError:
            raise FormatError(f"{edge_path}:{line_no}: bad length {raw_len!r}") from None
        if not length > 0:
            rejected.append((line_no, f"non-positive length {length}"))
            continue
        straight = geo.haversine_distance(nodes[src], nodes[dst])
        if length < straight:
            rejected.append(
                (line_no, f"length {length} shorter than straight-line {straight:.1f} m")
            )
            continue
        edges.append(Edge(src, dst, length, mode))
        if bidi.lower() == "true":
            edges.append(Edge(dst, src, length, mode))
    return RoadGraph(nodes, edges), rejected


def _read_rows(path: str, header: list[str]):
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty file, expected header {','.join(header)}")
        if [h.strip().lower() for h in first] != header:
            raise FormatError(f"{path}: bad header {','.join(first)!r}, expected {','.join(header)}")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            yield line_no, row
