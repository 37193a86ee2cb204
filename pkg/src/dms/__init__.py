"""Destination information and trip-planning service.

Subsystems: destination catalog, geographic primitives and proximity search,
road-graph routing, hotel reservations, accounts and community threads, and
an HTTP/JSON service tying them together over pluggable storage.
"""

__version__ = "0.1.0"
