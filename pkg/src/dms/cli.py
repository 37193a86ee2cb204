"""Command-line entry points: serve, ingest, admin create-user."""
from __future__ import annotations

import argparse
import getpass
import sys

from .config import load_config
from .errors import DomainError
from .service import AppState, start_service


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="dms", description="Destination management service")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--config", help="config JSON path (default: $DMS_CONFIG or built-ins)")

    ingest = sub.add_parser("ingest", help="load CSV data into the configured store")
    ingest.add_argument("--config", help="config JSON path")
    ingest.add_argument("--destinations", help="destination CSV")
    ingest.add_argument("--nodes", help="road node CSV (requires --edges)")
    ingest.add_argument("--edges", help="road edge CSV (requires --nodes)")
    ingest.add_argument("--hotels", help="hotel inventory CSV")

    admin = sub.add_parser("admin", help="administrative commands")
    admin_sub = admin.add_subparsers(dest="admin_command", required=True)
    create = admin_sub.add_parser("create-user", help="create a user of any role")
    create.add_argument("--config", help="config JSON path")
    create.add_argument("--username", required=True)
    create.add_argument("--password", help="prompted for if omitted")
    create.add_argument("--role", default="tourist",
                        choices=["tourist", "local", "site_manager", "admin"])

    args = parser.parse_args(argv)
    try:
        if args.command == "serve":
            return _serve(args)
        if args.command == "ingest":
            return _ingest(args)
        if args.command == "admin" and args.admin_command == "create-user":
            return _create_user(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


def _serve(args) -> int:
    config = load_config(args.config)
    service = start_service(config)
    host, port = service.address
    print(f"dms serving on http://{host}:{port} (backend: {config.backend})", flush=True)
    try:
        service._threads[0].join()
    except KeyboardInterrupt:
        print("shutting down")
        service.stop()
    return 0


def _ingest(args) -> int:
    if not any([args.destinations, args.nodes, args.edges, args.hotels]):
        print("error: nothing to ingest (see --help)", file=sys.stderr)
        return 1
    if bool(args.nodes) != bool(args.edges):
        print("error: --nodes and --edges must be given together", file=sys.stderr)
        return 1
    config = load_config(args.config)
    if config.backend == "memory":
        print("warning: memory backend — ingested data will not outlive this process",
              file=sys.stderr)
    app = AppState(config)
    status = 0
    try:
        if args.destinations:
            report = app.ingest_destinations(args.destinations)
            print(f"destinations: {report.accepted} accepted, {report.rejected} rejected")
            for line, reason in report.errors:
                print(f"  line {line}: {reason}", file=sys.stderr)
            status |= 1 if report.rejected else 0
        if args.nodes:
            rejected = app.load_road_graph(args.nodes, args.edges)
            graph = app.graph
            print(f"road graph: {len(graph.nodes)} nodes, {len(graph.edges)} edges, "
                  f"{len(rejected)} edge rows rejected")
            for line, reason in rejected:
                print(f"  line {line}: {reason}", file=sys.stderr)
            status |= 1 if rejected else 0
        if args.hotels:
            report = app.ingest_hotels(args.hotels)
            print(f"hotels: {report.accepted} accepted, {report.rejected} rows rejected")
            for line, reason in report.errors:
                print(f"  line {line}: {reason}", file=sys.stderr)
            status |= 1 if report.rejected else 0
    finally:
        app.close()
    return status


def _create_user(args) -> int:
    config = load_config(args.config)
    password = args.password or getpass.getpass("password: ")
    app = AppState(config)
    try:
        user_id = app.identity.register_user(args.username, password, args.role)
        print(f"created {args.role} {args.username!r} ({user_id})")
    finally:
        app.close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
