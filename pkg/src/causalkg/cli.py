"""Command-line front door.

Every subcommand is a thin client of the HTTP service: by default the
service app is constructed in-process around ``--store`` and requests go
over an in-memory ASGI transport; with ``--server URL`` the same requests
go to a running ``causalkg serve`` instance instead.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path
from urllib.parse import quote

import httpx

from .errors import CausalGraphError

_EXPORT_FORMATS = ["pgjson", "linktuple", "gml", "graphml", "ntriples", "dot", "html"]
_IMPORT_FORMATS = ["pgjson", "linktuple"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causalkg",
        description="Model, persist, query, exchange and visualize causal graphs.",
    )
    parser.add_argument("--store", required=True, help="path of the store file")
    mode = parser.add_mutually_exclusive_group()
    mode.add_argument("--exclusive", dest="exclusive", action="store_true", default=True,
                      help="open as the single writer (default)")
    mode.add_argument("--shared", dest="exclusive", action="store_false",
                      help="open read-only, state frozen at open time")
    parser.add_argument("--log-dir", default=None, help="directory for diagnostic log files")
    parser.add_argument("--log-level", type=int, default=20,
                        help="10 debug, 20 info, 30 warning, 40 error")
    parser.add_argument("--server", default=None,
                        help="base URL of a running causalkg serve instance")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create or open the store")
    p.add_argument("--from", dest="from_file", default=None,
                   help="pre-fill from a .pg.json or .lt.json document")
    p.add_argument("--onto", action="append", default=[], help="ontology file to import (repeatable)")

    p = sub.add_parser("add-node", help="add a causal node")
    p.add_argument("name")
    p.add_argument("--comment", action="append", default=[])
    p.add_argument("--creator", default=None)

    p = sub.add_parser("add-edge", help="add a causal edge")
    p.add_argument("cause")
    p.add_argument("effect")
    p.add_argument("--name", default=None)
    p.add_argument("--confidence", type=float, default=None)
    p.add_argument("--lag-s", type=float, default=None)
    p.add_argument("--force-create", action="store_true")
    p.add_argument("--comment", action="append", default=[])
    p.add_argument("--creator", default=None)

    p = sub.add_parser("rm-node", help="remove a node and its edges")
    p.add_argument("name")

    p = sub.add_parser("rm-edge", help="remove edges by name, endpoints, or node")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--name")
    group.add_argument("--between", nargs=2, metavar=("CAUSE", "EFFECT"))
    group.add_argument("--of-node", metavar="NODE")

    p = sub.add_parser("list", help="list individuals or classes")
    which = p.add_mutually_exclusive_group()
    which.add_argument("--individuals", action="store_true", default=True)
    which.add_argument("--classes", action="store_true", default=False)

    p = sub.add_parser("export", help="write the graph in an interchange format")
    p.add_argument("--format", required=True, choices=_EXPORT_FORMATS)
    p.add_argument("--out", default=None, help="output file (stdout when omitted)")
    p.add_argument("--step-s", type=float, default=1.0, help="link-tuple time step in seconds")

    p = sub.add_parser("import", help="create a NEW store from a document")
    p.add_argument("--format", required=True, choices=_IMPORT_FORMATS)
    p.add_argument("--in", dest="in_file", required=True)
    p.add_argument("--store", dest="new_store", required=True, help="path of the new store")
    p.add_argument("--overwrite", action="store_true")

    p = sub.add_parser("import-onto", help="import a third-party ontology (path or URL)")
    p.add_argument("source")

    p = sub.add_parser("query", help="run a query (text or @file)")
    p.add_argument("--json", dest="as_json", action="store_true", help="JSON lines output")
    p.add_argument("text")

    sub.add_parser("validate", help="report invariant violations and cycles")

    p = sub.add_parser("serve", help="run the HTTP service for this store")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return _serve(args)
    try:
        return asyncio.run(_dispatch(args))
    except CausalGraphError as exc:
        print(str(exc), file=sys.stderr)
        return 1


def _serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        args.store,
        exclusive=args.exclusive,
        log_file_dir=args.log_dir,
        logger_level=args.log_level,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


async def _dispatch(args) -> int:
    app = None
    if args.server:
        client = httpx.AsyncClient(base_url=args.server.rstrip("/"), timeout=60.0)
    else:
        from .service import create_app

        init_kwargs = {}
        if args.command == "init":
            init_kwargs["external_ontos"] = args.onto
            if args.from_file:
                init_kwargs["external_graph"] = args.from_file
        if args.command == "import":
            # a fresh store is created at the target path; no source needed
            app = create_app(None)
        else:
            app = create_app(
                args.store,
                exclusive=args.exclusive,
                log_file_dir=args.log_dir,
                logger_level=args.log_level,
                **init_kwargs,
            )
        client = httpx.AsyncClient(
            transport=httpx.ASGITransport(app=app), base_url="http://causalkg.internal", timeout=60.0
        )
    try:
        return await _run_command(args, client)
    finally:
        await client.aclose()
        if app is not None:
            app.state.graph.close()


def _fail(response: httpx.Response) -> int:
    try:
        detail = response.json().get("detail", response.text)
    except ValueError:
        detail = response.text
    print(detail, file=sys.stderr)
    return 1


async def _run_command(args, client: httpx.AsyncClient) -> int:
    command = args.command

    if command == "init":
        response = await client.get("/health")
        if response.status_code != 200:
            return _fail(response)
        payload = response.json()
        print(f"store {payload['store_path']}: {payload['individuals']} individuals")
        return 0

    if command == "add-node":
        response = await client.post(
            "/nodes", json={"name": args.name, "comments": args.comment, "creator": args.creator}
        )
        if response.status_code != 200:
            return _fail(response)
        print(response.json()["name"])
        return 0

    if command == "add-edge":
        response = await client.post(
            "/edges",
            json={
                "cause": args.cause,
                "effect": args.effect,
                "name": args.name,
                "confidence": args.confidence,
                "time_lag_s": args.lag_s,
                "comments": args.comment,
                "creator": args.creator,
                "force_create": args.force_create,
            },
        )
        if response.status_code != 200:
            return _fail(response)
        print(response.json()["name"])
        return 0

    if command == "rm-node":
        response = await client.delete(f"/nodes/{quote(args.name, safe='')}")
        if response.status_code != 200:
            return _fail(response)
        print("true" if response.json()["removed"] else "false")
        return 0

    if command == "rm-edge":
        if args.name is not None:
            response = await client.delete(f"/edges/{quote(args.name, safe='')}")
            if response.status_code != 200:
                return _fail(response)
            print("true" if response.json()["removed"] else "false")
        elif args.between is not None:
            response = await client.post(
                "/edges/remove-between",
                params={"cause": args.between[0], "effect": args.between[1]},
            )
            if response.status_code != 200:
                return _fail(response)
            print(response.json()["removed"])
        else:
            response = await client.post("/edges/remove-of-node", params={"node": args.of_node})
            if response.status_code != 200:
                return _fail(response)
            print(response.json()["removed"])
        return 0

    if command == "list":
        if args.classes:
            response = await client.get("/classes")
            if response.status_code != 200:
                return _fail(response)
            print(" ".join(response.json()["classes"]))
        else:
            response = await client.get("/individuals")
            if response.status_code != 200:
                return _fail(response)
            print(" ".join(i["name"] for i in response.json()["individuals"]))
        return 0

    if command == "export":
        response = await client.post("/export", json={"format": args.format, "step_s": args.step_s})
        if response.status_code != 200:
            return _fail(response)
        payload = response.json()
        for warning in payload["warnings"]:
            print(f"warning: {warning}", file=sys.stderr)
        if args.out:
            Path(args.out).write_text(payload["content"], encoding="utf-8")
        else:
            sys.stdout.write(payload["content"])
        return 0

    if command == "import":
        content = Path(args.in_file).read_text(encoding="utf-8")
        response = await client.post(
            "/load",
            json={
                "format": args.format,
                "content": content,
                "store_path": args.new_store,
                "overwrite": args.overwrite,
            },
        )
        if response.status_code != 200:
            return _fail(response)
        payload = response.json()
        print(f"store {payload['store_path']}: {payload['individuals']} individuals")
        return 0

    if command == "import-onto":
        source = args.source
        if source.startswith(("http://", "https://")):
            # plain client: the service transport must not see this request
            async with httpx.AsyncClient(timeout=60.0) as web:
                download = await web.get(source, follow_redirects=True)
            download.raise_for_status()
            content = download.text
            filename = Path(httpx.URL(source).path).name or "remote.ttl"
        else:
            content = Path(source).read_text(encoding="utf-8")
            filename = Path(source).name
        response = await client.post(
            "/import-ontology", json={"content": content, "filename": filename}
        )
        if response.status_code != 200:
            return _fail(response)
        print(response.json()["message"])
        return 0

    if command == "query":
        text = args.text
        if text.startswith("@"):
            text = Path(text[1:]).read_text(encoding="utf-8")
        response = await client.post("/query", json={"text": text})
        if response.status_code != 200:
            return _fail(response)
        payload = response.json()
        if args.as_json:
            for row in payload["rows"]:
                print(json.dumps(row, sort_keys=True, ensure_ascii=False))
        else:
            print("\t".join(payload["variables"]))
            for row in payload["rows"]:
                print("\t".join(row[v] for v in payload["variables"]))
        return 0

    if command == "validate":
        response = await client.get("/validate")
        if response.status_code != 200:
            return _fail(response)
        payload = response.json()
        if payload["ok"]:
            print("ok")
        else:
            for violation in payload["violations"]:
                print(f"violation: {violation}")
            for cycle in payload["cycles"]:
                print("cycle: " + " -> ".join(cycle))
        return 0

    raise AssertionError(f"unhandled command {command}")


if __name__ == "__main__":
    sys.exit(main())
