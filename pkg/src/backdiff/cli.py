"""Command-line front end.

The CLI is a thin client of the HTTP service: it reads the input file,
posts one request, and writes the returned bytes.  Without --server the
service runs in-process over an ASGI transport, so single invocations
need no daemon; with --server the same requests go to a remote instance.
"""

from __future__ import annotations

import argparse
import asyncio
import base64
import math
import sys
from pathlib import Path

import httpx

from .imageio import format_for_path

_ENHANCE_COMMANDS = {
    "grey-global": "/enhance/grey-global",
    "grey-local": "/enhance/grey-local",
    "colour-global": "/enhance/colour-global",
    "colour-local": "/enhance/colour-local",
}


class CommandError(Exception):
    """Fatal CLI failure carrying the user-facing diagnostic."""


def _parse_time(text: str) -> float:
    if text.strip().lower() in {"inf", "infinity"}:
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid time {text!r}; use a number or 'inf'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="backdiff",
        description="Contrast enhancement by stable backward diffusion.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p: argparse.ArgumentParser) -> None:
        p.add_argument("--input", required=True, help="input image (.pgm/.ppm/.png)")
        p.add_argument("--output", required=True, help="output image (.pgm/.ppm/.png)")
        p.add_argument("--server", default=None,
                       help="base URL of a running service; default: in-process")

    def add_evolution(p: argparse.ArgumentParser) -> None:
        p.add_argument("--a", type=float, default=1.0, help="penaliser amplitude (default 1)")
        p.add_argument("--n", type=int, default=1, help="penaliser exponent (default 1)")
        p.add_argument("--t", type=_parse_time, required=True,
                       help="diffusion time; 'inf' for the analytic steady state")
        p.add_argument("--tau", type=float, default=None,
                       help="step size (default: optimal step)")
        p.add_argument("--trace", default=None, metavar="CSV",
                       help="write the energy trace to this CSV file")

    def add_local(p: argparse.ArgumentParser) -> None:
        p.add_argument("--rho", type=float, default=60.0, help="disk radius in pixels")
        p.add_argument("--kernel", choices=["box", "bspline"], default="box",
                       help="spatial weighting kernel")

    def add_lambda(p: argparse.ArgumentParser) -> None:
        p.add_argument("--lambda", dest="lam", type=float, default=0.5,
                       help="multiplicative/additive blend weight in [0, 1]")

    p = sub.add_parser("grey-global", help="global enhancement of a greyscale image")
    add_io(p); add_evolution(p)

    p = sub.add_parser("grey-local", help="local enhancement of a greyscale image")
    add_io(p); add_evolution(p); add_local(p)

    p = sub.add_parser("colour-global", help="global enhancement of a colour image")
    add_io(p); add_evolution(p); add_lambda(p)

    p = sub.add_parser("colour-local", help="local enhancement of a colour image")
    add_io(p); add_evolution(p); add_local(p); add_lambda(p)

    p = sub.add_parser("steady-state",
                       help="analytic steady-state enhancement (grey or colour input)")
    add_io(p); add_lambda(p)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def _post(server: str | None, path: str, payload: dict) -> tuple[int, dict]:
    if server is not None:
        with httpx.Client(base_url=server, timeout=300.0) as client:
            response = client.post(path, json=payload)
            return response.status_code, response.json()

    from .service.app import create_app

    async def go():
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://backdiff.internal", timeout=None
        ) as client:
            return await client.post(path, json=payload)

    response = asyncio.run(go())
    return response.status_code, response.json()


def _format_detail(body: dict) -> str:
    detail = body.get("detail", body)
    if isinstance(detail, list):  # pydantic validation report
        parts = []
        for item in detail:
            loc = ".".join(str(x) for x in item.get("loc", []) if x != "body")
            parts.append(f"{loc}: {item.get('msg', item)}")
        return "; ".join(parts)
    return str(detail)


def _read_input(path: str) -> str:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CommandError(f"cannot read input image {path!r}: {exc}")
    return base64.b64encode(data).decode("ascii")


def _run_pipeline(args: argparse.Namespace) -> int:
    try:
        output_format = format_for_path(args.output)
    except ValueError as exc:
        raise CommandError(str(exc))
    payload: dict = {
        "image": _read_input(args.input),
        "output_format": output_format,
    }
    if args.command in _ENHANCE_COMMANDS:
        path = _ENHANCE_COMMANDS[args.command]
        payload.update(
            a=args.a,
            n=args.n,
            t="inf" if math.isinf(args.t) else args.t,
            tau=args.tau,
            trace=args.trace is not None,
        )
        if args.command.endswith("-local"):
            payload.update(rho=args.rho, kernel=args.kernel)
        if args.command.startswith("colour"):
            payload["lambda"] = args.lam
    else:
        path = "/steady-state"
        payload["lambda"] = args.lam

    try:
        status, body = _post(args.server, path, payload)
    except httpx.HTTPError as exc:
        raise CommandError(f"cannot reach service: {exc}")

    if status != 200:
        raise CommandError(_format_detail(body))

    try:
        Path(args.output).write_bytes(base64.b64decode(body["image"]))
    except OSError as exc:
        raise CommandError(f"cannot write output image {args.output!r}: {exc}")
    trace_path = getattr(args, "trace", None)
    if trace_path is not None:
        trace_csv = body.get("trace_csv")
        if trace_csv is None:
            raise CommandError("service returned no trace for this run")
        try:
            Path(trace_path).write_text(trace_csv)
        except OSError as exc:
            raise CommandError(f"cannot write trace {trace_path!r}: {exc}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service.app import create_app

        uvicorn.run(create_app(), host=args.host, port=args.port)
        return 0
    try:
        return _run_pipeline(args)
    except CommandError as exc:
        print(f"backdiff: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
