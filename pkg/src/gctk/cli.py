"""Command-line front end: a thin client of the verification service.

Every subcommand builds an HTTP request; by default it is served by the
FastAPI app in process (no server needed), or by a remote instance when
--server is given.  Exit code 0 means every check passed.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from typing import Any

import httpx

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def _request(server: str | None, method: str, path: str, payload: dict) -> httpx.Response:
    async def go() -> httpx.Response:
        if server:
            transport = None
            base = server.rstrip("/")
        else:
            from .service.app import app

            transport = httpx.ASGITransport(app=app)
            base = "http://gctk.internal"
        async with httpx.AsyncClient(
            transport=transport, base_url=base, timeout=600.0
        ) as client:
            return await client.request(method, path, json=payload)

    return asyncio.run(go())


def _fail_http(resp: httpx.Response) -> int:
    try:
        detail = resp.json().get("detail", resp.text)
    except Exception:
        detail = resp.text
    print(f"error: {detail}", file=sys.stderr)
    return EXIT_USAGE


def cmd_verify(args: argparse.Namespace) -> int:
    payload = {
        "n": args.n,
        "seed": args.seed,
        "samples": args.samples,
        "tol": args.tol,
        "mutate": args.mutate,
    }
    resp = _request(args.server, "POST", "/verify", payload)
    if resp.status_code != 200:
        return _fail_http(resp)
    report = resp.json()
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    failing = [c["check_id"] for c in report["checks"] if c["status"] == "fail"]
    for c in report["checks"]:
        print(f"{c['status']:4s}  {c['check_id']}")
    if failing:
        print(f"FAILED: {', '.join(failing)}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_typemap(args: argparse.Namespace) -> int:
    payload = {"n": args.n, "grid": args.grid, "fiber": args.fiber}
    resp = _request(args.server, "POST", "/typemap", payload)
    if resp.status_code != 200:
        return _fail_http(resp)
    csv_text = resp.text
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    return EXIT_OK


def cmd_spinor(args: argparse.Namespace) -> int:
    if (args.alpha is None) != (args.beta is None):
        print("error: give both --alpha and --beta, or neither", file=sys.stderr)
        return EXIT_USAGE
    payload: dict[str, Any] = {"n": args.n, "format": args.format}
    if args.alpha is not None:
        payload.update({"alpha": args.alpha, "beta": args.beta})
    resp = _request(args.server, "POST", "/spinor", payload)
    if resp.status_code != 200:
        return _fail_http(resp)
    print(resp.json()["text"])
    return EXIT_OK


def cmd_fmap(args: argparse.Namespace) -> int:
    resp = _request(args.server, "POST", "/fmap", {"eta": args.eta, "zeta": args.zeta})
    if resp.status_code != 200:
        return _fail_http(resp)
    body = resp.json()
    print(f"({body['alpha']}, {body['beta']})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gctk",
        description="exact verification of the generalized-structure families on flat quaternionic models",
    )
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running service; default runs the service in process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run the full verification suite")
    p_verify.add_argument("--n", type=int, default=1, choices=(1, 2, 3))
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--samples", type=int, default=50)
    p_verify.add_argument("--tol", type=float, default=1e-9,
                          help="tolerance of the float cross-check lane (exact checks ignore it)")
    p_verify.add_argument("--mutate", choices=("nonclosed-omega",), default=None,
                          help="inject a deliberate defect to prove the checks can fail")
    p_verify.add_argument("--out", default=None, help="write the JSON report here")
    p_verify.set_defaults(func=cmd_verify)

    p_typemap = sub.add_parser("typemap", help="sample the type stratification as CSV")
    p_typemap.add_argument("--n", type=int, default=1, choices=(1, 2, 3))
    p_typemap.add_argument("--grid", type=int, default=3)
    p_typemap.add_argument("--fiber", action="store_true",
                           help="report fiber types instead of total-space types")
    p_typemap.add_argument("--out", default=None, help="write the CSV here")
    p_typemap.set_defaults(func=cmd_typemap)

    p_spinor = sub.add_parser("spinor", help="print the family spinor")
    p_spinor.add_argument("--n", type=int, default=1, choices=(1, 2, 3))
    p_spinor.add_argument("--alpha", default=None, help="rational complex literal p/q+r/si")
    p_spinor.add_argument("--beta", default=None)
    p_spinor.add_argument("--format", choices=("text",), default="text")
    p_spinor.set_defaults(func=cmd_spinor)

    p_fmap = sub.add_parser("fmap", help="map tangent-chart parameters to the product sphere pair")
    p_fmap.add_argument("--eta", required=True, help="rational complex literal")
    p_fmap.add_argument("--zeta", required=True)
    p_fmap.set_defaults(func=cmd_fmap)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except httpx.HTTPError as exc:
        print(f"error: could not reach the service: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
