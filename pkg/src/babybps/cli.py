"""Command-line thin client.

Builds a request from flags and an optional JSON config (precedence:
flags > config > defaults), sends it to the service (in-process by
default, over HTTP with --server) and writes the returned artifacts
next to the --out prefix.

Exit codes: 0 all configured tolerances pass, 1 input error,
2 tolerance failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import urllib.error
import urllib.request

from fastapi import HTTPException
from pydantic import ValidationError

from .config import ToleranceConfig, load_config, set_by_path, validate_config
from .errors import BabyBpsError, InputError
from .service.app import charge as charge_endpoint
from .service.app import energy as energy_endpoint
from .service.app import solve_full as solve_full_endpoint
from .service.app import solve_restricted as solve_restricted_endpoint
from .service.app import sweep as sweep_endpoint
from .service.app import verify as verify_endpoint
from .service.models import (ChargeRequest, EnergyRequest, FieldPayload,
                             SolveRequest, SweepRequest, VerifyRequest)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_TOLERANCE = 2


def _parse_potential(text: str):
    name, _, rest = text.partition(":")
    params = [float(t) for t in rest.split(",") if t.strip()] if rest else []
    return name, params


def _parse_grid(text: str) -> dict:
    try:
        nx, ny, hx, hy = text.split(",")
        return {"nx": int(nx), "ny": int(ny), "hx": float(hx), "hy": float(hy)}
    except ValueError as exc:
        raise InputError(f"--grid expects nx,ny,hx,hy, got {text!r}") from exc


def _parse_checks(pairs) -> dict:
    out = {}
    for pair in pairs or []:
        key, _, val = pair.partition("=")
        if not val:
            raise InputError(f"--check expects key=value, got {pair!r}")
        out[key] = float(val)
    ToleranceConfig.model_validate(out)  # reject unknown tolerance keys
    return out


def _base_doc(args) -> dict:
    doc = {}
    if args.config:
        doc = load_config(args.config).model_dump()
    return doc


def _common_solver_overrides(doc: dict, args) -> None:
    if getattr(args, "grid", None):
        for k, v in _parse_grid(args.grid).items():
            set_by_path(doc, f"grid.{k}", v)
    if getattr(args, "tol", None) is not None:
        set_by_path(doc, "solver.tol", args.tol)
    if getattr(args, "out", None):
        set_by_path(doc, "output.prefix", args.out)


def _post_remote(server: str, path: str, body: dict) -> dict:
    req = urllib.request.Request(server.rstrip("/") + path,
                                 data=json.dumps(body).encode(),
                                 headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req) as resp:
            return json.loads(resp.read().decode())
    except urllib.error.HTTPError as exc:
        detail = exc.read().decode(errors="replace")
        raise InputError(f"server rejected the request ({exc.code}): {detail}") from exc
    except urllib.error.URLError as exc:
        raise InputError(f"cannot reach server {server}: {exc.reason}") from exc


def _call(args, path: str, handler, request_model) -> dict:
    body = request_model.model_dump()
    if args.server:
        return _post_remote(args.server, path, body)
    response = handler(request_model)
    return response.model_dump()


def _write_artifacts(prefix, mapping: dict) -> None:
    if not prefix:
        return
    for suffix, text in mapping.items():
        if text is None:
            continue
        with open(f"{prefix}.{suffix}", "w", newline="\n") as fh:
            fh.write(text)


def _finish(args, report: dict, passed: bool, failures, summary: str) -> int:
    if not args.quiet:
        print(summary)
        for f in failures:
            print(f"tolerance failure: {f}", file=sys.stderr)
    return EXIT_OK if passed else EXIT_TOLERANCE


def cmd_solve_restricted(args) -> int:
    doc = _base_doc(args)
    set_by_path(doc, "model", "restricted")
    if args.potential:
        name, params = _parse_potential(args.potential)
        set_by_path(doc, "potential.name", name)
        if params:
            set_by_path(doc, "potential.params", params)
    if args.beta is not None:
        set_by_path(doc, "params.beta", args.beta)
    if args.sigma is not None:
        set_by_path(doc, "potential.sigma", args.sigma)
    if args.n is not None:
        set_by_path(doc, "solver.n", args.n)
    if args.f0 is not None:
        set_by_path(doc, "solver.f0", args.f0)
    if args.rmax is not None:
        set_by_path(doc, "solver.rmax", args.rmax)
    _common_solver_overrides(doc, args)
    cfg = validate_config(doc)
    out = _call(args, "/solve/restricted", solve_restricted_endpoint, SolveRequest(config=cfg))
    prefix = args.out or cfg.output.prefix
    _write_artifacts(prefix, {"profile.csv": out["profile_csv"],
                              "field.csv": out["field_csv"],
                              "report.json": json.dumps(out["report"], indent=2, sort_keys=True) + "\n"})
    return _finish(args, out["report"], out["passed"], out["failures"], out["summary"])


def cmd_solve_full(args) -> int:
    doc = _base_doc(args)
    set_by_path(doc, "model", "full")
    if args.h2:
        set_by_path(doc, "solver.h2", args.h2)
    if args.lambda1 is not None:
        set_by_path(doc, "params.lambda1", args.lambda1)
    if args.lambda2 is not None:
        set_by_path(doc, "params.lambda2", args.lambda2)
    if args.init:
        set_by_path(doc, "solver.init", args.init)
    if args.iters is not None:
        set_by_path(doc, "solver.iters", args.iters)
    _common_solver_overrides(doc, args)
    cfg = validate_config(doc)
    out = _call(args, "/solve/full", solve_full_endpoint, SolveRequest(config=cfg))
    prefix = args.out or cfg.output.prefix
    _write_artifacts(prefix, {"field.csv": out["field_csv"],
                              "g1.csv": out["g1_csv"],
                              "potential.csv": out["potential_csv"],
                              "report.json": json.dumps(out["report"], indent=2, sort_keys=True) + "\n"})
    return _finish(args, out["report"], out["passed"], out["failures"], out["summary"])


def _read_field_arg(path: str) -> FieldPayload:
    try:
        with open(path) as fh:
            return FieldPayload(csv=fh.read())
    except FileNotFoundError as exc:
        raise InputError(f"field file not found: {path}") from exc


def _potential_block(args) -> dict:
    block = {}
    if getattr(args, "potential", None):
        name, params = _parse_potential(args.potential)
        block["name"] = name
        if params:
            block["params"] = params
    if getattr(args, "sigma", None) is not None:
        block["sigma"] = args.sigma
    return block


def _params_block(args) -> dict:
    block = {}
    for key in ("beta", "lambda1", "lambda2"):
        val = getattr(args, key, None)
        if val is not None:
            block[key] = val
    return block


def cmd_verify(args) -> int:
    exclude = None
    if args.exclude_center:
        try:
            exclude = [float(t) for t in args.exclude_center.split(",")]
        except ValueError as exc:
            raise InputError(f"--exclude-center expects cx,cy,radius, got {args.exclude_center!r}") from exc
    req = VerifyRequest(model=args.model, field=_read_field_arg(args.field),
                        potential=_potential_block(args) or {"name": "bps_test"},
                        params=_params_block(args) or {"beta": 1.0},
                        h2=args.h2, tolerances=_parse_checks(args.check),
                        exclude_center=exclude)
    out = _call(args, "/verify", verify_endpoint, req)
    report_text = json.dumps(out["report"], indent=2, sort_keys=True) + "\n"
    if args.out:
        _write_artifacts(args.out, {"report.json": report_text})
    elif not args.quiet:
        print(report_text, end="")
    return _finish(args, out["report"], out["passed"], out["failures"], out["summary"])


def cmd_charge(args) -> int:
    out = _call(args, "/charge", charge_endpoint, ChargeRequest(field=_read_field_arg(args.field)))
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK


def cmd_energy(args) -> int:
    req = EnergyRequest(model=args.model, field=_read_field_arg(args.field),
                        potential=_potential_block(args) or {"name": "bps_test"},
                        params=_params_block(args) or {"beta": 1.0})
    out = _call(args, "/energy", energy_endpoint, req)
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK


def cmd_sweep(args) -> int:
    doc = _base_doc(args)
    if getattr(args, "out", None):
        set_by_path(doc, "output.prefix", args.out)
    cfg = validate_config(doc)
    values = [float(t) for t in args.values.split(",") if t.strip()]
    req = SweepRequest(config=cfg, param=args.param, values=values, threads=args.threads)
    out = _call(args, "/sweep", sweep_endpoint, req)
    prefix = args.out or cfg.output.prefix
    if prefix:
        _write_artifacts(prefix, {"sweep.csv": out["sweep_csv"]})
    elif not args.quiet:
        print(out["sweep_csv"], end="")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn
    uvicorn.run("babybps.service.app:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="babybps",
                                     description="Solve and verify first-order (Bogomolny) "
                                                 "structure of baby Skyrme models")
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--out", help="artifact path prefix")
    parser.add_argument("--threads", type=int, default=1, help="sweep worker threads")
    parser.add_argument("--quiet", action="store_true")
    parser.add_argument("--server", help="remote service URL (default: run in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-restricted", help="hedgehog solve of the restricted first-order equation")
    p.add_argument("--potential", help="family name[:p1,p2,...]")
    p.add_argument("--beta", type=float)
    p.add_argument("--sigma", type=int, choices=(-1, 1))
    p.add_argument("--n", type=int)
    p.add_argument("--f0", type=float)
    p.add_argument("--rmax", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--grid", help="nx,ny,hx,hy")
    p.set_defaults(func=cmd_solve_restricted)

    p = sub.add_parser("solve-full", help="solve the full-model first-order system")
    p.add_argument("--h2", help="const[:c] | linear:cu,cv | poly:a0,..|b0,.. | monomial:p,q")
    p.add_argument("--lambda1", type=float)
    p.add_argument("--lambda2", type=float)
    p.add_argument("--init", help="antiholo[:a] | csv:<path>")
    p.add_argument("--iters", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--grid", help="nx,ny,hx,hy")
    p.set_defaults(func=cmd_solve_full)

    p = sub.add_parser("verify", help="verify a stored field")
    p.add_argument("--field", required=True, help="field CSV (x,y,u,v)")
    p.add_argument("--model", choices=("restricted", "full"), default="restricted")
    p.add_argument("--potential")
    p.add_argument("--sigma", type=int, choices=(-1, 1))
    p.add_argument("--beta", type=float)
    p.add_argument("--lambda1", type=float)
    p.add_argument("--lambda2", type=float)
    p.add_argument("--h2")
    p.add_argument("--check", action="append", help="tolerance key=value (repeatable)")
    p.add_argument("--exclude-center", help="cx,cy,radius disk excluded from pointwise norms")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("charge", help="topological charge of a stored field")
    p.add_argument("--field", required=True)
    p.set_defaults(func=cmd_charge)

    p = sub.add_parser("energy", help="energy split of a stored field")
    p.add_argument("--field", required=True)
    p.add_argument("--model", choices=("restricted", "full"), default="restricted")
    p.add_argument("--potential")
    p.add_argument("--beta", type=float)
    p.add_argument("--lambda1", type=float)
    p.add_argument("--lambda2", type=float)
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("sweep", help="run the pipeline over a parameter range")
    p.add_argument("--param", required=True, help="dotted config key, e.g. solver.f0")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HTTPException as exc:
        print(f"error: {exc.detail}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, BabyBpsError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
