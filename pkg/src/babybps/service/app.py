"""FastAPI service wrapping the solver/verifier pipeline.

The CLI calls these handlers in-process by default; `babybps serve` runs
them behind uvicorn for remote clients.  Domain input problems map to
HTTP 400; tolerance failures are not errors (the response carries
passed=False and the failure list).
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import pipeline
from ..config import validate_config
from ..errors import BabyBpsError, InputError
from ..fieldio import parse_field_csv
from ..potentials import ModelParams, builtin_potential
from .models import (ChargeRequest, ChargeResponse, EnergyRequest, EnergyResponse,
                     SolveFullResponse, SolveRequest, SolveRestrictedResponse,
                     SweepRequest, SweepResponse, VerifyRequest, VerifyResponse)

app = FastAPI(title="babybps", description="Bogomolny solver/verifier for baby Skyrme models")


def _bad_request(exc: Exception) -> HTTPException:
    return HTTPException(status_code=400, detail=str(exc))


def _params(cfg_params) -> ModelParams:
    return ModelParams(beta=cfg_params.beta, lambda1=cfg_params.lambda1,
                       lambda2=cfg_params.lambda2, gamma=cfg_params.gamma)


@app.get("/healthz")
def healthz():
    return {"status": "ok"}


@app.post("/solve/restricted", response_model=SolveRestrictedResponse)
def solve_restricted(req: SolveRequest):
    try:
        payload = pipeline.run_restricted(req.config)
    except BabyBpsError as exc:
        raise _bad_request(exc)
    return SolveRestrictedResponse(
        profile_csv=payload.artifacts["profile.csv"],
        field_csv=payload.artifacts["field.csv"],
        report=payload.report, passed=payload.passed,
        failures=payload.failures, summary=payload.summary)


@app.post("/solve/full", response_model=SolveFullResponse)
def solve_full(req: SolveRequest):
    try:
        payload = pipeline.run_full(req.config)
    except BabyBpsError as exc:
        raise _bad_request(exc)
    return SolveFullResponse(
        field_csv=payload.artifacts["field.csv"],
        g1_csv=payload.artifacts["g1.csv"],
        potential_csv=payload.artifacts["potential.csv"],
        report=payload.report, passed=payload.passed,
        failures=payload.failures, summary=payload.summary)


@app.post("/verify", response_model=VerifyResponse)
def verify(req: VerifyRequest):
    try:
        field = parse_field_csv(req.field.csv)
        potential = builtin_potential(req.potential.name, req.potential.params)
        params = _params(req.params)
        h2 = pipeline.parse_h2(req.h2) if req.h2 is not None else None
        if req.exclude_center is not None and len(req.exclude_center) != 3:
            raise InputError("exclude_center must be [cx, cy, radius]")
        payload = pipeline.run_verify(req.model, field, potential, params,
                                      sigma=float(req.potential.sigma), h2=h2,
                                      tolerances=req.tolerances,
                                      exclude_disk=req.exclude_center)
    except BabyBpsError as exc:
        raise _bad_request(exc)
    return VerifyResponse(report=payload.report, passed=payload.passed,
                          failures=payload.failures, summary=payload.summary)


@app.post("/charge", response_model=ChargeResponse)
def charge(req: ChargeRequest):
    try:
        field = parse_field_csv(req.field.csv)
        return ChargeResponse(charge=pipeline.run_charge(field))
    except BabyBpsError as exc:
        raise _bad_request(exc)


@app.post("/energy", response_model=EnergyResponse)
def energy(req: EnergyRequest):
    try:
        field = parse_field_csv(req.field.csv)
        potential = builtin_potential(req.potential.name, req.potential.params)
        params = _params(req.params)
        return EnergyResponse(**pipeline.run_energy(req.model, field, potential, params))
    except BabyBpsError as exc:
        raise _bad_request(exc)


@app.post("/sweep", response_model=SweepResponse)
def sweep(req: SweepRequest):
    try:
        validate_config(req.config.model_dump())  # re-check ranges after overrides
        rows, csv_text = pipeline.run_sweep(req.config.model_dump(), req.param,
                                            req.values, threads=req.threads)
    except BabyBpsError as exc:
        raise _bad_request(exc)
    return SweepResponse(sweep_csv=csv_text, rows=rows)
