"""Request/response models of the service layer."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, ConfigDict

from ..config import ParamsConfig, PotentialConfig, RunConfig


class FieldPayload(BaseModel):
    """A field shipped as the text of its CSV file (header x,y,u,v)."""

    model_config = ConfigDict(extra="forbid")
    csv: str


class SolveRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    config: RunConfig


class SolveRestrictedResponse(BaseModel):
    profile_csv: str
    field_csv: str
    report: dict
    passed: bool
    failures: list[str]
    summary: str


class SolveFullResponse(BaseModel):
    field_csv: str
    g1_csv: str
    potential_csv: str
    report: dict
    passed: bool
    failures: list[str]
    summary: str


class VerifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    model: str = "restricted"
    field: FieldPayload
    potential: PotentialConfig = PotentialConfig()
    params: ParamsConfig = ParamsConfig(beta=1.0)
    h2: Optional[str] = None
    tolerances: dict[str, float] = {}
    exclude_center: Optional[list[float]] = None   # (cx, cy, radius) disk to exclude


class VerifyResponse(BaseModel):
    report: dict
    passed: bool
    failures: list[str]
    summary: str


class ChargeRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    field: FieldPayload


class ChargeResponse(BaseModel):
    charge: float


class EnergyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    model: str = "restricted"
    field: FieldPayload
    potential: PotentialConfig = PotentialConfig()
    params: ParamsConfig = ParamsConfig(beta=1.0)


class EnergyResponse(BaseModel):
    energy: float
    energy_quartic: float
    energy_o3: float
    energy_potential: float
    boundary_warning: bool


class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    config: RunConfig
    param: str
    values: list[float]
    threads: int = 1


class SweepResponse(BaseModel):
    sweep_csv: str
    rows: list[list]
