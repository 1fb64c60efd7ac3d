"""Run configuration: one JSON document, strictly validated.

CLI flags override config keys one-for-one; precedence is
flags > config file > defaults.  Unknown keys are rejected.
"""

from __future__ import annotations

import json
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from .errors import InputError


class PotentialConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = "bps_test"
    params: list[float] = []
    sigma: int = -1

    @field_validator("sigma")
    @classmethod
    def _sigma_branch(cls, s):
        if s not in (-1, 1):
            raise ValueError("potential.sigma must be +1 or -1")
        return s


class ParamsConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    beta: Optional[float] = None
    lambda1: float = 0.0
    lambda2: Optional[float] = None
    gamma: float = 1.0

    @field_validator("beta")
    @classmethod
    def _beta_pos(cls, b):
        if b is not None and b <= 0:
            raise ValueError("params.beta must be positive")
        return b

    @field_validator("lambda1")
    @classmethod
    def _l1(cls, x):
        if x < 0:
            raise ValueError("params.lambda1 must be nonnegative")
        return x

    @field_validator("lambda2")
    @classmethod
    def _l2(cls, x):
        if x is not None and x <= 0:
            raise ValueError("params.lambda2 must be positive")
        return x

    @field_validator("gamma")
    @classmethod
    def _gamma(cls, x):
        if x <= 0:
            raise ValueError("params.gamma must be positive")
        return x


class GridConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    nx: int = 257
    ny: int = 257
    hx: float = 0.02
    hy: float = 0.02
    x0: Optional[float] = None   # None -> centered on the origin
    y0: Optional[float] = None

    @field_validator("nx", "ny")
    @classmethod
    def _n(cls, n):
        if n < 3:
            raise ValueError("grid needs at least 3 nodes per axis")
        return n

    @field_validator("hx", "hy")
    @classmethod
    def _h(cls, h):
        if h <= 0:
            raise ValueError("grid spacings must be positive")
        return h


class SolverConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = 1
    f0: float = 1.0
    rmax: float = 3.0
    tol: float = 1e-9
    iters: int = 30
    h2: Union[str, dict] = "const"
    init: str = "antiholo"

    @field_validator("n")
    @classmethod
    def _n_winding(cls, n):
        if n == 0:
            raise ValueError("solver.n (winding) must be nonzero")
        return n

    @field_validator("f0", "rmax", "tol")
    @classmethod
    def _pos(cls, x):
        if x <= 0:
            raise ValueError("solver.f0, solver.rmax and solver.tol must be positive")
        return x


class ToleranceConfig(BaseModel):
    """Only tolerances that are actually set are enforced (exit code 2)."""

    model_config = ConfigDict(extra="forbid")

    bogomolny_linf: Optional[float] = None
    el_linf: Optional[float] = None
    charge_abs: Optional[float] = None
    saturation_rel: Optional[float] = None
    equipartition: Optional[float] = None
    r2_linf: Optional[float] = None
    r3_linf: Optional[float] = None
    subset: Optional[float] = None

    def enforced(self) -> dict:
        return {k: v for k, v in self.model_dump().items() if v is not None}


class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    prefix: Optional[str] = None


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    model: Literal["restricted", "full"] = "restricted"
    potential: PotentialConfig = PotentialConfig()
    params: ParamsConfig = ParamsConfig(beta=1.0)
    grid: GridConfig = GridConfig()
    solver: SolverConfig = SolverConfig()
    output: OutputConfig = OutputConfig()
    tolerances: ToleranceConfig = ToleranceConfig()


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise InputError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"config file is not valid JSON: {exc}") from exc
    return validate_config(doc)


def validate_config(doc: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(doc)
    except ValidationError as exc:
        lines = []
        for err in exc.errors():
            path = ".".join(str(p) for p in err["loc"])
            lines.append(f"{path}: {err['msg']}")
        raise InputError("invalid config: " + "; ".join(lines)) from exc


def set_by_path(doc: dict, dotted: str, value) -> None:
    """Set a dotted key like 'solver.f0' in a plain config dict."""
    keys = dotted.split(".")
    node = doc
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise InputError(f"cannot descend into {dotted!r}")
    node[keys[-1]] = value
