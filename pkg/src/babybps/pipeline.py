"""Pipeline orchestration shared by the service endpoints and the CLI.

Each run produces a payload of artifact texts (CSV/JSON) plus a report
dict, a pass/fail verdict against the *configured* tolerances, and a
one-line summary.  Artifact text is formatted once, here, so identical
configurations reproduce identical bytes regardless of transport or
thread count.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import fieldio
from .config import RunConfig, set_by_path, validate_config
from .errors import InputError
from .fields import ComplexField2D, Grid2D
from .fullmodel import (HarmonicFunction, check_harmonic, constructed_potential_values,
                        solve_full_bps, subset_check)
from .potentials import ModelParams, PotentialSpec, builtin_potential, gauge_from_potential
from .restricted import hedgehog_exclusions, profile_to_field, solve_profile
from .verify import (energy_full, energy_restricted, topological_charge,
                     verification_report)


@dataclass
class RunPayload:
    artifacts: dict = dc_field(default_factory=dict)   # suffix -> text
    report: dict = dc_field(default_factory=dict)
    passed: bool = True
    failures: list = dc_field(default_factory=list)
    summary: str = ""


def _params_from_config(cfg: RunConfig) -> ModelParams:
    p = cfg.params
    return ModelParams(beta=p.beta, lambda1=p.lambda1, lambda2=p.lambda2, gamma=p.gamma)


def _grid_from_config(cfg: RunConfig) -> Grid2D:
    g = cfg.grid
    x0 = g.x0 if g.x0 is not None else -0.5 * (g.nx - 1) * g.hx
    y0 = g.y0 if g.y0 is not None else -0.5 * (g.ny - 1) * g.hy
    return Grid2D(g.nx, g.ny, g.hx, g.hy, x0, y0)


def _potential_from_config(cfg: RunConfig) -> PotentialSpec:
    return builtin_potential(cfg.potential.name, cfg.potential.params)


def parse_h2(spec) -> HarmonicFunction:
    """Harmonic-candidate mini-language for --h2 / solver.h2:

        const[:c]          constant
        linear:cu,cv       cu*u + cv*v
        poly:a0,a1,..[|b0,b1,..]   sum a_k Re((u+iv)^k) + b_k Im((u+iv)^k)
        monomial:p,q       u^p v^q  (generally NOT harmonic; gatekeeping test input)
    """
    if isinstance(spec, HarmonicFunction):
        return spec
    if isinstance(spec, dict):
        kind = spec.get("kind")
        if kind == "const":
            return HarmonicFunction.constant(float(spec.get("c", 0.0)))
        if kind == "linear":
            return HarmonicFunction.linear(float(spec.get("cu", 0.0)), float(spec.get("cv", 0.0)))
        if kind == "poly":
            return HarmonicFunction.polynomial(spec.get("re", ()), spec.get("im", ()))
        if kind == "monomial":
            return _monomial(int(spec.get("p", 0)), int(spec.get("q", 0)))
        raise InputError(f"unknown h2 kind {kind!r}")
    if not isinstance(spec, str):
        raise InputError(f"cannot parse h2 spec {spec!r}")
    name, _, rest = spec.partition(":")
    if name == "const":
        return HarmonicFunction.constant(float(rest) if rest else 0.0)
    if name == "linear":
        cu, cv = (float(t) for t in rest.split(","))
        return HarmonicFunction.linear(cu, cv)
    if name == "poly":
        re_part, _, im_part = rest.partition("|")
        re_coeffs = [float(t) for t in re_part.split(",") if t.strip()] if re_part else []
        im_coeffs = [float(t) for t in im_part.split(",") if t.strip()] if im_part else []
        return HarmonicFunction.polynomial(re_coeffs, im_coeffs)
    if name == "monomial":
        p, q = (int(t) for t in rest.split(","))
        return _monomial(p, q)
    raise InputError(f"unknown h2 spec {spec!r}; use const[:c], linear:cu,cv, "
                     f"poly:a0,a1,..|b0,b1,.., or monomial:p,q")


def _monomial(p: int, q: int) -> HarmonicFunction:
    def val(u, v):
        return np.asarray(u, dtype=float) ** p * np.asarray(v, dtype=float) ** q
    def du(u, v):
        u = np.asarray(u, dtype=float)
        return (p * u ** (p - 1) if p else np.zeros_like(u)) * np.asarray(v, dtype=float) ** q
    def dv(u, v):
        v = np.asarray(v, dtype=float)
        return np.asarray(u, dtype=float) ** p * (q * v ** (q - 1) if q else np.zeros_like(v))
    def duu(u, v):
        u = np.asarray(u, dtype=float)
        return (p * (p - 1) * u ** (p - 2) if p >= 2 else np.zeros_like(u)) * np.asarray(v, dtype=float) ** q
    def duv(u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        fu = p * u ** (p - 1) if p else np.zeros_like(u)
        fv = q * v ** (q - 1) if q else np.zeros_like(v)
        return fu * fv
    def dvv(u, v):
        v = np.asarray(v, dtype=float)
        return np.asarray(u, dtype=float) ** p * (q * (q - 1) * v ** (q - 2) if q >= 2 else np.zeros_like(v))
    return HarmonicFunction(val, du, dv, d2=(duu, duv, dvv), name=f"u^{p} v^{q}")


def parse_init(spec: str, grid: Grid2D) -> ComplexField2D:
    """Initial field mini-language: 'antiholo[:a]' for omega = a (x - iy),
    'csv:<path>' or a bare *.csv path to load a field file."""
    name, _, rest = spec.partition(":")
    if name == "antiholo":
        a = float(rest) if rest else 1.0
        X, Y = grid.mesh()
        return ComplexField2D.from_arrays(grid, a * X, -a * Y)
    path = rest if name == "csv" else (spec if spec.endswith(".csv") else None)
    if path is not None:
        try:
            return fieldio.read_field_csv(path)
        except FileNotFoundError as exc:
            raise InputError(f"init field file not found: {path}") from exc
    raise InputError(f"unknown init spec {spec!r}; use antiholo[:a], csv:<path>, or a .csv path")


def report_json_text(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _apply_tolerances(report: dict, enforced: dict) -> list:
    failures = []

    def check(key, value, tol, label=None):
        if value is None:
            failures.append(f"{label or key}: not available in this run")
        elif not (value <= tol):
            failures.append(f"{label or key}: {value:.6e} exceeds {tol:.6e}")

    for key, tol in enforced.items():
        if key == "bogomolny_linf":
            check(key, report.get("bogomolny_residual_norm"), tol)
        elif key == "el_linf":
            check(key, report.get("el_residual_norm"), tol)
        elif key == "charge_abs":
            q = report.get("charge")
            target = report.get("charge_target")
            if target is None:
                target = round(q) if q is not None else None
            check(key, abs(q - target) if q is not None and target is not None else None, tol,
                  label=f"|charge - {target}|")
        elif key == "saturation_rel":
            e, ct = report.get("energy"), report.get("crossterm")
            rel = abs(e - ct) / abs(e) if e else None
            check(key, rel, tol, label="|E - CT|/E")
        elif key == "equipartition":
            check(key, report.get("equipartition_defect"), tol)
        elif key == "r2_linf":
            check(key, report.get("r2_norm"), tol)
        elif key == "r3_linf":
            check(key, report.get("r3_norm"), tol)
        elif key == "subset":
            sub = report.get("subset_margin")
            check(key, sub, tol, label="subset margin")
    return failures


def _summary(report: dict, passed: bool) -> str:
    bits = []
    for key, label in (("energy", "E"), ("charge", "Q"), ("crossterm", "CT"),
                       ("bogomolny_residual_norm", "|R|"), ("r2_norm", "|R2|"),
                       ("r3_norm", "|R3|"), ("el_residual_norm", "|EL|")):
        val = report.get(key)
        if val is not None:
            bits.append(f"{label}={val:.6g}")
    bits.append("PASS" if passed else "FAIL")
    return " ".join(bits)


def run_restricted(cfg: RunConfig) -> RunPayload:
    """solve -> lift -> verify -> artifacts for the restricted model."""
    if cfg.model != "restricted":
        raise InputError("run_restricted needs model == 'restricted'")
    params = _params_from_config(cfg)
    grid = _grid_from_config(cfg)
    V = _potential_from_config(cfg)
    sv = cfg.solver
    sigma = float(cfg.potential.sigma)

    profile = solve_profile(V, params, sv.n, sigma, sv.f0, sv.rmax, tol=sv.tol)
    field = profile_to_field(profile, grid)
    excl = hedgehog_exclusions(profile, grid)
    rep = verification_report(field, V, params, model="restricted", sigma=sigma,
                              derivatives="auto", exclude=excl.collar | excl.core,
                              collar=excl.collar, core=excl.core)
    report = rep.to_dict()
    report["charge_target"] = sv.n   # exact degree is n f0^2/(1+f0^2) for a compacton
    report["winding"] = sv.n
    report["sigma"] = sigma
    report["edge_radius"] = profile.r_star
    report["core_exclusion_radius"] = excl.core_radius
    report["derivative_mode"] = "stored"

    failures = _apply_tolerances(report, cfg.tolerances.enforced())
    passed = not failures
    payload = RunPayload(report=report, passed=passed, failures=failures,
                         summary=_summary(report, passed))
    payload.artifacts["profile.csv"] = fieldio.table_csv_text(
        ["r", "f"], [[float(r), float(f)] for r, f in zip(profile.r, profile.f)])
    payload.artifacts["field.csv"] = fieldio.field_csv_text(field)
    payload.artifacts["report.json"] = report_json_text(report)
    return payload


def run_full(cfg: RunConfig) -> RunPayload:
    """solve the full first-order system -> induced gauge -> constructed
    potential -> verify -> artifacts."""
    if cfg.model != "full":
        raise InputError("run_full needs model == 'full'")
    params = _params_from_config(cfg)
    if params.lambda1 <= 0:
        raise InputError("full model requires params.lambda1 > 0")
    grid = _grid_from_config(cfg)
    h2 = parse_h2(cfg.solver.h2)
    initial = parse_init(cfg.solver.init, grid)
    ig = initial.grid
    if (ig.nx, ig.ny) != (grid.nx, grid.ny) or \
            abs(ig.hx - grid.hx) > 1e-12 * grid.hx or abs(ig.hy - grid.hy) > 1e-12 * grid.hy:
        raise InputError("init field grid does not match the configured grid")

    sol = solve_full_bps(h2, params, initial, iters=cfg.solver.iters, tol=cfg.solver.tol)
    sub = subset_check(sol, params)
    rep = verification_report(sol.w, sol.potential, params, model="full",
                              harmonic=h2, gauge=sol.gauge_values, derivatives="fd")
    report = rep.to_dict()
    report["converged"] = sol.converged
    report["iterations"] = sol.iterations
    report["gauge_fit_defect"] = sol.residual_norms[2]
    report["fallback_used"] = sol.fallback_used
    report["subset_restricted_norm"] = sub.restricted_norm
    report["subset_r1_norm"] = sub.full_r1_norm
    report["subset_margin"] = max(0.0, sub.restricted_norm - sub.full_r1_norm)
    report["subset_passed"] = sub.passed
    report["laplace_residual"] = h2.laplace_residual

    failures = _apply_tolerances(report, cfg.tolerances.enforced())
    if not sol.converged:
        failures.append(f"solver did not converge in {cfg.solver.iters} iterations "
                        f"(best R2={sol.residual_norms[0]:.3e}, R3={sol.residual_norms[1]:.3e})")
    passed = not failures
    payload = RunPayload(report=report, passed=passed, failures=failures,
                         summary=_summary(report, passed))

    X, Y = grid.mesh()
    u, v = sol.w.u.values, sol.w.v.values
    g = sol.gauge_values.values
    Vc = constructed_potential_values(sol).values
    payload.artifacts["field.csv"] = fieldio.field_csv_text(sol.w)
    payload.artifacts["g1.csv"] = fieldio.table_csv_text(
        ["x", "y", "g1"],
        [[float(a), float(b), float(c)] for a, b, c in zip(X.ravel(), Y.ravel(), g.ravel())])
    payload.artifacts["potential.csv"] = fieldio.table_csv_text(
        ["u", "v", "V"],
        [[float(a), float(b), float(c)] for a, b, c in zip(u.ravel(), v.ravel(), Vc.ravel())])
    payload.artifacts["report.json"] = report_json_text(report)
    return payload


def run_verify(model: str, field: ComplexField2D, potential: PotentialSpec,
               params: ModelParams, sigma: float = -1.0, h2: HarmonicFunction | None = None,
               tolerances: dict | None = None, exclude_disk=None) -> RunPayload:
    """Verification of an existing field against a potential (CLI `verify`).

    A compact-support edge collar is detected morphologically and excluded
    from the reported norms (its own maximum is reported instead); an
    explicit (cx, cy, radius) disk can be excluded on top, for fields with a
    phase-singular center the file format cannot flag.
    """
    from .verify import detect_support_collar, disk_exclusion

    collar = detect_support_collar(field)
    core = disk_exclusion(field.grid, *exclude_disk) if exclude_disk else None
    exclude = None
    for mask in (collar, core):
        if mask is not None:
            exclude = mask if exclude is None else (exclude | mask)
    if model == "full":
        if h2 is None:
            raise InputError("full-model verification needs --h2")
        resid = check_harmonic(h2)
        if resid > 1e-8:
            raise InputError(f"h2 is not harmonic: Laplace residual {resid:.6e}")
        gauge = gauge_from_potential(potential, params, sigma)
        rep = verification_report(field, potential, params, model="full",
                                  harmonic=h2, gauge=gauge, derivatives="auto",
                                  exclude=exclude, collar=collar, core=core)
    else:
        rep = verification_report(field, potential, params, model="restricted",
                                  sigma=sigma, derivatives="auto",
                                  exclude=exclude, collar=collar, core=core)
    report = rep.to_dict()
    failures = _apply_tolerances(report, tolerances or {})
    passed = not failures
    payload = RunPayload(report=report, passed=passed, failures=failures,
                         summary=_summary(report, passed))
    payload.artifacts["report.json"] = report_json_text(report)
    return payload


def run_charge(field: ComplexField2D) -> float:
    return topological_charge(field, derivatives="auto")


def run_energy(model: str, field: ComplexField2D, potential: PotentialSpec,
               params: ModelParams) -> dict:
    e = (energy_restricted if model == "restricted" else energy_full)(field, potential, params, "auto")
    return {"energy": e.total, "energy_quartic": e.quartic, "energy_o3": e.o3,
            "energy_potential": e.potential, "boundary_warning": e.boundary_warning}


SWEEP_HEADER = ["param", "value", "energy", "charge", "crossterm", "residual_norm", "status"]


def run_sweep(base_config: dict, param: str, values: list, threads: int = 1) -> tuple[list, str]:
    """Run the configured pipeline once per parameter value.

    Rows are ordered by parameter value regardless of execution order, and
    individual failures become status entries instead of aborting the sweep.
    """
    order = np.argsort(np.asarray(values, dtype=float), kind="stable")

    def one(value):
        doc = json.loads(json.dumps(base_config))
        set_by_path(doc, param, value)
        try:
            cfg = validate_config(doc)
            payload = run_restricted(cfg) if cfg.model == "restricted" else run_full(cfg)
            rep = payload.report
            resid = rep.get("bogomolny_residual_norm")
            if resid is None:
                resid = max(rep.get("r2_norm") or 0.0, rep.get("r3_norm") or 0.0)
            return [param, float(value), rep["energy"], rep["charge"], rep["crossterm"],
                    float(resid), "ok" if payload.passed else "tolerance_failure"]
        except Exception as exc:  # failures are data, the sweep continues
            return [param, float(value), "", "", "", "", f"error:{exc}"]

    if threads > 1 and len(values) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, values))
    else:
        rows = [one(v) for v in values]
    rows = [rows[i] for i in order]
    return rows, fieldio.table_csv_text(SWEEP_HEADER, rows)
