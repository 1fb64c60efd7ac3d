"""Independent verification operators.

Everything here is evaluated nodewise from the field and the potential,
with no knowledge of how the field was produced: second-order Euler-
Lagrange residuals for both models, the six dual-equation residuals of
the restricted model, divergence-part identities, Simpson quadrature of
the energy split and of the topological charge, and the saturation /
equipartition diagnostics.

Sign conventions.  One global orientation is fixed throughout: the degree
(topological charge) is computed as

    Q = -(1/pi) integral J / (1+u^2+v^2)^2 dx dy,   J = u_x v_y - u_y v_x

so the anti-holomorphic one-soliton omega = x - iy carries Q = +1, and the
default branch sigma = -1 of the first-order equation produces positive-
charge hedgehogs for n > 0.  charge_density_sform evaluates the S-vector
form of the same density for cross-validation.

Energies (half the integral of the density):

    restricted: E = 1/2 int [ 16 beta J^2/T^4 + V ]
    full:       E = 1/2 int [ (lambda1/2)(|grad u|^2+|grad v|^2)/T^2
                              + lambda2 J^2/T^4 + V ],   T = 1+u^2+v^2

reported in three parts (quadratic / quartic / potential) whose sum is the
total by construction.  The saturation cross term is

    CT = 4 sqrt(beta) int sqrt(V) |J| / T^2

which equals E exactly on solutions of the first-order equation, where
also the pointwise equipartition 16 beta J^2/T^4 = V holds.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .errors import InputError
from .fields import (ComplexField2D, Grid2D, ScalarField2D, UnitVectorField,
                     d2dx2, d2dy2, ddx, ddy, interior_mask, linf)
from .potentials import ModelParams, PotentialSpec, _check_nonneg, sqrt_nonneg

BOUNDARY_DECAY_TOL = 1e-8


# ---------------------------------------------------------------------------
# quadrature

def axis_weights(n: int, h: float) -> np.ndarray:
    """Composite Simpson weights for odd n, trapezoid fallback for even n."""
    w = np.ones(n)
    if n % 2 == 1:
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        return w * (h / 3.0)
    w[0] = w[-1] = 0.5
    return w * h


def integrate2d(values: np.ndarray, grid: Grid2D) -> float:
    wx = axis_weights(grid.nx, grid.hx)
    wy = axis_weights(grid.ny, grid.hy)
    return float(np.sum(values * np.outer(wy, wx)))


# ---------------------------------------------------------------------------
# Euler-Lagrange residuals

def _second_derivs(a: np.ndarray, grid: Grid2D):
    ax = ddx(a, grid.hx)
    return ax, ddy(a, grid.hy), d2dx2(a, grid.hx), d2dy2(a, grid.hy), ddy(ax, grid.hy)


def el_residual_restricted(w: ComplexField2D, V: PotentialSpec, params: ModelParams) -> ScalarField2D:
    """Modulus of the complex second-order Euler-Lagrange residual of the
    restricted model,

        16 b W^2 w*/(1+ww*)^5
        - 8 b [w_xx (w*_y)^2 + w_yy (w*_x)^2 + (w_x w*_y + w_y w*_x) w*_xy]/(1+ww*)^4
        + 8 b [2 w_xy w*_x w*_y + w_x w*_x w*_yy + w_y w*_y w*_xx]/(1+ww*)^4
        - V_w

    with W = w_x w*_y - w_y w*_x and the Wirtinger derivative
    V_w = (V_u - i V_v)/2.  Finite differences throughout; meaningful on
    interior nodes (second derivatives).
    """
    beta = params.beta
    grid = w.grid
    wc = w.w
    wx, wy, wxx, wyy, wxy = _second_derivs(wc, grid)
    wbx, wby = np.conj(wx), np.conj(wy)
    wbxx, wbyy, wbxy = np.conj(wxx), np.conj(wyy), np.conj(wxy)
    wb = np.conj(wc)
    T = 1.0 + (wc * wb).real
    W = wx * wby - wy * wbx
    Vu, Vv = V.grad(w.u.values, w.v.values)
    Vw = 0.5 * (np.asarray(Vu) - 1j * np.asarray(Vv))
    resid = (16.0 * beta * W**2 * wb / T**5
             - 8.0 * beta * (wxx * wby**2 + wyy * wbx**2 + (wx * wby + wy * wbx) * wbxy) / T**4
             + 8.0 * beta * (2.0 * wxy * wbx * wby + wx * wbx * wbyy + wy * wby * wbxx) / T**4
             - Vw)
    return ScalarField2D(grid, np.abs(resid))


def el_residual_full(w: ComplexField2D, V: PotentialSpec, params: ModelParams):
    """The two real second-order Euler-Lagrange residuals of the full model
    (variation in u, and the corresponding equation from variation in v):

        lam1 (u_xx+u_yy)/T^2
        - 2 lam1 [u(u_x^2+u_y^2-v_x^2-v_y^2) + 2v(u_x v_x + u_y v_y)]/T^3
        + 2 lam2 (J_x v_y - J_y v_x)/T^4 - 8 lam2 J^2 u/T^5 - V_u

    and the u<->v mirror with J -> -J.
    """
    lam1, lam2 = params.lambda1, params.lambda2
    grid = w.grid
    u = w.u.values
    v = w.v.values
    ux, uy, uxx, uyy, uxy = _second_derivs(u, grid)
    vx, vy, vxx, vyy, vxy = _second_derivs(v, grid)
    T = 1.0 + u * u + v * v
    J = ux * vy - uy * vx
    Jx = uxx * vy + ux * vxy - uxy * vx - uy * vxx
    Jy = uxy * vy + ux * vyy - uyy * vx - uy * vxy
    gu2 = ux * ux + uy * uy
    gv2 = vx * vx + vy * vy
    cross = ux * vx + uy * vy
    Vu, Vv = V.grad(u, v)
    ru = (lam1 * (uxx + uyy) / T**2
          - 2.0 * lam1 * (u * (gu2 - gv2) + 2.0 * v * cross) / T**3
          + 2.0 * lam2 * (Jx * vy - Jy * vx) / T**4
          - 8.0 * lam2 * J**2 * u / T**5
          - np.asarray(Vu))
    rv = (lam1 * (vxx + vyy) / T**2
          - 2.0 * lam1 * (v * (gv2 - gu2) + 2.0 * u * cross) / T**3
          + 2.0 * lam2 * (Jy * ux - Jx * uy) / T**4
          - 8.0 * lam2 * J**2 * v / T**5
          - np.asarray(Vv))
    return ScalarField2D(grid, ru), ScalarField2D(grid, rv)


# ---------------------------------------------------------------------------
# dual equations of the restricted model

@dataclass
class DualResiduals:
    """Moduli of the six first-order dual-equation residuals, plus the two
    divergence-part combinations (which coincide when the gauge constants
    are zero, and vanish on solutions)."""

    residuals: list
    divergence_parts: list


def dual_residuals_restricted(w: ComplexField2D, V: PotentialSpec, params: ModelParams,
                              sigma: float, derivatives: str = "fd") -> DualResiduals:
    """Evaluate the six dual equations with the gauge choice tied to the
    potential, G1 = -4 i sigma sqrt(beta V)/(1+ww*)^2, and the remaining
    gauge functions constant (their derivative terms drop out).

    The two variational equations (d/dw and d/dw*) read

        16 b W^2 w*/T^5 + V_w  + G1_w  W = 0
        16 b W^2 w   /T^5 + V_w* + G1_w* W = 0

    and the four derivative equations collapse to K times a first
    derivative of w or w*, with K = 8 b W/T^4 - G1.  On solutions of the
    first-order equation all six vanish.  The divergence parts
    -8 b W^2/T^4 + G1 W are returned separately (real-valued).
    """
    beta = params.beta
    u = w.u.values
    v = w.v.values
    wc = u + 1j * v
    wb = np.conj(wc)
    T = 1.0 + u * u + v * v
    wx, wy = w.derivative_arrays(derivatives)
    wbx, wby = np.conj(wx), np.conj(wy)
    W = wx * wby - wy * wbx

    Vval = np.asarray(V.eval(u, v), dtype=float)
    _check_nonneg(Vval, where=f"dual_residuals_restricted({V.name})")
    sqV = sqrt_nonneg(Vval)
    Vu, Vv = V.grad(u, v)
    Vw = 0.5 * (np.asarray(Vu) - 1j * np.asarray(Vv))
    Vwb = 0.5 * (np.asarray(Vu) + 1j * np.asarray(Vv))

    sb = np.sqrt(beta)
    G1 = -4j * sigma * sb * sqV / T**2
    # d(sqrt V) terms are guarded: where V has a vacuum, V_w vanishes too
    tiny = np.finfo(float).tiny
    dsq_w = Vw / np.maximum(2.0 * sqV, tiny)
    dsq_wb = Vwb / np.maximum(2.0 * sqV, tiny)
    G1w = -4j * sigma * sb * (dsq_w / T**2 - 2.0 * sqV * wb / T**3)
    G1wb = -4j * sigma * sb * (dsq_wb / T**2 - 2.0 * sqV * wc / T**3)

    r_w = 16.0 * beta * W**2 * wb / T**5 + Vw + G1w * W
    r_wb = 16.0 * beta * W**2 * wc / T**5 + Vwb + G1wb * W
    K = 8.0 * beta * W / T**4 - G1
    r_wx = -K * wby          # d/dw_x equation
    r_wy = K * wbx           # d/dw_y
    r_wbx = K * wy           # d/dw*_x
    r_wby = -K * wx          # d/dw*_y

    grid = w.grid
    residuals = [ScalarField2D(grid, np.abs(a)) for a in (r_w, r_wb, r_wx, r_wy, r_wbx, r_wby)]
    div_part = np.real(-8.0 * beta * W**2 / T**4 + G1 * W)
    divergence_parts = [ScalarField2D(grid, div_part.copy()), ScalarField2D(grid, div_part.copy())]
    return DualResiduals(residuals=residuals, divergence_parts=divergence_parts)


# ---------------------------------------------------------------------------
# energies, charge, saturation

@dataclass
class EnergyBreakdown:
    total: float
    quartic: float
    o3: float
    potential: float
    boundary_warning: bool
    boundary_density_ratio: float


def _boundary_density_check(density: np.ndarray) -> tuple[bool, float]:
    peak = float(np.max(density))
    if peak <= 0.0:
        return False, 0.0
    edge = float(max(np.max(density[0, :]), np.max(density[-1, :]),
                     np.max(density[:, 0]), np.max(density[:, -1])))
    ratio = edge / peak
    return ratio > BOUNDARY_DECAY_TOL, ratio


def _energy(w: ComplexField2D, V: PotentialSpec, params: ModelParams,
            derivatives: str, include_o3: bool) -> EnergyBreakdown:
    u = w.u.values
    v = w.v.values
    grid = w.grid
    wx, wy = w.derivative_arrays(derivatives)
    ux, vx = wx.real, wx.imag
    uy, vy = wy.real, wy.imag
    J = ux * vy - uy * vx
    T = 1.0 + u * u + v * v
    Vval = np.asarray(V.eval(u, v), dtype=float)
    quartic_density = params.lambda2 * J**2 / T**4
    o3_density = (0.5 * params.lambda1 * (ux**2 + uy**2 + vx**2 + vy**2) / T**2
                  if include_o3 else np.zeros_like(J))
    density = quartic_density + o3_density + Vval
    warn, ratio = _boundary_density_check(density)
    quartic = 0.5 * integrate2d(quartic_density, grid)
    o3 = 0.5 * integrate2d(o3_density, grid) if include_o3 else 0.0
    potential = 0.5 * integrate2d(Vval, grid)
    return EnergyBreakdown(total=quartic + o3 + potential, quartic=quartic, o3=o3,
                           potential=potential, boundary_warning=warn,
                           boundary_density_ratio=ratio)


def energy_restricted(w: ComplexField2D, V: PotentialSpec, params: ModelParams,
                      derivatives: str = "fd") -> EnergyBreakdown:
    """E = 1/2 int [16 beta J^2/T^4 + V]; lambda2 = 16 beta."""
    return _energy(w, V, params, derivatives, include_o3=False)


def energy_full(w: ComplexField2D, V: PotentialSpec, params: ModelParams,
                derivatives: str = "fd") -> EnergyBreakdown:
    return _energy(w, V, params, derivatives, include_o3=True)


def charge_density(w: ComplexField2D, derivatives: str = "auto") -> ScalarField2D:
    """q = -J/(pi (1+u^2+v^2)^2); integrates to the degree of the map."""
    u = w.u.values
    v = w.v.values
    wx, wy = w.derivative_arrays(derivatives)
    J = wx.real * wy.imag - wy.real * wx.imag
    T = 1.0 + u * u + v * v
    return ScalarField2D(w.grid, -J / (np.pi * T**2))


def charge_density_sform(s: UnitVectorField) -> ScalarField2D:
    """The same density from the S-vector form, -(1/4 pi) S.(d_x S x d_y S),
    with finite-difference derivatives; used to validate the J-form once."""
    grid = s.grid
    comps = [s.s1.values, s.s2.values, s.s3.values]
    dx = [ddx(c, grid.hx) for c in comps]
    dy = [ddy(c, grid.hy) for c in comps]
    triple = (comps[0] * (dx[1] * dy[2] - dx[2] * dy[1])
              + comps[1] * (dx[2] * dy[0] - dx[0] * dy[2])
              + comps[2] * (dx[0] * dy[1] - dx[1] * dy[0]))
    return ScalarField2D(grid, -triple / (4.0 * np.pi))


def topological_charge(w: ComplexField2D, derivatives: str = "auto") -> float:
    """Degree Q of the map, fixed so that omega = x - iy gives Q = +1.

    Quadrature truncation shows up in the boundary-density diagnostic of the
    verification report, not as an error here.
    """
    return integrate2d(charge_density(w, derivatives).values, w.grid)


@dataclass
class SaturationReport:
    energy: float
    crossterm: float
    gap: float                    # E - CT, nonnegative up to quadrature error
    equipartition_defect: float   # max |16 beta J^2/T^4 - V| over measured nodes
    boundary_warning: bool


def saturation_check(w: ComplexField2D, V: PotentialSpec, params: ModelParams,
                     sigma: float = -1.0, derivatives: str = "fd",
                     exclude: np.ndarray | None = None) -> SaturationReport:
    """Energy against the cross term CT = 4 sqrt(beta) int sqrt(V)|J|/T^2 and
    the pointwise equipartition defect.  On solutions of the first-order
    equation E = CT and the defect vanishes; sigma only labels the branch in
    the report (the cross term uses |J|)."""
    u = w.u.values
    v = w.v.values
    grid = w.grid
    Vval = np.asarray(V.eval(u, v), dtype=float)
    _check_nonneg(Vval, where=f"saturation_check({V.name})")
    wx, wy = w.derivative_arrays(derivatives)
    J = wx.real * wy.imag - wy.real * wx.imag
    T = 1.0 + u * u + v * v
    beta = params.beta
    e = energy_restricted(w, V, params, derivatives)
    ct = 4.0 * np.sqrt(beta) * integrate2d(sqrt_nonneg(Vval) * np.abs(J) / T**2, grid)
    defect_field = np.abs(16.0 * beta * J**2 / T**4 - Vval)
    mask = interior_mask(grid)
    if exclude is not None:
        mask = mask & ~exclude
    return SaturationReport(energy=e.total, crossterm=ct, gap=e.total - ct,
                            equipartition_defect=linf(defect_field, mask),
                            boundary_warning=e.boundary_warning)


# ---------------------------------------------------------------------------
# report assembly

@dataclass
class VerificationReport:
    el_residual_norm: float
    dual_residual_norms: list
    energy: float
    energy_quartic: float
    energy_o3: float
    energy_potential: float
    charge: float
    crossterm: float
    equipartition_defect: float
    grid_spacing: float
    model: str
    bogomolny_residual_norm: Optional[float] = None
    r2_norm: Optional[float] = None
    r3_norm: Optional[float] = None
    boundary_warning: bool = False
    collar_stats: dict = dc_field(default_factory=dict)
    extras: dict = dc_field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "model": self.model,
            "el_residual_norm": self.el_residual_norm,
            "dual_residual_norms": list(self.dual_residual_norms),
            "energy": self.energy,
            "energy_quartic": self.energy_quartic,
            "energy_o3": self.energy_o3,
            "energy_potential": self.energy_potential,
            "charge": self.charge,
            "crossterm": self.crossterm,
            "equipartition_defect": self.equipartition_defect,
            "grid_spacing": self.grid_spacing,
            "boundary_warning": self.boundary_warning,
        }
        if self.bogomolny_residual_norm is not None:
            out["bogomolny_residual_norm"] = self.bogomolny_residual_norm
        if self.r2_norm is not None:
            out["r2_norm"] = self.r2_norm
            out["r3_norm"] = self.r3_norm
        if self.collar_stats:
            out["collar_stats"] = self.collar_stats
        out.update(self.extras)
        return out


def detect_support_collar(w: ComplexField2D, collar_nodes: int = 3) -> np.ndarray | None:
    """Morphological edge-collar detection for compactly supported fields:
    the band of nodes within collar_nodes of the support boundary, where
    finite differences straddle the derivative kink.  None when the field
    has no interior support boundary."""
    from scipy.ndimage import binary_dilation
    support = np.abs(w.w) > 1e-13
    if support.all() or not support.any():
        return None
    collar = binary_dilation(support, iterations=collar_nodes) \
        & binary_dilation(~support, iterations=collar_nodes)
    return collar


def disk_exclusion(grid: Grid2D, cx: float, cy: float, radius: float) -> np.ndarray:
    X, Y = grid.mesh()
    return np.hypot(X - cx, Y - cy) < radius


def _collar_stats(values: np.ndarray, collar: np.ndarray | None, core: np.ndarray | None) -> dict:
    stats = {}
    if collar is not None and np.any(collar):
        stats["collar_max"] = linf(values, collar)
        stats["collar_nodes"] = int(np.count_nonzero(collar))
    if core is not None and np.any(core):
        stats["core_max"] = linf(values, core)
        stats["core_nodes"] = int(np.count_nonzero(core))
    return stats


def verification_report(w: ComplexField2D, V: PotentialSpec, params: ModelParams,
                        model: str = "restricted", sigma: float = -1.0,
                        harmonic=None, gauge=None, derivatives: str = "fd",
                        exclude: np.ndarray | None = None,
                        collar: np.ndarray | None = None,
                        core: np.ndarray | None = None) -> VerificationReport:
    """One-stop report: residual norms are interior L-inf over the measured
    region (interior minus the exclusion mask); collar/core maxima, when
    masks are supplied, are reported separately rather than dropped."""
    if model not in ("restricted", "full"):
        raise InputError(f"model must be 'restricted' or 'full', got {model!r}")
    from .restricted import residual_bogomolny_restricted

    grid = w.grid
    measured = interior_mask(grid, depth=2)
    if exclude is not None:
        measured = measured & ~exclude

    if model == "restricted":
        el = el_residual_restricted(w, V, params)
        el_norm = linf(el.values, measured)
        duals = dual_residuals_restricted(w, V, params, sigma, derivatives)
        dual_norms = [linf(d.values, measured) for d in duals.residuals]
        e = energy_restricted(w, V, params, derivatives)
        bog = residual_bogomolny_restricted(w, V, params, sigma, derivatives)
        bog_norm = linf(bog.values, measured)
        r2_norm = r3_norm = None
        collar_stats = _collar_stats(bog.values, collar, core)
    else:
        eu, ev = el_residual_full(w, V, params)
        el_norm = max(linf(eu.values, measured), linf(ev.values, measured))
        dual_norms = []
        e = energy_full(w, V, params, derivatives)
        if harmonic is None or gauge is None:
            raise InputError("full-model report needs both the harmonic function and the gauge")
        from .fullmodel import residual_full_system
        r1, r2, r3 = residual_full_system(w, gauge, harmonic, params, derivatives)
        r2_norm = linf(r2.values, measured)
        r3_norm = linf(r3.values, measured)
        bog_norm = linf(r1.values, measured)
        collar_stats = _collar_stats(r1.values, collar, core)

    sat = saturation_check(w, V, params, sigma, derivatives, exclude)
    q = topological_charge(w, derivatives)
    return VerificationReport(
        el_residual_norm=el_norm,
        dual_residual_norms=dual_norms,
        energy=e.total,
        energy_quartic=e.quartic,
        energy_o3=e.o3,
        energy_potential=e.potential,
        charge=q,
        crossterm=sat.crossterm,
        equipartition_defect=sat.equipartition_defect,
        grid_spacing=grid.h_max,
        model=model,
        bogomolny_residual_norm=bog_norm,
        r2_norm=r2_norm,
        r3_norm=r3_norm,
        boundary_warning=e.boundary_warning,
        collar_stats=collar_stats,
    )
