"""Restricted-model first-order equation, hedgehog reduction and lift.

For an axially symmetric field omega = f(r) e^{i n theta} the first-order
equation

    J = sigma sqrt(V) (1+|omega|^2)^2 / (4 sqrt(beta)),  J = u_x v_y - u_y v_x

reduces (J = n f f'/r for the ansatz) to the radial ODE

    f f' = sigma * r * sqrt(V(f, 0)) * (1+f^2)^2 / (4 n sqrt(beta))

with the vacuum branch f' = 0 wherever f = 0.  Integration starts at a
small eps > 0 (the right-hand side vanishes linearly in r, so no series
expansion is needed at the origin).  If f reaches zero before r_max the
profile is continued by the vacuum branch: both sides of the first-order
equation vanish there, so the glued profile is an exact weak solution with
compact support (a compacton); the slope is discontinuous at the edge and
finite-difference checks exclude a collar of nodes around it.

A lifted hedgehog with f(0) > 0 has a point phase singularity at its
center (the phase e^{i n theta} has no limit), so pointwise checks also
exclude a fixed small disk around the center.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline

from .errors import BlowUpError, InputError
from .fields import ComplexField2D, FieldGradient, Grid2D, ScalarField2D, interior_mask
from .potentials import ModelParams, PotentialSpec, _check_nonneg, sqrt_nonneg

BLOWUP_LIMIT = 1e12


@dataclass
class HedgehogProfile:
    """Radial profile f(r) >= 0 with winding n for omega = f(r) e^{i n theta}.

    f_prime holds the ODE right-hand side at the nodes (zero on the vacuum
    branch); r_star is the compacton edge radius, or None if the support
    reaches the last node.
    """

    n: int
    r: np.ndarray
    f: np.ndarray
    sigma: float
    f0: float
    f_prime: np.ndarray
    r_star: Optional[float] = None

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.f = np.asarray(self.f, dtype=float)
        self.f_prime = np.asarray(self.f_prime, dtype=float)
        if self.n == 0:
            raise InputError("winding number n must be nonzero")
        if self.r[0] <= 0 or np.any(np.diff(self.r) <= 0):
            raise InputError("radial nodes must be strictly increasing with r[0] > 0")
        if np.any(self.f < 0):
            raise InputError("profile must be nonnegative")
        zeros = np.nonzero(self.f == 0.0)[0]
        if zeros.size and np.any(self.f[zeros[0]:] != 0.0):
            raise InputError("profile must stay on the vacuum branch after reaching zero")

    @property
    def support_radius(self) -> float:
        return self.r_star if self.r_star is not None else float(self.r[-1])


def radial_rhs(r, f, V: PotentialSpec, params: ModelParams, n: int, sigma: float):
    """f'(r) of the reduced ODE; zero on the vacuum branch f <= 0."""
    r = np.asarray(r, dtype=float)
    f = np.asarray(f, dtype=float)
    pos = f > 0.0
    fs = np.where(pos, f, 1.0)
    Vv = np.asarray(V.eval(fs, np.zeros_like(fs)), dtype=float)
    _check_nonneg(Vv, where=f"radial_rhs({V.name})")
    out = sigma * r * sqrt_nonneg(Vv) * (1.0 + fs * fs) ** 2 / (4.0 * n * np.sqrt(params.beta) * fs)
    out = np.where(pos, out, 0.0)
    return out if out.ndim else float(out)


def solve_profile(V: PotentialSpec, params: ModelParams, n: int, sigma: float,
                  f0: float, r_max: float, tol: float = 1e-9,
                  eps: float = 1e-6, n_nodes: int = 4097) -> HedgehogProfile:
    """Integrate the reduced ODE from r = eps with f(eps) = f0.

    Adaptive RK45 at relative tolerance tol; a zero crossing of f before
    r_max is located by the integrator's event machinery and the profile is
    continued as identically zero (compacton closure).  Exceeding the
    blow-up guard raises BlowUpError with the blow-up radius.
    """
    if f0 <= 0:
        raise InputError(f"f0 must be positive, got {f0}")
    if r_max <= eps:
        raise InputError(f"r_max must exceed eps={eps}, got {r_max}")

    def rhs(r, y):
        return [radial_rhs(r, max(y[0], 0.0), V, params, n, sigma)]

    def hit_zero(r, y):
        return y[0]
    hit_zero.terminal = True
    hit_zero.direction = -1

    def blow_up(r, y):
        return y[0] - BLOWUP_LIMIT
    blow_up.terminal = True
    blow_up.direction = 1

    sol = solve_ivp(rhs, (eps, r_max), [f0], method="RK45", rtol=tol,
                    atol=max(tol * 1e-3, 1e-14), dense_output=True,
                    events=(hit_zero, blow_up))
    if not sol.success:
        raise InputError(f"profile integration failed: {sol.message}")
    if sol.t_events[1].size:
        raise BlowUpError(
            f"profile exceeded {BLOWUP_LIMIT:.0e} at r = {sol.t_events[1][0]:.6g}",
            radius=float(sol.t_events[1][0]),
        )
    r_star = float(sol.t_events[0][0]) if sol.t_events[0].size else None

    r = np.linspace(eps, r_max, n_nodes)
    if r_star is not None:
        # make the edge a node so the slope discontinuity sits on a breakpoint
        r = np.sort(np.append(r[np.abs(r - r_star) > 1e-12 * max(1.0, r_star)], r_star))
    f = np.empty_like(r)
    inside = r <= (r_star if r_star is not None else r_max)
    f[inside] = np.maximum(sol.sol(r[inside])[0], 0.0)
    f[~inside] = 0.0
    if r_star is not None:
        f[r == r_star] = 0.0
    fp = radial_rhs(r, f, V, params, n, sigma)
    return HedgehogProfile(n=n, r=r, f=f, sigma=float(sigma), f0=float(f0),
                           f_prime=np.asarray(fp, dtype=float), r_star=r_star)


def _monotone_clamped_slopes(r, f, d):
    """Fritsch-Carlson style safeguard: keeps the Hermite cubic free of
    spurious oscillation on monotone data; inactive when the supplied ODE
    slopes are already consistent with the secants."""
    d = d.copy()
    sec = np.diff(f) / np.diff(r)
    flat = sec == 0.0
    if np.any(flat):
        idx = np.nonzero(flat)[0]
        d[idx] = 0.0
        d[idx + 1] = 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(~flat, d[:-1] / np.where(flat, 1.0, sec), 0.0)
        b = np.where(~flat, d[1:] / np.where(flat, 1.0, sec), 0.0)
    rad = a * a + b * b
    bad = rad > 9.0
    if np.any(bad):
        scale = 3.0 / np.sqrt(rad[bad])
        idx = np.nonzero(bad)[0]
        d[idx] = scale * a[bad] * sec[bad]
        d[idx + 1] = scale * b[bad] * sec[bad]
    return d


def profile_to_field(p: HedgehogProfile, grid: Grid2D, center=(0.0, 0.0)) -> ComplexField2D:
    """Lift omega(x, y) = f(rho) e^{i n theta} about center.

    f is interpolated by a C^1 cubic Hermite spline through the stored ODE
    slopes (monotone-clamped) and is zero beyond the support.  Exact
    chain-rule first derivatives are stored on the field:

        omega_x = e^{i n theta} (f' cos(theta) - i n f sin(theta)/rho)
        omega_y = e^{i n theta} (f' sin(theta) + i n f cos(theta)/rho)

    They are undefined at the center node when f(0) > 0 (phase singularity)
    and are zeroed there; checks exclude a small center disk.
    """
    d = _monotone_clamped_slopes(p.r, p.f, p.f_prime)
    spline = CubicHermiteSpline(p.r, p.f, d)
    dspline = spline.derivative()
    rmax = p.support_radius

    X, Y = grid.mesh()
    dx = X - center[0]
    dy = Y - center[1]
    rho = np.hypot(dx, dy)
    theta = np.arctan2(dy, dx)

    inside = (rho >= p.r[0]) & (rho <= rmax)
    below = rho < p.r[0]
    f = np.zeros_like(rho)
    fp = np.zeros_like(rho)
    f[inside] = np.maximum(spline(rho[inside]), 0.0)
    fp[inside] = dspline(rho[inside])
    # inside the first node: profile is effectively f0 (rhs vanishes at r->0)
    f[below] = p.f[0]
    fp[below] = p.f_prime[0] * np.where(p.r[0] > 0, rho[below] / p.r[0], 0.0)

    n = p.n
    phase = np.exp(1j * n * theta)
    w = f * phase

    with np.errstate(divide="ignore", invalid="ignore"):
        ang = np.where(rho > 0, n * f / rho, 0.0)
    center_node = rho < 1e-12 * max(1.0, rmax)
    ang = np.where(center_node, 0.0, ang)
    fp = np.where(center_node, 0.0, fp)
    wx = phase * (fp * np.cos(theta) - 1j * ang * np.sin(theta))
    wy = phase * (fp * np.sin(theta) + 1j * ang * np.cos(theta))
    gradient = FieldGradient(wx.real, wy.real, wx.imag, wy.imag)
    return ComplexField2D.from_arrays(grid, w.real, w.imag, gradient)


@dataclass
class HedgehogExclusions:
    """Node masks for pointwise checks on a lifted hedgehog."""

    collar: np.ndarray        # nodes within collar_nodes*h of the compacton edge
    core: np.ndarray          # fixed disk around the phase-singular center
    measured: np.ndarray      # interior minus collar minus core
    core_radius: float
    collar_nodes: int


def hedgehog_exclusions(p: HedgehogProfile, grid: Grid2D, center=(0.0, 0.0),
                        collar_nodes: int = 3, core_radius: float | None = None) -> HedgehogExclusions:
    """Exclusion masks: a collar_nodes-wide band on each side of the detected
    edge circle plus a fixed center disk (default radius 0.3 * support radius,
    independent of the grid so measured convergence orders are genuine)."""
    X, Y = grid.mesh()
    rho = np.hypot(X - center[0], Y - center[1])
    h = grid.h_max
    if p.r_star is not None:
        collar = np.abs(rho - p.r_star) <= collar_nodes * h
    else:
        collar = np.zeros(grid.shape, dtype=bool)
    if core_radius is None:
        core_radius = 0.3 * p.support_radius
    core = rho < core_radius
    measured = interior_mask(grid, depth=2) & ~collar & ~core
    return HedgehogExclusions(collar=collar, core=core, measured=measured,
                              core_radius=float(core_radius), collar_nodes=collar_nodes)


def residual_bogomolny_restricted(w: ComplexField2D, V: PotentialSpec, params: ModelParams,
                                  sigma: float, derivatives: str = "fd") -> ScalarField2D:
    """Nodewise R = J - sigma sqrt(V(u,v)) (1+u^2+v^2)^2/(4 sqrt(beta)).

    R vanishes identically on solutions of the first-order equation.
    """
    u = w.u.values
    v = w.v.values
    wx, wy = w.derivative_arrays(derivatives)
    J = wx.real * wy.imag - wy.real * wx.imag
    Vv = np.asarray(V.eval(u, v), dtype=float)
    _check_nonneg(Vv, where=f"residual_bogomolny_restricted({V.name})")
    T = 1.0 + u * u + v * v
    R = J - sigma * sqrt_nonneg(Vv) * T**2 / (4.0 * np.sqrt(params.beta))
    return ScalarField2D(w.grid, R)
