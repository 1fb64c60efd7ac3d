"""Sphere-valued fields on uniform 2-D grids.

A configuration is stored either as a unit three-vector field
S = (s1, s2, s3) with s1^2 + s2^2 + s3^2 = 1, or as its stereographic
image omega = u + i v:

    s1 = 2u/(1+u^2+v^2),  s2 = 2v/(1+u^2+v^2),  s3 = (1-u^2-v^2)/(1+u^2+v^2)

so the north pole s3 = +1 is omega = 0 and the south pole is the point at
infinity.  All spatial derivatives are second-order finite differences:
central three-point stencils in the interior, one-sided three-point
stencils on the boundary rows/columns (both exact for quadratics).

Arrays are stored with shape (ny, nx); the flattened order is row-major
with y as the outer index, which is also the order used by the CSV field
files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InputError

UNIT_NORM_TOL = 1e-12


@dataclass(frozen=True)
class Grid2D:
    """Uniform rectangular grid: x = x0 + i*hx (i < nx), y = y0 + j*hy."""

    nx: int
    ny: int
    hx: float
    hy: float
    x0: float = 0.0
    y0: float = 0.0

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise InputError(f"grid needs at least 3 nodes per axis, got {self.nx}x{self.ny}")
        if self.hx <= 0 or self.hy <= 0:
            raise InputError(f"grid spacings must be positive, got hx={self.hx}, hy={self.hy}")

    @classmethod
    def centered(cls, nx: int, ny: int, lx: float, ly: float) -> "Grid2D":
        """Grid spanning [-lx, lx] x [-ly, ly] inclusive."""
        hx = 2.0 * lx / (nx - 1)
        hy = 2.0 * ly / (ny - 1)
        return cls(nx, ny, hx, hy, -lx, -ly)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.hx * np.arange(self.nx)

    @property
    def y(self) -> np.ndarray:
        return self.y0 + self.hy * np.arange(self.ny)

    def mesh(self):
        """Coordinate arrays X, Y of shape (ny, nx)."""
        return np.meshgrid(self.x, self.y)

    @property
    def shape(self):
        return (self.ny, self.nx)

    @property
    def h_max(self) -> float:
        return max(self.hx, self.hy)


def _as_grid_array(grid: Grid2D, values) -> np.ndarray:
    a = np.asarray(values, dtype=float)
    if a.size != grid.nx * grid.ny:
        raise InputError(f"expected {grid.nx * grid.ny} values, got {a.size}")
    return a.reshape(grid.ny, grid.nx)


@dataclass
class ScalarField2D:
    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        self.values = _as_grid_array(self.grid, self.values)
        if not np.all(np.isfinite(self.values)):
            raise InputError("scalar field contains non-finite values")


@dataclass
class FieldGradient:
    """Stored first derivatives of (u, v), used when a field was built from
    a closed form and exact derivatives are available."""

    du_dx: np.ndarray
    du_dy: np.ndarray
    dv_dx: np.ndarray
    dv_dy: np.ndarray

    def wx_wy(self):
        return self.du_dx + 1j * self.dv_dx, self.du_dy + 1j * self.dv_dy


@dataclass
class ComplexField2D:
    """omega = u + i v sampled on a shared grid."""

    u: ScalarField2D
    v: ScalarField2D
    gradient: Optional[FieldGradient] = field(default=None)

    def __post_init__(self):
        if self.u.grid != self.v.grid:
            raise InputError("u and v must share the same grid")

    @property
    def grid(self) -> Grid2D:
        return self.u.grid

    @property
    def w(self) -> np.ndarray:
        return self.u.values + 1j * self.v.values

    @classmethod
    def from_arrays(cls, grid: Grid2D, u, v, gradient=None) -> "ComplexField2D":
        return cls(ScalarField2D(grid, u), ScalarField2D(grid, v), gradient)

    @classmethod
    def from_function(cls, grid: Grid2D, fn: Callable, grad_fn: Callable | None = None) -> "ComplexField2D":
        """Sample omega = fn(X, Y); optionally store grad_fn(X, Y) -> (wx, wy)."""
        X, Y = grid.mesh()
        w = np.asarray(fn(X, Y), dtype=complex)
        gradient = None
        if grad_fn is not None:
            wx, wy = grad_fn(X, Y)
            wx = np.asarray(wx, dtype=complex)
            wy = np.asarray(wy, dtype=complex)
            gradient = FieldGradient(wx.real, wy.real, wx.imag, wy.imag)
        return cls.from_arrays(grid, w.real, w.imag, gradient)

    def derivative_arrays(self, derivatives: str = "fd"):
        """Complex derivative arrays (wx, wy).

        derivatives: 'fd' forces finite differences, 'stored' requires the
        exact-gradient payload, 'auto' uses the payload when present.
        """
        if derivatives not in ("fd", "stored", "auto"):
            raise InputError(f"unknown derivative mode {derivatives!r}")
        if derivatives == "stored" and self.gradient is None:
            raise InputError("field carries no stored gradient")
        if derivatives in ("stored", "auto") and self.gradient is not None:
            return self.gradient.wx_wy()
        w = self.w
        g = self.grid
        return ddx(w, g.hx), ddy(w, g.hy)


@dataclass
class UnitVectorField:
    s1: ScalarField2D
    s2: ScalarField2D
    s3: ScalarField2D

    def __post_init__(self):
        if not (self.s1.grid == self.s2.grid == self.s3.grid):
            raise InputError("components must share the same grid")
        norm_err = np.abs(self.s1.values**2 + self.s2.values**2 + self.s3.values**2 - 1.0)
        worst = float(np.max(norm_err))
        if worst > UNIT_NORM_TOL:
            raise InputError(f"unit-norm violation: max |S.S - 1| = {worst:.3e}")

    @property
    def grid(self) -> Grid2D:
        return self.s1.grid

    @classmethod
    def from_arrays(cls, grid: Grid2D, s1, s2, s3) -> "UnitVectorField":
        return cls(ScalarField2D(grid, s1), ScalarField2D(grid, s2), ScalarField2D(grid, s3))


# ---------------------------------------------------------------------------
# finite-difference stencils (work on real or complex 2-D arrays)

def ddx(a: np.ndarray, hx: float) -> np.ndarray:
    out = np.empty_like(a)
    out[:, 1:-1] = (a[:, 2:] - a[:, :-2]) / (2.0 * hx)
    out[:, 0] = (-3.0 * a[:, 0] + 4.0 * a[:, 1] - a[:, 2]) / (2.0 * hx)
    out[:, -1] = (3.0 * a[:, -1] - 4.0 * a[:, -2] + a[:, -3]) / (2.0 * hx)
    return out


def ddy(a: np.ndarray, hy: float) -> np.ndarray:
    out = np.empty_like(a)
    out[1:-1, :] = (a[2:, :] - a[:-2, :]) / (2.0 * hy)
    out[0, :] = (-3.0 * a[0, :] + 4.0 * a[1, :] - a[2, :]) / (2.0 * hy)
    out[-1, :] = (3.0 * a[-1, :] - 4.0 * a[-2, :] + a[-3, :]) / (2.0 * hy)
    return out


def d2dx2(a: np.ndarray, hx: float) -> np.ndarray:
    out = np.empty_like(a)
    out[:, 1:-1] = (a[:, 2:] - 2.0 * a[:, 1:-1] + a[:, :-2]) / hx**2
    out[:, 0] = (2.0 * a[:, 0] - 5.0 * a[:, 1] + 4.0 * a[:, 2] - a[:, 3]) / hx**2
    out[:, -1] = (2.0 * a[:, -1] - 5.0 * a[:, -2] + 4.0 * a[:, -3] - a[:, -4]) / hx**2
    return out


def d2dy2(a: np.ndarray, hy: float) -> np.ndarray:
    out = np.empty_like(a)
    out[1:-1, :] = (a[2:, :] - 2.0 * a[1:-1, :] + a[:-2, :]) / hy**2
    out[0, :] = (2.0 * a[0, :] - 5.0 * a[1, :] + 4.0 * a[2, :] - a[3, :]) / hy**2
    out[-1, :] = (2.0 * a[-1, :] - 5.0 * a[-2, :] + 4.0 * a[-3, :] - a[-4, :]) / hy**2
    return out


def partial_x(f: ScalarField2D) -> ScalarField2D:
    """Second-order d/dx: central in the interior, one-sided on edges."""
    return ScalarField2D(f.grid, ddx(f.values, f.grid.hx))


def partial_y(f: ScalarField2D) -> ScalarField2D:
    return ScalarField2D(f.grid, ddy(f.values, f.grid.hy))


def jacobian_det(w: ComplexField2D, derivatives: str = "fd") -> ScalarField2D:
    """J = u_x v_y - u_y v_x, the Jacobian of (x, y) -> (u, v).

    Equivalently omega_x omega*_y - omega_y omega*_x = -2iJ.
    """
    wx, wy = w.derivative_arrays(derivatives)
    J = wx.real * wy.imag - wy.real * wx.imag
    return ScalarField2D(w.grid, J)


# ---------------------------------------------------------------------------
# stereographic projection and its inverse

def stereographic_project(w: ComplexField2D) -> UnitVectorField:
    """Map omega = u+iv to the unit vector S; omega = 0 is the north pole."""
    u, v = w.u.values, w.v.values
    denom = 1.0 + u * u + v * v
    s1 = 2.0 * u / denom
    s2 = 2.0 * v / denom
    s3 = (1.0 - u * u - v * v) / denom
    return UnitVectorField.from_arrays(w.grid, s1, s2, s3)


def stereographic_inverse(s: UnitVectorField, cap: float = 1e8):
    """omega = (s1 + i s2)/(1 + s3); nodes nearer the south pole than the
    largest representable modulus are clamped to |omega| = cap with the
    phase of s1 + i s2 preserved.

    Returns (field, clamped) where clamped is a boolean node mask
    (diagnostic, not fatal).
    """
    if cap <= 0:
        raise InputError("cap must be positive")
    s1, s2, s3 = s.s1.values, s.s2.values, s.s3.values
    denom = 1.0 + s3
    ok = denom > 2.0 / (1.0 + cap * cap)
    safe = np.where(ok, denom, 1.0)
    u = np.where(ok, s1 / safe, 0.0)
    v = np.where(ok, s2 / safe, 0.0)
    clamped = ~ok
    if np.any(clamped):
        phase = np.arctan2(s2, s1)
        u = np.where(clamped, cap * np.cos(phase), u)
        v = np.where(clamped, cap * np.sin(phase), v)
    return ComplexField2D.from_arrays(s.grid, u, v), clamped


# ---------------------------------------------------------------------------
# masks and norms

def interior_mask(grid: Grid2D, depth: int = 1) -> np.ndarray:
    m = np.zeros(grid.shape, dtype=bool)
    m[depth:-depth, depth:-depth] = True
    return m


def linf(values: np.ndarray, mask: np.ndarray | None = None) -> float:
    a = np.abs(np.asarray(values))
    if mask is not None:
        if not np.any(mask):
            return 0.0
        a = a[mask]
    return float(np.max(a))
