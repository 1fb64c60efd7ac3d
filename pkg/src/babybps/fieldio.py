"""CSV readers/writers for fields, profiles and tables.

Field files carry the header ``x,y,u,v`` with one node per line in
row-major order (y outer, x inner) and 17 significant digits, so a
re-run of the same configuration reproduces the file byte for byte.
"""

from __future__ import annotations

import io

import numpy as np

from .errors import InputError, SpacingError
from .fields import ComplexField2D, Grid2D

_SPACING_RTOL = 1e-9


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def field_csv_text(w: ComplexField2D) -> str:
    grid = w.grid
    X, Y = grid.mesh()
    out = io.StringIO()
    out.write("x,y,u,v\n")
    for xr, yr, ur, vr in zip(X.ravel(), Y.ravel(), w.u.values.ravel(), w.v.values.ravel()):
        out.write(f"{fmt(xr)},{fmt(yr)},{fmt(ur)},{fmt(vr)}\n")
    return out.getvalue()


def write_field_csv(path, w: ComplexField2D) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(field_csv_text(w))


def _uniform_spacing(coords: np.ndarray, axis_name: str) -> float:
    steps = np.diff(coords)
    h = steps[0]
    if h <= 0:
        raise SpacingError(f"{axis_name} coordinates are not strictly increasing")
    tol = _SPACING_RTOL * max(1.0, abs(h))
    if np.any(np.abs(steps - h) > tol):
        k = int(np.argmax(np.abs(steps - h)))
        raise SpacingError(
            f"non-uniform {axis_name} spacing: step {k} is {steps[k]!r}, expected {h!r}"
        )
    return float(h)


def parse_field_csv(text: str) -> ComplexField2D:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip().lower() != "x,y,u,v":
        raise InputError("field file must start with header 'x,y,u,v'")
    try:
        data = np.array([[float(tok) for tok in ln.split(",")] for ln in lines[1:]])
    except ValueError as exc:
        raise InputError(f"malformed field file: {exc}") from exc
    if data.ndim != 2 or data.shape[1] != 4 or data.shape[0] < 9:
        raise InputError("field file needs >= 9 rows of x,y,u,v")
    x, y = data[:, 0], data[:, 1]
    # row-major, y outer: x cycles fastest
    wrap = np.nonzero(np.diff(x) < 0)[0]
    nx = int(wrap[0]) + 1 if wrap.size else data.shape[0]
    if data.shape[0] % nx != 0:
        raise SpacingError("node count is not a multiple of the row length")
    ny = data.shape[0] // nx
    if nx < 3 or ny < 3:
        raise InputError("field grid needs at least 3 nodes per axis")
    X = x.reshape(ny, nx)
    Y = y.reshape(ny, nx)
    if np.any(np.abs(X - X[0]) > _SPACING_RTOL * max(1.0, float(np.max(np.abs(X))))):
        raise SpacingError("x coordinates differ between rows")
    if np.any(np.abs(Y - Y[:, :1]) > _SPACING_RTOL * max(1.0, float(np.max(np.abs(Y))))):
        raise SpacingError("y coordinate varies within a row")
    hx = _uniform_spacing(X[0], "x")
    hy = _uniform_spacing(Y[:, 0], "y")
    grid = Grid2D(nx, ny, hx, hy, float(X[0, 0]), float(Y[0, 0]))
    return ComplexField2D.from_arrays(grid, data[:, 2], data[:, 3])


def read_field_csv(path) -> ComplexField2D:
    with open(path) as fh:
        return parse_field_csv(fh.read())


def table_csv_text(header: list[str], rows: list[list]) -> str:
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(fmt(c) if isinstance(c, float) else str(c) for c in row) + "\n")
    return out.getvalue()


def write_table_csv(path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(table_csv_text(header, rows))
