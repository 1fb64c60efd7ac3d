import numpy as np
import pytest

import babybps as bb


@pytest.fixture(scope="session")
def bps_case():
    """Manufactured restricted-model case: bps_test(beta=1, lam=1), n=1,
    f0=1, sigma=-1, closed form f(r) = 1 - r^2/4, edge at r = 2."""
    V = bb.builtin_potential("bps_test", [1.0, 1.0])
    params = bb.ModelParams(beta=1.0)
    profile = bb.solve_profile(V, params, n=1, sigma=-1.0, f0=1.0, r_max=3.0)
    return V, params, profile


@pytest.fixture(scope="session")
def lifted_fields(bps_case):
    """The manufactured solution lifted onto the grids used by the
    convergence studies, with the matching exclusion masks."""
    V, params, profile = bps_case
    out = {}
    for N in (129, 257, 513):
        grid = bb.Grid2D.centered(N, N, 2.6, 2.6)
        field = bb.profile_to_field(profile, grid)
        excl = bb.hedgehog_exclusions(profile, grid)
        out[N] = (grid, field, excl)
    return out


def antiholo_field(grid, a=1.0, with_gradient=True):
    X, Y = grid.mesh()
    if with_gradient:
        return bb.ComplexField2D.from_function(
            grid, lambda x, y: a * (x - 1j * y),
            lambda x, y: (np.full_like(x, a, dtype=complex), np.full_like(x, -1j * a, dtype=complex)))
    return bb.ComplexField2D.from_arrays(grid, a * X, -a * Y)
