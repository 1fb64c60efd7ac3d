"""Potentials V(u, v) >= 0 and the gauge function of the first-order system.

Builtin families (s = u^2 + v^2 = |omega|^2):

    old_baby        V = mu^2 * 2s/(1+s)            == mu^2 (1 - s3); vacuum omega=0
    half_U_squared  V = U^2 / 2, default U = mu (1 - s3) = 2 mu s/(1+s)
    bps_test        V = 4 beta lam^2 s/(1+s)^4     manufactured family: under the
                    hedgehog ansatz the first-order equation integrates in closed
                    form to f(r) = f0 - lam r^2/(4n) (sigma = -1), compacton edge
                    r* = sqrt(4 n f0/lam).  Not a published family; flagged in
                    metadata as manufactured.

For the restricted model the first-order (Bogomolny) equation is

    J = sigma * sqrt(V) (1+u^2+v^2)^2 / (4 sqrt(beta)),   J = u_x v_y - u_y v_x

and the equivalent gauge form J = -(1+u^2+v^2)^4 g/(2 lambda2) fixes

    g(u, v) = -2 sigma sqrt(lambda2 V) / (1+u^2+v^2)^2.

Constructed full-model potentials combine a gauge function with a harmonic
function H:

    V = (1+s)^4 g^2/(4 lambda2) + (1+s)^2 (H_u^2 + H_v^2)/(2 lambda1)

which is nonnegative by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InputError, NonHarmonicError, PotentialDomainError

VACUUM_TOL = 1e-12
SQRT_CLIP_TOL = 1e-14


class _ClipCounter:
    """Counts sqrt(V) evaluations that clipped genuinely negative round-off."""

    def __init__(self):
        self.count = 0

    def reset(self):
        self.count = 0


sqrt_clip_counter = _ClipCounter()


def sqrt_nonneg(values, tol: float = SQRT_CLIP_TOL):
    """sqrt(max(V, 0)); counts clips of values below -tol (round-off guard)."""
    a = np.asarray(values, dtype=float)
    below = a < -tol
    if np.any(below):
        sqrt_clip_counter.count += int(np.count_nonzero(below))
    return np.sqrt(np.maximum(a, 0.0))


@dataclass(frozen=True)
class ModelParams:
    """Couplings of the energy functional.

    lambda1 multiplies the quadratic (sigma-model) term, lambda2 the quartic
    term, and beta = lambda2/16 is the quartic coupling in the restricted
    normalization.  gamma is carried for bookkeeping only: by convention it is
    already folded into V.
    """

    beta: Optional[float] = None
    lambda1: float = 0.0
    lambda2: Optional[float] = None
    gamma: float = 1.0

    def __post_init__(self):
        beta, lambda2 = self.beta, self.lambda2
        if beta is None and lambda2 is None:
            raise InputError("provide beta or lambda2")
        if beta is None:
            beta = lambda2 / 16.0
        if lambda2 is None:
            lambda2 = 16.0 * beta
        if beta <= 0 or lambda2 <= 0:
            raise InputError(f"beta and lambda2 must be positive, got beta={beta}, lambda2={lambda2}")
        if abs(lambda2 - 16.0 * beta) > 1e-9 * lambda2:
            raise InputError(f"inconsistent couplings: lambda2={lambda2} but 16*beta={16.0 * beta}")
        if self.lambda1 < 0:
            raise InputError(f"lambda1 must be nonnegative, got {self.lambda1}")
        if self.gamma <= 0:
            raise InputError(f"gamma must be positive, got {self.gamma}")
        object.__setattr__(self, "beta", float(beta))
        object.__setattr__(self, "lambda2", float(lambda2))


@dataclass
class PotentialSpec:
    """Evaluator bundle for a potential: V, its (u, v) partials, and the
    listed vacuum points where V vanishes."""

    name: str
    eval: Callable
    grad: Callable
    vacuum_points: tuple = ()
    analytic_grad: bool = True
    metadata: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        for (u0, v0) in self.vacuum_points:
            val = float(np.asarray(self.eval(np.float64(u0), np.float64(v0))))
            if abs(val) > VACUUM_TOL:
                raise InputError(f"potential {self.name}: V({u0},{v0}) = {val:.3e}, not a vacuum")

    def __call__(self, u, v):
        return self.eval(u, v)


def _fd_grad(evalfn: Callable, rel_step: float = 1e-6) -> Callable:
    def grad(u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        hu = rel_step * np.maximum(1.0, np.abs(u))
        hv = rel_step * np.maximum(1.0, np.abs(v))
        Vu = (evalfn(u + hu, v) - evalfn(u - hu, v)) / (2.0 * hu)
        Vv = (evalfn(u, v + hv) - evalfn(u, v - hv)) / (2.0 * hv)
        return Vu, Vv
    return grad


def potential_from_callable(fn: Callable, grad: Callable | None = None,
                            vacuum_points: Sequence = (), name: str = "custom") -> PotentialSpec:
    if grad is None:
        return PotentialSpec(name, fn, _fd_grad(fn), tuple(vacuum_points), analytic_grad=False)
    return PotentialSpec(name, fn, grad, tuple(vacuum_points))


def potential_from_U(U: Callable, grad_U: Callable | None = None, name: str = "half_U_squared") -> PotentialSpec:
    """V = U^2/2 for a user-supplied nonnegative U(u, v)."""
    def evalfn(u, v):
        return 0.5 * np.asarray(U(u, v)) ** 2
    if grad_U is None:
        return PotentialSpec(name, evalfn, _fd_grad(evalfn), analytic_grad=False)
    def grad(u, v):
        Uv = np.asarray(U(u, v))
        Uu_u, Uu_v = grad_U(u, v)
        return Uv * Uu_u, Uv * Uu_v
    return PotentialSpec(name, evalfn, grad)


def zero_potential() -> PotentialSpec:
    def evalfn(u, v):
        return np.zeros_like(np.asarray(u, dtype=float))
    def grad(u, v):
        z = np.zeros_like(np.asarray(u, dtype=float))
        return z, z
    return PotentialSpec("zero", evalfn, grad)


def builtin_potential(name: str, params: Sequence[float] = ()) -> PotentialSpec:
    """Construct one of the builtin families; see the module docstring."""
    params = [float(p) for p in params]
    if name == "old_baby":
        mu = params[0] if params else 1.0
        if len(params) > 1:
            raise InputError("old_baby takes a single parameter mu")
        if mu < 0:
            raise InputError(f"old_baby: mu must be nonnegative, got {mu}")
        mu2 = mu * mu
        def evalfn(u, v):
            s = np.asarray(u) ** 2 + np.asarray(v) ** 2
            return mu2 * 2.0 * s / (1.0 + s)
        def grad(u, v):
            u = np.asarray(u, dtype=float)
            v = np.asarray(v, dtype=float)
            s = u * u + v * v
            c = 4.0 * mu2 / (1.0 + s) ** 2
            return c * u, c * v
        return PotentialSpec("old_baby", evalfn, grad, vacuum_points=((0.0, 0.0),))

    if name == "half_U_squared":
        mu = params[0] if params else 1.0
        if len(params) > 1:
            raise InputError("half_U_squared takes a single parameter mu")
        if mu < 0:
            raise InputError(f"half_U_squared: mu must be nonnegative, got {mu}")
        mu2 = mu * mu
        def evalfn(u, v):
            s = np.asarray(u) ** 2 + np.asarray(v) ** 2
            return 2.0 * mu2 * s * s / (1.0 + s) ** 2
        def grad(u, v):
            u = np.asarray(u, dtype=float)
            v = np.asarray(v, dtype=float)
            s = u * u + v * v
            c = 8.0 * mu2 * s / (1.0 + s) ** 3
            return c * u, c * v
        return PotentialSpec("half_U_squared", evalfn, grad, vacuum_points=((0.0, 0.0),))

    if name == "bps_test":
        if len(params) not in (0, 2):
            raise InputError("bps_test takes parameters [beta, lam]")
        beta = params[0] if params else 1.0
        lam = params[1] if params else 1.0
        if beta <= 0:
            raise InputError(f"bps_test: beta must be positive, got {beta}")
        if lam < 0:
            raise InputError(f"bps_test: lam must be nonnegative, got {lam}")
        amp = 4.0 * beta * lam * lam
        def evalfn(u, v):
            s = np.asarray(u) ** 2 + np.asarray(v) ** 2
            return amp * s / (1.0 + s) ** 4
        def grad(u, v):
            u = np.asarray(u, dtype=float)
            v = np.asarray(v, dtype=float)
            s = u * u + v * v
            c = 2.0 * amp * (1.0 - 3.0 * s) / (1.0 + s) ** 5
            return c * u, c * v
        return PotentialSpec("bps_test", evalfn, grad, vacuum_points=((0.0, 0.0),),
                             metadata={"manufactured": True, "beta": beta, "lam": lam})

    raise InputError(f"unknown potential family {name!r}; choose from old_baby, half_U_squared, bps_test")


def _check_nonneg(values, where="potential"):
    a = np.asarray(values, dtype=float)
    bad = a < -SQRT_CLIP_TOL * np.maximum(1.0, np.max(np.abs(a)) if a.size else 1.0)
    if np.any(bad):
        k = int(np.argmax(bad.ravel()))
        raise PotentialDomainError(
            f"{where}: negative value {a.ravel()[k]:.6e} at node {k}", node_index=k
        )


def gauge_from_potential(V: PotentialSpec, params: ModelParams, sigma: float = -1.0) -> Callable:
    """Gauge function g(u, v) = -2 sigma sqrt(lambda2 V)/(1+u^2+v^2)^2.

    With this g, the Jacobian equation J = -(1+s)^4 g/(2 lambda2) is exactly
    the restricted first-order equation J = sigma sqrt(V) (1+s)^2/(4 sqrt(beta)).
    sigma in {+1, -1} selects the branch.
    """
    if sigma not in (-1.0, 1.0, -1, 1):
        raise InputError(f"sigma must be +1 or -1, got {sigma}")
    lam2 = params.lambda2

    def gauge(u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        Vv = np.asarray(V.eval(u, v), dtype=float)
        _check_nonneg(Vv, where=f"gauge_from_potential({V.name})")
        T = 1.0 + u * u + v * v
        return -2.0 * sigma * sqrt_nonneg(lam2 * Vv) / T**2

    return gauge


def build_full_model_potential(gauge: Callable, harmonic, params: ModelParams,
                               name: str = "constructed", laplace_tol: float = 1e-8) -> PotentialSpec:
    """Admissible full-model potential for a gauge function and harmonic H:

        V = (1+s)^4 g^2/(4 lambda2) + (1+s)^2 (H_u^2 + H_v^2)/(2 lambda1)

    harmonic must pass the Laplace gate (max |H_uu + H_vv| <= laplace_tol on
    its probe box), otherwise it is rejected.
    """
    if params.lambda1 <= 0:
        raise InputError("full-model potential needs lambda1 > 0")
    from .fullmodel import check_harmonic  # cycle-free: fullmodel imports nothing from here at import time
    residual = check_harmonic(harmonic)
    if residual > laplace_tol:
        raise NonHarmonicError(
            f"H2 candidate rejected: Laplace residual {residual:.6e} exceeds {laplace_tol:.1e}",
            residual=residual,
        )
    lam1, lam2 = params.lambda1, params.lambda2

    def evalfn(u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        T = 1.0 + u * u + v * v
        g = np.asarray(gauge(u, v), dtype=float)
        hu = np.asarray(harmonic.du(u, v), dtype=float)
        hv = np.asarray(harmonic.dv(u, v), dtype=float)
        return T**4 * g * g / (4.0 * lam2) + T**2 * (hu * hu + hv * hv) / (2.0 * lam1)

    return PotentialSpec(name, evalfn, _fd_grad(evalfn), analytic_grad=False,
                         metadata={"constructed": True, "laplace_residual": residual})
