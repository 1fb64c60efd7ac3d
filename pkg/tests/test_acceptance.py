"""Acceptance suite: one test per criterion, one printed pass/fail line each.

Run with `pytest tests/test_acceptance.py -s` to see the lines as they pass.

Pointwise norms on lifted hedgehogs are taken over the interior minus the
3-node edge collar minus a fixed disk around the phase-singular center
(radius 0.3 * support radius, grid-independent); collar and core maxima are
reported separately by the library, never silently dropped.  Convergence
orders use finite-difference derivatives; closure/saturation tolerances in
criteria 4-6 use the stored chain-rule derivatives of the lift, where the
only error left is the accuracy of the radial solve itself.
"""

import json

import numpy as np
import pytest

import babybps as bb
from babybps.cli import main
from babybps.fullmodel import HarmonicFunction, constructed_potential_values
from babybps.pipeline import parse_h2

from conftest import antiholo_field


def report_line(num, ok, detail):
    print(f"ACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def test_criterion_1_stereographic_round_trip():
    rng = np.random.RandomState(2024)
    grid = bb.Grid2D(40, 25, 0.1, 0.1)
    vecs = rng.standard_normal((3, 25, 40))
    vecs /= np.sqrt(np.sum(vecs**2, axis=0))
    vecs[2] = np.maximum(vecs[2], -1 + 1e-6)
    vecs /= np.sqrt(np.sum(vecs**2, axis=0))
    s = bb.UnitVectorField.from_arrays(grid, *vecs)
    w, clamped = bb.stereographic_inverse(s)
    back = bb.stereographic_project(w)
    err = max(np.max(np.abs(back.s1.values - vecs[0])),
              np.max(np.abs(back.s2.values - vecs[1])),
              np.max(np.abs(back.s3.values - vecs[2])))
    report_line(1, (not clamped.any()) and err <= 1e-12,
                f"project(inverse) max error {err:.3e} on 1000 unit vectors (tol 1e-12)")


def test_criterion_2_manufactured_solution(bps_case, lifted_fields):
    V, params, profile = bps_case
    ode_err = float(np.max(np.abs(profile.f - np.maximum(1 - profile.r**2 / 4, 0.0))))
    edge_err = abs(profile.r_star - 2.0)
    norms = {}
    for N in (257, 513):
        _, field, excl = lifted_fields[N]
        R = bb.residual_bogomolny_restricted(field, V, params, -1.0, derivatives="fd")
        norms[N] = bb.linf(R.values, excl.measured)
    order = float(np.log2(norms[257] / norms[513]))
    ok = ode_err < 1e-6 and edge_err < 1e-6 and 1.7 <= order <= 2.3
    report_line(2, ok, f"ODE error {ode_err:.2e} (tol 1e-6), edge |r*-2| = {edge_err:.2e}, "
                       f"first-order residual order {order:.3f} (2.0 +/- 0.3)")


def test_criterion_3_el_residual_from_bps(bps_case, lifted_fields):
    V, params, _ = bps_case
    norms = []
    for N in (129, 257, 513):
        _, field, excl = lifted_fields[N]
        el = bb.el_residual_restricted(field, V, params)
        norms.append(bb.linf(el.values, excl.measured))
    r1 = norms[0] / norms[1]
    r2 = norms[1] / norms[2]
    ok = 3.4 <= r1 <= 4.6 and 3.4 <= r2 <= 4.6
    report_line(3, ok, f"EL residual refinement ratios {r1:.2f}, {r2:.2f} (4.0 +/- 15%)")


def test_criterion_4_dual_equation_closure(bps_case, lifted_fields):
    V, params, _ = bps_case
    _, field, excl = lifted_fields[513]
    duals = bb.dual_residuals_restricted(field, V, params, -1.0, derivatives="stored")
    worst = max(bb.linf(d.values, excl.measured) for d in duals.residuals)
    report_line(4, worst < 1e-6,
                f"all six dual residual norms <= {worst:.3e} on the 513^2 grid (tol 1e-6)")


def test_criterion_5_charge_quantization(bps_case):
    V, params, _ = bps_case
    details = []
    ok = True
    for n, f0, N in ((1, 50.0, 1025), (2, 70.0, 2049)):
        rstar = float(np.sqrt(4 * n * f0))
        p = bb.solve_profile(V, params, n=n, sigma=-1.0, f0=f0, r_max=rstar + 2.0)
        grid = bb.Grid2D.centered(N, N, rstar + 1.0, rstar + 1.0)
        q = bb.topological_charge(bb.profile_to_field(p, grid))
        details.append(f"|Q-{n}| = {abs(q - n):.2e}")
        ok = ok and abs(q - n) < 1e-3
    grid = bb.Grid2D.centered(513, 513, 20.0, 20.0)
    q = bb.topological_charge(antiholo_field(grid, with_gradient=False))
    details.append(f"|Q(zbar)-1| = {abs(q - 1):.2e}")
    ok = ok and abs(q - 1) < 0.02
    report_line(5, ok, ", ".join(details) + " (tols 1e-3, 1e-3, 0.02)")


def test_criterion_6_bps_saturation(bps_case, lifted_fields):
    V, params, profile = bps_case
    _, field, excl = lifted_fields[513]
    sat = bb.saturation_check(field, V, params, -1.0, derivatives="stored",
                              exclude=excl.collar | excl.core)
    rel = abs(sat.energy - sat.crossterm) / sat.energy
    scaled = bb.HedgehogProfile(n=profile.n, r=profile.r / 2.0, f=profile.f,
                                sigma=profile.sigma, f0=profile.f0,
                                f_prime=2.0 * profile.f_prime, r_star=profile.r_star / 2.0)
    grid = bb.Grid2D.centered(257, 257, 2.6, 2.6)
    sat2 = bb.saturation_check(bb.profile_to_field(scaled, grid), V, params, -1.0,
                               derivatives="stored")
    ok = rel < 1e-3 and sat.equipartition_defect < 1e-4 and sat2.gap > 0.01 * sat2.energy
    report_line(6, ok, f"|E-CT|/E = {rel:.2e} (tol 1e-3), equipartition defect "
                       f"{sat.equipartition_defect:.2e} (tol 1e-4), "
                       f"scaled deformation gap {sat2.gap / sat2.energy:.1%} of E (>= 1%)")


def test_criterion_7_full_model_antiholomorphic_chain():
    params = bb.ModelParams(lambda2=1.0, lambda1=1.0)
    lam2 = params.lambda2
    grid = bb.Grid2D.centered(513, 513, 1.0, 1.0)
    sol = bb.solve_full_bps(HarmonicFunction.constant(), params,
                            antiholo_field(grid, with_gradient=False))
    r2, r3 = sol.residual_norms[0], sol.residual_norms[1]
    X, Y = grid.mesh()
    T = 1 + X**2 + Y**2
    g_err = float(np.max(np.abs(sol.gauge_values.values - 2 * lam2 / T**4)))
    V_err = float(np.max(np.abs(constructed_potential_values(sol).values - lam2 / T**4)))

    # EL residual of the linear solution with its induced potential is
    # discretely exact; the order claim is measured on the curved Moebius
    # solution of the same H2=const family, whose induced potential is
    # V = lam2 (u^2+v^2)^4 / (1+u^2+v^2)^4
    def Vc(u, v):
        s = np.asarray(u) ** 2 + np.asarray(v) ** 2
        return lam2 * s**4 / (1 + s) ** 4

    def Vc_grad(u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        s = u * u + v * v
        c = 8 * lam2 * s**3 / (1 + s) ** 5
        return c * u, c * v

    V_lin = bb.potential_from_callable(
        lambda u, v: lam2 / (1 + np.asarray(u) ** 2 + np.asarray(v) ** 2) ** 4,
        grad=lambda u, v: (-8 * lam2 * np.asarray(u) / (1 + np.asarray(u) ** 2 + np.asarray(v) ** 2) ** 5,
                           -8 * lam2 * np.asarray(v) / (1 + np.asarray(u) ** 2 + np.asarray(v) ** 2) ** 5))
    eu, ev = bb.el_residual_full(sol.w, V_lin, params)
    lin_el = max(bb.linf(eu.values, bb.interior_mask(grid, 2)),
                 bb.linf(ev.values, bb.interior_mask(grid, 2)))

    V_mob = bb.potential_from_callable(Vc, grad=Vc_grad)
    norms = []
    for N in (65, 129, 257):
        g = bb.Grid2D.centered(N, N, 1.0, 1.0)
        Xm, Ym = g.mesh()
        m = 1.0 / ((Xm - 1j * Ym) - 3.0)
        w = bb.ComplexField2D.from_arrays(g, m.real, m.imag)
        eu, ev = bb.el_residual_full(w, V_mob, params)
        mask = bb.interior_mask(g, 2)
        norms.append(max(bb.linf(eu.values, mask), bb.linf(ev.values, mask)))
    o1 = float(np.log2(norms[0] / norms[1]))
    o2 = float(np.log2(norms[1] / norms[2]))
    ok = (r2 < 1e-12 and r3 < 1e-12 and g_err < 1e-10 and V_err < 1e-10
          and lin_el < 1e-10 and 1.7 <= o1 <= 2.3 and 1.7 <= o2 <= 2.3)
    report_line(7, ok, f"R2 = {r2:.2e}, R3 = {r3:.2e} (tol 1e-12); induced gauge error "
                       f"{g_err:.2e}, potential error {V_err:.2e} (tol 1e-10); linear-field EL "
                       f"{lin_el:.2e}; curved-solution EL orders {o1:.2f}, {o2:.2f} (2.0 +/- 0.3)")


def test_criterion_8_harmonic_gatekeeping():
    params = bb.ModelParams(lambda2=1.0, lambda1=1.0)
    saddle = parse_h2("poly:0,0,1")  # u^2 - v^2
    resid_ok = bb.check_harmonic(saddle)
    V = bb.build_full_model_potential(lambda u, v: np.zeros_like(np.asarray(u, dtype=float)),
                                      saddle, params)  # accepted
    bad = parse_h2("monomial:2,0")  # u^2
    with pytest.raises(bb.NonHarmonicError) as err:
        bb.build_full_model_potential(lambda u, v: np.zeros_like(np.asarray(u, dtype=float)),
                                      bad, params)
    resid_bad = err.value.residual
    ok = resid_ok < 1e-10 and abs(resid_bad - 2.0) <= 1e-8 and V is not None
    report_line(8, ok, f"u^2-v^2 accepted (residual {resid_ok:.2e} < 1e-10); "
                       f"u^2 rejected with residual {resid_bad} (2 +/- 1e-8)")


def test_criterion_9_subset_property():
    params = bb.ModelParams(lambda2=1.0, lambda1=1.0)
    cases = []

    grid = bb.Grid2D.centered(513, 513, 1.0, 1.0)
    cases.append(("antiholomorphic",
                  bb.solve_full_bps(HarmonicFunction.constant(), params,
                                    antiholo_field(grid, with_gradient=False))))

    g49 = bb.Grid2D.centered(49, 49, 1.0, 1.0)
    rng = np.random.RandomState(77)
    X, Y = g49.mesh()
    u0 = X.copy(); v0 = -Y.copy()
    u0[1:-1, 1:-1] += 1e-2 * rng.standard_normal((47, 47))
    v0[1:-1, 1:-1] += 1e-2 * rng.standard_normal((47, 47))
    cases.append(("noisy init",
                  bb.solve_full_bps(HarmonicFunction.constant(), params,
                                    bb.ComplexField2D.from_arrays(g49, u0, v0), tol=1e-10)))

    g65 = bb.Grid2D.centered(65, 65, 1.0, 1.0)
    Xm, Ym = g65.mesh()
    m = 1.0 / ((Xm - 1j * Ym) - 3.0)
    cases.append(("Moebius",
                  bb.solve_full_bps(HarmonicFunction.constant(), params,
                                    bb.ComplexField2D.from_arrays(g65, m.real, m.imag),
                                    tol=1e-4)))

    from scipy.integrate import solve_ivp
    c = 0.15
    sol1d = solve_ivp(lambda t, y: [-c * (1 + y[0] ** 2) ** 2], (-1.0, 1.0), [0.0],
                      rtol=1e-12, atol=1e-14, dense_output=True)
    uex = np.broadcast_to(sol1d.sol(g49.x)[0], g49.shape).copy()
    cases.append(("harmonic c*u",
                  bb.solve_full_bps(HarmonicFunction.linear(c, 0.0), params,
                                    bb.ComplexField2D.from_arrays(g49, uex, np.zeros(g49.shape)),
                                    tol=1e-5)))

    results = []
    ok = True
    for name, sol in cases:
        rep = bb.subset_check(sol, params)
        results.append(f"{name}: converged={sol.converged} subset={rep.passed}")
        ok = ok and sol.converged and rep.passed is True
    report_line(9, ok, "; ".join(results))


def test_criterion_10_reproducibility(tmp_path):
    cfg = {"model": "restricted",
           "potential": {"name": "bps_test", "params": [1.0, 1.0], "sigma": -1},
           "params": {"beta": 1.0},
           "grid": {"nx": 49, "ny": 49, "hx": 0.108, "hy": 0.108},
           "solver": {"n": 1, "f0": 1.0, "rmax": 3.0}}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))

    blobs = []
    for run, threads in (("a", 1), ("b", 4)):
        prefix = str(tmp_path / run)
        assert main(["--quiet", "--config", str(cfg_path), "--out", prefix,
                     "--threads", str(threads), "solve-restricted"]) == 0
        assert main(["--quiet", "--config", str(cfg_path), "--out", prefix,
                     "--threads", str(threads), "sweep",
                     "--param", "solver.f0", "--values", "0.5,1.0,2.0"]) == 0
        blobs.append({suffix: (tmp_path / f"{run}.{suffix}").read_bytes()
                      for suffix in ("profile.csv", "field.csv", "report.json", "sweep.csv")})
    identical = all(blobs[0][k] == blobs[1][k] for k in blobs[0])
    report_line(10, identical,
                "artifacts byte-identical across repeated runs with 1 and 4 threads")
