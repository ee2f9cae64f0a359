"""Acceptance gate: one test per release criterion, with a printed verdict.

Each test prints a single `[PASS]`/`[FAIL]` line with the measured numbers, so
`pytest -v -s tests/test_acceptance.py` doubles as the certification report.
Tolerances are pinned; do not relax them.
"""

import time

import numpy as np

from choquard import (
    ProblemParams,
    SolverConfig,
    assemble_kernel,
    dilation_scan,
    integrate,
    make_grid,
    riesz_convolve,
    run_campaign,
    solve_groundstate,
)
from choquard.asymptotics import decay_limit, fit_tail_power, nu_parameter
from choquard.cli import main as cli_main
from choquard.errors import RegimeError
from choquard.groundstate import pde_residual_norm, verify_groundstate
from choquard.linsolve import power_rhs_check
from choquard.riesz import farfield_deviation, farfield_envelope

from conftest import random_positive_profile


def verdict(name, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_criterion_1_physical_case_certification(phys_params):
    t0 = time.time()
    grid = make_grid(30.0, 3000, 3, "uniform")
    kernel = assemble_kernel(grid, phys_params)
    result = solve_groundstate(phys_params, grid, kernel)
    elapsed = time.time() - t0
    report = verify_groundstate(result, kernel, phys_params)
    nehari = report.nehari_residual
    poho = report.pohozaev_residual
    ident = report.integral_identity_residual
    ok = (
        result.converged
        and nehari <= 1e-8
        and poho <= 1e-3
        and ident <= 1e-3
        and elapsed <= 60.0
    )
    verdict(
        "criterion 1 (physical-case certification)",
        ok,
        f"converged={result.converged} nehari={nehari:.2e} pohozaev={poho:.2e} "
        f"M-3E={ident:.2e} runtime={elapsed:.1f}s",
    )


def test_criterion_2_scaling_identity_audit(small_grid, small_kernel):
    rng = np.random.default_rng(2024)
    p2 = ProblemParams(3, 2.0, 2.0)
    p_inv = ProblemParams(3, 2.0, 7.0 / 3.0)
    p_div = ProblemParams(3, 2.0, 2.5)
    worst_ray = 0.0
    worst_inv = 0.0
    divergence_seen = True
    for _ in range(50):
        u = random_positive_profile(small_grid, rng)
        worst_ray = max(worst_ray, dilation_scan(u, small_kernel, p2, "E-ray").relative_gap)
        scan_inv = dilation_scan(u, small_kernel, p_inv, "E0-mass-dilate")
        worst_inv = max(worst_inv, scan_inv.relative_gap)
        divergence_seen &= scan_inv.regime == "scale-invariant"
        scan_div = dilation_scan(u, small_kernel, p_div, "E0-mass-dilate")
        divergence_seen &= scan_div.regime == "divergent"
        try:
            dilation_scan(u, small_kernel, p_div, "E0-mass-dilate", "min")
            divergence_seen = False
        except RegimeError:
            pass
    ok = worst_ray <= 1e-6 and worst_inv <= 1e-4 and divergence_seen
    verdict(
        "criterion 2 (scaling-identity audit, 50 profiles)",
        ok,
        f"max E-ray gap={worst_ray:.2e} max invariance gap={worst_inv:.2e} "
        f"divergence detected={divergence_seen}",
    )


def test_criterion_3_nonexistence_gate(tmp_path):
    codes = {}
    for label, p in [("p=5", "5"), ("p=5/3", repr(5.0 / 3.0))]:
        codes[label] = cli_main(
            ["--N", "3", "--alpha", "2", "--p", p, "--out", str(tmp_path), "solve"]
        )
    ok = all(code == 2 for code in codes.values())
    verdict("criterion 3 (nonexistence gate)", ok, f"exit codes: {codes}")


def test_criterion_4_riesz_kernel_oracle(small_grid, small_kernel):
    rng = np.random.default_rng(42)
    r = small_grid.nodes
    fine = np.linspace(r[0] / 16.0, small_grid.r_max, 16 * small_grid.n)

    def oracle(g):
        inner = np.concatenate(([0.0], np.cumsum((fine[1:] - fine[:-1]) * 0.5 * (
            fine[1:] ** 2 * g(fine[1:]) + fine[:-1] ** 2 * g(fine[:-1])))))
        outer = np.concatenate(([0.0], np.cumsum((fine[1:] - fine[:-1]) * 0.5 * (
            fine[1:] * g(fine[1:]) + fine[:-1] * g(fine[:-1])))))
        return np.interp(r, fine, inner) / r + (outer[-1] - np.interp(r, fine, outer))

    worst = 0.0
    w = small_grid.weights
    for _ in range(20):
        amps = rng.uniform(0.2, 2.0, 3)
        widths = rng.uniform(0.5, 2.5, 3)

        def g(s):
            return sum(a * np.exp(-((s / ww) ** 2)) for a, ww in zip(amps, widths))

        exact = oracle(g)
        got = small_kernel.apply(g(r))
        worst = max(worst, float(np.sqrt(
            np.dot(w, (got - exact) ** 2) / np.dot(w, exact**2)
        )))

    # ball potential: (3 - r^2)/6 inside, 1/(3r) outside
    from choquard.grid import RadialGrid, _cell_measures

    n, h = 2400, 12.0 / 2400
    nodes = h * np.arange(1, n + 1)
    bgrid = RadialGrid(
        nodes=nodes, weights=_cell_measures(nodes, 3), r_max=12.0, dim=3, spacing="uniform"
    )
    bkernel = assemble_kernel(bgrid, ProblemParams(3, 2.0, 2.0))
    frac = np.clip((1.0 - (nodes - h / 2.0)) / h, 0.0, 1.0)
    pot = bkernel.apply(frac)
    exact = np.where(nodes <= 1.0, (3.0 - nodes**2) / 6.0, 1.0 / (3.0 * nodes))
    away = np.abs(nodes - 1.0) > 0.2
    ball_err = float(np.max(np.abs(pot - exact)[away] / exact[away]))

    ok = worst <= 1e-4 and ball_err <= 1e-4
    verdict(
        "criterion 4 (Riesz kernel oracle, 20 profiles)",
        ok,
        f"max weighted-L2 error={worst:.2e} ball-potential error={ball_err:.2e}",
    )


def test_criterion_5_farfield_law(acc_result, acc_kernel, phys_params, acc_grid):
    conv = riesz_convolve(acc_kernel, acc_result.profile, phys_params.p)
    total = integrate(acc_grid, acc_result.profile, phys_params.p)
    r = acc_grid.nodes
    point_mass = phys_params.riesz_constant * total / r
    window = (r >= 15.0) & (r <= 24.0)
    ratio = conv.values[window] / point_mass[window]
    in_band = float(ratio.min()) >= 0.99 and float(ratio.max()) <= 1.01

    dev = farfield_deviation(conv, total, phys_params).values
    env = farfield_envelope(r, phys_params)
    fitted = float(np.max((dev / env)[window]))
    tail = r >= 15.0
    rate_ok = bool(np.all(dev[tail] <= fitted * env[tail] * (1.0 + 1e-12)))
    ok = in_band and rate_ok
    verdict(
        "criterion 5 (far-field law)",
        ok,
        f"ratio range=[{ratio.min():.6f}, {ratio.max():.6f}] "
        f"fitted envelope constant={fitted:.2e} rate holds={rate_ok}",
    )


def test_criterion_6_decay_regimes(
    acc_result, acc_grid, phys_params, super_result, super_params, sub_result, sub_params
):
    # p = 2.5: exponential regime plateau
    rep_super = decay_limit(super_result.profile, super_params)
    drift_ok = rep_super.drift <= 0.05

    # p = 2: log-derivative of u r^((N-1)/2) against sqrt(1 - nu/r)
    r = acc_grid.nodes
    u = acc_result.profile.values
    nu = nu_parameter(phys_params, integrate(acc_grid, acc_result.profile, 2.0))
    window = (r >= 15.0) & (r <= 24.0)
    ld = -np.gradient(np.log(u[:-1] * r[:-1]), r[:-1])[window[:-1]]
    pred = np.sqrt(1.0 - nu / r[:-1][window[:-1]])
    ld_err = float(np.max(np.abs(ld - pred) / pred))
    ld_ok = ld_err <= 0.02

    E = acc_result.values.energy
    predicted_exp = -(1.0 - 3.0 * E / (8.0 * np.pi))
    fitted_exp = -fit_tail_power(acc_result.profile, window=(0.6, 0.9))
    exp_err = abs(fitted_exp - predicted_exp) / abs(predicted_exp)
    exp_ok = exp_err <= 0.05

    # p = 1.8: polynomial plateau against the mass prediction
    rep_sub = decay_limit(sub_result.profile, sub_params)
    sub_gap = abs(rep_sub.plateau - rep_sub.predicted_limit) / rep_sub.predicted_limit
    sub_ok = sub_result.profile.grid.r_max >= 200.0 and sub_gap <= 0.10

    ok = drift_ok and ld_ok and exp_ok and sub_ok
    verdict(
        "criterion 6 (decay regimes)",
        ok,
        f"p=2.5 drift={rep_super.drift:.2%} | p=2 log-deriv err={ld_err:.2%} "
        f"exponent fitted={fitted_exp:.4f} predicted={predicted_exp:.4f} "
        f"({exp_err:.2%}) | p=1.8 plateau gap={sub_gap:.2%}",
    )


def test_criterion_7_linear_power_law():
    devs = {}
    for lam, beta in [(1.0, 2.0), (4.0, 3.0)]:
        devs[(lam, beta)] = power_rhs_check(lam, beta, make_grid(40.0, 2000, 3)).deviation
    doubled = power_rhs_check(1.0, 2.0, make_grid(80.0, 4000, 3)).deviation
    plateau_ok = all(d <= 0.02 for d in devs.values())
    halving_ok = doubled <= devs[(1.0, 2.0)] / 2.0
    ok = plateau_ok and halving_ok
    verdict(
        "criterion 7 (linear power-law lemma)",
        ok,
        f"deviations={{(1,2): {devs[(1.0, 2.0)]:.2e}, (4,3): {devs[(4.0, 3.0)]:.2e}}} "
        f"doubled r_max -> {doubled:.2e}",
    )


def test_criterion_8_polarization_campaign():
    out = run_campaign(trials=500, seed=0)
    ok = out["min_gain"] >= -1e-12 and not out["failures"]
    verdict(
        "criterion 8 (polarization campaign, 500 trials)",
        ok,
        f"min gain={out['min_gain']:.2e} equality cases={out['equality_count']} "
        f"unclassified={len(out['failures'])}",
    )


def test_criterion_9_solver_robustness(phys_params, acc_grid, acc_kernel, acc_result):
    alt = solve_groundstate(
        phys_params, acc_grid, acc_kernel, SolverConfig(init="exponential")
    )
    s_gap = abs(alt.values.s_quotient - acc_result.values.s_quotient) / (
        acc_result.values.s_quotient
    )
    init_ok = s_gap <= 1e-6

    residuals = {}
    for n in (750, 1500):
        grid = make_grid(30.0, n, 3, "uniform")
        kernel = assemble_kernel(grid, phys_params)
        result = solve_groundstate(phys_params, grid, kernel)
        residuals[n] = pde_residual_norm(result.profile, kernel, phys_params)
    residuals[3000] = pde_residual_norm(acc_result.profile, acc_kernel, phys_params)
    r1 = residuals[750] / residuals[1500]
    r2 = residuals[1500] / residuals[3000]
    refine_ok = r1 >= 3.0 and r2 >= 3.0
    ok = init_ok and refine_ok
    verdict(
        "criterion 9 (solver robustness)",
        ok,
        f"init S-gap={s_gap:.2e} residual ratios under doubling: "
        f"{r1:.2f}, {r2:.2f} (second order: 4)",
    )
