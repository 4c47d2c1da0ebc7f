"""Deterministic acceptance checks behind ``fracmech selftest``.

Each ``check_*`` function returns a :class:`CheckResult` holding a pass flag
and the measured numbers, so the same runs feed the CLI and the test suite.
Nothing here reads the clock except :func:`check_classical_limit`, whose
runtime is reported separately and kept out of the written outputs.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import fracops as fo
from . import hamjacobi as hj
from . import mechanics as mech
from .errors import NonContractive
from .oscillator import OscillatorParams, fixed_point_defect, solve_fo
from .symexpr import PhaseVar, var

ALPHAS = (0.3, 0.5, 0.8)
EXPONENTS = (1.0, 2.0, 2.5)
N_FINE = 1024
EXACT_TOL = 1e-12
QUAD_TOL = 1e-3


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    metrics: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.criterion}. {self.name}"


def relative_interior_error(num: np.ndarray, ref: np.ndarray, grid: fo.Grid,
                            band: float = 0.05) -> float:
    """``sup |num - ref| / sup |ref|`` over nodes away from both ends."""
    mask = grid.interior(band)
    scale = float(np.max(np.abs(ref[mask])))
    err = float(np.max(np.abs(num[mask] - ref[mask])))
    return err / scale if scale else err


def _sup(v: np.ndarray) -> float:
    return float(np.max(np.abs(v)))


# -- 1: operator identities ---------------------------------------------------

_OPERATORS = {
    "left_int": fo.left_rl_integral,
    "right_int": fo.right_rl_integral,
    "left_caputo": fo.left_caputo,
    "right_caputo": fo.right_caputo,
    "left_rl_d": fo.left_rl_derivative,
    "right_rl_d": fo.right_rl_derivative,
}


def _linearity_error(rng: np.random.Generator, grid: fo.Grid, alpha: float) -> float:
    f = fo.SampledFunction(grid, rng.standard_normal(grid.n + 1))
    g = fo.SampledFunction(grid, rng.standard_normal(grid.n + 1))
    c1, c2 = rng.standard_normal(2)
    worst = 0.0
    for op in _OPERATORS.values():
        lhs = op(c1 * f + c2 * g, alpha).values
        with np.errstate(invalid="ignore"):
            rhs = (c1 * op(f, alpha) + c2 * op(g, alpha)).values
        ok = np.isfinite(lhs) & np.isfinite(rhs)
        worst = max(worst, _sup(lhs[ok] - rhs[ok]) / max(_sup(rhs[ok]), 1.0))
    return worst


def _power_rule_error(grid: fo.Grid, alpha: float, beta: float) -> float:
    worst = 0.0
    for side, expr in (
        ("left", fo.PowerExpansion(left_terms=((1.0, beta),))),
        ("right", fo.PowerExpansion(right_terms=((1.0, beta),))),
    ):
        f = fo.evaluate(expr, grid)
        for kind in (f"{side}_int", f"{side}_rl_d"):
            num = _OPERATORS[kind](f, alpha).values
            ref = fo.evaluate(fo.power_oracle(expr, kind, alpha), grid).values
            worst = max(worst, relative_interior_error(num, ref, grid))
    return worst


def _composition_error(grid: fo.Grid, alpha: float) -> float:
    t = grid.nodes
    s = (t - grid.a) / (grid.b - grid.a)
    x = fo.SampledFunction(grid, 1.0 + 2.0 * s - 3.0 * s**2 + s**3)
    left = fo.left_rl_integral(fo.left_caputo(x, alpha), alpha).values
    right = fo.right_rl_integral(fo.right_caputo(x, alpha), alpha).values
    err_left = relative_interior_error(left, x.values - x.values[0], grid)
    err_right = relative_interior_error(right, x.values - x.values[-1], grid)
    return max(err_left, err_right)


def _by_parts_error(grid: fo.Grid, alpha: float) -> float:
    t = grid.nodes
    u, w = t - grid.a, grid.b - t
    f = fo.SampledFunction(grid, u * w)
    g = fo.SampledFunction(grid, u**2 * w)
    lhs = np.trapezoid(fo.left_caputo(f, alpha).values * g.values, t)
    rhs = np.trapezoid(f.values * fo.right_caputo(g, alpha).values, t)
    return float(abs(lhs - rhs) / max(abs(lhs), abs(rhs)))


def check_operator_identities(seed: int = 42, n: int = N_FINE) -> CheckResult:
    grid = fo.Grid(0.0, 1.0, n)
    rng = np.random.default_rng(seed)
    const = fo.SampledFunction(grid, np.full(n + 1, 2.75))
    m = {"linearity": 0.0, "caputo_constant": 0.0, "power_rules": 0.0,
         "composition": 0.0, "by_parts": 0.0, "mirror": 0.0}
    for alpha in ALPHAS:
        m["linearity"] = max(m["linearity"], _linearity_error(rng, grid, alpha))
        m["caputo_constant"] = max(
            m["caputo_constant"],
            _sup(fo.left_caputo(const, alpha).values),
            _sup(fo.right_caputo(const, alpha).values),
        )
        for beta in EXPONENTS:
            m["power_rules"] = max(m["power_rules"], _power_rule_error(grid, alpha, beta))
        m["composition"] = max(m["composition"], _composition_error(grid, alpha))
        m["by_parts"] = max(m["by_parts"], _by_parts_error(grid, alpha))
        f = fo.SampledFunction(grid, rng.standard_normal(n + 1))
        for left, right in (("left_int", "right_int"), ("left_caputo", "right_caputo")):
            a = _OPERATORS[right](f, alpha).values
            b = _OPERATORS[left](f.reversed(), alpha).values[::-1]
            m["mirror"] = max(m["mirror"], _sup(a - b))
    passed = (
        m["linearity"] <= EXACT_TOL
        and m["caputo_constant"] <= EXACT_TOL
        and m["mirror"] == 0.0
        and m["power_rules"] <= QUAD_TOL
        and m["composition"] <= QUAD_TOL
        and m["by_parts"] <= QUAD_TOL
    )
    return CheckResult(1, "operator identities", passed, m)


# -- 2, 3: bracket algebra ----------------------------------------------------


def check_bracket_axioms(seed: int = 42, trials: int = 100) -> CheckResult:
    res = mech.check_bracket_axioms(seed, trials)
    return CheckResult(2, "bracket axioms", all(res.values()), dict(res))


def check_hamilton_equations() -> CheckResult:
    m, k, charge, E = "3/2", "2", "1/3", "5"
    H = mech.fo_hamiltonian(m, k, charge, E)
    x, pa = var(PhaseVar.Q), var(PhaseVar.P_ALPHA)
    mm, kk, qE = mech.exact(m), mech.exact(k), mech.exact(charge) * mech.exact(E)
    dx_ok = mech.fp_bracket(x, H) == pa * (1 / mm)
    dp_ok = mech.fp_bracket(pa, H) == -(x * kk) - qE
    # the Legendre transform is expected to reproduce the printed Hamiltonian
    legendre_ok = mech.legendre_hamiltonian(mech.fo_lagrangian(m, k, charge, E)).H == H

    m2, k2, gamma, beta = "1", "3", "1/2", "1/2"
    H2 = mech.legendre_hamiltonian(mech.dissipative_lagrangian(m2, k2, gamma, beta)).H
    H2p = mech.dissipative_hamiltonian_as_printed(m2, k2, gamma, beta)
    target = -(x * mech.exact(k2))
    diss_ok = mech.fp_bracket(pa, H2) == target and mech.fp_bracket(pa, H2p) == target
    complex_ok = any(c.im != 0 for _, c in H2.items())
    metrics = {"x_bracket": dx_ok, "p_alpha_bracket": dp_ok, "legendre": legendre_ok,
               "dissipative": diss_ok, "complex_coefficients": complex_ok}
    return CheckResult(3, "Hamilton equations from brackets", all(metrics.values()), metrics)


# -- 4, 5, 6: oscillator ------------------------------------------------------


def classical_limit_params(n: int = N_FINE) -> OscillatorParams:
    return OscillatorParams(1.0, 1.0, 0.0, 0.0, 1.0, fo.Grid(0.0, 1.0, n), e0=1.0, e1=0.0)


def fractional_params(n: int = N_FINE) -> OscillatorParams:
    return OscillatorParams(1.0, 1.0, 1.0, 0.1, 0.8, fo.Grid(0.0, 0.5, n), e0=1.0, e1=0.0)


def noncontractive_params(n: int = 256) -> OscillatorParams:
    return OscillatorParams(1.0, 1.0, 0.0, 0.0, 0.8, fo.Grid(0.0, 1.0, n), e0=1.0, e1=0.0)


def check_classical_limit(n: int = N_FINE) -> tuple[CheckResult, float]:
    p = classical_limit_params(n)
    start = time.perf_counter()
    report = solve_fo(p)
    elapsed = time.perf_counter() - start
    t = p.grid.nodes
    exact = np.cos(t) + math.tan(1.0) * np.sin(t)
    err = _sup(report.solution.values - exact)
    metrics = {"sup_error": err, "iterations": report.iterations}
    return CheckResult(4, "oscillator classical limit", err <= 1e-3 and elapsed <= 5.0, metrics), elapsed


def check_fractional_solve(n: int = N_FINE, tol: float = 1e-12) -> CheckResult:
    p = fractional_params(n)
    report = solve_fo(p, tol=tol)
    rho = report.contraction_estimate
    inc = np.asarray(report.increments)
    # skip the last step, where rounding dominates the increment
    ratios = inc[1:-1] / inc[:-2] if len(inc) > 2 else np.array([0.0])
    metrics = {
        "contraction_estimate": rho,
        "iterations": report.iterations,
        "residual_ratio": report.residual_sup / report.residual_scale,
        "transversality_error": report.transversality_error,
        "fixed_point_defect": fixed_point_defect(report.solution, p),
        "max_increment_ratio": float(np.max(ratios)),
    }
    passed = (
        metrics["residual_ratio"] <= 5e-3
        and metrics["transversality_error"] <= 1e-2
        and metrics["fixed_point_defect"] <= 2 * tol
        and metrics["max_increment_ratio"] <= rho + 0.1
    )
    return CheckResult(5, "fractional solve self-consistency", passed, metrics)


def check_noncontractive() -> CheckResult:
    p = noncontractive_params()
    expected = 1.0 / math.gamma(1.8) ** 2
    try:
        solve_fo(p)
    except NonContractive as exc:
        rho = exc.contraction_estimate
        return CheckResult(6, "non-contractive refusal", abs(rho - expected) <= 1e-3,
                           {"contraction_estimate": rho, "expected": expected})
    return CheckResult(6, "non-contractive refusal", False, {"expected": expected})


# -- 7: Hamilton-Jacobi -------------------------------------------------------

HJ_DEFAULTS = {"m_alpha": 1.0, "k": 1.0, "charge": 1.0, "field_E": 0.5, "beta_sep": 20.0}


def check_hamilton_jacobi(seed: int = 42, samples: int = 100) -> CheckResult:
    S = hj.s_fo(**HJ_DEFAULTS)
    pts = hj.sample_admissible(S, np.random.default_rng(seed), samples)
    w = hj.WaveAnsatz(lambda x, xb, t: 1.0, S, 1.0)
    hj_max = madelung_max = wave_max = 0.0
    for p in pts:
        sample = tuple(p)
        hj_max = max(hj_max, abs(float(hj.hj_residual(S, sample))))
        madelung_max = max(madelung_max, *map(abs, hj.madelung_split_residuals(w, sample)))
        res, scale = hj.wave_equation_residual(w, sample, return_scale=True)
        wave_max = max(wave_max, abs(res) / scale)
    metrics = {"hj_residual": hj_max, "madelung": madelung_max, "wave_relative": wave_max}
    passed = hj_max <= EXACT_TOL and madelung_max <= EXACT_TOL and wave_max <= 1e-6
    return CheckResult(7, "Hamilton-Jacobi exactness", passed, metrics)


def run_all(seed: int = 42) -> list[CheckResult]:
    return [
        check_operator_identities(seed),
        check_bracket_axioms(seed),
        check_hamilton_equations(),
        check_classical_limit()[0],
        check_fractional_solve(),
        check_noncontractive(),
        check_hamilton_jacobi(seed),
    ]
