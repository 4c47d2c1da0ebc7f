r"""Fractional oscillator in a uniform field, and its dissipative variant.

The boundary-value problem

.. math::

    -qE - kx + m_\alpha\, {}_tD_b^\alpha\, {}^C_aD_t^\alpha x = 0, \qquad
    x(a) = e_0, \qquad {}_tI_b^{1-\alpha}\, {}^C_aD_t^\alpha x \big|_{t=b} = e_1

is recast as the fixed point :math:`x = F_0 + \omega^2\, {}_aI^\alpha\, {}_tI^\alpha x`
and solved by Neumann iteration on the grid. The iteration is only started
when the sufficient bound :math:`\rho = \omega^2 ((b-a)^\alpha/\Gamma(\alpha+1))^2`
does not exceed one.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .errors import DivergentForcing, DomainError, MaxIterExceeded, NonContractive
from .fracops import (
    FracOrder,
    Grid,
    SampledFunction,
    left_caputo,
    left_rl_derivative,
    left_rl_integral,
    right_caputo,
    right_rl_derivative,
    right_rl_integral,
    right_rl_integral_frac,
)

_QUAD_POINTS = 24


@dataclass(frozen=True)
class OscillatorParams:
    m_alpha: float
    k: float
    charge: float
    field_E: float
    order: FracOrder
    grid: Grid
    e0: float = 0.0
    e1: float = 0.0

    def __post_init__(self):
        if not isinstance(self.order, FracOrder):
            object.__setattr__(self, "order", FracOrder(self.order))
        if not self.m_alpha > 0:
            raise ValueError(f"m_alpha must be positive, got {self.m_alpha}")
        if self.k < 0:
            raise ValueError(f"k must be non-negative, got {self.k}")

    @property
    def alpha(self) -> float:
        return self.order.alpha

    @property
    def omega2(self) -> float:
        return self.k / self.m_alpha

    @property
    def gamma_f(self) -> float:
        return self.charge * self.field_E / self.m_alpha

    @property
    def contraction_estimate(self) -> float:
        width = self.grid.b - self.grid.a
        return self.omega2 * (width**self.alpha / math.gamma(self.alpha + 1.0)) ** 2


@dataclass(frozen=True)
class DissipativeParams:
    """Oscillator with the damping force ``-gamma`` times a right Caputo derivative.

    ``damping_order`` is the full order ``beta``; the Lagrangian uses ``beta/2``.
    """

    base: OscillatorParams
    damping_gamma: float
    damping_order: FracOrder

    def __post_init__(self):
        if not isinstance(self.damping_order, FracOrder):
            object.__setattr__(self, "damping_order", FracOrder(self.damping_order))
        if self.damping_order.classical:
            raise ValueError("damping order must lie strictly inside (0, 1)")
        if not self.damping_gamma > 0:
            raise ValueError(f"damping_gamma must be positive, got {self.damping_gamma}")

    @property
    def half_order(self) -> float:
        return self.damping_order.alpha / 2

    @property
    def damping_factor(self) -> complex:
        """``i gamma / (-1)**(beta/2)`` with ``(-1)**s = exp(i pi s)``."""
        return 1j * self.damping_gamma * cmath.exp(-1j * math.pi * self.half_order)


@dataclass
class SolveReport:
    solution: SampledFunction
    iterations: int
    contraction_estimate: float
    residual_sup: float
    residual_scale: float
    transversality_error: float
    increments: list = field(default_factory=list)
    converged: bool = True

    def as_record(self) -> dict:
        """Flat key-value summary, without the trajectory."""
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "contraction_estimate": self.contraction_estimate,
            "residual_sup": self.residual_sup,
            "residual_scale": self.residual_scale,
            "transversality_error": self.transversality_error,
        }


# -- forcing term ------------------------------------------------------------


@lru_cache(maxsize=32)
def _jacobi_unit(expo: float):
    """Nodes/weights for int_0^1 u**expo g(u) du."""
    x, w = roots_jacobi(_QUAD_POINTS, 0.0, expo)
    return (x + 1) / 2, w / 2 ** (expo + 1)


@lru_cache(maxsize=1)
def _legendre_unit():
    x, w = roots_legendre(_QUAD_POINTS)
    return (x + 1) / 2, w / 2


def _abel_power(L: float, c: float, alpha: float, mu: float) -> float:
    r"""``int_0^L u**(alpha-1) (c + u)**mu du`` for ``L > 0``, ``c >= 0``.

    With ``s = t - u`` this is :math:`\int_a^t (t-s)^{\alpha-1}(b-s)^\mu ds`
    where ``L = t - a`` and ``c = b - t``. Near ``c = 0`` the factor
    ``(c + u)**mu`` is nearly singular at ``u = 0``; the interval is split
    geometrically from ``c`` so each piece sees its singularities at a
    distance comparable to its length.
    """
    if c == 0.0:
        total = alpha + mu
        return L**total / total if total > 0 else math.inf
    if c >= L:
        u, w = _jacobi_unit(alpha - 1.0)
        return L**alpha * float(np.dot(w, (c + L * u) ** mu))
    # [0, c] carries the u**(alpha-1) weight exactly
    u, w = _jacobi_unit(alpha - 1.0)
    total = c**alpha * float(np.dot(w, (c + c * u) ** mu))
    gu, gw = _legendre_unit()
    lo = c
    while lo < L:
        hi = min(2 * lo, L)
        s = lo + (hi - lo) * gu
        total += (hi - lo) * float(np.dot(gw, s ** (alpha - 1.0) * (c + s) ** mu))
        lo = hi
    return total


def forcing_term(p: OscillatorParams) -> SampledFunction:
    r"""The source :math:`F_0 = e_0 + {}_aI^\alpha[e_1 (b-s)^{\alpha-1}/\Gamma(\alpha) + \gamma (b-s)^\alpha/\Gamma(\alpha+1)]`.

    For ``alpha <= 1/2`` with ``e1 != 0`` the value at ``t = b`` diverges; it is
    set to a signed infinity and :class:`DivergentForcing` is warned.
    """
    grid, alpha = p.grid, p.alpha
    c_sing = p.e1 / math.gamma(alpha) ** 2
    c_smooth = p.gamma_f / (math.gamma(alpha + 1.0) * math.gamma(alpha))
    out = np.full(grid.n + 1, float(p.e0))
    t = grid.nodes
    for idx in range(1, grid.n + 1):
        L = t[idx] - grid.a
        c = 0.0 if idx == grid.n else grid.b - t[idx]
        val = 0.0
        if c_sing:
            val += c_sing * _abel_power(L, c, alpha, alpha - 1.0)
        if c_smooth:
            val += c_smooth * _abel_power(L, c, alpha, alpha)
        out[idx] += val
    if not np.isfinite(out[-1]):
        out[-1] = math.copysign(math.inf, p.e1)
        warnings.warn(
            f"forcing term diverges at t=b for alpha={alpha} <= 0.5 with e1 != 0",
            DivergentForcing,
            stacklevel=2,
        )
    return SampledFunction(grid, out)


# -- residuals ----------------------------------------------------------------


def _right_derivative(y: SampledFunction, alpha: float) -> SampledFunction:
    # at alpha = 1 both right derivatives reduce to -d/dt
    if alpha == 1.0:
        return right_caputo(y, 1.0)
    return right_rl_derivative(y, alpha)


def _caputo_of_solution(x: SampledFunction, p: OscillatorParams) -> SampledFunction:
    # solutions of the integral form start like e0 + c (t-a)**alpha
    return left_caputo(x, p.order, starting_exponents=(p.alpha,) if p.alpha < 1 else ())


def el_residual(x: SampledFunction, p: OscillatorParams) -> SampledFunction:
    """``-qE - k x + m_alpha * (right RL derivative of left Caputo derivative of x)``.

    The Caputo step carries a starting correction for the ``(t-a)**alpha``
    behaviour that solutions of the integral form have at ``t = a``.
    Endpoint values may be non-finite where the composition is singular.
    """
    inner = _caputo_of_solution(x, p)
    with np.errstate(invalid="ignore"):
        return -p.charge * p.field_E - p.k * x + p.m_alpha * _right_derivative(inner, p.alpha)


def _limit_at_right_end(g: SampledFunction, alpha: float) -> float:
    """Estimate ``lim_{t -> b-} g`` from a window 5%-20% of the interval away from ``b``.

    Model: ``c0 + c1 s**(1-alpha) + c2 s + c3 s**(2-alpha)`` with ``s = b - t``.
    Nodes closer to ``b`` are skipped: when ``e1 != 0`` the Caputo derivative
    is unbounded there and the L1 samples are unreliable.
    """
    grid = g.grid
    s_all = grid.b - grid.nodes
    width = grid.b - grid.a
    idx = np.where((s_all >= 0.05 * width) & (s_all <= 0.2 * width))[0]
    s = s_all[idx]
    A = np.column_stack([np.ones_like(s), s ** (1.0 - alpha), s, s ** (2.0 - alpha)])
    coef, *_ = np.linalg.lstsq(A, g.values[idx].real, rcond=None)
    return float(coef[0])


def transversality_check(x: SampledFunction, p: OscillatorParams) -> float:
    r"""``|(tI^{1-alpha} aCD^alpha x)(b) - e1|``.

    At ``alpha = 1`` this is ``|x'(b) - e1|``. For ``alpha < 1`` the discrete
    integral vanishes identically at ``t = b``, so the one-sided limit is
    extrapolated. With ``e1 != 0`` the estimate converges slowly in ``n``
    (about 1e-2 at ``n = 1024`` for ``alpha = 0.75``, worse for small alpha).
    """
    g = right_rl_integral_frac(_caputo_of_solution(x, p), p.order)
    if p.order.classical:
        return abs(float(g.values[-1]) - p.e1)
    return abs(_limit_at_right_end(g, p.alpha) - p.e1)


def _interior_sup(values: np.ndarray, grid: Grid) -> float:
    return float(np.max(np.abs(values[grid.interior()])))


# -- solver -------------------------------------------------------------------


def composite_operator(x: SampledFunction, p: OscillatorParams) -> SampledFunction:
    r""":math:`\omega^2\, {}_aI^\alpha\, {}_tI^\alpha x`."""
    return p.omega2 * left_rl_integral(right_rl_integral(x, p.order), p.order)


def solve_fo(p: OscillatorParams, tol: float = 1e-12, max_iter: int = 500) -> SolveReport:
    """Neumann iteration ``x <- F0 + omega^2 aI tI x`` starting from ``F0``.

    Raises :class:`NonContractive` when the contraction bound exceeds one and
    :class:`MaxIterExceeded` (carrying the partial report) at the iteration cap.
    A divergent forcing term raises :class:`DomainError`.
    """
    rho = p.contraction_estimate
    if rho > 1.0:
        raise NonContractive(
            f"contraction estimate {rho:.6g} exceeds 1; the Neumann series may diverge",
            rho,
        )
    F0 = forcing_term(p)
    if not np.all(np.isfinite(F0.values)):
        raise DomainError("forcing term is unbounded at t=b; the solution cannot be sampled")

    x = F0
    increments = []
    converged = False
    for _ in range(max_iter):
        x_next = F0 + composite_operator(x, p)
        increments.append(float(np.max(np.abs(x_next.values - x.values))))
        x = x_next
        if increments[-1] <= tol:
            converged = True
            break

    residual = el_residual(x, p)
    scale = p.m_alpha * _interior_sup(
        _right_derivative(_caputo_of_solution(x, p), p.alpha).values, p.grid
    )
    report = SolveReport(
        solution=x,
        iterations=len(increments),
        contraction_estimate=rho,
        residual_sup=_interior_sup(residual.values, p.grid),
        residual_scale=scale,
        transversality_error=transversality_check(x, p),
        increments=increments,
        converged=converged,
    )
    if not converged:
        raise MaxIterExceeded(f"no convergence to {tol:g} in {max_iter} iterations", report)
    return report


def fixed_point_defect(x: SampledFunction, p: OscillatorParams) -> float:
    """``sup |x - F0 - omega^2 aI tI x|``."""
    return float(np.max(np.abs((x - forcing_term(p) - composite_operator(x, p)).values)))


# -- dissipative oscillator ---------------------------------------------------


def damping_term(x: SampledFunction, d: DissipativeParams) -> SampledFunction:
    """``i gamma/(-1)^(beta/2)`` times left RL of right Caputo of ``x``, order ``beta/2``."""
    inner = right_caputo(x, d.half_order)
    with np.errstate(invalid="ignore"):
        return d.damping_factor * left_rl_derivative(inner, d.half_order)


def dissipative_el_residual(x: SampledFunction, d: DissipativeParams) -> SampledFunction:
    """Left side of the dissipative Euler-Lagrange equation (complex valued)."""
    p = d.base
    inner = left_caputo(x, p.order)
    with np.errstate(invalid="ignore"):
        conservative = -p.k * x + p.m_alpha * _right_derivative(inner, p.alpha)
        out = conservative - damping_term(x, d)
    return SampledFunction(x.grid, out.values.astype(complex))


def dissipative_momenta(x: SampledFunction, d: DissipativeParams) -> tuple[SampledFunction, SampledFunction]:
    """``(m_alpha aCD^alpha x, -i gamma/(-1)^(beta/2) tCD^(beta/2) x)``."""
    p_alpha = d.base.m_alpha * left_caputo(x, d.base.order)
    p_half = -d.damping_factor * right_caputo(x, d.half_order)
    return p_alpha, p_half
