r"""Residual checks for the fractional Hamilton-Jacobi equation of the oscillator.

Nothing here solves a PDE. The separated action

.. math::

    S(x, \bar x_\alpha, t) = \bar x_\alpha \sqrt{2m_\alpha(\beta - V(x))} - \beta t,
    \qquad V(x) = \tfrac12 kx^2 + qEx

and a wave ansatz :math:`\psi = A e^{iS/\hbar}` are handed in, and the
relations they should satisfy are evaluated pointwise. ``x`` and
:math:`\bar x_\alpha` are independent coordinates of ``S``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError

Sample = tuple  # (x, xbar_alpha, t)

FD_RELATIVE_STEP = 1e-5
DEFAULT_DOMAIN_SCALE = 10.0


@dataclass(frozen=True)
class ActionField:
    """An action ``S(x, xbar, t)`` with analytic partials in ``xbar`` and ``t``."""

    S: Callable[[float, float, float], float]
    dS_dxbar: Callable[[float, float, float], float]
    dS_dt: Callable[[float, float, float], float]
    m_alpha: float
    k: float
    charge: float
    field_E: float
    beta_sep: float

    def potential(self, x: float) -> float:
        return 0.5 * self.k * x * x + self.charge * self.field_E * x

    def radicand(self, x: float) -> float:
        return 2.0 * self.m_alpha * (self.beta_sep - self.potential(x))

    def admissible(self, x: float, strict: bool = False) -> bool:
        r = self.radicand(x)
        return r > 0 if strict else r >= 0

    def x_interval(self) -> tuple[float, float] | None:
        """Closed ``x`` interval where the radicand is non-negative, or None if empty.

        For ``k = 0`` and ``qE = 0`` the interval is the whole line (returned as
        infinite bounds) when ``beta_sep >= 0``.
        """
        qE = self.charge * self.field_E
        if self.k > 0:
            disc = qE * qE + 2.0 * self.k * self.beta_sep
            if disc < 0:
                return None
            r = math.sqrt(disc)
            return ((-qE - r) / self.k, (-qE + r) / self.k)
        if qE == 0:
            return (-math.inf, math.inf) if self.beta_sep >= 0 else None
        edge = self.beta_sep / qE
        return (-math.inf, edge) if qE > 0 else (edge, math.inf)


def s_fo(m_alpha: float, k: float, charge: float, field_E: float, beta_sep: float) -> ActionField:
    """Separated action of the oscillator in a uniform field."""
    if not m_alpha > 0:
        raise ValueError(f"m_alpha must be positive, got {m_alpha}")

    def root(x):
        r = 2.0 * m_alpha * (beta_sep - (0.5 * k * x * x + charge * field_E * x))
        if r < 0:
            raise DomainError(f"x={x!r} is outside the real-root domain")
        return math.sqrt(r)

    return ActionField(
        S=lambda x, xb, t: xb * root(x) - beta_sep * t,
        dS_dxbar=lambda x, xb, t: root(x),
        dS_dt=lambda x, xb, t: -beta_sep,
        m_alpha=m_alpha, k=k, charge=charge, field_E=field_E, beta_sep=beta_sep,
    )


def zero_action(m_alpha: float = 1.0, k: float = 0.0, charge: float = 0.0, field_E: float = 0.0,
                beta_sep: float = 0.0) -> ActionField:
    """``S = 0``, a trivial solution when the potential vanishes."""
    return ActionField(
        S=lambda x, xb, t: 0.0,
        dS_dxbar=lambda x, xb, t: 0.0,
        dS_dt=lambda x, xb, t: 0.0,
        m_alpha=m_alpha, k=k, charge=charge, field_E=field_E, beta_sep=beta_sep,
    )


def _check_domain(S: ActionField, x: float, strict: bool = False):
    if not S.admissible(x, strict=strict):
        where = "interior of the" if strict else "the"
        raise DomainError(f"x={x!r} is outside {where} real-root domain")


def hj_residual(S: ActionField, sample: Sample) -> float:
    """``dS/dt + (dS/dxbar)**2/(2m) + V(x)``."""
    x, xb, t = sample
    _check_domain(S, x)
    sx = S.dS_dxbar(x, xb, t)
    return S.dS_dt(x, xb, t) + sx * sx / (2.0 * S.m_alpha) + S.potential(x)


def new_coordinate_Q(S: ActionField, sample: Sample) -> float:
    """``dS/dbeta = m xbar / sqrt(2m(beta - V)) - t``."""
    x, xb, t = sample
    _check_domain(S, x, strict=True)
    return S.m_alpha * xb / math.sqrt(S.radicand(x)) - t


def xbar_from_Q(S: ActionField, x: float, Q: float, t: float) -> float:
    """Invert :func:`new_coordinate_Q` for ``xbar`` at fixed ``x``, ``Q`` and ``t``."""
    _check_domain(S, x, strict=True)
    return (Q + t) * math.sqrt(S.radicand(x)) / S.m_alpha


@dataclass(frozen=True)
class WaveAnsatz:
    """``psi = A exp(i S / hbar)``. ``hbar = 0`` is accepted for the classical reduction."""

    amplitude: Callable[[float, float, float], float]
    phase: ActionField
    hbar: float

    def __post_init__(self):
        if self.hbar < 0:
            raise ValueError(f"hbar must be non-negative, got {self.hbar}")

    def psi(self, x: float, xb: float, t: float) -> complex:
        if self.hbar == 0:
            raise DomainError("psi is undefined for hbar = 0")
        A = self.amplitude(x, xb, t)
        return A * np.exp(1j * self.phase.S(x, xb, t) / self.hbar)


def _central(f, x0: float, h: float) -> float:
    return (f(x0 + h) - f(x0 - h)) / (2.0 * h)


def _step(scale: float) -> float:
    return FD_RELATIVE_STEP * scale


def madelung_split_residuals(w: WaveAnsatz, sample: Sample,
                             scale: float = DEFAULT_DOMAIN_SCALE) -> tuple[float, float]:
    """Real and imaginary relations obtained by substituting the ansatz.

    ``real = S_xbar**2/(2m) + S_t + V - hbar**2/(2m) * A_xbar**2`` and
    ``imag = A_t``. ``S`` partials are analytic; ``A`` partials use central
    differences with step ``1e-5 * scale``.
    """
    x, xb, t = sample
    S = w.phase
    h = _step(scale)
    A = w.amplitude
    A_xb = _central(lambda u: A(x, u, t), xb, h)
    A_t = _central(lambda u: A(x, xb, u), t, h)
    sx = S.dS_dxbar(x, xb, t)
    real = sx * sx / (2.0 * S.m_alpha) + S.dS_dt(x, xb, t) + S.potential(x)
    real -= w.hbar**2 / (2.0 * S.m_alpha) * A_xb**2
    return float(real), float(A_t)


def wave_equation_residual(w: WaveAnsatz, sample: Sample, scale: float = DEFAULT_DOMAIN_SCALE,
                           return_scale: bool = False):
    """``[(-i hbar d/dxbar)**2/(2m) + V] psi - i hbar dpsi/dt`` by central differences.

    With ``return_scale`` the sum of the magnitudes of the three terms is also
    returned, which is the natural yardstick for the residual.
    """
    x, xb, t = sample
    h = _step(scale)
    m = w.phase.m_alpha
    psi0 = w.psi(x, xb, t)
    psi_xx = (w.psi(x, xb + h, t) - 2.0 * psi0 + w.psi(x, xb - h, t)) / (h * h)
    psi_t = (w.psi(x, xb, t + h) - w.psi(x, xb, t - h)) / (2.0 * h)
    kinetic = -(w.hbar**2) / (2.0 * m) * psi_xx
    potential = w.phase.potential(x) * psi0
    temporal = 1j * w.hbar * psi_t
    res = complex(kinetic + potential - temporal)
    if return_scale:
        return res, float(abs(kinetic) + abs(potential) + abs(temporal))
    return res


def sample_admissible(S: ActionField, rng: np.random.Generator, count: int,
                      scale: float = DEFAULT_DOMAIN_SCALE, max_attempts: int = 100) -> np.ndarray:
    """Draw ``count`` points ``(x, xbar, t)`` inside the real-root domain.

    ``x`` is drawn from ``[-scale, scale]`` and kept only if it lies in the
    strict interior, ``xbar`` from ``[-scale, scale]`` and ``t`` from
    ``[0, scale]``. Each point gets ``max_attempts`` tries before DomainError.
    """
    out = np.empty((count, 3))
    for i in range(count):
        for _ in range(max_attempts):
            x = rng.uniform(-scale, scale)
            if S.admissible(x, strict=True):
                break
        else:
            raise DomainError(f"no admissible x found in {max_attempts} attempts")
        out[i] = (x, rng.uniform(-scale, scale), rng.uniform(0.0, scale))
    return out
