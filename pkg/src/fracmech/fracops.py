r"""Fractional integrals and derivatives of order :math:`0 < \alpha \le 1`.

All operators act on samples over a uniform grid of :math:`[a, b]`.

* Riemann-Liouville integrals use product-trapezoidal weights, which are
  exact for piecewise-linear data and :math:`O(h^2)` for smooth data.
* Caputo derivatives use the L1 scheme, :math:`O(h^{2-\alpha})`.
* Riemann-Liouville derivatives are assembled from the Caputo derivative
  plus the boundary term :math:`f(a)(t-a)^{-\alpha}/\Gamma(1-\alpha)`.

Every right-sided operator is its left-sided twin conjugated by the
reflection :math:`t \mapsto a + b - t`, so the two agree bit for bit.

:class:`PowerExpansion` and :func:`power_oracle` give closed forms on sums of
:math:`(t-a)^\beta` and :math:`(b-t)^\beta`, used as an exact reference.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Union

import numpy as np
from scipy.special import rgamma

from .errors import DomainError, MixedSideError

__all__ = [
    "FracOrder",
    "Grid",
    "SampledFunction",
    "PowerExpansion",
    "OpKind",
    "left_rl_integral",
    "right_rl_integral",
    "left_caputo",
    "right_caputo",
    "left_rl_derivative",
    "right_rl_derivative",
    "right_rl_integral_frac",
    "power_oracle",
    "evaluate",
    "parse_power_expansion",
]


@dataclass(frozen=True)
class FracOrder:
    """Order of a fractional operator; ``alpha == 1`` is the classical case."""

    alpha: float

    def __post_init__(self):
        alpha = float(self.alpha)
        if not (0.0 < alpha <= 1.0):
            raise DomainError(f"fractional order must lie in (0, 1], got {alpha}")
        object.__setattr__(self, "alpha", alpha)

    @property
    def classical(self) -> bool:
        return self.alpha == 1.0


OrderLike = Union[FracOrder, float]


def _order(order: OrderLike) -> FracOrder:
    return order if isinstance(order, FracOrder) else FracOrder(order)


@dataclass(frozen=True)
class Grid:
    """Uniform grid ``t_k = a + k (b - a) / n`` for ``k = 0..n``."""

    a: float
    b: float
    n: int

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError(f"grid needs b > a, got a={self.a}, b={self.b}")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"grid needs an integer n >= 2, got {self.n}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "n", int(self.n))

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n

    @property
    def nodes(self) -> np.ndarray:
        return self.a + self.h * np.arange(self.n + 1)

    def interior(self, band: float = 0.05) -> np.ndarray:
        """Boolean mask dropping the ``band`` fraction of nodes at each end."""
        k = np.arange(self.n + 1)
        cut = int(math.ceil(band * self.n))
        return (k >= cut) & (k <= self.n - cut)


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Real or complex samples of a function at every node of ``grid``."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if not np.iscomplexobj(values):
            values = values.astype(float)
        if values.shape != (self.grid.n + 1,):
            raise ValueError(
                f"expected {self.grid.n + 1} samples, got shape {values.shape}"
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, fn, grid: Grid) -> "SampledFunction":
        return cls(grid, fn(grid.nodes))

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes

    def reversed(self) -> "SampledFunction":
        """Samples of ``f(a + b - t)``."""
        return SampledFunction(self.grid, self.values[::-1].copy())

    def _coerce(self, other):
        if isinstance(other, SampledFunction):
            if other.grid != self.grid:
                raise ValueError("sampled functions live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return SampledFunction(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return SampledFunction(self.grid, self.values - self._coerce(other))

    def __rsub__(self, other):
        return SampledFunction(self.grid, self._coerce(other) - self.values)

    def __mul__(self, other):
        return SampledFunction(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return SampledFunction(self.grid, -self.values)


# -- quadrature weights ------------------------------------------------------


@lru_cache(maxsize=16)
def _rl_weights(n: int, alpha: float) -> np.ndarray:
    """Product-trapezoidal weights for the left RL integral, without ``h**alpha``.

    Row ``k`` integrates the piecewise-linear interpolant of the samples
    against ``(t_k - s)**(alpha - 1) / Gamma(alpha)`` over ``[t_0, t_k]``.
    """
    ap1 = alpha + 1.0
    m = np.arange(n + 1, dtype=float)
    # d[m] is the interior weight for a node m steps behind the target
    d = np.empty(n + 1)
    d[0] = 1.0
    d[1:] = (m[1:] + 1) ** ap1 - 2 * m[1:] ** ap1 + (m[1:] - 1) ** ap1

    k = np.arange(n + 1)[:, None]
    j = np.arange(n + 1)[None, :]
    lag = k - j
    W = np.where(lag >= 0, d[np.clip(lag, 0, n)], 0.0)
    kk = m[1:]
    W[1:, 0] = (kk - 1) ** ap1 - (kk - ap1) * kk**alpha
    W[0, :] = 0.0
    W /= math.gamma(alpha + 2.0)
    W.setflags(write=False)
    return W


@lru_cache(maxsize=16)
def _l1_weights(n: int, alpha: float) -> np.ndarray:
    """L1 weights acting on forward differences, without ``h**-alpha``.

    Shape ``(n + 1, n)``; row 0 is zero by convention.
    """
    m = np.arange(n, dtype=float)
    one_m = 1.0 - alpha
    b = (m + 1) ** one_m - m**one_m
    k = np.arange(n + 1)[:, None]
    j = np.arange(n)[None, :]
    lag = k - 1 - j
    B = np.where(lag >= 0, b[np.clip(lag, 0, n - 1)], 0.0)
    B /= math.gamma(2.0 - alpha)
    B.setflags(write=False)
    return B


def _left_integral_values(values: np.ndarray, grid: Grid, alpha: float) -> np.ndarray:
    return grid.h**alpha * (_rl_weights(grid.n, alpha) @ values)


@lru_cache(maxsize=16)
def _starting_weights(n: int, alpha: float, exponents: tuple) -> np.ndarray:
    """Correction weights on ``f_j - f_0``, ``j = 1..m``, without ``h**-alpha``.

    Chosen so that L1 plus the correction is exact for ``(t-a)**s`` at every
    node, for each ``s`` in ``exponents``.
    """
    m = len(exponents)
    k = np.arange(n + 1, dtype=float)
    V = np.array([[j**s for j in range(1, m + 1)] for s in exponents])
    R = np.empty((n + 1, m))
    for r, s in enumerate(exponents):
        exact = math.gamma(s + 1) * rgamma(s + 1 - alpha) * k ** (s - alpha)
        exact[0] = 0.0
        R[:, r] = exact - _l1_weights(n, alpha) @ np.diff(k**s)
    W = np.linalg.solve(V, R.T).T
    W[0, :] = 0.0
    W.setflags(write=False)
    return W


def _left_caputo_values(
    values: np.ndarray, grid: Grid, alpha: float, starting_exponents: tuple = ()
) -> np.ndarray:
    if alpha == 1.0:
        return np.gradient(values, grid.h, edge_order=2)
    out = _l1_weights(grid.n, alpha) @ np.diff(values)
    if starting_exponents:
        m = len(starting_exponents)
        W = _starting_weights(grid.n, alpha, tuple(float(s) for s in starting_exponents))
        out = out + W @ (values[1 : m + 1] - values[0])
    return grid.h ** (-alpha) * out


def _nonfinite_like(value) -> complex | float:
    if isinstance(value, complex) or np.iscomplexobj(value):
        return complex(np.inf, np.inf)
    return math.copysign(np.inf, value)


def _left_rl_derivative_values(values: np.ndarray, grid: Grid, alpha: float) -> np.ndarray:
    out = _left_caputo_values(values, grid, alpha)
    f_a = values[0]
    if f_a != 0:
        out = out.astype(np.result_type(out, f_a))
        tau = grid.nodes[1:] - grid.a
        out[1:] += f_a * tau ** (-alpha) / math.gamma(1.0 - alpha)
        out[0] = _nonfinite_like(f_a)
    return out


# -- public operators --------------------------------------------------------


def left_rl_integral(f: SampledFunction, order: OrderLike) -> SampledFunction:
    r"""Left Riemann-Liouville integral :math:`{}_aI_t^\alpha f` at every node.

    The value at ``t_0`` is zero; ``alpha = 1`` is the cumulative trapezoid rule.
    """
    alpha = _order(order).alpha
    return SampledFunction(f.grid, _left_integral_values(f.values, f.grid, alpha))


def right_rl_integral(f: SampledFunction, order: OrderLike) -> SampledFunction:
    r"""Right Riemann-Liouville integral :math:`{}_tI_b^\alpha f`; zero at ``t_n``."""
    return left_rl_integral(f.reversed(), order).reversed()


def left_caputo(
    f: SampledFunction, order: OrderLike, starting_exponents: tuple = ()
) -> SampledFunction:
    r"""Left Caputo derivative :math:`{}^C_aD_t^\alpha f` by the L1 scheme.

    Assumes ``f`` is smooth enough for the scheme to converge; this cannot be
    checked from samples. The value at ``t_0`` is zero for ``alpha < 1``.
    At ``alpha = 1`` a second-order finite-difference derivative is returned.

    ``starting_exponents`` adds starting corrections on the first few nodes
    that make the scheme exact for ``(t-a)**s``, ``s`` in the tuple. Use it
    when ``f`` is known to behave like those powers near ``a``; keep the tuple
    short (one or two entries), as the correction system grows ill-conditioned.
    Ignored at ``alpha = 1``.
    """
    alpha = _order(order).alpha
    return SampledFunction(
        f.grid, _left_caputo_values(f.values, f.grid, alpha, tuple(starting_exponents))
    )


def right_caputo(
    f: SampledFunction, order: OrderLike, starting_exponents: tuple = ()
) -> SampledFunction:
    r"""Right Caputo derivative :math:`{}^C_tD_b^\alpha f`; ``-f'`` at ``alpha = 1``.

    ``starting_exponents`` refer to powers of ``(b - t)``.
    """
    return left_caputo(f.reversed(), order, starting_exponents).reversed()


def left_rl_derivative(f: SampledFunction, order: OrderLike) -> SampledFunction:
    r"""Left Riemann-Liouville derivative for ``0 < alpha < 1``.

    Computed as the Caputo derivative plus ``f(a) (t-a)**-alpha / Gamma(1-alpha)``.
    When ``f(a) != 0`` the value at ``t_0`` is a signed infinity.
    """
    alpha = _order(order).alpha
    if alpha == 1.0:
        raise DomainError(
            "the Riemann-Liouville derivative is only provided for 0 < alpha < 1; "
            "use left_caputo for the classical derivative"
        )
    return SampledFunction(f.grid, _left_rl_derivative_values(f.values, f.grid, alpha))


def right_rl_derivative(f: SampledFunction, order: OrderLike) -> SampledFunction:
    r"""Right Riemann-Liouville derivative, the mirror of :func:`left_rl_derivative`."""
    return left_rl_derivative(f.reversed(), order).reversed()


def right_rl_integral_frac(f: SampledFunction, order: OrderLike) -> SampledFunction:
    r"""The operator :math:`{}_tD_b^{\alpha-1}`, i.e. :math:`{}_tI_b^{1-\alpha}`.

    ``order`` holds ``alpha`` itself, not ``1 - alpha``. At ``alpha = 1`` the
    integral has order zero and the samples are returned unchanged.
    """
    alpha = _order(order).alpha
    if alpha == 1.0:
        return SampledFunction(f.grid, f.values.copy())
    return right_rl_integral(f, 1.0 - alpha)


# -- analytic power-basis oracle --------------------------------------------


Term = tuple  # (coefficient, exponent)


def _canonical(terms: Iterable[Term]) -> tuple:
    merged: dict[float, complex] = {}
    for coef, expo in terms:
        expo = float(expo)
        if not expo > -1.0:
            raise DomainError(f"power exponent must exceed -1, got {expo}")
        merged[expo] = merged.get(expo, 0) + coef
    return tuple((c, e) for e, c in sorted(merged.items()) if c != 0)


@dataclass(frozen=True)
class PowerExpansion:
    r"""Finite sum :math:`\sum c_i (t-a)^{\beta_i} + \sum d_j (b-t)^{\gamma_j}`.

    Terms are stored canonically: exponents strictly increasing within each
    side and no zero coefficients.
    """

    left_terms: tuple = field(default=())
    right_terms: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "left_terms", _canonical(self.left_terms))
        object.__setattr__(self, "right_terms", _canonical(self.right_terms))

    @property
    def is_zero(self) -> bool:
        return not self.left_terms and not self.right_terms

    def __add__(self, other: "PowerExpansion") -> "PowerExpansion":
        return PowerExpansion(
            self.left_terms + other.left_terms, self.right_terms + other.right_terms
        )

    def __mul__(self, scalar) -> "PowerExpansion":
        return PowerExpansion(
            tuple((c * scalar, e) for c, e in self.left_terms),
            tuple((c * scalar, e) for c, e in self.right_terms),
        )

    __rmul__ = __mul__


class OpKind(enum.Enum):
    LEFT_INT = "left_int"
    RIGHT_INT = "right_int"
    LEFT_RL_D = "left_rl_d"
    RIGHT_RL_D = "right_rl_d"
    LEFT_CAPUTO = "left_caputo"
    RIGHT_CAPUTO = "right_caputo"

    @property
    def is_left(self) -> bool:
        return self.value.startswith("left")


def _map_term(coef, beta: float, kind: OpKind, alpha: float):
    if kind in (OpKind.LEFT_INT, OpKind.RIGHT_INT):
        return coef * math.gamma(beta + 1) * rgamma(beta + 1 + alpha), beta + alpha
    if kind in (OpKind.LEFT_RL_D, OpKind.RIGHT_RL_D):
        if not beta > alpha:
            raise DomainError(
                f"power rule for the RL derivative needs exponent > order "
                f"(exponent {beta}, order {alpha})"
            )
    elif beta == 0.0:
        return None
    elif beta < 0.0:
        raise DomainError(f"Caputo derivative of (.)^{beta} is not defined")
    return coef * math.gamma(beta + 1) * rgamma(beta + 1 - alpha), beta - alpha


def power_oracle(expr: PowerExpansion, kind: OpKind | str, order: OrderLike) -> PowerExpansion:
    """Apply an operator to a power expansion in closed form, term by term.

    Constant terms are treated as belonging to either side. Any other term on
    the opposite side of the operator raises :class:`MixedSideError`.
    """
    kind = OpKind(kind)
    alpha = _order(order).alpha
    own, other = (
        (expr.left_terms, expr.right_terms)
        if kind.is_left
        else (expr.right_terms, expr.left_terms)
    )
    foreign = [t for t in other if t[1] != 0.0]
    if foreign:
        side = "right" if kind.is_left else "left"
        raise MixedSideError(
            f"{kind.value} has no closed form on {side}-sided term with exponent {foreign[0][1]}"
        )
    terms = list(own) + [t for t in other if t[1] == 0.0]
    mapped = [m for m in (_map_term(c, e, kind, alpha) for c, e in terms) if m is not None]
    if kind.is_left:
        return PowerExpansion(left_terms=mapped)
    return PowerExpansion(right_terms=mapped)


def evaluate(expr: PowerExpansion, grid: Grid) -> SampledFunction:
    """Evaluate an expansion at the grid nodes.

    Negative exponents give non-finite values at their singular endpoint.
    """
    t = grid.nodes
    coefs = [c for c, _ in expr.left_terms + expr.right_terms]
    dtype = complex if any(isinstance(c, complex) for c in coefs) else float
    out = np.zeros(grid.n + 1, dtype=dtype)
    left = t - grid.a
    right = grid.b - t
    # the endpoint samples must be exact zeros for the singular branch
    left[0] = 0.0
    right[-1] = 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        for coef, expo in expr.left_terms:
            out = out + coef * left**expo
        for coef, expo in expr.right_terms:
            out = out + coef * right**expo
    return SampledFunction(grid, out)


_UNSIGNED = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?j?"
_NUM = r"[+-]?" + _UNSIGNED
_TERM = re.compile(
    rf"\s*(?P<sign>[+-])?\s*(?P<coef>{_UNSIGNED})\s*\*\s*"
    rf"\(\s*(?P<side>t\s*-\s*a|b\s*-\s*t)\s*\)\s*\^\s*(?P<expo>{_NUM})\s*"
)


def parse_power_expansion(text: str) -> PowerExpansion:
    """Parse ``"1*(t-a)^2 + 3*(b-t)^0.5"`` style literals.

    Every term is ``coef*(t-a)^expo`` or ``coef*(b-t)^expo``; coefficients may
    carry a ``j`` suffix. Raises ValueError on anything else.
    """
    pos, left, right = 0, [], []
    text = text.strip()
    if not text:
        raise ValueError("empty power expansion")
    while pos < len(text):
        m = _TERM.match(text, pos)
        if m is None or (pos > 0 and m.group("sign") is None):
            raise ValueError(f"cannot parse power expansion at position {pos}: {text[pos:]!r}")
        coef = complex(m.group("coef")) if m.group("coef").endswith("j") else float(m.group("coef"))
        if m.group("sign") == "-":
            coef = -coef
        expo = m.group("expo")
        if expo.endswith("j"):
            raise ValueError(f"exponent must be real, got {expo!r}")
        side = left if m.group("side").startswith("t") else right
        side.append((coef, float(expo)))
        pos = m.end()
    return PowerExpansion(tuple(left), tuple(right))
