r"""Fractional Poisson bracket and Hamiltonian mechanics on polynomials.

The bracket of two functions of :math:`(q, p_\alpha, p_\beta, t)` is

.. math::

    [F, G] = \partial_q F\,(\partial_{p_\alpha} G + \partial_{p_\beta} G)
           - \partial_q G\,(\partial_{p_\alpha} F + \partial_{p_\beta} F).

Everything here is exact: inputs and outputs are :class:`PhasePoly` values.

The four partials returned by :func:`direct_hamilton_relations` stand for
trajectory-level quantities::

    dH/dp_alpha  <->  left Caputo derivative of q (order alpha)
    dH/dp_beta   <->  right Caputo derivative of q (order beta)
    dH/dq        <->  left RL derivative of p_beta + right RL derivative of p_alpha

That identification links two calculi and is checked numerically in
:mod:`fracmech.oscillator`, not here.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, NamedTuple

import numpy as np

from .errors import InconsistentSystem, NonInvertibleMomenta, VariableOutOfScope
from .symexpr import (
    CORE_VARS,
    NVARS,
    GaussianRational,
    I,
    PhasePoly,
    PhaseVar,
    const,
    partial,
    substitute,
    var,
    zero,
)

Q, PA, PB, T = CORE_VARS
VA, VB = PhaseVar.V_ALPHA, PhaseVar.V_BETA


def _require_vars(p: PhasePoly, allowed, what: str):
    extra = p.variables() - set(allowed)
    if extra:
        names = ", ".join(sorted(v.name for v in extra))
        raise VariableOutOfScope(f"{what} may not depend on {names}")


def fp_bracket(F: PhasePoly, G: PhasePoly) -> PhasePoly:
    """Fractional Poisson bracket ``[F, G]`` of two core phase-space polynomials."""
    _require_vars(F, CORE_VARS, "bracket argument")
    _require_vars(G, CORE_VARS, "bracket argument")
    dF = partial(F, PA) + partial(F, PB)
    dG = partial(G, PA) + partial(G, PB)
    return partial(F, Q) * dG - partial(G, Q) * dF


@dataclass(frozen=True)
class HamiltonianSystem:
    H: PhasePoly
    label: str = ""

    def __post_init__(self):
        _require_vars(self.H, CORE_VARS, "Hamiltonian")


def canonical_rhs(system: HamiltonianSystem) -> tuple[PhasePoly, PhasePoly]:
    """Right-hand sides of the canonical equations in bracket form.

    Returns ``([q, H], [p_alpha, H])``. The two momentum brackets always agree
    for polynomial ``H``; :class:`InconsistentSystem` guards that identity.
    """
    H = system.H
    dq = fp_bracket(var(Q), H)
    dp = fp_bracket(var(PA), H)
    if dp != fp_bracket(var(PB), H):
        raise InconsistentSystem(f"[p_alpha, H] != [p_beta, H] for {system.label or H}")
    return dq, dp


class HamiltonRelations(NamedTuple):
    dH_dt: PhasePoly
    dH_dp_alpha: PhasePoly
    dH_dp_beta: PhasePoly
    dH_dq: PhasePoly


def direct_hamilton_relations(system: HamiltonianSystem) -> HamiltonRelations:
    H = system.H
    return HamiltonRelations(partial(H, T), partial(H, PA), partial(H, PB), partial(H, Q))


def _velocity_degree(mono) -> int:
    return mono[int(VA)] + mono[int(VB)]


def legendre_hamiltonian(
    L: PhasePoly,
    momenta: Mapping[PhaseVar, PhaseVar] | None = None,
    label: str = "",
) -> HamiltonianSystem:
    """Hamiltonian ``p_alpha v_alpha + p_beta v_beta - L`` written in momenta.

    ``L`` is a polynomial in ``q, v_alpha, v_beta, t`` of degree at most two in
    the velocities, with a constant velocity Hessian. A velocity that does not
    occur in ``L`` contributes no momentum. ``momenta`` maps each velocity to
    its conjugate momentum variable (``v_alpha -> p_alpha``, ``v_beta -> p_beta``
    by default).
    """
    momenta = dict(momenta or {VA: PA, VB: PB})
    _require_vars(L, (Q, T, VA, VB), "Lagrangian")
    if any(_velocity_degree(m) > 2 for m, _ in L.items()):
        raise NonInvertibleMomenta("Lagrangian must be at most quadratic in velocities")

    vel = [v for v in (VA, VB) if v in L.variables()]
    hess = [[partial(partial(L, vi), vj) for vj in vel] for vi in vel]
    for row in hess:
        for h in row:
            if h.constant_value() is None:
                raise NonInvertibleMomenta("velocity Hessian must be constant")
    M = [[h.constant_value() for h in row] for row in hess]
    if any(not any(row) for row in M):
        raise NonInvertibleMomenta("a velocity enters the Lagrangian only linearly")

    at_rest = {v: zero() for v in vel}
    shift = [substitute(partial(L, v), at_rest) for v in vel]
    p = [var(momenta[v]) for v in vel]

    if len(vel) == 1:
        inv = [[1 / M[0][0]]]
    elif len(vel) == 2:
        det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
        if not det:
            raise NonInvertibleMomenta("velocity Hessian is singular")
        inv = [[M[1][1] / det, -M[0][1] / det], [-M[1][0] / det, M[0][0] / det]]
    else:
        inv = []

    v_of_p = {
        vi: sum(((p[j] - shift[j]) * const(inv[i][j]) for j in range(len(vel))), zero())
        for i, vi in enumerate(vel)
    }
    H = sum((p[i] * v_of_p[vi] for i, vi in enumerate(vel)), zero()) - substitute(L, v_of_p)
    return HamiltonianSystem(H, label)


# -- generating functions ----------------------------------------------------


class GFKind(enum.Enum):
    FIRST = "first"
    SECOND = "second"


_GF_VARS = {
    GFKind.FIRST: (
        PhaseVar.QBAR_ALPHA, PhaseVar.QBAR_BETA,
        PhaseVar.BIG_QBAR_ALPHA, PhaseVar.BIG_QBAR_BETA, T,
    ),
    GFKind.SECOND: (
        PhaseVar.QBAR_ALPHA, PhaseVar.QBAR_BETA,
        PhaseVar.NEW_P_ALPHA, PhaseVar.NEW_P_BETA, T,
    ),
}


@dataclass(frozen=True)
class GeneratingFunction:
    kind: GFKind
    body: PhasePoly

    def __post_init__(self):
        object.__setattr__(self, "kind", GFKind(self.kind))
        _require_vars(self.body, _GF_VARS[self.kind], f"{self.kind.value}-kind generating function")


class TransformRelations(NamedTuple):
    """Transformation read off a generating function.

    ``new_alpha``/``new_beta`` are the new momenta for a first-kind function
    and the new coordinates for a second-kind one.
    """

    p_alpha: PhasePoly
    p_beta: PhasePoly
    new_alpha: PhasePoly
    new_beta: PhasePoly
    hamiltonian_shift: PhasePoly  # new Hamiltonian minus old


def generating_partials(G: GeneratingFunction) -> TransformRelations:
    GeneratingFunction(G.kind, G.body)  # re-validate scope
    qa, qb, za, zb, t = _GF_VARS[G.kind]
    body = G.body
    sign = -1 if G.kind is GFKind.FIRST else 1
    return TransformRelations(
        partial(body, qa),
        partial(body, qb),
        partial(body, za) * sign,
        partial(body, zb) * sign,
        partial(body, t),
    )


def legendre_link_check(
    G: GeneratingFunction,
    P_alpha: PhasePoly,
    P_beta: PhasePoly,
    Qbar_alpha: PhasePoly,
    Qbar_beta: PhasePoly,
) -> bool:
    """Check that ``S = G + P_alpha Qbar_alpha + P_beta Qbar_beta`` is second kind.

    The momenta ``P_*`` and coordinates ``Qbar_*`` are polynomials over the
    first-kind variables. The relation ``dS/dP_alpha = Qbar_alpha`` is tested
    through the chain rule on the ``(qbar, Qbar)`` chart,

        dS/dz == dG/dz [z a qbar coordinate] + Qbar_alpha dP_alpha/dz + Qbar_beta dP_beta/dz

    for every chart coordinate ``z``, with the chart's own ``Qbar`` on the right
    so that a wrong ``Qbar_*`` input is caught. This does not require ``P`` to
    be invertible (exchange-type maps pass). The momenta must also match the
    first-kind relations ``P = -dG/dQbar``.
    """
    if G.kind is not GFKind.FIRST:
        raise ValueError("legendre_link_check expects a first-kind generating function")
    qa, qb, za, zb, _ = _GF_VARS[GFKind.FIRST]
    rel = generating_partials(G)
    if P_alpha != rel.new_alpha or P_beta != rel.new_beta:
        return False
    S = G.body + P_alpha * Qbar_alpha + P_beta * Qbar_beta
    for z in (qa, qb, za, zb):
        momentum_part = partial(G.body, z) if z in (qa, qb) else zero()
        expected = momentum_part + var(za) * partial(P_alpha, z) + var(zb) * partial(P_beta, z)
        if partial(S, z) != expected:
            return False
    return True


# -- the two worked systems --------------------------------------------------


def exact(x) -> GaussianRational:
    """Fold a physical constant into an exact coefficient.

    Floats are taken at their exact binary value, so pass strings or
    ``Fraction`` when a decimal value should be exact.
    """
    if isinstance(x, str):
        return GaussianRational(Fraction(x))
    return GaussianRational.coerce(x)


def principal_power_of_minus_one(exponent) -> GaussianRational:
    """``(-1)**exponent`` on the principal branch ``exp(i pi exponent)``.

    Exact when ``2 * exponent`` is an integer, otherwise the double-precision
    value folded exactly.
    """
    twice = 2 * Fraction(exponent)
    if twice.denominator == 1:
        return [GaussianRational(1), I, GaussianRational(-1), -I][int(twice) % 4]
    phase = math.pi * float(exponent)
    return GaussianRational.coerce(complex(math.cos(phase), math.sin(phase)))


def fo_lagrangian(m_alpha, k, charge, field_E) -> PhasePoly:
    """Oscillator in a uniform field: ``m v_alpha^2/2 - k q^2/2 - qE q``."""
    m, k, qe = exact(m_alpha), exact(k), exact(charge) * exact(field_E)
    return (
        const(m / 2) * var(VA, 2) - const(k / 2) * var(Q, 2) - const(qe) * var(Q)
    )


def fo_hamiltonian(m_alpha, k, charge, field_E) -> PhasePoly:
    """``p_alpha^2/(2 m) + k q^2/2 + qE q``."""
    m, k, qe = exact(m_alpha), exact(k), exact(charge) * exact(field_E)
    return const(1 / (2 * m)) * var(PA, 2) + const(k / 2) * var(Q, 2) + const(qe) * var(Q)


def damping_coefficient(gamma, beta) -> GaussianRational:
    """The factor ``i gamma / (-1)**(beta/2)`` of the dissipative oscillator."""
    half = Fraction(beta) / 2
    return I * exact(gamma) / principal_power_of_minus_one(half)


def dissipative_lagrangian(m_alpha, k, gamma, beta) -> PhasePoly:
    """``m v_alpha^2/2 - k q^2/2 - (c/2) v_beta^2``, ``c = i gamma/(-1)^(beta/2)``.

    ``v_beta`` stands for the right Caputo derivative of order ``beta/2``.
    """
    m, k = exact(m_alpha), exact(k)
    c = damping_coefficient(gamma, beta)
    return const(m / 2) * var(VA, 2) - const(k / 2) * var(Q, 2) - const(c / 2) * var(VB, 2)


def dissipative_hamiltonian_as_printed(m_alpha, k, gamma, beta) -> PhasePoly:
    """``p_alpha^2/(2m) + k q^2/2 + p_beta^2 / (2 i gamma (-1)^(beta/2))``.

    Differs from the Legendre transform of :func:`dissipative_lagrangian` in
    the ``p_beta`` term; the brackets with ``p_alpha`` and ``p_beta`` agree.
    """
    m, k = exact(m_alpha), exact(k)
    half = Fraction(beta) / 2
    denom = 2 * I * exact(gamma) * principal_power_of_minus_one(half)
    return (
        const(1 / (2 * m)) * var(PA, 2)
        + const(k / 2) * var(Q, 2)
        + const(1 / denom) * var(PB, 2)
    )


# -- randomized axiom suite ---------------------------------------------------


def random_poly(rng: np.random.Generator, max_degree: int = 3, n_terms: int = 4,
                complex_coeffs: bool = False) -> PhasePoly:
    """Random polynomial over the core variables with small rational coefficients."""
    out = zero()
    for _ in range(n_terms):
        deg = int(rng.integers(0, max_degree + 1))
        mono = [0] * NVARS
        for _ in range(deg):
            mono[int(CORE_VARS[int(rng.integers(0, 4))])] += 1
        mono = tuple(mono)
        re = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6)))
        im = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6))) if complex_coeffs else 0
        out = out + PhasePoly({mono: GaussianRational(re, im)})
    return out


AXIOMS = ("antisymmetry", "additivity", "jacobi", "with_position", "with_momenta", "fundamental", "momenta_first")


def check_bracket_axioms(seed: int, trials: int = 100) -> dict[str, bool]:
    """Run the bracket properties on ``trials`` random triples.

    ``with_position`` is ``[F, q] = -(F_pa + F_pb)``, ``with_momenta`` is
    ``[F, p] = F_q`` for either momentum and ``momenta_first`` is
    ``[p, F] = -F_q``.
    """
    rng = np.random.default_rng(seed)
    ok = dict.fromkeys(AXIOMS, True)
    q, pa, pb = var(Q), var(PA), var(PB)

    ok["fundamental"] = (
        fp_bracket(q, q).is_zero()
        and fp_bracket(pa, pa).is_zero()
        and fp_bracket(pa, pb).is_zero()
        and fp_bracket(pa, q) == -1
        and fp_bracket(pb, q) == -1
    )
    for i in range(trials):
        cplx = i % 4 == 3
        F1, F2, F3 = (random_poly(rng, complex_coeffs=cplx) for _ in range(3))
        ok["antisymmetry"] &= fp_bracket(F1, F2) == -fp_bracket(F2, F1)
        ok["additivity"] &= fp_bracket(F1 + F2, F3) == fp_bracket(F1, F3) + fp_bracket(F2, F3)
        jacobi = (
            fp_bracket(F1, fp_bracket(F2, F3))
            + fp_bracket(F2, fp_bracket(F3, F1))
            + fp_bracket(F3, fp_bracket(F1, F2))
        )
        ok["jacobi"] &= jacobi.is_zero()
        ok["with_position"] &= fp_bracket(F1, q) == -(partial(F1, PA) + partial(F1, PB))
        ok["with_momenta"] &= fp_bracket(F1, pa) == partial(F1, Q) and fp_bracket(F1, pb) == partial(F1, Q)
        ok["momenta_first"] &= (
            fp_bracket(pa, F1) == -partial(F1, Q) and fp_bracket(pb, F1) == -partial(F1, Q)
        )
    return ok
