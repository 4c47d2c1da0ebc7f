"""Exact sparse polynomials over the phase-space variables.

Coefficients are Gaussian rationals (``a + b i`` with ``a, b`` rational), so
bracket identities can be checked by equality instead of tolerance.
Physical constants are folded into the coefficients by the caller.

Example:
    >>> p_alpha, q = var(PhaseVar.P_ALPHA), var(PhaseVar.Q)
    >>> h = p_alpha**2 / 2 + Fraction(1, 2) * q**2
    >>> str(partial(h, PhaseVar.P_ALPHA))
    'p_alpha'
"""

from __future__ import annotations

import ast
import enum
import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .errors import MissingVariable

__all__ = [
    "GaussianRational",
    "PhaseVar",
    "PhasePoly",
    "CORE_VARS",
    "NVARS",
    "var",
    "const",
    "add",
    "mul",
    "partial",
    "eval_poly",
    "substitute",
    "parse",
    "render",
    "I",
]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)  # exact binary value of the double
    return Fraction(x)


@dataclass(frozen=True)
class GaussianRational:
    """Exact complex number with rational real and imaginary parts."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", _frac(self.re))
        object.__setattr__(self, "im", _frac(self.im))

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        if isinstance(x, (numbers.Rational, float)):
            return cls(_frac(x))
        raise TypeError(f"cannot use {type(x).__name__} as an exact coefficient")

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __add__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.coerce(other)
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by zero coefficient")
        return self * GaussianRational(o.re / den, -o.im / den)

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __str__(self):
        if self.is_real:
            return str(self.re)
        mag = abs(self.im)
        imag = "i" if mag == 1 else f"{mag}*i"
        if self.re == 0:
            return f"({'-' if self.im < 0 else ''}{imag})"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{imag})"

    __repr__ = __str__


I = GaussianRational(0, 1)
_ZERO = GaussianRational(0)
_ONE = GaussianRational(1)


class PhaseVar(enum.IntEnum):
    """Fixed, ordered variable universe; the order defines monomial layout."""

    Q = 0
    P_ALPHA = 1
    P_BETA = 2
    T = 3
    V_ALPHA = 4
    V_BETA = 5
    X1 = 6
    X2 = 7
    X3 = 8
    X4 = 9
    X5 = 10
    X6 = 11
    X7 = 12
    X8 = 13

    # generating-function roles of the auxiliary bank
    QBAR_ALPHA = 6
    QBAR_BETA = 7
    BIG_QBAR_ALPHA = 8
    BIG_QBAR_BETA = 9
    NEW_P_ALPHA = 10
    NEW_P_BETA = 11


CORE_VARS = (PhaseVar.Q, PhaseVar.P_ALPHA, PhaseVar.P_BETA, PhaseVar.T)
NVARS = 14

_NAMES = {
    PhaseVar.Q: "q",
    PhaseVar.P_ALPHA: "p_alpha",
    PhaseVar.P_BETA: "p_beta",
    PhaseVar.T: "t",
    PhaseVar.V_ALPHA: "v_alpha",
    PhaseVar.V_BETA: "v_beta",
    PhaseVar.X1: "qbar_alpha",
    PhaseVar.X2: "qbar_beta",
    PhaseVar.X3: "Qbar_alpha",
    PhaseVar.X4: "Qbar_beta",
    PhaseVar.X5: "P_alpha",
    PhaseVar.X6: "P_beta",
    PhaseVar.X7: "x7",
    PhaseVar.X8: "x8",
}
_LOOKUP = {name: v for v, name in _NAMES.items()}
_LOOKUP.update({"x": PhaseVar.Q, "x1": PhaseVar.X1, "x2": PhaseVar.X2,
                "x3": PhaseVar.X3, "x4": PhaseVar.X4, "x5": PhaseVar.X5,
                "x6": PhaseVar.X6})

Monomial = tuple  # exponent per PhaseVar, length NVARS
_UNIT = (0,) * NVARS

Scalar = Union[int, Fraction, float, complex, GaussianRational]


class PhasePoly:
    """Immutable polynomial: a canonical map from monomials to coefficients.

    No zero coefficient is ever stored, so equality is plain map equality.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        clean = {}
        for mono, coef in (terms or {}).items():
            c = GaussianRational.coerce(coef)
            if c:
                if len(mono) != NVARS or any(e < 0 for e in mono):
                    raise ValueError(f"bad monomial exponents {mono}")
                clean[tuple(mono)] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "PhasePoly":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def variables(self) -> frozenset:
        return frozenset(
            PhaseVar(i) for mono in self._terms for i, e in enumerate(mono) if e
        )

    def degree(self) -> int:
        return max((sum(m) for m in self._terms), default=0)

    def constant_value(self) -> GaussianRational | None:
        """The coefficient if the polynomial is a constant, else ``None``."""
        if not self._terms:
            return _ZERO
        if set(self._terms) == {_UNIT}:
            return self._terms[_UNIT]
        return None

    def __eq__(self, other):
        if not isinstance(other, PhasePoly):
            try:
                other = const(other)
            except TypeError:
                return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other):
        return add(self, _poly(other))

    __radd__ = __add__

    def __neg__(self):
        return PhasePoly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return add(self, -_poly(other))

    def __rsub__(self, other):
        return add(_poly(other), -self)

    def __mul__(self, other):
        return mul(self, _poly(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = _poly(other).constant_value()
        if c is None:
            raise ValueError("polynomials can only be divided by constants")
        inv = _ONE / c
        return PhasePoly._raw({m: v * inv for m, v in self._terms.items()})

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        out, base = one(), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"PhasePoly({render(self)!r})"


def _poly(x) -> PhasePoly:
    return x if isinstance(x, PhasePoly) else const(x)


def const(c: Scalar) -> PhasePoly:
    return PhasePoly({_UNIT: c})


def one() -> PhasePoly:
    return PhasePoly._raw({_UNIT: _ONE})


def zero() -> PhasePoly:
    return PhasePoly._raw({})


def var(v: PhaseVar, power: int = 1) -> PhasePoly:
    mono = [0] * NVARS
    mono[int(v)] = power
    return PhasePoly._raw({tuple(mono): _ONE})


def add(p: PhasePoly, q: PhasePoly) -> PhasePoly:
    out = dict(p._terms)
    for mono, c in q._terms.items():
        s = out.get(mono, _ZERO) + c
        if s:
            out[mono] = s
        else:
            out.pop(mono, None)
    return PhasePoly._raw(out)


def mul(p: PhasePoly, q: PhasePoly) -> PhasePoly:
    out: dict = {}
    for m1, c1 in p._terms.items():
        for m2, c2 in q._terms.items():
            mono = tuple(a + b for a, b in zip(m1, m2))
            s = out.get(mono, _ZERO) + c1 * c2
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
    return PhasePoly._raw(out)


def partial(p: PhasePoly, v: PhaseVar) -> PhasePoly:
    """Exact partial derivative of ``p`` with respect to ``v``."""
    i = int(v)
    out: dict = {}
    for mono, c in p._terms.items():
        e = mono[i]
        if e:
            lowered = mono[:i] + (e - 1,) + mono[i + 1:]
            out[lowered] = c * e
    return PhasePoly._raw(out)


def _is_exact(x) -> bool:
    return isinstance(x, (numbers.Rational, GaussianRational))


def eval_poly(p: PhasePoly, assignment: Mapping[PhaseVar, Scalar]):
    """Evaluate ``p`` at a point.

    Exact inputs (ints, fractions, Gaussian rationals) give an exact result;
    any float or complex input switches to floating point. Real results are
    returned as real numbers.
    """
    missing = p.variables() - set(assignment)
    if missing:
        names = ", ".join(sorted(_NAMES[v] for v in missing))
        raise MissingVariable(f"no value for {names}")
    exact = all(_is_exact(assignment[v]) for v in p.variables())
    values = {int(v): x for v, x in assignment.items()}
    if exact:
        total = _ZERO
        for mono, c in p._terms.items():
            term = c
            for i, e in enumerate(mono):
                if e:
                    term = term * _gpow(values[i], e)
            total = total + term
        return total.re if total.is_real else total
    total = 0j
    for mono, c in p._terms.items():
        term = complex(c)
        for i, e in enumerate(mono):
            if e:
                term *= complex(values[i]) ** e
        total += term
    return total.real if total.imag == 0 else total


def _gpow(x, e: int) -> GaussianRational:
    base = GaussianRational.coerce(x)
    out = _ONE
    for _ in range(e):
        out = out * base
    return out


def substitute(p: PhasePoly, mapping: Mapping[PhaseVar, PhasePoly]) -> PhasePoly:
    """Replace variables by polynomials (simultaneously)."""
    idx = {int(v): _poly(q) for v, q in mapping.items()}
    out = zero()
    for mono, c in p._terms.items():
        kept = list(mono)
        term = const(c)
        for i, q in idx.items():
            e = mono[i]
            if e:
                kept[i] = 0
                term = term * q**e
        out = out + term * PhasePoly._raw({tuple(kept): _ONE})
    return out


# -- text form ---------------------------------------------------------------


def _sort_key(mono):
    return (-sum(mono), tuple(-e for e in mono))


def _render_monomial(mono) -> str:
    parts = []
    for i, e in enumerate(mono):
        if e == 1:
            parts.append(_NAMES[PhaseVar(i)])
        elif e:
            parts.append(f"{_NAMES[PhaseVar(i)]}^{e}")
    return "*".join(parts)


def render(p: PhasePoly) -> str:
    """Canonical text: monomials by descending degree, then descending exponents."""
    if p.is_zero():
        return "0"
    chunks = []
    for mono in sorted(p._terms, key=_sort_key):
        c = p._terms[mono]
        body = _render_monomial(mono)
        if c.is_real:
            sign = "-" if c.re < 0 else "+"
            mag = abs(c.re)
            if body:
                text = body if mag == 1 else f"{mag}*{body}"
            else:
                text = str(mag)
        else:
            sign = "+"
            text = f"{c}*{body}" if body else str(c)
        chunks.append((sign, text))
    first_sign, first = chunks[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, text in chunks[1:]:
        out += f" {sign} {text}"
    return out


class _Builder(ast.NodeVisitor):
    def generic_visit(self, node):
        raise ValueError(f"unsupported syntax: {ast.dump(node)}")

    def visit_Expression(self, node):
        return self.visit(node.body)

    def visit_Constant(self, node):
        v = node.value
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ValueError(f"unsupported constant {v!r}")
        return const(Fraction(repr(v)) if isinstance(v, float) else v)

    def visit_Name(self, node):
        if node.id == "i":
            return const(I)
        try:
            return var(_LOOKUP[node.id])
        except KeyError:
            raise ValueError(f"unknown variable {node.id!r}") from None

    def visit_UnaryOp(self, node):
        arg = self.visit(node.operand)
        if isinstance(node.op, ast.USub):
            return -arg
        if isinstance(node.op, ast.UAdd):
            return arg
        raise ValueError("unsupported unary operator")

    def visit_BinOp(self, node):
        left = self.visit(node.left)
        if isinstance(node.op, ast.Pow):
            power = self.visit(node.right).constant_value()
            if power is None or not power.is_real or power.re.denominator != 1 or power.re < 0:
                raise ValueError("exponents must be non-negative integer literals")
            return left ** int(power.re)
        right = self.visit(node.right)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            if right.constant_value() == 0:
                raise ValueError("division by zero")
            return left / right
        raise ValueError("unsupported binary operator")


def parse(text: str) -> PhasePoly:
    """Parse infix text such as ``"p_alpha^2/2 + 3*q*t"``.

    Variables: q (or x), p_alpha, p_beta, t, v_alpha, v_beta, the generating
    function names printed by :func:`render`, and ``i`` for the imaginary unit.
    Raises ``ValueError`` on anything else.
    """
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse {text!r}: {exc.msg}") from None
    return _Builder().visit(tree)
