"""Fractional calculus of variations: operators, brackets, oscillator and H-J checks."""

from .errors import (
    DivergentForcing,
    DomainError,
    InconsistentSystem,
    MaxIterExceeded,
    MissingVariable,
    MixedSideError,
    NonContractive,
    NonInvertibleMomenta,
    VariableOutOfScope,
)
from .fracops import FracOrder, Grid, PowerExpansion, SampledFunction

__version__ = "0.1.0"
