"""Exception hierarchy shared by every module.

Each class maps to one CLI exit code (see ``cli.EXIT_CODES``) so library
failures surface as distinguishable process failures without string matching.
"""

from __future__ import annotations


class CritfinError(Exception):
    """Base class for all library errors."""


class InputError(CritfinError):
    """Malformed user input: bad map files, bad flags, bad point syntax."""


class ParseError(InputError):
    """Syntax error in polynomial text.

    Carries the 0-based offset of the offending token in ``position``.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class InhomogeneityError(InputError):
    """A parsed polynomial mixes monomials of two different degrees."""

    def __init__(self, deg_a: int, deg_b: int):
        super().__init__(
            f"polynomial is not homogeneous: found monomials of degree "
            f"{deg_a} and degree {deg_b}"
        )
        self.degrees = (deg_a, deg_b)


class ArityError(InputError):
    """Wrong number of forms/variables for an operation (e.g. resultant)."""


class NotAMorphismError(InputError):
    """The component forms share a common zero, so the map is undefined there."""


class BudgetError(CritfinError):
    """A configured budget (node counts, degree caps, orbit length) ran out.

    The partial state is intentionally not returned: callers that can continue
    with partial data catch this and record a diagnostic instead.
    """


class SolverError(CritfinError):
    """A numeric/elimination step could not account for all expected solutions."""


class DegenerateEliminationError(SolverError):
    """Every projection retry left the elimination degenerate."""


class UnwritableOutputError(CritfinError):
    """An output path could not be written."""
