"""Built-in systems: two fourth-order root-locus examples and the second-order Lur'e example."""

from __future__ import annotations

from .poly import Poly

# (q - 1) / (q^2 - q + 0.5), coefficients ascending
SECOND_ORDER_NUM = (-1.0, 1.0)
SECOND_ORDER_DEN = (0.5, -1.0, 1.0)
SECOND_ORDER_ALPHA = -2.5
# lands exactly on X after four saturated steps
SECOND_ORDER_X0 = ("-5.5 - 6.5*sqrt(41)", "-51")
SECOND_ORDER_X0_PERTURBED = ("-5.5 - 6.5*sqrt(41)", "-51 + 1/1000000000000")

BREAK_IN_NUM = (-0.68, 1.08, -1.4, 1.0)
BREAK_IN_DEN = (0.0, 0.0, 0.5525, 0.5, 1.0)
POCKET_NUM = (-0.7769, 0.8769, -1.1, 1.0)
POCKET_DEN = (0.0, 0.0, 0.7769, 0.1, 1.0)


def break_in_example() -> tuple[Poly, Poly]:
    """Relative degree one; two unit-circle crossings of the 0-deg locus."""
    # (q^2 - 0.4 q + 0.68)(q - 1) / (q^2 (q^2 + 0.5 q + 0.5525))
    return Poly(BREAK_IN_NUM), Poly(BREAK_IN_DEN)


def stable_pocket_example() -> tuple[Poly, Poly]:
    """Closed loop is stable again on a gain interval above alpha_p."""
    # (q^2 - 0.1 q + 0.7769)(q - 1) / (q^2 (q^2 + 0.1 q + 0.7769))
    return Poly(POCKET_NUM), Poly(POCKET_DEN)


def second_order() -> tuple[Poly, Poly]:
    return Poly(SECOND_ORDER_NUM), Poly(SECOND_ORDER_DEN)
