"""Closed-form residues of the survival-constant transform at s = 1, -1, -2, -3.

Values are (coefficient, log_coefficient) of Res[P~(s) Delta^(-s)] / Delta^(-s);
only q = 6 has a double pole (at s = -1) and hence a ln(Delta) part.
"""

from __future__ import annotations

import math
from functools import lru_cache

from .zeta import zeta_derivative

RESIDUE_POLES = (1, -1, -2, -3)


@lru_cache(maxsize=1)
def expected_residues() -> dict[tuple[int, int], tuple[float, float]]:
    pi = math.pi
    l2, l3, l5 = math.log(2), math.log(3), math.log(5)
    zp1 = float(zeta_derivative(-1.0).real)
    zp2 = float(zeta_derivative(-2.0).real)
    c3 = 1 / (pi**2 * zp2)
    q6_const = (5 * l5 * (10 * l3 - 7 * l5) + l2 * (55 * l5 - 76 * l3) + (10 * l5 - 8 * l2) * 12 * zp1) / (
        72 * l2 * l3
    )
    q6_log = 7 * (10 * l5 - 8 * l2) / (72 * l2 * l3)
    return {
        (1, 1): (2.0, 0.0),
        (1, -1): (-13 / 12, 0.0),
        (1, -2): (3 / (2 * pi), 0.0),
        (1, -3): (119 / 5760 * c3, 0.0),
        (2, 1): (1.0, 0.0),
        (2, -1): (-1 / 6, 0.0),
        (2, -2): (0.0, 0.0),
        (2, -3): (-1 / 720 * c3, 0.0),
        (3, 1): (1.0, 0.0),
        (3, -1): (-1 / 4 - 5 * l2 / (9 * l3), 0.0),
        (3, -2): (3 / (4 * pi), 0.0),
        (3, -3): (49 / 5120 * c3, 0.0),
        (4, 1): (1.0, 0.0),
        (4, -1): (-1 / 3 - 11 * l3 / (16 * l2), 0.0),
        (4, -2): (3 / pi, 0.0),
        (4, -3): (109 / 1620 * c3, 0.0),
        (6, 1): (1.0, 0.0),
        (6, -1): (q6_const, q6_log),
        (6, -2): (-3 / (2 * pi), 0.0),
        (6, -3): (-79 / 6400 * c3, 0.0),
    }
