"""Extended-real scalar conventions.

Values are ordinary floats extended by -inf; +inf is never produced
(payoffs are bounded above by construction).  -inf absorbs under addition
and positive scaling, and max(-inf, a) = a, which plain float arithmetic
already gives us -- except for 0 * -inf, which every consumer must skip
explicitly (see lattice.expectation).
"""

import math

NEG_INF = float("-inf")


def is_finite(v):
    return v != NEG_INF and math.isfinite(v)
