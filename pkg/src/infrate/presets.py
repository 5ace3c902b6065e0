"""Built-in rate functions.

``REFERENCE_TRIG`` is an eight-term trigonometric rate for the bundled
Czech non-regulated price series, on the decimal-year axis.
"""

import math

from .basis import CONSTANT, BasisFunctionSpec
from .rates import BasisExpansionRate

REFERENCE_TRIG_BASIS = (
    CONSTANT,
    BasisFunctionSpec("cos", 1),
    BasisFunctionSpec("sin", 0.5),
    BasisFunctionSpec("sin", 0.25),
    BasisFunctionSpec("sin", 3),
    BasisFunctionSpec("cos", 3),
    BasisFunctionSpec("cos", 4),
    BasisFunctionSpec("sin", 2),
)

REFERENCE_TRIG_COEFFICIENTS = (
    0.04944210,
    0.009094682,
    0.01215932,
    0.01823419,
    0.05263253,
    -0.009667420,
    -0.07212055,
    0.02834145,
)


def reference_trig_rate(domain=(-math.inf, math.inf)):
    return BasisExpansionRate(REFERENCE_TRIG_BASIS, REFERENCE_TRIG_COEFFICIENTS, domain)


# both names resolve to the same rate
RATE_PRESETS = {
    "ref-trig": reference_trig_rate,
    "paper-eq22": reference_trig_rate,
}
