# src/common/config.py
"""
Seeds, output locations and the tunable absolute constants.

Values can be overridden from the environment (a .env file is picked up by
the runner scripts and the CLI through python-dotenv):

    MOONFLOWER_SEED        default seed for every randomized run
    MOONFLOWER_OUTPUT_DIR  where suite reports are written
"""

import os
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

from common.errors import ValidationError

DEFAULT_SEED = 20240601
DEFAULT_OUTPUT_DIR = "outputs"

# float comparisons outside exact mode
FLOAT_TOL = 1e-9


def default_seed():
    """Seed from MOONFLOWER_SEED, falling back to DEFAULT_SEED (never wall-clock)"""
    value = os.getenv("MOONFLOWER_SEED")
    if value is None or value.strip() == "":
        return DEFAULT_SEED
    try:
        return int(value)
    except ValueError:
        raise ValidationError(f"MOONFLOWER_SEED must be an integer, got {value!r}")


def output_dir():
    path = Path(os.getenv("MOONFLOWER_OUTPUT_DIR", DEFAULT_OUTPUT_DIR))
    path.mkdir(parents=True, exist_ok=True)
    return path


def to_fraction(x):
    """
    Exact rational for a user-facing number.

    Floats go through their shortest repr so 0.2 becomes 1/5 rather than
    the binary expansion.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class Constants:
    """
    Absolute constants that the extremal and sparsification bounds leave
    unquantified. They are configuration, never derived; every report
    echoes the values it used.

    Parameters:
    -----------
    B: smoothness constant in h(n, k, p) = B * k * log2(n/k) * phi(p)
    C: base of the extremal bound (C*k/w)^w, (C*w/k)^k
    C1: halving threshold for the w > k iteration
    C_level: denominator constant of the w > k cover level
    c0: weight-scale puncturing size constant
    C_lay: layer-size constant
    theta: exponent fraction for weight-scale puncturing
    """
    B: float = 1.0
    C: float = 6.0
    C1: float = 8.0
    C_level: float = 8.0
    c0: float = 1.0
    C_lay: float = 1.0
    theta: float = 0.01

    def __post_init__(self):
        for name in ("B", "C", "C1", "C_level", "c0", "C_lay"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"constant {name} must be positive")
        if not 0 < self.theta < 1:
            raise ValidationError("theta must lie in (0, 1)")

    def to_dict(self):
        return asdict(self)


DEFAULT_CONSTANTS = Constants()
