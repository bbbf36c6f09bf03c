"""Physical constants and default water properties."""
from dataclasses import dataclass

from .exceptions import DomainError

#: Molar gas constant, J/(mol K).
R_GAS = 8.314
#: Vacuum permittivity, F/m.
EPS0 = 8.854e-12
#: Clamp applied to relative pressure at saturation.
X_CLAMP = 1e-6


@dataclass(frozen=True)
class PhysicalConstants:
    """Constants shared by the adsorption, capillary and dielectric models.

    Water properties are textbook values at room temperature and can be
    overridden through the run configuration.
    """

    R: float = R_GAS
    eps0: float = EPS0
    gamma: float = 0.072  # N/m
    molar_volume: float = 1.8e-5  # m^3/mol
    eps_water: float = 80.0
    t_mono: float = 3e-10  # m

    def __post_init__(self):
        for name in ("R", "eps0", "gamma", "molar_volume", "eps_water", "t_mono"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be strictly positive")


WATER = PhysicalConstants()


def clamp_relative_pressure(x):
    """Clamp a relative pressure in [0, 1] to [0, 1 - X_CLAMP]."""
    if x < 0 or x > 1:
        raise DomainError(f"relative pressure {x} outside [0, 1]")
    return min(x, 1.0 - X_CLAMP)
