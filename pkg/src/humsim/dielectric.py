"""Permittivity of the wet porous layer and the capacitor stack."""
from dataclasses import dataclass
import math


from .constants import EPS0
from .exceptions import DomainError

MIXING_RULES = ("lichtenecker", "parallel", "series")


@dataclass(frozen=True)
class Permittivities:
    """Relative permittivities of the stack constituents.

    ``eps_water_slope`` is an optional linear temperature coefficient of the
    water permittivity (1/K) referenced to 298.15 K.
    """

    eps_alumina: float = 9.0
    eps_water: float = 80.0
    eps_air: float = 1.0
    eps_oxide: float = 3.9
    eps_water_slope: float = 0.0

    def __post_init__(self):
        for name in ("eps_alumina", "eps_water", "eps_air", "eps_oxide"):
            if not getattr(self, name) >= 1:
                raise DomainError(f"{name} must be >= 1")

    def water_at(self, T):
        eps = self.eps_water + self.eps_water_slope * (T - 298.15)
        if not eps >= 1:
            raise DomainError(f"water permittivity below 1 at T = {T} K")
        return eps


@dataclass(frozen=True)
class LayerStack:
    """Parallel-plate geometry: SiO2 insulation in series with porous alumina.

    Lengths in m, area in m^2. ``morphology_exponent`` is informational; the
    forward model does not use it.
    """

    area: float = 1e-6
    oxide_thickness: float = 70e-9
    alumina_thickness: float = 440e-9
    porosity: float = 0.25
    morphology_exponent: float = 1.0

    def __post_init__(self):
        if not self.area > 0:
            raise DomainError("electrode area must be positive")
        if not (self.oxide_thickness > 0 and self.alumina_thickness > 0):
            raise DomainError("layer thicknesses must be positive")
        if not 0 < self.porosity < 1:
            raise DomainError("porosity must lie in (0, 1)")


def effective_permittivity(P, w, eps, mixing="lichtenecker", eps_water=None):
    """Permittivity of alumina skeleton + water + air.

    Parameters
    ----------
    P : float
        Porosity, in (0, 1).
    w : float
        Fraction of the pore volume filled with water.
    eps : Permittivities
    mixing : {'lichtenecker', 'parallel', 'series'}
        Logarithmic mixing by default; the linear (parallel) and harmonic
        (series) bounds are available for comparison.
    eps_water : float, optional
        Overrides ``eps.eps_water`` (used for temperature-dependent water).
    """
    if not 0 <= w <= 1:
        raise DomainError("water fill fraction must lie in [0, 1]")
    if not 0 <= P < 1:
        raise DomainError("porosity must lie in [0, 1)")
    e_w = eps.eps_water if eps_water is None else eps_water
    fractions = (1.0 - P, P * w, P * (1.0 - w))
    values = (eps.eps_alumina, e_w, eps.eps_air)
    if mixing == "lichtenecker":
        return math.exp(sum(f * math.log(v) for f, v in zip(fractions, values)))
    if mixing == "parallel":
        return sum(f * v for f, v in zip(fractions, values))
    if mixing == "series":
        return 1.0 / sum(f / v for f, v in zip(fractions, values))
    raise DomainError(f"unknown mixing rule {mixing!r}")


def layer_capacitance(eps, area, thickness):
    """Parallel-plate capacitance ``eps0 eps A / d``, F."""
    if not (eps > 0 and area > 0 and thickness > 0):
        raise DomainError("permittivity, area and thickness must be positive")
    return EPS0 * eps * area / thickness


def series_capacitance(c1, c2):
    return c1 * c2 / (c1 + c2)


def stack_capacitance(stack, eps_eff, eps_oxide):
    """Capacitance of the oxide/sensing-layer series stack, F."""
    c_ox = layer_capacitance(eps_oxide, stack.area, stack.oxide_thickness)
    c_sens = layer_capacitance(eps_eff, stack.area, stack.alumina_thickness)
    return series_capacitance(c_ox, c_sens)


def morphology_exponent(C_w, C_d, eps_w, eps_d):
    """Exponent ``n`` in ``C_w / C_d = (eps_w / eps_d) ** n``."""
    if not (C_w > 0 and C_d > 0 and eps_w > 0 and eps_d > 0):
        raise DomainError("capacitances and permittivities must be positive")
    if eps_w == eps_d:
        raise DomainError("wet and dry permittivities are equal; exponent undefined")
    return math.log(C_w / C_d) / math.log(eps_w / eps_d)


def reconstruct_wet_capacitance(C_d, eps_w, eps_d, n):
    return C_d * (eps_w / eps_d) ** n


__all__ = [
    "MIXING_RULES",
    "Permittivities",
    "LayerStack",
    "effective_permittivity",
    "layer_capacitance",
    "series_capacitance",
    "stack_capacitance",
    "morphology_exponent",
    "reconstruct_wet_capacitance",
]

