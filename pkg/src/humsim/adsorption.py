"""BET multilayer adsorption.

Coverage is reported as the dimensionless ratio v/v_m. Relative pressures
are p/p0 and must lie in [0, 1); callers that want to include saturation
should pass the value through :func:`humsim.constants.clamp_relative_pressure`.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constants import R_GAS, WATER
from .exceptions import DomainError


@dataclass(frozen=True)
class BetParameters:
    """BET model parameters.

    Attributes
    ----------
    monolayer_capacity : float
        Adsorbed quantity of one complete layer, in coverage units.
    heat_first_layer : float
        Adsorption heat of the first layer, J/mol.
    heat_condensation : float
        Heat of condensation of the adsorbate, J/mol.
    max_layers : float or None
        Number of layers that fit in a pore. ``None`` ties it to the pore
        geometry (median radius over monolayer thickness).
    monolayer_thickness : float
        Statistical thickness of one adsorbed layer, m.
    """

    monolayer_capacity: float = 1.0
    heat_first_layer: float = 49000.0
    heat_condensation: float = 44000.0
    max_layers: Optional[float] = None
    monolayer_thickness: float = WATER.t_mono

    def __post_init__(self):
        if not self.monolayer_capacity > 0:
            raise DomainError("monolayer_capacity must be positive")
        if not (np.isfinite(self.heat_first_layer) and np.isfinite(self.heat_condensation)):
            raise DomainError("adsorption heats must be finite")
        if self.max_layers is not None and not self.max_layers >= 1:
            raise DomainError("max_layers must be >= 1")
        if not self.monolayer_thickness > 0:
            raise DomainError("monolayer_thickness must be positive")

    def c(self, T):
        return c_factor(self.heat_first_layer, self.heat_condensation, T)


def _scalar_or_array(value):
    return float(value) if np.ndim(value) == 0 else value


def _check_x(x, allow_zero=True):
    x = np.asarray(x, dtype=float)
    lower_ok = x >= 0 if allow_zero else x > 0
    if not np.all(lower_ok & (x < 1)):
        bound = "[0, 1)" if allow_zero else "(0, 1)"
        raise DomainError(f"relative pressure must lie in {bound}")
    return x


def c_factor(E1, EL, T):
    """BET energy constant ``exp((E1 - EL) / (R T))``.

    Parameters
    ----------
    E1, EL : float
        First-layer adsorption heat and condensation heat, J/mol.
    T : float or array_like
        Absolute temperature, K.
    """
    T = np.asarray(T, dtype=float)
    if not np.all(T > 0):
        raise DomainError("temperature must be positive")
    return _scalar_or_array(np.exp((E1 - EL) / (R_GAS * T)))


def bet_finite(x, c, n):
    """BET coverage for at most ``n`` adsorbed layers.

    ``n`` may be any real number >= 1; ``x**n`` is evaluated as
    ``exp(n ln x)``. With ``n == 1`` this is the Langmuir isotherm and
    for large ``n`` it approaches :func:`bet_infinite`.
    """
    x = _check_x(x)
    if not c > 0:
        raise DomainError("c must be positive")
    if not n >= 1:
        raise DomainError("layer count must be >= 1")
    with np.errstate(divide="ignore"):
        log_x = np.log(x)
    xn = np.exp(n * log_x)
    # 1 - (n+1) x^n + n x^(n+1), arranged to limit cancellation near x = 0
    numer = -np.expm1(n * log_x) - n * xn * (1.0 - x)
    denom = 1.0 + (c - 1.0) * x - c * xn * x
    with np.errstate(invalid="ignore", divide="ignore"):
        theta = np.where(x > 0, c * x / (1.0 - x) * numer / denom, 0.0)
    return _scalar_or_array(theta)


def bet_infinite(x, c):
    """BET coverage for an unbounded number of layers; diverges at x -> 1."""
    x = _check_x(x)
    if not c > 0:
        raise DomainError("c must be positive")
    return _scalar_or_array(c * x / ((1.0 - x) * (1.0 + (c - 1.0) * x)))


def bet_transform(x, v):
    """Linearized BET ordinate ``x / (v (1 - x))``.

    For infinite-layer BET data this is a straight line in ``x`` with
    intercept ``1/(v_m c)`` and slope ``(c - 1)/(v_m c)``.
    """
    x = _check_x(x, allow_zero=False)
    v = np.asarray(v, dtype=float)
    if not np.all(v > 0):
        raise DomainError("adsorbed quantity must be positive")
    return _scalar_or_array(x / (v * (1.0 - x)))


def film_thickness(coverage, t_mono):
    """Statistical film thickness, m."""
    coverage = np.asarray(coverage, dtype=float)
    if not np.all(coverage >= 0):
        raise DomainError("coverage must be non-negative")
    if not t_mono > 0:
        raise DomainError("monolayer thickness must be positive")
    return _scalar_or_array(coverage * t_mono)
