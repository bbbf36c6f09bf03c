"""Kelvin capillary condensation in a log-normal pore population.

Pores are treated as independent cylinders. A pore of radius ``r`` fills
once the adsorption-branch Kelvin radius reaches ``r`` and empties once the
desorption-branch Kelvin radius drops below it. Because the advancing
contact angle is larger than the receding one, the desorption radius is the
larger of the two and the model shows a type-IV hysteresis loop.

With every bin obeying the same two thresholds, the filled set is always
all pores below a single cut radius, so the memory of the system is that one
number (the play operator ``cut <- clip(cut, r_ads, r_des)``).
"""
from dataclasses import dataclass, replace
from functools import cached_property
import math

import numpy as np
from scipy.special import ndtr

from .constants import R_GAS, WATER
from .exceptions import DomainError

ADSORPTION = "adsorption"
DESORPTION = "desorption"
BRANCHES = (ADSORPTION, DESORPTION)

#: Returned by :func:`kelvin_radius` when no finite threshold exists.
UNBOUNDED = math.inf

_T_GAMMA_REF = 298.15


@dataclass(frozen=True)
class KelvinParameters:
    """Meniscus parameters.

    ``gamma_slope`` is an optional linear temperature coefficient of the
    surface tension (N/(m K)), referenced to 298.15 K.
    """

    gamma: float = WATER.gamma
    molar_volume: float = WATER.molar_volume
    theta_adv: float = 40.0
    theta_rec: float = 10.0
    gamma_slope: float = 0.0

    def __post_init__(self):
        if not (self.gamma > 0 and self.molar_volume > 0):
            raise DomainError("surface tension and molar volume must be positive")
        if not 0 <= self.theta_rec <= self.theta_adv < 90:
            raise DomainError(
                "contact angles must satisfy 0 <= theta_rec <= theta_adv < 90 degrees"
            )

    def gamma_at(self, T):
        g = self.gamma + self.gamma_slope * (T - _T_GAMMA_REF)
        if not g > 0:
            raise DomainError(f"surface tension is non-positive at T = {T} K")
        return g

    def theta(self, branch):
        if branch == ADSORPTION:
            return self.theta_adv
        if branch == DESORPTION:
            return self.theta_rec
        raise DomainError(f"unknown branch {branch!r}")


def kelvin_radius_theta(x, T, theta, gamma, molar_volume):
    """Kelvin radius for an explicit contact angle in degrees.

    Returns :data:`UNBOUNDED` for a 90 degree contact angle.
    """
    if not 0 < x < 1:
        raise DomainError("relative pressure must lie in (0, 1)")
    if not T > 0:
        raise DomainError("temperature must be positive")
    if theta == 90:
        return UNBOUNDED
    cos_t = math.cos(math.radians(theta))
    return 2.0 * gamma * molar_volume * cos_t / (R_GAS * T * math.log(1.0 / x))


def kelvin_radius(x, T, kp, branch=ADSORPTION):
    """Radius below which pores are condensed at relative pressure ``x``, m."""
    return kelvin_radius_theta(x, T, kp.theta(branch), kp.gamma_at(T), kp.molar_volume)


def kelvin_rh(r, T, kp, branch=ADSORPTION):
    """Relative pressure at which a pore of radius ``r`` fills (or empties)."""
    if not r > 0:
        raise DomainError("pore radius must be positive")
    if not T > 0:
        raise DomainError("temperature must be positive")
    cos_t = math.cos(math.radians(kp.theta(branch)))
    return math.exp(-2.0 * kp.gamma_at(T) * kp.molar_volume * cos_t / (r * R_GAS * T))


@dataclass(frozen=True)
class PoreSizeDistribution:
    """Truncated log-normal distribution of cylindrical pore radii.

    ``median_radius`` and ``sigma_log`` describe the number density. Bin
    weights are volume weights (number density times r**2), which for a
    log-normal is again log-normal with median ``median * exp(2 sigma**2)``.
    Bins are geometrically spaced between ``r_min`` and ``r_max``.
    """

    median_radius: float = 3.75e-9
    sigma_log: float = 0.2
    r_min: float = 1e-9
    r_max: float = 20e-9
    bins: int = 256

    def __post_init__(self):
        if not 0 < self.r_min < self.median_radius < self.r_max:
            raise DomainError("need 0 < r_min < median_radius < r_max")
        if not self.sigma_log > 0:
            raise DomainError("sigma_log must be positive")
        if int(self.bins) != self.bins or self.bins < 16:
            raise DomainError("need at least 16 bins")

    @cached_property
    def edges(self):
        return np.geomspace(self.r_min, self.r_max, int(self.bins) + 1)

    @cached_property
    def radii(self):
        """Bin centers (geometric means of the edges), sorted ascending."""
        e = self.edges
        return np.sqrt(e[:-1] * e[1:])

    def _cdf(self, r, median):
        with np.errstate(divide="ignore"):
            z = (np.log(r) - math.log(median)) / self.sigma_log
        return ndtr(z)

    @cached_property
    def _volume_cdf_edges(self):
        F = self._cdf(self.edges, self.volume_median)
        return (F - F[0]) / (F[-1] - F[0])

    @property
    def volume_median(self):
        return self.median_radius * math.exp(2.0 * self.sigma_log**2)

    @cached_property
    def weights(self):
        """Volume fraction of each bin; sums to one."""
        return np.diff(self._volume_cdf_edges)

    @cached_property
    def number_weights(self):
        F = self._cdf(self.edges, self.median_radius)
        w = np.diff(F)
        return w / w.sum()

    def number_mean_diameter(self):
        """Number-weighted mean pore diameter over the bins, m."""
        return float(2.0 * np.sum(self.number_weights * self.radii))

    def volume_cdf(self, r):
        """Fraction of pore volume in pores of radius <= r (truncated)."""
        if r <= self.r_min:
            return 0.0
        if r >= self.r_max:
            return 1.0
        lo = self._cdf(self.r_min, self.volume_median)
        hi = self._cdf(self.r_max, self.volume_median)
        return float((self._cdf(r, self.volume_median) - lo) / (hi - lo))

    def bin_fill_fractions(self, r_cut):
        """Filled fraction of each bin's volume for a cut radius ``r_cut``."""
        F = self._volume_cdf_edges
        Fc = self.volume_cdf(r_cut)
        w = self.weights
        with np.errstate(invalid="ignore", divide="ignore"):
            phi = np.where(w > 0, (Fc - F[:-1]) / w, (self.radii <= r_cut).astype(float))
        return np.clip(phi, 0.0, 1.0)


def condensed_volume_fraction(psd, r_cut):
    """Volume fraction of the pore space held in pores of radius <= ``r_cut``.

    ``r_cut`` may be :data:`UNBOUNDED`. Within the bin that straddles the cut
    the volume is split according to the distribution, so the result is a
    continuous function of ``r_cut``.
    """
    return psd.volume_cdf(r_cut)


@dataclass(frozen=True)
class PoreFillState:
    """Hysteresis memory of the pore population.

    All pores with radius <= ``cut_radius`` are condensate-filled and all
    wider ones are empty.
    """

    cut_radius: float = 0.0
    last_x: float = 0.0
    last_T: float = 298.15

    def filled(self, psd):
        """Per-bin filled flags (bins whose center radius is below the cut)."""
        return psd.radii <= self.cut_radius

    @classmethod
    def empty(cls, T=298.15):
        return cls(0.0, 0.0, T)

    @classmethod
    def full(cls, T=298.15):
        return cls(UNBOUNDED, 0.0, T)


def branch_radii(x, T, kp):
    """Adsorption and desorption Kelvin radii; both zero at x = 0."""
    if not 0 <= x < 1:
        raise DomainError("relative pressure must lie in [0, 1)")
    if x == 0:
        return 0.0, 0.0
    return kelvin_radius(x, T, kp, ADSORPTION), kelvin_radius(x, T, kp, DESORPTION)


def update_fill_state(state, x, T, kp):
    """Advance the fill state to relative pressure ``x`` at temperature ``T``.

    A pore fills when its radius is at most the adsorption Kelvin radius and
    a filled pore empties when its radius exceeds the desorption Kelvin
    radius; otherwise it keeps its previous state.
    """
    r_ads, r_des = branch_radii(x, T, kp)
    cut = min(max(state.cut_radius, r_ads), r_des)
    return replace(state, cut_radius=cut, last_x=x, last_T=T)


def annular_film_fraction(r, t_film):
    """Fraction of a cylinder's cross-section occupied by a wall film."""
    r = np.asarray(r, dtype=float)
    t = np.minimum(t_film, r)
    return 1.0 - (1.0 - t / r) ** 2


def water_fill_fraction(state, psd, t_film):
    """Fraction of pore volume occupied by water.

    Condensate-filled pore volume counts fully; the remaining pores carry an
    adsorbed annular film of thickness ``t_film``.
    """
    if not t_film >= 0:
        raise DomainError("film thickness must be non-negative")
    phi = psd.bin_fill_fractions(state.cut_radius)
    film = annular_film_fraction(psd.radii, t_film)
    w = np.sum(psd.weights * (phi + (1.0 - phi) * film))
    return float(min(max(w, 0.0), 1.0))
