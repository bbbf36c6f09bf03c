"""Full-device forward model: RH sweeps with hysteresis and temperature sweeps.

The pipeline at one operating point is

    BET coverage -> film thickness -> pore water fraction (film + condensate)
    -> + wall uptake -> effective permittivity -> series stack capacitance
    (+ optional high-RH surface term)
"""
from dataclasses import dataclass, field, replace
import math
from typing import List, NamedTuple, Optional

import numpy as np

from .adsorption import BetParameters, bet_finite, film_thickness
from .capillary import (
    ADSORPTION,
    DESORPTION,
    KelvinParameters,
    PoreFillState,
    PoreSizeDistribution,
    update_fill_state,
    water_fill_fraction,
)
from .constants import R_GAS, clamp_relative_pressure
from .dielectric import (
    MIXING_RULES,
    LayerStack,
    Permittivities,
    effective_permittivity,
    stack_capacitance,
)
from .exceptions import DomainError

HEATING = "heating"
COOLING = "cooling"
ZERO_CELSIUS = 273.15


@dataclass(frozen=True)
class SurfaceTerm:
    """Linear capacitance gain above ``onset_rh`` (fraction), F per unit x."""

    enabled: bool = False
    onset_rh: float = 0.8
    gain: float = 50e-12

    def __post_init__(self):
        if not 0 < self.onset_rh < 1:
            raise DomainError("onset_rh must lie in (0, 1)")
        if not self.gain >= 0:
            raise DomainError("surface term gain must be non-negative")


@dataclass(frozen=True)
class WallDiffusion:
    """Moisture uptake into the pore walls, relaxing with an Arrhenius time.

    Equilibrium uptake is ``u_max (1 - exp(-(T - t_ref) / t_scale))``
    clamped to [0, u_max]; the time constant is ``tau0 exp(Ea / (R T))``.
    """

    u_max: float = 0.2
    tau0: float = 2e-3
    Ea: float = 30000.0
    t_ref: float = 278.0
    t_scale: float = 40.0

    def __post_init__(self):
        if not self.u_max >= 0:
            raise DomainError("u_max must be non-negative")
        if not self.tau0 >= 0:
            raise DomainError("tau0 must be non-negative")
        if not self.t_scale > 0:
            raise DomainError("t_scale must be positive")

    def equilibrium(self, T):
        u = self.u_max * -math.expm1(-(T - self.t_ref) / self.t_scale)
        return min(max(u, 0.0), self.u_max)

    def tau(self, T):
        return self.tau0 * math.exp(self.Ea / (R_GAS * T))

    def relax(self, u, T, dt):
        """One explicit first-order step toward equilibrium.

        The step fraction ``dt / tau`` is capped at one so that a vanishing
        time constant lands exactly on equilibrium instead of overshooting.
        """
        tau = self.tau(T)
        k = 1.0 if tau <= dt else dt / tau
        return u + k * (self.equilibrium(T) - u)


@dataclass(frozen=True)
class SensorConfig:
    bet: BetParameters = field(default_factory=BetParameters)
    kelvin: KelvinParameters = field(default_factory=KelvinParameters)
    psd: PoreSizeDistribution = field(default_factory=PoreSizeDistribution)
    stack: LayerStack = field(default_factory=LayerStack)
    eps: Permittivities = field(default_factory=Permittivities)
    surface_term: SurfaceTerm = field(default_factory=SurfaceTerm)
    diffusion: WallDiffusion = field(default_factory=WallDiffusion)
    mixing: str = "lichtenecker"

    def __post_init__(self):
        if self.mixing not in MIXING_RULES:
            raise DomainError(f"mixing must be one of {MIXING_RULES}")

    @property
    def n_layers(self):
        """Layer cap of the finite BET isotherm."""
        if self.bet.max_layers is not None:
            return self.bet.max_layers
        return max(1.0, self.psd.median_radius / self.bet.monolayer_thickness)


class OperatingPoint(NamedTuple):
    capacitance: float
    water_fill: float
    eps_eff: float


class SweepRow(NamedTuple):
    rh_percent: float
    temp_c: float
    branch: str
    water_fill: float
    eps_eff: float
    capacitance_f: float


@dataclass
class SweepResult:
    """Rows of a sweep in traversal order."""

    rows: List[SweepRow] = field(default_factory=list)
    final_state: Optional[PoreFillState] = None
    final_uptake: float = 0.0

    def __len__(self):
        return len(self.rows)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows])

    @property
    def rh_percent(self):
        return self.column("rh_percent")

    @property
    def temp_c(self):
        return self.column("temp_c")

    @property
    def capacitance_pf(self):
        return self.column("capacitance_f") * 1e12

    def select(self, branch):
        return SweepResult([r for r in self.rows if r.branch == branch])


def capacitance_at(cfg, x, T, state, u=0.0):
    """Capacitance of the device at relative pressure ``x`` and temperature ``T``.

    Parameters
    ----------
    cfg : SensorConfig
    x : float
        Relative pressure in [0, 1).
    T : float
        Temperature, K.
    state : PoreFillState
        Current capillary fill state (not modified).
    u : float
        Wall uptake, added to the pore water fraction.

    Returns
    -------
    OperatingPoint
        Capacitance (F), effective water fraction and layer permittivity.
    """
    if not 0 <= u <= max(cfg.diffusion.u_max, 1.0):
        raise DomainError("wall uptake out of range")
    coverage = bet_finite(x, cfg.bet.c(T), cfg.n_layers)
    t_film = film_thickness(coverage, cfg.bet.monolayer_thickness)
    w = water_fill_fraction(state, cfg.psd, t_film)
    w_eff = min(1.0, w + u)
    eps_eff = effective_permittivity(
        cfg.stack.porosity, w_eff, cfg.eps, cfg.mixing, cfg.eps.water_at(T)
    )
    C = stack_capacitance(cfg.stack, eps_eff, cfg.eps.eps_oxide)
    st = cfg.surface_term
    if st.enabled and x > st.onset_rh:
        C += st.gain * (x - st.onset_rh)
    return OperatingPoint(C, w_eff, eps_eff)


def capacitance_bounds(cfg, T=298.15):
    """Capacitance with dry (w = 0) and fully wet (w = 1) pores, F."""
    out = []
    for w in (0.0, 1.0):
        eps_eff = effective_permittivity(
            cfg.stack.porosity, w, cfg.eps, cfg.mixing, cfg.eps.water_at(T)
        )
        out.append(stack_capacitance(cfg.stack, eps_eff, cfg.eps.eps_oxide))
    return tuple(out)


def rh_to_x(rh_percent):
    if not 0 <= rh_percent <= 100:
        raise DomainError(f"RH {rh_percent}% outside [0, 100]")
    return clamp_relative_pressure(rh_percent / 100.0)


def _direction_tag(prev, cur, last_tag, up, down):
    if prev is None or cur == prev:
        return last_tag
    return up if cur > prev else down


def rh_sweep(cfg, path, T=298.15, state=None):
    """Replay an RH path (percent) at temperature ``T`` (K).

    ``T`` may be a scalar or one temperature per path point. Starts from dry
    pores unless ``state`` is given. Rows are tagged ``adsorption`` while RH
    rises and ``desorption`` while it falls.
    """
    path = [float(p) for p in path]
    temps = np.broadcast_to(np.asarray(T, dtype=float), (len(path),))
    for rh in path:
        rh_to_x(rh)
    if len(path) and not np.all(temps > 0):
        raise DomainError("temperatures must be positive (K)")
    if state is None:
        state = PoreFillState.empty(float(temps[0]) if len(path) else 298.15)
    result = SweepResult()
    prev, tag = None, ADSORPTION
    for rh, T_i in zip(path, temps):
        T_i = float(T_i)
        x = rh_to_x(rh)
        tag = _direction_tag(prev, rh, tag, ADSORPTION, DESORPTION)
        state = update_fill_state(state, x, T_i, cfg.kelvin)
        op = capacitance_at(cfg, x, T_i, state)
        result.rows.append(
            SweepRow(rh, T_i - ZERO_CELSIUS, tag, op.water_fill, op.eps_eff, op.capacitance)
        )
        prev = rh
    result.final_state = state
    return result


def temperature_sweep(cfg, rh_const, T_path, dt=60.0):
    """March through temperatures ``T_path`` (K) at constant RH (percent).

    Pores start dry and the wall uptake starts at zero. At every step the
    uptake relaxes toward its equilibrium value over ``dt`` seconds, the
    capillary state follows the temperature-dependent Kelvin radius, and the
    capacitance is evaluated.
    """
    if not dt > 0:
        raise DomainError("time step must be positive")
    x = rh_to_x(rh_const)
    T_path = [float(T) for T in T_path]
    if T_path and min(T_path) <= 0:
        raise DomainError("temperatures must be positive (K)")
    diff = cfg.diffusion
    state = PoreFillState.empty(T_path[0] if T_path else 298.15)
    u = 0.0
    result = SweepResult()
    prev, tag = None, HEATING
    for T in T_path:
        tag = _direction_tag(prev, T, tag, HEATING, COOLING)
        u = diff.relax(u, T, dt)
        state = update_fill_state(state, x, T, cfg.kelvin)
        op = capacitance_at(cfg, x, T, state, u)
        result.rows.append(
            SweepRow(float(rh_const), T - ZERO_CELSIUS, tag, op.water_fill, op.eps_eff,
                     op.capacitance)
        )
        prev = T
    result.final_state = state
    result.final_uptake = u
    return result


def sensitivity(result, band=(20.0, 80.0), branch=ADSORPTION):
    """Least-squares slope of capacitance (pF) against RH (%) within ``band``.

    ``branch=None`` uses every row in the band.
    """
    lo, hi = band
    rows = [
        r for r in result.rows
        if lo <= r.rh_percent <= hi and (branch is None or r.branch == branch)
    ]
    rh = np.array([r.rh_percent for r in rows])
    if len(rows) < 2 or np.ptp(rh) == 0:
        raise DomainError("need at least two distinct RH points in the band")
    c_pf = np.array([r.capacitance_f for r in rows]) * 1e12
    return float(np.polyfit(rh, c_pf, 1)[0])


def loop_area(result, axis="rh_percent"):
    """Area enclosed by a closed sweep in the (axis, capacitance pF) plane.

    Positive when the return pass lies above the outward pass.
    """
    a = result.column(axis)
    c = result.capacitance_pf
    return float(-np.sum(0.5 * (c[1:] + c[:-1]) * np.diff(a)))


def parse_path(spec):
    """Expand ``"a:b:step,b:a:step"`` into a list of values.

    Segments are inclusive of both ends; a segment's first value is dropped
    when it repeats the previous segment's last value.
    """
    values = []
    for seg in spec.split(","):
        seg = seg.strip()
        if not seg:
            continue
        parts = seg.split(":")
        if len(parts) not in (1, 3):
            raise ValueError(f"malformed path segment {seg!r}")
        nums = [float(p) for p in parts]
        if len(nums) == 1:
            seg_vals = nums
        else:
            a, b, step = nums
            if not step > 0:
                raise ValueError(f"step must be positive in {seg!r}")
            n = int(math.floor(abs(b - a) / step + 1e-9))
            sign = 1.0 if b >= a else -1.0
            seg_vals = [a + sign * step * i for i in range(n + 1)]
            seg_vals = [round(v, 10) for v in seg_vals]
            if seg_vals[-1] != b:
                seg_vals.append(b)
        if values and seg_vals and seg_vals[0] == values[-1]:
            seg_vals = seg_vals[1:]
        values.extend(seg_vals)
    if not values:
        raise ValueError("empty path")
    return values


def with_parameter(cfg, name, value):
    """Copy of ``cfg`` with the dotted scalar ``name`` set to ``value``."""
    section, _, attr = name.partition(".")
    if not attr:
        return replace(cfg, **{section: value})
    sub = getattr(cfg, section)
    if "." in attr:
        return replace(cfg, **{section: with_parameter(sub, attr, value)})
    if not hasattr(sub, attr):
        raise KeyError(name)
    return replace(cfg, **{section: replace(sub, **{attr: value})})


def get_parameter(cfg, name):
    obj = cfg
    for part in name.split("."):
        obj = getattr(obj, part)
    return obj


def with_parameters(cfg, values):
    """Copy of ``cfg`` with several dotted scalars set at once.

    Fields of the same section are replaced together, so coupled
    constraints (receding angle <= advancing angle) are checked only on the
    final combination.
    """
    by_section = {}
    for name, value in values.items():
        section, _, attr = name.partition(".")
        if not attr or "." in attr:
            cfg = with_parameter(cfg, name, value)
            continue
        by_section.setdefault(section, {})[attr] = value
    for section, attrs in by_section.items():
        sub = getattr(cfg, section)
        for attr in attrs:
            if not hasattr(sub, attr):
                raise KeyError(f"{section}.{attr}")
        cfg = replace(cfg, **{section: replace(sub, **attrs)})
    return cfg
