"""Forward model and calibration engine for capacitive porous-alumina RH sensors."""
from .adsorption import (
    BetParameters,
    bet_finite,
    bet_infinite,
    bet_transform,
    c_factor,
    film_thickness,
)
from .calibrate import (
    FitResult,
    FitSpec,
    FreeParameter,
    MeasurementSet,
    bet_linear_fit,
    fit,
    residuals,
)
from .capillary import (
    KelvinParameters,
    PoreFillState,
    PoreSizeDistribution,
    condensed_volume_fraction,
    kelvin_radius,
    kelvin_rh,
    update_fill_state,
    water_fill_fraction,
)
from .dielectric import (
    LayerStack,
    Permittivities,
    effective_permittivity,
    layer_capacitance,
    morphology_exponent,
    stack_capacitance,
)
from .estimator import BETRegressor, HumiditySensorRegressor
from .exceptions import ConvergenceError, DataError, DomainError, NonPhysicalFitError
from .sensor import (
    SensorConfig,
    SurfaceTerm,
    SweepResult,
    WallDiffusion,
    capacitance_at,
    loop_area,
    rh_sweep,
    sensitivity,
    temperature_sweep,
)

__version__ = "0.1.0"
