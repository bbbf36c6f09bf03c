"""scikit-learn compatible wrappers around the calibration routines."""
import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .adsorption import bet_finite, bet_infinite
from .calibrate import FitSpec, MeasurementSet, bet_linear_fit, fit, free_parameters_from_bounds
from .calibrate import model_capacitance
from .sensor import SensorConfig, rh_sweep, sensitivity, ZERO_CELSIUS

DEFAULT_FREE_PARAMETERS = {
    "stack.area": (1e-7, 1e-4),
    "stack.porosity": (0.05, 0.9),
    "kelvin.theta_adv": (10.0, 80.0),
    "kelvin.theta_rec": (0.0, 10.0),
}


def _split_X(X, default_temp_c):
    X = np.asarray(X, dtype=float)
    rh = X[:, 0]
    temp = X[:, 1] if X.shape[1] > 1 else np.full(len(X), default_temp_c)
    return rh, temp


class HumiditySensorRegressor(RegressorMixin, BaseEstimator):
    """Fit sensor configuration parameters to a measured C-RH record.

    ``X`` has one row per measurement in acquisition order, with columns
    ``[rh_percent]`` or ``[rh_percent, temp_c]``; ``y`` is the capacitance
    in F. Row order matters: the model replays the path, so hysteresis
    state follows the measurement history.

    Parameters
    ----------
    config : SensorConfig, optional
        Base configuration supplying every parameter that is not fitted.
    free_parameters : dict, optional
        ``{dotted_name: (lower, upper)}`` or ``(lower, upper, initial)``.
        Defaults to electrode area, porosity and both contact angles.
    max_iter, tol, n_starts, random_state
        Passed to the optimizer as ``FitSpec`` fields.
    temp_c : float
        Temperature used when ``X`` has a single column.
    n_jobs : int, optional
        Threads for multi-start fits.
    """

    def __init__(self, config=None, free_parameters=None, max_iter=100, tol=1e-10,
                 n_starts=1, random_state=0, temp_c=25.0, n_jobs=None):
        self.config = config
        self.free_parameters = free_parameters
        self.max_iter = max_iter
        self.tol = tol
        self.n_starts = n_starts
        self.random_state = random_state
        self.temp_c = temp_c
        self.n_jobs = n_jobs

    def fit(self, X, y, sample_weight=None):
        X, y = check_X_y(X, y, y_numeric=True)
        base = self.config if self.config is not None else SensorConfig()
        bounds = self.free_parameters if self.free_parameters is not None \
            else DEFAULT_FREE_PARAMETERS
        spec = FitSpec(
            free_parameters_from_bounds(base, bounds),
            max_iterations=self.max_iter,
            tolerance=self.tol,
            seed=self.random_state,
            n_starts=self.n_starts,
        )
        rh, temp = _split_X(X, self.temp_c)
        data = MeasurementSet(rh, y, temp, weight=sample_weight)
        result = fit(data, spec, base, jobs=self.n_jobs)
        self.fit_result_ = result
        self.config_ = result.config
        self.params_ = dict(result.values)
        self.n_iter_ = result.iterations
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        """Model capacitance (F) along the RH path in ``X``."""
        check_is_fitted(self, "config_")
        X = check_array(X)
        rh, temp = _split_X(X, self.temp_c)
        return model_capacitance(self.config_, MeasurementSet(rh, np.ones(len(rh)), temp))

    def sensitivity(self, band=(20.0, 80.0), step=1.0):
        """Average sensitivity (pF per RH%) of the fitted model on a dry-start ramp."""
        check_is_fitted(self, "config_")
        grid = np.arange(0.0, 100.0 + step / 2, step)
        sweep = rh_sweep(self.config_, grid, self.temp_c + ZERO_CELSIUS)
        return sensitivity(sweep, band)


class BETRegressor(RegressorMixin, BaseEstimator):
    """Linear BET-plot fit of adsorbed quantity against relative pressure.

    ``X`` is a single column of relative pressures in (0, 1); ``y`` is the
    adsorbed quantity. After fitting, ``monolayer_capacity_`` and ``c_``
    hold the BET parameters. ``predict`` evaluates the infinite-layer
    isotherm, or the finite one when ``max_layers`` is set.
    """

    def __init__(self, max_layers=None):
        self.max_layers = max_layers

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        if X.shape[1] != 1:
            raise ValueError("BETRegressor expects a single feature (relative pressure)")
        out = bet_linear_fit(np.column_stack([X[:, 0], y]))
        self.monolayer_capacity_ = out["v_m"]
        self.c_ = out["c"]
        self.intercept_ = out["intercept"]
        self.slope_ = out["slope"]
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "c_")
        x = check_array(X)[:, 0]
        if self.max_layers is None:
            return self.monolayer_capacity_ * bet_infinite(x, self.c_)
        return self.monolayer_capacity_ * bet_finite(x, self.c_, self.max_layers)
