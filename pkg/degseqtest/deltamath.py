"""
Functions for summarising Monte-Carlo scaling results, such as the log-log
slope of the repaired edit distance against the degree discrepancy, and the
spread of normalised ratios across a grid.
"""
import numpy as np
import scipy.stats
import xarray as xr

LINREGRESS_FIELDS: tuple = ("slope", "intercept", "rvalue", "pvalue", "stderr")


def nanptp(a, axis=None) -> np.ndarray:
    """
    Range of values (maximum - minimum) along an axis, ignoring any NaNs.
    When slices with only NaN values are encountered, a ``RuntimeWarning``
    is raised and NaN is returned for that slice.

    Adapted from https://github.com/numpy/numpy/pull/13220
    """
    return np.nanmax(a=a, axis=axis) - np.nanmin(a=a, axis=axis)


def nan_linregress(x, y) -> np.ndarray:
    """
    Linear Regression function that skips pairs where x or y is NaN (or
    infinite, e.g. the log of a zero edit distance).

    Stacking the outputs (slope, intercept, rvalue, pvalue, stderr)
    into one numpy.ndarray to keep xarray.apply_ufuncs happy.
    Kudos to https://stackoverflow.com/a/60524715/6611055
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()

    mask = np.isfinite(x) & np.isfinite(y)
    x = x[mask]
    y = y[mask]

    if x.size < 2 or np.ptp(x) == 0:
        return np.full(shape=(5,), fill_value=np.nan)
    return np.array(scipy.stats.linregress(x=x, y=y))


def loglog_slope(x: xr.DataArray, y: xr.DataArray, dims=("delta", "trial")) -> xr.DataArray:
    """
    Fits log(y) against log(x) pooled over `dims`, separately for every index
    of the remaining dimensions. Returns a DataArray with a trailing
    "linregress" dimension holding (slope, intercept, rvalue, pvalue, stderr).
    Pairs with a non-positive or missing x or y are left out of the fit.
    """
    dims = [dim for dim in dims if dim in y.dims]
    x, y = xr.broadcast(x, y)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_x = np.log(x.where(x > 0)).stack(sample=dims)
        log_y = np.log(y.where(y > 0)).stack(sample=dims)

    fitted: xr.DataArray = xr.apply_ufunc(
        nan_linregress,
        log_x,
        log_y,
        input_core_dims=[["sample"], ["sample"]],
        output_core_dims=[["linregress"]],
        vectorize=True,
        output_dtypes=[np.float64],
    )
    return fitted.assign_coords(linregress=list(LINREGRESS_FIELDS))
