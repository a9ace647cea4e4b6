"""Input validation helpers shared by the estimators and the functional API."""

from fractions import Fraction
from numbers import Real

import numpy as np


def twice(value, name="value"):
    """Return ``2 * value`` as an exact int, rejecting non-half-integers.

    Accepts ints, floats, and :class:`fractions.Fraction`.
    """
    if isinstance(value, Fraction):
        doubled = 2 * value
        if doubled.denominator != 1:
            raise ValueError(f"{name}={value} is not a half-integer")
        return int(doubled)
    if not isinstance(value, Real):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    doubled = 2 * float(value)
    rounded = round(doubled)
    if abs(doubled - rounded) > 1e-9:
        raise ValueError(f"{name}={value} is not a half-integer")
    return int(rounded)


def check_half_integer_pair(two_j, two_m):
    if two_j < 0:
        raise ValueError(f"j must be non-negative, got {two_j}/2")
    if abs(two_m) > two_j or (two_j - two_m) % 2:
        raise ValueError(f"invalid angular momentum label (j, m) = ({two_j}/2, {two_m}/2)")


def check_cutoff(cutoff, name="cutoff"):
    if isinstance(cutoff, bool) or not isinstance(cutoff, (int, np.integer)):
        raise TypeError(f"{name} must be an integer, got {type(cutoff).__name__}")
    if cutoff < 0:
        raise ValueError(f"{name} must be non-negative, got {cutoff}")
    return int(cutoff)


def check_tau(tau, allow_negative=True):
    tau = float(tau)
    if not np.isfinite(tau):
        raise ValueError(f"interaction time must be finite, got {tau}")
    if not allow_negative and tau < 0:
        raise ValueError(f"interaction time must be non-negative, got {tau}")
    return tau


def check_tau_list(tau_list):
    return [check_tau(t) for t in tau_list]


def check_amplitudes(amplitudes, dim, name="amplitudes"):
    """Coerce to a 1-D complex array of length ``dim``."""
    arr = np.asarray(amplitudes, dtype=complex)
    if arr.ndim != 1 or arr.shape[0] != dim:
        raise ValueError(f"{name} must have shape ({dim},), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_amplitude_rows(X, dim, name="X"):
    """2-D variant of :func:`check_amplitudes` for estimator inputs.

    A single vector is promoted to one row. sklearn's ``check_array`` rejects
    complex data, hence the local helper.
    """
    arr = np.asarray(X, dtype=complex)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise ValueError(f"{name} must have shape (n_samples, {dim}), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr
