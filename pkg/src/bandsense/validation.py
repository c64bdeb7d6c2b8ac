"""Input validation helpers for the estimator-style API."""

from __future__ import annotations

import numpy as np

from .orientation import UnitOrientation


def check_orientation_array(X) -> list:
    """Coerce an (n_bands, 4) wxyz array into UnitOrientation objects.

    Accepts a sequence of UnitOrientation unchanged.  Raises ValueError for
    wrong shapes, non-finite entries, or zero rows.
    """
    if all(isinstance(q, UnitOrientation) for q in X) and len(X) > 0:
        return list(X)
    arr = np.asarray(X, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise ValueError(f"expected shape (n_bands, 4), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("orientations must be finite")
    return [UnitOrientation.from_wxyz(row) for row in arr]


def check_positive(name: str, value: float):
    if not value > 0.0:
        raise ValueError(f"{name} must be positive, got {value}")
