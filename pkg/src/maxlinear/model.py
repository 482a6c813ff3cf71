"""Max-linear model core: X = A (max-times) Z.

The model couples a nonnegative coefficient matrix with one margin per
factor. Both the matrix and the observation vector are validated up
front; downstream modules assume these invariants and never re-check.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    MarginCountMismatchError,
    NegativeEntryError,
    ZeroColumnError,
    ZeroRowError,
)
from .margins import MarginSpec, margin_from_dict


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MaxLinearModel:
    """Validated max-linear model: n x p coefficient matrix plus p margins.

    Immutable after construction; safe to share across threads.
    """

    A: np.ndarray
    margins: tuple[MarginSpec, ...]

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def p(self) -> int:
        return self.A.shape[1]


def validate_model(A, margins: Sequence[MarginSpec]) -> MaxLinearModel:
    """Check structural assumptions and return an immutable model.

    Raises
    ------
    NegativeEntryError
        if any entry is negative or non-finite.
    ZeroRowError, ZeroColumnError
        if a row or column of ``A`` has no strictly positive entry.
    MarginCountMismatchError
        if ``margins`` does not have one entry per column.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise DimensionMismatchError(f"A must be 2-d, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NegativeEntryError("A contains non-finite entries")
    if np.any(A < 0):
        i, j = np.argwhere(A < 0)[0]
        raise NegativeEntryError(f"A[{i},{j}] = {A[i, j]} is negative")
    pos = A > 0
    bad_rows = np.flatnonzero(~pos.any(axis=1))
    if bad_rows.size:
        raise ZeroRowError(f"rows with no positive entry: {bad_rows.tolist()}")
    bad_cols = np.flatnonzero(~pos.any(axis=0))
    if bad_cols.size:
        raise ZeroColumnError(f"columns with no positive entry: {bad_cols.tolist()}")
    margins = tuple(margins)
    if len(margins) != A.shape[1]:
        raise MarginCountMismatchError(
            f"expected {A.shape[1]} margins, got {len(margins)}"
        )
    return MaxLinearModel(A=_readonly(A), margins=margins)


def validate_observations(x, n: int | None = None) -> np.ndarray:
    """Validate an observation vector: finite, strictly positive reals."""
    x = np.ascontiguousarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatchError(f"x must be 1-d, got shape {x.shape}")
    if n is not None and x.size != n:
        raise DimensionMismatchError(f"expected {n} observations, got {x.size}")
    # min > 0 rejects NaN and nonpositive values, max < inf rejects +inf
    if x.size and not (x.min() > 0.0 and x.max() < np.inf):
        raise ValueError("observations must be finite and strictly positive")
    x.setflags(write=False)
    return x


def max_linear_apply(A, z) -> np.ndarray:
    """Row-wise max-times product: result_i = max_j A[i,j] * z[j]."""
    A = np.asarray(A, dtype=float)
    z = np.asarray(z, dtype=float)
    if A.ndim != 2 or z.ndim != 1 or A.shape[1] != z.size:
        raise DimensionMismatchError(
            f"incompatible shapes A{A.shape} and z{z.shape}"
        )
    return (A * z).max(axis=1)


def max_linear_apply_batch(A, Z) -> np.ndarray:
    """Apply ``A`` to each row of the sample matrix ``Z`` (num x p).

    Returns a (num x n) matrix. Iterates over the rows of ``A`` so the
    temporaries stay at num x p.
    """
    A = np.asarray(A, dtype=float)
    Z = np.asarray(Z, dtype=float)
    if A.ndim != 2 or Z.ndim != 2 or A.shape[1] != Z.shape[1]:
        raise DimensionMismatchError(
            f"incompatible shapes A{A.shape} and Z{Z.shape}"
        )
    out = np.empty((Z.shape[0], A.shape[0]))
    for i in range(A.shape[0]):
        np.max(Z * A[i], axis=1, out=out[:, i])
    return out


# --- model file format ---------------------------------------------------

def model_to_dict(model: MaxLinearModel) -> dict:
    return {
        "A": model.A.tolist(),
        "margins": [m.to_dict() for m in model.margins],
    }


def model_from_dict(doc: dict) -> MaxLinearModel:
    margins = [margin_from_dict(m) for m in doc["margins"]]
    return validate_model(np.array(doc["A"], dtype=float), margins)


def save_model(model: MaxLinearModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model)))


def load_model(path) -> MaxLinearModel:
    return model_from_dict(json.loads(Path(path).read_text()))
