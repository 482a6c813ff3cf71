"""Conditional law of the factors given the observations.

Two representations are provided:

* the factorized per-class mixture (``ConditionalLaw``), which scales to
  thousands of factors and is what the sampler consumes;
* the brute-force scenario mixture (``ScenarioLaw``), built by exhaustive
  minimum-cover enumeration. It is exponential in general and exists as
  an independent oracle for the factorized path on small instances.

All weight arithmetic is done in log space: products of p CDF values
underflow long before p reaches realistic sizes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import (
    EmptyScenarioListError,
    MixedMarginKindsError,
    NumericalUnderflowError,
    TooLargeForBruteForceError,
)
from .hitting import DEFAULT_REL_TOL, HittingStructure, hitting_structure
from .margins import Frechet, MarginSpec
from .model import MaxLinearModel

BRUTE_FORCE_COLUMN_CAP = 20


def _margin_log_tables(
    margins: Sequence[MarginSpec], z_hat: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectors of log f_j(zhat_j) and log F_j(zhat_j) for all columns.

    Homogeneous margins (the common case) are evaluated in one
    vectorized call; otherwise falls back to a per-column loop.
    """
    first = margins[0]
    if all(m is first or m == first for m in margins):
        return (
            np.asarray(first.log_pdf(z_hat), dtype=float),
            np.asarray(first.log_cdf(z_hat), dtype=float),
        )
    log_pdf = np.array([m.log_pdf(z) for m, z in zip(margins, z_hat)])
    log_cdf = np.array([m.log_cdf(z) for m, z in zip(margins, z_hat)])
    return log_pdf, log_cdf


def class_log_weights(
    structure: HittingStructure, margins: Sequence[MarginSpec]
) -> list[np.ndarray]:
    """Unnormalized log weights per class.

    For j in J[s]:
        log w_j = log zhat_j + log f_j(zhat_j)
                  + sum over k in J_bar[s], k != j, of log F_k(zhat_k).
    """
    z_hat = structure.z_hat
    log_pdf, log_cdf = _margin_log_tables(margins, z_hat)
    with np.errstate(divide="ignore"):
        log_z = np.log(z_hat)
    out = []
    for s in range(structure.rank):
        jbar = structure.J_bar[s]
        js = structure.J[s]
        cdf_sum = log_cdf[jbar].sum()
        out.append(log_z[js] + log_pdf[js] + cdf_sum - log_cdf[js])
    return out


def _normalize(log_w: np.ndarray, what: str) -> np.ndarray:
    total = logsumexp(log_w)
    if not np.isfinite(total):
        raise NumericalUnderflowError(f"all weights of {what} vanish in log space")
    return np.exp(log_w - total)


def class_weights(
    structure: HittingStructure, margins: Sequence[MarginSpec]
) -> list[np.ndarray]:
    """Normalized mixture weights for each class (sum to one per class)."""
    return [
        _normalize(lw, f"class {s}") for s, lw in enumerate(class_log_weights(structure, margins))
    ]


def frechet_class_weights(
    structure: HittingStructure, alphas, scales
) -> list[np.ndarray]:
    """Frechet shortcut: within a class the exponential factors cancel,
    leaving weights proportional to alpha_j * scale_j^alpha_j * zhat_j^(-alpha_j).

    Must agree with :func:`class_weights` after normalization; kept as a
    cheap cross-check and fast path for all-Frechet models.
    """
    alphas = np.broadcast_to(np.asarray(alphas, dtype=float), structure.z_hat.shape)
    scales = np.broadcast_to(np.asarray(scales, dtype=float), structure.z_hat.shape)
    log_w = np.log(alphas) + alphas * np.log(scales) - alphas * np.log(structure.z_hat)
    return [_normalize(log_w[js], f"class {s}") for s, js in enumerate(structure.J)]


@dataclass(frozen=True)
class ConditionalLaw:
    """Sampleable representation of the conditional law of Z given X = x."""

    structure: HittingStructure
    margins: tuple[MarginSpec, ...]
    weights: tuple[np.ndarray, ...]

    @property
    def z_hat(self) -> np.ndarray:
        return self.structure.z_hat

    @property
    def rank(self) -> int:
        return self.structure.rank


def conditional_law(
    model: MaxLinearModel, x, rel_tol: float = DEFAULT_REL_TOL
) -> ConditionalLaw:
    """Build the factorized conditional law for observed X = x."""
    structure = hitting_structure(model, x, rel_tol)
    if all(isinstance(m, Frechet) for m in model.margins):
        alphas = np.array([m.alpha for m in model.margins])
        scales = np.array([m.scale for m in model.margins])
        weights = frechet_class_weights(structure, alphas, scales)
    else:
        weights = class_weights(structure, model.margins)
    return ConditionalLaw(
        structure=structure, margins=model.margins, weights=tuple(weights)
    )


# --- brute-force oracle ---------------------------------------------------

def enumerate_relevant_scenarios(
    H, max_columns: int = BRUTE_FORCE_COLUMN_CAP
) -> list[tuple[int, ...]]:
    """All minimum-cardinality column subsets covering every row of H.

    Exhaustive search in increasing cardinality order; exponential in p,
    capped at ``max_columns`` columns because this exists only as an
    oracle for the factorized decomposition.
    """
    H = np.asarray(H, dtype=bool)
    n, p = H.shape
    if p > max_columns:
        raise TooLargeForBruteForceError(
            f"p = {p} exceeds brute-force cap {max_columns}"
        )
    col_masks = []
    for j in range(p):
        m = 0
        for i in np.flatnonzero(H[:, j]):
            m |= 1 << int(i)
        col_masks.append(m)
    full = (1 << n) - 1
    for r in range(1, p + 1):
        found = [
            combo
            for combo in itertools.combinations(range(p), r)
            if _covers(combo, col_masks, full)
        ]
        if found:
            return found
    raise ValueError("H has an uncoverable row")


def _covers(combo, col_masks, full) -> bool:
    m = 0
    for j in combo:
        m |= col_masks[j]
        if m == full:
            return True
    return False


@dataclass(frozen=True)
class ScenarioLaw:
    """Oracle mixture over relevant hitting scenarios.

    scenarios[k] is a tuple of column indices forced to their upper
    bounds; probabilities[k] is its mixture weight.
    """

    scenarios: tuple[tuple[int, ...], ...]
    probabilities: np.ndarray
    z_hat: np.ndarray
    margins: tuple[MarginSpec, ...]


def scenario_log_weights(
    scenarios: Sequence[Sequence[int]],
    margins: Sequence[MarginSpec],
    z_hat,
) -> np.ndarray:
    """Unnormalized log w_J for each scenario J:

    log w_J = sum_{j in J} [log zhat_j + log f_j(zhat_j) - log F_j(zhat_j)]
              + sum_j log F_j(zhat_j).
    """
    z_hat = np.asarray(z_hat, dtype=float)
    log_pdf, log_cdf = _margin_log_tables(margins, z_hat)
    base = log_cdf.sum()
    log_z = np.log(z_hat)
    per_col = log_z + log_pdf - log_cdf
    return np.array([base + per_col[list(J)].sum() for J in scenarios])


def scenario_probabilities(
    scenarios: Sequence[Sequence[int]],
    margins: Sequence[MarginSpec],
    z_hat,
) -> ScenarioLaw:
    """Normalize scenario weights into the oracle mixture law."""
    scenarios = [tuple(int(j) for j in J) for J in scenarios]
    if not scenarios:
        raise EmptyScenarioListError("no scenarios supplied")
    sizes = {len(J) for J in scenarios}
    if len(sizes) != 1:
        raise ValueError(f"scenarios must share one cardinality, got sizes {sizes}")
    z_hat = np.asarray(z_hat, dtype=float)
    probs = _normalize(scenario_log_weights(scenarios, margins, z_hat), "scenario list")
    return ScenarioLaw(
        scenarios=tuple(scenarios),
        probabilities=probs,
        z_hat=z_hat,
        margins=tuple(margins),
    )


def require_frechet(margins: Sequence[MarginSpec]) -> tuple[np.ndarray, np.ndarray]:
    """Return (alphas, scales) or raise if margins are not all Frechet."""
    if not all(isinstance(m, Frechet) for m in margins):
        kinds = sorted({m.kind for m in margins})
        raise MixedMarginKindsError(f"expected all-Frechet margins, got kinds {kinds}")
    return (
        np.array([m.alpha for m in margins]),
        np.array([m.scale for m in margins]),
    )
