"""Good observables: O^dagger G = G O."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ptmetric.errors import DimensionMismatch, OutOfDomain, ZeroOperator
from ptmetric.linalg import as_matrix, entrywise_abs_sum, hermitian_inv_sqrt, hermitian_sqrt
from ptmetric.metric import metric_matrix
from ptmetric.spectral import BROKEN, SYMMETRIC

DEFAULT_THRESHOLD = 1e-8


@dataclass(frozen=True)
class GoodnessReport:
    K: np.ndarray
    kappa: float
    verdict: bool
    threshold: float


def deviation(O, G) -> np.ndarray:
    """K = O^dagger G - G O."""
    O = as_matrix(O)
    Gm = metric_matrix(G)
    if O.shape != Gm.shape:
        raise DimensionMismatch(f"operator {O.shape} and metric {Gm.shape} differ")
    return O.conj().T @ Gm - Gm @ O


def kappa(O, G) -> float:
    """Scale-invariant size of the deviation from the good-observable condition.

    kappa = n^2 * sum|K_rs| / (sum|O_rs| * sum|G_rs|); zero exactly for a
    good observable.
    """
    return goodness(O, G).kappa


def goodness(O, G, threshold: float = DEFAULT_THRESHOLD) -> GoodnessReport:
    K = deviation(O, G)
    n = K.shape[0]
    o_sum = entrywise_abs_sum(O)
    g_sum = entrywise_abs_sum(metric_matrix(G))
    if o_sum == 0.0 or g_sum == 0.0:
        raise ZeroOperator("kappa is undefined for a zero operator or metric")
    k = n * n * entrywise_abs_sum(K) / (o_sum * g_sum)
    return GoodnessReport(K, k, k <= threshold, threshold)


def good_observable_2x2(gamma: float, phase: str, x: float, y: float) -> np.ndarray:
    """Two-parameter family of good observables for the metric of H(gamma).

    The symmetric-phase family contains H(gamma) (x=1, y=0) and sigma_y
    (x=0, y=1); the broken-phase family contains H(1/gamma) instead.
    """
    g = float(gamma)
    if phase == SYMMETRIC:
        if not 0.0 <= g < 1.0:
            raise OutOfDomain(f"symmetric phase needs 0 <= gamma < 1, got {g}")
        return np.array([[1j * g * x, x - 1j * y], [x + 1j * y, -1j * g * x]])
    if phase == BROKEN:
        if not g > 1.0:
            raise OutOfDomain(f"broken phase needs gamma > 1, got {g}")
        return np.array([[1j * x, g * (x - 1j * y)], [g * (x + 1j * y), -1j * x]]) / g
    raise OutOfDomain(f"unknown phase {phase!r}")


def hermitize(O, G) -> np.ndarray:
    """Similarity transform G^{1/2} O G^{-1/2}; Hermitian iff O is good."""
    O = as_matrix(O)
    Gm = metric_matrix(G)
    if O.shape != Gm.shape:
        raise DimensionMismatch(f"operator {O.shape} and metric {Gm.shape} differ")
    return hermitian_sqrt(Gm) @ O @ hermitian_inv_sqrt(Gm)
