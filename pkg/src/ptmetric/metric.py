"""The metric operator G and the G-inner product."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ptmetric.errors import (
    DimensionMismatch,
    IllConditioned,
    NotPositiveDefinite,
    OutOfDomain,
    UsageError,
    ZeroVector,
)
from ptmetric.linalg import as_matrix, hermitian_eig
from ptmetric.spectral import BROKEN, SYMMETRIC, BiorthogonalSystem

MAX_CONDITION = 1e12


@dataclass(frozen=True)
class MetricOperator:
    matrix: np.ndarray
    min_eigenvalue: float
    condition_number: float
    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def metric_matrix(G) -> np.ndarray:
    return G.matrix if isinstance(G, MetricOperator) else np.asarray(G)


def from_matrix(G, weights=None) -> MetricOperator:
    """Wrap a Hermitian positive-definite matrix, checking it spectrally."""
    G = as_matrix(G)
    G = 0.5 * (G + G.conj().T)
    w = hermitian_eig(G).eigenvalues
    if w[0] <= 0.0:
        raise NotPositiveDefinite(f"metric has non-positive eigenvalue {w[0]:.3e}")
    cond = float(w[-1] / w[0])
    if weights is None:
        weights = np.ones(G.shape[0])
    return MetricOperator(G, float(w[0]), cond, np.asarray(weights, dtype=float))


def identity_metric(n: int) -> MetricOperator:
    """The Dirac inner product as a metric."""
    return MetricOperator(np.eye(n, dtype=np.complex128), 1.0, 1.0, np.ones(n))


def unit_determinant(G: MetricOperator) -> MetricOperator:
    """Rescale G so that det G = 1."""
    w = hermitian_eig(G.matrix).eigenvalues
    factor = float(np.exp(-np.mean(np.log(w))))
    return MetricOperator(
        G.matrix * factor, G.min_eigenvalue * factor, G.condition_number, G.weights
    )


def build_metric(sys: BiorthogonalSystem, weights=None, unit_det: bool = False) -> MetricOperator:
    """G = sum_i w_i |L_i><L_i| from the left eigenvectors of ``sys``.

    Raises:
        IllConditioned: G is not safely positive definite (condition number
            above 1e12 or a non-positive eigenvalue), which happens near an
            exceptional point.
    """
    n = sys.n
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (n,):
        raise DimensionMismatch(f"expected {n} weights, got shape {w.shape}")
    if np.any(w <= 0) or not np.all(np.isfinite(w)):
        raise UsageError("metric weights must be finite and strictly positive")
    L = sys.left
    G = (L * w) @ L.conj().T
    G = 0.5 * (G + G.conj().T)
    ev = hermitian_eig(G).eigenvalues
    if ev[0] <= 0.0 or ev[-1] / ev[0] > MAX_CONDITION:
        cond = ev[-1] / ev[0] if ev[0] > 0 else float("inf")
        raise IllConditioned(f"metric condition number {cond:.3e} exceeds {MAX_CONDITION:.0e}")
    metric = MetricOperator(G, float(ev[0]), float(ev[-1] / ev[0]), w)
    return unit_determinant(metric) if unit_det else metric


def closed_form_metric_2x2(gamma: float, phase: str) -> MetricOperator:
    """Closed-form unit-determinant metric of the two-level model H(gamma)."""
    g = float(gamma)
    if phase == SYMMETRIC:
        if not 0.0 <= g < 1.0:
            raise OutOfDomain(f"symmetric-phase metric needs 0 <= gamma < 1, got {g}")
        G = np.array([[1.0, -1j * g], [1j * g, 1.0]]) / np.sqrt(1.0 - g * g)
    elif phase == BROKEN:
        if not g > 1.0:
            raise OutOfDomain(f"broken-phase metric needs gamma > 1, got {g}")
        G = np.array([[g, -1j], [1j, g]]) / np.sqrt(g * g - 1.0)
    else:
        raise OutOfDomain(f"unknown phase {phase!r}")
    return from_matrix(G)


def _vectors(G, *vecs):
    Gm = metric_matrix(G)
    out = [np.asarray(v, dtype=np.complex128) for v in vecs]
    for v in out:
        if v.shape != (Gm.shape[0],):
            raise DimensionMismatch(f"vector shape {v.shape} does not match metric {Gm.shape}")
    return Gm, out


def g_inner(G, phi, psi) -> complex:
    """<phi|G|psi>."""
    Gm, (phi, psi) = _vectors(G, phi, psi)
    return complex(phi.conj() @ Gm @ psi)


def g_norm(G, psi) -> float:
    return float(np.sqrt(max(g_inner(G, psi, psi).real, 0.0)))


def g_normalize(G, psi) -> np.ndarray:
    Gm, (psi,) = _vectors(G, psi)
    if not np.any(psi):
        raise ZeroVector("cannot normalize the zero vector")
    nrm = np.sqrt((psi.conj() @ Gm @ psi).real)
    return psi / nrm
