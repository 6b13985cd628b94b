"""Biorthonormal eigensystems and PT-phase classification of a spectrum.

Pairing convention: ``H @ R[:, i] = h[i] * R[:, i]`` and
``H^dagger @ L[:, i] = conj(h[i]) * L[:, i]`` with ``<R_i|L_j> = delta_ij``.
The metric and the kappa identifier only use the set of left vectors, so
this choice does not change them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np

from ptmetric.errors import DefectivePencil, ExceptionalPoint
from ptmetric.linalg import as_matrix, frobenius, general_eig, sorted_eigvals

CONDITIONING_FLOOR = 1e-8

SYMMETRIC = "symmetric"
BROKEN = "broken"
EXCEPTIONAL = "exceptional"


@dataclass(frozen=True)
class BiorthogonalSystem:
    """Matched right/left eigenpairs; columns of ``right`` and ``left``."""

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    conditioning: float

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    def overlaps(self) -> np.ndarray:
        """Matrix of <R_i|L_j>; the identity for a valid system."""
        return self.right.conj().T @ self.left

    def completeness(self) -> np.ndarray:
        return self.right @ self.left.conj().T

    def reconstruct(self) -> np.ndarray:
        return (self.right * self.eigenvalues) @ self.left.conj().T

    def with_phases(self, phases) -> "BiorthogonalSystem":
        # rephasing R_i and L_i together keeps <R_i|L_i> = 1
        phases = np.asarray(phases, dtype=np.complex128)
        return replace(self, right=self.right * phases, left=self.left * phases)


def biorthogonal_system(H) -> BiorthogonalSystem:
    """Biorthonormalized right/left eigenvectors of ``H``.

    Left vectors are the conjugated rows of the inverse right-eigenvector
    matrix, so biorthogonality holds by construction.  Each pair is then
    rescaled by a positive factor so that ``|L_i| == |R_i|``.

    Raises:
        ExceptionalPoint: eigenvectors coalesce (defective spectrum, or the
            right-eigenvector matrix has smallest singular value below 1e-8).
    """
    H = as_matrix(H)
    try:
        eig = general_eig(H)
    except DefectivePencil as exc:
        raise ExceptionalPoint(str(exc)) from exc
    V = eig.eigenvectors.copy()
    conditioning = float(np.linalg.svd(V, compute_uv=False)[-1])
    if conditioning < CONDITIONING_FLOOR:
        raise ExceptionalPoint(
            f"right eigenvectors nearly coalesce (min singular value {conditioning:.2e})"
        )
    L = np.linalg.inv(V).conj().T
    c = np.sqrt(np.linalg.norm(L, axis=0) / np.linalg.norm(V, axis=0))
    return BiorthogonalSystem(eig.eigenvalues, V * c, L / c, conditioning)


@dataclass(frozen=True)
class PhaseVerdict:
    label: str
    max_imag: float
    min_gap: float


def default_tolerances(H) -> tuple[float, float]:
    norm = frobenius(H)
    return 1e-9 * norm, 1e-10 * norm


def phase_verdict(H, tol_imag: float | None = None, tol_gap: float | None = None) -> PhaseVerdict:
    """Classify the PT phase of ``H`` from its spectrum alone."""
    H = as_matrix(H)
    d_imag, d_gap = default_tolerances(H)
    tol_imag = d_imag if tol_imag is None else tol_imag
    tol_gap = d_gap if tol_gap is None else tol_gap
    w = sorted_eigvals(H)
    max_imag = float(np.abs(w.imag).max())
    gaps = [abs(a - b) for a, b in itertools.combinations(w, 2)]
    min_gap = float(min(gaps)) if gaps else float("inf")
    if min_gap <= tol_gap:
        label = EXCEPTIONAL
    elif max_imag <= tol_imag:
        label = SYMMETRIC
    else:
        label = BROKEN
    return PhaseVerdict(label, max_imag, min_gap)
