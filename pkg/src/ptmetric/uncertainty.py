"""G-metric variances, the Robertson-type bound and minimum-uncertainty tests.

For a G-normalized state and good observables A, B::

    varA * varB >= |<psi|G[A,B]|psi>|^2 / 4

with varA = <psi|G A^2|psi> - <psi|G A|psi>^2.  G = identity gives the
ordinary Robertson relation.  ``eta`` is the ratio of the two sides and a
minimum-uncertainty state (MUS) has eta = 1; equivalently it is an
eigenstate of A + i*lambdaG*B with lambdaG^2 = varA / varB.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ptmetric.errors import DegenerateVariance, DimensionMismatch, NotNormalized
from ptmetric.linalg import as_matrix
from ptmetric.metric import metric_matrix

NORMALIZATION_TOL = 1e-9
VARIANCE_FLOOR = 1e-12
ZERO_SIDE = 1e-12
DEFAULT_MUS_TOL = 1e-6


def _prepare(G, psi, *ops):
    Gm = metric_matrix(G)
    psi = np.asarray(psi, dtype=np.complex128)
    n = Gm.shape[0]
    if psi.shape != (n,):
        raise DimensionMismatch(f"state of shape {psi.shape} for metric of size {n}")
    mats = []
    for O in ops:
        O = as_matrix(O)
        if O.shape != (n, n):
            raise DimensionMismatch(f"operator {O.shape} for metric of size {n}")
        mats.append(O)
    norm = (psi.conj() @ Gm @ psi).real
    if abs(norm - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"<psi|G|psi> = {norm:.12g}, expected 1")
    return Gm, psi, mats


def g_expectation(O, G, psi) -> complex:
    """<psi|G O|psi> (no normalization check)."""
    return complex(np.conj(psi) @ metric_matrix(G) @ np.asarray(O) @ psi)


def _variance(Gm, O, psi):
    Opsi = O @ psi
    bra = psi.conj() @ Gm
    mean = bra @ Opsi
    return (bra @ (O @ Opsi) - mean * mean).real, mean


def g_variance(O, G, psi) -> float:
    """Re(<psi|G O^2|psi> - <psi|G O|psi>^2) for a G-normalized state."""
    Gm, psi, (O,) = _prepare(G, psi, O)
    return float(_variance(Gm, O, psi)[0])


def _residual(A, B, psi, lam, r, p):
    # both signs of lambdaG are admissible; keep the smaller residual
    Apsi = A @ psi
    Bpsi = B @ psi
    best = math.inf
    for s in (1.0, -1.0):
        v = Apsi + 1j * s * lam * Bpsi - (r + 1j * s * lam * p) * psi
        best = min(best, float(np.linalg.norm(v)))
    return best


@dataclass(frozen=True)
class UncertaintyReport:
    varA: float
    varB: float
    lhs: float
    rhs: float
    eta: float
    lambdaG: float
    mus_residual: float
    is_mus: bool

    @property
    def degenerate(self) -> bool:
        """Both sides vanish, so eta = 1 holds by convention only."""
        return abs(self.lhs) <= ZERO_SIDE and self.rhs <= ZERO_SIDE


def _eta(lhs, rhs):
    if abs(lhs) <= ZERO_SIDE and rhs <= ZERO_SIDE:
        return 1.0
    if rhs == 0.0:
        return math.copysign(math.inf, lhs)
    return lhs / rhs


def _lambda_and_residual(A, B, psi, varA, varB, r, p):
    if abs(varB) <= VARIANCE_FLOOR:
        # lambdaG -> infinity: the eigen-equation reduces to (B - p) psi = 0
        return math.inf, float(np.linalg.norm(B @ psi - p * psi))
    if varB < 0 or varA < -VARIANCE_FLOOR:
        return math.nan, math.nan
    lam = math.sqrt(max(varA, 0.0) / varB)
    return lam, _residual(A, B, psi, lam, r, p)


def uncertainty_sides(A, B, G, psi, mus_tol: float = DEFAULT_MUS_TOL) -> UncertaintyReport:
    Gm, psi, (A, B) = _prepare(G, psi, A, B)
    varA, r = _variance(Gm, A, psi)
    varB, p = _variance(Gm, B, psi)
    comm = psi.conj() @ Gm @ (A @ (B @ psi) - B @ (A @ psi))
    lhs = float(varA * varB)
    rhs = float(0.25 * abs(comm) ** 2)
    eta = _eta(lhs, rhs)
    lam, res = _lambda_and_residual(A, B, psi, varA, varB, r, p)
    is_mus = bool(res <= mus_tol and abs(eta - 1.0) <= mus_tol)
    return UncertaintyReport(float(varA), float(varB), lhs, rhs, eta, lam, res, is_mus)


def mus_test(A, B, G, psi, tol: float = DEFAULT_MUS_TOL) -> tuple[float, float, bool]:
    """Test whether ``psi`` is an eigenstate of A + i*lambdaG*B.

    Returns:
        (lambdaG, residual, is_mus) where residual is the smaller of
        |(A +- i lambdaG B) psi - (r +- i lambdaG p) psi| over both signs.

    Raises:
        DegenerateVariance: varB <= 1e-12, where lambdaG is undefined.
    """
    Gm, psi, (A, B) = _prepare(G, psi, A, B)
    varA, r = _variance(Gm, A, psi)
    varB, p = _variance(Gm, B, psi)
    if varB <= VARIANCE_FLOOR:
        raise DegenerateVariance(f"variance of B is {varB:.3e}; lambdaG is undefined")
    lam = math.sqrt(max(varA, 0.0) / varB)
    res = _residual(A, B, psi, lam, r, p)
    return lam, res, res <= tol


def cross_term(A, B, G, psi) -> complex:
    """<psi|G(AB + BA)|psi> - 2 r p; vanishes on minimum-uncertainty states."""
    Gm, psi, (A, B) = _prepare(G, psi, A, B)
    bra = psi.conj() @ Gm
    r = bra @ A @ psi
    p = bra @ B @ psi
    return complex(bra @ (A @ B + B @ A) @ psi - 2 * r * p)
