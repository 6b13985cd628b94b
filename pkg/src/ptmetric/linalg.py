"""Dense complex linear algebra.

The general (non-Hermitian) eigensolver is self-contained: Householder
reduction to upper Hessenberg form, single-shift complex QR iterations for
the eigenvalues, then inverse iteration for one right eigenvector per
eigenvalue.  The Hermitian path delegates to LAPACK through numpy.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from ptmetric.errors import (
    DefectivePencil,
    NoConvergence,
    NotHermitian,
    NotPositiveDefinite,
    NotSquare,
    UsageError,
)

DEFLATION_TOL = 1e-12
SWEEPS_PER_DIM = 100
RESIDUAL_TOL = 1e-8
DEGENERACY_TOL = 1e-10
HERMITIAN_TOL = 1e-12
_EPS = np.finfo(float).eps


def as_matrix(M) -> np.ndarray:
    """Validate and copy ``M`` into a square, finite complex128 array."""
    A = np.array(M, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise NotSquare(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise UsageError("matrix has non-finite entries")
    return A


def frobenius(M) -> float:
    return float(np.linalg.norm(M, "fro"))


def entrywise_abs_sum(M) -> float:
    """Sum of |M_rs| over all entries."""
    return float(np.abs(np.asarray(M)).sum())


def is_hermitian(M, tol: float = HERMITIAN_TOL) -> bool:
    A = np.asarray(M)
    scale = max(1.0, float(np.abs(A).max(initial=0.0)))
    return bool(np.abs(A - A.conj().T).max(initial=0.0) <= tol * scale)


@dataclass(frozen=True)
class HermitianEigenResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class GeneralEigenResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    converged: np.ndarray
    near_degenerate: np.ndarray

    @property
    def n(self) -> int:
        return len(self.eigenvalues)


def hermitian_eig(M) -> HermitianEigenResult:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending."""
    A = as_matrix(M)
    if not is_hermitian(A):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    A = 0.5 * (A + A.conj().T)
    try:
        w, V = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return HermitianEigenResult(w, V)


def _hermitian_power(M, power: float) -> np.ndarray:
    res = hermitian_eig(M)
    w = res.eigenvalues
    if w[0] <= 1e-12:
        raise NotPositiveDefinite(f"smallest eigenvalue {w[0]:.3e} is not positive")
    V = res.eigenvectors
    S = (V * w**power) @ V.conj().T
    return 0.5 * (S + S.conj().T)


def hermitian_sqrt(M) -> np.ndarray:
    """Principal square root of a Hermitian positive-definite matrix."""
    return _hermitian_power(M, 0.5)


def hermitian_inv_sqrt(M) -> np.ndarray:
    return _hermitian_power(M, -0.5)


# --- general eigensolver -------------------------------------------------


def hessenberg(M) -> np.ndarray:
    """Unitarily similar upper Hessenberg form (Householder reflections)."""
    H = as_matrix(M)
    n = H.shape[0]
    for k in range(n - 2):
        x = H[k + 1 :, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        H[k + 1 :, k:] -= 2.0 * np.outer(v, v.conj() @ H[k + 1 :, k:])
        H[:, k + 1 :] -= 2.0 * np.outer(H[:, k + 1 :] @ v, v.conj())
        H[k + 2 :, k] = 0.0
    return H


def _eig2(a, b, c, d):
    half_trace = 0.5 * (a + d)
    disc = np.sqrt((0.5 * (a - d)) ** 2 + b * c)
    return half_trace + disc, half_trace - disc


def _wilkinson_shift(W):
    a, b, c, d = W[-2, -2], W[-2, -1], W[-1, -2], W[-1, -1]
    l1, l2 = _eig2(a, b, c, d)
    return l1 if abs(l1 - d) <= abs(l2 - d) else l2


def _qr_step(W, mu):
    # one shifted QR sweep, in place, on an unreduced Hessenberg window
    m = W.shape[0]
    idx = np.arange(m)
    W[idx, idx] -= mu
    rots = []
    for k in range(m - 1):
        a, b = W[k, k], W[k + 1, k]
        r = np.hypot(abs(a), abs(b))
        if r == 0.0:
            c, s = 1.0, 0.0
        else:
            c, s = a / r, b / r
        x = W[k, k:].copy()
        y = W[k + 1, k:]
        W[k, k:] = np.conj(c) * x + np.conj(s) * y
        W[k + 1, k:] = -s * x + c * y
        rots.append((c, s))
    for k, (c, s) in enumerate(rots):
        top = min(k + 2, m - 1) + 1
        x = W[:top, k].copy()
        y = W[:top, k + 1]
        W[:top, k] = x * c + y * s
        W[:top, k + 1] = -x * np.conj(s) + y * np.conj(c)
    W[idx, idx] += mu


def eigvals(M) -> np.ndarray:
    """Eigenvalues by Hessenberg reduction and shifted QR (unsorted)."""
    H = hessenberg(M)
    n = H.shape[0]
    scale = max(frobenius(H), np.finfo(float).tiny)
    w = np.empty(n, dtype=np.complex128)
    cap = SWEEPS_PER_DIM * n
    sweeps = 0
    its = 0
    hi = n - 1
    while hi >= 0:
        lo = hi
        while lo > 0:
            s = abs(H[lo - 1, lo - 1]) + abs(H[lo, lo])
            sub = abs(H[lo, lo - 1])
            if sub <= DEFLATION_TOL * s or sub <= _EPS * scale:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            w[hi] = H[hi, hi]
            hi -= 1
            its = 0
            continue
        if lo == hi - 1:
            w[hi - 1], w[hi] = _eig2(H[lo, lo], H[lo, hi], H[hi, lo], H[hi, hi])
            hi -= 2
            its = 0
            continue
        sweeps += 1
        if sweeps > cap:
            raise NoConvergence(f"QR iteration exceeded {cap} sweeps")
        its += 1
        W = H[lo : hi + 1, lo : hi + 1]
        if its % 10 == 0:
            mu = W[-1, -1] + 0.75 * abs(W[-1, -2]) * (1.0 + 0.5j)
        else:
            mu = _wilkinson_shift(W)
        _qr_step(W, mu)
    return w


def _sort_order(w: np.ndarray, tol: float) -> list[int]:
    # descending real part, ties (within tol) by descending imaginary part
    def cmp(i, j):
        if abs(w[i].real - w[j].real) > tol:
            return -1 if w[i].real > w[j].real else 1
        if abs(w[i].imag - w[j].imag) > tol:
            return -1 if w[i].imag > w[j].imag else 1
        return i - j

    return sorted(range(len(w)), key=functools.cmp_to_key(cmp))


def sorted_eigvals(M) -> np.ndarray:
    A = as_matrix(M)
    w = eigvals(A)
    tol = 1e-9 * max(frobenius(A), 1.0)
    return w[_sort_order(w, tol)]


def _fix_phase(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    mag = np.abs(v)
    j = int(np.flatnonzero(mag >= (1 - 1e-8) * mag.max())[0])
    v = v * (abs(v[j]) / v[j])
    v[j] = abs(v[j])
    return v


def _start_vector(n: int, k: int) -> np.ndarray:
    j = np.arange(n)
    x = 1.0 + 0.5 * np.cos(0.9 * (k + 1) * (j + 1)) + 0.3j * np.sin(1.7 * (k + 1) + 0.4 * j)
    return x / np.linalg.norm(x)


def _lu_factor(B, pivot_floor):
    # partial pivoting; pivots below the floor are replaced by it so that
    # exactly singular shifts (defective or repeated eigenvalues) still solve
    LU = B.copy()
    n = LU.shape[0]
    perm = np.arange(n)
    for k in range(n):
        p = k + int(np.argmax(np.abs(LU[k:, k])))
        if p != k:
            LU[[k, p]] = LU[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        if abs(LU[k, k]) < pivot_floor:
            LU[k, k] = pivot_floor
        LU[k + 1 :, k] /= LU[k, k]
        LU[k + 1 :, k + 1 :] -= np.outer(LU[k + 1 :, k], LU[k, k + 1 :])
    return LU, perm


def _lu_solve(LU, perm, b):
    n = LU.shape[0]
    y = b[perm].astype(np.complex128)
    for k in range(1, n):
        y[k] -= LU[k, :k] @ y[:k]
    for k in range(n - 1, -1, -1):
        y[k] = (y[k] - LU[k, k + 1 :] @ y[k + 1 :]) / LU[k, k]
    return y


def _inverse_iteration(A, lam, start, basis=(), max_iter=8):
    n = A.shape[0]
    scale = max(frobenius(A), 1.0)
    LU, perm = _lu_factor(A - lam * np.eye(n), _EPS * scale)
    x = start.copy()
    for q in basis:
        x -= (q.conj() @ x) * q
    x /= np.linalg.norm(x)
    for _ in range(max_iter):
        y = _lu_solve(LU, perm, x)
        for q in basis:
            y -= (q.conj() @ y) * q
        nrm = np.linalg.norm(y)
        if nrm == 0.0 or not np.isfinite(nrm):
            break
        x = y / nrm
        if np.linalg.norm(A @ x - lam * x) <= 1e-14 * scale:
            break
    return x


def general_eig(M) -> GeneralEigenResult:
    """Eigenvalues and unit right eigenvectors of a general complex matrix.

    Eigenpairs are sorted by descending real part, ties by descending
    imaginary part.  Eigenvectors carry the phase convention that their
    first largest-magnitude component is real and positive.

    Raises:
        NoConvergence: the QR iteration exceeded its sweep cap.
        DefectivePencil: a (near-)degenerate eigenvalue does not have
            enough independent eigenvectors, as at an exceptional point.
    """
    A = as_matrix(M)
    n = A.shape[0]
    scale = max(frobenius(A), 1.0)
    w = eigvals(A)
    order = _sort_order(w, 1e-9 * scale)
    w = w[order]

    gap_tol = DEGENERACY_TOL * frobenius(A)
    near = np.zeros(n, dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(w[i] - w[j]) <= gap_tol:
                near[i] = near[j] = True

    V = np.empty((n, n), dtype=np.complex128)
    converged = np.zeros(n, dtype=bool)
    bound = RESIDUAL_TOL * frobenius(A)
    for k in range(n):
        cluster = [j for j in range(k) if abs(w[j] - w[k]) <= gap_tol]
        x = _inverse_iteration(A, w[k], _start_vector(n, k))
        if cluster:
            if max(abs(V[:, j].conj() @ x) for j in cluster) > 1 - 1e-6:
                Q, _ = np.linalg.qr(V[:, cluster])
                x = _inverse_iteration(A, w[k], _start_vector(n, k), basis=list(Q.T))
                if np.linalg.norm(A @ x - w[k] * x) > bound:
                    raise DefectivePencil(
                        f"eigenvalue {w[k]:.6g} is defective: eigenvectors coalesce"
                    )
        lam_rq = x.conj() @ A @ x
        if np.linalg.norm(A @ x - lam_rq * x) < np.linalg.norm(A @ x - w[k] * x):
            w[k] = lam_rq
        V[:, k] = _fix_phase(x)
        converged[k] = np.linalg.norm(A @ V[:, k] - w[k] * V[:, k]) <= bound
    return GeneralEigenResult(w, V, converged, near)
