"""Hamiltonians, operators and states of the PT-invariant models.

Parity is site reversal, P_jk = delta_{j, N+1-k}, and time reversal is
complex conjugation, so a model is PT-invariant when P conj(H) P = H.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ptmetric.errors import BadDimension, DimensionMismatch, MissingMetric, UsageError, ZeroVector
from ptmetric.linalg import as_matrix
from ptmetric.metric import MetricOperator, g_normalize
from ptmetric.spectral import BiorthogonalSystem

P_INF = math.inf
"""Marker for p = infinity in the generic two-level state (pure |E2>)."""

COLLINEARITY_TOL = 1e-8

PT_SYMMETRIC_STATE = "pt_symmetric_state"
PT_BROKEN_STATE = "pt_broken_state"

_KINDS = {"h2": "H2", "ha": "HA", "hb": "HB", "custom": "custom"}


@dataclass(frozen=True)
class ModelSpec:
    """Which Hamiltonian to build.

    ``N`` is the number of sites (fixed to 2 for ``H2``); ``HA`` and ``HB``
    need an even ``N >= 4``.  ``custom`` carries an explicit matrix.
    """

    kind: str
    N: int = 2
    gamma: float = 0.0
    matrix: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        kind = _KINDS.get(str(self.kind).lower())
        if kind is None:
            raise UsageError(f"unknown model kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if kind == "H2":
            object.__setattr__(self, "N", 2)
        elif kind in ("HA", "HB"):
            if int(self.N) != self.N or self.N < 4 or self.N % 2:
                raise BadDimension(f"{kind} needs an even N >= 4, got {self.N}")
        elif self.matrix is None:
            raise UsageError("custom model needs a matrix")
        else:
            object.__setattr__(self, "matrix", as_matrix(self.matrix))
            object.__setattr__(self, "N", self.matrix.shape[0])
        if self.gamma < 0:
            raise UsageError(f"gamma must be non-negative, got {self.gamma}")

    def at(self, gamma: float) -> "ModelSpec":
        return ModelSpec(self.kind, self.N, float(gamma), self.matrix)


def h2(gamma: float) -> np.ndarray:
    """[[i gamma, 1], [1, -i gamma]]."""
    return np.array([[1j * gamma, 1.0], [1.0, -1j * gamma]])


def pauli(axis: str) -> np.ndarray:
    mats = {
        "x": [[0, 1], [1, 0]],
        "y": [[0, -1j], [1j, 0]],
        "z": [[1, 0], [0, -1]],
    }
    try:
        return np.array(mats[axis.lower()], dtype=np.complex128)
    except KeyError:
        raise UsageError(f"unknown Pauli axis {axis!r}") from None


def lattice_hamiltonian(spec: ModelSpec) -> np.ndarray:
    """Open chain with unit hopping and balanced gain/loss at the centre.

    HA: +i gamma at site N/2 and -i gamma at N/2+1.
    HB: +i gamma at sites N/2-1, N/2 and -i gamma at N/2+1, N/2+2.
    Sites are 1-based.
    """
    if spec.kind not in ("HA", "HB"):
        raise BadDimension(f"lattice_hamiltonian needs HA or HB, got {spec.kind}")
    N = spec.N
    H = np.zeros((N, N), dtype=np.complex128)
    j = np.arange(N - 1)
    H[j, j + 1] = H[j + 1, j] = 1.0
    c = N // 2 - 1  # 0-based index of site N/2
    g = 1j * spec.gamma
    if spec.kind == "HA":
        H[c, c], H[c + 1, c + 1] = g, -g
    else:
        H[c - 1, c - 1] = H[c, c] = g
        H[c + 1, c + 1] = H[c + 2, c + 2] = -g
    return H


def hamiltonian(spec: ModelSpec) -> np.ndarray:
    if spec.kind == "H2":
        return h2(spec.gamma)
    if spec.kind == "custom":
        return spec.matrix.copy()
    return lattice_hamiltonian(spec)


def parity_op(N: int) -> np.ndarray:
    if N < 2:
        raise BadDimension(f"parity needs N >= 2, got {N}")
    return np.eye(N, dtype=np.complex128)[::-1].copy()


def pt_image(H, P=None) -> np.ndarray:
    """P conj(H) P."""
    H = np.asarray(H)
    P = parity_op(H.shape[0]) if P is None else P
    return P @ H.conj() @ P


def pt_align(sys: BiorthogonalSystem, P) -> BiorthogonalSystem:
    """Fix eigenvector phases with the PT operator.

    A right vector with real eigenvalue is rephased so that PT R = R.  For a
    complex-conjugate pair the later vector is rephased so that it is a
    positive multiple of PT applied to the earlier one.
    """
    R = sys.right
    w = sys.eigenvalues
    n = sys.n
    phases = np.ones(n, dtype=np.complex128)
    done: set[int] = set()
    for i in range(n):
        if i in done:
            continue
        pt = P @ R[:, i].conj()
        j = int(np.argmin(np.abs(w - np.conj(w[i]))))
        if j == i or j in done:
            c = np.vdot(R[:, i], pt)
            if c != 0:
                phases[i] = np.exp(0.5j * np.angle(c))
            done.add(i)
        else:
            c = np.vdot(R[:, j], pt)
            if c != 0:
                phases[j] = c / abs(c)
            done.update((i, j))
    return sys.with_phases(phases)


def generic_state(
    sys: BiorthogonalSystem,
    p: float,
    theta: float,
    norm: str = "dirac",
    G: MetricOperator | None = None,
) -> np.ndarray:
    """Normalized |E1> + p e^{i theta} |E2> built from a two-level system.

    ``p = P_INF`` gives |E2>.  ``norm`` is ``"dirac"`` or ``"g-metric"``.
    """
    if sys.n != 2:
        raise DimensionMismatch(f"generic_state needs a two-level system, got n={sys.n}")
    E1, E2 = sys.right[:, 0], sys.right[:, 1]
    if math.isinf(p):
        psi = E2.copy()
    else:
        psi = E1 + p * np.exp(1j * theta) * E2
    if norm in ("g", "g-metric"):
        if G is None:
            raise MissingMetric("g-metric normalization needs a metric")
        return g_normalize(G, psi)
    if norm != "dirac":
        raise UsageError(f"unknown normalization {norm!r}")
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        raise ZeroVector("generic state vanishes")
    return psi / nrm


@dataclass(frozen=True)
class StateClass:
    label: str
    collinearity: float


def classify_state(psi, P, tol: float = COLLINEARITY_TOL) -> StateClass:
    """PT-symmetric if P conj(psi) is parallel to psi (up to phase)."""
    psi = np.asarray(psi, dtype=np.complex128)
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        raise ZeroVector("cannot classify the zero vector")
    image = P @ psi.conj()
    col = abs(np.vdot(psi, image)) / (nrm * np.linalg.norm(image))
    col = min(float(col), 1.0)
    label = PT_SYMMETRIC_STATE if col >= 1 - tol else PT_BROKEN_STATE
    return StateClass(label, col)
