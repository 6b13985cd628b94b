"""Grid evaluations over (p, theta), kappa scans in gamma and EP bisection."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ptmetric.errors import BadBracket, CrossCheckFailed, DomainError, IncompleteGrid
from ptmetric.metric import MetricOperator, build_metric, identity_metric
from ptmetric.models import (
    P_INF,
    PT_SYMMETRIC_STATE,
    ModelSpec,
    classify_state,
    generic_state,
    hamiltonian,
    parity_op,
    pt_align,
)
from ptmetric.observables import DEFAULT_THRESHOLD, goodness
from ptmetric.spectral import SYMMETRIC, biorthogonal_system, phase_verdict
from ptmetric.uncertainty import DEFAULT_MUS_TOL, uncertainty_sides

DIRAC = "dirac"
G_METRIC = "g-metric"


def worker_count() -> int:
    env = os.environ.get("PTM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _map(fn, items, workers):
    workers = worker_count() if workers is None else max(1, workers)
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def default_p_grid(n: int = 201) -> np.ndarray:
    """p = tan(alpha) for alpha uniform in [0, pi/2]; the last point is P_INF."""
    alpha = np.linspace(0.0, np.pi / 2, n)
    p = np.tan(alpha)
    p[0] = 0.0
    p[-1] = P_INF
    if n % 4 == 1:
        p[(n - 1) // 2] = 1.0
    return p


def default_theta_grid(n: int = 201) -> np.ndarray:
    theta = np.linspace(0.0, 2 * np.pi, n)
    theta[-1] = 2 * np.pi
    return theta


def normalize_inner(inner: str) -> str:
    if inner in ("g", "g-metric", "G"):
        return G_METRIC
    if inner == DIRAC:
        return DIRAC
    raise ValueError(f"unknown inner product {inner!r}")


@dataclass(frozen=True)
class SweepRow:
    p: float
    theta: float
    eta: float
    varA: float
    varB: float
    lhs: float
    rhs: float
    lambdaG: float
    mus: bool
    state_class: str
    mus_residual: float = math.nan

    @property
    def degenerate(self) -> bool:
        return abs(self.lhs) <= 1e-12 and self.rhs <= 1e-12


@dataclass(frozen=True)
class SweepContext:
    """Everything a grid row needs; immutable so rows can run in parallel."""

    A: np.ndarray
    B: np.ndarray
    system: object
    metric: MetricOperator
    parity: np.ndarray
    inner: str
    mus_tol: float

    def row(self, p: float, theta: float) -> SweepRow:
        norm = G_METRIC if self.inner == G_METRIC else DIRAC
        psi = generic_state(self.system, p, theta, norm, self.metric)
        rep = uncertainty_sides(self.A, self.B, self.metric, psi, self.mus_tol)
        cls = classify_state(psi, self.parity).label
        return SweepRow(
            float(p), float(theta), rep.eta, rep.varA, rep.varB, rep.lhs, rep.rhs,
            rep.lambdaG, rep.is_mus, cls, rep.mus_residual,
        )


def sweep_context(A, B, H, inner: str, metric: MetricOperator | None = None,
                  mus_tol: float = DEFAULT_MUS_TOL) -> SweepContext:
    inner = normalize_inner(inner)
    H = np.asarray(H, dtype=np.complex128)
    P = parity_op(H.shape[0])
    sys = pt_align(biorthogonal_system(H), P)
    if inner == DIRAC:
        G = identity_metric(H.shape[0])
    else:
        G = build_metric(sys) if metric is None else metric
    return SweepContext(np.asarray(A, complex), np.asarray(B, complex), sys, G, P, inner, mus_tol)


def grid_sweep(A, B, H, inner: str, p_grid=None, theta_grid=None, *,
               metric: MetricOperator | None = None, mus_tol: float = DEFAULT_MUS_TOL,
               workers: int | None = None) -> list[SweepRow]:
    """Evaluate the uncertainty relation on the generic two-level state.

    Rows come back p-major (all theta for the first p, then the next p).
    """
    ctx = sweep_context(A, B, H, inner, metric, mus_tol)
    p_grid = default_p_grid() if p_grid is None else list(p_grid)
    theta_grid = default_theta_grid() if theta_grid is None else list(theta_grid)
    if len(p_grid) == 0 or len(theta_grid) == 0:
        raise IncompleteGrid("grids must be non-empty")
    lines = _map(lambda p: [ctx.row(p, t) for t in theta_grid], list(p_grid), workers)
    return [r for line in lines for r in line]


def row_is_mus(row: SweepRow, tol: float) -> bool:
    return abs(row.eta - 1.0) <= tol and row.mus_residual <= tol


@dataclass(frozen=True)
class MusLine:
    kind: str  # "p" or "theta"
    value: float
    state_class: str
    symmetric_fraction: float
    rows: int


_REQUIRED_P = (0.0, 1.0, P_INF)
_REQUIRED_THETA = (0.0, np.pi / 2, np.pi, 3 * np.pi / 2, 2 * np.pi)


def _has(values, target, tol):
    if math.isinf(target):
        return any(math.isinf(v) for v in values)
    return any(not math.isinf(v) and abs(v - target) <= tol for v in values)


def extract_mus_lines(rows, mus_tol: float = DEFAULT_MUS_TOL) -> list[MusLine]:
    """Constant-p and constant-theta grid lines on which every row is a MUS.

    Lines where both sides of the inequality vanish on every row (eigenstates
    of one observable, 0 = 0) are not reported.
    """
    rows = list(rows)
    ps = list(dict.fromkeys(r.p for r in rows))
    ths = list(dict.fromkeys(r.theta for r in rows))
    table = {(r.p, r.theta): r for r in rows}
    if len(table) != len(ps) * len(ths) or len(rows) != len(table):
        raise IncompleteGrid("rows do not form a full rectangular (p, theta) grid")
    missing = [v for v in _REQUIRED_P if not _has(ps, v, 1e-12)]
    missing += [v for v in _REQUIRED_THETA if not _has(ths, v, 1e-9)]
    if missing:
        raise IncompleteGrid(f"grid lacks required values {missing}")

    def summarize(kind, value, line):
        if not all(row_is_mus(r, mus_tol) for r in line):
            return None
        if all(r.degenerate for r in line):
            return None
        frac = sum(r.state_class == PT_SYMMETRIC_STATE for r in line) / len(line)
        label = PT_SYMMETRIC_STATE if frac > 0.5 else "pt_broken_state"
        return MusLine(kind, value, label, frac, len(line))

    out = []
    for p in ps:
        hit = summarize("p", p, [table[p, t] for t in ths])
        if hit:
            out.append(hit)
    for t in ths:
        hit = summarize("theta", t, [table[p, t] for p in ps])
        if hit:
            out.append(hit)
    return out


@dataclass(frozen=True)
class ScanRow:
    gamma: float
    kappa: float  # NaN marks a point where the metric cannot be built
    phase: str

    @property
    def is_sentinel(self) -> bool:
        return math.isnan(self.kappa)


def kappa_at(spec: ModelSpec, gamma: float) -> float:
    """kappa of the Hamiltonian against its own metric, NaN near an EP."""
    H = hamiltonian(spec.at(gamma))
    try:
        G = build_metric(biorthogonal_system(H))
    except DomainError:
        return math.nan
    return goodness(H, G).kappa


def kappa_scan(spec: ModelSpec, gammas, workers: int | None = None) -> list[ScanRow]:
    def one(g):
        g = float(g)
        H = hamiltonian(spec.at(g))
        return ScanRow(g, kappa_at(spec, g), phase_verdict(H).label)

    return _map(one, list(gammas), workers)


def _bisect(pred, lo: float, hi: float, tol: float) -> float:
    a, b = pred(lo), pred(hi)
    if a == b:
        raise BadBracket(f"criterion does not change between {lo} and {hi}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid) == a:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def is_good_hamiltonian(spec: ModelSpec, gamma: float, threshold: float = DEFAULT_THRESHOLD) -> bool:
    k = kappa_at(spec, gamma)
    return not math.isnan(k) and k <= threshold


def is_symmetric_spectrum(spec: ModelSpec, gamma: float) -> bool:
    return phase_verdict(hamiltonian(spec.at(gamma))).label == SYMMETRIC


def find_ep_spectral(spec: ModelSpec, bracket, tol: float = 1e-3) -> float:
    """EP from the reality of the spectrum alone."""
    lo, hi = map(float, bracket)
    return _bisect(lambda g: is_symmetric_spectrum(spec, g), lo, hi, tol)


def find_ep(spec: ModelSpec, bracket, tol: float = 1e-3,
            threshold: float = DEFAULT_THRESHOLD, cross_check: bool = True) -> float:
    """Bisect on whether the Hamiltonian is a good observable of its own metric.

    With ``cross_check`` the result must agree with the spectral criterion
    within 10*tol.
    """
    lo, hi = map(float, bracket)
    if lo >= hi:
        raise BadBracket(f"empty bracket ({lo}, {hi})")
    g_ep = _bisect(lambda g: is_good_hamiltonian(spec, g, threshold), lo, hi, tol)
    if cross_check:
        g_spec = find_ep_spectral(spec, (lo, hi), tol)
        if abs(g_spec - g_ep) > 10 * tol:
            raise CrossCheckFailed(
                f"kappa criterion gives {g_ep:.6g}, spectrum gives {g_spec:.6g}"
            )
    return g_ep


def first_transition(rows, threshold: float = DEFAULT_THRESHOLD):
    """Bracket (g_i, g_{i+1}) around the first good -> not-good step in a scan."""
    def good(r):
        return not r.is_sentinel and r.kappa <= threshold

    seen_good = False
    prev = None
    for r in rows:
        if good(r):
            seen_good = True
            prev = r
        elif seen_good and prev is not None:
            return prev.gamma, r.gamma
    return None

