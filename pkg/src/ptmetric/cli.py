"""Command-line front end.

Examples:
  ptm check-obs --model h2 --gamma 0.2 --obs sigma_y
  ptm sweep --model h2 --gamma 0.2 --inner g --obs hamiltonian --obs sigma_y --out good_pair.csv
  ptm ep-scan --model hA --n 10 --gamma 0.5:1.5:0.01 --out kappa_hA.csv

Exit status: 0 on success, 1 on domain errors (exceptional point,
ill-conditioned metric), 2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from ptmetric import __version__
from ptmetric.errors import DomainError, PTMError, UsageError
from ptmetric.io import (
    MUS_LINE_COLUMNS,
    SCAN_COLUMNS,
    SWEEP_COLUMNS,
    matrix_to_json,
    parse_matrix_file,
    render_rows,
    atomic_write,
)
from ptmetric.metric import build_metric
from ptmetric.models import ModelSpec, hamiltonian, h2, pauli
from ptmetric.observables import DEFAULT_THRESHOLD, goodness
from ptmetric.spectral import biorthogonal_system, phase_verdict
from ptmetric.sweep import (
    default_p_grid,
    default_theta_grid,
    extract_mus_lines,
    find_ep,
    first_transition,
    grid_sweep,
    kappa_scan,
)
from ptmetric.uncertainty import DEFAULT_MUS_TOL

log = logging.getLogger("ptmetric")

COMMANDS = ("eig", "metric", "check-obs", "sweep", "mus", "ep-scan")
BUILTIN_OBS = ("sigma_x", "sigma_y", "sigma_z", "hamiltonian", "h_inv_gamma")


@dataclass
class RunConfig:
    command: str
    model: str = "h2"
    matrix: str | None = None
    gamma: str = "0.2"
    n: int = 10
    inner: str = "g"
    observables: list = field(default_factory=list)
    p_grid: str | None = None
    theta_grid: str | None = None
    tol_kappa: float = DEFAULT_THRESHOLD
    tol_mus: float = DEFAULT_MUS_TOL
    tol_ep: float = 1e-4
    tol_imag: float | None = None
    tol_gap: float | None = None
    unit_det: bool = False
    out: str | None = None
    format: str = "csv"


def parse_gamma_range(text: str) -> np.ndarray:
    """``lo:hi:step`` (inclusive of hi) or a single float."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) != 3:
            raise ValueError
        lo, hi, step = map(float, parts)
    except ValueError:
        raise UsageError(f"bad gamma specification {text!r}; use a float or lo:hi:step") from None
    if step <= 0 or hi < lo:
        raise UsageError(f"bad gamma range {text!r}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return np.round(lo + step * np.arange(count), 12)


def single_gamma(text: str) -> float:
    g = parse_gamma_range(text)
    if len(g) != 1:
        raise UsageError("this command takes a single --gamma value")
    return float(g[0])


def parse_grid(text: str | None, default, name: str) -> np.ndarray:
    if text is None:
        return default()
    text = text.strip()
    if text.isdigit():
        count = int(text)
        if count < 2:
            raise UsageError(f"{name} needs at least 2 points")
        return default(count)
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise UsageError(f"bad {name} {text!r}; use a point count or a comma list") from None


def model_spec(cfg: RunConfig, gamma: float = 0.0) -> ModelSpec:
    kind = cfg.model.lower()
    if kind == "file":
        if not cfg.matrix:
            raise UsageError("--model file needs --matrix PATH")
        return ModelSpec("custom", matrix=parse_matrix_file(cfg.matrix))
    if kind == "h2":
        return ModelSpec("H2", 2, gamma)
    if kind in ("ha", "hb"):
        return ModelSpec(kind, cfg.n, gamma)
    raise UsageError(f"unknown model {cfg.model!r}")


def resolve_observable(name: str, spec: ModelSpec) -> np.ndarray:
    if name in ("sigma_x", "sigma_y", "sigma_z"):
        return pauli(name[-1])
    if name == "hamiltonian":
        return hamiltonian(spec)
    if name == "h_inv_gamma":
        if spec.kind != "H2" or spec.gamma == 0:
            raise UsageError("h_inv_gamma needs --model h2 and a non-zero gamma")
        return h2(1.0 / spec.gamma)
    return parse_matrix_file(name)


def metadata(cfg: RunConfig, spec: ModelSpec, **extra) -> dict:
    meta = {
        "tool": "ptmetric",
        "version": __version__,
        "command": cfg.command,
        "model": spec.kind if cfg.model != "file" else f"file:{cfg.matrix}",
        "N": spec.N,
        "gamma": cfg.gamma,
        "inner": cfg.inner,
        "tolerances": {
            "kappa": cfg.tol_kappa, "mus": cfg.tol_mus, "ep": cfg.tol_ep,
            "imag": cfg.tol_imag, "gap": cfg.tol_gap,
        },
    }
    meta.update(extra)
    return meta


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        atomic_write(cfg.out, text)
        log.info("wrote %s", cfg.out)
    else:
        sys.stdout.write(text)


def _cplx(z) -> list:
    return [float(z.real), float(z.imag)]


def cmd_eig(cfg: RunConfig) -> None:
    spec = model_spec(cfg, single_gamma(cfg.gamma))
    H = hamiltonian(spec)
    verdict = phase_verdict(H, cfg.tol_imag, cfg.tol_gap)
    sys_ = biorthogonal_system(H)
    rows = [
        {"index": i, "re": float(h.real), "im": float(h.imag)}
        for i, h in enumerate(sys_.eigenvalues)
    ]
    meta = metadata(cfg, spec, phase=verdict.label, max_imag=verdict.max_imag,
                    min_gap=verdict.min_gap, conditioning=sys_.conditioning)
    _emit(cfg, render_rows(rows, cfg.format, ("index", "re", "im"), meta))


def cmd_metric(cfg: RunConfig) -> None:
    spec = model_spec(cfg, single_gamma(cfg.gamma))
    G = build_metric(biorthogonal_system(hamiltonian(spec)), unit_det=cfg.unit_det)
    doc = json.loads(matrix_to_json(G.matrix))
    doc["metadata"] = metadata(cfg, spec, min_eigenvalue=G.min_eigenvalue,
                               condition_number=G.condition_number, unit_det=cfg.unit_det)
    _emit(cfg, json.dumps(doc) + "\n")


def cmd_check_obs(cfg: RunConfig) -> None:
    spec = model_spec(cfg, single_gamma(cfg.gamma))
    if not cfg.observables:
        raise UsageError("check-obs needs at least one --obs")
    G = build_metric(biorthogonal_system(hamiltonian(spec)))
    rows = []
    for name in cfg.observables:
        rep = goodness(resolve_observable(name, spec), G, cfg.tol_kappa)
        rows.append({"obs": name, "kappa": rep.kappa,
                     "verdict": "good" if rep.verdict else "not_good",
                     "threshold": rep.threshold})
    fmt = cfg.format
    _emit(cfg, render_rows(rows, fmt, ("obs", "kappa", "verdict", "threshold"), metadata(cfg, spec)))


def _sweep_inputs(cfg: RunConfig):
    spec = model_spec(cfg, single_gamma(cfg.gamma))
    if spec.N != 2:
        raise UsageError("sweep and mus need a two-level model")
    if len(cfg.observables) != 2:
        raise UsageError("sweep and mus need exactly two --obs")
    A, B = (resolve_observable(o, spec) for o in cfg.observables)
    p_grid = parse_grid(cfg.p_grid, default_p_grid, "--p-grid")
    theta_grid = parse_grid(cfg.theta_grid, default_theta_grid, "--theta-grid")
    inner = "dirac" if cfg.inner == "dirac" else "g-metric"
    rows = grid_sweep(A, B, hamiltonian(spec), inner, p_grid, theta_grid, mus_tol=cfg.tol_mus)
    grids = {"p_grid": cfg.p_grid or "tan:201", "theta_grid": cfg.theta_grid or "201",
             "observables": cfg.observables}
    return spec, rows, grids


def cmd_sweep(cfg: RunConfig) -> None:
    spec, rows, grids = _sweep_inputs(cfg)
    _emit(cfg, render_rows(rows, cfg.format, SWEEP_COLUMNS, metadata(cfg, spec, **grids)))


def cmd_mus(cfg: RunConfig) -> None:
    spec, rows, grids = _sweep_inputs(cfg)
    lines = extract_mus_lines(rows, cfg.tol_mus)
    _emit(cfg, render_rows(lines, cfg.format, MUS_LINE_COLUMNS, metadata(cfg, spec, **grids)))


def cmd_ep_scan(cfg: RunConfig) -> None:
    gammas = parse_gamma_range(cfg.gamma)
    spec = model_spec(cfg)
    rows = kappa_scan(spec, gammas)
    bracket = first_transition(rows, cfg.tol_kappa)
    gamma_ep = None
    if bracket is not None:
        gamma_ep = find_ep(spec, bracket, cfg.tol_ep, cfg.tol_kappa)
        print(f"gamma_EP = {gamma_ep:.6f}", file=sys.stderr)
    else:
        print("no symmetric -> broken transition in the scanned range", file=sys.stderr)
    meta = metadata(cfg, spec, gamma_ep=gamma_ep, bracket=bracket)
    _emit(cfg, render_rows(rows, cfg.format, SCAN_COLUMNS, meta))


DISPATCH = {
    "eig": cmd_eig,
    "metric": cmd_metric,
    "check-obs": cmd_check_obs,
    "sweep": cmd_sweep,
    "mus": cmd_mus,
    "ep-scan": cmd_ep_scan,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", default="h2", choices=["h2", "hA", "hB", "file"])
    common.add_argument("--matrix", help="matrix JSON file for --model file")
    common.add_argument("--gamma", help="float, or lo:hi:step for ep-scan")
    common.add_argument("--n", type=int, default=10, help="sites for hA/hB (even, >= 4)")
    common.add_argument("--inner", default="g", choices=["dirac", "g"])
    common.add_argument("--obs", action="append", default=[],
                        help=f"observable: one of {', '.join(BUILTIN_OBS)} or a matrix file")
    common.add_argument("--p-grid", help="point count (p = tan alpha) or comma list, 'inf' allowed")
    common.add_argument("--theta-grid", help="point count over [0, 2pi] or comma list")
    common.add_argument("--tol-kappa", type=float, default=DEFAULT_THRESHOLD)
    common.add_argument("--tol-mus", type=float, default=DEFAULT_MUS_TOL)
    common.add_argument("--tol-ep", type=float, default=1e-4)
    common.add_argument("--tol-imag", type=float)
    common.add_argument("--tol-gap", type=float)
    common.add_argument("--unit-det", action="store_true", help="rescale G to det G = 1")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", default="csv", choices=["csv", "json"])
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="ptm", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "eig": "eigenvalues, PT phase and biorthogonal conditioning",
        "metric": "metric operator G built from the left eigenvectors",
        "check-obs": "kappa and good-observable verdict for each --obs",
        "sweep": "uncertainty relation on the (p, theta) grid of generic states",
        "mus": "minimum-uncertainty lines of the (p, theta) grid",
        "ep-scan": "kappa versus gamma and EP location by bisection",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name], description=helps[name])
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    gamma = ns.gamma
    if gamma is None:
        gamma = "0:2:0.01" if ns.command == "ep-scan" else "0.2"
    return RunConfig(
        command=ns.command, model=ns.model, matrix=ns.matrix, gamma=gamma, n=ns.n,
        inner=ns.inner, observables=list(ns.obs), p_grid=ns.p_grid, theta_grid=ns.theta_grid,
        tol_kappa=ns.tol_kappa, tol_mus=ns.tol_mus, tol_ep=ns.tol_ep, tol_imag=ns.tol_imag,
        tol_gap=ns.tol_gap, unit_det=ns.unit_det, out=ns.out, format=ns.format,
    )


def run(cfg: RunConfig) -> int:
    try:
        DISPATCH[cfg.command](cfg)
    except DomainError as exc:
        print(f"ptm: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (UsageError, PTMError) as exc:
        print(f"ptm: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"ptm: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    return run(config_from_args(ns))


if __name__ == "__main__":
    raise SystemExit(main())
