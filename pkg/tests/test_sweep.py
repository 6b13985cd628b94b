from __future__ import annotations

import math

import numpy as np
import pytest

from ptmetric.errors import BadBracket, CrossCheckFailed, IncompleteGrid
from ptmetric.io import render_rows
from ptmetric.models import P_INF, ModelSpec, h2, pauli
from ptmetric.sweep import (
    ScanRow,
    default_p_grid,
    default_theta_grid,
    extract_mus_lines,
    find_ep,
    find_ep_spectral,
    first_transition,
    grid_sweep,
    kappa_scan,
    worker_count,
)

SX, SY, SZ = pauli("x"), pauli("y"), pauli("z")
GRID101 = dict(p_grid=default_p_grid(101), theta_grid=default_theta_grid(101))

# H^B EP per N from this implementation, tol 1e-4 bisection (regression goldens)
HB_EP = {8: 0.33309, 10: 0.30473, 12: 0.28871}


class TestGrids:
    def test_p_grid(self):
        p = default_p_grid()
        assert len(p) == 201 and p[0] == 0 and p[100] == 1.0 and p[-1] == P_INF
        assert np.all(np.diff(p[:-1]) > 0)

    def test_theta_grid(self):
        t = default_theta_grid()
        assert t[0] == 0 and t[-1] == 2 * math.pi and t[100] == pytest.approx(math.pi)


class TestGridSweep:
    def test_dirac_no_violation(self):
        rows = grid_sweep(SX, SZ, h2(0.2), "dirac", **GRID101)
        assert len(rows) == 101 * 101
        assert min(r.eta for r in rows) >= 1 - 1e-9

    def test_g_metric_violation(self):
        rows = grid_sweep(SX, SZ, h2(0.2), "g-metric", **GRID101)
        assert min(r.eta for r in rows) < 1

    def test_good_pair(self):
        rows = grid_sweep(h2(0.2), SY, h2(0.2), "g", **GRID101)
        assert min(r.eta for r in rows) >= 1 - 1e-9

    def test_row_order_and_mus_invariant(self):
        rows = grid_sweep(h2(0.2), SY, h2(0.2), "g", [0.0, 1.0], [0.0, 1.0, 2.0], mus_tol=1e-6)
        assert [(r.p, r.theta) for r in rows] == [(p, t) for p in (0.0, 1.0) for t in (0.0, 1.0, 2.0)]
        for r in rows:
            if r.mus:
                assert abs(r.eta - 1) <= 1e-6

    def test_parallel_matches_serial(self):
        kw = dict(p_grid=default_p_grid(21), theta_grid=default_theta_grid(21))
        a = grid_sweep(SX, SZ, h2(1.2), "g", workers=1, **kw)
        b = grid_sweep(SX, SZ, h2(1.2), "g", workers=4, **kw)
        assert render_rows(a) == render_rows(b)

    def test_deterministic(self):
        kw = dict(p_grid=default_p_grid(21), theta_grid=default_theta_grid(21))
        assert render_rows(grid_sweep(SX, SZ, h2(0.2), "dirac", **kw)) == render_rows(
            grid_sweep(SX, SZ, h2(0.2), "dirac", **kw)
        )

    def test_empty_grid(self):
        with pytest.raises(IncompleteGrid):
            grid_sweep(SX, SZ, h2(0.2), "dirac", [], [0.0])

    def test_bad_inner(self):
        with pytest.raises(ValueError):
            grid_sweep(SX, SZ, h2(0.2), "cpt", [0.0], [0.0])


def keys(lines):
    return {(l.kind, "inf" if math.isinf(l.value) else round(l.value / (1 if l.kind == "p" else math.pi), 9))
            for l in lines}


class TestMusLines:
    def test_symmetric_phase_dirac(self):
        rows = grid_sweep(SX, SZ, h2(0.2), "dirac", **GRID101)
        assert keys(extract_mus_lines(rows)) == {
            ("p", 0.0), ("p", 1.0), ("p", "inf"), ("theta", 0.0), ("theta", 1.0), ("theta", 2.0)}

    def test_broken_phase_dirac(self):
        rows = grid_sweep(SX, SZ, h2(1.2), "dirac", **GRID101)
        assert keys(extract_mus_lines(rows)) == {
            ("p", 0.0), ("p", 1.0), ("p", "inf"), ("theta", 0.5), ("theta", 1.5)}

    def test_good_pair_symmetric_phase(self):
        rows = grid_sweep(h2(0.2), SY, h2(0.2), "g", **GRID101)
        lines = {keys([l]).pop(): l for l in extract_mus_lines(rows)}
        assert set(lines) == {("p", 1.0), ("theta", 0.5), ("theta", 1.5)}
        assert lines["p", 1.0].state_class == "pt_broken_state"

    def test_incomplete(self):
        rows = grid_sweep(SX, SZ, h2(0.2), "dirac", [0.0, 1.0, P_INF], default_theta_grid(9))
        with pytest.raises(IncompleteGrid):
            extract_mus_lines(rows[:-1])
        rows = grid_sweep(SX, SZ, h2(0.2), "dirac", [0.0, P_INF], default_theta_grid(9))
        with pytest.raises(IncompleteGrid):
            extract_mus_lines(rows)


class TestKappaScan:
    def test_examples(self):
        ha = ModelSpec("HA", 10)
        hb = ModelSpec("HB", 10)
        assert kappa_scan(ha, [0.5])[0].kappa <= 1e-10
        assert kappa_scan(ha, [1.5])[0].kappa > 1e-3
        assert kappa_scan(hb, [0.3])[0].kappa <= 1e-10

    def test_sentinel_at_ep(self):
        row = kappa_scan(ModelSpec("HA", 10), [1.0])[0]
        assert row.is_sentinel and math.isnan(row.kappa)

    def test_phase_labels(self):
        rows = kappa_scan(ModelSpec("H2"), [0.5, 1.5])
        assert [r.phase for r in rows] == ["symmetric", "broken"]

    def test_first_transition(self):
        rows = [ScanRow(0.1, 0.0, "s"), ScanRow(0.2, math.nan, "e"), ScanRow(0.3, 0.5, "b")]
        assert first_transition(rows) == (0.1, 0.2)
        assert first_transition([ScanRow(0.1, 1.0, "b")]) is None


class TestFindEp:
    @pytest.mark.parametrize("spec", [ModelSpec("HA", 10), ModelSpec("H2")], ids=["HA10", "H2"])
    def test_unit_ep(self, spec):
        assert find_ep(spec, (0.5, 1.5), 1e-3) == pytest.approx(1.0, abs=1e-3)

    @pytest.mark.parametrize("n", sorted(HB_EP))
    def test_hb_regression(self, n):
        assert find_ep(ModelSpec("HB", n), (0.2, 0.8), 1e-4) == pytest.approx(HB_EP[n], abs=1e-4)

    def test_criteria_agree(self):
        spec = ModelSpec("HA", 8)
        assert abs(find_ep(spec, (0.5, 1.5), 1e-4, cross_check=False)
                   - find_ep_spectral(spec, (0.5, 1.5), 1e-4)) <= 1e-3

    def test_bad_bracket(self):
        with pytest.raises(BadBracket):
            find_ep(ModelSpec("H2"), (0.1, 0.5))
        with pytest.raises(BadBracket):
            find_ep(ModelSpec("H2"), (1.5, 0.5))

    def test_cross_check_failure(self):
        # a loose threshold moves the kappa flip well past the spectral EP
        with pytest.raises(CrossCheckFailed):
            find_ep(ModelSpec("H2"), (0.5, 1.9), 1e-4, threshold=0.5)


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("PTM_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("PTM_THREADS", "junk")
    assert worker_count() >= 1
