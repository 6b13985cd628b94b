from __future__ import annotations

import math

import numpy as np
import pytest

from ptmetric.errors import BadDimension, DimensionMismatch, MissingMetric, UsageError, ZeroVector
from ptmetric.metric import build_metric, g_norm
from ptmetric.models import (
    P_INF,
    PT_BROKEN_STATE,
    PT_SYMMETRIC_STATE,
    ModelSpec,
    classify_state,
    generic_state,
    h2,
    hamiltonian,
    lattice_hamiltonian,
    parity_op,
    pauli,
    pt_align,
    pt_image,
)
from ptmetric.spectral import biorthogonal_system


def aligned(g):
    return pt_align(biorthogonal_system(h2(g)), parity_op(2))


class TestBuilders:
    def test_h2(self):
        assert np.array_equal(h2(0), pauli("x"))
        assert np.array_equal(h2(0.2), [[0.2j, 1], [1, -0.2j]])
        assert np.array_equal(h2(1.2), [[1.2j, 1], [1, -1.2j]])

    def test_pauli(self):
        assert np.array_equal(pauli("x"), [[0, 1], [1, 0]])
        assert np.array_equal(pauli("y"), [[0, -1j], [1j, 0]])
        assert np.array_equal(pauli("z"), [[1, 0], [0, -1]])
        with pytest.raises(UsageError):
            pauli("w")

    def test_ha_hermitian_at_zero(self):
        H = lattice_hamiltonian(ModelSpec("HA", 4, 0.0))
        ref = np.diag(np.ones(3), 1) + np.diag(np.ones(3), -1)
        assert np.array_equal(H, ref)

    def test_ha_diagonal(self):
        H = lattice_hamiltonian(ModelSpec("HA", 4, 0.5))
        assert np.array_equal(np.diag(H), [0, 0.5j, -0.5j, 0])

    def test_hb_diagonal(self):
        H = lattice_hamiltonian(ModelSpec("HB", 8, 0.3))
        assert np.array_equal(np.diag(H), [0, 0, 0.3j, 0.3j, -0.3j, -0.3j, 0, 0])
        off = H - np.diag(np.diag(H))
        assert np.array_equal(off, np.diag(np.ones(7), 1) + np.diag(np.ones(7), -1))

    @pytest.mark.parametrize("kind", ["HA", "HB"])
    @pytest.mark.parametrize("n", [4, 6, 8, 10])
    def test_pt_invariance(self, kind, n):
        for g in np.linspace(0, 2, 11):
            H = hamiltonian(ModelSpec(kind, n, g))
            assert np.abs(pt_image(H) - H).max() <= 1e-12

    def test_h2_pt_invariance(self):
        for g in np.linspace(0, 2, 11):
            assert np.array_equal(pt_image(h2(g), parity_op(2)), h2(g))

    @pytest.mark.parametrize("n", [3, 2, 0])
    def test_bad_dimension(self, n):
        with pytest.raises(BadDimension):
            ModelSpec("HA", n, 0.1)

    def test_spec_validation(self):
        with pytest.raises(UsageError):
            ModelSpec("HX")
        with pytest.raises(UsageError):
            ModelSpec("H2", 2, -0.1)
        with pytest.raises(UsageError):
            ModelSpec("custom")
        spec = ModelSpec("hb", 10, 0.1)
        assert spec.kind == "HB" and spec.at(0.4).gamma == 0.4
        assert ModelSpec("custom", matrix=np.eye(3)).N == 3


class TestParity:
    def test_two(self):
        assert np.array_equal(parity_op(2), pauli("x"))

    def test_four(self):
        assert np.array_equal(parity_op(4), np.fliplr(np.eye(4)))
        assert np.array_equal(parity_op(4) @ parity_op(4), np.eye(4))

    def test_hb_invariance(self):
        H = hamiltonian(ModelSpec("HB", 8, 0.3))
        P = parity_op(8)
        assert np.array_equal(P @ H.conj() @ P, H)

    def test_too_small(self):
        with pytest.raises(BadDimension):
            parity_op(1)


class TestGenericState:
    def test_p_zero(self):
        sys_ = aligned(0.2)
        psi = generic_state(sys_, 0.0, 1.3)
        E1 = sys_.right[:, 0]
        assert np.allclose(psi, E1 / np.linalg.norm(E1))

    def test_p_inf(self):
        sys_ = aligned(0.2)
        E2 = sys_.right[:, 1]
        assert np.allclose(generic_state(sys_, P_INF, 0.4), E2 / np.linalg.norm(E2))

    def test_p1_half_pi(self):
        sys_ = aligned(0.2)
        G = build_metric(sys_)
        psi = generic_state(sys_, 1.0, math.pi / 2, "g-metric", G)
        v = sys_.right[:, 0] + 1j * sys_.right[:, 1]
        assert g_norm(G, psi) == pytest.approx(1, abs=1e-12)
        assert abs(np.vdot(psi, v)) == pytest.approx(np.linalg.norm(psi) * np.linalg.norm(v))

    def test_errors(self):
        sys_ = aligned(0.2)
        with pytest.raises(MissingMetric):
            generic_state(sys_, 1, 0, "g")
        with pytest.raises(DimensionMismatch):
            generic_state(biorthogonal_system(np.diag([1.0, 2, 3])), 1, 0)


class TestClassify:
    def test_symmetric_phase_eigenvector(self):
        sys_ = aligned(0.2)
        assert classify_state(sys_.right[:, 0], parity_op(2)).label == PT_SYMMETRIC_STATE

    def test_p1_line(self):
        sys_ = aligned(0.2)
        P = parity_op(2)
        assert classify_state(generic_state(sys_, 1, math.pi / 4), P).label == PT_BROKEN_STATE
        assert classify_state(generic_state(sys_, 1, 0.0), P).label == PT_SYMMETRIC_STATE

    def test_phase_and_scale_invariance(self):
        rng = np.random.default_rng(17)
        P = parity_op(3)
        for _ in range(20):
            psi = rng.normal(size=3) + 1j * rng.normal(size=3)
            a = classify_state(psi, P)
            b = classify_state(3.7 * np.exp(1.1j) * psi, P)
            assert a.label == b.label and a.collinearity == pytest.approx(b.collinearity)

    @pytest.mark.parametrize("kind,n,g_sym,g_brk", [("H2", 2, 0.4, 1.4), ("HA", 6, 0.6, 1.5),
                                                    ("HB", 8, 0.2, 0.6)])
    def test_eigenvectors_by_phase(self, kind, n, g_sym, g_brk):
        P = parity_op(n)
        sym = biorthogonal_system(hamiltonian(ModelSpec(kind, n, g_sym)))
        for v in sym.right.T:
            assert classify_state(v, P).label == PT_SYMMETRIC_STATE
        brk = biorthogonal_system(hamiltonian(ModelSpec(kind, n, g_brk)))
        for h, v in zip(brk.eigenvalues, brk.right.T):
            if abs(h.imag) > 1e-6:
                assert classify_state(v, P).label == PT_BROKEN_STATE

    def test_zero(self):
        with pytest.raises(ZeroVector):
            classify_state(np.zeros(2), parity_op(2))


class TestAlignment:
    def test_real_eigenvalues_pt_fixed(self):
        sys_ = pt_align(biorthogonal_system(hamiltonian(ModelSpec("HA", 6, 0.5))), parity_op(6))
        P = parity_op(6)
        for v in sys_.right.T:
            assert np.allclose(P @ v.conj(), v, atol=1e-10)

    def test_pairs_are_pt_images(self):
        sys_ = aligned(1.2)
        E1, E2 = sys_.right.T
        ratio = (parity_op(2) @ E1.conj()) / E2
        assert np.allclose(ratio, ratio[0]) and abs(ratio[0].imag) < 1e-12 and ratio[0].real > 0

    def test_biorthogonality_kept(self):
        sys_ = aligned(1.2)
        assert np.allclose(sys_.overlaps(), np.eye(2), atol=1e-12)
