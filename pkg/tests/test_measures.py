import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial.transform import Rotation
from scipy.stats import unitary_group

from xycorr import measures as ms
from xycorr.errors import BlochVectorZero
from xycorr.measures import MeasureKind
from xycorr.oracle import random_state, random_xstate
from xycorr.qstate import BASIS, SX, SY, SZ, I2, XState, bloch_decompose, validate_state

from conftest import ket_state

MIXED = validate_state(np.eye(4) / 4)
CLASSICAL = validate_state(np.diag([0.5, 0, 0, 0.5]))
UPUP = validate_state(np.diag([1.0, 0, 0, 0]))


def werner(p, phi_plus):
    return validate_state(p * phi_plus.elements + (1 - p) * np.eye(4) / 4)


class TestMIN:
    def test_product(self):
        assert ms.min_closed(bloch_decompose(UPUP)) == pytest.approx(0, abs=1e-15)

    def test_bell_zero_bloch_branch(self, phi_plus):
        # 2 (tr TT^t - lambda_3) = 2 (3/4 - 1/4)
        assert ms.min_closed(bloch_decompose(phi_plus)) == pytest.approx(1.0, abs=1e-15)

    def test_mixed(self):
        assert ms.min_closed(bloch_decompose(MIXED)) == 0

    def test_xstate_shortcut(self):
        assert ms.min_xstate(XState(0.4, 0.2, 0.1, 0.3, 0, 0)) == 0
        with pytest.raises(BlochVectorZero):
            ms.min_xstate(XState(0.25, 0.25, 0.25, 0.25, 0.1, 0.1))

    def test_xstate_shortcut_matches_closed(self, rng):
        for _ in range(200):
            s = random_xstate(rng)
            if abs(s.bloch_z) > ms.BLOCH_ZERO:
                assert abs(ms.min_xstate(s) - ms.min_closed(bloch_decompose(s.to_state()))) <= 1e-12


class TestSkewInformation:
    def test_commuting(self):
        assert ms.skew_information(np.diag([0.1, 0.2, 0.3, 0.4]), np.kron(SZ, SZ)) == 0

    def test_pure_variance(self):
        assert ms.skew_information(UPUP, np.kron(SX, I2)) == pytest.approx(1.0, abs=1e-14)

    def test_mixed(self):
        assert ms.skew_information(MIXED, np.kron(SY, SX)) == pytest.approx(0, abs=1e-15)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_equals_variance_for_pure_states(self, seed):
        rho = random_state("pure", seed).elements
        rng = np.random.default_rng(seed)
        h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        X = h + h.conj().T
        var = np.trace(rho @ X @ X).real - np.trace(rho @ X).real ** 2
        assert ms.skew_information(rho, X) == pytest.approx(var, abs=1e-10)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_nonnegative(self, seed):
        rho = random_state("general", seed)
        for X in BASIS:
            assert ms.skew_information(rho, np.kron(X, I2)) >= 0


class TestWYSIM:
    def test_bell(self, phi_plus):
        # Q_a(rho) = 3 * 1/2 from pure-state variances, Q_a(I/2) = 0
        assert ms.wysim(phi_plus) == pytest.approx(1.0, abs=1e-12)

    def test_mixed(self):
        assert ms.wysim(MIXED) == pytest.approx(0, abs=1e-15)

    def test_products(self, rng):
        for _ in range(20):
            assert ms.wysim(random_state("product", rng)) <= 1e-12

    def test_basis_independence(self, rng):
        for seed in range(20):
            rho = random_state("general", rng)
            R = Rotation.random(random_state=seed).as_matrix()
            rotated = [sum(R[i, j] * np.array(p) for j, p in enumerate((SX, SY, SZ))) / np.sqrt(2)
                       for i in range(3)]
            assert abs(ms.wysim(rho, rotated) - ms.wysim(rho)) <= 1e-9


class TestGeometricDiscord:
    def test_classical(self):
        assert ms.gmqd_closed(bloch_decompose(CLASSICAL)) == pytest.approx(0, abs=1e-15)
        assert ms.omqc(bloch_decompose(CLASSICAL)) == pytest.approx(0, abs=1e-15)

    def test_bell(self, phi_plus):
        b = bloch_decompose(phi_plus)
        assert ms.gmqd_closed(b) == pytest.approx(1.0, abs=1e-14)
        # tr S = 3/4, tr S^2 = 3/16: radicand vanishes
        assert ms.omqc(b) == pytest.approx(1.0, abs=1e-14)

    def test_product_pure(self):
        assert ms.gmqd_closed(bloch_decompose(UPUP)) == pytest.approx(0, abs=1e-15)

    def test_mixed(self):
        assert ms.omqc(bloch_decompose(MIXED)) == 0

    def test_eigenvalues_match_trigonometric_roots(self, rng):
        # trigonometric roots of the characteristic polynomial of S, with the
        # leading term of the arccos argument read as 2 (tr S)^3
        for _ in range(200):
            S = ms._s_matrix(bloch_decompose(random_state("general", rng)))
            t1, t2, t3 = np.trace(S), np.trace(S @ S), np.trace(S @ S @ S)
            arg = (2 * t1**3 - 9 * t1 * t2 + 9 * t3) * np.sqrt(2 / (3 * t2 - t1**2) ** 3)
            theta = np.arccos(np.clip(arg, -1, 1))
            amp = np.sqrt(6 * t2 - 2 * t1**2) / 3
            k = [t1 / 3 + amp * np.cos((theta + a) / 3) for a in (0, 2 * np.pi, 4 * np.pi)]
            np.testing.assert_allclose(sorted(k), np.linalg.eigvalsh(S), atol=1e-12)

    def test_ordering_chain(self, rng):
        for _ in range(500):
            b = bloch_decompose(random_state("general", rng))
            assert ms.omqc(b) <= ms.gmqd_closed(b) + 1e-10
            assert ms.gmqd_closed(b) <= ms.min_closed(b) + 1e-10


class TestConcurrence:
    def test_bell(self, phi_plus):
        assert ms.concurrence_general(phi_plus) == pytest.approx(1.0, abs=1e-14)

    def test_products(self, rng):
        for _ in range(20):
            assert ms.concurrence_general(random_state("product", rng)) <= 1e-12

    def test_werner(self, phi_plus):
        # max(0, (3p - 1)/2) at p = 0.8
        assert ms.concurrence_general(werner(0.8, phi_plus)) == pytest.approx(0.7, abs=1e-12)
        assert ms.concurrence_general(werner(0.3, phi_plus)) == 0

    def test_xstate(self):
        assert ms.concurrence_xstate(XState(0.5, 0, 0, 0.5, 0.5, 0)) == pytest.approx(1.0)
        assert ms.concurrence_xstate(XState(0.1, 0.2, 0.3, 0.4, 0, 0)) == 0

    def test_xstate_matches_general(self, rng):
        for _ in range(200):
            s = random_xstate(rng)
            assert abs(ms.concurrence_xstate(s) - ms.concurrence_general(s.to_state())) <= 1e-12


class TestAllMeasures:
    def test_bell_states(self, bells):
        for b in bells:
            for k in MeasureKind:
                assert abs(ms.evaluate(k, b) - 1) <= 1e-10, (k, b)

    def test_product_states(self, rng):
        for _ in range(50):
            rho = random_state("product", rng)
            for k in MeasureKind:
                assert ms.evaluate(k, rho) <= 1e-10

    @pytest.mark.parametrize("kind", list(MeasureKind))
    def test_xstate_dispatch_matches_general(self, kind, rng):
        for _ in range(20):
            s = random_xstate(rng)
            assert ms.evaluate(kind, s) == pytest.approx(ms.evaluate(kind, s.to_state()), abs=1e-12)

    @pytest.mark.parametrize("kind", [MeasureKind.CONCURRENCE, MeasureKind.WYSIM])
    def test_local_unitary_invariance(self, kind, rng):
        for seed in range(20):
            rho = random_state("general", rng).elements
            U = np.kron(unitary_group.rvs(2, random_state=seed), unitary_group.rvs(2, random_state=seed + 99))
            rotated = validate_state(U @ rho @ U.conj().T, tol=1e-12)
            assert abs(ms.evaluate(kind, rotated) - ms.evaluate(kind, rho)) <= 1e-9

    def test_parse(self):
        assert MeasureKind.parse("omqc") is MeasureKind.OMQC
        with pytest.raises(ValueError):
            MeasureKind.parse("QMI")

    def test_spin_flip_invariance(self, rng):
        # the global flip r11 <-> r44, r22 <-> r33 leaves every measure unchanged
        for _ in range(20):
            s = random_xstate(rng)
            f = XState(s.r44, s.r33, s.r22, s.r11, s.r14, s.r23)
            for k in MeasureKind:
                assert ms.evaluate(k, f) == pytest.approx(ms.evaluate(k, s), abs=1e-12)
