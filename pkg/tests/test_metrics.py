"""Quality-metric tests: SINR, rate, echo power, CRLB, beampattern."""

import math

import numpy as np
import pytest

from netisac.constants import dbm_to_watts, watts_to_dbm
from netisac.interference import BeamPlan
from netisac.metrics import (
    NonIdentifiableError,
    QosTargets,
    achievable_rate,
    beampattern,
    beampattern_mse,
    comm_sinr,
    crlb_angle,
    echo_power,
    fisher_information,
    fisher_matrix,
    sensing_sinr,
)
from netisac.scene import (
    ScenarioSpec,
    generate_channels,
    generate_scene,
    steering_derivative,
    steering_vector,
)

from conftest import random_psd


class TestQosTargets:
    def test_sinr_and_rate_mutually_exclusive(self):
        with pytest.raises(ValueError):
            QosTargets(sinr_min_db=8.0, rate_min=2.0)

    def test_infinite_threshold_rejected(self):
        with pytest.raises(ValueError):
            QosTargets(crlb_max=math.inf)


class TestCommSinr:
    def test_matched_filter_hits_target_exactly(self):
        # w = sqrt(Gamma sigma^2) h / ||h||^2 gives SINR exactly Gamma when
        # there is no interference (8 dB -> 6.3096 linear).
        spec = ScenarioSpec(n_bs=1, n_cu=1, n_st=0, n_clutter=0, antennas_per_bs=4)
        sc = generate_scene(spec, 0)
        ch = generate_channels(sc, spec, 0)
        h = ch.comm[(0, 0)]
        gamma = 10 ** (8.0 / 10)
        w = math.sqrt(gamma * spec.noise_power) * h / np.linalg.norm(h) ** 2
        plan = BeamPlan()
        plan.comm_beams[(0, 0)] = w
        assert comm_sinr(0, ch, plan, spec) == pytest.approx(gamma, rel=1e-9)
        assert gamma == pytest.approx(6.3096, rel=1e-4)

    def test_matches_term_by_term_assembly(self):
        from netisac.interference import mui_power, sensing_leakage_power

        spec = ScenarioSpec(n_bs=2, n_cu=2, n_st=1, n_clutter=0, antennas_per_bs=3)
        sc = generate_scene(spec, 4)
        ch = generate_channels(sc, spec, 4)
        gen = np.random.default_rng(4)
        plan = BeamPlan()
        for b, k in ((0, 0), (1, 1)):
            plan.comm_beams[(b, k)] = gen.standard_normal(3) + 1j * gen.standard_normal(3)
        plan.sense_beams[0] = gen.standard_normal(3) + 1j * gen.standard_normal(3)
        q = {b: ch.leak[(b, 0)] for b in range(2)}
        desired = abs(np.vdot(ch.comm[(0, 0)], plan.comm_beams[(0, 0)])) ** 2
        denom = (
            mui_power(q, plan, (0, 0))
            + sensing_leakage_power(q, plan)
            + spec.noise_power
        )
        assert comm_sinr(0, ch, plan, spec) == pytest.approx(desired / denom, rel=1e-12)

    def test_phase_rotation_invariance(self):
        spec = ScenarioSpec(n_bs=1, n_cu=1, n_st=0, n_clutter=0, antennas_per_bs=3)
        sc = generate_scene(spec, 1)
        ch = generate_channels(sc, spec, 1)
        plan = BeamPlan()
        plan.comm_beams[(0, 0)] = np.array([1.0, 1j, -0.5])
        s1 = comm_sinr(0, ch, plan, spec)
        plan.comm_beams[(0, 0)] = np.exp(1j * 1.1) * plan.comm_beams[(0, 0)]
        assert comm_sinr(0, ch, plan, spec) == pytest.approx(s1, rel=1e-12)


class TestRate:
    def test_examples(self):
        assert achievable_rate(3.0, 1.0) == pytest.approx(2.0)
        assert achievable_rate(0.0, 0.7) == 0.0
        assert achievable_rate(15.0, 0.5) == pytest.approx(2.0)

    def test_invalid(self):
        with pytest.raises(ValueError):
            achievable_rate(-0.1, 1.0)
        with pytest.raises(ValueError):
            achievable_rate(1.0, 1.5)


class TestEchoPower:
    def test_isotropic_matched(self):
        n, p = 4, 2.0
        a = steering_vector(n, 0.3)
        r = (p / n) * np.eye(n, dtype=complex)
        assert echo_power(r, 0.5, a, a, a) == pytest.approx(0.25 * n * p, rel=1e-9)

    def test_beamformed_peak(self):
        n, p = 4, 2.0
        a = steering_vector(n, 0.3)
        r = p * np.outer(a, a.conj()) / n
        assert echo_power(r, 0.5, a, a, a) == pytest.approx(0.25 * n * n * p, rel=1e-9)

    def test_scaled_to_minus90_dbm(self):
        n = 4
        a = steering_vector(n, 0.1)
        alpha = 1e-4
        target = dbm_to_watts(-90.0)
        p = target / (abs(alpha) ** 2 * n * n)
        r = p * np.outer(a, a.conj()) / n
        echo = echo_power(r, alpha, a, a, a)
        assert echo == pytest.approx(1e-12, rel=1e-9)
        assert watts_to_dbm(echo) == pytest.approx(-90.0, abs=1e-6)

    def test_sensing_sinr(self):
        assert sensing_sinr(4.0, 1.0, 1.0, 1.0, 1.0) == pytest.approx(1.0)
        assert sensing_sinr(0.0, 1.0, 0.0, 0.0, 1.0) == 0.0


def fd_fisher_oracle(r_tx, alpha, snapshots, sigma2, n_t, n_r, theta, step=1e-5):
    """Finite-difference information from the full mean-vector model.

    mu(theta) = alpha * a_r(theta) a_t(theta)^H X with X X^H = L * R.
    """
    w, v = np.linalg.eigh((r_tx + r_tx.conj().T) / 2)
    x = (v * np.sqrt(np.clip(w, 0, None) * snapshots)) @ v.conj().T

    def mean_matrix(th):
        return np.outer(steering_vector(n_r, th), steering_vector(n_t, th).conj())

    dmu = (mean_matrix(theta + step) - mean_matrix(theta - step)) / (2 * step)
    return 2.0 * abs(alpha) ** 2 / sigma2 * float(np.linalg.norm(dmu @ x) ** 2)


class TestCrlb:
    def test_matches_finite_difference_oracle(self):
        gen = np.random.default_rng(6)
        for _ in range(50):
            n = int(gen.integers(2, 6))
            theta = gen.uniform(-1.2, 1.2)
            r = random_psd(gen, n)
            alpha = gen.standard_normal() + 1j * gen.standard_normal()
            snapshots = int(gen.integers(1, 64))
            sigma2 = gen.uniform(0.1, 2.0)
            a_t = steering_vector(n, theta)
            da_t = steering_derivative(n, theta)
            j = fisher_information(r, alpha, snapshots, sigma2, a_t, da_t, a_t, da_t)
            j_fd = fd_fisher_oracle(r, alpha, snapshots, sigma2, n, n, theta)
            assert j == pytest.approx(j_fd, rel=1e-5)

    def test_doubling_covariance_halves_crlb(self):
        gen = np.random.default_rng(7)
        n = 4
        theta = 0.4
        r = random_psd(gen, n)
        args = (
            steering_vector(n, theta),
            steering_derivative(n, theta),
            steering_vector(n, theta),
            steering_derivative(n, theta),
        )
        c1 = crlb_angle(r, 1.0, 8, 1.0, *args)
        c2 = crlb_angle(2 * r, 1.0, 8, 1.0, *args)
        assert c2 == pytest.approx(c1 / 2, rel=1e-12)

    def test_single_antenna_endfire_not_identifiable(self):
        theta = math.pi / 2
        a = steering_vector(1, theta)
        da = steering_derivative(1, theta)
        with pytest.raises(NonIdentifiableError):
            crlb_angle(np.eye(1, dtype=complex), 1.0, 8, 1.0, a, da, a, da)

    def test_fisher_matrix_consistency(self):
        gen = np.random.default_rng(8)
        n = 5
        theta = -0.3
        r = random_psd(gen, n)
        a = steering_vector(n, theta)
        da = steering_derivative(n, theta)
        m = fisher_matrix(a, da, a, da)
        j_direct = fisher_information(r, 2.0, 16, 0.5, a, da, a, da)
        j_matrix = 2 * 16 * 4.0 / 0.5 * float(np.trace(m @ r).real)
        assert j_direct == pytest.approx(j_matrix, rel=1e-10)


class TestBeampattern:
    def test_isotropic_flat(self):
        n, p = 4, 3.0
        r = (p / n) * np.eye(n, dtype=complex)
        grid = np.linspace(-1.5, 1.5, 21)
        np.testing.assert_allclose(beampattern(r, grid), p, rtol=1e-12)

    def test_rank_one_peak(self):
        n, p = 4, 3.0
        a = steering_vector(n, 0.5)
        r = p * np.outer(a, a.conj()) / n
        assert beampattern(r, 0.5) == pytest.approx(n * p, rel=1e-12)

    def test_mse_zero_iff_exact(self):
        n, p = 3, 1.0
        r = (p / n) * np.eye(n, dtype=complex)
        grid = np.linspace(-1.0, 1.0, 7)
        assert beampattern_mse(r, grid, np.full(7, p)) == pytest.approx(0.0, abs=1e-15)
        assert beampattern_mse(r, grid, np.full(7, 2 * p)) > 0

    def test_nonnegative_for_psd(self):
        gen = np.random.default_rng(9)
        for _ in range(100):
            r = random_psd(gen, 4)
            th = gen.uniform(-1.5, 1.5)
            assert beampattern(r, th) >= -1e-12
