"""Oracles and generators: self-consistency before they judge anything else."""

import numpy as np
import pytest

import napes
from napes import NoiseModel, SinusoidSpec, SnapshotPlan
from napes.errors import SingularSystemError


def _instance(seed, m=3, n=20):
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x = np.exp(2j * np.pi * rng.random(n))
    yy = napes.data_matrix(y, SnapshotPlan.from_data_length(n, m))
    omega = float(rng.random() * 2 * np.pi)
    return yy, x, omega, m


def test_oracle_feasibility_and_optimality():
    rng = np.random.default_rng(0)
    for seed in range(10):
        yy, x, omega, m = _instance(seed)
        h, alpha = napes.kkt_oracle(yy, x, omega, m)
        v = x[:m] * napes.steering(omega, m)
        assert abs(np.vdot(h, v) - 1.0) <= 1e-10
        j_star = napes.fit_objective(yy, x, omega, h, alpha)
        for _ in range(100):
            dh = 0.5 * (rng.standard_normal(m) + 1j * rng.standard_normal(m))
            hp = napes.project_constraint(h + dh, v)
            ap = alpha + 0.5 * (rng.standard_normal() + 1j * rng.standard_normal())
            assert j_star <= napes.fit_objective(yy, x, omega, hp, ap) + 1e-12


def test_oracle_stationarity():
    # with theta = [conj(h); alpha] and residual rows E theta, first-order
    # optimality forces E^H E theta parallel to the conjugated constraint
    yy, x, omega, m = _instance(3)
    h, alpha = napes.kkt_oracle(yy, x, omega, m)
    l = yy.shape[1]
    e = np.empty((l, m + 1), dtype=complex)
    e[:, :m] = yy.T
    e[:, m] = -x[:l] * np.exp(1j * omega * np.arange(l))
    theta = np.concatenate([h.conj(), [alpha]])
    grad = e.conj().T @ (e @ theta)
    v = np.concatenate([(x[:m] * napes.steering(omega, m)).conj(), [0.0]])
    lam = grad[np.abs(v).argmax()] / v[np.abs(v).argmax()]
    resid = np.linalg.norm(grad - lam * v) / max(np.linalg.norm(grad), 1e-30)
    assert resid <= 1e-8


def test_oracle_trivial_scalar_case():
    yy, _, omega, _ = _instance(4, m=1)
    ones = np.ones(24)
    h, alpha = napes.kkt_oracle(yy, ones, omega, 1)
    assert abs(h[0] - 1.0) <= 1e-12
    assert abs(alpha - napes.apes_g(yy, omega)[0]) <= 1e-12


def test_oracle_singular_system_raises():
    yy = np.zeros((2, 8), dtype=complex)
    with pytest.raises(SingularSystemError):
        napes.kkt_oracle(yy, np.ones(9), 0.3, 2)


def test_oracle_2d_reduces_to_1d():
    rng = np.random.default_rng(5)
    n, m = 18, 3
    y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x = np.exp(2j * np.pi * rng.random(n))
    h2, a2 = napes.kkt_oracle_2d(y[:, None], x[:, None], 1.2, 0.0, m, 1)
    yy = napes.data_matrix(y, SnapshotPlan.from_data_length(n, m))
    h1, a1 = napes.kkt_oracle(yy, x, 1.2, m)
    assert np.allclose(h2, h1, rtol=0, atol=1e-12)
    assert abs(a2 - a1) <= 1e-12


def test_oracle_2d_feasibility():
    rng = np.random.default_rng(6)
    y = rng.standard_normal((10, 9)) + 1j * rng.standard_normal((10, 9))
    x = np.exp(2j * np.pi * rng.random((10, 9)))
    h, alpha = napes.kkt_oracle_2d(y, x, 0.8, 2.3, 2, 2)
    xwin = x[:2, :2].flatten(order="F")
    v = xwin * napes.steering2d(0.8, 2.3, 2, 2)
    assert abs(np.vdot(h, v) - 1.0) <= 1e-10


def test_project_constraint():
    rng = np.random.default_rng(7)
    v = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    h = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    p = napes.project_constraint(h, v)
    assert abs(np.vdot(p, v) - 1.0) <= 1e-12
    # already-feasible vectors are fixed points
    assert np.allclose(napes.project_constraint(p, v), p, rtol=0, atol=1e-12)


def test_fit_objective_matches_bruteforce():
    yy, x, omega, m = _instance(8)
    rng = np.random.default_rng(8)
    h = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    alpha = rng.standard_normal() + 1j * rng.standard_normal()
    l = yy.shape[1]
    want = 0.0
    for t in range(l):
        pred = np.vdot(h, yy[:, t])
        want += abs(pred - alpha * x[t] * np.exp(1j * omega * t)) ** 2
    got = napes.fit_objective(yy, x, omega, h, alpha)
    assert abs(got - want) <= 1e-12 * max(1.0, want)


def test_fit_objective_2d_matches_bruteforce():
    rng = np.random.default_rng(9)
    n, n_p, m, m_p = 8, 7, 2, 2
    y = rng.standard_normal((n, n_p)) + 1j * rng.standard_normal((n, n_p))
    x = np.exp(2j * np.pi * rng.random((n, n_p)))
    h = rng.standard_normal(m * m_p) + 1j * rng.standard_normal(m * m_p)
    alpha = 0.3 - 0.8j
    omega, omega_p = 0.9, 2.7
    want = 0.0
    for tp in range(n_p - m_p + 1):
        for t in range(n - m + 1):
            pred = 0.0
            for pp in range(m_p):
                for p in range(m):
                    pred += np.conj(h[p + pp * m]) * y[t + p, tp + pp]
            target = alpha * x[t, tp] * np.exp(1j * (omega * t + omega_p * tp))
            want += abs(pred - target) ** 2
    got = napes.fit_objective_2d(y, x, omega, omega_p, h, alpha, m, m_p)
    assert abs(got - want) <= 1e-12 * max(1.0, want)


def test_gen_signal_deterministic():
    specs = [SinusoidSpec(1.0, 0.5), SinusoidSpec(0.5j, 2.5)]
    a1, x1 = napes.gen_signal(specs, NoiseModel("unit_modulus_random_phase", seed=2), 64, 15.0, 7)
    a2, x2 = napes.gen_signal(specs, NoiseModel("unit_modulus_random_phase", seed=2), 64, 15.0, 7)
    assert np.array_equal(a1, a2) and np.array_equal(x1, x2)


def test_gen_signal_zero_case():
    y, x = napes.gen_signal([], NoiseModel("constant"), 6, None, 0)
    assert np.array_equal(y, np.zeros(6))
    assert np.array_equal(x, np.ones(6))


def test_gen_signal_pure_exponential():
    y, x = napes.gen_signal([SinusoidSpec(2.0, 1.1)], NoiseModel("constant"), 16, None, 0)
    assert np.allclose(y, 2.0 * np.exp(1.1j * np.arange(16)), rtol=0, atol=1e-14)


def test_gen_signal_unit_modulus_reference():
    _, x = napes.gen_signal([], NoiseModel("unit_modulus_random_phase", seed=1), 128, None, 0)
    assert np.allclose(np.abs(x), 1.0, rtol=0, atol=1e-14)
    assert np.unique(np.round(x.real, 12)).size > 2  # actually random, not constant


def test_gen_signal_given_sequence():
    seq = np.exp(1j * np.linspace(0, 3, 10))
    y, x = napes.gen_signal([SinusoidSpec(1.0, 0.0)], NoiseModel("given_sequence", sequence=seq),
                            10, None, 0)
    assert np.array_equal(x, seq)
    assert np.allclose(y, seq, rtol=0, atol=1e-14)
    with pytest.raises(ValueError):
        napes.gen_signal([], NoiseModel("given_sequence", sequence=seq), 5, None, 0)


def test_gen_signal_snr_calibration():
    specs = [SinusoidSpec(1.0, 0.7)]
    y, x = napes.gen_signal(specs, NoiseModel("unit_modulus_random_phase", seed=3),
                            4096, 12.0, 3)
    t = np.arange(4096)
    clean = x * np.exp(0.7j * t)
    resid = y - clean
    snr = 10 * np.log10(np.mean(np.abs(clean) ** 2) / np.mean(np.abs(resid) ** 2))
    assert abs(snr - 12.0) <= 0.5


def test_drop_segments_shapes():
    y = np.arange(10, dtype=complex)
    assert napes.drop_segments(y, []).segment_lengths() == [10]
    seg = napes.drop_segments(y, [(4, 2)])
    assert seg.segment_lengths() == [4, 2, 4]
    with pytest.raises(ValueError):
        napes.drop_segments(y, [(8, 5)])
    with pytest.raises(ValueError):
        napes.drop_segments(y, [(-1, 2)])
