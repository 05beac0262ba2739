"""1-D filter bank: closed form vs KKT oracle, reductions, invariants."""

import numpy as np
import pytest

import napes
from napes import FrequencyGrid, HermitianSolveConfig, SnapshotPlan
from napes.errors import SingularMatrixError, ZeroNoiseWindowError


def _instance(seed, m=None, l=None):
    rng = np.random.default_rng(seed)
    m = m if m is not None else int(rng.integers(2, 7))
    l = l if l is not None else int(rng.integers(2 * m + 2, 4 * m + 4))
    n = m + l - 1
    y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x = np.exp(2j * np.pi * rng.random(n))
    omega = float(rng.random() * 2 * np.pi)
    return y, x, SnapshotPlan.from_data_length(n, m), omega


def _constraint_vector(x, plan, omega):
    return x[:plan.m] * napes.steering(omega, plan.m)


def test_point_matches_kkt_oracle():
    for seed in range(25):
        y, x, plan, omega = _instance(seed)
        est = napes.napes_point(y, x, plan, omega)
        yy = napes.data_matrix(y, plan)
        h_ref, a_ref = napes.kkt_oracle(yy, x, omega, plan.m)
        assert np.allclose(est.h, h_ref, rtol=1e-10, atol=0)
        assert abs(est.alpha - a_ref) <= 1e-10 * abs(a_ref)


def test_constraint_satisfied():
    for seed in range(10):
        y, x, plan, omega = _instance(seed)
        est = napes.napes_point(y, x, plan, omega)
        v = _constraint_vector(x, plan, omega)
        assert abs(np.vdot(est.h, v) - 1.0) <= 1e-10


def test_all_ones_reference_reduces_to_apes():
    for seed in range(10):
        y, _, plan, omega = _instance(seed)
        ones = np.ones(plan.n, dtype=complex)
        a = napes.apes_point(y, plan, omega)
        b = napes.napes_point(y, ones, plan, omega)
        assert np.allclose(a.h, b.h, rtol=0, atol=1e-12)
        assert abs(a.alpha - b.alpha) <= 1e-12


def test_apes_scalar_filter_forced_by_constraint():
    y, _, plan, omega = _instance(3, m=1, l=12)
    est = napes.apes_point(y, plan, omega)
    yy = napes.data_matrix(y, plan)
    assert np.allclose(est.h, [1.0], rtol=0, atol=1e-12)
    assert abs(est.alpha - napes.apes_g(yy, omega)[0]) <= 1e-12


def test_napes_scalar_filter_forced_by_constraint():
    y, x, plan, omega = _instance(4, m=1, l=12)
    est = napes.napes_point(y, x, plan, omega)
    yy = napes.data_matrix(y, plan)
    # conj(h0) x0 = 1 pins the filter; alpha follows as conj(h0) G0
    assert abs(est.h[0] - np.conj(1.0 / x[0])) <= 1e-12
    g0 = napes.napes_g(yy, x, omega)[0]
    assert abs(est.alpha - g0 / x[0]) <= 1e-12 * max(1.0, abs(g0))


def test_reference_scaling_law():
    # scaling x by complex c: G -> G/c, H -> H/conj(c), alpha -> alpha/c^2,
    # and the fit objective scales by 1/|c|^2
    c = 1.7 - 0.9j
    for seed in range(8):
        y, x, plan, omega = _instance(seed)
        yy = napes.data_matrix(y, plan)
        e1 = napes.napes_point(y, x, plan, omega)
        e2 = napes.napes_point(y, c * x, plan, omega)
        g1 = napes.napes_g(yy, x, omega)
        g2 = napes.napes_g(yy, c * x, omega)
        assert np.allclose(g2, g1 / c, rtol=1e-10, atol=0)
        assert np.allclose(e2.h, e1.h / np.conj(c), rtol=1e-10, atol=0)
        assert abs(e2.alpha - e1.alpha / c**2) <= 1e-10 * abs(e1.alpha / c**2)
        j1 = napes.fit_objective(yy, x, omega, e1.h, e1.alpha)
        j2 = napes.fit_objective(yy, c * x, omega, e2.h, e2.alpha)
        assert abs(j2 - j1 / abs(c)**2) <= 1e-10 * j1


def test_estimate_beats_feasible_perturbations():
    rng = np.random.default_rng(11)
    y, x, plan, omega = _instance(11)
    yy = napes.data_matrix(y, plan)
    est = napes.napes_point(y, x, plan, omega)
    j_star = napes.fit_objective(yy, x, omega, est.h, est.alpha)
    v = _constraint_vector(x, plan, omega)
    for _ in range(100):
        dh = 0.3 * (rng.standard_normal(plan.m) + 1j * rng.standard_normal(plan.m))
        h = napes.project_constraint(est.h + dh, v)
        alpha = est.alpha + 0.3 * (rng.standard_normal() + 1j * rng.standard_normal())
        j = napes.fit_objective(yy, x, omega, h, alpha)
        assert j_star <= j + 1e-12


def test_covariance_bundle_structure():
    for seed in range(8):
        y, x, plan, omega = _instance(seed)
        yy = napes.data_matrix(y, plan)
        bun = napes.covariance_bundle(yy, x, omega)
        # R is the energy-normalized unweighted snapshot covariance
        energy = np.sum(np.abs(x[:plan.l]) ** 2)
        r_ref = (yy @ yy.conj().T) / energy
        assert np.allclose(bun.r, r_ref, rtol=1e-12, atol=0)
        assert np.allclose(bun.q, bun.r - np.outer(bun.g, bun.g.conj()),
                           rtol=0, atol=1e-12 * np.abs(bun.r).max())
        assert np.allclose(bun.r, bun.r.conj().T, rtol=0, atol=1e-13)


def test_q_eigenvalues_nonnegative():
    for seed in range(10):
        y, x, plan, omega = _instance(seed)
        yy = napes.data_matrix(y, plan)
        q = napes.covariance_bundle(yy, x, omega).q
        w = np.linalg.eigvalsh(0.5 * (q + q.conj().T))
        assert w.min() >= -1e-10 * np.trace(q).real


def test_sweep_agrees_with_point_calls():
    y, x, plan, _ = _instance(13)
    grid = FrequencyGrid.uniform(17)
    sp = napes.spectrum(y, x, plan, grid)
    assert sp.ok.all()
    for k in (0, 5, 16):
        est = napes.napes_point(y, x, plan, grid.omegas[k])
        assert np.allclose(sp.filters[k], est.h, rtol=0, atol=1e-12)
        assert abs(sp.alphas[k] - est.alpha) <= 1e-12


def test_apes_spectrum_is_none_reference_spectrum():
    y, _, plan, _ = _instance(14)
    grid = FrequencyGrid.uniform(9)
    a = napes.apes_spectrum(y, plan, grid)
    b = napes.spectrum(y, None, plan, grid)
    assert np.array_equal(a.alphas, b.alphas)
    assert np.array_equal(a.filters, b.filters)


def test_two_sinusoid_recovery_constant_reference():
    # constant-reference accuracy at moderate SNR; amplitude within 5%
    kk = 64
    grid = FrequencyGrid.uniform(kk)
    specs = [napes.SinusoidSpec(1.0, 2 * np.pi * 10 / kk),
             napes.SinusoidSpec(0.5, 2 * np.pi * 37 / kk)]
    errs = []
    for seed in range(10):
        y, x = napes.gen_signal(specs, napes.NoiseModel("constant", seed=seed),
                                256, 20.0, seed)
        plan = SnapshotPlan.from_data_length(256, 32)
        sp = napes.spectrum(y, x, plan, grid)
        mags = np.abs(sp.alphas)
        assert set(np.argsort(-mags)[:2].tolist()) == {10, 37}
        errs.append(max(abs(mags[10] - 1.0), abs(mags[37] - 0.5) / 0.5))
    assert np.median(errs) <= 0.05


def test_zero_reference_window_rejected():
    y, _, plan, omega = _instance(15)
    with pytest.raises(ZeroNoiseWindowError):
        napes.napes_point(y, np.zeros(plan.n, dtype=complex), plan, omega)


def test_zero_signal_is_singular():
    plan = SnapshotPlan.from_data_length(16, 3)
    y = np.zeros(16, dtype=complex)
    with pytest.raises(SingularMatrixError):
        napes.apes_point(y, plan, 0.7)
    sp = napes.apes_spectrum(y, plan, FrequencyGrid.uniform(4))
    assert not sp.ok.any()
    assert (sp.status == 1).all()
    assert np.isnan(sp.alphas).all()


def test_exactly_singular_q_with_error_policy_raises():
    # constant signal: every Q entry is the same float, so Q has exact
    # rank 1 and elimination hits a hard zero pivot
    n = 16
    y = np.full(n, 2.0 + 0.0j)
    plan = SnapshotPlan.from_data_length(n, 3)
    cfg = HermitianSolveConfig(singular_policy="error")
    with pytest.raises(SingularMatrixError):
        napes.apes_point(y, plan, 0.7, cfg)


def test_loading_policy_handles_pure_exponential():
    n = 32
    t = np.arange(n)
    y = 2.0 * np.exp(1j * 0.5 * t)
    plan = SnapshotPlan.from_data_length(n, 4)
    est = napes.apes_point(y, plan, 0.5)
    assert abs(est.alpha - 2.0) <= 1e-5
