"""Kernel backends must agree with each other and honor the env switches."""

import numpy as np
import pytest

import napes
from napes import _backend, FrequencyGrid, GappedConfig, SnapshotPlan
from napes._backend import BACKEND_ENV, THREADS_ENV

needs_numba = pytest.mark.skipif(not _backend.HAS_NUMBA, reason="numba not installed")


def _signal(seed, n=96):
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x = np.exp(2j * np.pi * rng.random(n))
    return y, x


def test_backend_name_resolution(monkeypatch):
    monkeypatch.setenv(BACKEND_ENV, "numpy")
    assert _backend.backend_name() == "numpy"
    monkeypatch.setenv(BACKEND_ENV, "auto")
    assert _backend.backend_name() in ("numba", "numpy")
    monkeypatch.setenv(BACKEND_ENV, "sparkle")
    with pytest.raises(ValueError):
        _backend.backend_name()


def test_numpy_backend_spectrum(monkeypatch):
    monkeypatch.setenv(BACKEND_ENV, "numpy")
    y, x = _signal(0)
    plan = SnapshotPlan.from_data_length(y.size, 8)
    sp = napes.spectrum(y, x, plan, FrequencyGrid.uniform(16))
    assert sp.ok.all()


@needs_numba
def test_backends_agree_on_spectrum(monkeypatch):
    y, x = _signal(1)
    plan = SnapshotPlan.from_data_length(y.size, 8)
    grid = FrequencyGrid.uniform(32)
    monkeypatch.setenv(BACKEND_ENV, "numpy")
    a = napes.spectrum(y, x, plan, grid)
    monkeypatch.setenv(BACKEND_ENV, "numba")
    b = napes.spectrum(y, x, plan, grid)
    assert np.array_equal(a.status, b.status)
    assert np.allclose(a.filters, b.filters, rtol=1e-12, atol=0)
    assert np.allclose(a.alphas, b.alphas, rtol=1e-12, atol=0)


@needs_numba
def test_backends_agree_on_2d(monkeypatch):
    rng = np.random.default_rng(2)
    y = rng.standard_normal((20, 18)) + 1j * rng.standard_normal((20, 18))
    x = np.exp(2j * np.pi * rng.random((20, 18)))
    plan = napes.SnapshotPlan2D.from_data_shape((20, 18), 2, 2)
    grid = FrequencyGrid.uniform(6)
    monkeypatch.setenv(BACKEND_ENV, "numpy")
    a = napes.spectrum2d(y, x, plan, grid, grid)
    monkeypatch.setenv(BACKEND_ENV, "numba")
    b = napes.spectrum2d(y, x, plan, grid, grid)
    assert np.allclose(a.alphas, b.alphas, rtol=1e-12, atol=0)


@needs_numba
def test_backends_agree_on_reconstruction(monkeypatch):
    y, x = _signal(3)
    seg = napes.drop_segments(y, [(40, 10)], x=x)
    cfg = GappedConfig(grid=FrequencyGrid.uniform(16), m0=12, m=12, max_iter=5)
    monkeypatch.setenv(BACKEND_ENV, "numpy")
    a = napes.cyclic_optimize(seg, cfg)
    monkeypatch.setenv(BACKEND_ENV, "numba")
    b = napes.cyclic_optimize(seg, cfg)
    assert a.iterations == b.iterations
    scale = max(1.0, np.abs(a.y_missing).max())
    assert np.allclose(a.y_missing, b.y_missing, rtol=0, atol=1e-9 * scale)


@needs_numba
def test_numba_sweep_is_bitwise_equal_to_point(monkeypatch):
    # single-bin sweeps and point calls share the exact instruction stream
    monkeypatch.setenv(BACKEND_ENV, "numba")
    y, x = _signal(4)
    plan = SnapshotPlan.from_data_length(y.size, 6)
    grid = FrequencyGrid.uniform(8)
    sp = napes.spectrum(y, x, plan, grid)
    for k in range(8):
        est = napes.napes_point(y, x, plan, grid.omegas[k])
        assert np.array_equal(sp.filters[k], est.h)
        assert sp.alphas[k] == est.alpha


@needs_numba
def test_thread_cap_is_bitwise_invariant(monkeypatch):
    y, x = _signal(5, n=128)
    plan = SnapshotPlan.from_data_length(y.size, 10)
    grid = FrequencyGrid.uniform(64)
    monkeypatch.setenv(BACKEND_ENV, "numba")
    monkeypatch.delenv(THREADS_ENV, raising=False)
    a = napes.spectrum(y, x, plan, grid)
    monkeypatch.setenv(THREADS_ENV, "1")
    b = napes.spectrum(y, x, plan, grid)
    monkeypatch.setenv(THREADS_ENV, "7")  # clamped to the host limit
    c = napes.spectrum(y, x, plan, grid)
    assert np.array_equal(a.alphas, b.alphas) and np.array_equal(a.alphas, c.alphas)
    assert np.array_equal(a.filters, b.filters) and np.array_equal(a.filters, c.filters)


def test_thread_cap_ignores_garbage(monkeypatch):
    if not _backend.HAS_NUMBA:
        pytest.skip("numba only")
    monkeypatch.setenv(THREADS_ENV, "lots")
    with pytest.warns(UserWarning):
        _backend._apply_thread_cap()


def test_kernel_level_agreement():
    # drive both kernel modules with identical prebuilt arrays
    if not _backend.HAS_NUMBA:
        pytest.skip("numba only")
    from napes import _kernels_numba, _kernels_numpy

    rng = np.random.default_rng(6)
    m, l = 4, 24
    n = m + l - 1
    y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x = np.exp(2j * np.pi * rng.random(n))
    yy = napes.data_matrix(y, SnapshotPlan.from_data_length(n, m))
    w = x[:l].conj() / l
    r = (yy @ yy.conj().T) / l
    r = 0.5 * (r + r.conj().T)
    args = (r, yy, w,
            np.arange(l, dtype=np.float64), np.zeros(l, dtype=np.float64),
            x[:m].copy(),
            np.arange(m, dtype=np.float64), np.zeros(m, dtype=np.float64),
            np.linspace(0, 6.0, 11), np.zeros(1, dtype=np.float64),
            1e-8, False)
    fa, aa, sa = _kernels_numpy.constrained_sweep(*args)
    fb, ab, sb = _kernels_numba.constrained_sweep(*args)
    assert np.array_equal(sa, sb)
    assert np.allclose(fa, fb, rtol=1e-12, atol=0)
    assert np.allclose(aa, ab, rtol=1e-12, atol=0)


def test_numpy_kernel_degenerate_denominator_status():
    # indefinite normal matrix crafted so the denominator cancels exactly
    from napes import _kernels_numpy

    m, l = 2, 6
    r = np.diag([1.0, -1.0]).astype(complex)
    yy = np.zeros((m, l), dtype=complex)       # G = 0 so Q = R
    w = np.full(l, 1.0 / l, dtype=complex)
    args = (r, yy, w,
            np.arange(l, dtype=np.float64), np.zeros(l, dtype=np.float64),
            np.ones(m, dtype=complex),
            np.arange(m, dtype=np.float64), np.zeros(m, dtype=np.float64),
            np.zeros(1, dtype=np.float64), np.zeros(1, dtype=np.float64),
            0.0, False)
    _, alphas, status = _kernels_numpy.constrained_sweep(*args)
    assert status[0, 0] == _kernels_numpy.STATUS_DEGENERATE
    assert np.isnan(alphas[0, 0])
