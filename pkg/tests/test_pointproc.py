import numpy as np
import pytest

from lasernoise.analytic import (
    WaitParams, darkroom_g, darkroom_noise, darkroom_count_variance,
    waiting_time_laplace, waiting_time_mean,
)
from lasernoise.montecarlo import lattice_process, poisson_process
from lasernoise.pointproc import (
    CorrelationEstimate, EmptySeriesSet, EventSeries, ImproperWaitingTime,
    InvalidProbability, MismatchedDurations, RationalLaplace, WindowTooLarge,
    ZeroRate, correlation_estimate, count_variance, inhom_poisson_waiting,
    periodogram, rate_from_waiting, relative_noise, renewal_spectrum,
    superpose, thin,
)


# ---------------------------------------------------------------------------
# EventSeries container

def test_event_series_validation():
    with pytest.raises(ValueError):
        EventSeries(np.array([-0.1, 1.0]), 10.0)
    with pytest.raises(ValueError):
        EventSeries(np.array([0.0, 10.0]), 10.0)  # t == duration excluded
    with pytest.raises(ValueError):
        EventSeries(np.array([2.0, 1.0]), 10.0)
    with pytest.raises(ValueError):
        EventSeries(np.array([1.0]), 10.0, marks=np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        EventSeries(np.array([1.0]), 10.0, marks=np.array([-1.0]))


def test_event_series_rate():
    s = EventSeries(np.array([1.0, 2.0, 3.0]), 10.0)
    assert s.rate == pytest.approx(0.3)
    m = EventSeries(np.array([1.0, 2.0]), 10.0, marks=np.array([2.0, 4.0]))
    assert m.rate == pytest.approx(0.6)


def test_event_series_save_load_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    t = np.sort(rng.random(50) * 9.0)
    for marks in (None, rng.random(50)):
        s = EventSeries(t, 9.0, marks)
        p = str(tmp_path / "x.events")
        s.save(p)
        back = EventSeries.load(p)
        assert back.duration == s.duration
        assert np.array_equal(back.times, s.times)  # exact via repr round trip
        if marks is None:
            assert back.marks is None
        else:
            assert np.array_equal(back.marks, s.marks)


def test_event_series_load_rejects_headerless(tmp_path):
    p = tmp_path / "bad.events"
    p.write_text("1.0\n2.0\n")
    with pytest.raises(ValueError):
        EventSeries.load(str(p))


# ---------------------------------------------------------------------------
# periodogram

def test_periodogram_single_event_oracle():
    # one event: |exp(j Omega t)|^2 / T = 1/T at every bin
    s = EventSeries(np.array([3.7]), 10.0)
    spec = periodogram([s], n_max=5)
    assert np.allclose(spec.values, 0.1)
    assert np.allclose(spec.omegas, 2.0 * np.pi * np.arange(1, 6) / 10.0)


def test_periodogram_marked_unit_marks_equals_unmarked():
    t = np.sort(np.random.default_rng(1).random(30) * 10.0)
    a = periodogram([EventSeries(t, 10.0)], n_max=8)
    b = periodogram([EventSeries(t, 10.0, np.ones(30))], n_max=8)
    assert np.allclose(a.values, b.values)


def test_periodogram_poisson_is_shot_noise():
    runs = [poisson_process(5.0, 400.0, seed=k) for k in range(40)]
    spec = periodogram(runs, n_max=30)
    z = (spec.values - 5.0) / spec.stderr
    assert np.mean(np.abs(z) <= 3.0) >= 0.95
    assert abs(spec.values.mean() - 5.0) < 0.2


def test_periodogram_validates():
    s = EventSeries(np.array([1.0]), 10.0)
    with pytest.raises(ValueError):
        periodogram([s], n_max=0)
    with pytest.raises(EmptySeriesSet):
        periodogram([], n_max=5)
    with pytest.raises(EmptySeriesSet):
        periodogram([EventSeries(np.array([]), 10.0)], n_max=5)
    with pytest.raises(MismatchedDurations):
        periodogram([s, EventSeries(np.array([1.0]), 20.0)], n_max=5)


def test_relative_noise_darkroom():
    runs = [lattice_process(600.0, seed=k, delay="uniform", scale=20.0)
            for k in range(30)]
    spec = periodogram(runs, n_max=40)
    n_est = relative_noise(spec)
    n_err = spec.stderr / spec.rate**2
    want = darkroom_noise(spec.omegas, 20.0)
    z = (n_est - want) / n_err
    assert np.mean(np.abs(z) <= 3.0) >= 0.9


def test_relative_noise_needs_rate():
    spec = periodogram([EventSeries(np.array([1.0]), 10.0,
                                    np.array([0.0]))], n_max=3)
    with pytest.raises(ZeroRate):
        relative_noise(spec)


# ---------------------------------------------------------------------------
# correlation and count variance

def test_correlation_poisson_flat():
    runs = [poisson_process(4.0, 300.0, seed=100 + k) for k in range(10)]
    corr = correlation_estimate(runs, tau_max=5.0, bins=20)
    assert isinstance(corr, CorrelationEstimate)
    assert np.all(np.abs(corr.g - 1.0) < 0.15)
    assert abs(corr.g.mean() - 1.0) < 0.02


def test_correlation_darkroom_matches_analytic():
    runs = [lattice_process(800.0, seed=k, delay="uniform", scale=20.0)
            for k in range(20)]
    corr = correlation_estimate(runs, tau_max=30.0, bins=30)
    want = darkroom_g(corr.taus, 20.0)
    assert np.all(np.abs(corr.g - want) < 0.05)


def test_correlation_validates():
    s = poisson_process(1.0, 100.0, seed=0)
    with pytest.raises(ValueError):
        correlation_estimate([s], tau_max=60.0, bins=10)
    with pytest.raises(ValueError):
        correlation_estimate([s], tau_max=5.0, bins=0)


def test_count_variance_poisson_near_zero():
    runs = [poisson_process(5.0, 1000.0, seed=k) for k in range(5)]
    assert abs(count_variance(runs, window=2.0)) < 0.05


def test_count_variance_darkroom():
    runs = [lattice_process(2000.0, seed=k, delay="uniform", scale=20.0)
            for k in range(5)]
    for T in (5.0, 40.0):
        want = darkroom_count_variance(T, 20.0)
        assert count_variance(runs, window=T) == pytest.approx(want, abs=0.05)


def test_count_variance_window_limit():
    s = poisson_process(1.0, 100.0, seed=0)
    with pytest.raises(WindowTooLarge):
        count_variance([s], window=30.0)


# ---------------------------------------------------------------------------
# thinning and superposition

def test_thin_deterministic_and_rate():
    s = poisson_process(10.0, 500.0, seed=3)
    a = thin(s, 0.4, seed=7)
    b = thin(s, 0.4, seed=7)
    assert np.array_equal(a.times, b.times)
    assert a.rate == pytest.approx(4.0, rel=0.1)
    assert np.array_equal(thin(s, 1.0, seed=0).times, s.times)
    with pytest.raises(InvalidProbability):
        thin(s, 0.0, seed=0)


def test_thin_preserves_relative_noise():
    runs = [lattice_process(500.0, seed=k, delay="exponential", scale=5.0)
            for k in range(30)]
    thinned = [thin(s, 0.5, seed=1000 + k) for k, s in enumerate(runs)]
    n0 = relative_noise(periodogram(runs, n_max=15))
    n1 = relative_noise(periodogram(thinned, n_max=15))
    assert np.all(np.abs(n0 - n1) < 0.25)
    assert abs(n0.mean() - n1.mean()) < 0.05


def test_superpose_merges_sorted():
    a = EventSeries(np.array([1.0, 5.0]), 10.0)
    b = EventSeries(np.array([2.0, 3.0]), 10.0)
    s = superpose([a, b])
    assert np.array_equal(s.times, [1.0, 2.0, 3.0, 5.0])
    with pytest.raises(MismatchedDurations):
        superpose([a, EventSeries(np.array([1.0]), 20.0)])
    with pytest.raises(ValueError):
        superpose([a, EventSeries(np.array([1.0]), 10.0, np.array([1.0]))])


# ---------------------------------------------------------------------------
# renewal spectra

def test_renewal_exponential_is_flat():
    w = RationalLaplace([1.0], [1.0, 1.0])  # w(p) = 1/(1+p), Poisson
    omegas = np.linspace(0.01, 20.0, 200)
    assert np.allclose(renewal_spectrum(w, 1.0, omegas), 1.0, atol=1e-12)


def _renewal_oracle(w: RationalLaplace, rate, omegas):
    # direct complex evaluation of 1 + 2 Re[w/(1-w) - R/(j Omega)]
    jw = 1j * np.asarray(omegas, float)
    wv = w(jw)
    return 1.0 + 2.0 * (wv / (1.0 - wv) - rate / jw).real


def test_renewal_erlang_matches_direct_evaluation():
    w = RationalLaplace([1.0], [1.0, 2.0, 1.0])  # Erlang-2, mean 2
    omegas = np.linspace(0.05, 10.0, 100)
    got = renewal_spectrum(w, 0.5, omegas)
    assert np.allclose(got, _renewal_oracle(w, 0.5, omegas), atol=1e-10)
    assert got[0] < 1.0  # more regular than Poisson at low frequency


def test_renewal_damped_emitter_matches_direct_evaluation():
    p = WaitParams(gamma=1.0, Omega_R=2.0)
    w = waiting_time_laplace(p)
    rate = 1.0 / waiting_time_mean(p)
    omegas = np.linspace(0.05, 8.0, 80)
    got = renewal_spectrum(w, rate, omegas)
    assert np.allclose(got, _renewal_oracle(w, rate, omegas), atol=1e-10)


def test_renewal_validates():
    with pytest.raises(ImproperWaitingTime):
        renewal_spectrum(RationalLaplace([2.0], [1.0, 1.0]), 1.0, [1.0])
    with pytest.raises(ImproperWaitingTime):
        renewal_spectrum(RationalLaplace([1.0, 0.0, 1.0], [1.0, 1.0]),
                         1.0, [1.0])
    with pytest.raises(ImproperWaitingTime):
        renewal_spectrum(RationalLaplace([1.0], [1.0, 1.0]), 3.0, [1.0])


# ---------------------------------------------------------------------------
# waiting-time maps

def test_waiting_rate_roundtrip():
    t = np.linspace(0.0, 5.0, 2001)
    lam = 0.5 + 0.3 * np.sin(t)
    w = inhom_poisson_waiting(t, lam)
    back = rate_from_waiting(t, w)
    assert np.allclose(back, lam, atol=1e-4)


def test_constant_rate_gives_exponential_waiting():
    t = np.linspace(0.0, 5.0, 2001)
    w = inhom_poisson_waiting(t, np.full_like(t, 2.0))
    assert np.allclose(w, 2.0 * np.exp(-2.0 * t), atol=1e-5)


def test_waiting_maps_reject_negative():
    t = np.linspace(0.0, 1.0, 10)
    with pytest.raises(ValueError):
        inhom_poisson_waiting(t, -np.ones_like(t))
    with pytest.raises(ValueError):
        rate_from_waiting(t, -np.ones_like(t))
