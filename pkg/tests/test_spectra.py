import numpy as np
import pytest

from spingate.model import SpinState, ValidatedParams
from spingate.spectra import Spectrum, emit, fig3_params, find_peaks, read_csv, sweep
from spingate.steady_state import SingularSystemError


def reflection_oracle(delta, kappa0, g):
    """|r|^2 for the mirror-plane emitter, written out by hand (gamma = kappa0/10, kappa1 = 20 kappa0)."""
    k1, gamma = 20 * kappa0, kappa0 / 10
    A = -1j * delta + gamma
    D = 21 * kappa0 - 1j * delta
    return np.abs(-k1 * A / (A * D + g * g) + k1 / D) ** 2


def oracle_peaks(lo, hi, kappa0, g, n=400001):
    d = np.linspace(lo, hi, n)
    R = reflection_oracle(d, kappa0, g)
    i = np.flatnonzero((R[1:-1] > R[:-2]) & (R[1:-1] > R[2:])) + 1
    return d[i]


def test_no_dipole_has_no_reflection_and_a_resonant_dip():
    k0, k1 = 0.5, 6.0
    p = ValidatedParams(kappa_e0=k0, kappa_o0=k0, kappa_e1=k1, kappa_o1=k1, g_e=3, g_o=-3j)
    spec = sweep(p, SpinState.DOWN, -20, 20, 401)
    assert np.max(spec.R) < 1e-12
    assert spec.T[200] == pytest.approx(((k1 - k0) / (k1 + k0)) ** 2, rel=1e-12)
    assert spec.T[0] > 0.9


def test_fig3_resonant_reflection():
    spec = sweep(fig3_params(), SpinState.UP, -30, 30, 601)
    i = 300
    assert spec.delta_grid[i] == 0
    assert spec.T[i] < 1e-3
    assert spec.R[i] == pytest.approx(0.870, abs=5e-3)


def test_decoupled_waveguide_is_transparent():
    p = ValidatedParams(kappa_e0=0.3, kappa_o0=0.3, g_e=2.0, gamma_s=0, gamma_p=0.1)
    spec = sweep(p, SpinState.UP, -10, 10, 101)
    np.testing.assert_allclose(spec.T, 1.0, atol=1e-15)
    np.testing.assert_allclose(spec.R, 0.0, atol=1e-15)


@pytest.mark.parametrize("spin", list(SpinState))
def test_pointwise_energy_balance(spin):
    spec = sweep(fig3_params(g=40.0), spin, -100, 100, 1001)
    assert np.max(np.abs(spec.T + spec.R + spec.L - 1)) < 1e-10


def test_symmetry_with_real_couplings_and_zero_detuning():
    spec = sweep(fig3_params(g=25.0), SpinState.UP, -80, 80, 1601)
    np.testing.assert_allclose(spec.T, spec.T[::-1], atol=1e-10)
    np.testing.assert_allclose(spec.R, spec.R[::-1], atol=1e-10)


def test_three_peaks_in_strong_coupling():
    g = 60.0
    spec = sweep(fig3_params(g=g), SpinState.UP, -3 * g, 3 * g, 3001)
    step = spec.delta_grid[1] - spec.delta_grid[0]
    peaks = find_peaks(spec)
    assert len(peaks) == 3
    expected = oracle_peaks(-3 * g, 3 * g, 1.0, g)
    assert len(expected) == 3
    np.testing.assert_allclose(peaks.delta_peak, expected, atol=step)
    assert abs(peaks.delta_peak[1]) <= step
    # dressed modes sit near +-g, pulled inward by the cavity damping
    assert np.all(np.abs(np.abs(peaks.delta_peak[[0, 2]]) - g) < 0.1 * g)


def test_peaks_merge_when_cavity_decay_grows():
    g = 60.0
    spec = sweep(fig3_params(kappa0=10.0, g=g), SpinState.UP, -600, 600, 3001)
    peaks = find_peaks(spec)
    assert len(peaks) == 1
    assert abs(peaks.delta_peak[0]) <= spec.delta_grid[1] - spec.delta_grid[0]


def test_peak_count_decreases_monotonically_with_decay():
    g = 60.0
    counts = []
    for scale in np.linspace(1.0, 10.0, 91):
        spec = sweep(fig3_params(kappa0=scale, g=g), SpinState.UP, -4 * g, 4 * g, 2401)
        counts.append(len(find_peaks(spec)))
    assert counts[0] == 3 and counts[-1] == 1
    assert all(a >= b for a, b in zip(counts, counts[1:]))


def test_grid_refinement_moves_peaks_by_less_than_a_step():
    g = 60.0
    coarse = sweep(fig3_params(g=g), SpinState.UP, -180, 180, 1201)
    fine = sweep(fig3_params(g=g), SpinState.UP, -180, 180, 2401)
    a, b = find_peaks(coarse), find_peaks(fine)
    assert len(a) == len(b) == 3
    assert np.max(np.abs(a.delta_peak - b.delta_peak)) <= coarse.delta_grid[1] - coarse.delta_grid[0]


def test_monotone_spectrum_has_no_peaks():
    d = np.linspace(0, 1, 50)
    spec = Spectrum(d, 1 - d, d, np.zeros_like(d))
    assert len(find_peaks(spec)) == 0


def test_plateau_counts_once_at_midpoint():
    d = np.arange(7.0)
    R = np.array([0, 1, 2, 2, 2, 1, 0], float)
    peaks = find_peaks(Spectrum(d, 1 - R, R, np.zeros(7)))
    assert list(peaks) == [(3.0, 2.0)]


def test_prominence_threshold_suppresses_ripple():
    d = np.arange(9.0)
    R = np.array([0, 0.5, 1.0, 0.5, 0.501, 0.5, 0.2, 0.1, 0], float)
    assert len(find_peaks(Spectrum(d, 1 - R, R, np.zeros(9)), 0.01)) == 1
    assert len(find_peaks(Spectrum(d, 1 - R, R, np.zeros(9)), 0.0)) == 2


def test_sweep_preconditions():
    with pytest.raises(ValueError):
        sweep(fig3_params(), SpinState.UP, 0, 1, 1)
    with pytest.raises(ValueError):
        sweep(fig3_params(), SpinState.UP, 1, 1, 5)


def test_sweep_reports_singular_detuning():
    p = ValidatedParams(kappa_e1=0.0, kappa_o1=1.0, gamma_s=0, gamma_p=0)
    with pytest.raises(SingularSystemError, match="delta=0.0"):
        sweep(p, SpinState.DOWN, -1, 1, 3)


def test_spectrum_rejects_bad_grid():
    with pytest.raises(ValueError):
        Spectrum(np.array([0.0, 0.0]), np.zeros(2), np.zeros(2), np.zeros(2))
    with pytest.raises(ValueError):
        Spectrum(np.array([0.0, 1.0]), np.zeros(3), np.zeros(2), np.zeros(2))


def test_emit_three_points(tmp_path):
    spec = sweep(fig3_params(), SpinState.UP, -1, 1, 3)
    path = tmp_path / "s.csv"
    emit(spec, path)
    lines = path.read_text().splitlines()
    assert len(lines) == 4
    assert lines[0] == "delta,T,R,L"


def test_emit_is_byte_stable_and_round_trips(tmp_path):
    spec = sweep(fig3_params(g=33.3), SpinState.UP, -77.7, 77.7, 257)
    emit(spec, tmp_path / "a.csv")
    emit(spec, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    back = read_csv(tmp_path / "a.csv")
    for name in ("delta_grid", "T", "R", "L"):
        np.testing.assert_array_equal(getattr(back, name), getattr(spec, name))


def test_emit_failure_names_path(tmp_path):
    spec = sweep(fig3_params(), SpinState.UP, -1, 1, 3)
    bad = tmp_path / "missing" / "s.csv"
    with pytest.raises(OSError, match="missing"):
        emit(spec, bad)
