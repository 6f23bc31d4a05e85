import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spingate.gate import (
    CNOT_PHOTON_CONTROL,
    HADAMARD,
    IDEAL,
    ConditionalAmplitudes,
    apply,
    concurrence,
    conditional_amplitudes,
    dumps,
    fidelity,
    fidelity_sweep,
    gate_matrix,
    matrix_to_json,
    photon_op,
    spin_op,
    truth_table,
    truth_table_to_json,
)
from spingate.model import case_params, with_kappa1
from spingate.pulse import gaussian_pulse

PLUS = np.array([1, 1], dtype=complex) / math.sqrt(2)
PRODUCT_PLUS = np.kron(PLUS, PLUS)


def concurrence_oracle(state):
    """sqrt(2 (1 - Tr rho_A^2)) from the reduced photon density matrix."""
    a = np.asarray(state, dtype=complex)
    a = a / np.linalg.norm(a)
    m = a.reshape(2, 2)
    rho = m @ m.conj().T
    purity = float(np.trace(rho @ rho).real)
    return math.sqrt(max(0.0, 2 * (1 - purity)))


def case_i_amps(kappa1=30.0):
    p, w = case_params("I")
    return conditional_amplitudes(with_kappa1(p, kappa1), w)


def test_case_i_operating_point():
    a = case_i_amps()
    # independent closed-form values for kappa0=0.1, kappa1=g=30, gamma=1.001
    assert a.t_up == pytest.approx(0.9671826609485303, abs=1e-12)
    assert a.t_down == pytest.approx(-0.9933554817275747, abs=1e-12)
    assert abs(a.r_up) < 1e-12 and abs(a.r_down) < 1e-12
    assert fidelity(a) == pytest.approx(0.9802690713380525, abs=1e-12)


def test_uncoupled_waveguide_is_identity():
    p, w = case_params("I")
    a = conditional_amplitudes(with_kappa1(p, 0.0), w)
    assert a.t_up == a.t_down == 1
    assert fidelity(a) == 0.0
    np.testing.assert_array_equal(gate_matrix(a), np.eye(4))


def test_strong_coupling_limit_is_ideal():
    p = replace(case_params("I")[0], kappa_e0=0.0, kappa_o0=0.0, g_e=1e6 + 0j, g_o=-1e6j)
    a = conditional_amplitudes(p, 0.0)
    assert abs(a.t_up - 1) < 1e-6 and abs(a.t_down + 1) < 1e-12
    assert fidelity(a) == pytest.approx(1.0, abs=1e-6)


def test_convention_check():
    p = replace(case_params("I")[0], g_o=30j)
    with pytest.raises(ValueError):
        conditional_amplitudes(p)
    conditional_amplitudes(p, check_convention=False)


@given(st.floats(0, 2 * math.pi))
def test_fidelity_ignores_global_phase(phi):
    a = case_i_amps()
    z = complex(math.cos(phi), math.sin(phi))
    rotated = ConditionalAmplitudes(a.t_up * z, a.t_down * z)
    assert fidelity(rotated) == pytest.approx(fidelity(a), abs=1e-14)


def test_probability_definition_is_square():
    a = case_i_amps()
    assert fidelity(a, "probability_overlap") == pytest.approx(fidelity(a) ** 2, rel=1e-15)
    with pytest.raises(ValueError):
        fidelity(a, "trace")


def test_case_i_sweep_has_interior_maximum():
    grid = np.linspace(0.0, 60.0, 601)
    c = fidelity_sweep("I", "kappa1", grid)
    k = int(np.argmax(c.F))
    assert 0 < k < len(grid) - 1
    assert c.F[k] >= 0.98
    assert c.x[k] == pytest.approx(13.5, abs=0.2)
    assert c.F[0] == 0.0


def test_case_iii_below_case_ii():
    grid = np.linspace(0.5, 60.0, 120)
    f2 = fidelity_sweep("II", "kappa1", grid).F
    f3 = fidelity_sweep("III", "kappa1", grid).F
    assert np.all(f3 <= f2 + 1e-12)


def test_case_v_gamma_sweep_decreasing():
    c = fidelity_sweep("V", "gamma", np.linspace(0.001, 10.0, 200))
    assert np.all(np.diff(c.F) < 0)


@pytest.mark.parametrize("case", ["IV", "VII"])
def test_mismatched_cavities_keep_high_fidelity(case):
    p, w = case_params(case)
    a = conditional_amplitudes(p, w)
    assert fidelity(a) > 0.9
    assert abs(a.r_up) > 1e-3  # no longer forward-only


def test_unknown_sweep_variable():
    with pytest.raises(ValueError):
        fidelity_sweep("I", "g", [1.0])


def test_sweep_csv():
    c = fidelity_sweep("I", "kappa1", [10.0, 30.0])
    lines = c.to_csv().splitlines()
    assert lines[0] == "x,F"
    assert float(lines[2].split(",")[1]) == pytest.approx(0.9802690713380525, abs=1e-15)


def test_ideal_truth_table_signs():
    rows = truth_table()
    assert [r.input for r in rows] == ["h_up", "h_down", "v_up", "v_down"]
    assert [r.amplitude for r in rows] == [1, -1, 1, 1]
    assert all(r.deviation == 0 for r in rows)


def test_case_i_truth_table_close_to_ideal():
    assert max(r.deviation for r in truth_table(case_i_amps())) < 0.05


def test_decoupled_truth_table_deviation():
    p, w = case_params("I")
    rows = truth_table(conditional_amplitudes(with_kappa1(p, 0.0), w))
    assert [r.deviation for r in rows] == [0.0, 2.0, 0.0, 0.0]


def test_gate_matrix_close_to_ideal_for_case_i():
    m = gate_matrix(case_i_amps())
    assert np.max(np.abs(m - gate_matrix(IDEAL))) < 0.05


def test_cnot_from_cz():
    cnot = spin_op(HADAMARD) @ gate_matrix(IDEAL) @ spin_op(HADAMARD)
    np.testing.assert_allclose(cnot, CNOT_PHOTON_CONTROL, atol=1e-15)


def test_operator_layout():
    x = np.array([[0, 1], [1, 0]])
    np.testing.assert_array_equal(photon_op(x) @ np.eye(4)[0], np.eye(4)[2])
    np.testing.assert_array_equal(spin_op(x) @ np.eye(4)[0], np.eye(4)[1])
    with pytest.raises(ValueError):
        apply(np.eye(2), PRODUCT_PLUS)


def test_concurrence_values():
    assert concurrence(PRODUCT_PLUS) == pytest.approx(0.0, abs=1e-15)
    bell = np.array([1, 0, 0, 1]) / math.sqrt(2)
    assert concurrence(bell) == pytest.approx(1.0, abs=1e-15)
    assert concurrence(apply(gate_matrix(IDEAL), PRODUCT_PLUS)) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        concurrence(np.zeros(4))


def test_concurrence_matches_reduced_state_oracle():
    rng = np.random.default_rng(3)
    for _ in range(200):
        s = rng.normal(size=4) + 1j * rng.normal(size=4)
        assert concurrence(s) == pytest.approx(concurrence_oracle(s), abs=1e-12)
    out = apply(gate_matrix(case_i_amps()), PRODUCT_PLUS)
    assert concurrence(out) == pytest.approx(0.9997141583537186, abs=1e-12)
    best = apply(gate_matrix(case_i_amps(13.5)), PRODUCT_PLUS)
    assert concurrence(best) == pytest.approx(concurrence_oracle(best), abs=1e-12)
    assert concurrence(best) >= 0.95


@given(st.floats(0.1, 100.0))
@settings(max_examples=30, deadline=None)
def test_fidelity_invariant_under_rescaling(s):
    p, w = case_params("I")
    assert fidelity(conditional_amplitudes(p.scaled(s), w * s)) == pytest.approx(
        fidelity(conditional_amplitudes(p, w)), abs=1e-12
    )


def test_pulse_fidelity_approaches_monochromatic():
    p, w = case_params("I")
    mono = fidelity(conditional_amplitudes(p, w))
    gaps = []
    for tk in (10.0, 100.0, 1000.0):
        tau = tk / p.kappa_e
        pulse = gaussian_pulse(tau, w, 24 * tau, 1024)
        gaps.append(abs(fidelity(conditional_amplitudes(p, pulse=pulse)) - mono))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-5


def test_json_layout():
    m = matrix_to_json(gate_matrix(IDEAL))
    assert m[1][1] == [-1.0, 0.0]
    text = dumps({"table": truth_table_to_json(truth_table())})
    assert text.endswith("\n") and '"h_down"' in text
