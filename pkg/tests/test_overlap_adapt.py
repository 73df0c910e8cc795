import numpy as np
import pytest
from scipy.linalg import expm

import oada
from oada.overlap_adapt import (four_angle_gradient, pipeline, run_overlap_adapt,
                                screen_overlap_gradients)
from oada.statevector import (Ansatz, Statevector, apply_excitation,
                              overlap, overlap_and_gradient, prepare_hf)


def test_screening_zero_at_hf_on_hf(h4):
    hf = prepare_hf(h4.n, h4.n_electrons)
    grads = screen_overlap_gradients(hf, hf, h4.pool)
    assert np.max(grads) == 0.0


def _random_real_state(rng, n_qubits, n_electrons):
    amps = np.zeros(1 << n_qubits)
    for i in range(1 << n_qubits):
        if i.bit_count() == n_electrons:
            amps[i] = rng.normal()
    amps /= np.linalg.norm(amps)
    return Statevector(n_qubits, amps.astype(complex))


def test_screening_matches_finite_difference():
    rng = np.random.default_rng(2)
    pool = oada.build_pool(4, 2)
    ref = _random_real_state(rng, 4, 2)
    state = _random_real_state(rng, 4, 2)
    grads = screen_overlap_gradients(ref, state, pool)
    step = 1e-6
    for op, g in zip(pool, grads):
        up = overlap(ref, apply_excitation(state, op.excitation, step))
        down = overlap(ref, apply_excitation(state, op.excitation, -step))
        fd = abs((up - down) / (2 * step))
        assert abs(g - fd) < 1e-8


def test_four_angle_matches_direct():
    rng = np.random.default_rng(8)
    pool = oada.build_pool(6, 2)
    for _ in range(4):
        ref = _random_real_state(rng, 6, 2)
        state = _random_real_state(rng, 6, 2)
        if abs(overlap(ref, state)) < 1e-6:
            continue
        direct = screen_overlap_gradients(ref, state, pool)
        for op, d in zip(pool[:10], direct):
            assert abs(four_angle_gradient(ref, state, op.excitation) - d) < 1e-10


def test_four_angle_zero_case(h4):
    hf = prepare_hf(h4.n, h4.n_electrons)
    assert four_angle_gradient(hf, hf, h4.pool[0].excitation) < 1e-14


def test_four_angle_singular_overlap():
    ref = Statevector(4, np.eye(16, dtype=complex)[0b0011])
    state = Statevector(4, np.eye(16, dtype=complex)[0b0101])
    pool = oada.build_pool(4, 2)
    with pytest.raises(ValueError, match="singular"):
        four_angle_gradient(ref, state, pool[0].excitation)


def test_four_angle_complex_phase_warns():
    # an imaginary zero-angle gradient violates the formula's assumption
    rng = np.random.default_rng(4)
    pool = oada.build_pool(4, 2)
    state = _random_real_state(rng, 4, 2)
    ref = _random_real_state(rng, 4, 2)
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=16))
    ref = Statevector(4, ref.amplitudes * phases)
    exc = pool[2].excitation
    from oada.statevector import _pair_bracket
    direct = _pair_bracket(ref.amplitudes, state.amplitudes, exc, 4)
    assert abs(direct.imag) > 1e-6  # seed chosen so the assumption is violated
    with pytest.warns(UserWarning, match="real overlap gradient"):
        value = four_angle_gradient(ref, state, exc)
    assert abs(value - abs(direct)) > 1e-8  # documented mismatch


def test_appendix_exponential_identity(h4):
    # exp(-i theta B) = I + (cos t - 1) B^2 - i sin t B for every pool generator
    rng = np.random.default_rng(12)
    eye = np.eye(1 << h4.n)
    for op in h4.pool[:12]:
        b = 1j * op.generator(h4.n).to_dense_matrix()
        for theta in rng.uniform(-np.pi, np.pi, size=20):
            lhs = expm(-1j * theta * b)
            rhs = eye + (np.cos(theta) - 1) * (b @ b) - 1j * np.sin(theta) * b
            assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_hf_target_stops_immediately(h4):
    hf = prepare_hf(h4.n, h4.n_electrons)
    ansatz, trace = run_overlap_adapt(hf, h4.pool, 5, n_electrons=h4.n_electrons)
    assert len(ansatz) == 0
    assert trace.records == []
    value, _ = overlap_and_gradient(ansatz, hf)
    assert abs(1.0 - value) < 1e-14  # infidelity zero


def test_h2_fci_target_exact_in_one_double(h2):
    target = h2.fci_state()
    ansatz, trace = run_overlap_adapt(target, h2.pool, 3, n_electrons=2)
    assert trace.records[-1].infidelity < 1e-10


def test_infidelity_monotone(h6, h6_overlap_50):
    _, trace = h6_overlap_50
    infids = [rec.infidelity for rec in trace.records]
    assert all(b <= a + 1e-12 for a, b in zip(infids, infids[1:]))


def test_overlap_descends_while_energy_driven_stalls(h6, h6_infidelity_curves):
    # the qualitative separation on the strongly correlated chain: the
    # overlap-guided run keeps descending while the energy-driven run's
    # overlap stalls well short of it
    adapt_infid, oa_infid = h6_infidelity_curves
    assert oa_infid[-1] < 0.2
    assert adapt_infid[-1] > 0.5
    assert np.all(oa_infid <= adapt_infid + 1e-9)


def test_pipeline_hf_target_equals_plain_adapt(h4):
    empty = Ansatz(h4.n, h4.n_electrons)
    result = pipeline(h4.mol, h4.ham, h4.pool, "adapt-ansatz", 3, 6,
                      target_ansatz=empty, eps=1e-8, e_ref=h4.e_fci)
    assert result.overlap_trace.records == []
    _, plain = oada.run_adapt(h4.ham, h4.pool, n_electrons=h4.n_electrons,
                              eps=1e-8, max_ops=6, e_ref=h4.e_fci)
    assert result.adapt_trace.to_csv() == plain.to_csv()


def test_pipeline_fci_target_h2(h2):
    result = pipeline(h2.mol, h2.ham, h2.pool, "fci", 3, 3, e_ref=h2.e_fci)
    assert abs(result.target_energy - h2.e_fci) < 1e-10
    final = result.overlap_trace.records[-1]
    assert final.infidelity < 1e-10


def test_pipeline_rejects_unknown_source(h2):
    with pytest.raises(ValueError, match="ref_source"):
        pipeline(h2.mol, h2.ham, h2.pool, "mystery", 2, 3)


def test_overlap_trace_csv_shape(h2):
    target = h2.fci_state()
    _, trace = run_overlap_adapt(target, h2.pool, 2, n_electrons=2,
                                 hamiltonian=h2.ham)
    lines = trace.to_csv().splitlines()
    assert lines[0] == "iter,op_id,kind,grad,infidelity,energy,params"
    assert all(len(line.split(",")) == 7 for line in lines[1:])
