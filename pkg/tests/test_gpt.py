import numpy as np
import pytest

from quasirep.errors import DimensionError, SpanningError
from quasirep.frames import unitary_channel
from quasirep.gpt import (
    GptProcess,
    channel_to_process,
    identity_resolution,
    make_system,
    random_channel,
    system_from_json,
    system_to_json,
    tomographic_decompose,
)
from quasirep.linalg import max_abs

from conftest import SIGMA_X


def reassemble(states, effects, coeff):
    """Oracle: rebuild sum_ij c_ij s_i e_j as an explicit matrix."""
    out = np.zeros((states.shape[1], effects.shape[1]))
    for i, s in enumerate(states):
        for j, e in enumerate(effects):
            out += coeff[i, j] * np.outer(s, e)
    return out


class TestMakeSystem:
    def test_classical_delta_basis(self):
        sys3 = make_system("classical", 3)
        assert np.array_equal(sys3.u, np.ones(3))
        assert max_abs(sys3.t - np.eye(3)) <= 1e-12
        assert np.array_equal(sys3.states, np.eye(3))

    def test_quantum_states_span(self):
        sys2 = make_system("quantum", 2)
        assert sys2.states.shape == (4, 4)
        assert np.linalg.matrix_rank(sys2.states) == 4

    def test_quantum_states_unit_trace(self):
        for d in (2, 3):
            sys_d = make_system("quantum", d)
            for coords in sys_d.states:
                assert sys_d.u @ coords == pytest.approx(1.0)

    def test_quantum_states_are_valid(self):
        sys3 = make_system("quantum", 3)
        for op in sys3.state_ops:
            assert np.linalg.eigvalsh(op).min() >= -1e-12
            assert np.trace(op).real == pytest.approx(1.0)

    def test_dim_zero_rejected(self):
        with pytest.raises(DimensionError):
            make_system("classical", 0)

    def test_quantum_dim_cap(self):
        with pytest.raises(DimensionError):
            make_system("quantum", 5)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            make_system("boxworld", 2)


class TestIdentityResolution:
    def test_classical_identity(self):
        sys2 = make_system("classical", 2)
        assert max_abs(identity_resolution(sys2) - np.eye(2)) <= 1e-12

    def test_qubit_reassembles_identity(self):
        sys2 = make_system("quantum", 2)
        rebuilt = reassemble(sys2.states, sys2.effects, sys2.t)
        assert max_abs(rebuilt - np.eye(4)) <= 1e-10

    def test_all_bundled_systems(self):
        for kind, dims in (("quantum", (1, 2, 3, 4)), ("classical", (1, 3, 8))):
            for d in dims:
                sys_d = make_system(kind, d)
                rebuilt = reassemble(sys_d.states, sys_d.effects, sys_d.t)
                assert max_abs(rebuilt - np.eye(sys_d.real_dim)) <= 1e-10

    def test_overcomplete_state_list(self, rng):
        # an extra spanning state keeps a (non-unique) minimal-norm solution
        sys2 = make_system("quantum", 2)
        extra = np.vstack([sys2.states, sys2.states[:1] * 0.5 + sys2.states[1:2] * 0.5])
        sys2.states = extra
        sys2.effects = np.vstack([sys2.effects, sys2.effects[:1]])
        t = identity_resolution(sys2)
        assert max_abs(reassemble(sys2.states, sys2.effects, t) - np.eye(4)) <= 1e-10


class TestTomographicDecompose:
    def test_classical_identity_process(self):
        sys2 = make_system("classical", 2)
        proc = GptProcess(sys2, sys2, np.eye(2))
        assert max_abs(tomographic_decompose(proc) - np.eye(2)) <= 1e-12

    def test_qubit_unitary_conjugation(self):
        sys2 = make_system("quantum", 2)
        proc = channel_to_process(unitary_channel(SIGMA_X), sys2, sys2)
        r = tomographic_decompose(proc)
        assert max_abs(reassemble(sys2.states, sys2.effects, r) - proc.matrix) <= 1e-10

    def test_random_processes(self, rng):
        sys2 = make_system("quantum", 2)
        sys3 = make_system("quantum", 3)
        for trial in range(10):
            proc = channel_to_process(random_channel(2, 3, seed=trial), sys2, sys3)
            r = tomographic_decompose(proc)
            rebuilt = reassemble(sys3.states, sys2.effects, r)
            assert max_abs(rebuilt - proc.matrix) <= 1e-10

    def test_mismatched_systems_rejected(self):
        sys2 = make_system("classical", 2)
        sys3 = make_system("classical", 3)
        with pytest.raises(DimensionError):
            GptProcess(sys2, sys3, np.eye(2))

    def test_non_spanning_raises(self):
        sys2 = make_system("classical", 2)
        crippled = make_system("classical", 2)
        crippled.states = np.array([[1.0, 0.0]])
        crippled.effects = np.array([[1.0, 0.0]])
        proc = GptProcess(sys2, sys2, np.array([[0.0, 1.0], [1.0, 0.0]]))
        broken = GptProcess(crippled, crippled, np.array([[0.0, 1.0], [1.0, 0.0]]))
        tomographic_decompose(proc)  # fine on the real system
        with pytest.raises(SpanningError):
            tomographic_decompose(broken)


class TestRandomChannel:
    def test_trivial_system(self):
        ch = random_channel(1, 1, seed=0)
        assert max_abs(ch.apply(np.array([[1.0]])) - np.array([[1.0]])) <= 1e-12

    def test_deterministic(self):
        a = random_channel(2, 3, seed=11)
        b = random_channel(2, 3, seed=11)
        assert all(np.array_equal(x, y) for x, y in zip(a.kraus, b.kraus))

    def test_choi_and_trace(self):
        for seed in range(20):
            ch = random_channel(2, 2, seed=seed)
            assert np.linalg.eigvalsh(ch.choi()).min() >= -1e-12
            gram = sum(k.conj().T @ k for k in ch.kraus)
            assert max_abs(gram - np.eye(2)) <= 1e-10

    def test_dims_capped(self):
        with pytest.raises(DimensionError):
            random_channel(5, 2, seed=0)


class TestClassicalProcesses:
    def test_substochastic_closure(self, rng):
        sys3 = make_system("classical", 3)
        for _ in range(20):
            a = rng.uniform(0, 1, (3, 3))
            a /= a.sum(axis=0) * rng.uniform(1, 2)
            b = rng.uniform(0, 1, (3, 3))
            b /= b.sum(axis=0) * rng.uniform(1, 2)
            pa = GptProcess(sys3, sys3, a)
            pb = GptProcess(sys3, sys3, b)
            assert pa.is_substochastic() and pb.is_substochastic()
            assert GptProcess(sys3, sys3, b @ a).is_substochastic()

    def test_closed_diagrams_in_unit_interval(self, rng):
        sys3 = make_system("classical", 3)
        for _ in range(20):
            gamma = rng.uniform(0, 1, (3, 3))
            gamma /= gamma.sum(axis=0) * rng.uniform(1, 2)
            mu = rng.uniform(0, 1, 3)
            mu /= mu.sum() * rng.uniform(1, 2)
            xi = rng.uniform(0, 1, 3)
            value = xi @ gamma @ mu
            assert -1e-12 <= value <= 1 + 1e-12


class TestChannelToProcess:
    def test_real_coordinates(self):
        sys2 = make_system("quantum", 2)
        proc = channel_to_process(random_channel(2, 2, seed=7), sys2, sys2)
        assert proc.matrix.dtype == float

    def test_action_agrees_with_channel(self, rng):
        from quasirep.gpt import coords_to_operator, operator_to_coords, random_density

        sys2 = make_system("quantum", 2)
        sys3 = make_system("quantum", 3)
        ch = random_channel(2, 3, seed=13)
        proc = channel_to_process(ch, sys2, sys3)
        rho = random_density(2, rng)
        out_coords = proc.matrix @ operator_to_coords(rho, sys2.iso)
        assert max_abs(coords_to_operator(out_coords, sys3.iso) - ch.apply(rho)) <= 1e-10

    def test_wrong_dims(self):
        sys2 = make_system("quantum", 2)
        with pytest.raises(DimensionError):
            channel_to_process(random_channel(3, 3, seed=0), sys2, sys2)


def test_system_json_round_trip():
    sys3 = make_system("quantum", 3, seed=5)
    back = system_from_json(system_to_json(sys3))
    assert back.kind == "quantum" and back.dim == 3 and back.seed == 5
    assert max_abs(back.states - sys3.states) == 0


def test_process_json_round_trip():
    import json

    from quasirep.gpt import process_from_json, process_to_json

    sys2 = make_system("quantum", 2)
    proc = channel_to_process(random_channel(2, 2, seed=3), sys2, sys2)
    back = process_from_json(json.loads(json.dumps(process_to_json(proc))))
    assert max_abs(back.matrix - proc.matrix) == 0
    assert back.source.label == sys2.label
