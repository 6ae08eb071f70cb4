import numpy as np
import pytest

from quasirep.errors import (
    InjectivityError,
    NonIdempotentError,
    ReconstructionError,
    SplittingMismatchError,
)
from quasirep.frames import DualPair, Frame, canonical_dual, random_frame
from quasirep.gpt import make_system, random_channel, random_density
from quasirep.kirkwood_dirac import kd_distribution, kd_frame_pair, preset_bases, random_faithful_bases
from quasirep.linalg import max_abs, rank_range, vectorize
from quasirep.structure import (
    Representation,
    SystemSlot,
    audit_representation,
    build_classical_representation,
    build_representation,
    effect_sum_phi,
    extract_chi,
    extract_chi_phi,
    extract_phi,
    frames_from_chi_phi,
    split_idempotent,
    splitting_isomorphism,
    verify_decomposition,
)

from conftest import PAULIS, random_complex_matrix


@pytest.fixture
def qubit():
    return make_system("quantum", 2)


@pytest.fixture
def qutrit():
    return make_system("quantum", 3)


def kd_rep(sys, seed=3):
    pair = kd_frame_pair(random_faithful_bases(sys.dim, seed=seed))
    return build_representation({sys.label: pair}), pair


def overcomplete_rep(sys, rng, extra=1):
    frame = random_frame(sys.dim, sys.dim**2 + extra, rng)
    pair = canonical_dual(frame)
    return build_representation({sys.label: pair}), pair


class TestBuildRepresentation:
    def test_kd_identity_image_is_identity(self, qubit):
        rep, _ = kd_rep(qubit)
        assert max_abs(rep.id_image(qubit.label) - np.eye(4)) <= 1e-9

    def test_overcomplete_idempotent_rank_four(self, qubit, rng):
        elements = [p / np.sqrt(2) for p in PAULIS] + [random_complex_matrix(rng, 2)]
        pair = canonical_dual(Frame(elements))
        rep = build_representation({qubit.label: pair})
        d_mat = rep.id_image(qubit.label)
        assert max_abs(d_mat @ d_mat - d_mat) <= 1e-9
        assert np.linalg.matrix_rank(d_mat) == 4
        assert max_abs(d_mat - np.eye(5)) > 1e-3

    def test_invalid_pair_rejected(self, qubit, rng):
        broken = DualPair(random_frame(2, 4, rng), random_frame(2, 4, rng), validate=False)
        with pytest.raises(NonIdempotentError):
            build_representation({qubit.label: broken})

    def test_idempotency_for_random_spanning_frames(self, qubit, rng):
        for trial in range(10):
            rep, _ = overcomplete_rep(qubit, rng, extra=trial % 4)
            d_mat = rep.id_image(qubit.label)
            assert max_abs(d_mat @ d_mat - d_mat) <= 1e-9


class TestExtractChi:
    def test_equals_representation_matrix(self, qubit, rng):
        # chi, built from the t-weighted sum over spanning states and
        # complexified effects, must reproduce the conjugated frame rows
        rep, pair = overcomplete_rep(qubit, rng)
        chi = extract_chi(rep, qubit)
        assert max_abs(chi - pair.frame.vec_matrix.conj()) <= 1e-9

    def test_reproduces_kd_distribution(self, qubit, rng):
        kb = random_faithful_bases(2, seed=8)
        rep = build_representation({qubit.label: kd_frame_pair(kb)})
        chi = extract_chi(rep, qubit)
        for _ in range(20):
            rho = random_density(2, rng)
            table = (chi @ vectorize(rho)).reshape(2, 2)
            assert max_abs(table - kd_distribution(kb, rho)) <= 1e-10

    def test_classical_delta_is_identity(self):
        sys4 = make_system("classical", 4)
        rep = build_classical_representation({sys4.label: 4})
        assert max_abs(extract_chi(rep, sys4) - np.eye(4)) <= 1e-12

    def test_maps_states_correctly(self, qutrit, rng):
        rep, _ = kd_rep(qutrit, seed=5)
        chi = extract_chi(rep, qutrit)
        for op in qutrit.state_ops:
            direct = rep.represent_state(qutrit.label, op)
            assert max_abs(chi @ vectorize(op) - direct) <= 1e-9


class TestExtractPhi:
    def test_functorial_case_full_inverse(self, qubit):
        rep, _ = kd_rep(qubit)
        chi = extract_chi(rep, qubit)
        phi = extract_phi(rep, qubit, chi)
        assert max_abs(phi @ chi - np.eye(4)) <= 1e-10
        assert max_abs(chi @ phi - np.eye(4)) <= 1e-10

    def test_overcomplete_splits_identity_image(self, qubit, rng):
        rep, _ = overcomplete_rep(qubit, rng)
        chi = extract_chi(rep, qubit)
        phi = extract_phi(rep, qubit, chi)
        d_mat = rep.id_image(qubit.label)
        assert max_abs(phi @ chi - np.eye(4)) <= 1e-9
        assert max_abs(chi @ phi - d_mat) <= 1e-9
        assert max_abs(d_mat - np.eye(5)) > 1e-3

    def test_effect_sum_agrees(self, qubit, rng):
        # two independent constructions of the effect map coincide
        rep, _ = overcomplete_rep(qubit, rng)
        phi = extract_phi(rep, qubit)
        phi_from_effects = effect_sum_phi(rep, qubit)
        assert max_abs(phi - phi_from_effects) <= 1e-9

    def test_effect_sum_agrees_kd(self, qutrit):
        rep, _ = kd_rep(qutrit, seed=9)
        assert max_abs(extract_phi(rep, qutrit) - effect_sum_phi(rep, qutrit)) <= 1e-9

    def test_rank_deficient_chi_rejected(self, qubit):
        rep, _ = kd_rep(qubit)
        crippled = np.zeros((4, 4), dtype=complex)
        with pytest.raises(InjectivityError):
            extract_phi(rep, qubit, crippled)

    def test_chi_phi_bundle_validates(self, qutrit):
        rep, _ = kd_rep(qutrit, seed=2)
        cp = extract_chi_phi(rep, qutrit)
        assert cp.hilbert_dim == 3 and cp.chi.shape == (9, 9)


class TestSplitIdempotent:
    def test_diagonal_projector(self):
        iota, pi = split_idempotent(np.diag([1.0, 0.0]))
        assert iota.shape == (2, 1) and pi.shape == (1, 2)
        assert max_abs(iota @ pi - np.diag([1.0, 0.0])) <= 1e-12
        assert max_abs(pi @ iota - np.eye(1)) <= 1e-12

    def test_overcomplete_identity_image(self, qubit, rng):
        rep, _ = overcomplete_rep(qubit, rng, extra=2)
        d_mat = rep.id_image(qubit.label)
        iota, pi = split_idempotent(d_mat)
        assert max_abs(iota @ pi - d_mat) <= 1e-10
        assert max_abs(pi @ iota - np.eye(4)) <= 1e-10

    def test_non_idempotent_rejected(self, rng):
        with pytest.raises(NonIdempotentError):
            split_idempotent(random_complex_matrix(rng, 3))


class TestSplittingIsomorphism:
    def test_same_splitting_gives_identity(self, rng):
        a = random_complex_matrix(rng, 5, 3)
        _, _, pinv = rank_range(a)
        s = (a, pinv @ (a @ pinv))
        xi = splitting_isomorphism(s, s)
        assert max_abs(xi - np.eye(3)) <= 1e-9

    def test_recovers_connecting_matrix(self, rng):
        # conjugate one splitting by a random invertible map and recover it
        a = random_complex_matrix(rng, 6, 3)
        _, _, pinv = rank_range(a)
        iota, pi = a, pinv @ (a @ pinv)
        u = random_complex_matrix(rng, 3)
        while np.linalg.matrix_rank(u) < 3:
            u = random_complex_matrix(rng, 3)
        s2 = (iota @ np.linalg.inv(u), u @ pi)
        xi = splitting_isomorphism((iota, pi), s2)
        assert max_abs(xi - u) <= 1e-8

    def test_different_idempotents_rejected(self):
        s1 = split_idempotent(np.diag([1.0, 0.0]))
        s2 = split_idempotent(np.diag([0.0, 1.0]))
        with pytest.raises(SplittingMismatchError):
            splitting_isomorphism(s1, s2)

    def test_intertwining_identities(self, rng):
        for trial in range(10):
            n, r = 6, 1 + trial % 4
            chi = random_complex_matrix(rng, n, r)
            _, _, phi = rank_range(chi)
            d_mat = chi @ phi
            s1 = split_idempotent(d_mat)
            s2 = (chi, phi)
            xi = splitting_isomorphism(s1, s2)
            assert max_abs(s2[0] @ xi - s1[0]) <= 1e-9
            assert max_abs(xi @ s1[1] - s2[1]) <= 1e-9
            assert max_abs(xi @ (s1[1] @ s2[0]) - np.eye(r)) <= 1e-9


class TestVerifyDecomposition:
    def test_kd_rep_random_channels(self, qubit):
        rep, _ = kd_rep(qubit)
        channels = [random_channel(2, 2, seed=s) for s in range(20)]
        assert verify_decomposition(rep, qubit, qubit, channels) <= 1e-8

    def test_overcomplete_rep_random_channels(self, qubit, rng):
        rep, _ = overcomplete_rep(qubit, rng, extra=2)
        channels = [random_channel(2, 2, seed=s) for s in range(20)]
        assert verify_decomposition(rep, qubit, qubit, channels) <= 1e-8

    def test_cross_dimensional(self, qubit, qutrit, rng):
        rep = build_representation({
            qubit.label: kd_frame_pair(random_faithful_bases(2, seed=1)),
            qutrit.label: canonical_dual(random_frame(3, 10, rng)),
        })
        channels = [random_channel(2, 3, seed=s) for s in range(5)]
        assert verify_decomposition(rep, qubit, qutrit, channels) <= 1e-8

    def test_corrupted_phi_detected(self, qubit):
        # perturbing one entry of phi must push the residual far above noise
        rep, _ = kd_rep(qubit)
        chi = extract_chi(rep, qubit)
        phi = extract_phi(rep, qubit, chi)
        phi_bad = phi.copy()
        phi_bad[0, 0] += 0.1
        ch = random_channel(2, 2, seed=0)
        from quasirep.structure import _complexified_process

        lhs = rep.apply(qubit.label, qubit.label, ch)
        rhs = chi @ _complexified_process(ch, qubit, qubit) @ phi_bad
        assert max_abs(lhs - rhs) > 1e-3


class TestSemiFunctoriality:
    def test_composition_multiplicative(self, qubit, qutrit, rng):
        for sys, seed in ((qubit, 1), (qutrit, 2)):
            rep, pair = overcomplete_rep(sys, rng)
            for trial in range(20):
                ch1 = random_channel(sys.dim, sys.dim, seed=100 * seed + trial)
                ch2 = random_channel(sys.dim, sys.dim, seed=200 * seed + trial)
                from quasirep.frames import compose_channels

                lhs = rep.apply(sys.label, sys.label, compose_channels(ch2, ch1))
                rhs = rep.apply(sys.label, sys.label, ch2) @ rep.apply(sys.label, sys.label, ch1)
                assert max_abs(lhs - rhs) <= 1e-9

    def test_linearity_random_combinations(self, qubit, rng):
        rep, _ = kd_rep(qubit)
        ch1 = random_channel(2, 2, seed=31)
        ch2 = random_channel(2, 2, seed=32)
        g1 = rep.apply(qubit.label, qubit.label, ch1)
        g2 = rep.apply(qubit.label, qubit.label, ch2)
        for _ in range(10):
            alpha, beta = rng.uniform(-2, 2, 2)
            combo = rep.apply(qubit.label, qubit.label, alpha * ch1.superop + beta * ch2.superop)
            assert max_abs(combo - (alpha * g1 + beta * g2)) <= 1e-9


class TestAudit:
    def test_kd_all_green(self, qubit):
        rep, _ = kd_rep(qubit)
        report = audit_representation(rep, [qubit], trials=8, seed=0)
        assert report.semifunctorial and report.empirically_adequate
        assert report.linear and report.discard_preserving and report.functorial
        assert report.dim_check and report.decomposition_residual <= 1e-8
        assert report.all_core_pass

    def test_matrix_unit_frame_breaks_discard_only(self, qubit):
        elements = []
        for i in range(2):
            for j in range(2):
                e = np.zeros((2, 2), dtype=complex)
                e[i, j] = 1
                elements.append(e)
        rep = build_representation({qubit.label: canonical_dual(Frame(elements))})
        report = audit_representation(rep, [qubit], trials=8, seed=1)
        assert not report.discard_preserving
        assert report.semifunctorial and report.empirically_adequate and report.linear
        assert report.functorial and report.all_core_pass

    def test_mixed_frames_break_adequacy(self, qubit, rng):
        f1 = random_frame(2, 4, rng)
        f2 = random_frame(2, 4, rng)
        mixed = DualPair(f1, canonical_dual(f2).dual, validate=False)
        rep = Representation({qubit.label: SystemSlot.from_pair(mixed)}, validate=False)
        report = audit_representation(rep, [qubit], trials=8, seed=2)
        assert not report.empirically_adequate
        assert not report.all_core_pass

    def test_report_json_serializes(self, qubit):
        import json

        rep, _ = kd_rep(qubit)
        report = audit_representation(rep, [qubit], trials=2, seed=0)
        payload = json.loads(json.dumps(report.to_json()))
        assert payload["trials"] == 2 and payload["functorial"] is True

    def test_two_system_audit(self, qubit, qutrit, rng):
        rep = build_representation({
            qubit.label: kd_frame_pair(random_faithful_bases(2, seed=4)),
            qutrit.label: kd_frame_pair(random_faithful_bases(3, seed=5)),
        })
        report = audit_representation(rep, [qubit, qutrit], trials=3, seed=6)
        assert report.all_core_pass and report.functorial


class TestFramesFromChiPhi:
    def test_round_trip(self, qubit, rng):
        rep, pair = overcomplete_rep(qubit, rng)
        cp = extract_chi_phi(rep, qubit)
        back = frames_from_chi_phi(cp)
        for got, want in zip(back.frame.elements, pair.frame.elements):
            assert max_abs(got - want) <= 1e-10
        for got, want in zip(back.dual.elements, pair.dual.elements):
            assert max_abs(got - want) <= 1e-10

    def test_gram_matches_chi_phi(self, qubit, rng):
        rep, _ = overcomplete_rep(qubit, rng, extra=2)
        cp = extract_chi_phi(rep, qubit)
        back = frames_from_chi_phi(cp)
        # independent Gram computation reproduces the idempotent
        gram = np.array([
            [np.trace(f.conj().T @ g) for g in back.dual.elements]
            for f in back.frame.elements
        ])
        assert max_abs(gram - cp.chi @ cp.phi) <= 1e-9

    def test_functorial_case_biorthogonal(self, qubit):
        rep, _ = kd_rep(qubit)
        back = frames_from_chi_phi(extract_chi_phi(rep, qubit))
        assert back.is_biorthogonal()
