import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import ansatz_unitary, circuit_unitary, random_orthogonal
from vqcloud.cloud import CloudCore, ServiceConfig
from vqcloud.errors import ConfigurationError, InvalidArgumentError, ProtocolError, TransportError
from vqcloud.protocol import (
    BMatrix,
    ExtractionOptions,
    ExtractionState,
    LocalEndpoint,
    decoy_parameter_sets,
    extract_b,
    extract_padded,
    extract_with_decoys,
    fallback_round,
    pad_dimension,
    reconstruct_probabilities,
)
from vqcloud.protocol.extraction import ExtractionReport
from vqcloud.simulator import AnsatzSpec, Gate, ObservableRotation, Superposition, build_real_amplitudes


class MatrixEndpoint:
    """A fake cloud that applies an arbitrary real orthogonal matrix."""

    def __init__(self, U):
        self.U = np.asarray(U)
        self.calls = 0

    def run(self, request):
        self.calls += 1
        psi = np.zeros(self.U.shape[0])
        inp = request["input"]
        if inp["type"] == "basis":
            psi[inp["i"]] = 1.0
        else:
            psi[[inp["r"], inp["i"]]] = 1 / np.sqrt(2)
        return {"probs": ((self.U @ psi) ** 2).tolist()}


def sparse_orthogonal(n, rng):
    """Random 2x2 rotations and +-1 entries scattered by two permutations."""
    N = 1 << n
    core = np.zeros((N, N))
    k = 0
    while k < N:
        if k + 1 < N and rng.random() < 0.6:
            a = rng.uniform(0, 2 * np.pi)
            core[k : k + 2, k : k + 2] = [[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]]
            k += 2
        else:
            core[k, k] = rng.choice([-1.0, 1.0])
            k += 1
    rows, cols = rng.permutation(N), rng.permutation(N)
    return core[rows][:, cols]


def circuit_matrix(ansatz, observable=ObservableRotation()):
    U = ansatz_unitary(ansatz.n, ansatz.reps, ansatz.entanglement, ansatz.thetas)
    return circuit_unitary(ansatz.n, observable.gates) @ U


def unit_rows(rng, count, d):
    x = rng.standard_normal((count, d))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def same_up_to_row_signs(B, U):
    signs = np.where(np.sum(B * U, axis=1) < 0, -1.0, 1.0)
    np.testing.assert_allclose(B * signs[:, None], U, atol=1e-10)


class TestKnownCircuits:
    def test_identity(self):
        b, report = extract_b(CloudCore(), AnsatzSpec.zeros(2, 2), d=4)
        same_up_to_row_signs(b.entries, np.eye(4))
        # reference 0 anchors only row 0, so two more rounds follow
        assert report.references_used == [0, 1, 2]
        assert report.runs_issued == 10 <= 4 * 5 // 2
        assert report.zero_rows == [3]

    def test_single_cx_layer_is_permutation(self):
        ansatz = AnsatzSpec.zeros(2, 1)
        b, report = extract_b(CloudCore(), ansatz, d=4)
        U = circuit_matrix(ansatz)
        same_up_to_row_signs(b.entries, U)
        assert set(np.abs(b.entries).ravel()) == {0.0, 1.0}
        assert report.runs_issued <= 10
        for i in range(4):
            np.testing.assert_allclose(reconstruct_probabilities(b, np.eye(4)[i]), U[:, i] ** 2, atol=1e-12)

    def test_sign_table_convention(self):
        b, report = extract_b(CloudCore(), AnsatzSpec.random(3, 2, seed=11), d=8)
        primary = report.references_used[0]
        anchored = [m for m, r in enumerate(report.signs.reference_used) if r == primary]
        assert anchored
        assert np.all(report.signs.sigma[anchored, primary] == 1)


class TestOracleEquivalence:
    @pytest.mark.parametrize("seed", range(6))
    def test_random_n3_reps2(self, seed):
        rng = np.random.default_rng(seed)
        ansatz = AnsatzSpec.random(3, 2, ["full", "linear"][seed % 2], seed=rng)
        b, report = extract_b(CloudCore(), ansatz, d=8)
        U = circuit_matrix(ansatz)
        F = unit_rows(rng, 20, 8)
        np.testing.assert_allclose(reconstruct_probabilities(b, F), (F @ U.T) ** 2, atol=1e-8)
        np.testing.assert_allclose(b.column_norms(), 1.0, atol=1e-8)

    def test_with_observable_rotation(self):
        ansatz = AnsatzSpec.random(3, 1, seed=2)
        obs = ObservableRotation((Gate.ry(1, 0.7), Gate.cx(0, 2), Gate.x(1)))
        b, _ = extract_b(CloudCore(), ansatz, obs, d=8)
        same_up_to_row_signs(b.entries, circuit_matrix(ansatz, obs))

    @pytest.mark.parametrize("d", [1, 3, 5, 8])
    def test_partial_dimension(self, d):
        ansatz = AnsatzSpec.random(3, 2, seed=d)
        b, _ = extract_b(CloudCore(), ansatz, d=d)
        U = circuit_matrix(ansatz)[:, :d]
        F = unit_rows(np.random.default_rng(d), 10, d)
        np.testing.assert_allclose(reconstruct_probabilities(b, F), (F @ U.T) ** 2, atol=1e-8)
        np.testing.assert_allclose(np.linalg.norm(b.entries @ F.T, axis=0), 1.0, atol=1e-8)

    @pytest.mark.parametrize("seed", range(8))
    def test_sparse_unitaries_with_fallback(self, seed):
        rng = np.random.default_rng(100 + seed)
        U = sparse_orthogonal(3, rng)
        ansatz = AnsatzSpec.zeros(3, 1)  # shape only; the fake cloud ignores it
        b, report = extract_b(MatrixEndpoint(U), ansatz, d=8)
        F = unit_rows(rng, 20, 8)
        np.testing.assert_allclose(reconstruct_probabilities(b, F), (F @ U.T) ** 2, atol=1e-8)
        assert report.runs_issued <= 36

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.integers(1, 4))
    def test_dense_orthogonal_property(self, seed, n):
        rng = np.random.default_rng(seed)
        U = random_orthogonal(1 << n, rng)
        b, report = extract_b(MatrixEndpoint(U), AnsatzSpec.zeros(n, 1), d=1 << n, options=ExtractionOptions(workers=1))
        same_up_to_row_signs(b.entries, U)
        assert report.runs_issued == 2 * (1 << n) - 1

    def test_row_sign_invariance(self):
        ansatz = AnsatzSpec.random(3, 2, seed=5)
        b, _ = extract_b(CloudCore(), ansatz, d=8)
        F = unit_rows(np.random.default_rng(0), 10, 8)
        flipped = b.flip_rows([0, 3, 6])
        assert not np.allclose(flipped.entries, b.entries)
        np.testing.assert_allclose(reconstruct_probabilities(flipped, F), reconstruct_probabilities(b, F), atol=1e-15)


class TestRunCounts:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_single_reference(self, n):
        core = CloudCore()
        d = 1 << n
        b, report = extract_b(core, AnsatzSpec.random(n, 2, seed=1), d=d)
        assert report.references_used == [0]
        assert report.runs_issued == 2 * d - 1 == len(core.audit_log())
        assert report.zero_rows == []

    def test_worst_case_bound(self):
        core = CloudCore()
        ansatz = AnsatzSpec.zeros(3, 1)
        b, report = extract_b(core, ansatz, d=8)
        assert report.runs_issued == len(core.audit_log()) <= 36
        F = unit_rows(np.random.default_rng(1), 10, 8)
        np.testing.assert_allclose(reconstruct_probabilities(b, F), (F @ circuit_matrix(ansatz).T) ** 2, atol=1e-8)

    def test_explicit_reference(self):
        b, report = extract_b(CloudCore(), AnsatzSpec.random(2, 2, seed=3), d=4, options=ExtractionOptions(reference=2))
        assert report.references_used == [2]
        with pytest.raises(ConfigurationError):
            extract_b(CloudCore(), AnsatzSpec.random(2, 2, seed=3), d=4, options=ExtractionOptions(reference=4))

    def test_dimension_bounds(self):
        with pytest.raises(ConfigurationError):
            extract_b(CloudCore(), AnsatzSpec.zeros(2, 1), d=5)
        with pytest.raises(ConfigurationError):
            extract_b(CloudCore(), AnsatzSpec.zeros(2, 1), d=0)

    def test_d1_needs_no_superposition(self):
        b, report = extract_b(CloudCore(), AnsatzSpec.random(2, 1, seed=0), d=1)
        assert report.runs_issued == 1


class TestFallbackRound:
    def test_none_when_all_anchored(self):
        P = np.full((4, 4), 0.25)
        state = ExtractionState(P, [0], np.zeros(4, dtype=int), 1e-12)
        assert fallback_round(state) is None

    def test_schedules_unused_pairs(self):
        state = ExtractionState(np.eye(4), [0], np.array([0, -1, -1, -1]), 1e-12)
        ref, inputs = fallback_round(state)
        assert ref == 1
        assert inputs == [Superposition(1, 2), Superposition(1, 3)]

    def test_stops_after_d_minus_one_references(self):
        state = ExtractionState(np.eye(4), [0, 1, 2], np.array([0, 1, 2, -1]), 1e-12)
        assert fallback_round(state) is None

    def test_zero_rows_do_not_need_anchor(self):
        P = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0], [0.0, 0.0]])
        state = ExtractionState(P, [0], np.array([0, -1, -1, -1]), 1e-12)
        assert state.rows_needing_anchor() == [1]


class TestEndpointErrors:
    def test_wrong_length(self):
        class Short:
            def run(self, request):
                return {"probs": [1.0, 0.0]}

        with pytest.raises(ProtocolError):
            extract_b(Short(), AnsatzSpec.zeros(2, 1))

    def test_unreachable(self):
        import socket

        with socket.socket() as s:
            s.bind(("127.0.0.1", 0))
            port = s.getsockname()[1]
        with pytest.raises(TransportError):
            extract_b(f"http://127.0.0.1:{port}", AnsatzSpec.zeros(1, 1))

    def test_not_an_endpoint(self):
        with pytest.raises(TypeError):
            extract_b(42, AnsatzSpec.zeros(1, 1))


class TestPadding:
    def test_plan_784(self):
        plan = pad_dimension(784, 10)
        assert (plan.basis_runs, plan.superposition_runs, plan.best_case_runs) == (1024, 1023, 2047)

    @pytest.mark.parametrize("d,n", [(784, 9), (5, 2), (0, 3)])
    def test_invalid(self, d, n):
        with pytest.raises(InvalidArgumentError):
            pad_dimension(d, n)

    def test_no_padding_matches_default(self):
        ansatz = AnsatzSpec.random(3, 1, seed=4)
        b1, r1 = extract_padded(CloudCore(), ansatz, pad_dimension(8, 3))
        b2, r2 = extract_b(CloudCore(), ansatz)
        np.testing.assert_array_equal(b1.entries, b2.entries)
        assert r1.runs_issued == r2.runs_issued

    def test_truncation_equals_unpadded(self):
        ansatz = AnsatzSpec.random(3, 2, seed=6)
        padded, report = extract_padded(CloudCore(), ansatz, pad_dimension(5, 3))
        direct, _ = extract_b(CloudCore(), ansatz, d=5)
        assert padded.d == 5 and report.runs_issued == 15
        F = unit_rows(np.random.default_rng(0), 10, 5)
        np.testing.assert_allclose(reconstruct_probabilities(padded, F), reconstruct_probabilities(direct, F), atol=1e-12)

    def test_plan_qubit_mismatch(self):
        with pytest.raises(ConfigurationError):
            extract_padded(CloudCore(), AnsatzSpec.zeros(2, 1), pad_dimension(5, 3))


class TestDecoys:
    def test_k0_is_real_set(self):
        s = decoy_parameter_sets([0.1, 0.2], 0, seed=1)
        assert s.parameter_sets == [(0.1, 0.2)] and s.real_index == 0

    def test_reproducible_and_uniform(self):
        a = decoy_parameter_sets(np.zeros(4), 50, seed=9)
        b = decoy_parameter_sets(np.zeros(4), 50, seed=9)
        assert a == b
        angles = np.array([t for k, t in enumerate(a.parameter_sets) if k != a.real_index])
        assert angles.shape == (50, 4)
        assert angles.min() >= 0 and angles.max() < 2 * np.pi
        assert decoy_parameter_sets(np.zeros(4), 50, seed=10) != a

    def test_negative_k(self):
        with pytest.raises(InvalidArgumentError):
            decoy_parameter_sets([0.0], -1)

    def test_k3_audit_log(self):
        core = CloudCore()
        ansatz = AnsatzSpec.random(2, 1, seed=3)
        result = extract_with_decoys(core, ansatz, 3, seed=5, d=4)
        log = core.audit_log()
        sets = {tuple(e.thetas) for e in log}
        assert len(sets) == 4
        assert tuple(ansatz.thetas) in sets
        assert {(e.n, e.reps, e.entanglement, len(e.thetas)) for e in log} == {(2, 1, "full", 4)}
        assert result.schedule.parameter_sets[result.schedule.real_index] == tuple(ansatz.thetas)
        assert result.decoys == []
        direct, _ = extract_b(CloudCore(), ansatz, d=4)
        np.testing.assert_array_equal(result.b.entries, direct.entries)

    def test_keep_decoys(self):
        result = extract_with_decoys(CloudCore(), AnsatzSpec.random(2, 1, seed=3), 2, seed=5, keep_decoys=True)
        assert len(result.decoys) == 2


class TestShotMode:
    def test_close_to_exact(self):
        ansatz = AnsatzSpec.random(2, 2, seed=8)
        exact, _ = extract_b(CloudCore(), ansatz)
        noisy, report = extract_b(
            CloudCore(ServiceConfig(rng_seed=3)), ansatz, options=ExtractionOptions(shots=200_000)
        )
        assert report.shots == 200_000
        assert report.eps_zero == pytest.approx(5e-5)
        np.testing.assert_allclose(noisy.column_norms(), 1.0, atol=3 / np.sqrt(200_000))
        F = unit_rows(np.random.default_rng(2), 10, 4)
        np.testing.assert_allclose(reconstruct_probabilities(noisy, F), reconstruct_probabilities(exact, F), atol=2e-2)

    def test_retries_counted(self):
        # a low zero cutoff lets small amplitudes reach the sign margin
        core = CloudCore(ServiceConfig(rng_seed=0))
        options = ExtractionOptions(shots=1000, zero_c=0.5)
        _, report = extract_b(core, AnsatzSpec.random(3, 2, seed=3), options=options)
        assert report.retries > 0
        assert report.runs_issued == len(core.audit_log()) == 15 + report.retries
        assert sorted({e.shots for e in core.audit_log()}) == [1000, 4000]


class TestSerialization:
    def test_round_trip(self, tmp_path):
        ansatz = AnsatzSpec.random(2, 1, seed=0)
        b, report = extract_b(CloudCore(), ansatz)
        b.save(tmp_path / "b.json", ansatz, report)
        loaded = BMatrix.load(tmp_path / "b.json")
        np.testing.assert_array_equal(loaded.entries, b.entries)
        obj = json.loads((tmp_path / "b.json").read_text())
        assert obj["ansatz"]["thetas"] == list(ansatz.thetas)
        assert obj["report"]["runs_issued"] == 7

    def test_shape_checked(self):
        with pytest.raises(ConfigurationError):
            BMatrix(2, 3, np.zeros((4, 4)))

    def test_report_dict(self):
        r = ExtractionReport(7, [0], [], 1e-12, None)
        assert r.to_dict() == {"runs_issued": 7, "references_used": [0], "zero_rows": [], "eps_zero": 1e-12, "shots": None, "retries": 0}


def test_local_and_matrix_agree():
    ansatz = AnsatzSpec.random(3, 3, "linear", seed=21)
    U = circuit_unitary(3, build_real_amplitudes(ansatz))
    b1, _ = extract_b(LocalEndpoint(), ansatz)
    b2, _ = extract_b(MatrixEndpoint(U), ansatz)
    np.testing.assert_allclose(b1.entries, b2.entries, atol=1e-12)
