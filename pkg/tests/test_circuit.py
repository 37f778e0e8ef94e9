import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from nmrwitness import (
    BlochSpec,
    ClassicalSpec,
    DensityMatrix,
    Gate,
    classical_state,
    cnot,
    from_bloch,
    local_magnetizations,
    pair_rotation,
    protocol_state,
    readout_sigma_x_a,
    rotation,
    run_protocol,
    sample_direction,
    witness,
)
from nmrwitness.errors import BadIndex
from nmrwitness.nmr import SpinSystemParams, thermal_equilibrium_state
from nmrwitness.pauli import IDENTITY_2, IDENTITY_4, SIGMA_X, SIGMA_Y, SIGMA_Z, pauli_pair

from conftest import ket_projector, random_density_matrix, triplet


class TestRotation:
    def test_zero_angle_is_identity(self):
        assert np.allclose(rotation("y", 0.0), IDENTITY_2)

    def test_matches_matrix_exponential(self):
        # independent oracle: scipy expm
        for axis, sigma in (("x", SIGMA_X), ("y", SIGMA_Y), ("z", SIGMA_Z)):
            for angle in (0.3, np.pi / 2, -1.7, 2 * np.pi):
                assert np.allclose(rotation(axis, angle), expm(-1j * angle * sigma / 2), atol=1e-12)

    def test_y_half_turn_conjugates_z_to_x(self):
        r = rotation("y", np.pi / 2)
        assert np.allclose(r @ SIGMA_Z @ r.conj().T, SIGMA_X, atol=1e-12)

    def test_z_half_turn_conjugates_x_to_y(self):
        r = rotation("z", np.pi / 2)
        assert np.allclose(r @ SIGMA_X @ r.conj().T, SIGMA_Y, atol=1e-12)

    def test_bad_axis(self):
        with pytest.raises(ValueError):
            rotation("w", 0.1)


class TestGates:
    def test_gate_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            Gate(np.diag([1.0, 0.5, 1.0, 1.0]))

    @given(st.sampled_from(["x", "y", "z"]), st.floats(-10, 10))
    def test_pair_rotation_unitary(self, axis, angle):
        g = pair_rotation(axis, angle)
        assert np.max(np.abs(g.unitary @ g.unitary.conj().T - IDENTITY_4)) <= 1e-12

    def test_cnot_flips_target_on_excited_control(self):
        ket10 = np.array([0, 0, 1, 0], dtype=complex)
        assert np.allclose(cnot().unitary @ ket10, [0, 0, 0, 1])

    def test_cnot_conjugation_identity(self):
        # matrix product oracle for the readout identity
        u = cnot().unitary
        lhs = u @ np.kron(SIGMA_X, IDENTITY_2) @ u
        assert np.allclose(lhs, np.kron(SIGMA_X, SIGMA_X), atol=1e-12)

    def test_cnot_involution(self):
        assert np.allclose(cnot().unitary @ cnot().unitary, IDENTITY_4)


class TestProtocol:
    def test_identity_on_maximally_mixed(self):
        rho = DensityMatrix(IDENTITY_4 / 4)
        assert np.allclose(protocol_state(rho, 1).matrix, IDENTITY_4 / 4)

    def test_triplet_step_one_reads_xx(self):
        xi = protocol_state(triplet(), 1)
        assert abs(readout_sigma_x_a(xi) - 1.0) < 1e-12

    def test_zz_state_step_three(self):
        rho = from_bloch(BlochSpec(c=np.array([0.0, 0.0, -1.0])))
        xi = protocol_state(rho, 3)
        assert abs(readout_sigma_x_a(xi) - (-1.0)) < 1e-12

    def test_bad_index(self):
        with pytest.raises(BadIndex):
            protocol_state(triplet(), 4)

    def test_trace_preserved(self, rng):
        rho = random_density_matrix(rng)
        for i in (1, 2, 3):
            assert abs(np.trace(protocol_state(rho, i).matrix).real - 1) < 1e-12

    def test_circuit_equals_direct_correlations(self):
        # the load-bearing identity: step i reads tr(rho s_i s_i)
        rng = np.random.default_rng(42)
        worst = 0.0
        for _ in range(200):
            rho = random_density_matrix(rng)
            for i in (1, 2, 3):
                via_circuit = readout_sigma_x_a(protocol_state(rho, i))
                direct = rho.expectation(pauli_pair(i))
                worst = max(worst, abs(via_circuit - direct))
        assert worst <= 1e-10


class TestReadout:
    def test_maximally_mixed_reads_zero(self):
        assert abs(readout_sigma_x_a(DensityMatrix(IDENTITY_4 / 4))) < 1e-12

    def test_plus_state_reads_one(self):
        plus = ket_projector(1 / np.sqrt(2), 1 / np.sqrt(2))
        rho = DensityMatrix(np.kron(plus, IDENTITY_2 / 2))
        assert abs(readout_sigma_x_a(rho) - 1.0) < 1e-12


class TestLocalMagnetizations:
    def test_bell_diagonal_zero(self):
        a, b = local_magnetizations(triplet())
        assert np.allclose(a, 0, atol=1e-12) and np.allclose(b, 0, atol=1e-12)

    def test_ket_00(self):
        a, b = local_magnetizations(DensityMatrix(ket_projector(1, 0, 0, 0)))
        assert np.allclose(a, [0, 0, 1], atol=1e-12)
        assert np.allclose(b, [0, 0, 1], atol=1e-12)

    def test_thermal_ratio(self):
        params = SpinSystemParams()
        a, b = local_magnetizations(thermal_equilibrium_state(params))
        assert abs(a[2] / b[2] - params.gamma_ratio) < 1e-9
        assert np.allclose(a[:2], 0, atol=1e-15) and np.allclose(b[:2], 0, atol=1e-15)


class TestSampleDirection:
    @given(st.integers(0, 2**31))
    def test_unit_norm(self, seed):
        d = sample_direction(seed)
        assert abs(d.z @ d.z - 1) <= 1e-12 and abs(d.w @ d.w - 1) <= 1e-12

    def test_deterministic(self):
        d1, d2 = sample_direction(99), sample_direction(99)
        assert np.array_equal(d1.z, d2.z) and np.array_equal(d1.w, d2.w)

    def test_no_collisions_across_seeds(self):
        seen = {tuple(np.round(sample_direction(s).z, 12)) for s in range(1000)}
        assert len(seen) == 1000


class TestWitness:
    def test_triplet_value_three(self):
        for seed in (0, 1, 2):
            rep = witness(triplet(), sample_direction(seed))
            assert abs(rep.w - 3.0) < 1e-9

    def test_classical_bell_diagonal_zero(self):
        rho = from_bloch(BlochSpec(c=np.array([0.0, 0.0, -0.9])))
        rep = witness(rho, sample_direction(5))
        assert rep.w < 1e-12

    def test_one_sided_for_product_ket(self):
        # |00><00| with z = w = z-hat: |<O3><O4>| = 1 * 2
        rho = DensityMatrix(ket_projector(1, 0, 0, 0))
        d = type(sample_direction(0))(z=np.array([0.0, 0.0, 1.0]), w=np.array([0.0, 0.0, 1.0]))
        rep = witness(rho, d)
        assert abs(rep.w - 2.0) < 1e-12

    def test_modes_agree(self, rng):
        for _ in range(50):
            rho = random_density_matrix(rng)
            d = sample_direction(3)
            wc = witness(rho, d, mode="circuit")
            wd = witness(rho, d, mode="direct")
            assert abs(wc.w - wd.w) <= 1e-10
            assert np.max(np.abs(wc.o - wd.o)) <= 1e-10

    def test_bell_diagonal_direction_independent(self):
        rho = from_bloch(BlochSpec(c=np.array([0.5, -0.4, 0.3])))
        values = [witness(rho, sample_direction(s)).w for s in range(100)]
        assert max(values) - min(values) <= 1e-12

    def test_balanced_classical_shared_pauli_basis_zero(self):
        # uniform-marginal mixtures in a shared Pauli eigenbasis are
        # Bell-diagonal with a single correlation coefficient, so W = 0
        bases = {"z": (0.0, 0.0), "x": (np.pi / 2, 0.0), "y": (np.pi / 2, np.pi / 2)}
        for axis, angles in bases.items():
            for alpha in (0.0, 0.17, 0.33, 0.5):
                spec = ClassicalSpec(
                    probabilities=[alpha, 0.5 - alpha, 0.5 - alpha, alpha],
                    basis_a=angles, basis_b=angles,
                )
                for seed in (0, 11):
                    rep = witness(classical_state(spec), sample_direction(seed))
                    assert rep.w <= 1e-12, (axis, alpha)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**31), st.integers(0, 2**31))
    def test_nonnegative(self, state_seed, dir_seed):
        rho = random_density_matrix(np.random.default_rng(state_seed))
        assert witness(rho, sample_direction(dir_seed)).w >= 0

    def test_thermal_normalization(self):
        rho = from_bloch(BlochSpec(c=np.array([2e-5, 2e-5, -2e-5])))
        rep = witness(rho, sample_direction(1), normalization="thermal", epsilon=1e-5)
        assert abs(rep.w - 3.0) < 1e-9
        assert np.allclose(rep.o[:3], [1, 1, -1], atol=1e-9)

    def test_report_json_fields(self):
        rep = witness(triplet(), sample_direction(4), seed=4)
        doc = rep.to_json()
        assert set(doc) == {"o", "W", "mode", "seed", "normalization"}
        assert doc["seed"] == 4 and doc["normalization"] == "raw"

    def test_protocol_readout_bundle(self):
        out = run_protocol(triplet(), sample_direction(2))
        assert len(out.states) == 3
        assert np.allclose(out.o[:3], [1, 1, -1], atol=1e-12)
