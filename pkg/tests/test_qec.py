import numpy as np
import pytest

from conftest import random_state
from qmeas.circuit import run_distribution
from qmeas.errors import BadSelector, DimensionMismatch
from qmeas.linalg import kron_all, H
from qmeas.measure import born_probabilities, expectation, post_state
from qmeas.qec import (
    RepetitionCode,
    apply_error,
    bit_flip_code,
    build_decode_circuit,
    decode_circuit,
    decode_projective,
    encode,
    error_detect_observable,
    hamming_bound,
    logical_error_rate,
    phase_flip_code,
)
from qmeas.rng import seeded_rng
from qmeas.states import PureState, basis_state, fidelity, ghz_state, plus_state, to_density

ERRORS = (None, 0, 1, 2)
EXPECTED_SYNDROME = {None: (0, 0), 0: (1, 0), 1: (1, 1), 2: (0, 1)}


class TestEncode:
    def test_zero_maps_to_repetition(self):
        out = encode(basis_state("0"), bit_flip_code())
        assert fidelity(out, basis_state("000")) == pytest.approx(1.0)

    def test_plus_maps_to_ghz(self):
        out = encode(plus_state(), bit_flip_code())
        assert fidelity(out, ghz_state(3)) == pytest.approx(1.0)

    def test_phase_flip_encodes_in_diagonal_basis(self):
        out = encode(plus_state(), phase_flip_code())
        plus3 = kron_all([np.array([[1], [1]]) / np.sqrt(2)] * 3).reshape(-1)
        assert abs(np.vdot(out.amplitudes, plus3)) ** 2 == pytest.approx(1.0)

    def test_rejects_multi_qubit_input(self, rng):
        with pytest.raises(DimensionMismatch):
            encode(random_state(2, rng), bit_flip_code())


class TestApplyError:
    def test_flip_first_qubit(self):
        out = apply_error(basis_state("000"), 0, bit_flip_code())
        assert fidelity(out, basis_state("100")) == pytest.approx(1.0)

    def test_flip_codeword(self, rng):
        psi = random_state(1, rng)
        enc = encode(psi, bit_flip_code())
        out = apply_error(enc, 0, bit_flip_code())
        expected = (psi.amplitudes[0] * basis_state("100").amplitudes
                    + psi.amplitudes[1] * basis_state("011").amplitudes)
        assert abs(np.vdot(out.amplitudes, expected)) ** 2 == pytest.approx(1.0)

    def test_none_is_identity(self, rng):
        psi = encode(random_state(1, rng), bit_flip_code())
        assert apply_error(psi, None, bit_flip_code()) is psi

    def test_rejects_bad_selector(self):
        with pytest.raises(BadSelector):
            apply_error(basis_state("000"), 5, bit_flip_code())


class TestProjectiveDecoder:
    def test_first_qubit_flip(self, rng):
        psi = random_state(1, rng)
        enc = encode(psi, bit_flip_code())
        syndrome, corrected = decode_projective(
            apply_error(enc, 0, bit_flip_code()), bit_flip_code())
        assert syndrome == (1, 0)
        assert fidelity(corrected, enc) >= 1 - 1e-10

    def test_clean_codeword(self, rng):
        enc = encode(random_state(1, rng), bit_flip_code())
        syndrome, corrected = decode_projective(enc, bit_flip_code())
        assert syndrome == (0, 0)
        assert fidelity(corrected, enc) >= 1 - 1e-10

    def test_third_qubit_flip_on_plus(self):
        enc = encode(plus_state(), bit_flip_code())
        syndrome, corrected = decode_projective(
            apply_error(enc, 2, bit_flip_code()), bit_flip_code())
        assert syndrome == (0, 1)
        assert fidelity(corrected, enc) >= 1 - 1e-10


class TestCircuitDecoder:
    def test_middle_flip_syndrome(self, rng):
        enc = encode(random_state(1, rng), bit_flip_code())
        syndrome, corrected = decode_circuit(
            apply_error(enc, 1, bit_flip_code()), bit_flip_code(), seeded_rng(0))
        assert syndrome == (1, 1)
        assert fidelity(corrected, enc) >= 1 - 1e-9

    def test_no_error_syndrome(self, rng):
        enc = encode(random_state(1, rng), bit_flip_code())
        syndrome, _ = decode_circuit(enc, bit_flip_code(), seeded_rng(0))
        assert syndrome == (0, 0)

    def test_agrees_with_projective_decoder(self, rng):
        for code in (bit_flip_code(), phase_flip_code()):
            for trial in range(50):
                enc = encode(random_state(1, rng), code)
                error = ERRORS[trial % 4]
                corrupted = apply_error(enc, error, code)
                s1, c1 = decode_projective(corrupted, code)
                s2, c2 = decode_circuit(corrupted, code, seeded_rng(trial))
                assert s1 == s2 == EXPECTED_SYNDROME[error]
                assert fidelity(c1, c2) >= 1 - 1e-9

    def test_single_flip_inputs_have_one_branch(self, rng):
        code = bit_flip_code()
        enc = encode(random_state(1, rng), code)
        corrupted = apply_error(enc, 1, code)
        padded = np.zeros(32, dtype=complex)
        padded[0::4] = corrupted.amplitudes
        branches = run_distribution(build_decode_circuit(code), PureState(n=5, amplitudes=padded))
        assert len(branches) == 1
        assert branches[0].bits == {"y0": 1, "y1": 1}


class TestRoundtrip:
    @pytest.mark.parametrize("kind", ["bit-flip", "phase-flip"])
    def test_all_single_errors_recover(self, kind, rng):
        code = RepetitionCode(kind=kind)
        for trial in range(50):
            enc = encode(random_state(1, rng), code)
            error = ERRORS[trial % 4]
            corrupted = apply_error(enc, error, code)
            _, corrected = decode_projective(corrupted, code)
            assert fidelity(corrected, enc) >= 1 - 1e-10

    def test_two_flips_decode_to_wrong_codeword(self):
        # beyond the single-error guarantee the decoder miscorrects
        code = bit_flip_code()
        enc = encode(basis_state("0"), code)
        corrupted = apply_error(apply_error(enc, 0, code), 1, code)
        _, corrected = decode_projective(corrupted, code)
        assert fidelity(corrected, encode(basis_state("1"), code)) == pytest.approx(1.0)


class TestGentleness:
    def test_syndrome_subspace_states_untouched(self, rng):
        code = bit_flip_code()
        m = code.syndrome_measurement
        coeffs = rng.normal(size=2) + 1j * rng.normal(size=2)
        vec = (coeffs[0] * basis_state("100").amplitudes
               + coeffs[1] * basis_state("011").amplitudes)
        psi = PureState(n=3, amplitudes=vec / np.linalg.norm(vec))
        rho = to_density(psi)
        probs = born_probabilities(m, rho)
        label = 2  # syndrome bits (1, 0)
        assert probs[list(m.labels).index(label)] == pytest.approx(1.0, abs=1e-12)
        after = post_state(m, label, rho)
        assert np.max(np.abs(after.rho - rho.rho)) <= 1e-10


class TestDuality:
    def test_phase_code_is_conjugated_bit_code(self, rng):
        bit, phase = bit_flip_code(), phase_flip_code()
        frame = kron_all([H, H, H])
        for trial in range(10):
            psi = random_state(3, rng)
            s_phase, c_phase = decode_projective(psi, phase)
            rotated = PureState(n=3, amplitudes=frame @ psi.amplitudes)
            s_bit, c_bit = decode_projective(rotated, bit)
            assert s_phase == s_bit
            back = PureState(n=3, amplitudes=frame @ c_bit.amplitudes)
            assert fidelity(c_phase, back) >= 1 - 1e-10


class TestHammingBound:
    def test_three_qubit_code_meets_bound_with_equality(self):
        assert hamming_bound(1, 3) == 3
        assert 2 ** 3 == 2 ** 1 * (3 + 1)

    def test_no_errors(self):
        assert hamming_bound(1, 0) == 1

    def test_two_logical_qubits(self):
        assert hamming_bound(2, 3) == 4

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            hamming_bound(0, 1)


class TestErrorDetection:
    def test_codeword_scores_plus_one(self):
        code = bit_flip_code()
        obs = error_detect_observable(code)
        enc = encode(plus_state(), code)
        assert expectation(obs, to_density(enc)) == pytest.approx(1.0)

    def test_flipped_codeword_scores_minus_one(self):
        code = bit_flip_code()
        obs = error_detect_observable(code)
        enc = apply_error(encode(plus_state(), code), 0, code)
        assert expectation(obs, to_density(enc)) == pytest.approx(-1.0)

    def test_balanced_superposition_scores_zero(self):
        code = bit_flip_code()
        obs = error_detect_observable(code)
        enc = encode(plus_state(), code)
        flipped = apply_error(enc, 0, code)
        mix = PureState(n=3, amplitudes=(enc.amplitudes + flipped.amplitudes) / np.sqrt(2))
        assert expectation(obs, to_density(mix)) == pytest.approx(0.0, abs=1e-10)


class TestMonteCarlo:
    def test_zero_noise_never_fails(self):
        result = logical_error_rate(bit_flip_code(), 0.0, 200, seed=1)
        assert result["logical_error_rate"] == 0.0

    def test_matches_majority_vote_analysis(self):
        result = logical_error_rate(bit_flip_code(), 0.1, 10_000, seed=2)
        assert abs(result["logical_error_rate"] - 0.028) <= 0.006

    def test_at_most_one_noise_never_fails(self):
        result = logical_error_rate(bit_flip_code(), 0.2, 500, seed=3, noise="at-most-one")
        assert result["logical_error_rate"] == 0.0

    def test_rejects_bad_probability(self):
        with pytest.raises(ValueError):
            logical_error_rate(bit_flip_code(), 1.5, 10, seed=0)
