"""Tests for Pauli arithmetic and characteristic tables."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from overlapix.core.exceptions import CapacityError, ContractViolation, PreconditionError, ValidationError
from overlapix.models import PauliString, StateModel, WignerEvaluator, iter_paulis
from overlapix.services.dv_states import (
    apply_pauli,
    basis_state,
    char_table,
    fidelity_pauli_exact,
    ghz_generators,
    ghz_state,
    haar_state,
    pauli_expectation,
    pauli_worst_case_budget,
    stabilizer_char,
    stabilizer_group,
    table_function,
    validate_generators,
)
from overlapix.services.estimator import derive_seed
from overlapix.services.states import build_state, is_pure
from tests.utils import dense_char_table, dense_fidelity, density_matrix, pauli_matrix

pytestmark = pytest.mark.service


class TestPauliAction:
    """Test Pauli strings acting on vectors."""

    def test_apply_matches_dense(self):
        psi = haar_state(2, seed=4).amplitudes
        for pauli in iter_paulis(2, include_identity=True):
            np.testing.assert_allclose(apply_pauli(pauli, psi), pauli_matrix(pauli) @ psi, atol=1e-12)

    def test_y_is_i_x_z(self):
        y = pauli_matrix(PauliString.from_label("Y"))
        np.testing.assert_allclose(y, np.array([[0, -1j], [1j, 0]]))

    def test_expectation_matches_dense(self):
        state = haar_state(3, seed=9)
        rho = density_matrix(state)
        for pauli in list(iter_paulis(3))[::7]:
            expected = np.real(np.trace(rho @ pauli_matrix(pauli)))
            assert pauli_expectation(pauli, state) == pytest.approx(expected, abs=1e-12)

    def test_identity_and_mixed(self):
        mixed = StateModel.maximally_mixed(2)
        assert pauli_expectation(PauliString.identity(2), mixed) == 1.0
        assert pauli_expectation(PauliString.from_label("XZ"), mixed) == 0.0

    def test_size_mismatch(self):
        with pytest.raises(ContractViolation):
            pauli_expectation(PauliString.from_label("X"), ghz_state(2))
        with pytest.raises(ContractViolation):
            apply_pauli(PauliString.from_label("XX"), np.ones(2, dtype=complex))


class TestCharTable:
    """Test characteristic tables against dense matrices."""

    @pytest.mark.parametrize(
        "state",
        [
            ghz_state(3),
            haar_state(3, seed=1),
            basis_state("101"),
            StateModel.mixture([(0.6, ghz_state(3)), (0.4, StateModel.maximally_mixed(3))]),
        ],
        ids=["ghz", "haar", "basis", "mixture"],
    )
    def test_matches_dense(self, state):
        np.testing.assert_allclose(char_table(state).values, dense_char_table(state), atol=1e-12)

    def test_ghz3_norms(self, ghz3_table):
        assert ghz3_table.nonzero_count() == 7
        assert ghz3_table.l1 == pytest.approx(7 / 8)
        assert ghz3_table.purity == pytest.approx(1.0)

    def test_mixture_purity(self):
        state = StateModel.mixture([(0.5, ghz_state(2)), (0.5, StateModel.maximally_mixed(2))])
        # Tr rho^2 = 1/4 + 3/4 * 1/4
        assert char_table(state).purity == pytest.approx(0.4375)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            char_table(StateModel.maximally_mixed(9))

    @settings(max_examples=15, deadline=None)
    @given(n=st.integers(min_value=1, max_value=4), seed=st.integers(min_value=0, max_value=2**31 - 1))
    def test_haar_tables_are_pure_and_bounded(self, n, seed):
        table = char_table(haar_state(n, seed))
        assert table.purity == pytest.approx(1.0, abs=1e-9)
        assert table.l1 <= math.sqrt(table.dim) + 1e-12
        assert table.linf <= 1.0

    def test_six_qubit_haar_tables_concentrate(self):
        draws = [char_table(haar_state(6, derive_seed(21, i))) for i in range(50)]
        assert sum(table.linf <= 0.8 for table in draws) >= 49
        for table in draws[:5]:
            assert table.l2 == pytest.approx(math.sqrt(1 - 1 / 64), abs=1e-9)


class TestStabilisers:
    """Test stabiliser groups and their tables."""

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_ghz_table_from_generators(self, n):
        np.testing.assert_allclose(
            stabilizer_char(ghz_generators(n)).values, char_table(ghz_state(n)).values, atol=1e-12
        )

    def test_group_size_and_signs(self):
        group = stabilizer_group(ghz_generators(3))
        assert len(group) == 8
        assert {sign for sign, _ in group} == {1, -1}

    def test_negative_generator(self):
        table = stabilizer_char([(-1, PauliString.from_label("Z"))])
        np.testing.assert_allclose(table.values, char_table(basis_state("1")).values)

    @pytest.mark.parametrize(
        "generators",
        [
            [],
            [(1, PauliString.from_label("X")), (1, PauliString.from_label("Z"))],
            [(1, PauliString.from_label("ZZ")), (1, PauliString.from_label("ZZ"))],
            [(1, PauliString.from_label("ZZ"))],
            [(2, PauliString.from_label("Z"))],
        ],
        ids=["empty", "anticommuting", "dependent", "too-few", "bad-sign"],
    )
    def test_invalid_generators(self, generators):
        with pytest.raises(ValidationError):
            validate_generators(generators)


class TestFidelity:
    """Test exact Pauli-sum fidelities."""

    def test_ghz_against_mixture(self, ghz3):
        sigma = StateModel.mixture([(0.6, ghz3), (0.4, StateModel.maximally_mixed(3))])
        assert fidelity_pauli_exact(ghz3, sigma) == pytest.approx(0.6 + 0.4 / 8)

    def test_matches_dense(self):
        rho, sigma = haar_state(3, seed=2), haar_state(3, seed=3)
        assert fidelity_pauli_exact(rho, sigma) == pytest.approx(dense_fidelity(rho, sigma), abs=1e-12)

    def test_mixed_target_rejected(self, ghz3):
        with pytest.raises(ContractViolation):
            fidelity_pauli_exact(StateModel.maximally_mixed(3), ghz3)

    def test_size_mismatch(self, ghz3):
        with pytest.raises(ContractViolation):
            fidelity_pauli_exact(ghz3, ghz_state(2))


class TestTableFunction:
    """Test the table viewed as a measured function."""

    def test_norms_follow_table(self, ghz3_table):
        mf = table_function(ghz3_table)
        assert mf.l1() == pytest.approx(ghz3_table.l1)
        assert mf.l2_squared() == pytest.approx(ghz3_table.l2**2)
        assert mf.linf() == 1.0

    def test_evaluate_includes_identity(self, ghz3_table):
        mf = table_function(ghz3_table)
        xxx = PauliString.from_label("XXX")
        assert list(mf.evaluate(np.array([0, xxx.index]))) == [1.0, 1.0]

    def test_worst_case_budget(self):
        assert pauli_worst_case_budget(3, 0.1, 0.05) == math.ceil(1600 * math.log(20))

    def test_worst_case_budget_preconditions(self):
        with pytest.raises(PreconditionError):
            pauli_worst_case_budget(3, 0.0, 0.05)


class TestBuildState:
    """Test descriptor to state construction."""

    def test_haar_uses_default_seed(self):
        state = build_state("haar:3", default_seed=5)
        np.testing.assert_array_equal(state.amplitudes, haar_state(3, 5).amplitudes)

    def test_explicit_seed_wins(self):
        state = build_state("haar:3@7", default_seed=5)
        assert state.name == "haar:3@7"

    def test_cv_mixture(self):
        state = build_state("mix:fock0=0.7,fock1=0.3")
        assert isinstance(state, WignerEvaluator)
        assert not is_pure(state)

    def test_dv_mixture(self):
        state = build_state("mix:ghz3=0.6,mixed3=0.4")
        assert isinstance(state, StateModel)
        assert not is_pure(state)
        assert is_pure(build_state("ghz:3"))

    def test_ghz_bounds(self):
        with pytest.raises(PreconditionError):
            ghz_state(13)
