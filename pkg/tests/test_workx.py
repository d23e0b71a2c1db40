"""Work extraction: closed-form errors, optimal matrices, and the memory protocol."""

import math

import numpy as np
import pytest

from thermoproc.core import PopulationVector, is_gibbs_stochastic
from thermoproc.workx import (ExtractionSetup, epsilon_d_closed, epsilon_etp,
                              epsilon_mtp, epsilon_tp, optimal_tp_matrix,
                              run_memory_extraction, run_sequence_protocol,
                              run_tp_protocol, step1_residuals_closed_form,
                              step2_depletion_factors)

LN2 = math.log(2.0)
LN4 = math.log(4.0)

REF = ExtractionSetup(LN2, LN4, 1.0)


class TestSetup:
    def test_zero_error_threshold(self):
        setup = ExtractionSetup(LN2, 1.0, 1.0)
        assert abs(setup.W_0 - math.log(3.0)) <= 1e-15
        assert abs(setup.Z - 1.5) <= 1e-15

    def test_derived_weights(self):
        assert abs(REF.gamma_W - 0.8) <= 1e-15
        assert abs(REF.gamma_delta - 2.0 / 3.0) <= 1e-15

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            ExtractionSetup(0.0, 1.0, 1.0)


class TestClosedForms:
    def test_unrestricted_error(self):
        # ln 3 sits one ulp from the computed threshold; the branch is
        # continuous there so the value is zero to float precision
        assert abs(epsilon_tp(ExtractionSetup(LN2, math.log(3.0), 1.0))) <= 1e-15
        assert abs(epsilon_tp(REF) - 0.25) <= 1e-15
        assert abs(epsilon_tp(ExtractionSetup(LN2, 40.0, 1.0)) - 1.0) <= 1e-12

    def test_markovian_error(self):
        assert abs(epsilon_mtp(REF) - 8.0 / 15.0) <= 1e-15
        # tiny work gap: the error saturates at half the excited weight
        small = ExtractionSetup(LN2, 1e-9, 1.0)
        assert abs(epsilon_mtp(small) - 0.5 * (1.0 / 3.0)) <= 1e-9

    def test_swap_sequence_error(self):
        assert epsilon_etp(ExtractionSetup(LN2, 0.5, 1.0)) == 0.0
        assert abs(epsilon_etp(REF) - 0.375) <= 1e-15

    def test_class_ordering_on_grid(self):
        for bw in np.linspace(0.05, 3.0, 100):
            st = ExtractionSetup(LN2, float(bw), 1.0)
            assert epsilon_tp(st) <= epsilon_etp(st) + 1e-15
            assert epsilon_etp(st) <= epsilon_mtp(st) + 1e-15


class TestOptimalMatrices:
    @pytest.mark.parametrize("bw", [0.3, LN2, 0.8, 1.0, math.log(3.0), 1.3, 2.5])
    def test_gibbs_stochastic_and_achieves_error(self, bw):
        setup = ExtractionSetup(LN2, bw, 1.0)
        m = optimal_tp_matrix(setup)
        assert is_gibbs_stochastic(m, setup.composite_gibbs(), tol=1e-12)
        eps, final = run_tp_protocol(setup)
        assert abs(eps - epsilon_tp(setup)) <= 1e-12
        # final state is the thermal-system product
        gamma = setup.gamma
        np.testing.assert_allclose(
            final.probs,
            [gamma * eps, gamma * (1 - eps), (1 - gamma) * eps, (1 - gamma) * (1 - eps)],
            atol=1e-12)

    def test_low_gap_regime_is_embedded_swap(self):
        setup = ExtractionSetup(1.0, 0.4, 1.0)
        m = optimal_tp_matrix(setup)
        q = math.exp(-(1.0 - 0.4))
        expected = np.eye(4)
        expected[1, 1], expected[1, 2] = 1.0 - q, 1.0
        expected[2, 1], expected[2, 2] = q, 0.0
        np.testing.assert_allclose(m.entries, expected, atol=1e-15)

    @pytest.mark.parametrize("bw", [0.8, 1.0, math.log(3.0), 1.3, 2.5])
    def test_detailed_balance_above_system_gap(self, bw):
        setup = ExtractionSetup(LN2, bw, 1.0)
        m = optimal_tp_matrix(setup).entries
        energies = np.array(setup.energies)
        for i in range(4):
            for j in range(4):
                lhs = m[j, i]
                rhs = math.exp(-(energies[j] - energies[i])) * m[i, j]
                assert abs(lhs - rhs) <= 1e-12


class TestSequenceProtocols:
    def test_variants_agree(self):
        for kind in ("MTP", "ETP"):
            e1, _ = run_sequence_protocol(kind, REF, "primary")
            e2, _ = run_sequence_protocol(kind, REF, "tilde")
            assert abs(e1 - e2) <= 1e-12

    def test_thermalization_sequence_matches_closed_form(self):
        for bw in np.linspace(0.05, 3.0, 40):
            st = ExtractionSetup(LN2, float(bw), 1.0)
            eps, _ = run_sequence_protocol("MTP", st)
            assert abs(eps - epsilon_mtp(st)) <= 1e-12

    def test_swap_sequence_matches_closed_form(self):
        for bw in np.linspace(0.05, 3.0, 40):
            st = ExtractionSetup(LN2, float(bw), 1.0)
            eps, _ = run_sequence_protocol("ETP", st)
            assert abs(eps - epsilon_etp(st)) <= 1e-12

    def test_swap_sequence_error_free_below_system_gap(self):
        eps, _ = run_sequence_protocol("ETP", ExtractionSetup(LN2, 0.3, 1.0))
        assert abs(eps) <= 1e-12

    def test_trace_records_normalized_states(self):
        _, trace = run_sequence_protocol("MTP", REF)
        assert len(trace) == 4  # initial plus three operations
        for _label, state in trace:
            assert isinstance(state, PopulationVector)

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            run_sequence_protocol("TP", REF)
        with pytest.raises(ValueError):
            run_sequence_protocol("MTP", REF, "reversed")


class TestMemoryProtocol:
    def test_single_slot_equals_markovian_optimum(self):
        for bw in (0.2, LN2, LN4, 2.0):
            st = ExtractionSetup(LN2, bw, 1.0)
            eps, _ = run_memory_extraction(st, 1)
            assert abs(eps - epsilon_mtp(st)) <= 1e-12

    @pytest.mark.parametrize("beta_E", [LN2, 1.0])
    def test_simulation_matches_closed_form(self, beta_E):
        for bw in np.linspace(0.1, 2.6, 25):
            st = ExtractionSetup(beta_E, float(bw), 1.0)
            for d in range(1, 11):
                eps, _ = run_memory_extraction(st, d)
                assert abs(eps - epsilon_d_closed(st, d)) <= 1e-10

    def test_step1_residuals_increase_and_match_closed_form(self):
        for d in (2, 4, 8):
            _, trace = run_memory_extraction(REF, d)
            res = trace.step1_residuals
            assert np.all(np.diff(res) > 0.0)
            np.testing.assert_allclose(res, step1_residuals_closed_form(REF, d),
                                       atol=1e-14)

    def test_conservation_at_subroutine_boundaries(self):
        _, trace = run_memory_extraction(REF, 6)
        for sums in trace.sector_sums:
            assert abs(sum(sums) - 1.0) <= 1e-12

    def test_slot_errors_sum_to_sector_mass(self):
        eps, trace = run_memory_extraction(REF, 5)
        assert abs(trace.eps_slots.sum() - eps) <= 1e-15
        assert abs(eps - trace.sector_sums[-1][2]) <= 1e-12

    def test_depletion_factors_match_effective_chain(self):
        # independent oracle: run the (d+1)-level drain chain, feeding each
        # pass the previous pass's leftovers with an emptied head slot
        for d in (1, 2, 4, 8):
            gw = REF.gamma_W
            factors = []
            alpha, rest = 1.0, np.zeros(d)
            for _k in range(d):
                for j in range(d):
                    total = alpha + rest[j]
                    alpha = gw * total
                    rest[j] = (1.0 - gw) * total
                factors.append(alpha)
                alpha = 0.0
            np.testing.assert_allclose(factors, step2_depletion_factors(REF, d),
                                       atol=1e-12)

    def test_ascending_order_is_optimal(self):
        rng = np.random.default_rng(53)
        d = 6
        eps_best, _ = run_memory_extraction(REF, d)
        for _ in range(50):
            order = rng.permutation(d)
            eps, _ = run_memory_extraction(REF, d, subroutine_order=order)
            assert eps_best <= eps + 1e-14

    def test_rejects_bad_order(self):
        with pytest.raises(ValueError):
            run_memory_extraction(REF, 3, subroutine_order=[0, 0, 2])


class TestMemoryErrorCurve:
    def test_bracketing_and_monotonicity(self):
        for bw in np.linspace(0.05, 3.0, 30):
            st = ExtractionSetup(LN2, float(bw), 1.0)
            tp, mtp = epsilon_tp(st), epsilon_mtp(st)
            prev = mtp
            for d in range(1, 41):
                eps = epsilon_d_closed(st, d)
                assert tp - 1e-12 <= eps <= prev + 1e-12
                prev = eps

    def test_large_memory_approaches_unrestricted(self):
        w0 = REF.W_0
        for bw in (0.5 * w0, 0.9 * w0, 1.1 * w0, 1.5 * w0, 2.2 * w0):
            st = ExtractionSetup(LN2, float(bw), 1.0)
            assert abs(epsilon_d_closed(st, 400) - epsilon_tp(st)) <= 0.02

    def test_rejects_bad_d(self):
        with pytest.raises(ValueError):
            epsilon_d_closed(REF, 0)
        with pytest.raises(ValueError):
            run_memory_extraction(REF, 0)
