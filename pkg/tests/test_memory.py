"""The d^2-thermalization swap simulation and its closed forms."""

from fractions import Fraction

import numpy as np
import pytest

from thermoproc.combinatorics import delta_d, f_coeff
from thermoproc.memory import (closed_form_p_d, simulate_memory_beta_swap,
                               simulate_memory_beta_swap_exact,
                               slot_population_closed_form,
                               verify_swap_simulation)


def slot_recurrence_value(d, j, k, p0, gamma):
    """Exact ground-slot population from the substitution closed form.

    a_j^(k) = (1/d) gamma^j (1-gamma)^(k-1) s_j^(k) with
    s_j^(k) = (1-gamma)^(-k) [ (1-p0) gamma^(1-j)
                               - (gamma-p0) sum_{k'<k} f_j(k') (1-gamma)^k' ].
    """
    p0, gamma = Fraction(p0), Fraction(gamma)
    partial = sum(f_coeff(j, kp) * (1 - gamma) ** kp for kp in range(k))
    s = (1 - gamma) ** (-k) * ((1 - p0) * gamma ** (1 - j) - (gamma - p0) * partial)
    return Fraction(1, d) * gamma ** j * (1 - gamma) ** (k - 1) * s


class TestProtocolValues:
    def test_single_slot_thermalizes(self):
        for p0 in (0.0, 0.3, 0.75, 1.0):
            p, _ = simulate_memory_beta_swap(1, p0, 0.75)
            assert abs(p - 0.75) <= 1e-15

    def test_two_slot_boost(self):
        p, _ = simulate_memory_beta_swap(2, 0.0, 0.75)
        assert abs(p - 0.890625) <= 1e-12

    def test_intermediate_state_after_first_sweep(self):
        gamma, p0 = 0.75, 0.3
        _, trace = simulate_memory_beta_swap(2, p0, gamma, record_steps=True)
        label, vec = trace.steps[1]  # both inner steps of the first sweep done
        assert label == "T[g1,e2]"
        expected = 0.5 * np.array([
            gamma * (1 - p0 + gamma), p0,
            1 - gamma, (1 - gamma) * (1 - p0 + gamma),
        ])
        np.testing.assert_allclose(vec, expected, atol=1e-15)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            simulate_memory_beta_swap(0, 0.5, 0.75)
        with pytest.raises(ValueError):
            simulate_memory_beta_swap(2, 1.5, 0.75)
        with pytest.raises(ValueError):
            simulate_memory_beta_swap(2, 0.5, 1.0)


class TestClosedForm:
    def test_matches_simulation_on_grid(self):
        worst = 0.0
        for d in range(1, 13):
            for gamma in (0.55, 0.65, 0.75, 0.85, 0.95):
                for p0 in (0.0, 0.25, 0.5, gamma, 0.9):
                    sim, _ = simulate_memory_beta_swap(d, p0, gamma)
                    worst = max(worst, abs(sim - closed_form_p_d(d, p0, gamma)))
        assert worst <= 1e-10

    def test_single_slot_collapses_to_gamma(self):
        for p0 in (0.0, 0.4, 0.9):
            assert abs(closed_form_p_d(1, p0, 0.75) - 0.75) <= 1e-15

    def test_two_slot_value(self):
        assert closed_form_p_d(2, Fraction(0), Fraction(3, 4)) == Fraction(57, 64)
        assert abs(closed_form_p_d(2, 0.0, 0.75) - 0.890625) <= 1e-16

    def test_large_d_approaches_exact_swap(self):
        gamma, p0 = 0.75, 0.2
        target = 1.0 - p0 * (1.0 - gamma) / gamma
        gaps = [abs(closed_form_p_d(d, p0, gamma) - target) for d in (20, 60, 150)]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] <= 1e-13

    def test_monotone_toward_swap_output(self):
        # exact rationals: float ties out the tail at high gamma
        for gamma in (Fraction(11, 20), Fraction(3, 4), Fraction(19, 20)):
            for p0 in (Fraction(0), Fraction(1, 2)):
                vals = [closed_form_p_d(d, p0, gamma) for d in range(1, 31)]
                assert all(b > a for a, b in zip(vals, vals[1:]))


class TestTraceInvariants:
    def test_pair_balance_after_every_step(self):
        gamma = 0.7
        for d in (1, 2, 4):
            _, trace = simulate_memory_beta_swap(d, 0.35, gamma, record_steps=True)
            idx = 0
            for k in range(d):
                for j in range(d):
                    _label, vec = trace.steps[idx]
                    # the just-thermalized pair sits at detailed balance
                    assert abs(vec[d + j] - vec[k] * (1 - gamma) / gamma) <= 1e-12
                    idx += 1

    def test_every_recorded_state_normalized(self):
        _, trace = simulate_memory_beta_swap(3, 0.2, 0.8, record_steps=True)
        assert len(trace.steps) == 10  # 9 thermalizations plus the refresh
        for _label, vec in trace.steps:
            assert abs(vec.sum() - 1.0) <= 1e-12
        assert len(trace.final_a) == 3
        assert len(trace.final_b) == 3

    def test_fast_path_matches_recorded_path(self):
        fast, t_fast = simulate_memory_beta_swap(5, 0.1, 0.8)
        slow, t_slow = simulate_memory_beta_swap(5, 0.1, 0.8, record_steps=True)
        assert fast == slow
        np.testing.assert_array_equal(t_fast.final_a, t_slow.final_a)
        assert t_fast.steps == []


class TestExactSubstitution:
    @pytest.mark.parametrize("d", [1, 2, 3, 6])
    def test_slot_recurrence_closed_form(self, d):
        p0, gamma = Fraction(1, 3), Fraction(4, 5)
        _, history = simulate_memory_beta_swap_exact(d, p0, gamma)
        for (k, j), simulated in history.items():
            assert simulated == slot_recurrence_value(d, j, k, p0, gamma)

    @pytest.mark.parametrize("d", [1, 2, 4, 6])
    def test_final_slot_populations(self, d):
        p0, gamma = Fraction(0), Fraction(3, 4)
        p_exact, history = simulate_memory_beta_swap_exact(d, p0, gamma)
        total = Fraction(0)
        for k in range(1, d + 1):
            value = slot_population_closed_form(d, k, p0, gamma)
            assert history[(k, d)] == value
            total += value
        assert p_exact == total
        assert p_exact == closed_form_p_d(d, p0, gamma)


class TestSwapSimulationReport:
    def test_gibbs_pair_is_fixed(self):
        gamma = 0.75
        rep = verify_swap_simulation(3, gamma, (gamma, 1.0 - gamma))
        assert abs(rep.simulated - gamma) <= 1e-15
        assert rep.passed

    def test_excited_ground_pair(self):
        rep = verify_swap_simulation(3, 0.75, (1.0, 0.0))
        assert rep.deviation <= 1e-10
        assert rep.passed

    def test_embedded_subnormalized_pair(self):
        rep = verify_swap_simulation(4, 0.8, (0.3, 0.25))
        assert rep.deviation <= 1e-12

    def test_swap_deviation_decreases_with_d(self):
        gamma = 0.75
        devs = [verify_swap_simulation(d, gamma, (1.0, 0.0)).swap_deviation
                for d in range(1, 13)]
        assert all(b < a for a, b in zip(devs, devs[1:]))

    def test_deviation_equals_delta_term(self):
        for d in (1, 2, 5, 9):
            rep = verify_swap_simulation(d, 0.8, (0.9, 0.05))
            assert abs(rep.swap_deviation - rep.delta_term) <= 1e-13

    def test_tail_bound_holds_from_ten(self):
        for d in (10, 11, 12, 20):
            for gamma in (0.55, 0.75, 0.95):
                rep = verify_swap_simulation(d, gamma, (0.0, 1.0))
                assert rep.swap_deviation <= rep.tail_bound + 1e-13
                assert float(delta_d(d, gamma)) <= rep.tail_bound / (gamma * 1.0)

    def test_rejects_overfull_pair(self):
        with pytest.raises(ValueError):
            verify_swap_simulation(2, 0.75, (0.8, 0.4))
