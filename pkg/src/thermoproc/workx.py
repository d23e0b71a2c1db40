"""Single-shot work extraction from an excited qubit.

The composite of the system qubit (gap E, starting excited) and the work
bit (gap W, starting in its ground state) lives on the basis
(g0, g1, e0, e1) with energies (0, W, E, E+W); all population starts on e0.
The extraction error epsilon is the work-bit ground weight left at the end,
i.e. the total population on g0 and e0, with the final system marginal
required to be thermal.

Closed-form minima implemented here:

  - unrestricted thermal processes: zero error up to the threshold gap
    W_0 = E + ln(1 + e^{-beta E}) / beta, then 1 - e^{beta(E-W)} - e^{-beta W};
  - sequences of two-level full thermalizations (the Markovian optimum):
    gamma_delta * gamma_W at every W, the product of the e0 retention
    weights against g1 (gap |W-E|) and against e1 (gap W);
  - sequences of two-level extremal swaps: zero for W <= E, otherwise
    (1 - e^{-beta(W-E)})(1 - e^{-beta W});
  - memory-assisted with a d-level memory: I_d(1-gamma_delta, 1-gamma_W),
    which equals the Markovian optimum at d = 1 and converges to the
    unrestricted optimum as d grows.

The two-step memory protocol: step one runs the memory-simulated swap
between the e0 and g1 slot blocks (outer loop over e0 slots); step two
drains each e0 slot against all e1 slots, processing slots in ascending
order of their step-one residuals, which is the error-minimizing order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import memory_sweep, memory_sweep_ordered
from .combinatorics import I_d_eval, f_coeff
from .core import (PopulationVector, TransitionMatrix, beta_swap, compose,
                   full_thermalization)

SUM_TOL = 1.0e-12

BASIS_SW = ("g0", "g1", "e0", "e1")


@dataclass(frozen=True)
class ExtractionSetup:
    """System gap, work-bit gap and inverse temperature.

    Everything else (pair weights, threshold gap, composite Gibbs state) is
    derived on access so nothing can go stale.
    """

    E: float
    W: float
    beta: float

    def __post_init__(self):
        if not (self.E > 0.0 and self.W > 0.0 and self.beta > 0.0):
            raise ValueError("E, W and beta must be positive")

    @property
    def q_E(self) -> float:
        return math.exp(-self.beta * self.E)

    @property
    def gamma(self) -> float:
        """System ground weight in equilibrium."""
        return 1.0 / (1.0 + self.q_E)

    @property
    def gamma_W(self) -> float:
        """Work-bit ground weight, also the e0 retention against e1."""
        return 1.0 / (1.0 + math.exp(-self.beta * self.W))

    @property
    def gamma_delta(self) -> float:
        """Retention weight of e0 against g1: 1 / (1 + e^{-beta (W-E)})."""
        return 1.0 / (1.0 + math.exp(-self.beta * (self.W - self.E)))

    @property
    def Z(self) -> float:
        return 1.0 + self.q_E

    @property
    def W_0(self) -> float:
        """Largest gap extractable with vanishing error: E + ln(Z)/beta."""
        return self.E + math.log(self.Z) / self.beta

    @property
    def energies(self) -> tuple:
        return (0.0, self.W, self.E, self.E + self.W)

    def composite_gibbs(self) -> PopulationVector:
        w = np.exp(-self.beta * np.array(self.energies))
        return PopulationVector(w / w.sum())

    def initial_state(self) -> PopulationVector:
        return PopulationVector([0.0, 0.0, 1.0, 0.0])


def epsilon_tp(setup: ExtractionSetup) -> float:
    """Minimum error over all thermal processes."""
    if setup.W <= setup.W_0:
        return 0.0
    return 1.0 - math.exp(setup.beta * (setup.E - setup.W)) \
        - math.exp(-setup.beta * setup.W)


def epsilon_mtp(setup: ExtractionSetup) -> float:
    """Minimum error over Markovian thermal processes: gamma_delta * gamma_W."""
    return setup.gamma_delta * setup.gamma_W


def epsilon_etp(setup: ExtractionSetup) -> float:
    """Minimum error over two-level swap sequences."""
    if setup.W <= setup.E:
        return 0.0
    return (1.0 - math.exp(-setup.beta * (setup.W - setup.E))) \
        * (1.0 - math.exp(-setup.beta * setup.W))


def optimal_tp_matrix(setup: ExtractionSetup) -> TransitionMatrix:
    """Optimal joint transition matrix, by gap regime.

    Followed by a local full thermalization of the system it realizes the
    unrestricted minimum error.  The E < W branches satisfy detailed balance
    entrywise; all three fix the composite Gibbs state.
    """
    beta, E, W = setup.beta, setup.E, setup.W
    if W <= E:
        # swap on the (g1, e0) pair, g1 the lower level
        return beta_swap(4, 1, 2, math.exp(-beta * (E - W)))
    if W <= setup.W_0:
        return TransitionMatrix([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, math.exp(-beta * (W - E)), 0.0],
            [0.0, 1.0, 0.0, math.exp(beta * W) - math.exp(beta * E)],
            [0.0, 0.0, 1.0 - math.exp(-beta * (W - E)),
             1.0 - math.exp(beta * W) + math.exp(beta * E)],
        ])
    return TransitionMatrix([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, math.exp(-beta * (W - E)), 0.0],
        [0.0, 1.0, 1.0 - math.exp(-beta * W) * (1.0 + math.exp(beta * E)), 1.0],
        [0.0, 0.0, math.exp(-beta * W), 0.0],
    ])


def _system_thermalization(setup: ExtractionSetup) -> TransitionMatrix:
    """Full thermalization of the system qubit, leaving the work bit alone."""
    return compose([
        full_thermalization(4, 0, 2, setup.gamma),
        full_thermalization(4, 1, 3, setup.gamma),
    ])


def run_tp_protocol(setup: ExtractionSetup):
    """Apply the optimal joint matrix and the system thermalization.

    Returns (epsilon, final PopulationVector); the error matches
    ``epsilon_tp`` and the final state is the required thermal product.
    """
    g = compose([_system_thermalization(setup), optimal_tp_matrix(setup)])
    final = PopulationVector(g.entries @ setup.initial_state().probs)
    return float(final[0] + final[2]), final


def _pair_e0_g1(setup: ExtractionSetup, extremal: bool) -> TransitionMatrix:
    if not extremal:
        return full_thermalization(4, 2, 1, setup.gamma_delta)
    if setup.W >= setup.E:
        return beta_swap(4, 2, 1, math.exp(-setup.beta * (setup.W - setup.E)))
    return beta_swap(4, 1, 2, math.exp(-setup.beta * (setup.E - setup.W)))


def _pair_e0_e1(setup: ExtractionSetup, extremal: bool) -> TransitionMatrix:
    if not extremal:
        return full_thermalization(4, 2, 3, setup.gamma_W)
    return beta_swap(4, 2, 3, math.exp(-setup.beta * setup.W))


def run_sequence_protocol(kind: str, setup: ExtractionSetup,
                          variant: str = "primary"):
    """Compose the optimal two-level sequence of the given class.

    kind "MTP" uses full thermalizations, "ETP" extremal swaps, on the
    (e0, g1) and (e0, e1) pairs; the two variants apply the pair operations
    in opposite orders and give the same error.  A local system
    thermalization closes the sequence.  Returns (epsilon, step trace).
    """
    if kind not in ("MTP", "ETP"):
        raise ValueError("kind must be 'MTP' or 'ETP'")
    if variant not in ("primary", "tilde"):
        raise ValueError("variant must be 'primary' or 'tilde'")
    extremal = kind == "ETP"
    ops = [
        ("e0<->g1", _pair_e0_g1(setup, extremal)),
        ("e0<->e1", _pair_e0_e1(setup, extremal)),
    ]
    if variant == "tilde":
        ops.reverse()
    ops.append(("thermalize_S", _system_thermalization(setup)))
    state = setup.initial_state()
    trace = [("initial", state)]
    for label, op in ops:
        state = PopulationVector(op.entries @ state.probs)
        trace.append((label, state))
    return float(state[0] + state[2]), trace


@dataclass
class ExtractionTrace:
    """Record of one memory-assisted extraction run.

    ``step1_residuals[j]`` is the population left on e0 slot j after the
    swap-simulation step (monotone increasing in j); ``eps_slots[k]`` is the
    finalized e0 slot population after its drain subroutine; sector sums are
    snapshots (g0, g1, e0, e1 block totals) at every subroutine boundary.
    """

    d: int
    step1_residuals: np.ndarray
    eps_slots: np.ndarray
    sector_sums: list
    subroutine_order: tuple

    def __post_init__(self):
        if abs(self.eps_slots.sum() - self.sector_sums[-1][2]) > SUM_TOL:
            raise ValueError("slot residuals do not add up to the e0 sector mass")


def run_memory_extraction(setup: ExtractionSetup, d: int,
                          subroutine_order=None):
    """Simulate the two-step memory-assisted protocol on the 4d-level composite.

    Returns (epsilon, ExtractionTrace).  ``subroutine_order`` overrides the
    ascending slot order of the drain step (used to probe the optimality of
    the default order); it must be a permutation of range(d).
    """
    if d < 1:
        raise ValueError("memory dimension d must be >= 1")
    if subroutine_order is None:
        order = np.arange(d, dtype=np.int64)
    else:
        order = np.asarray(subroutine_order, dtype=np.int64)
        if sorted(order.tolist()) != list(range(d)):
            raise ValueError("subroutine_order must be a permutation of range(d)")
    vec = np.zeros(4 * d)
    vec[2 * d:3 * d] = 1.0 / d

    # step one: simulated swap between the e0 block (outer) and the g1 block
    memory_sweep(vec, d, setup.gamma_delta, 2 * d, d)
    step1 = vec[2 * d:3 * d].copy()

    def sectors(v):
        return tuple(float(v[s * d:(s + 1) * d].sum()) for s in range(4))

    sums = [sectors(vec)]
    # step two: drain each e0 slot against every e1 slot
    for k in order:
        memory_sweep_ordered(vec, d, setup.gamma_W, 2 * d, 3 * d,
                             np.array([k], dtype=np.int64))
        sums.append(sectors(vec))
    eps_slots = vec[2 * d:3 * d].copy()
    trace = ExtractionTrace(d=d, step1_residuals=step1, eps_slots=eps_slots,
                            sector_sums=sums, subroutine_order=tuple(order.tolist()))
    return float(eps_slots.sum()), trace


def epsilon_d_closed(setup: ExtractionSetup, d: int) -> float:
    """Closed-form memory-assisted error I_d(1 - gamma_delta, 1 - gamma_W)."""
    if d < 1:
        raise ValueError("memory dimension d must be >= 1")
    return float(I_d_eval(d, 1.0 - setup.gamma_delta, 1.0 - setup.gamma_W))


def step1_residuals_closed_form(setup: ExtractionSetup, d: int) -> np.ndarray:
    """Closed-form e0 slot populations after the swap-simulation step.

    x_j = (gamma_delta^d / d) sum_{k<j} f_d(k) (1 - gamma_delta)^k, 1-based j.
    """
    gd = setup.gamma_delta
    terms = np.array([f_coeff(d, k) * (1.0 - gd) ** k for k in range(d)])
    return gd ** d / d * np.cumsum(terms)


def step2_depletion_factors(setup: ExtractionSetup, d: int) -> np.ndarray:
    """Closed-form drain weights d_k = gamma_W^d (1-gamma_W)^{k-1} f_d(k-1).

    d_k is the fraction of a unit e0 slot population that survives the k-th
    pass of the drain chain; epsilon_k = sum_j d_j x_{k+1-j}.
    """
    gw = setup.gamma_W
    return np.array([gw ** d * (1.0 - gw) ** k * f_coeff(d, k) for k in range(d)])
