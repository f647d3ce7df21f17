"""
Training engines: amplitude-suppressed maximum finding and exhaustive search

The quantum engine follows the Durr-Hoyer scheme with the marking oracle
replaced by polynomial amplitude suppression: sample a reference from the
prepared state, suppress every amplitude not above it, resample, keep the
sample if it beats the reference, repeat. The amplitude vector is simulated
once per run; the ledger still charges the modeled oracle cost of every
round and one O(nk) classical amplitude evaluation per sampled configuration.

A run converges when the transformed weight drops below what a single
amplitude past the suppression ramp would carry: nothing beyond the ramp is
left above the reference, only suppression leakage.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.backend.circuit import CircuitSpec, DataPoint, ObjectiveValue, ParamConfig, objective
from src.backend.ntca import (
    SuppressionPolynomial,
    TransformResult,
    apply_transform,
    build_suppressor,
    query_cost,
    stretch,
    stretch_order,
)
from src.backend.oracle import amplitude_vector, config_amplitude
from src.utils.config import OPTIMIZER_CONFIG, SUPPRESSION_CONFIG
from src.utils.errors import ContractViolation, Converged

logger = logging.getLogger(__name__)


@dataclass
class QueryLedger:
    """
    Cost counters; every counter only grows

    oracle_calls_modeled sums the per-round query cost. classical_amp_evals
    counts O(nk) amplitude recomputations: one for the initial reference and
    one for every sampled configuration, accepted or not, since a sample must
    be evaluated before it can be compared with the reference.
    """

    oracle_calls_modeled: float = 0.0
    classical_amp_evals: int = 0
    iterations: int = 0
    brute_force_evals: int = 0

    def charge_oracle(self, cost: float):
        if cost < 0:
            raise ContractViolation(f"negative oracle cost {cost}")
        self.oracle_calls_modeled += cost

    def charge_classical(self, evaluations: int = 1):
        self.classical_amp_evals += evaluations

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class QuantumConfig:
    """Settings of one maximization run"""

    degree: int = OPTIMIZER_CONFIG["degree"]
    softness: Optional[float] = OPTIMIZER_CONFIG["softness"]
    softness_floor: float = OPTIMIZER_CONFIG["softness_floor"]
    softness_fraction: float = OPTIMIZER_CONFIG["softness_fraction"]
    budget_factor: float = OPTIMIZER_CONFIG["budget_factor"]
    seed: Optional[int] = OPTIMIZER_CONFIG["seed"]
    success_floor: float = SUPPRESSION_CONFIG["success_floor"]
    normalized_amplitudes: bool = OPTIMIZER_CONFIG["normalized_amplitudes"]
    max_residual: float = SUPPRESSION_CONFIG["max_residual"]
    convergence_fraction: float = SUPPRESSION_CONFIG["convergence_fraction"]

    def softness_for(self, theta: float) -> float:
        if self.softness is not None:
            return self.softness
        return max(self.softness_floor, self.softness_fraction * theta)

    def budget(self, n_params: int) -> int:
        return math.ceil(self.budget_factor * n_params)


@dataclass(frozen=True)
class TraceRecord:
    """One maximization round"""

    iteration: int
    reference_index: int
    reference_magnitude: float
    success_weight: float
    sampled_index: Optional[int]
    sampled_magnitude: Optional[float]
    accepted: bool
    converged: bool
    degree: int
    gamma: float
    oracle_cost: float
    candidates_above: int


@dataclass
class TrainResult:
    """Outcome of a training engine"""

    engine: str
    best_params: ParamConfig
    best_objective: ObjectiveValue
    ledger: QueryLedger
    trace: List[TraceRecord] = field(default_factory=list)
    converged: bool = False
    degenerate: bool = False

    @property
    def accepted_magnitudes(self) -> List[float]:
        """Reference magnitudes in the order they were adopted"""
        if not self.trace:
            return []
        magnitudes = [self.trace[0].reference_magnitude]
        magnitudes.extend(r.sampled_magnitude for r in self.trace if r.accepted)
        return magnitudes

    @property
    def reduction_factors(self) -> List[float]:
        """Shrink of the above-reference set at each accepted step"""
        if not self.trace:
            return []
        counts = [self.trace[0].candidates_above]
        counts.extend(curr.candidates_above for prev, curr in zip(self.trace, self.trace[1:]) if prev.accepted)
        return [before / after for before, after in zip(counts, counts[1:]) if after > 0]


def _check_training_data(spec: CircuitSpec, data: Sequence[DataPoint]):
    if not data:
        raise ContractViolation("training needs at least one data point")
    for i, point in enumerate(data):
        if len(point.features) != spec.data_dim:
            raise ContractViolation(f"point {i} has {len(point.features)} features, expected {spec.data_dim}")


def _reference_magnitude(spec: CircuitSpec, index: int, data: Sequence[DataPoint], scale: float) -> float:
    return abs(config_amplitude(spec, ParamConfig.from_index(index, spec.n_params), data)) * scale


def train_quantum(
    spec: CircuitSpec,
    data: Sequence[DataPoint],
    q_config: Optional[QuantumConfig] = None,
    max_amplitudes: Optional[int] = None,
) -> TrainResult:
    """
    Maximize the objective with suppressed-amplitude resampling

    Args:
        spec: Circuit architecture
        data: Training points; their labels are the program
        q_config: Degree, softness, budget factor, seed
        max_amplitudes: Override for the 2^n budget

    Returns:
        TrainResult: best reference visited, ledger and per-round trace
    """
    q_config = q_config or QuantumConfig()
    _check_training_data(spec, data)
    n, k = spec.n_params, len(data)
    n_qubits = n + 2 * k
    budget = q_config.budget(n)
    rng = np.random.default_rng(q_config.seed)
    ledger = QueryLedger()

    av = amplitude_vector(spec, data, include_norm_factor=q_config.normalized_amplitudes, max_amplitudes=max_amplitudes)
    scale = 2.0 ** (-n / 2) if q_config.normalized_amplitudes else 1.0
    bound = scale if q_config.normalized_amplitudes else None
    order = stretch_order(bound)
    weights = av.probabilities
    total = float(np.sum(weights))
    if total == 0.0:
        logger.warning("Every configuration has zero amplitude for this program; returning configuration 0")
        params = ParamConfig.from_index(0, n)
        return TrainResult("quantum", params, objective(spec, params, data), ledger, degenerate=True)

    magnitudes = np.abs(av.amps)
    reference = int(rng.choice(weights.size, p=weights / total))
    theta = _reference_magnitude(spec, reference, data, scale)
    ledger.charge_classical()
    logger.info("Quantum maximization: n=%d, k=%d, budget=%d, start=%d (|a|=%.6g)", n, k, budget, reference, theta)

    trace: List[TraceRecord] = []
    suppressor: Optional[SuppressionPolynomial] = None
    transform: Optional[TransformResult] = None
    converged = False
    while ledger.iterations < budget:
        ledger.iterations += 1
        candidates = int(np.count_nonzero(magnitudes > theta))
        if suppressor is None:
            # products of unit-bounded factors may round a hair above the bound
            level = min(theta, scale)
            softness = q_config.softness_for(float(stretch(level, order)))
            suppressor = build_suppressor(level, q_config.degree, softness, q_config.max_residual, amplitude_bound=bound)
            transform = None
        try:
            if transform is None:
                transform = apply_transform(av, suppressor, q_config.success_floor, q_config.convergence_fraction)
        except Converged as signal:
            converged = True
            trace.append(
                TraceRecord(
                    iteration=ledger.iterations,
                    reference_index=reference,
                    reference_magnitude=theta,
                    success_weight=signal.success_weight,
                    sampled_index=None,
                    sampled_magnitude=None,
                    accepted=False,
                    converged=True,
                    degree=suppressor.degree,
                    gamma=suppressor.gamma,
                    oracle_cost=0.0,
                    candidates_above=candidates,
                )
            )
            logger.debug("Round %d: converged at reference %d", ledger.iterations, reference)
            break

        cost = query_cost(suppressor.degree, suppressor.gamma, n_qubits, transform.success_weight)
        ledger.charge_oracle(cost.per_iteration)
        sampled = int(rng.choice(weights.size, p=transform.resample_distribution))
        sampled_magnitude = _reference_magnitude(spec, sampled, data, scale)
        ledger.charge_classical()
        accepted = sampled_magnitude > theta
        trace.append(
            TraceRecord(
                iteration=ledger.iterations,
                reference_index=reference,
                reference_magnitude=theta,
                success_weight=transform.success_weight,
                sampled_index=sampled,
                sampled_magnitude=sampled_magnitude,
                accepted=accepted,
                converged=False,
                degree=suppressor.degree,
                gamma=suppressor.gamma,
                oracle_cost=cost.per_iteration,
                candidates_above=candidates,
            )
        )
        logger.debug(
            "Round %d: ref=%d |a|=%.6g sampled=%d |a|=%.6g accepted=%s", ledger.iterations, reference, theta, sampled,
            sampled_magnitude, accepted,
        )
        if accepted:
            reference, theta = sampled, sampled_magnitude
            suppressor = None

    params = ParamConfig.from_index(reference, n)
    best = objective(spec, params, data)
    logger.info(
        "Quantum maximization done: best=%s P=%.6g after %d rounds (converged=%s)", params.to_bitstring(), best.value,
        ledger.iterations, converged,
    )
    return TrainResult("quantum", params, best, ledger, trace, converged=converged)


def brute_force(spec: CircuitSpec, data: Sequence[DataPoint], max_amplitudes: Optional[int] = None) -> TrainResult:
    """Exact argmax over all 2^n configurations, lowest index wins ties"""
    av = amplitude_vector(spec, data, max_amplitudes=max_amplitudes)
    ledger = QueryLedger(brute_force_evals=len(av))
    best_index = int(np.argmax(av.probabilities))
    params = ParamConfig.from_index(best_index, spec.n_params)
    best = objective(spec, params, data)
    logger.info("Brute force: %d configurations, best=%s P=%.6g", len(av), params.to_bitstring(), best.value)
    return TrainResult("brute", params, best, ledger)


@dataclass(frozen=True)
class SpeedupReport:
    """Modeled quantum cost against the 2^n classical scan"""

    n: int
    k: int
    degree: int
    gamma: float
    modeled_quantum_cost: float
    closed_form_cost: float
    classical_cost: float
    ratio: float
    speedup: bool
    circuit_qubits: int
    gates_per_step: int
    iterations: int
    classical_amp_evals: int
    brute_force_evals: int
    measured_ratio: Optional[float]
    constant: float = 1.0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def speedup_report(n: int, k: int, d: int, gamma: float, ledgers: Sequence[QueryLedger]) -> SpeedupReport:
    """
    Compare the modeled cost of the quantum engine with brute force

    Args:
        n: Number of binary parameters
        k: Number of training points
        d: Suppression polynomial degree
        gamma: Polynomial maximum on [-1, 1]
        ledgers: Ledgers of the runs being compared (quantum and/or brute)

    Returns:
        SpeedupReport: accumulated and closed-form costs (O() constants set to 1)
    """
    modeled = sum(ledger.oracle_calls_modeled for ledger in ledgers)
    closed_form = n * math.sqrt(2.0 ** (n + 2 * k))
    classical = 2.0**n
    return SpeedupReport(
        n=n,
        k=k,
        degree=d,
        gamma=gamma,
        modeled_quantum_cost=modeled,
        closed_form_cost=closed_form,
        classical_cost=classical,
        ratio=classical / closed_form,
        speedup=2 * k < n,
        circuit_qubits=2 * (n + 2 * k) + 6,
        gates_per_step=d * (n + 2 * k),
        iterations=sum(ledger.iterations for ledger in ledgers),
        classical_amp_evals=sum(ledger.classical_amp_evals for ledger in ledgers),
        brute_force_evals=sum(ledger.brute_force_evals for ledger in ledgers),
        measured_ratio=classical / modeled if modeled > 0 else None,
    )
