"""
Configuration settings for the re-uploading classifier trainer
"""

import math

# Elementary two-qubit classifier
CIRCUIT_CONFIG = {
    "encoding_scale": math.pi,  # radians per unit feature, features live in [-1, 1]
    "angle_zero": -math.pi / 4,  # trainable rotation for bit value 0
    "angle_one": math.pi / 4,  # trainable rotation for bit value 1
    "entangler": True,  # CNOT(q0 -> q1) closes every layer
    "norm_tolerance": 1e-12,
}

# Simulation guardrails
SIMULATION_CONFIG = {
    "max_amplitudes": 2**22,  # cap on 2^n for the factorized amplitude vector
    "max_joint_qubits": 22,  # cap on 2k + n for the full joint register
}

# Suppression polynomial (amplitude transform)
SUPPRESSION_CONFIG = {
    "bound": 0.25,  # |Q(x)| <= 1/4 on [-1, 1]
    "bound_safety": 1e-3,  # rescale target sits this fraction below the bound
    "grid_points": 10001,  # certification grid over [-1, 1]
    "fit_nodes_per_degree": 4,  # Chebyshev nodes per coefficient in the least-squares fit
    "min_fit_nodes": 256,
    "stop_band_weight": 300.0,  # least-squares row weight at or below the threshold
    "stretch_angle": math.pi / 4,  # m * arcsin(amplitude bound) stays below this
    "max_residual": 0.2,  # fits worse than this raise ApproximationError
    "success_floor": 1e-12,  # relative to the total squared norm of the input amplitudes
    "convergence_fraction": 1.0,  # leakage floor as a share of the squared pass-band minimum
}

# Maximization loop
OPTIMIZER_CONFIG = {
    "engine": "quantum",  # "quantum" or "brute"
    "degree": 40,
    "softness": None,  # None -> max(softness_floor, softness_fraction * theta)
    "softness_floor": 0.02,
    "softness_fraction": 0.1,
    "budget_factor": 3.0,  # iterations = ceil(budget_factor * n)
    "seed": 0,
    "normalized_amplitudes": True,  # Q sees the 2^(-n/2) state normalization
}

# Dataset generation / ingestion
DATASET_CONFIG = {
    "source": "threshold_1d",  # "threshold_1d", "circle_2d" or "file"
    "k": 8,
    "cutoff": 0.0,
    "radius": math.sqrt(2 / math.pi),  # half of [-1, 1]^2 lies inside
    "test_k": 0,
    "float_digits": 17,
}

# Evaluation and boundary export
EVALUATION_CONFIG = {
    "threshold_mode": "optimized",  # "optimized" or "fixed"
    "threshold": 0.5,
    "grid_res": 21,
}

# Run history kept by the training manager
HISTORY_CONFIG = {"max_history": 50}

# Process exit codes
CLI_EXIT_CODES = {
    "ok": 0,
    "config": 2,
    "resource": 3,
    "runtime": 4,
}

# Logging
LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"
