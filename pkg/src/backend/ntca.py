"""
Amplitude suppression by a bounded polynomial

The nonlinear amplitude transform is simulated at the amplitude level: the
suppression polynomial Q is applied elementwise to a real amplitude vector
and its quantum cost is charged from the closed-form query count
d * gamma * sqrt(2^M / sum_j Q(a_j)^2), with the O() constant taken as 1.

Q is built from a base polynomial P that approximates
g(u) = u/4 * step((|u| - theta) / w), where step is a C-infinity ramp from
0 (at 0) to 1 (at 1). P is fitted in the odd form u * (u^2 - theta^2) * R(u^2),
so P(0) = P(+-theta) = 0 exactly, by least squares with the rows at or below
theta weighted up, then rescaled so max |P| on the certification grid stays
below 1/4.

Amplitudes that carry the 2^(-n/2) state normalization all live in
[-2^(-n/2), 2^(-n/2)], far below the resolution of a low-degree fit. For those
Q(x) = P(sin(m * arcsin x)) with m odd, which is the Chebyshev composition
+-P(T_m(x)): a polynomial of degree d * m that maps the amplitude range onto
most of [-1, 1] and keeps |Q| <= max |P| everywhere.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial import chebyshev as C

from src.backend.oracle import AmplitudeVector
from src.utils.config import SUPPRESSION_CONFIG
from src.utils.errors import ApproximationError, ContractViolation, Converged, DomainError

logger = logging.getLogger(__name__)


def smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1"""
    t = np.clip(np.asarray(t, dtype=np.float64), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        rise = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        fall = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return rise / (rise + fall)


def suppression_target(x: np.ndarray, theta: float, softness: float) -> np.ndarray:
    """Ideal transform: x/4 above theta + softness, zero at or below theta"""
    x = np.asarray(x, dtype=np.float64)
    return SUPPRESSION_CONFIG["bound"] * x * smooth_step((np.abs(x) - theta) / softness)


def certification_grid() -> np.ndarray:
    return np.linspace(-1.0, 1.0, SUPPRESSION_CONFIG["grid_points"])


def stretch_order(amplitude_bound: Optional[float] = None) -> int:
    """
    Largest odd m with m * arcsin(bound) <= stretch angle

    Without a bound the amplitudes already span [-1, 1] and m = 1.
    """
    if amplitude_bound is None:
        return 1
    if not 0.0 < amplitude_bound <= 1.0:
        raise ContractViolation(f"amplitude bound must lie in (0, 1], got {amplitude_bound}")
    order = int(SUPPRESSION_CONFIG["stretch_angle"] // math.asin(amplitude_bound))
    if order % 2 == 0:
        order -= 1
    return max(order, 1)


def stretch(x, order: int):
    """sin(m * arcsin x): odd, increasing on the amplitude range, equal to +-T_m(x)"""
    if order == 1:
        return x
    return np.sin(order * np.arcsin(np.clip(x, -1.0, 1.0)))


@dataclass(frozen=True)
class SuppressionPolynomial:
    """
    Degree-d polynomial in the Chebyshev basis, bounded by 1/4 on [-1, 1]

    degree counts the composed polynomial (fit degree times order). leakage is
    the largest |Q| at or below the threshold; pass_floor the smallest |Q| on
    amplitudes from the ramp top up to the amplitude bound.
    """

    degree: int
    threshold: float
    softness: float
    coefficients: np.ndarray
    gamma: float
    residual: float = 0.0
    basis: str = "chebyshev"
    order: int = 1
    leakage: float = 0.0
    pass_floor: float = 0.0

    def __post_init__(self):
        if self.order < 1 or self.order % 2 == 0:
            raise ContractViolation(f"stretch order must be odd and positive, got {self.order}")
        coefficients = np.asarray(self.coefficients, dtype=np.float64)
        if coefficients.shape != (self.degree + 1,):
            raise ContractViolation(f"degree {self.degree} needs {self.degree + 1} coefficients, got {coefficients.shape}")
        coefficients.setflags(write=False)
        object.__setattr__(self, "coefficients", coefficients)

    @property
    def base_coefficients(self) -> np.ndarray:
        """Coefficients of P with Q(x) = P(sin(m * arcsin x))"""
        sign = -1.0 if (self.order - 1) // 2 % 2 else 1.0
        return sign * self.coefficients[:: self.order]

    def __call__(self, x):
        if self.order == 1:
            return C.chebval(x, self.coefficients)
        return C.chebval(stretch(np.asarray(x, dtype=np.float64), self.order), self.base_coefficients)


def evaluate_clenshaw(q: SuppressionPolynomial, x) -> np.ndarray:
    """Explicit Clenshaw recurrence over the full coefficients, kept independent of numpy's chebval"""
    x = np.asarray(x, dtype=np.float64)
    b_next = np.zeros_like(x)
    b_curr = np.zeros_like(x)
    for c in q.coefficients[:0:-1]:
        b_curr, b_next = c + 2.0 * x * b_curr - b_next, b_curr
    return q.coefficients[0] + x * b_curr - b_next


def _fit_odd(nodes: np.ndarray, target: np.ndarray, theta: float, degree: int, row_weights: np.ndarray) -> np.ndarray:
    """Weighted least-squares Chebyshev coefficients of an odd polynomial vanishing at 0 and +-theta"""
    if degree < 3:
        # too short for the pinned form: best multiple of x
        w2 = row_weights**2
        slope = float(np.sum(w2 * nodes * target) / np.sum(w2 * nodes * nodes))
        return np.array([0.0, slope])

    n_even = (degree - 3) // 2 + 1
    pinned_values = nodes * (nodes**2 - theta**2)
    angles = np.arccos(np.clip(nodes, -1.0, 1.0))
    design = pinned_values[:, None] * np.cos(np.outer(angles, 2.0 * np.arange(n_even)))
    weights, *_ = np.linalg.lstsq(design * row_weights[:, None], target * row_weights, rcond=None)

    remainder = np.zeros(2 * n_even - 1)
    remainder[::2] = weights
    pinned = C.chebmul(C.chebfromroots([-theta, theta]), [0.0, 1.0])
    return C.chebmul(pinned, remainder)


def build_suppressor(
    theta: float,
    degree: int,
    softness: float,
    max_residual: Optional[float] = None,
    amplitude_bound: Optional[float] = None,
) -> SuppressionPolynomial:
    """
    Fit and certify the suppression polynomial for a reference magnitude

    Args:
        theta: Reference amplitude magnitude, 0 < theta <= amplitude_bound (or 1)
        degree: Degree d >= 2 of the fitted base polynomial
        softness: Width w of the ramp above the stretched threshold
        max_residual: Largest tolerated max |P - g| on the grid
        amplitude_bound: Largest possible |amplitude|; stretches the fit when set

    Returns:
        SuppressionPolynomial: certified |Q| <= 1/4, gamma = grid maximum
    """
    top_amplitude = 1.0 if amplitude_bound is None else amplitude_bound
    if not 0.0 < theta <= top_amplitude:
        raise ContractViolation(f"theta must lie in (0, {top_amplitude}], got {theta}")
    if degree < 2:
        raise ContractViolation(f"degree must be >= 2, got {degree}")
    if softness <= 0.0:
        raise ContractViolation(f"softness must be positive, got {softness}")
    limit = SUPPRESSION_CONFIG["max_residual"] if max_residual is None else max_residual

    order = stretch_order(amplitude_bound)
    level = float(stretch(theta, order))
    top = float(stretch(top_amplitude, order))

    n_nodes = max(SUPPRESSION_CONFIG["fit_nodes_per_degree"] * (degree + 1), SUPPRESSION_CONFIG["min_fit_nodes"])
    nodes = C.chebpts1(n_nodes)
    row_weights = np.where(np.abs(nodes) <= level, SUPPRESSION_CONFIG["stop_band_weight"], 1.0)
    base = _fit_odd(nodes, suppression_target(nodes, level, softness), level, degree, row_weights)
    base = np.pad(base, (0, degree + 1 - base.size))

    grid = certification_grid()
    peak = float(np.max(np.abs(C.chebval(grid, base))))
    ceiling = SUPPRESSION_CONFIG["bound"] * (1.0 - SUPPRESSION_CONFIG["bound_safety"])
    if peak > ceiling:
        base = base * (ceiling / peak)

    values = C.chebval(grid, base)
    residual = float(np.max(np.abs(values - suppression_target(grid, level, softness))))
    if residual > limit:
        raise ApproximationError(
            f"degree {degree} cannot follow a ramp of width {softness} at theta={level}: residual {residual:.3e} > {limit}",
            residual,
        )
    leakage = float(np.max(np.abs(values[np.abs(grid) <= level]), initial=0.0))
    ramp_top = min(level + softness, top)
    band = np.append(grid[(grid >= ramp_top) & (grid <= top)], top)
    pass_floor = float(np.min(np.abs(C.chebval(band, base))))

    coefficients = np.zeros(degree * order + 1)
    coefficients[::order] = (-1.0 if (order - 1) // 2 % 2 else 1.0) * base
    gamma = float(np.max(np.abs(C.chebval(stretch(grid, order), base))))
    logger.debug(
        "Suppressor fit: theta=%.6g m=%d d=%d w=%.4f gamma=%.4f residual=%.2e leakage=%.2e floor=%.2e", theta, order,
        degree, softness, gamma, residual, leakage, pass_floor,
    )
    return SuppressionPolynomial(
        degree=degree * order,
        threshold=theta,
        softness=softness,
        coefficients=coefficients,
        gamma=gamma,
        residual=residual,
        order=order,
        leakage=leakage,
        pass_floor=pass_floor,
    )


@dataclass(frozen=True)
class TransformResult:
    """Q applied elementwise, with the post-selection weight and sampling law"""

    transformed: np.ndarray
    success_weight: float
    resample_distribution: np.ndarray


def apply_transform(
    av: AmplitudeVector,
    q: SuppressionPolynomial,
    success_floor: Optional[float] = None,
    convergence_fraction: Optional[float] = None,
) -> TransformResult:
    """
    Apply Q to every amplitude and normalize the surviving weight

    Any amplitude past the ramp adds at least q.pass_floor^2 to the success
    weight, so a weight below that floor leaves only amplitudes within the
    ramp above the reference.

    Args:
        av: Amplitudes of the fixed-program register
        q: Suppression polynomial
        success_floor: Relative floor on the success weight (default from config)
        convergence_fraction: Share of q.pass_floor^2 used as the leakage floor (default from config)

    Returns:
        TransformResult: transformed amplitudes, success weight, resampling law

    Raises:
        Converged: when the success weight falls below
            max(success_floor * sum(a_j^2), convergence_fraction * pass_floor^2)
    """
    if len(av) == 0:
        raise ContractViolation("amplitude vector is empty")
    eps = SUPPRESSION_CONFIG["success_floor"] if success_floor is None else success_floor
    fraction = SUPPRESSION_CONFIG["convergence_fraction"] if convergence_fraction is None else convergence_fraction

    transformed = q(av.amps)
    weights = transformed**2
    success_weight = float(np.sum(weights))
    floor = max(eps * float(np.sum(av.probabilities)), fraction * q.pass_floor**2)
    if success_weight <= 0.0 or success_weight < floor:
        raise Converged(success_weight, floor)
    return TransformResult(
        transformed=transformed, success_weight=success_weight, resample_distribution=weights / success_weight
    )


@dataclass(frozen=True)
class QueryCost:
    """Modeled applications of the state-preparation oracle and its inverse"""

    per_iteration: float
    degree: int
    gamma: float
    n_qubits: int
    success_weight: float


def query_cost(degree: int, gamma: float, n_qubits: int, success_weight: float) -> QueryCost:
    """d * gamma * sqrt(2^M / success_weight) with M = n + 2k"""
    if success_weight <= 0.0:
        raise DomainError(f"success weight must be positive, got {success_weight}")
    per_iteration = degree * gamma * math.sqrt(2.0**n_qubits / success_weight)
    return QueryCost(
        per_iteration=per_iteration, degree=degree, gamma=gamma, n_qubits=n_qubits, success_weight=success_weight
    )
