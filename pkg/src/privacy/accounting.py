"""Privacy calibration for differentially private n-gram extraction.

Covers standard-normal numerics, the analytic Gaussian mechanism's
delta(epsilon, sigma), solving for the effective noise sigma*, splitting sigma*
across extraction levels under Gaussian composition, and the release
thresholds rho_1 (privacy) and rho_k (spurious-output control).

Every function here is pure and thread-safe.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize, special

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_REL_EPS = 4.0 * np.finfo(float).eps

COMPOSITION_RTOL = 1e-9
INITIAL_SIGMA = 1e-3


@dataclass(frozen=True)
class PrivacyTarget:
    """User-level (epsilon, delta) guarantee a run must meet."""

    epsilon: float
    delta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError(f"epsilon must be a positive real, got {self.epsilon}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")


@dataclass(frozen=True)
class NoiseSchedule:
    """Full mechanism configuration for levels 1..max_len.

    ``sigmas[k-1]`` and ``caps[k-1]`` belong to level k. ``sample_p=None``
    selects the adaptive validity-sampling probability per level. A schedule
    with ``threshold_override`` set is a noiseless debug schedule: every
    level uses that threshold and no noise, and nothing about it is private.
    """

    max_len: int
    sigma_star: float
    sigmas: Tuple[float, ...]
    rho1: float
    caps: Tuple[int, ...]
    eta: float
    decay: float
    sample_p: Optional[float] = None
    epsilon: Optional[float] = None
    delta: Optional[float] = None
    threshold_override: Optional[float] = field(default=None)

    @property
    def private(self) -> bool:
        return self.threshold_override is None

    def sigma(self, level: int) -> float:
        return self.sigmas[level - 1]

    def cap(self, level: int) -> int:
        return self.caps[level - 1]

    def composition_residual(self) -> float:
        """Relative gap between sum(1/sigma_k^2) and 1/sigma*^2."""
        if not self.private:
            return 0.0
        target = 1.0 / self.sigma_star**2
        total = math.fsum(1.0 / s**2 for s in self.sigmas)
        return abs(total - target) / target

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "max_len": self.max_len,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "sigma_star": self.sigma_star,
            "sigmas": list(self.sigmas),
            "rho1": self.rho1,
            "caps": list(self.caps),
            "eta": self.eta,
            "decay": self.decay,
            "sample_p": self.sample_p,
            "private": self.private,
            "threshold_override": self.threshold_override,
            "composition_residual": self.composition_residual(),
        }


def _density(x: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * x * x) / _SQRT_2PI


def _upper_quantile(tail: np.ndarray) -> np.ndarray:
    """Vectorized Phi^-1(1 - tail), working on the tail probability directly."""
    tail = np.asarray(tail, dtype=float)
    x = -special.ndtri(tail)
    density = _density(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        # one Newton step on Q(x) = Phi(-x), whose derivative is -phi(x)
        step = (special.ndtr(-x) - tail) / density
    return np.where(density > 0.0, x + step, x)


def std_normal_cdf(x: float) -> float:
    """Standard normal CDF, evaluated through the complementary error function.

    Args:
        x: Finite real argument

    Returns:
        Phi(x)

    Raises:
        ValueError: If x is not finite
    """
    if not math.isfinite(x):
        raise ValueError(f"std_normal_cdf requires a finite argument, got {x}")
    return float(special.ndtr(x))


def std_normal_upper_quantile(tail: float) -> float:
    """Return Phi^-1(1 - tail) without forming 1 - tail.

    Thresholds need quantiles extremely close to 1; going through the tail
    probability keeps full relative precision there.

    Args:
        tail: Upper-tail probability in (0, 1)

    Returns:
        x such that 1 - Phi(x) = tail

    Raises:
        ValueError: If tail is outside (0, 1)
    """
    if not 0.0 < tail < 1.0:
        raise ValueError(f"tail probability must lie in (0, 1), got {tail}")
    return float(_upper_quantile(tail))


def std_normal_inv_cdf(q: float) -> float:
    """Inverse of the standard normal CDF.

    Args:
        q: Probability in (0, 1)

    Returns:
        x such that Phi(x) = q

    Raises:
        ValueError: If q is outside (0, 1)
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"std_normal_inv_cdf requires q in (0, 1), got {q}")
    if q > 0.5:
        # exact for q in [0.5, 1]
        return float(_upper_quantile(1.0 - q))
    return -float(_upper_quantile(q))


def gaussian_delta(epsilon: float, sigma: float) -> float:
    """Delta of the Gaussian mechanism with l2 sensitivity 1 and noise sigma.

    Evaluates Phi(-eps*sigma + 1/(2 sigma)) - e^eps Phi(-eps*sigma - 1/(2 sigma)),
    the second term in log space so large epsilon cannot overflow.

    Args:
        epsilon: Privacy loss bound, > 0
        sigma: Noise standard deviation, > 0

    Returns:
        The smallest delta for which the mechanism is (epsilon, delta)-DP

    Raises:
        ValueError: On non-positive or non-finite inputs
    """
    if not (math.isfinite(epsilon) and epsilon > 0):
        raise ValueError(f"epsilon must be a positive real, got {epsilon}")
    if not (math.isfinite(sigma) and sigma > 0):
        raise ValueError(f"sigma must be a positive real, got {sigma}")
    a = epsilon * sigma
    b = 1.0 / (2.0 * sigma)
    first = float(special.ndtr(-a + b))
    second = math.exp(epsilon + float(special.log_ndtr(-a - b)))
    return first - second


def solve_sigma_star(target: PrivacyTarget) -> float:
    """Find sigma* with gaussian_delta(epsilon, sigma*) = delta / 2.

    The bracket starts at sigma = 1e-3 and doubles until the sign of the
    residual changes; bisection then runs to machine precision.

    Args:
        target: Privacy target

    Returns:
        The unique root sigma*
    """
    half_delta = target.delta / 2.0

    def excess(sigma: float) -> float:
        return gaussian_delta(target.epsilon, sigma) - half_delta

    lo = hi = INITIAL_SIGMA
    value = excess(hi)
    while value > 0.0:
        lo, hi = hi, hi * 2.0
        value = excess(hi)
    if value == 0.0:
        return hi
    if lo == hi:
        # delta(eps, 1e-3) is essentially 1, so only absurd inputs reach this
        raise ValueError(f"Cannot bracket sigma* for {target}")
    return float(
        optimize.bisect(excess, lo, hi, xtol=1e-300, rtol=_REL_EPS, maxiter=2000)
    )


def gaussian_epsilon(sigma: float, delta: float) -> float:
    """Find the epsilon at which noise sigma meets gaussian_delta = delta / 2.

    This is the inverse of solve_sigma_star in epsilon, used to recompute
    what a set of per-level noise values actually spends.

    Args:
        sigma: Effective noise, > 0
        delta: Target delta in (0, 1)

    Returns:
        epsilon >= 0 (0 when the noise alone already meets delta / 2)
    """
    if not (math.isfinite(sigma) and sigma > 0):
        raise ValueError(f"sigma must be a positive real, got {sigma}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    half_delta = delta / 2.0

    def excess(epsilon: float) -> float:
        return gaussian_delta(epsilon, sigma) - half_delta

    lo = 1e-12
    if excess(lo) <= 0.0:
        return 0.0
    hi = 1.0
    while excess(hi) > 0.0:
        lo, hi = hi, hi * 2.0
    return float(
        optimize.bisect(excess, lo, hi, xtol=1e-300, rtol=_REL_EPS, maxiter=2000)
    )


def compose_sigmas(sigmas: Sequence[float]) -> float:
    """Effective noise of composed Gaussian mechanisms: 1/s*^2 = sum 1/s_k^2."""
    if not sigmas:
        raise ValueError("compose_sigmas needs at least one sigma")
    if any(not (math.isfinite(s) and s > 0) for s in sigmas):
        raise ValueError(f"all sigmas must be positive reals, got {list(sigmas)}")
    return 1.0 / math.sqrt(math.fsum(1.0 / s**2 for s in sigmas))


def compute_rho1(sigma1: float, delta: float, delta1_cap: int) -> float:
    """Level-1 threshold: max over t in [1, cap] of 1/sqrt(t) + sigma1 * Phi^-1((1 - delta/2)^(1/t)).

    The quantile argument is handled through its tail,
    1 - (1 - delta/2)^(1/t) = -expm1(log1p(-delta/2) / t).

    Args:
        sigma1: Level-1 noise (0 only for noiseless debugging)
        delta: Total delta of the run
        delta1_cap: Level-1 contribution cap

    Returns:
        rho_1
    """
    if not (math.isfinite(sigma1) and sigma1 >= 0):
        raise ValueError(f"sigma1 must be a non-negative real, got {sigma1}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if int(delta1_cap) != delta1_cap or delta1_cap < 1:
        raise ValueError(f"delta1_cap must be a positive integer, got {delta1_cap}")

    t = np.arange(1, int(delta1_cap) + 1, dtype=float)
    tail = -np.expm1(np.log1p(-delta / 2.0) / t)
    values = 1.0 / np.sqrt(t) + sigma1 * _upper_quantile(tail)
    return float(values.max())


def compute_rho_k(
    sigma_k: float, eta: float, size_prev: int, size_valid: int
) -> float:
    """Level-k threshold (k >= 2) bounding expected spurious output.

    rho_k = sigma_k * Phi^-1(1 - eta * min(1, size_prev / size_valid)); the
    expected number of released zero-weight k-grams is then at most
    eta * min(size_prev, size_valid).

    Returns:
        rho_k, or +inf when either set is empty (the level releases nothing)
    """
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    if not (math.isfinite(sigma_k) and sigma_k >= 0):
        raise ValueError(f"sigma_k must be a non-negative real, got {sigma_k}")
    if size_prev <= 0 or size_valid <= 0:
        return math.inf
    fraction = min(1.0, size_prev / size_valid)
    return sigma_k * float(_upper_quantile(eta * fraction))


def _expand_caps(caps: Union[int, Sequence[int]], max_len: int) -> Tuple[int, ...]:
    if isinstance(caps, (int, np.integer)):
        caps = [int(caps)] * max_len
    caps = tuple(int(c) for c in caps)
    if len(caps) != max_len:
        raise ValueError(f"expected {max_len} per-level caps, got {len(caps)}")
    if any(c < 1 for c in caps):
        raise ValueError(f"caps must be positive integers, got {list(caps)}")
    return caps


def _check_schedule_args(
    max_len: int, decay: float, eta: float, sample_p: Optional[float]
) -> None:
    if int(max_len) != max_len or max_len < 1:
        raise ValueError(f"max_len must be an integer >= 1, got {max_len}")
    if not 0.0 < decay <= 1.0:
        raise ValueError(f"decay must lie in (0, 1], got {decay}")
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    if sample_p is not None and not 0.0 < sample_p <= 1.0:
        raise ValueError(f"sample_p must lie in (0, 1], got {sample_p}")


def allocate_schedule(
    target: PrivacyTarget,
    max_len: int,
    decay: float = 1.0,
    caps: Union[int, Sequence[int]] = 300,
    eta: float = 0.01,
    sample_p: Optional[float] = None,
) -> NoiseSchedule:
    """Split sigma* across levels with geometric decay sigma_k = c * sigma_{k-1}.

    sigma_1 = sigma* * sqrt(sum_k c^(-2(k-1))) makes the composition identity
    sum 1/sigma_k^2 = 1/sigma*^2 hold; c = 1 is the even split.

    Args:
        target: Privacy target
        max_len: Longest n-gram length T
        decay: Geometric decay factor c in (0, 1]
        caps: One cap for every level, or one cap per level
        eta: Tolerated spurious fraction
        sample_p: Validity-estimation sampling probability (None = adaptive)

    Returns:
        Calibrated NoiseSchedule
    """
    _check_schedule_args(max_len, decay, eta, sample_p)
    caps = _expand_caps(caps, max_len)

    sigma_star = solve_sigma_star(target)
    scale = math.fsum(decay ** (-2.0 * (k - 1)) for k in range(1, max_len + 1))
    sigmas = [sigma_star * math.sqrt(scale)]
    for _ in range(1, max_len):
        sigmas.append(decay * sigmas[-1])

    return NoiseSchedule(
        max_len=int(max_len),
        sigma_star=sigma_star,
        sigmas=tuple(sigmas),
        rho1=compute_rho1(sigmas[0], target.delta, caps[0]),
        caps=caps,
        eta=eta,
        decay=decay,
        sample_p=sample_p,
        epsilon=target.epsilon,
        delta=target.delta,
    )


def noiseless_schedule(
    max_len: int,
    caps: Union[int, Sequence[int]],
    threshold: float = 0.0,
    eta: float = 0.01,
    sample_p: Optional[float] = None,
) -> NoiseSchedule:
    """Debug schedule with zero noise and a fixed threshold at every level.

    Output produced with this schedule is NOT differentially private.
    """
    _check_schedule_args(max_len, 1.0, eta, sample_p)
    if not math.isfinite(threshold):
        raise ValueError(f"threshold must be finite, got {threshold}")
    return NoiseSchedule(
        max_len=int(max_len),
        sigma_star=0.0,
        sigmas=tuple([0.0] * int(max_len)),
        rho1=threshold,
        caps=_expand_caps(caps, max_len),
        eta=eta,
        decay=1.0,
        sample_p=sample_p,
        threshold_override=threshold,
    )
