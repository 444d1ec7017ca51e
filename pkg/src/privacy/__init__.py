"""Privacy accounting for dpne.

Calibrates Gaussian noise and release thresholds for a user-level
(epsilon, delta) target.
"""

from .accounting import (
    NoiseSchedule,
    PrivacyTarget,
    allocate_schedule,
    compose_sigmas,
    compute_rho1,
    compute_rho_k,
    gaussian_delta,
    gaussian_epsilon,
    noiseless_schedule,
    solve_sigma_star,
    std_normal_cdf,
    std_normal_inv_cdf,
    std_normal_upper_quantile,
)

__all__ = [
    "NoiseSchedule",
    "PrivacyTarget",
    "allocate_schedule",
    "compose_sigmas",
    "compute_rho1",
    "compute_rho_k",
    "gaussian_delta",
    "gaussian_epsilon",
    "noiseless_schedule",
    "solve_sigma_star",
    "std_normal_cdf",
    "std_normal_inv_cdf",
    "std_normal_upper_quantile",
]
