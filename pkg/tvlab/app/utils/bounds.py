"""Closed-form sample-size calculators and interval estimates"""
import math
from fractions import Fraction
from typing import Callable, Tuple

from scipy.stats import norm

from ..core.exceptions import BadParams

# Sample-size constants that the analysis only fixes up to O(.)
YATRACOS_CONSTANT = 8
HISTOGRAM_CONSTANT = 8
COMPRESSION_CONSTANT = 10
SPLIT_CONSTANT = 162


def _check_unit(**values) -> None:
    for name, value in values.items():
        if not 0 < value < 1:
            raise BadParams(f"{name} must lie in (0, 1), got {value}")


def realizable_sample_size(eps, delta, g: Callable[[int], int]) -> int:
    """ceil(ln(1/delta) * g(ceil(1/eps)))"""
    _check_unit(eps=eps, delta=delta)
    return math.ceil(math.log(1 / float(delta)) * g(math.ceil(1 / Fraction(eps))))


def yatracos_sample_size(class_size: int, eps, delta) -> int:
    """ceil(8 * (2 ln|C| + ln(2/delta)) / eps^2)"""
    if class_size < 1:
        raise BadParams(f"class size must be >= 1, got {class_size}")
    _check_unit(eps=eps, delta=delta)
    eps, delta = float(eps), float(delta)
    return math.ceil(YATRACOS_CONSTANT * (2 * math.log(class_size) + math.log(2 / delta)) / eps ** 2)


def histogram_sample_size(alpha, beta, eps_dp, delta_dp) -> int:
    """ceil(8 ln(2/(beta * delta_dp)) / (alpha * eps_dp))"""
    _check_unit(alpha=alpha, beta=beta, delta_dp=delta_dp)
    if eps_dp <= 0:
        raise BadParams(f"eps_dp must be positive, got {eps_dp}")
    return math.ceil(
        HISTOGRAM_CONSTANT * math.log(2 / (float(beta) * float(delta_dp))) / (float(alpha) * float(eps_dp))
    )


def compression_sample_size(eps, g: Callable[[int], int]) -> int:
    """10 * g(ceil(1/eps))"""
    _check_unit(eps=eps)
    return COMPRESSION_CONSTANT * g(math.ceil(1 / Fraction(eps)))


def split_sizes(eps, delta, inner_size: int, scale=1) -> Tuple[int, int]:
    """
    Sizes of the hypothesis-generation and selection halves.

    n1 >= max{2 n_re(eps/9, delta/5), 162 (1 + ln(5/delta)) / eps^2}
    n2 >= 162 (2 n1 + ln(5/delta)) / eps^2

    Both sizes come from the unscaled formulas and are then multiplied by scale.
    """
    _check_unit(eps=eps, delta=delta)
    if scale <= 0:
        raise BadParams(f"scale must be positive, got {scale}")
    eps_f, log_term = float(eps), math.log(5 / float(delta))
    n1 = math.ceil(max(2 * inner_size, SPLIT_CONSTANT * (1 + log_term) / eps_f ** 2))
    n2 = math.ceil(SPLIT_CONSTANT * (2 * n1 + log_term) / eps_f ** 2)
    scale = Fraction(scale)
    return math.ceil(scale * n1), math.ceil(scale * n2)


def wilson_interval(failures: int, trials: int, confidence: float = 0.95) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion"""
    if trials < 1:
        raise BadParams("Wilson interval needs at least one trial")
    z = norm.ppf(1 - (1 - confidence) / 2)
    rate = failures / trials
    denom = 1 + z ** 2 / trials
    center = (rate + z ** 2 / (2 * trials)) / denom
    half = z * math.sqrt(rate * (1 - rate) / trials + z ** 2 / (4 * trials ** 2)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def binomial_margin(rate: float, trials: int, sigmas: float = 3) -> float:
    """sigmas * sqrt(rate (1 - rate) / trials), the Monte Carlo slack used by acceptance checks"""
    return sigmas * math.sqrt(rate * (1 - rate) / trials)
