"""Self-contained statistical kernel for the tournament analyses.

Everything here is computed from first principles on top of ``math.erfc``
and ``math.lgamma`` (plus numpy linear algebra for the logistic fit), so
the verification path carries no statistical dependencies:

* normal CDF        Phi(x) = erfc(-x / sqrt(2)) / 2
* normal quantile   rational approximation (Acklam) + one Halley step
* chi-square(1) upper tail   erfc(sqrt(x / 2))
* Wilson score interval, Yates-corrected chi-square, exact two-sided
  binomial test (minimum-likelihood convention, log-space), Bonferroni,
  normal-approximation power, and IRLS logistic regression with Wald
  intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

_SQRT2 = math.sqrt(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


class Proportion(NamedTuple):
    successes: int
    trials: int

    @property
    def estimate(self) -> float:
        return self.successes / self.trials


class Interval(NamedTuple):
    lower: float
    upper: float


class ChisqResult(NamedTuple):
    statistic: float
    p_value: float
    low_expected_warning: bool  # an expected cell count fell below 1


# ---------------------------------------------------------------------------
# Normal distribution primitives
# ---------------------------------------------------------------------------


def normal_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-x / _SQRT2)


# Acklam's rational approximation of the probit function (relative error
# below 1.15e-9 everywhere, then polished below 1e-14 by a Halley step).
_ACKLAM_A = (
    -3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
    1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00,
)
_ACKLAM_B = (
    -5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
    6.680131188771972e01, -1.328068155288572e01,
)
_ACKLAM_C = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
    -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00,
)
_ACKLAM_D = (
    7.784695709041462e-03, 3.224671290700398e-01,
    2.445134137142996e00, 3.754408661907416e00,
)


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF, accurate to ~1e-14 absolute."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"quantile argument must be in (0, 1), got {p}")
    a, b, c, d = _ACKLAM_A, _ACKLAM_B, _ACKLAM_C, _ACKLAM_D
    p_low = 0.02425
    if p < p_low:
        q = math.sqrt(-2.0 * math.log(p))
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        )
    elif p <= 1.0 - p_low:
        q = p - 0.5
        r = q * q
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q / (
            ((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0
        )
    else:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        )
    # One Halley refinement against the erfc-based CDF.
    err = normal_cdf(x) - p
    u = err * _SQRT_2PI * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


def chi2_sf_1df(x: float) -> float:
    """Upper tail of the chi-square distribution with one degree of freedom."""
    if x < 0:
        return 1.0
    return math.erfc(math.sqrt(0.5 * x))


# ---------------------------------------------------------------------------
# Proportion tests
# ---------------------------------------------------------------------------


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> Interval:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("wilson_interval requires at least one trial")
    if not 0 <= successes <= trials:
        raise ValueError(f"successes must be in 0..{trials}, got {successes}")
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must be in (0, 1), got {confidence}")
    z = normal_quantile(0.5 * (1.0 + confidence))
    n = float(trials)
    p_hat = successes / n
    z2n = z * z / n
    denom = 1.0 + z2n
    center = (p_hat + 0.5 * z2n) / denom
    half = z * math.sqrt(p_hat * (1.0 - p_hat) / n + 0.25 * z2n / n) / denom
    return Interval(max(0.0, center - half), min(1.0, center + half))


def chisq_yates(k: int, n: int, p0: float) -> ChisqResult:
    """One-d.f. goodness-of-fit chi-square with Yates' continuity correction.

    Two cells (k, n-k) against expectations (n*p0, n*(1-p0)); statistic
    sum of (|O-E| - 0.5)^2 / E, p-value from the chi-square(1) upper tail.
    """
    if n < 1:
        raise ValueError("chisq_yates requires n >= 1")
    if not 0.0 < p0 < 1.0:
        raise ValueError(f"p0 must be in (0, 1), got {p0}")
    observed = (float(k), float(n - k))
    expected = (n * p0, n * (1.0 - p0))
    statistic = sum(
        (abs(o - e) - 0.5) ** 2 / e for o, e in zip(observed, expected)
    )
    return ChisqResult(statistic, chi2_sf_1df(statistic), min(expected) < 1.0)


def _binom_logpmf(k: int, n: int, log_p: float, log_q: float, lg_n1: float) -> float:
    return (
        lg_n1
        - math.lgamma(k + 1)
        - math.lgamma(n - k + 1)
        + k * log_p
        + (n - k) * log_q
    )


def binom_test_two_sided(k: int, n: int, p0: float) -> float:
    """Exact two-sided binomial p-value, minimum-likelihood convention.

    Sums Binomial(n, p0) probabilities over every outcome whose probability
    does not exceed that of ``k`` (up to a 1e-7 relative slack absorbing
    floating-point ties, the convention used by standard implementations).
    All pmf evaluations run in log space via ``lgamma`` so the test is
    stable for n well beyond 1e5; the final sum is exponentiated once.
    """
    if not 0 <= k <= n:
        raise ValueError(f"k must be in 0..{n}, got {k}")
    if not 0.0 < p0 < 1.0:
        raise ValueError(f"p0 must be in (0, 1), got {p0}")
    log_p = math.log(p0)
    log_q = math.log1p(-p0)
    lg_n1 = math.lgamma(n + 1)
    threshold = _binom_logpmf(k, n, log_p, log_q, lg_n1) + 1e-7
    included = [
        lp
        for i in range(n + 1)
        if (lp := _binom_logpmf(i, n, log_p, log_q, lg_n1)) <= threshold
    ]
    top = max(included)
    total = top + math.log(math.fsum(math.exp(lp - top) for lp in included))
    return min(1.0, math.exp(total))


def bonferroni(p_values: Sequence[float], m: int) -> List[float]:
    """Bonferroni correction: each p-value becomes min(1, m * p)."""
    if m < len(p_values):
        raise ValueError(f"m ({m}) must be >= number of p-values ({len(p_values)})")
    for p in p_values:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p-value out of [0, 1]: {p}")
    return [min(1.0, m * p) for p in p_values]


def power_normal_approx(delta: float, n: int, alpha: float) -> float:
    """Power of the two-sided level-alpha binomial test of p = 0.5 against
    p = 0.5 + delta, by the normal approximation."""
    if n < 1:
        raise ValueError("power_normal_approx requires n >= 1")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    z_crit = normal_quantile(1.0 - 0.5 * alpha)
    return normal_cdf(abs(delta) * math.sqrt(n) / 0.5 - z_crit)


# ---------------------------------------------------------------------------
# Logistic regression by IRLS
# ---------------------------------------------------------------------------

#: Column order of the game-outcome design matrix (reference level: greedy).
DESIGN_COLUMNS = (
    "intercept", "g1_is_H", "g1_is_C", "g2_is_H", "g2_is_C", "delta_briscola",
)


class LogisticSeparationError(RuntimeError):
    """IRLS diverged (a coefficient escaped), indicating complete separation."""


@dataclass
class LogisticFit:
    coefficients: np.ndarray
    covariance: np.ndarray
    converged: bool
    iterations: int
    log_likelihood: float
    names: Tuple[str, ...]

    @property
    def standard_errors(self) -> np.ndarray:
        return np.sqrt(np.diag(self.covariance))

    @property
    def odds_ratios(self) -> np.ndarray:
        return np.exp(self.coefficients)

    def wald_intervals(self, confidence: float = 0.95) -> Tuple[np.ndarray, np.ndarray]:
        """Odds-ratio confidence bounds exp(beta +- z * se)."""
        z = normal_quantile(0.5 * (1.0 + confidence))
        half = z * self.standard_errors
        return np.exp(self.coefficients - half), np.exp(self.coefficients + half)

    def wald_p_values(self) -> np.ndarray:
        z = np.abs(self.coefficients) / self.standard_errors
        return np.array([math.erfc(v / _SQRT2) for v in z])


def logistic_log_likelihood(X: np.ndarray, y: np.ndarray, beta: np.ndarray) -> float:
    """Bernoulli log-likelihood at ``beta`` (stable for any linear predictor)."""
    eta = X @ beta
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def _check_full_rank(X: np.ndarray, names: Sequence[str]) -> None:
    gram = X.T @ X
    eigvals, eigvecs = np.linalg.eigh(gram)
    if eigvals[0] <= eigvals[-1] * 1e-12:
        null = eigvecs[:, 0]
        involved = [names[i] for i in range(len(names)) if abs(null[i]) > 1e-3]
        raise ValueError(
            f"design matrix is rank deficient; collinear columns: {involved}"
        )


def fit_logistic(
    X: np.ndarray,
    y: np.ndarray,
    names: Optional[Sequence[str]] = None,
    *,
    max_iterations: int = 50,
    deviance_tol: float = 1e-10,
    separation_bound: float = 30.0,
) -> LogisticFit:
    """Maximum-likelihood logistic regression by IRLS.

    Starts from the zero coefficient vector and iterates Newton steps with
    weights mu * (1 - mu) until the deviance changes by less than
    ``deviance_tol`` (or ``max_iterations`` is hit).  The covariance matrix
    is the inverse Fisher information at the final coefficients.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError(f"bad shapes: X {X.shape}, y {y.shape}")
    n, p = X.shape
    if n <= p:
        raise ValueError(f"need more rows ({n}) than columns ({p})")
    col_names: Tuple[str, ...] = tuple(names) if names else tuple(
        f"x{i}" for i in range(p)
    )
    if len(col_names) != p:
        raise ValueError(f"{p} columns but {len(col_names)} names")
    _check_full_rank(X, col_names)

    beta = np.zeros(p)
    deviance = -2.0 * logistic_log_likelihood(X, y, beta)
    converged = False
    iterations = 0
    fisher = None
    for iterations in range(1, max_iterations + 1):
        eta = X @ beta
        mu = np.where(eta >= 0, 1.0 / (1.0 + np.exp(-eta)), np.exp(eta) / (1.0 + np.exp(eta)))
        weights = mu * (1.0 - mu)
        fisher = X.T @ (weights[:, None] * X)
        score = X.T @ (y - mu)
        try:
            step = np.linalg.solve(fisher, score)
        except np.linalg.LinAlgError as exc:
            raise LogisticSeparationError(
                f"singular Fisher information at iteration {iterations}"
            ) from exc
        beta = beta + step
        if np.max(np.abs(beta)) > separation_bound:
            raise LogisticSeparationError(
                f"|coefficient| exceeded {separation_bound} at iteration "
                f"{iterations}; the outcome is (quasi-)separated"
            )
        new_deviance = -2.0 * logistic_log_likelihood(X, y, beta)
        if abs(new_deviance - deviance) < deviance_tol:
            deviance = new_deviance
            converged = True
            break
        deviance = new_deviance

    eta = X @ beta
    mu = np.where(eta >= 0, 1.0 / (1.0 + np.exp(-eta)), np.exp(eta) / (1.0 + np.exp(eta)))
    weights = mu * (1.0 - mu)
    fisher = X.T @ (weights[:, None] * X)
    covariance = np.linalg.inv(fisher)
    covariance = 0.5 * (covariance + covariance.T)
    return LogisticFit(
        coefficients=beta,
        covariance=covariance,
        converged=converged,
        iterations=iterations,
        log_likelihood=-0.5 * deviance,
        names=col_names,
    )


def outcome_design_matrix(
    games: Iterable,  # GameSummary-like rows
) -> Tuple[np.ndarray, np.ndarray]:
    """Design matrix and response for the outcome regression.

    One row per non-tied game: intercept, hoarder/counter dummies for each
    seat (greedy is the reference), and the signed trump-count imbalance;
    the response is 1 when G1 wins.
    """
    rows = []
    ys = []
    for g in games:
        if g.outcome == "Tie":
            continue
        rows.append(
            (
                1.0,
                1.0 if g.strategy_g1 == "H" else 0.0,
                1.0 if g.strategy_g1 == "C" else 0.0,
                1.0 if g.strategy_g2 == "H" else 0.0,
                1.0 if g.strategy_g2 == "C" else 0.0,
                float(g.delta_briscola),
            )
        )
        ys.append(1.0 if g.outcome == "G1" else 0.0)
    if not rows:
        raise ValueError("no non-tied games to build a design matrix from")
    return np.array(rows), np.array(ys)


# ---------------------------------------------------------------------------
# Majority / folk-claim analysis
# ---------------------------------------------------------------------------


class MajorityResult(NamedTuple):
    proportion: Proportion
    wilson_95: Interval
    chisq: ChisqResult


def majority_analysis(games: Iterable) -> MajorityResult:
    """Does the trump-majority holder win?

    Restricted to games with no tie in points and no tie in trump counts;
    a success is a game whose winner also acquired the trump majority.
    Tested against p0 = 0.5 with a Yates-corrected chi-square.
    """
    k = n = 0
    for g in games:
        if g.outcome == "Tie" or g.delta_briscola == 0:
            continue
        n += 1
        if (g.delta_briscola > 0) == (g.outcome == "G1"):
            k += 1
    if n == 0:
        raise ValueError(
            "no games remain after excluding point ties and trump-count ties"
        )
    return MajorityResult(
        Proportion(k, n), wilson_interval(k, n, 0.95), chisq_yates(k, n, 0.5)
    )
