"""Tests for qualitative interactions between two sub-population effects.

Given asymptotically normal per-group estimates (theta_hat_1, theta_hat_2)
with standard errors, this module provides:

* the classical Gail-Simon crossover test (opposite-sign alternative);
* the relative-difference test of the bounded-ratio null
  ``max|theta| <= kappa * min|theta|`` for a pre-specified kappa > 1;
* the omnibus test whose alternative also admits same-sign pairs with one
  effect more than kappa times the other;
* local asymptotic power for both tests;
* the effect-ratio summary kappa_max: the largest kappa at which the
  relative-difference test still rejects, found by test inversion.

Every null hypothesis here is composite, so p-values are supremum p-values:
the largest tail probability of the statistic over the null region.  Each
supremum is attained either at a boundary point far from the origin (a
normal tail) or at the origin itself (a bivariate-normal tail mixture); the
reported p-value is the maximum of the two components, and both are recorded
on the result.

Conventions (uniform across the module):

* A non-positive statistic means the estimate pair sits inside (or on the
  boundary of) the null region; the p-value is then 1.
* The boundary component of the relative-difference family is the
  two-sided tail min(1, 2(1 - Phi(t))); the omnibus boundary component is
  the one-sided 1 - Phi(sqrt(t)).  The kappa_max inversion, the null
  quantiles, and the power routines all use the same conventions, so
  rejection decisions and inverted roots agree to tolerance.
* All formulas depend on (sigma_g, n_g) only through se_g = sigma_g /
  sqrt(n_g) and on scale-free ratios thereof, so the API takes per-group
  (estimate, std_error) pairs; sample sizes are carried as optional
  metadata.

All operations are pure functions; nothing retains state between calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from qualint.distributions import (
    Bracket,
    bvn_upper_tail,
    chi2_1_tail,
    find_root_monotone,
    std_normal_cdf,
    std_normal_quantile,
)

__all__ = [
    "EstimatePair",
    "KappaMaxResult",
    "LocalAlternative",
    "SubgroupEstimate",
    "TestResult",
    "gail_simon_test",
    "kappa_max",
    "omnibus_local_power",
    "omnibus_null_tail",
    "omnibus_region_contains_alternative",
    "omnibus_statistic",
    "omnibus_test",
    "pn_region_contains_alternative",
    "rd_local_power",
    "rd_null_nu",
    "rd_null_quantile",
    "rd_null_tail",
    "rd_power_approx",
    "rd_statistic",
    "rd_test",
]

# Standard errors at or below this are indistinguishable from a degenerate
# (zero-variance) estimate; every formula divides by se-derived quantities.
_SE_FLOOR = 1e-300

# kappa = 1 + _KAPPA_EPS is the probe point deciding whether any kappa > 1
# rejects; _KAPPA_CAP bounds the doubling search for inversion roots.
_KAPPA_EPS = 1e-9
_KAPPA_CAP = 1e9
_KAPPA_TOL = 1e-6

_BINDING_ROOTS = ("normal_boundary", "zero_point", "none")


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubgroupEstimate:
    """One sub-population's estimated association with its standard error.

    ``std_error`` is sigma_g / sqrt(n_g) in asymptotic terms; it must be
    finite and strictly positive (above 1e-300).  ``sample_size`` is
    optional metadata and takes no part in any formula.
    """

    estimate: float
    std_error: float
    sample_size: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "estimate", float(self.estimate))
        object.__setattr__(self, "std_error", float(self.std_error))
        if not math.isfinite(self.estimate):
            raise ValueError(f"estimate must be finite, got {self.estimate!r}")
        if not (math.isfinite(self.std_error) and self.std_error > _SE_FLOOR):
            raise ValueError(
                f"std_error must be finite and > {_SE_FLOOR:g}, got {self.std_error!r}"
            )
        if self.sample_size is not None and int(self.sample_size) < 1:
            raise ValueError(f"sample_size must be positive, got {self.sample_size!r}")


@dataclass(frozen=True)
class EstimatePair:
    """The two-group input to every test: (theta_hat_1, theta_hat_2) + SEs."""

    group1: SubgroupEstimate
    group2: SubgroupEstimate
    labels: tuple[str, str] | None = None

    def __post_init__(self) -> None:
        for g in (self.group1, self.group2):
            if not isinstance(g, SubgroupEstimate):
                raise TypeError(f"group members must be SubgroupEstimate, got {g!r}")
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != 2:
                raise ValueError("labels must hold exactly two strings")
            object.__setattr__(self, "labels", labels)


@dataclass(frozen=True)
class TestResult:
    """Outcome of one test: statistic, component tails, supremum p-value.

    Invariants: p_value equals the maximum of the recorded components, and
    rejected holds exactly when p_value < alpha.
    """

    statistic: float
    p_value: float
    components: Mapping[str, float]
    rejected: bool
    alpha: float

    __test__ = False  # keep pytest from collecting this despite the name

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", dict(self.components))
        if not self.components:
            raise ValueError("at least one tail component is required")
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p_value must be in [0, 1], got {self.p_value!r}")
        if self.p_value != max(self.components.values()):
            raise ValueError("p_value must equal the largest recorded component")
        if self.rejected != (self.p_value < self.alpha):
            raise ValueError("rejected flag inconsistent with p_value and alpha")


@dataclass(frozen=True)
class KappaMaxResult:
    """Inverted-test summary: the largest kappa at which rejection holds.

    ``binding_root`` names which tail's inversion root bound the minimum:
    ``normal_boundary`` (pi_1), ``zero_point`` (pi_2), or ``none`` when no
    kappa > 1 rejects (then kappa_max = 1 by convention).  ``roots`` holds
    (pi_1, pi_2) when a search ran; pi_2 is +inf when the zero-point tail
    never climbs back to alpha.
    """

    kappa_max: float
    alpha: float
    binding_root: str
    roots: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.binding_root not in _BINDING_ROOTS:
            raise ValueError(f"unknown binding_root {self.binding_root!r}")
        if self.binding_root == "none" and self.kappa_max != 1.0:
            raise ValueError("kappa_max must be 1 when no root binds")
        if self.roots is not None and self.kappa_max != min(self.roots):
            raise ValueError("kappa_max must equal min(roots) when roots are present")


@dataclass(frozen=True)
class LocalAlternative:
    """A sqrt(n)-scaled local alternative (c1, c2) with nuisance parameters.

    ``lam`` is the limiting fraction of observations in group 1's complement,
    i.e. lam = lim n_1 / N, so group 1's effective standard error scales with
    sqrt(1 - lam) * sigma1 and group 2's with sqrt(lam) * sigma2.  (The name
    avoids the reserved word ``lambda``.)
    """

    c1: float
    c2: float
    sigma1: float
    sigma2: float
    lam: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.c1) and math.isfinite(self.c2)):
            raise ValueError("local effects c1, c2 must be finite")
        if not (self.sigma1 > 0.0 and math.isfinite(self.sigma1)):
            raise ValueError(f"sigma1 must be positive, got {self.sigma1!r}")
        if not (self.sigma2 > 0.0 and math.isfinite(self.sigma2)):
            raise ValueError(f"sigma2 must be positive, got {self.sigma2!r}")
        if not 0.0 < self.lam < 1.0:
            raise ValueError(f"lam must lie in (0, 1), got {self.lam!r}")


# ---------------------------------------------------------------------------
# validation helpers
# ---------------------------------------------------------------------------


def _check_alpha(alpha: float, upper: float = 1.0) -> None:
    if not 0.0 < alpha < upper:
        raise ValueError(f"alpha must lie in (0, {upper:g}), got {alpha!r}")


def _check_kappa(kappa: float, minimum: float = 1.0, strict: bool = False) -> None:
    if not math.isfinite(kappa):
        raise ValueError(f"kappa must be finite, got {kappa!r}")
    if (strict and not kappa > minimum) or (not strict and not kappa >= minimum):
        op = ">" if strict else ">="
        raise ValueError(f"kappa must be {op} {minimum:g}, got {kappa!r}")


def _check_se(se: float, name: str) -> None:
    if not (math.isfinite(se) and se > _SE_FLOOR):
        raise ValueError(f"{name} must be finite and positive, got {se!r}")


def _result(statistic: float, components: dict[str, float], alpha: float) -> TestResult:
    p_value = max(components.values())
    return TestResult(
        statistic=float(statistic),
        p_value=float(p_value),
        components=components,
        rejected=bool(p_value < alpha),
        alpha=float(alpha),
    )


# ---------------------------------------------------------------------------
# crossover (positive/negative) test
# ---------------------------------------------------------------------------


def pn_region_contains_alternative(pair: EstimatePair) -> bool:
    """True iff the two estimates have strictly opposite signs.

    Zero lies in the null region, so a zero estimate never lands in the
    crossover alternative.
    """
    t1 = pair.group1.estimate
    t2 = pair.group2.estimate
    return (t1 > 0.0 and t2 < 0.0) or (t1 < 0.0 and t2 > 0.0)


def gail_simon_test(pair: EstimatePair, alpha: float) -> TestResult:
    """Crossover likelihood-ratio test (Gail & Simon).

    The statistic is the smaller squared standardized estimate when the
    signs strictly oppose, and 0 otherwise; the supremum p-value is
    (1/2) P(chi-squared_1 > t) for t > 0 and 1 at t = 0.
    """
    _check_alpha(alpha)
    if pn_region_contains_alternative(pair):
        z1 = pair.group1.estimate / pair.group1.std_error
        z2 = pair.group2.estimate / pair.group2.std_error
        statistic = min(z1 * z1, z2 * z2)
    else:
        statistic = 0.0
    p = 0.5 * chi2_1_tail(statistic) if statistic > 0.0 else 1.0
    return _result(statistic, {"half_chi2": p}, alpha)


# ---------------------------------------------------------------------------
# relative-difference test
# ---------------------------------------------------------------------------


def rd_statistic(pair: EstimatePair, kappa: float) -> float:
    """Signed root statistic for the bounded-ratio null max|th| <= kappa*min|th|.

    With theta_hat_max / theta_hat_min the larger / smaller absolute
    estimate and tau the squared standard error of the group attaining each,
    the value is (theta_hat_max - kappa*theta_hat_min) /
    sqrt(tau_max + kappa^2 * tau_min).  On exact ties |theta_hat_1| =
    |theta_hat_2| both assignments are evaluated and the smaller value is
    returned (the minimum-distance completion; deterministic even though the
    event has measure zero).
    """
    _check_kappa(kappa, minimum=1.0)
    a1 = abs(pair.group1.estimate)
    a2 = abs(pair.group2.estimate)
    v1 = pair.group1.std_error ** 2
    v2 = pair.group2.std_error ** 2
    k2 = kappa * kappa
    t_1max = (a1 - kappa * a2) / math.sqrt(v1 + k2 * v2)
    t_2max = (a2 - kappa * a1) / math.sqrt(v2 + k2 * v1)
    if a1 > a2:
        return t_1max
    if a2 > a1:
        return t_2max
    return min(t_1max, t_2max)


def rd_null_nu(kappa: float, se1: float, se2: float) -> tuple[float, float]:
    """Correlations (nu1, nu2) of the two zero-point limit pairs.

    nu1 = (se1^2 - kappa^2 se2^2) / (se1^2 + kappa^2 se2^2) and nu2 is the
    group-swapped analogue.  Only the ratio of the squared standard errors
    matters, so any common scale cancels.  For kappa > 1 at most one of the
    two can be positive.
    """
    _check_kappa(kappa, minimum=1.0)
    _check_se(se1, "se1")
    _check_se(se2, "se2")
    v1 = se1 * se1
    v2 = se2 * se2
    k2 = kappa * kappa
    nu1 = (v1 - k2 * v2) / (v1 + k2 * v2)
    nu2 = (v2 - k2 * v1) / (k2 * v1 + v2)
    clamp = lambda x: max(-1.0, min(1.0, x))
    return (clamp(nu1), clamp(nu2))


def rd_null_tail(t: float, kappa: float, se1: float, se2: float) -> float:
    """Zero-point null tail of the relative-difference statistic at t > 0.

    At the origin of the null region both absolute estimates fold, and the
    statistic's limit exceeds t exactly on four symmetric orthant events:
    the tail is 2*[P(W11>t, W12>t) + P(W21>t, W22>t)] with each pair unit
    bivariate normal and correlations from rd_null_nu.
    """
    if not t > 0.0:
        raise ValueError(f"tail characterized for t > 0 only, got t={t!r}")
    nu1, nu2 = rd_null_nu(kappa, se1, se2)
    tail = 2.0 * (bvn_upper_tail(t, t, nu1) + bvn_upper_tail(t, t, nu2))
    return min(1.0, tail)


def _rd_zero_tail_limit(kappa: float, se1: float, se2: float) -> float:
    """Continuous t -> 0+ limit of rd_null_tail: 1 + (asin nu1 + asin nu2)/pi."""
    nu1, nu2 = rd_null_nu(kappa, se1, se2)
    return min(1.0, max(0.0, 1.0 + (math.asin(nu1) + math.asin(nu2)) / math.pi))


def rd_test(pair: EstimatePair, kappa: float, alpha: float) -> TestResult:
    """Relative-difference test of max|theta| <= kappa * min|theta|.

    The supremum p-value is the larger of two components, both recorded:

    * ``normal_boundary`` - the two-sided tail min(1, 2(1 - Phi(t))) from
      null boundary points away from the origin;
    * ``zero_point`` - the folded bivariate tail from the origin
      (rd_null_tail).

    A statistic t <= 0 places the estimates inside the null region and the
    p-value is 1.
    """
    _check_kappa(kappa, minimum=1.0, strict=True)
    _check_alpha(alpha)
    t = rd_statistic(pair, kappa)
    if t <= 0.0:
        components = {"normal_boundary": 1.0, "zero_point": 1.0}
    else:
        components = {
            "normal_boundary": min(1.0, 2.0 * std_normal_cdf(-t)),
            "zero_point": rd_null_tail(
                t, kappa, pair.group1.std_error, pair.group2.std_error
            ),
        }
    return _result(t, components, alpha)


def _rd_zero_point_quantile(
    kappa: float, se1: float, se2: float, alpha: float
) -> float:
    """Root of rd_null_tail(q) = alpha, or 0.0 when the t->0+ mass is <= alpha.

    The zero-point tail is strictly decreasing in t, so the root is unique
    whenever the limiting mass at the origin exceeds alpha.
    """
    f = lambda q: rd_null_tail(q, kappa, se1, se2) - alpha
    lo = 1e-12
    if f(lo) <= 0.0:
        return 0.0
    hi = 1.0
    while f(hi) > 0.0:
        lo = hi
        hi *= 2.0
        if hi > 1e9:  # pragma: no cover - tail decays like a Gaussian
            raise ArithmeticError("zero-point quantile search failed to bracket")
    return find_root_monotone(f, Bracket.from_function(f, lo, hi), tol=1e-10)


def rd_null_quantile(kappa: float, se1: float, se2: float, alpha: float) -> float:
    """1 - alpha null quantile of the relative-difference statistic.

    The maximum of the two component quantiles: the two-sided normal point
    Phi^{-1}(1 - alpha/2) and the root of the zero-point tail at alpha.  The
    result never falls below the normal point.
    """
    _check_kappa(kappa, minimum=1.0, strict=True)
    _check_alpha(alpha, upper=0.5)
    z = std_normal_quantile(1.0 - alpha / 2.0)
    q = _rd_zero_point_quantile(kappa, se1, se2, alpha)
    return max(z, q)


def _rd_power_from_se(
    theta1: float,
    theta2: float,
    se1: float,
    se2: float,
    kappa: float,
    alpha: float,
) -> float:
    """Four-orthant rejection probability of the relative-difference test.

    Under an alternative with true effects (theta1, theta2) and per-group
    standard errors, the statistic exceeds the null quantile t* exactly when
    one of four bivariate-normal pairs lands beyond (t*, t*) or beyond
    (-t*, -t*); the lower quadrants reduce to upper tails with negated
    means.
    """
    t_star = rd_null_quantile(kappa, se1, se2, alpha)
    v1 = se1 * se1
    v2 = se2 * se2
    k2 = kappa * kappa
    d1 = math.sqrt(v1 + k2 * v2)
    d2 = math.sqrt(k2 * v1 + v2)
    c11 = (theta1 - kappa * theta2) / d1
    c12 = (theta1 + kappa * theta2) / d1
    c21 = (theta2 - kappa * theta1) / d2
    c22 = (theta2 + kappa * theta1) / d2
    nu1, nu2 = rd_null_nu(kappa, se1, se2)
    power = (
        bvn_upper_tail(t_star - c11, t_star - c12, nu1)
        + bvn_upper_tail(t_star + c11, t_star + c12, nu1)
        + bvn_upper_tail(t_star - c21, t_star - c22, nu2)
        + bvn_upper_tail(t_star + c21, t_star + c22, nu2)
    )
    return min(1.0, power)


def rd_local_power(alt: LocalAlternative, kappa: float, alpha: float) -> float:
    """Local asymptotic power of the relative-difference test at (c1, c2).

    The sqrt(n)-scaled alternative enters only through the effective
    quantities sqrt(1-lam)*c1, sqrt(lam)*c2 and matching effective standard
    errors, so this delegates to the same shifted-orthant sum used by
    rd_power_approx.
    """
    _check_kappa(kappa, minimum=1.0, strict=True)
    _check_alpha(alpha, upper=0.5)
    w1 = math.sqrt(1.0 - alt.lam)
    w2 = math.sqrt(alt.lam)
    return _rd_power_from_se(
        w1 * alt.c1, w2 * alt.c2, w1 * alt.sigma1, w2 * alt.sigma2, kappa, alpha
    )


def rd_power_approx(pair_truth: EstimatePair, kappa: float, alpha: float) -> float:
    """Finite-sample power approximation at true effects held in ``pair_truth``.

    The estimate slots carry the *true* per-group effects and the std_error
    slots their anticipated standard errors; scaling all four numbers by a
    common positive constant leaves the result unchanged.
    """
    _check_kappa(kappa, minimum=1.0, strict=True)
    _check_alpha(alpha, upper=0.5)
    return _rd_power_from_se(
        pair_truth.group1.estimate,
        pair_truth.group2.estimate,
        pair_truth.group1.std_error,
        pair_truth.group2.std_error,
        kappa,
        alpha,
    )


# ---------------------------------------------------------------------------
# omnibus test (crossover or bounded-ratio violation)
# ---------------------------------------------------------------------------


def omnibus_region_contains_alternative(pair: EstimatePair, kappa: float) -> bool:
    """True iff the estimates land in the omnibus alternative region.

    The region unions four cones: the larger effect is positive and more
    than kappa times the other, or negative and more than kappa times in the
    negative direction, for either group.  Opposite-sign pairs always
    qualify.
    """
    _check_kappa(kappa, minimum=1.0)
    t1 = pair.group1.estimate
    t2 = pair.group2.estimate
    return (
        (t1 > kappa * t2 and t1 > 0.0)
        or (-t1 > -kappa * t2 and t1 < 0.0)
        or (t2 > kappa * t1 and t2 > 0.0)
        or (-t2 > -kappa * t1 and t2 < 0.0)
    )


def omnibus_statistic(pair: EstimatePair, kappa: float) -> float:
    """Omnibus likelihood-ratio statistic.

    min{ (th1 - kappa*th2)^2 / (se1^2 + kappa^2 se2^2),
         (kappa*th1 - th2)^2 / (kappa^2 se1^2 + se2^2) } inside the
    alternative region, 0 outside.
    """
    _check_kappa(kappa, minimum=1.0)
    if not omnibus_region_contains_alternative(pair, kappa):
        return 0.0
    t1 = pair.group1.estimate
    t2 = pair.group2.estimate
    v1 = pair.group1.std_error ** 2
    v2 = pair.group2.std_error ** 2
    k2 = kappa * kappa
    q1 = (t1 - kappa * t2) ** 2 / (v1 + k2 * v2)
    q2 = (kappa * t1 - t2) ** 2 / (k2 * v1 + v2)
    return min(q1, q2)


def _omnibus_nu(kappa: float, se1: float, se2: float) -> float:
    """Correlation of the omnibus zero-point limit pair; always in (0, 1]."""
    v1 = se1 * se1
    v2 = se2 * se2
    k2 = kappa * kappa
    nu = kappa * (v1 + v2) / math.sqrt((v1 + k2 * v2) * (k2 * v1 + v2))
    return max(0.0, min(1.0, nu))


def omnibus_null_tail(t: float, kappa: float, se1: float, se2: float) -> float:
    """Zero-point null tail of the omnibus statistic at t > 0.

    2 * P(V1 > sqrt(t), V2 > sqrt(t)) for a unit bivariate normal pair with
    correlation kappa (se1^2 + se2^2) / sqrt((se1^2 + kappa^2 se2^2)
    (kappa^2 se1^2 + se2^2)).  At kappa = 1 the correlation degenerates to 1
    and the tail collapses to the chi-squared_1 tail.
    """
    if not t > 0.0:
        raise ValueError(f"tail characterized for t > 0 only, got t={t!r}")
    _check_kappa(kappa, minimum=1.0)
    _check_se(se1, "se1")
    _check_se(se2, "se2")
    s = math.sqrt(t)
    nu = _omnibus_nu(kappa, se1, se2)
    return min(1.0, 2.0 * bvn_upper_tail(s, s, nu))


def omnibus_test(pair: EstimatePair, kappa: float, alpha: float) -> TestResult:
    """Omnibus test: crossover or same-sign ratio beyond kappa.

    Components recorded on the result:

    * ``normal_boundary`` - the boundary tail (1/2) P(chi-squared_1 > t)
      = 1 - Phi(sqrt(t)), the supremum over non-origin null points;
    * ``zero_point`` - omnibus_null_tail(t).

    A zero statistic (estimates outside the alternative region) yields
    p-value 1.  For very large kappa the p-value converges to the
    Gail-Simon p-value.
    """
    _check_kappa(kappa, minimum=1.0, strict=True)
    _check_alpha(alpha)
    t = omnibus_statistic(pair, kappa)
    if t <= 0.0:
        components = {"normal_boundary": 1.0, "zero_point": 1.0}
    else:
        components = {
            "normal_boundary": 0.5 * chi2_1_tail(t),
            "zero_point": omnibus_null_tail(
                t, kappa, pair.group1.std_error, pair.group2.std_error
            ),
        }
    return _result(t, components, alpha)


def _omnibus_zero_point_quantile(
    kappa: float, se1: float, se2: float, alpha: float
) -> float:
    """Root s of 2 P(V1>s, V2>s) = alpha on the sqrt-statistic scale.

    The limit as s -> 0+ is 1/2 + asin(nu)/pi > 1/2 > alpha, so a positive
    root always exists.
    """
    nu = _omnibus_nu(kappa, se1, se2)
    f = lambda s: 2.0 * bvn_upper_tail(s, s, nu) - alpha
    lo = 1e-12
    if f(lo) <= 0.0:  # pragma: no cover - the s -> 0+ mass is always > 1/2
        return 0.0
    hi = 1.0
    while f(hi) > 0.0:
        lo = hi
        hi *= 2.0
        if hi > 1e9:  # pragma: no cover - tail decays like a Gaussian
            raise ArithmeticError("zero-point quantile search failed to bracket")
    return find_root_monotone(f, Bracket.from_function(f, lo, hi), tol=1e-10)


def omnibus_local_power(alt: LocalAlternative, kappa: float, alpha: float) -> float:
    """Local asymptotic power of the omnibus test at (c1, c2).

    The rejection threshold on the sqrt-statistic scale is the larger of the
    one-sided normal point Phi^{-1}(1 - alpha) and the zero-point root; the
    power is the two-term shifted orthant sum P(V1>s*, V2>s*) +
    P(V1<-s*, V2<-s*).
    """
    _check_kappa(kappa, minimum=1.0, strict=True)
    _check_alpha(alpha, upper=0.5)
    w1 = math.sqrt(1.0 - alt.lam)
    w2 = math.sqrt(alt.lam)
    th1 = w1 * alt.c1
    th2 = w2 * alt.c2
    se1 = w1 * alt.sigma1
    se2 = w2 * alt.sigma2
    v1 = se1 * se1
    v2 = se2 * se2
    k2 = kappa * kappa
    s_star = max(
        std_normal_quantile(1.0 - alpha),
        _omnibus_zero_point_quantile(kappa, se1, se2, alpha),
    )
    nu = _omnibus_nu(kappa, se1, se2)
    c1 = (th1 - kappa * th2) / math.sqrt(v1 + k2 * v2)
    c2 = (kappa * th1 - th2) / math.sqrt(k2 * v1 + v2)
    power = bvn_upper_tail(s_star - c1, s_star - c2, nu) + bvn_upper_tail(
        s_star + c1, s_star + c2, nu
    )
    return min(1.0, power)


# ---------------------------------------------------------------------------
# kappa_max inversion
# ---------------------------------------------------------------------------


def _first_crossing_root(f, lo: float, f_lo: float, tol: float) -> float:
    """First root of f past lo, with f(lo) < 0, by doubling then Brent.

    The upper bracket starts at 2 and doubles until f changes sign; returns
    +inf when no crossing appears by the cap (the objective stays below
    zero for every reachable kappa).
    """
    prev, f_prev = lo, f_lo
    hi = 2.0
    while hi <= _KAPPA_CAP:
        f_hi = f(hi)
        if f_hi == 0.0:
            return hi
        if f_hi > 0.0:
            return find_root_monotone(
                f, Bracket(prev, hi, f_prev, f_hi), tol=tol
            )
        prev, f_prev = hi, f_hi
        hi *= 2.0
    return math.inf


def kappa_max(pair: EstimatePair, alpha: float) -> KappaMaxResult:
    """Largest kappa > 1 at which the relative-difference test rejects.

    Test inversion: the rejection set in kappa is the interval up to the
    smaller of two roots - pi_1 where the two-sided boundary tail climbs to
    alpha, and pi_2 where the zero-point tail does.  When even kappa = 1 +
    1e-9 fails to reject, kappa_max is 1 by convention and no root binds.
    Roots are located by doubling the upper bracket from 2 (cap 1e9) and
    Brent refinement to 1e-6 in kappa; a pi_2 that never crosses is
    reported as +inf (the zero-point tail sinks with growing kappa and can
    stay below alpha forever).
    """
    _check_alpha(alpha, upper=0.5)
    lo = 1.0 + _KAPPA_EPS
    probe = rd_test(pair, lo, alpha)
    if probe.p_value >= alpha:
        return KappaMaxResult(kappa_max=1.0, alpha=alpha, binding_root="none")

    se1 = pair.group1.std_error
    se2 = pair.group2.std_error

    def boundary_objective(kappa: float) -> float:
        t = rd_statistic(pair, kappa)
        return min(1.0, 2.0 * std_normal_cdf(-t)) - alpha

    def zero_point_objective(kappa: float) -> float:
        t = rd_statistic(pair, kappa)
        if t <= 0.0:
            tail = _rd_zero_tail_limit(kappa, se1, se2)
        else:
            tail = rd_null_tail(t, kappa, se1, se2)
        return tail - alpha

    pi1 = _first_crossing_root(
        boundary_objective, lo, probe.components["normal_boundary"] - alpha, _KAPPA_TOL
    )
    if math.isinf(pi1):
        raise ArithmeticError(
            "kappa_max: boundary tail never reached alpha below the 1e9 cap "
            f"(estimates {pair.group1.estimate!r}, {pair.group2.estimate!r}; "
            f"alpha={alpha!r})"
        )
    pi2 = _first_crossing_root(
        zero_point_objective, lo, probe.components["zero_point"] - alpha, _KAPPA_TOL
    )
    binding = "normal_boundary" if pi1 <= pi2 else "zero_point"
    return KappaMaxResult(
        kappa_max=min(pi1, pi2), alpha=alpha, binding_root=binding, roots=(pi1, pi2)
    )
