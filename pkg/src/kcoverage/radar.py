"""Bi-static radar detection probability and its coverage cost.

Single-pulse Rician detection: P_d = Q1(sqrt(2*SNR), sqrt(v_t)) with
SNR = K / (R1^2 * R2^2) and threshold v_t = -2*ln(P_fa), so that P_d -> P_fa
as SNR -> 0. Bessel and Marcum functions are evaluated in-house (series plus
asymptotics); scipy appears only in the test oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_SERIES_ASYMPTOTIC_CUTOFF = 15.0
_MARCUM_EXP_LIMIT = 600.0  # exp(-x) underflows near 745; stay clear


def _i0_series(x):
    """Sum_k (x^2/4)^k / (k!)^2, all-positive terms (x <= ~15)."""
    x = np.asarray(x, dtype=float)
    z = 0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 80):
        term = term * z / (k * k)
        total += term
        if np.all(term <= 1e-18 * total):
            break
    return total


def _iv_asymptotic_scaled(x, nu):
    """exp(-x) * I_nu(x) by the large-x expansion (x > ~15)."""
    x = np.asarray(x, dtype=float)
    fournu2 = 4.0 * nu * nu
    term = np.ones_like(x)
    total = np.ones_like(x)
    prev = np.full_like(x, np.inf)
    for k in range(30):
        term = term * (((2 * k + 1) ** 2 - fournu2) / (8.0 * (k + 1))) / x
        mag = np.abs(term)
        grow = mag >= prev  # divergent tail: stop contributing
        term = np.where(grow, 0.0, term)
        total += term
        prev = np.where(grow, prev, mag)
    return total / np.sqrt(2.0 * np.pi * x)


def bessel_i0(x):
    """Modified Bessel I0 for x >= 0 (series below 15, asymptotic above)."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if np.any(x < 0):
        raise ValueError("bessel_i0 requires x >= 0")
    out = np.empty_like(x)
    small = x <= _SERIES_ASYMPTOTIC_CUTOFF
    out[small] = _i0_series(x[small])
    if np.any(~small):
        xb = x[~small]
        out[~small] = _iv_asymptotic_scaled(xb, 0) * np.exp(xb)
    return float(out[0]) if scalar else out


def bessel_i0e(x):
    """exp(-x) * I0(x), safe for large x."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    small = x <= _SERIES_ASYMPTOTIC_CUTOFF
    out[small] = _i0_series(x[small]) * np.exp(-x[small])
    if np.any(~small):
        out[~small] = _iv_asymptotic_scaled(x[~small], 0)
    return out


def bessel_i1e(x):
    """exp(-x) * I1(x), safe for large x."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    small = x <= _SERIES_ASYMPTOTIC_CUTOFF
    xs = x[small]
    z = 0.25 * xs * xs
    term = np.full_like(xs, 0.5)
    total = term.copy()
    for k in range(1, 80):
        term = term * z / (k * (k + 1))
        total += term
        if np.all(term <= 1e-18 * np.abs(total) + 1e-300):
            break
    out[small] = xs * total * np.exp(-xs)
    if np.any(~small):
        out[~small] = _iv_asymptotic_scaled(x[~small], 1)
    return out


def marcum_q1(alpha, beta):
    """First-order Marcum Q: integral_beta^inf x I0(alpha x) e^{-(x^2+a^2)/2} dx.

    Canonical Poisson-weighted series for moderate arguments; a Gaussian
    tail approximation once either half-exponent exceeds the exp() range
    (there one argument dominates and the result is 0 or 1 to ~1e-12).
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    scalar = alpha.ndim == 0 and beta.ndim == 0
    alpha, beta = np.atleast_1d(alpha), np.atleast_1d(beta)
    alpha, beta = np.broadcast_arrays(alpha, beta)
    if np.any(alpha < 0) or np.any(beta < 0):
        raise ValueError("marcum_q1 requires nonnegative arguments")
    u = 0.5 * alpha * alpha
    v = 0.5 * beta * beta
    out = np.empty(alpha.shape, dtype=float)

    big = (u > _MARCUM_EXP_LIMIT) | (v > _MARCUM_EXP_LIMIT) | ~np.isfinite(u)
    if np.any(big):
        z = (beta[big] - alpha[big]) / math.sqrt(2.0)
        out[big] = [0.5 * math.erfc(min(t, 30.0)) if np.isfinite(t) else (1.0 if t < 0 else 0.0) for t in z]
    # widely separated arguments: |Q1 - {0,1}| <= exp(-(alpha-beta)^2/2) < 1e-31,
    # so skip the series (its length grows with alpha^2)
    sep = alpha - beta
    saturated = ~big & (sep >= 12.0)
    vanished = ~big & (sep <= -12.0)
    out[saturated] = 1.0
    out[vanished] = 0.0
    rest = ~(big | saturated | vanished)
    if np.any(rest):
        out[rest] = _marcum_series(u[rest], v[rest])
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out


def _marcum_series(u, v):
    """Q1 = sum_j Pois(j; u) * P[Pois(v) <= j], truncated by tail mass."""
    pois_u = np.exp(-u)  # Pois(j; u), starting at j = 0
    pois_v = np.exp(-v)
    cdf_v = pois_v.copy()  # P[Pois(v) <= j]
    total = pois_u * cdf_v
    acc_u = pois_u.copy()
    jmax = int(np.max(u) + 12.0 * math.sqrt(np.max(u) + 1.0) + 30.0)
    for j in range(1, jmax + 1):
        pois_u = pois_u * u / j
        pois_v = pois_v * v / j
        cdf_v = cdf_v + pois_v
        total += pois_u * cdf_v
        acc_u += pois_u
        if np.all(1.0 - acc_u <= 1e-16):
            break
    return total


@dataclass(frozen=True)
class RadarParams:
    """Bi-static radar model: SNR = power_constant / (R1^2 R2^2)."""

    power_constant: float
    false_alarm: float
    threshold: float = field(init=False)

    def __post_init__(self):
        if self.power_constant <= 0:
            raise ValueError("power_constant must be positive")
        if not 0.0 < self.false_alarm < 1.0:
            raise ValueError("false_alarm must lie in (0, 1)")
        object.__setattr__(self, "threshold", -2.0 * math.log(self.false_alarm))


def detection_probability(R1, R2, params: RadarParams):
    """Single-pulse detection probability for transmitter/receiver ranges."""
    R1 = np.asarray(R1, dtype=float)
    R2 = np.asarray(R2, dtype=float)
    scalar = R1.ndim == 0 and R2.ndim == 0
    R1, R2 = np.atleast_1d(R1), np.atleast_1d(R2)
    if np.any(R1 <= 0) or np.any(R2 <= 0):
        raise ValueError("ranges must be positive")
    with np.errstate(over="ignore", divide="ignore"):
        # (R1*R2)^2 rather than R1^2 * R2^2: commutative product keeps the
        # result bit-identical under argument swap
        snr = params.power_constant / (R1 * R2) ** 2
        alpha = np.sqrt(2.0 * snr)
    beta = math.sqrt(params.threshold)
    out = marcum_q1(alpha, np.full_like(alpha, beta))
    return float(out[0]) if scalar else out


def _detection_partial(R1, R2, params: RadarParams):
    """dP/dR1 (by symmetry dP/dR2 swaps arguments).

    Uses dQ1(a,b)/da = b * exp(-(a^2+b^2)/2) * I1(ab) and
    da/dR1 = -a/R1; the scaled Bessel keeps the product finite for large ab.
    """
    R1 = np.asarray(R1, dtype=float)
    R2 = np.asarray(R2, dtype=float)
    beta = math.sqrt(params.threshold)
    with np.errstate(over="ignore", divide="ignore"):
        snr = params.power_constant / (R1 * R1 * R2 * R2)
        alpha = np.sqrt(2.0 * snr)
        expo = np.exp(-0.5 * (alpha - beta) ** 2)
        dq_da = beta * expo * bessel_i1e(alpha * beta)
        out = -alpha / R1 * dq_da
    return np.where(np.isfinite(out), out, 0.0)


def neg_detection_cost(params: RadarParams):
    """Coverage cost f = -P(d1, d2); lazily imported to avoid a module cycle."""
    from .coverage import CostFunction  # noqa: PLC0415

    floor = 1e-12

    def value(D):
        return -detection_probability(
            np.maximum(D[:, 0], floor), np.maximum(D[:, 1], floor), params
        )

    def partial(m, D):
        r_self = np.maximum(D[:, m], floor)
        r_other = np.maximum(D[:, 1 - m], floor)
        return -_detection_partial(r_self, r_other, params)

    return CostFunction(
        name=f"neg_detection(K={params.power_constant}, pfa={params.false_alarm})",
        arity=2,
        value=value,
        partial=partial,
    )
