"""Regularized incomplete beta and the t / F distribution functions built on it."""

from __future__ import annotations

import math

from ..errors import DomainError

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10000


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for I_x(a, b), modified Lentz evaluation."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise DomainError(f"incomplete beta continued fraction did not converge for a={a}, b={b}, x={x}")


def _check_shape(a: float, b: float) -> None:
    if not (a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"beta shapes must be finite and positive, got a={a}, b={b}")


def _ibeta(a: float, b: float, x: float, y: float) -> float:
    """I_x(a, b) given both x and y = 1 - x, so callers can pass an accurate
    complement when x is close to 1."""
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    log_front = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log(y)
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, y) / b


def reg_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) = B(x; a, b) / B(a, b), for a, b > 0 and 0 <= x <= 1."""
    _check_shape(a, b)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    return min(1.0, max(0.0, _ibeta(a, b, x, 1.0 - x)))


def t_cdf(t: float, df: float) -> float:
    """Student-t cumulative distribution function."""
    if not (df > 0) or math.isnan(t):
        raise DomainError(f"t_cdf needs df > 0 and a numeric t, got t={t}, df={df}")
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    if math.isinf(df):
        return 0.5 * math.erfc(-t / math.sqrt(2.0))
    t2 = t * t
    denom = df + t2
    tail = 0.5 * _ibeta(0.5 * df, 0.5, df / denom, t2 / denom)
    return tail if t < 0 else 1.0 - tail


def t_sf(t: float, df: float) -> float:
    return t_cdf(-t, df)


def f_sf(f: float, df1: float, df2: float) -> float:
    """Upper tail P(F > f) of the F distribution."""
    if not (df1 > 0 and df2 > 0):
        raise DomainError(f"f_sf needs df1, df2 > 0, got df1={df1}, df2={df2}")
    if not f >= 0:
        raise DomainError(f"f_sf needs f >= 0, got {f}")
    if f == 0:
        return 1.0
    if math.isinf(f):
        return 0.0
    denom = df2 + df1 * f
    return min(1.0, max(0.0, _ibeta(0.5 * df2, 0.5 * df1, df2 / denom, df1 * f / denom)))


def f_cdf(f: float, df1: float, df2: float) -> float:
    return 1.0 - f_sf(f, df1, df2)
