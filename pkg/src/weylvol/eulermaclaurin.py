"""Euler-Maclaurin summation with remainder bounds.

Bernoulli numbers follow the Todd-series convention
``x / (1 - e^{-x}) = sum_q (-1)^q B_q x^q / q!``, which gives ``B_1 = -1/2``.

The expansions here use the endpoint-inclusive form

    sum_{x=0}^{n} f(x) = int_0^n f + (f(0) + f(n)) / 2
                         + sum_{q=2}^{N} B_q / q! (f^{(q-1)}(n) - f^{(q-1)}(0)) + R_N,

and its ``n -> infinity`` limit with ``-B_q / q! f^{(q-1)}(0)`` terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import mpmath
import numpy as np

__all__ = [
    "EMExpansion",
    "SmoothFn",
    "bernoulli",
    "remainder_coefficient",
    "em_finite",
    "em_infinite",
    "td_operator_form",
    "polynomial",
    "exponential",
    "gaussian_poly",
    "zero_fn",
    "gaussian_moments",
    "lemma1_integral",
    "lemma1_sum",
    "lemma1_sum_hp",
    "lemma1_residuals",
    "lemma1_residual_slope",
]


@dataclass(frozen=True)
class EMExpansion:
    integral: float | Fraction
    corrections: list = field(default_factory=list)
    remainder_bound: float = 0.0

    @property
    def value(self):
        return self.integral + sum(self.corrections)


@dataclass(frozen=True)
class SmoothFn:
    """A function on ``[0, inf)`` with exact derivative and integral evaluators.

    ``derivative(q, x)`` returns ``f^{(q)}(x)`` (``q = 0`` is the value).
    ``integral(a, b)`` may receive ``b = math.inf``. ``abs_derivative_integral``
    returns an upper bound on ``int_a^b |f^{(N)}|``.
    """

    derivative: Callable
    integral: Callable
    abs_derivative_integral: Callable

    def __call__(self, x):
        return self.derivative(0, x)


@lru_cache(maxsize=None)
def _bernoulli_table(upto: int) -> tuple[Fraction, ...]:
    table = [Fraction(1)]
    for n in range(1, upto + 1):
        acc = sum((math.comb(n + 1, k) * table[k] for k in range(n)), Fraction(0))
        table.append(-acc / (n + 1))
    return tuple(table)


def bernoulli(q: int) -> Fraction:
    if q < 0:
        raise ValueError("Bernoulli index must be nonnegative")
    return _bernoulli_table(max(q, 16))[q]


@lru_cache(maxsize=None)
def remainder_coefficient(order: int) -> float:
    """Sup-norm of the periodic Bernoulli kernel ``|B_N({x})| / N!``.

    ``1/2`` for ``N = 1`` (zeta(1) diverges), else ``2 zeta(N) / (2 pi)^N``.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if order == 1:
        return 0.5
    return 2.0 * float(mpmath.zeta(order)) / (2.0 * math.pi) ** order


def _check_order(order: int) -> None:
    if order < 1:
        raise ValueError("Euler-Maclaurin order must be >= 1")


def _bound(order: int, mass) -> float:
    if mass == 0:
        return 0.0
    bound = remainder_coefficient(order) * float(mass)
    if not math.isfinite(bound):
        raise ValueError(f"derivative integral bound is not finite: {mass}")
    return bound


def em_finite(f: SmoothFn, n: int, order: int) -> EMExpansion:
    """Expand ``sum_{x=0}^{n} f(x)``. Exact if ``f`` returns Fractions."""
    _check_order(order)
    if n < 0:
        raise ValueError("n must be nonnegative")
    corrections = [(f.derivative(0, 0) + f.derivative(0, n)) / 2]
    for q in range(2, order + 1):
        b = bernoulli(q)
        if b:
            coeff = (-1) ** q * b / math.factorial(q)
            corrections.append(coeff * (f.derivative(q - 1, n) - f.derivative(q - 1, 0)))
        else:
            corrections.append(0)
    return EMExpansion(f.integral(0, n), corrections, _bound(order, f.abs_derivative_integral(order, 0, n)))


def em_infinite(f: SmoothFn, order: int) -> EMExpansion:
    """Expand ``sum_{x=0}^{inf} f(x)``; ``f`` and its derivatives must vanish at infinity."""
    _check_order(order)
    mass = f.abs_derivative_integral(order, 0, math.inf)
    if not math.isfinite(float(mass)):
        raise ValueError("derivative integral must be finite for the infinite form")
    corrections = [f.derivative(0, 0) / 2]
    for q in range(2, order + 1):
        b = bernoulli(q)
        corrections.append(-b / math.factorial(q) * f.derivative(q - 1, 0) if b else 0)
    return EMExpansion(f.integral(0, math.inf), corrections, _bound(order, mass))


def td_operator_form(f: SmoothFn, order: int):
    """Truncated ``Td(d/dh)|_{h=0} int_{-h}^inf f``.

    ``d^q/dh^q int_{-h}^inf f = (-1)^{q-1} f^{(q-1)}(-h)`` for ``q >= 1``.
    """
    total = f.integral(0, math.inf)
    for q in range(1, order + 1):
        b = bernoulli(q)
        if b:
            total += (-1) ** q * b / math.factorial(q) * (-1) ** (q - 1) * f.derivative(q - 1, 0)
    return total


# -- concrete functions ------------------------------------------------------


def zero_fn() -> SmoothFn:
    return SmoothFn(lambda q, x: 0, lambda a, b: 0, lambda order, a, b: 0)


def polynomial(coeffs: Sequence) -> SmoothFn:
    """``sum_k coeffs[k] x^k`` with exact rational arithmetic."""
    base = [Fraction(c) for c in coeffs]

    def deriv_coeffs(q):
        c = base
        for _ in range(q):
            c = [k * c[k] for k in range(1, len(c))]
        return c

    def derivative(q, x):
        x = Fraction(x)
        return sum((c * x**k for k, c in enumerate(deriv_coeffs(q))), Fraction(0))

    def integral(a, b):
        if math.isinf(b):
            raise ValueError("polynomials are not integrable on [0, inf)")
        a, b = Fraction(a), Fraction(b)
        return sum((c * (b ** (k + 1) - a ** (k + 1)) / (k + 1) for k, c in enumerate(base)), Fraction(0))

    def abs_derivative_integral(order, a, b):
        c = deriv_coeffs(order)
        if not any(c):
            return 0
        if math.isinf(b):
            return math.inf
        if a < 0:
            raise ValueError("bound assumes a >= 0")
        a, b = Fraction(a), Fraction(b)
        return sum((abs(ck) * (b ** (k + 1) - a ** (k + 1)) / (k + 1) for k, ck in enumerate(c)), Fraction(0))

    return SmoothFn(derivative, integral, abs_derivative_integral)


def exponential(rate: float) -> SmoothFn:
    """``e^{-rate x}`` for ``rate > 0``."""
    if rate <= 0:
        raise ValueError("rate must be positive")

    def tail(a, b):
        hi = 0.0 if math.isinf(b) else math.exp(-rate * b)
        return (math.exp(-rate * a) - hi) / rate

    return SmoothFn(
        lambda q, x: (-rate) ** q * math.exp(-rate * x),
        tail,
        lambda order, a, b: rate**order * tail(a, b),
    )


def gaussian_moments(a, b, kmax: int, dps: int = 30) -> list:
    """``int_0^inf x^k e^{-a x^2 - b x} dx`` for ``k = 0..kmax`` as mpmath numbers.

    Integration by parts gives ``2a I_{k+1} = k I_{k-1} - b I_k`` and
    ``2a I_1 = 1 - b I_0``; the working precision absorbs the cancellation.
    """
    with mpmath.workdps(dps + 20):
        a, b = mpmath.mpf(a), mpmath.mpf(b)
        z = b / (2 * mpmath.sqrt(a))
        i0 = mpmath.sqrt(mpmath.pi / a) / 2 * mpmath.exp(z * z) * mpmath.erfc(z)
        out = [i0]
        if kmax >= 1:
            out.append((1 - b * i0) / (2 * a))
        for k in range(1, kmax):
            out.append((k * out[k - 1] - b * out[k]) / (2 * a))
        return [+x for x in out]


def gaussian_poly(A: float, B: float, m: int, t: float) -> SmoothFn:
    """``f_t(x) = x^{2m} exp(-t (A x^2 + B x))``.

    Derivatives come from ``f^{(q)} = p_q e^g`` with ``p_{q+1} = p_q' + p_q g'``.
    """
    if A <= 0 or t <= 0:
        raise ValueError("need A > 0 and t > 0")
    g = np.polynomial.Polynomial([0.0, -t * B, -t * A])
    dg = g.deriv()
    polys = [np.polynomial.Polynomial([0.0] * (2 * m) + [1.0])]

    def poly(q):
        while len(polys) <= q:
            p = polys[-1]
            polys.append(p.deriv() + p * dg)
        return polys[q]

    def derivative(q, x):
        return float(poly(q)(x)) * math.exp(float(g(x)))

    def integral(a, b):
        if a != 0 or not math.isinf(b):
            raise ValueError("only the integral over [0, inf) is available")
        return lemma1_integral(A, B, m, t)

    def abs_derivative_integral(order, a, b):
        if a < 0:
            raise ValueError("bound assumes a >= 0")
        coef = np.abs(poly(order).coef)
        moments = gaussian_moments(t * A, t * B, len(coef) - 1)
        # [a, b] is inside [0, inf) and the integrand is nonnegative
        return float(sum(c * mk for c, mk in zip(coef, moments)))

    return SmoothFn(derivative, integral, abs_derivative_integral)


# -- the Gaussian-polynomial sums --------------------------------------------


def lemma1_integral(A: float, B: float, m: int, t: float, dps: int | None = None):
    """``int_0^inf x^{2m} e^{-t(Ax^2+Bx)} dx``; float unless ``dps`` is given."""
    val = gaussian_moments(t * A, t * B, 2 * m, dps or 30)[2 * m]
    return val if dps else float(val)


def _peak(A, B, m, t) -> float:
    x = (-t * B + math.sqrt(t * t * B * B + 16 * t * A * m)) / (4 * t * A)
    return max(x, -B / (2 * A), 0.0)


def lemma1_sum(A: float, B: float, m: int, t: float) -> float:
    """``S(t) = sum_{x>=0} x^{2m} e^{-t(Ax^2+Bx)}`` by direct summation.

    Stops past the peak once a term drops below ``1e-18`` of the partial sum,
    and never before ``10 / sqrt(t A)`` terms.
    """
    if A <= 0 or t <= 0:
        raise ValueError("need A > 0 and t > 0")
    floor = 10.0 / math.sqrt(t * A)
    peak = _peak(A, B, m, t)
    terms = []
    x = 0
    while True:
        term = float(x) ** (2 * m) * math.exp(-t * (A * x * x + B * x))
        terms.append(term)
        if x >= floor and x > peak:
            partial = math.fsum(terms)
            if term < 1e-18 * partial or partial == 0.0:
                return partial
        x += 1


def lemma1_sum_hp(A, B, m: int, t, dps: int = 50):
    """High-precision counterpart of :func:`lemma1_sum` (mpmath, ``dps`` digits)."""
    with mpmath.workdps(dps + 10):
        A_, B_, t_ = mpmath.mpf(A), mpmath.mpf(B), mpmath.mpf(t)
        floor = 10.0 / math.sqrt(float(t) * float(A))
        peak = _peak(float(A), float(B), m, float(t))
        eps = mpmath.mpf(10) ** (-(dps + 5))
        total = mpmath.mpf(0)
        x = 0
        while True:
            xm = mpmath.mpf(x)
            term = xm ** (2 * m) * mpmath.exp(-t_ * (A_ * xm * xm + B_ * xm))
            total += term
            if x >= floor and x > peak and (term < eps * total or total == 0):
                return +total
            x += 1


def _check_grid(t_grid) -> list[float]:
    grid = [float(t) for t in t_grid]
    if len(grid) < 6:
        raise ValueError("t grid needs at least 6 points")
    if any(t <= 0 for t in grid) or any(b >= a for a, b in zip(grid, grid[1:])):
        raise ValueError("t grid must be positive and strictly decreasing")
    return grid


def lemma1_residuals(A, B, m: int, t_grid, dps: int = 50) -> list[float]:
    """``t^{m+1/2} |S(t) - int_0^inf f_t|`` per grid point, 0.0 where below the noise floor."""
    out = []
    for t in _check_grid(t_grid):
        with mpmath.workdps(dps):
            s = lemma1_sum_hp(A, B, m, t, dps)
            i = lemma1_integral(A, B, m, t, dps)
            diff = abs(s - i)
            if diff <= mpmath.mpf(10) ** (-(dps - 10)) * max(abs(s), 1):
                out.append(0.0)
            else:
                out.append(float(mpmath.mpf(t) ** (m + mpmath.mpf(1) / 2) * diff))
    return out


def lemma1_residual_slope(A, B, m: int, t_grid, dps: int = 50) -> float:
    """Log-log slope of the scaled Euler-Maclaurin residual against ``t``.

    Returns ``math.inf`` when fewer than three residuals rise above the
    working-precision noise floor (the residual decays faster than any power).
    """
    grid = _check_grid(t_grid)
    res = lemma1_residuals(A, B, m, grid, dps)
    pts = [(math.log(t), math.log(r)) for t, r in zip(grid, res) if r > 0]
    if len(pts) < 3:
        return math.inf
    x, y = np.array(pts).T
    return float(np.polyfit(x, y, 1)[0])
