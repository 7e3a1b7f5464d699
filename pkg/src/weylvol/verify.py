"""End-to-end checks: Weyl's law against the closed-form volumes, and regression suites."""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from . import eulermaclaurin as em
from .heattrace import (
    DEFAULT_MAX_TERMS,
    HeatTraceSample,
    closed_form_I,
    gaussian_moment_I,
    heat_trace,
    samples_to_csv,
    worker_count,
)
from .rootsys import RootSystem
from .volume import flag_volume, group_volume, torus_volume

__all__ = [
    "WeylLawReport",
    "default_t_grid",
    "log_grid",
    "spectral_volume",
    "weyl_law_check",
    "spectral_harish_chandra",
    "integration_formula_check",
    "em_regression_suite",
    "LEMMA1_CASES",
    "LEMMA1_GRID",
]

# implementer calibration for the O(t) exponent
SLOPE_WINDOW = (0.8, 1.2)
LEMMA1_CASES = ((0, 1.0, 0.0), (1, 1.0, 0.0), (0, 1.0, 1.0), (2, 2.0, 1.0))
LEMMA1_MIN_SLOPE = 0.45

_GRID_BY_RANK = {1: (0.05, 0.002), 2: (0.05, 0.005), 3: (0.05, 0.01), 4: (0.05, 0.02)}


def log_grid(start: float, stop: float, points: int) -> list[float]:
    if not start > stop > 0:
        raise ValueError("need start > stop > 0")
    if points < 2:
        raise ValueError("need at least 2 points")
    return [float(v) for v in np.geomspace(start, stop, points)]


LEMMA1_GRID = tuple(log_grid(1e-2, 1e-4, 8))


def default_t_grid(rs: RootSystem, points: int = 8) -> list[float]:
    """Log-spaced grid sized so every sample stays well under 10^7 lattice terms."""
    start, stop = _GRID_BY_RANK.get(rs.r, (0.1, 0.03))
    return log_grid(start, stop, points)


def _check_grid(t_grid) -> list[float]:
    grid = [float(t) for t in t_grid]
    if len(grid) < 6:
        raise ValueError("Weyl-law fits need at least 6 grid points")
    if any(not 0 < t < 1 for t in grid):
        raise ValueError("grid points must lie in (0, 1)")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly decreasing")
    return grid


@dataclass
class WeylLawReport:
    group: str
    t_grid: list
    samples: list
    extrapolated_volume: float
    quadratic_extrapolated_volume: float
    fit_slope_loglog: float
    formula_volume: float
    rel_error: float
    spectral_flag_volume: float
    formula_flag_volume: float

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "t_grid": list(self.t_grid),
            "samples": [s.to_dict() for s in self.samples],
            "extrapolated_volume": self.extrapolated_volume,
            "formula_volume": self.formula_volume,
            "rel_error": self.rel_error,
            "slope": self.fit_slope_loglog,
            "spectral_flag_volume": self.spectral_flag_volume,
            "formula_flag_volume": self.formula_flag_volume,
            "quadratic_extrapolated_volume": self.quadratic_extrapolated_volume,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        return samples_to_csv(self.samples)

    @classmethod
    def from_dict(cls, doc: dict) -> "WeylLawReport":
        return cls(
            group=doc["group"],
            t_grid=list(doc["t_grid"]),
            samples=[HeatTraceSample.from_dict(s) for s in doc["samples"]],
            extrapolated_volume=doc["extrapolated_volume"],
            quadratic_extrapolated_volume=doc["quadratic_extrapolated_volume"],
            fit_slope_loglog=doc["slope"],
            formula_volume=doc["formula_volume"],
            rel_error=doc["rel_error"],
            spectral_flag_volume=doc["spectral_flag_volume"],
            formula_flag_volume=doc["formula_flag_volume"],
        )

    def passed(self, max_rel_error: float = 1e-2) -> bool:
        lo, hi = SLOPE_WINDOW
        return self.rel_error < max_rel_error and lo <= self.fit_slope_loglog <= hi


def spectral_volume(rs: RootSystem, t_grid, rel_tol: float = 1e-9, *, threads=None, max_terms=DEFAULT_MAX_TERMS):
    """Extrapolate ``(4 pi t)^{n/2} Z(t)`` to ``t = 0`` from spectral data alone.

    Returns ``(samples, affine_intercept, quadratic_intercept)``.
    """
    grid = _check_grid(t_grid)
    workers = worker_count(threads)

    def one(t):
        return heat_trace(rs, t, rel_tol, max_terms=max_terms, threads=1)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(one, grid))
    else:
        samples = [one(t) for t in grid]
    ts = np.array(grid)
    scaled = np.array([s.scaled for s in samples])
    affine = float(np.polyfit(ts, scaled, 1)[1])
    quadratic = float(np.polyfit(ts, scaled, 2)[2])
    return samples, affine, quadratic


def weyl_law_check(rs: RootSystem, t_grid=None, rel_tol: float = 1e-9, *, threads=None, max_terms=DEFAULT_MAX_TERMS) -> WeylLawReport:
    grid = _check_grid(default_t_grid(rs) if t_grid is None else t_grid)
    samples, extrapolated, quadratic = spectral_volume(rs, grid, rel_tol, threads=threads, max_terms=max_terms)
    spectral_flag = extrapolated / torus_volume(rs)
    formula = group_volume(rs)
    deviation = np.abs(np.array([s.scaled for s in samples]) - formula)
    if np.all(deviation > 0):
        slope = float(np.polyfit(np.log(grid), np.log(deviation), 1)[0])
    else:
        slope = math.nan
    return WeylLawReport(
        group=rs.label,
        t_grid=grid,
        samples=samples,
        extrapolated_volume=extrapolated,
        quadratic_extrapolated_volume=quadratic,
        fit_slope_loglog=slope,
        formula_volume=formula,
        rel_error=abs(extrapolated - formula) / formula,
        spectral_flag_volume=spectral_flag,
        formula_flag_volume=flag_volume(rs),
    )


def spectral_harish_chandra(rs: RootSystem, t_grid=None, rel_tol: float = 1e-9, *, threads=None):
    """``(spectral vol(G/T), closed-form vol(G/T), relative error)``.

    The spectral value uses only the heat trace and the torus volume.
    """
    grid = default_t_grid(rs) if t_grid is None else t_grid
    _, extrapolated, _ = spectral_volume(rs, grid, rel_tol, threads=threads)
    spectral = extrapolated / torus_volume(rs)
    formula = flag_volume(rs)
    return spectral, formula, abs(spectral - formula) / formula


def integration_formula_check(rs: RootSystem, t: float = 1.0) -> float:
    """Relative gap between the exact-moment integral and the closed form."""
    ref = closed_form_I(rs, t)
    return abs(gaussian_moment_I(rs, t) - ref) / ref


def _entry(name, passed, value, threshold):
    if isinstance(value, Fraction):
        value = str(value)
    elif isinstance(value, float) and not math.isfinite(value):
        value = repr(value)
    return {"name": name, "passed": bool(passed), "value": value, "threshold": threshold}


def em_regression_suite(dps: int = 50) -> dict:
    """Run the Euler-Maclaurin and Gaussian-sum checks; failures become entries."""
    checks = []

    faulhaber = em.em_finite(em.polynomial([0, 0, 0, 1]), 10, 4)
    checks.append(
        _entry("faulhaber_cubes_0_to_10", faulhaber.value == 3025 and faulhaber.remainder_bound == 0, faulhaber.value, "== 3025")
    )
    for coeffs, n in (([1], 9), ([0, 1], 5), ([3, -2, 0, 5, 1], 7), ([0, 0, 0, 0, 0, 0, 1], 12)):
        exp = em.em_finite(em.polynomial(coeffs), n, len(coeffs))
        direct = sum(sum(Fraction(c) * x**k for k, c in enumerate(coeffs)) for x in range(n + 1))
        checks.append(_entry(f"polynomial_exact_deg{len(coeffs) - 1}_n{n}", exp.value == direct, exp.value, str(direct)))

    for q, want in ((0, Fraction(1)), (1, Fraction(-1, 2)), (2, Fraction(1, 6)), (3, Fraction(0)), (4, Fraction(-1, 30))):
        got = em.bernoulli(q)
        checks.append(_entry(f"bernoulli_B{q}", got == want, got, str(want)))

    x = Fraction(1, 2)
    with mpmath.workdps(40):
        td = mpmath.mpf(1) / 2 / (1 - mpmath.exp(-mpmath.mpf(1) / 2))
        for Q in (4, 8, 12):
            partial = sum((-1) ** q * em.bernoulli(q) / math.factorial(q) * x**q for q in range(Q + 1))
            nxt = max(abs(em.bernoulli(q) / math.factorial(q)) * x**q for q in (Q + 1, Q + 2))
            gap = abs(mpmath.mpf(partial.numerator) / partial.denominator - td)
            checks.append(_entry(f"todd_series_Q{Q}", gap <= mpmath.mpf(nxt.numerator) / nxt.denominator, float(gap), float(nxt)))

    true_exp = 1 / (1 - math.exp(-1))
    for order in range(1, 7):
        exp = em.em_infinite(em.exponential(1.0), order)
        err = abs(true_exp - exp.value)
        checks.append(_entry(f"remainder_bound_exp_N{order}", err <= exp.remainder_bound, err, exp.remainder_bound))
    for order in range(1, 5):
        exp = em.em_infinite(em.gaussian_poly(1.0, 0.0, 0, 1.0), order)
        err = abs(em.lemma1_sum(1.0, 0.0, 0, 1.0) - exp.value)
        checks.append(_entry(f"remainder_bound_gauss_N{order}", err <= exp.remainder_bound, err, exp.remainder_bound))

    for m, A, B in LEMMA1_CASES:
        slope = em.lemma1_residual_slope(A, B, m, LEMMA1_GRID, dps=dps)
        checks.append(_entry(f"lemma1_slope_m{m}_A{A:g}_B{B:g}", slope >= LEMMA1_MIN_SLOPE, slope, LEMMA1_MIN_SLOPE))

    return {"checks": checks, "all_passed": all(c["passed"] for c in checks)}
