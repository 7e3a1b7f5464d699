"""Acceptance checks, one test per criterion.

Each test prints a single ``[criterion N] PASS|FAIL ...`` line (shown even
under output capture) and then asserts. Run alone with::

    pytest tests/test_acceptance.py -v
"""

import json
import math
import time
from fractions import Fraction

from weylvol import build_root_system, casimir, inner, parse_group, weyl_dim
from weylvol import eulermaclaurin as em
from weylvol.heattrace import closed_form_I, gaussian_moment_I, heat_trace, heat_trace_shifted
from weylvol.verify import LEMMA1_CASES, LEMMA1_GRID, SLOPE_WINDOW, spectral_harish_chandra, weyl_law_check
from weylvol.volume import coroot_covolume_squared, flag_volume, hc_product, weight_covolume_squared

from conftest import rs_of
from oracles import rho_orbit_size

RANK_LE_4 = ["A1", "A2", "A3", "A4", "B1", "B2", "B3", "B4", "C1", "C2", "C3", "C4", "D2", "D3", "D4", "F4", "G2"]


def report(capsys, n, ok, detail):
    with capsys.disabled():
        print(f"\n[criterion {n}] {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


def test_criterion_1_harish_chandra_from_spectrum(capsys):
    parts, ok = [], True
    for label, target, tol in (("A1", 2 * math.pi, 5e-3), ("A2", 4 * math.pi**3, 1e-2), ("A1xA1", (2 * math.pi) ** 2, 1e-2)):
        start = time.perf_counter()
        spectral, _, _ = spectral_harish_chandra(rs_of(label))
        elapsed = time.perf_counter() - start
        err = abs(spectral - target) / target
        ok &= err < tol and elapsed < 30
        parts.append(f"{label}: rel_err={err:.2e} (<{tol:g}) in {elapsed:.1f}s")
    report(capsys, 1, ok, "; ".join(parts))


def test_criterion_2_weyl_law_slope(capsys):
    lo, hi = SLOPE_WINDOW
    parts, ok = [], True
    for label in ("A1", "A2"):
        slope = weyl_law_check(rs_of(label)).fit_slope_loglog
        ok &= lo <= slope <= hi
        parts.append(f"{label}: slope={slope:.4f}")
    report(capsys, 2, ok, "; ".join(parts) + f" (window [{lo}, {hi}])")


def test_criterion_3_weyl_integration_identity(capsys):
    start = time.perf_counter()
    worst = 0.0
    for label in ("A1", "A2", "B2", "A3"):
        rs = rs_of(label)
        for t in (0.3, 1.0, 3.0):
            ref = closed_form_I(rs, t)
            worst = max(worst, abs(gaussian_moment_I(rs, t) - ref) / ref)
    elapsed = time.perf_counter() - start
    report(capsys, 3, worst < 1e-10 and elapsed < 10, f"max rel gap {worst:.2e} (<1e-10) in {elapsed:.2f}s")


def test_criterion_4_reindexing_identity(capsys):
    tol = 1e-13
    worst, ok = 0.0, True
    for label in ("A1", "A2", "G2"):
        rs = rs_of(label)
        for t in (0.1, 1.0):
            a, b = heat_trace(rs, t, tol), heat_trace_shifted(rs, t, tol)
            gap = abs(a.z - b.z) / a.z
            worst = max(worst, gap)
            ok &= gap <= 1e-12 + (a.tail_estimate + b.tail_estimate) / a.z
    report(capsys, 4, ok, f"max rel gap {worst:.2e} (<=1e-12 + truncation tail)")


def test_criterion_5_exact_algebra(capsys):
    failures = []
    for label in RANK_LE_4:
        rs = rs_of(label)
        # coroot duality <a_i^vee, w_j> = delta_ij
        for i in range(rs.r):
            row = rs.pairing_matrix[rs.positive_roots.index(tuple(int(i == j) for j in range(rs.r)))]
            if [2 * p / rs.root_lengths[i] for p in row] != [int(i == j) for j in range(rs.r)]:
                failures.append(f"{label} duality")
        # sum of positive roots = 2 rho, in weight coordinates
        total = [sum(a[i] * rs.cartan[i][j] for a in rs.positive_roots for i in range(rs.r)) for j in range(rs.r)]
        if total != [2] * rs.r:
            failures.append(f"{label} 2rho")
        if weight_covolume_squared(rs) * coroot_covolume_squared(rs) != 1:
            failures.append(f"{label} covolume")
        if rs.weyl_order != rho_orbit_size(rs.cartan):
            failures.append(f"{label} |W|")
    A2 = rs_of("A2")
    if casimir(A2, [1, 0]) != Fraction(-8, 3):
        failures.append("casimir")
    if weyl_dim(A2, [1, 1]) != 8:
        failures.append("dim")
    detail = f"{len(RANK_LE_4)} types, |W| vs rho-orbit, duality, 2rho, covolumes, casimir, dim"
    report(capsys, 5, not failures, detail + (f"; failures: {failures}" if failures else ""))


def test_criterion_6_euler_maclaurin(capsys):
    faul = em.em_finite(em.polynomial([0, 0, 0, 1]), 10, 4)
    ok = faul.value == 3025 and faul.remainder_bound == 0
    ok &= (em.bernoulli(2), em.bernoulli(3), em.bernoulli(4)) == (Fraction(1, 6), 0, Fraction(-1, 30))
    slopes = {}
    for m, A, B in LEMMA1_CASES:
        slopes[(m, A, B)] = em.lemma1_residual_slope(A, B, m, LEMMA1_GRID)
        ok &= slopes[(m, A, B)] >= 0.45
    shown = ", ".join(f"(m={m},A={A:g},B={B:g})={s:.3f}" for (m, A, B), s in slopes.items())
    report(capsys, 6, ok, f"Faulhaber 3025 exact, B2/B3/B4 exact, slopes {shown}")


def test_criterion_7_scaling_laws(capsys):
    ok = True
    for label in ("A1", "A2", "B2", "G2"):
        base = rs_of(label)
        for s in (Fraction(1, 3), Fraction(2), Fraction(7, 5)):
            scaled = build_root_system(parse_group(label, [s]))
            ok &= hc_product(scaled) == s**base.m * hc_product(base)
            ok &= math.isclose(flag_volume(scaled), float(s) ** -base.m * flag_volume(base), rel_tol=1e-13)
    worst = 0.0
    A1 = rs_of("A1")
    for s in (Fraction(1, 3), Fraction(2), Fraction(7, 5)):
        A1s = build_root_system(parse_group("A1", [s]))
        for t in (0.01, 0.1, 1.0):
            a = heat_trace(A1s, t, 1e-15).z
            b = heat_trace(A1, float(s) * t, 1e-15).z
            worst = max(worst, abs(a - b) / b)
    ok &= worst < 1e-12
    report(capsys, 7, ok, f"hc_product s^m exact; Z_s(t) vs Z_1(st) max rel gap {worst:.1e} (<1e-12)")


def test_criterion_8_determinism(capsys):
    ok = True
    for label in ("A1", "A2"):
        rs = rs_of(label)
        one = weyl_law_check(rs, threads=1).to_json()
        many = weyl_law_check(rs, threads=4).to_json()
        ok &= one == many
        ok &= json.dumps(heat_trace(rs, 0.01, threads=1).to_dict()) == json.dumps(heat_trace(rs, 0.01, threads=3).to_dict())
    report(capsys, 8, ok, "JSON reports byte-identical for threads=1 vs threads=4 (A1, A2)")
