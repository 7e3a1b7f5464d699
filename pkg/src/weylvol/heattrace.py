"""Heat trace of the Laplacian on G as a sum over dominant weights.

``Z(t) = sum_{lam dominant} dim(V_lam)^2 exp(t C_lam)`` is evaluated in log
space with certified truncation: the enumeration radius grows until a
doubling test passes and an analytic tail majorant is below tolerance.

The majorant bounds every dominant weight in the shell ``s <= |lam| < s + 1``
by ``dim <= prod |alpha| (s + 1 + |rho|) / prod <alpha, rho>`` and
``exp(t C_lam) <= exp(-t s^2)`` (``<lam, rho> >= 0`` on the chamber), and
counts the shell by packing disjoint fundamental cells (diameter ``|rho|``)
into ``ball(s + 1 + |rho|) / |W|``.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from ._exact import inverse, ldl
from .rootsys import RootSystem, dominant_lattice_points
from .volume import _log_fraction, hc_product, log_group_volume, log_torus_volume, weight_covolume_squared

__all__ = [
    "HeatTraceSample",
    "TruncationError",
    "ScopeError",
    "heat_trace",
    "heat_trace_shifted",
    "closed_form_I",
    "gaussian_moment_I",
    "weyl_integration_rational",
    "samples_to_csv",
    "worker_count",
]

DEFAULT_MAX_TERMS = 10**7
DEFAULT_MAX_DIM = 30
CSV_FIELDS = ("t", "z", "scaled", "cutoff_radius", "terms_used", "tail_estimate")


class ScopeError(ValueError):
    """The request falls outside what this evaluator is gated to handle."""


class TruncationError(RuntimeError):
    """Tolerance unreachable within the term budget; ``partial`` holds the best sample."""

    def __init__(self, message: str, partial: "HeatTraceSample"):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class HeatTraceSample:
    t: float
    z: float
    scaled: float
    cutoff_radius: float
    tail_estimate: float
    terms_used: int

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "HeatTraceSample":
        return cls(**{k: doc[k] for k in cls.__dataclass_fields__})


def worker_count(threads: int | None = None) -> int:
    """Requested thread count, capped by ``WEYLVOL_THREADS`` when set."""
    n = threads or os.cpu_count() or 1
    cap = os.environ.get("WEYLVOL_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


class _Data:
    """Float views of the root data used in the inner loop."""

    def __init__(self, rs: RootSystem):
        self.r, self.m, self.n = rs.r, rs.m, rs.n
        self.gram = rs.gram_float()
        self.pairing = rs.pairing_float()
        self.log_hc = _log_fraction(hc_product(rs))
        rho = np.ones(rs.r)
        self.rho_norm2 = float(rho @ self.gram @ rho)
        self.rho_norm = math.sqrt(self.rho_norm2)
        self.gram_rho = self.gram @ rho
        self.log_root_norms = 0.5 * sum(math.log(float(q)) for q in rs.root_norms_squared)
        self.log_cell_count = (
            0.5 * rs.r * math.log(math.pi)
            - math.lgamma(rs.r / 2 + 1)
            - math.log(rs.weyl_order)
            - 0.5 * _log_fraction(weight_covolume_squared(rs))
        )


def _log_majorant(d: _Data, t: float, radius: float, shifted: bool) -> float:
    shift = 0.0 if shifted else d.rho_norm
    extra = t * d.rho_norm2 if shifted else 0.0
    const = 2 * (d.log_root_norms - d.log_hc) + d.log_cell_count + extra
    size = 64
    while True:
        s = radius + np.arange(size, dtype=float)
        logs = (
            const
            + 2 * d.m * np.log(s + 1 + shift)
            + d.r * np.log(s + 1 + d.rho_norm)
            - t * s * s
        )
        top = logs.max()
        if logs[-1] < top - 60 and logs[-1] < logs[-2]:
            return float(top + math.log(np.exp(logs - top).sum()))
        size *= 2


def _choose_radius(d: _Data, t: float, target: float, shifted: bool) -> float:
    radius = 0.5
    while _log_majorant(d, t, radius, shifted) > target:
        radius *= 1.2
    return radius


def _count_bound(d: _Data, radius: float) -> float:
    return math.exp(d.log_cell_count + d.r * math.log(radius + d.rho_norm))


def _block_terms(d: _Data, block: np.ndarray, t: float, shifted: bool):
    x = block.astype(float)
    norm2 = np.einsum("ij,jk,ik->i", x, d.gram, x)
    if shifted:
        pair = x @ d.pairing.T
        keep = np.all(pair > 0, axis=1)  # walls contribute d(lam) = 0
        pair, norm2 = pair[keep], norm2[keep]
        expo = -t * norm2
    else:
        pair = (x + 1.0) @ d.pairing.T
        expo = -t * (norm2 + 2 * x @ d.gram_rho)
    log_dim = np.log(pair).sum(axis=1) - d.log_hc
    return 2 * log_dim + expo, norm2


def _evaluate(d: _Data, t: float, radius: float, shifted: bool, threads: int):
    """Return ``(log Z_R, log Z_{R/2}, number of lattice points)``."""
    blocks_wanted = 4 * threads
    first_len = int(math.sqrt(radius**2 / d.gram[0, 0])) + 1
    block_size = max(1, -(-first_len // blocks_wanted))
    blocks = list(dominant_lattice_points(d.gram, radius, block_size))
    count = sum(len(b) for b in blocks)
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: _block_terms(d, b, t, shifted), blocks))
    else:
        parts = [_block_terms(d, b, t, shifted) for b in blocks]
    logs = np.concatenate([p[0] for p in parts]) if parts else np.zeros(0)
    norms = np.concatenate([p[1] for p in parts]) if parts else np.zeros(0)
    if logs.size == 0:
        return -math.inf, -math.inf, count
    top = float(logs.max())
    w = np.exp(logs - top)
    # fsum is exactly rounded, hence independent of block order and thread count
    full = math.fsum(w.tolist())
    half = math.fsum(w[norms <= (radius / 2) ** 2 * (1 + 1e-12)].tolist())
    offset = top + (t * d.rho_norm2 if shifted else 0.0)
    log_half = offset + math.log(half) if half > 0 else -math.inf
    return offset + math.log(full), log_half, count


def _sample(d: _Data, t, log_z, radius, log_tail, count) -> HeatTraceSample:
    return HeatTraceSample(
        t=float(t),
        z=math.exp(log_z),
        scaled=math.exp(0.5 * d.n * math.log(4 * math.pi * t) + log_z),
        cutoff_radius=float(radius),
        tail_estimate=math.exp(log_tail),
        terms_used=int(count),
    )


def _heat_trace(rs, t, rel_tol, shifted, max_terms, threads, max_dim) -> HeatTraceSample:
    if not t > 0:
        raise ValueError("t must be positive")
    if not 0 < rel_tol <= 1e-3:
        raise ValueError("rel_tol must lie in (0, 1e-3]")
    if rs.n > max_dim:
        raise ScopeError(f"dim G = {rs.n} exceeds the spectral limit {max_dim}; formula-only")
    threads = worker_count(threads)
    d = _Data(rs)
    # Z >= 1 (trivial representation), so an absolute tail of rel_tol suffices
    target = math.log(rel_tol)
    radius = _choose_radius(d, t, target, shifted)
    while True:
        if _count_bound(d, radius) > max_terms:
            lo = radius / 2
            while lo > 0.5 and _count_bound(d, lo) > max_terms:
                lo /= 2
            log_z, _, count = _evaluate(d, t, lo, shifted, threads)
            partial = _sample(d, t, log_z, lo, _log_majorant(d, t, lo, shifted), count)
            raise TruncationError(f"rel_tol {rel_tol} unreachable within {max_terms} terms at t={t}", partial)
        log_z, log_half, count = _evaluate(d, t, radius, shifted, threads)
        log_tail = _log_majorant(d, t, radius, shifted)
        doubling_ok = log_half > -math.inf and abs(math.expm1(log_z - log_half)) < rel_tol
        if doubling_ok and log_tail < math.log(rel_tol) + log_z:
            return _sample(d, t, log_z, radius, log_tail, count)
        radius *= 2


def heat_trace(
    rs: RootSystem,
    t: float,
    rel_tol: float = 1e-9,
    *,
    max_terms: int = DEFAULT_MAX_TERMS,
    threads: int | None = None,
    max_dim: int = DEFAULT_MAX_DIM,
) -> HeatTraceSample:
    """``Z(t) = sum_lam dim(V_lam)^2 exp(t C_lam)`` over dominant ``lam`` with ``|lam| <= R``."""
    return _heat_trace(rs, t, rel_tol, False, max_terms, threads, max_dim)


def heat_trace_shifted(
    rs: RootSystem,
    t: float,
    rel_tol: float = 1e-9,
    *,
    max_terms: int = DEFAULT_MAX_TERMS,
    threads: int | None = None,
    max_dim: int = DEFAULT_MAX_DIM,
) -> HeatTraceSample:
    """``Z(t) = e^{t|rho|^2} sum_mu d(mu)^2 e^{-t|mu|^2}`` over the closed chamber.

    ``d(mu) = prod <alpha, mu> / prod <alpha, rho>``; the cutoff applies to ``|mu|``.
    """
    return _heat_trace(rs, t, rel_tol, True, max_terms, threads, max_dim)


def closed_form_I(rs: RootSystem, t: float) -> float:
    """``vol(T)^2 / ((2 pi)^r vol(G)) * prod <alpha, rho>^{-2} * (pi / t)^{n/2}``."""
    if not t > 0:
        raise ValueError("t must be positive")
    log_i = (
        2 * log_torus_volume(rs)
        - rs.r * math.log(2 * math.pi)
        - log_group_volume(rs)
        - 2 * _log_fraction(hc_product(rs))
        + 0.5 * rs.n * math.log(math.pi / t)
    )
    return math.exp(log_i)


def _moment_polynomial(rs: RootSystem):
    """``prod_alpha <alpha, lam>^2`` in coordinates ``y = L^T x`` where ``G = L D L^T``.

    Returns ``(poly, D)`` with ``poly`` a dict from exponent tuples to Fractions.
    """
    L, D = ldl(rs.gram_weights)
    lt_inv = inverse([list(col) for col in zip(*L)])
    r = rs.r
    poly = {(0,) * r: Fraction(1)}
    for row in rs.pairing_matrix:
        form = [sum((row[j] * lt_inv[j][i] for j in range(r)), Fraction(0)) for i in range(r)]
        for _ in range(2):
            nxt: dict = {}
            for mono, c in poly.items():
                for i, a in enumerate(form):
                    if a:
                        key = mono[:i] + (mono[i] + 1,) + mono[i + 1 :]
                        nxt[key] = nxt.get(key, Fraction(0)) + c * a
            poly = {k: v for k, v in nxt.items() if v}
    return poly, D


def _double_factorial(k: int) -> int:
    return math.prod(range(k, 0, -2)) if k > 0 else 1


def weyl_integration_rational(rs: RootSystem, max_rank: int = 3, max_degree: int = 20) -> Fraction:
    """Exact ``int prod <alpha, lam>^2 e^{-|lam|^2}`` up to ``pi^{r/2} / vol(P)``.

    Every monomial ``y^k`` integrates against ``exp(-t sum D_i y_i^2)`` to
    ``prod_i Gamma((k_i+1)/2) / (t D_i)^{(k_i+1)/2}``; odd ``k_i`` vanish and
    even ones leave ``(k_i - 1)!! / (2 D_i)^{k_i/2}`` times ``sqrt(pi / (t D_i))``.
    """
    if rs.r > max_rank or 2 * rs.m > max_degree:
        raise ScopeError(f"moment oracle limited to rank <= {max_rank} and degree <= {max_degree}")
    poly, D = _moment_polynomial(rs)
    total = Fraction(0)
    for mono, c in poly.items():
        if any(k % 2 for k in mono):
            continue
        term = c
        for k, d in zip(mono, D):
            term *= Fraction(_double_factorial(k - 1)) / (2 * d) ** (k // 2)
        total += term
    return total


def gaussian_moment_I(rs: RootSystem, t: float) -> float:
    """``(1/|W|) int_{t*} d(lam)^2 e^{-t|lam|^2} dlam / vol(P)`` by exact Gaussian moments.

    Independent of the volume formulas: only the roots, the Gram matrix and
    ``|W|`` enter.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    moments = weyl_integration_rational(rs)
    hc = hc_product(rs)
    coeff = moments / (rs.weyl_order * hc * hc)
    # dlam / vol(P) = dx = dy, and prod D_i = det G
    log_i = (
        _log_fraction(coeff)
        + 0.5 * rs.r * math.log(math.pi)
        - 0.5 * _log_fraction(weight_covolume_squared(rs))
        - 0.5 * rs.n * math.log(t)
    )
    return math.exp(log_i)


def samples_to_csv(samples) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for s in samples:
        writer.writerow([repr(getattr(s, f)) for f in CSV_FIELDS])
    return buf.getvalue()
