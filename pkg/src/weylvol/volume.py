"""Closed-form volumes of G/T, T, G and the weight/coroot lattice cells."""

from __future__ import annotations

import functools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from ._exact import det, to_str
from .rootsys import RootSystem, coroot_gram

__all__ = [
    "VolumeReport",
    "hc_product",
    "flag_volume",
    "log_flag_volume",
    "weight_covolume",
    "coroot_covolume",
    "torus_volume",
    "group_volume",
    "volume_report",
    "call_counts",
]

TWO_PI = 2 * math.pi

# Test seam: how often each public operation ran, so callers can prove a
# code path never touched the closed-form flag volume.
call_counts: Counter = Counter()


def _counted(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        call_counts[fn.__name__] += 1
        return fn(*args, **kwargs)

    return wrapper


def _log_fraction(q: Fraction) -> float:
    return math.log(q.numerator) - math.log(q.denominator)


def hc_product(rs: RootSystem) -> Fraction:
    """Exact ``prod_{alpha > 0} <alpha, rho>``."""
    out = Fraction(1)
    for p in rs.rho_pairings:
        out *= p
    return out


@_counted
def log_flag_volume(rs: RootSystem) -> float:
    return rs.m * math.log(TWO_PI) - _log_fraction(hc_product(rs))


@_counted
def flag_volume(rs: RootSystem) -> float:
    """``vol(G/T) = prod 2 pi / <alpha, rho>``; the product is exact until the last step."""
    return math.exp(log_flag_volume(rs))


def weight_covolume_squared(rs: RootSystem) -> Fraction:
    return det(rs.gram_weights)


def coroot_covolume_squared(rs: RootSystem) -> Fraction:
    """Gram determinant of the simple coroots, independent of the weight lattice."""
    return det(coroot_gram(rs))


def weight_covolume(rs: RootSystem) -> float:
    """Volume of the cell spanned by the fundamental weights."""
    return math.exp(0.5 * _log_fraction(weight_covolume_squared(rs)))


def coroot_covolume(rs: RootSystem) -> float:
    # dual lattices: vol(Q) = 1 / vol(P)
    return 1.0 / weight_covolume(rs)


def log_torus_volume(rs: RootSystem) -> float:
    return rs.r * math.log(TWO_PI) - 0.5 * _log_fraction(weight_covolume_squared(rs))


def torus_volume(rs: RootSystem) -> float:
    """``vol(T) = (2 pi)^r / vol(P)``."""
    return math.exp(log_torus_volume(rs))


def log_group_volume(rs: RootSystem) -> float:
    return log_flag_volume(rs) + log_torus_volume(rs)


def group_volume(rs: RootSystem) -> float:
    return math.exp(log_group_volume(rs))


@dataclass(frozen=True)
class VolumeReport:
    group: str
    m: int
    hc_product_exact: Fraction
    flag_volume: float
    covol_weights: float
    covol_coroots: float
    torus_volume: float
    group_volume: float

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "m": self.m,
            "hc_product_exact": to_str(self.hc_product_exact),
            "flag_volume": self.flag_volume,
            "covol_weights": self.covol_weights,
            "covol_coroots": self.covol_coroots,
            "torus_volume": self.torus_volume,
            "group_volume": self.group_volume,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "VolumeReport":
        fields = dict(doc)
        fields["hc_product_exact"] = Fraction(fields["hc_product_exact"])
        return cls(**fields)


def volume_report(rs: RootSystem) -> VolumeReport:
    return VolumeReport(
        group=rs.label,
        m=rs.m,
        hc_product_exact=hc_product(rs),
        flag_volume=flag_volume(rs),
        covol_weights=weight_covolume(rs),
        covol_coroots=coroot_covolume(rs),
        torus_volume=torus_volume(rs),
        group_volume=group_volume(rs),
    )
