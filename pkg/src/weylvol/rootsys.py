"""Exact root-system data for simply connected semisimple compact groups.

Weights are stored in the fundamental-weight basis, roots in the simple-root
basis. The Cartan matrix convention is ``C[i][j] = 2<a_i, a_j> / <a_j, a_j>``,
so row ``i`` of ``C`` is the simple root ``a_i`` written in fundamental-weight
coordinates. Long roots of every simple factor have squared length
``2 * scale``.
"""

from __future__ import annotations

import json
import math
import re
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from ._exact import as_fraction, det, inverse, is_positive_definite, matmul

__all__ = [
    "RootSystemError",
    "RootSystemSpec",
    "RootSystem",
    "Weight",
    "parse_group",
    "load_cartan_file",
    "cartan_matrix",
    "build_root_system",
    "inner",
    "pairing_with_root",
    "weyl_dim",
    "casimir",
    "weyl_group_order",
    "reflect",
    "dominant_lattice_points",
    "dominant_weights_within",
]


class RootSystemError(ValueError):
    """Invalid group description or Cartan matrix."""


@dataclass(frozen=True)
class RootSystemSpec:
    """What to build: a list of simple types or an explicit Cartan matrix.

    ``scale`` holds one positive rational per simple factor. For an explicit
    Cartan matrix the factors are the connected components of its Dynkin
    diagram, ordered by their smallest node index.
    """

    factors: tuple[tuple[str, int], ...] = ()
    scale: tuple[Fraction, ...] = ()
    cartan: tuple[tuple[int, ...], ...] | None = None

    def label(self) -> str:
        if self.cartan is not None:
            return "cartan" + json.dumps([list(row) for row in self.cartan], separators=(",", ":"))
        return "x".join(f"{s}{k}" for s, k in self.factors)


@dataclass(frozen=True)
class Weight:
    """Integer weight ``sum_i coords[i] * fundamental_weight[i]``."""

    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    @property
    def is_dominant(self) -> bool:
        return all(c >= 0 for c in self.coords)

    @property
    def is_strictly_dominant(self) -> bool:
        return all(c >= 1 for c in self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)


_VALID_RANKS = {
    "A": lambda k: k >= 1,
    "B": lambda k: k >= 1,
    "C": lambda k: k >= 1,
    "D": lambda k: k >= 2,
    "E": lambda k: k in (6, 7, 8),
    "F": lambda k: k == 4,
    "G": lambda k: k == 2,
}

_FACTOR_RE = re.compile(r"^([A-Ga-g])(\d+)$")


def parse_group(text: str, scale: Sequence | None = None) -> RootSystemSpec:
    """Parse ``"A2"``, ``"B2xG2"``, ``"A1 x A1"`` into a spec.

    Whitespace is ignored; factors are separated by ``x``.
    """
    compact = re.sub(r"\s+", "", text or "")
    if not compact:
        raise RootSystemError("empty group description")
    factors = []
    for part in re.split(r"[xX]", compact):
        match = _FACTOR_RE.match(part)
        if not match:
            raise RootSystemError(f"cannot parse factor {part!r} in {text!r}")
        series, rank = match.group(1).upper(), int(match.group(2))
        if not _VALID_RANKS[series](rank):
            raise RootSystemError(f"invalid rank {rank} for series {series}")
        factors.append((series, rank))
    return RootSystemSpec(tuple(factors), _check_scale(scale, len(factors)))


def _check_scale(scale, count: int) -> tuple[Fraction, ...]:
    if scale is None or len(scale) == 0:
        return (Fraction(1),) * count
    values = tuple(as_fraction(s) for s in scale)
    if len(values) == 1 and count > 1:
        values = values * count
    if len(values) != count:
        raise RootSystemError(f"expected {count} scale values, got {len(values)}")
    if any(s <= 0 for s in values):
        raise RootSystemError("scale values must be positive")
    return values


def load_cartan_file(path: str | Path) -> RootSystemSpec:
    """Read ``{"cartan": [[...]], "scale": [...]}`` from a JSON file."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise RootSystemError(f"cannot read Cartan file {path}: {exc}") from exc
    if not isinstance(doc, dict) or "cartan" not in doc:
        raise RootSystemError("Cartan file must be an object with a 'cartan' key")
    rows = doc["cartan"]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise RootSystemError("'cartan' must be a non-empty list of rows")
    try:
        cartan = tuple(tuple(_as_int(v) for v in row) for row in rows)
    except (TypeError, ValueError) as exc:
        raise RootSystemError(f"Cartan entries must be integers: {exc}") from exc
    components = _validate_cartan(cartan)
    return RootSystemSpec((), _check_scale(doc.get("scale"), len(components)), cartan)


def _as_int(v) -> int:
    if isinstance(v, bool) or not float(v).is_integer():
        raise ValueError(f"{v!r}")
    return int(v)


def cartan_matrix(series: str, rank: int) -> list[list[int]]:
    """Cartan matrix of a simple type in Bourbaki numbering."""
    if series not in _VALID_RANKS or not _VALID_RANKS[series](rank):
        raise RootSystemError(f"invalid type {series}{rank}")
    c = [[2 if i == j else 0 for j in range(rank)] for i in range(rank)]

    def link(i, j, cij=-1, cji=-1):
        c[i][j], c[j][i] = cij, cji

    if series in "ABC":
        for i in range(rank - 1):
            link(i, i + 1)
        if rank >= 2 and series == "B":
            link(rank - 2, rank - 1, -2, -1)
        if rank >= 2 and series == "C":
            link(rank - 2, rank - 1, -1, -2)
    elif series == "D":
        for i in range(rank - 2):
            link(i, i + 1)
        if rank >= 3:
            link(rank - 3, rank - 1)
    elif series == "E":
        link(0, 2)
        link(1, 3)
        for i in range(2, rank - 1):
            link(i, i + 1)
    elif series == "F":
        link(0, 1)
        link(1, 2, -2, -1)
        link(2, 3)
    elif series == "G":
        link(0, 1, -1, -3)
    return c


def _components(cartan) -> list[list[int]]:
    r = len(cartan)
    seen, comps = set(), []
    for start in range(r):
        if start in seen:
            continue
        comp, queue = [], deque([start])
        seen.add(start)
        while queue:
            i = queue.popleft()
            comp.append(i)
            for j in range(r):
                if j not in seen and cartan[i][j] != 0:
                    seen.add(j)
                    queue.append(j)
        comps.append(sorted(comp))
    return comps


def _relative_lengths(cartan, comp) -> dict[int, Fraction]:
    # C[i][j] |a_j|^2 = C[j][i] |a_i|^2, propagated along the Dynkin graph
    lengths = {comp[0]: Fraction(1)}
    queue = deque([comp[0]])
    while queue:
        i = queue.popleft()
        for j in comp:
            if cartan[i][j] == 0 or i == j:
                continue
            implied = Fraction(cartan[j][i]) * lengths[i] / cartan[i][j]
            if j not in lengths:
                lengths[j] = implied
                queue.append(j)
            elif lengths[j] != implied:
                raise RootSystemError("Cartan matrix is not symmetrizable")
    return lengths


def _validate_cartan(cartan) -> list[list[int]]:
    r = len(cartan)
    if r == 0 or any(len(row) != r for row in cartan):
        raise RootSystemError("Cartan matrix must be square and non-empty")
    for i in range(r):
        if cartan[i][i] != 2:
            raise RootSystemError("Cartan matrix diagonal must be 2")
        for j in range(r):
            if i != j and cartan[i][j] > 0:
                raise RootSystemError("off-diagonal Cartan entries must be <= 0")
            if (cartan[i][j] == 0) != (cartan[j][i] == 0):
                raise RootSystemError("Cartan matrix zero pattern is not symmetric")
    comps = _components(cartan)
    sym = [[Fraction(0)] * r for _ in range(r)]
    for comp in comps:
        lengths = _relative_lengths(cartan, comp)
        for i in comp:
            for j in comp:
                sym[i][j] = cartan[i][j] * lengths[j] / 2
    if not is_positive_definite(sym):
        raise RootSystemError("Cartan matrix is not of finite type (not positive definite)")
    return comps


# (rank, #positive roots, simply laced) -> |W|; B_k and C_k share |W|
def _weyl_order_of_component(rank: int, m: int, simply_laced: bool) -> int:
    if m == rank * (rank + 1) // 2 and (simply_laced or rank == 1):
        return math.factorial(rank + 1)
    if simply_laced:
        table = {(4, 12): 192, (6, 36): 51840, (7, 63): 2903040, (8, 120): 696729600}
        if m == rank * (rank - 1):
            return 2 ** (rank - 1) * math.factorial(rank)
        if (rank, m) in table:
            return table[(rank, m)]
    else:
        if m == rank * rank:
            return 2**rank * math.factorial(rank)
        if (rank, m) == (4, 24):
            return 1152
        if (rank, m) == (2, 6):
            return 12
    raise RootSystemError(f"unrecognized simple component (rank {rank}, {m} positive roots)")


@dataclass(frozen=True, eq=False)
class RootSystem:
    """Immutable root data. Build with :func:`build_root_system`."""

    label: str
    cartan: tuple[tuple[int, ...], ...]
    root_lengths: tuple[Fraction, ...]
    positive_roots: tuple[tuple[int, ...], ...]
    components: tuple[tuple[int, ...], ...]
    scale: tuple[Fraction, ...]
    weyl_order: int

    @property
    def r(self) -> int:
        return len(self.cartan)

    @property
    def m(self) -> int:
        return len(self.positive_roots)

    @property
    def n(self) -> int:
        return self.r + 2 * self.m

    @property
    def rho(self) -> tuple[int, ...]:
        return (1,) * self.r

    @property
    def simple_roots(self) -> tuple[tuple[int, ...], ...]:
        """Simple roots in fundamental-weight coordinates (rows of C)."""
        return self.cartan

    @cached_property
    def gram_weights(self) -> tuple[tuple[Fraction, ...], ...]:
        """``<w_i, w_j>`` for the fundamental weights: ``C^{-1} diag(|a_j|^2 / 2)``."""
        cinv = inverse(self.cartan)
        return tuple(
            tuple(cinv[i][j] * self.root_lengths[j] / 2 for j in range(self.r))
            for i in range(self.r)
        )

    @cached_property
    def gram_roots(self) -> tuple[tuple[Fraction, ...], ...]:
        """``<a_i, a_j>`` for the simple roots."""
        return tuple(
            tuple(self.cartan[i][j] * self.root_lengths[j] / 2 for j in range(self.r))
            for i in range(self.r)
        )

    @cached_property
    def pairing_matrix(self) -> tuple[tuple[Fraction, ...], ...]:
        """Row ``a`` gives ``<alpha_a, w_j>`` for positive root ``a``.

        Uses ``<a_i, w_j> = delta_ij |a_i|^2 / 2``.
        """
        return tuple(
            tuple(c * self.root_lengths[j] / 2 for j, c in enumerate(root))
            for root in self.positive_roots
        )

    @cached_property
    def rho_pairings(self) -> tuple[Fraction, ...]:
        """``<alpha, rho>`` for every positive root, in root order."""
        return tuple(sum(row, Fraction(0)) for row in self.pairing_matrix)

    @cached_property
    def root_norms_squared(self) -> tuple[Fraction, ...]:
        g = self.gram_roots
        return tuple(
            sum((a * b * g[i][j] for i, a in enumerate(root) for j, b in enumerate(root)), Fraction(0))
            for root in self.positive_roots
        )

    def gram_float(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.gram_weights])

    def pairing_float(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.pairing_matrix]).reshape(self.m, self.r)

    def __repr__(self):
        return f"RootSystem({self.label!r}, r={self.r}, m={self.m}, n={self.n})"


def _positive_roots(cartan) -> list[tuple[int, ...]]:
    """Close the simple roots under addition of simple roots.

    ``beta + a_i`` is a root iff ``q > 0`` in the ``a_i``-string through
    ``beta``, with ``p - q = <beta, a_i^vee>`` and ``p`` read off from the
    roots already found.
    """
    r = len(cartan)
    simple = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    found = set(simple)
    layer = list(simple)
    while layer:
        nxt = []
        for beta in layer:
            for i in range(r):
                coroot_pairing = sum(beta[j] * cartan[j][i] for j in range(r))
                p = 0
                down = list(beta)
                while True:
                    down[i] -= 1
                    if tuple(down) in found:
                        p += 1
                    else:
                        break
                if p - coroot_pairing > 0:
                    up = list(beta)
                    up[i] += 1
                    up = tuple(up)
                    if up not in found:
                        found.add(up)
                        nxt.append(up)
        layer = nxt
    return sorted(found, key=lambda v: (sum(v), tuple(-x for x in v)))


def build_root_system(spec: RootSystemSpec | str) -> RootSystem:
    """Build root data for a product of simple types or an explicit Cartan matrix."""
    if isinstance(spec, str):
        spec = parse_group(spec)
    if spec.cartan is not None:
        cartan = [list(row) for row in spec.cartan]
        comps = _validate_cartan(cartan)
    else:
        if not spec.factors:
            raise RootSystemError("no factors given")
        r = sum(k for _, k in spec.factors)
        cartan = [[0] * r for _ in range(r)]
        comps, offset = [], 0
        for series, rank in spec.factors:
            block = cartan_matrix(series, rank)
            # D2 is two disconnected nodes; components come from the graph
            for sub in _components(block):
                comps.append([offset + i for i in sub])
            for i in range(rank):
                for j in range(rank):
                    cartan[offset + i][offset + j] = block[i][j]
            offset += rank
    nfactors = len(spec.factors) if spec.cartan is None else len(comps)
    scale = _check_scale(spec.scale, nfactors)
    # expand per-factor scale to per-component (D2 splits into two A1's)
    comp_scale = []
    if spec.cartan is None:
        offset = 0
        for (series, rank), s in zip(spec.factors, scale):
            comp_scale.extend(s for c in comps if offset <= c[0] < offset + rank)
            offset += rank
    else:
        comp_scale = list(scale)

    lengths = [Fraction(0)] * len(cartan)
    for comp, s in zip(comps, comp_scale):
        rel = _relative_lengths(cartan, comp)
        longest = max(rel.values())
        for i in comp:
            lengths[i] = 2 * s * rel[i] / longest

    roots = _positive_roots(cartan)
    weyl = 1
    for comp in comps:
        in_comp = [root for root in roots if any(root[i] for i in comp)]
        laced = len({lengths[i] for i in comp}) == 1
        weyl *= _weyl_order_of_component(len(comp), len(in_comp), laced)

    return RootSystem(
        label=spec.label(),
        cartan=tuple(tuple(row) for row in cartan),
        root_lengths=tuple(lengths),
        positive_roots=tuple(roots),
        components=tuple(tuple(c) for c in comps),
        scale=scale,
        weyl_order=weyl,
    )


def _vec(rs: RootSystem, v) -> list[Fraction]:
    vals = [as_fraction(x) for x in v]
    if len(vals) != rs.r:
        raise ValueError(f"expected a vector of length {rs.r}, got {len(vals)}")
    return vals


def inner(rs: RootSystem, u, v) -> Fraction:
    """Exact ``u^T G v`` for weight vectors in fundamental-weight coordinates."""
    a, b = _vec(rs, u), _vec(rs, v)
    g = rs.gram_weights
    return sum((a[i] * g[i][j] * b[j] for i in range(rs.r) for j in range(rs.r) if a[i] and b[j]), Fraction(0))


def pairing_with_root(rs: RootSystem, index: int, lam) -> Fraction:
    """``<alpha, lam>`` for the positive root ``rs.positive_roots[index]``."""
    if not 0 <= index < rs.m:
        raise IndexError(f"positive root index {index} out of range [0, {rs.m})")
    x = _vec(rs, lam)
    return sum((p * xi for p, xi in zip(rs.pairing_matrix[index], x)), Fraction(0))


def _dominant(rs: RootSystem, lam) -> list[Fraction]:
    x = _vec(rs, lam)
    if any(xi < 0 for xi in x) or any(xi.denominator != 1 for xi in x):
        raise ValueError(f"{tuple(lam)} is not a dominant integral weight")
    return x


def weyl_dim(rs: RootSystem, lam) -> int:
    """Dimension of the irreducible representation with highest weight ``lam``."""
    x = _dominant(rs, lam)
    shifted = [xi + 1 for xi in x]
    num, den = Fraction(1), Fraction(1)
    for row, rp in zip(rs.pairing_matrix, rs.rho_pairings):
        num *= sum((p * s for p, s in zip(row, shifted)), Fraction(0))
        den *= rp
    q = num / den
    assert q.denominator == 1, f"Weyl dimension quotient {q} is not an integer"
    return int(q)


def casimir(rs: RootSystem, lam) -> Fraction:
    """Laplace eigenvalue ``-|lam + rho|^2 + |rho|^2 = -<lam, lam + 2 rho>``."""
    x = _dominant(rs, lam)
    return -inner(rs, x, [xi + 2 for xi in x])


def weyl_group_order(rs: RootSystem) -> int:
    return rs.weyl_order


def reflect(rs: RootSystem, i: int, lam) -> tuple[Fraction, ...]:
    """Simple reflection ``s_i`` on a weight: ``lam - <lam, a_i^vee> a_i``."""
    x = _vec(rs, lam)
    return tuple(x[j] - x[i] * rs.cartan[i][j] for j in range(rs.r))


def dominant_lattice_points(gram: np.ndarray, radius: float, block_size: int | None = None) -> Iterator[np.ndarray]:
    """Yield blocks of nonnegative integer vectors ``x`` with ``x^T G x <= radius^2``.

    Requires ``G`` entrywise nonnegative (true for fundamental-weight Gram
    matrices), so partial quadratic forms bound the full one from below and
    prefixes can be pruned. Rows come out in lexicographic order, blocks
    partition the first coordinate.
    """
    gram = np.asarray(gram, dtype=float)
    r = gram.shape[0]
    r2 = float(radius) ** 2
    slack = r2 * 1e-12 + 1e-300
    first_max = int(math.floor(math.sqrt((r2 + slack) / gram[0, 0]))) if r2 > 0 else 0
    starts = np.arange(first_max + 1, dtype=np.int64)
    if block_size is None:
        block_size = max(1, len(starts))
    for lo in range(0, len(starts), block_size):
        prefix = starts[lo : lo + block_size, None]
        partial = gram[0, 0] * prefix[:, 0].astype(float) ** 2
        for k in range(1, r):
            b = prefix.astype(float) @ gram[k, :k]
            a = gram[k, k]
            disc = b * b - a * (partial - r2 - slack)
            xmax = np.floor((-b + np.sqrt(np.maximum(disc, 0.0))) / a).astype(np.int64)
            xmax[disc < 0] = -1
            counts = np.maximum(xmax + 1, 0)
            total = int(counts.sum())
            rep = np.repeat(np.arange(len(prefix)), counts)
            offsets = np.cumsum(counts) - counts
            xs = np.arange(total, dtype=np.int64) - np.repeat(offsets, counts)
            partial = partial[rep] + 2 * xs * b[rep] + a * xs.astype(float) ** 2
            prefix = np.column_stack([prefix[rep], xs])
        if len(prefix):
            yield prefix


def dominant_weights_within(rs: RootSystem, radius: float) -> Iterator[Weight]:
    """Dominant weights with ``|lam| <= radius``, lexicographic in coordinates.

    The float filter is confirmed exactly for points within rounding distance
    of the sphere.
    """
    if radius <= 0:
        return
    r2 = as_fraction(radius) ** 2
    g = rs.gram_float()
    for block in dominant_lattice_points(g, radius):
        norms = np.einsum("ij,jk,ik->i", block.astype(float), g, block.astype(float))
        for row, q in zip(block, norms):
            if abs(q - float(r2)) <= 1e-9 * max(1.0, float(r2)):
                if inner(rs, row, row) > r2:
                    continue
            elif q > float(r2):
                continue
            yield Weight(tuple(int(v) for v in row))


def gram_determinant(rs: RootSystem) -> Fraction:
    return det(rs.gram_weights)


def coroot_gram(rs: RootSystem) -> tuple[tuple[Fraction, ...], ...]:
    """``<H_i, H_j>`` with ``H_i = 2 a_i / |a_i|^2``."""
    g = rs.gram_roots
    L = rs.root_lengths
    return tuple(tuple(4 * g[i][j] / (L[i] * L[j]) for j in range(rs.r)) for i in range(rs.r))


def weights_to_roots(rs: RootSystem, lam) -> tuple[Fraction, ...]:
    """Express a weight in the simple-root basis (``x C^{-1}``)."""
    x = _vec(rs, lam)
    return tuple(matmul([x], inverse(rs.cartan))[0])
