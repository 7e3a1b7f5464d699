import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weylvol import (
    RootSystemError,
    Weight,
    build_root_system,
    casimir,
    dominant_weights_within,
    inner,
    pairing_with_root,
    parse_group,
    weyl_dim,
    weyl_group_order,
)
from weylvol.rootsys import (
    cartan_matrix,
    coroot_gram,
    load_cartan_file,
    reflect,
    weights_to_roots,
)

from conftest import rs_of
from oracles import a2_gram, positive_roots_by_reflection, rho_orbit_size

F = Fraction

SMALL_TYPES = ["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C2", "C3", "C4", "D3", "D4", "F4", "G2"]
# (r, m, n, |W|) from the standard tables
KNOWN = {
    "A1": (1, 1, 3, 2),
    "A2": (2, 3, 8, 6),
    "B2": (2, 4, 10, 8),
    "G2": (2, 6, 14, 12),
    "C3": (3, 9, 21, 48),
    "D4": (4, 12, 28, 192),
    "F4": (4, 24, 52, 1152),
    "E6": (6, 36, 78, 51840),
    "E7": (7, 63, 133, 2903040),
    "E8": (8, 120, 248, 696729600),
}


# -- construction ------------------------------------------------------------


def test_a1_basic(A1):
    assert (A1.r, A1.m, A1.n) == (1, 1, 3)
    assert A1.gram_weights == ((F(1, 2),),)


def test_a2_roots_and_gram(A2):
    assert A2.m == 3
    assert set(A2.positive_roots) == {(1, 0), (0, 1), (1, 1)}
    assert [list(row) for row in A2.gram_weights] == a2_gram()


def test_b2_roots_match_reflection_oracle(B2):
    assert B2.m == 4
    assert set(B2.positive_roots) == {(1, 0), (0, 1), (1, 1), (1, 2)}
    assert set(B2.positive_roots) == positive_roots_by_reflection(B2.cartan)


@pytest.mark.parametrize("label", SMALL_TYPES + ["E6"])
def test_positive_roots_match_reflection_oracle(label):
    rs = rs_of(label)
    assert set(rs.positive_roots) == positive_roots_by_reflection(rs.cartan)


@pytest.mark.parametrize("label", sorted(KNOWN))
def test_dimensions_table(label):
    rs = rs_of(label)
    assert (rs.r, rs.m, rs.n, weyl_group_order(rs)) == KNOWN[label]


@pytest.mark.parametrize("label", SMALL_TYPES + ["B1", "C1", "D2", "A1xG2"])
def test_weyl_order_vs_rho_orbit(label):
    rs = rs_of(label)
    assert weyl_group_order(rs) == rho_orbit_size(rs.cartan)


def test_d2_is_a1_squared():
    rs = rs_of("D2")
    assert rs.cartan == ((2, 0), (0, 2))
    assert rs.weyl_order == 4


def test_n_minus_r_even():
    for label in SMALL_TYPES:
        rs = rs_of(label)
        assert (rs.n - rs.r) % 2 == 0


# -- exact algebra ------------------------------------------------------------


def test_inner_examples(A1, A2):
    assert inner(A1, [1], [1]) == F(1, 2)
    assert inner(A2, [1, 1], [1, 1]) == 2
    assert inner(A2, [0, 0], [3, -7]) == 0


def test_inner_dimension_mismatch(A2):
    with pytest.raises(ValueError):
        inner(A2, [1], [1, 1])


def test_pairing_examples(A2, B2):
    assert pairing_with_root(A2, A2.positive_roots.index((1, 0)), [1, 1]) == 1
    assert pairing_with_root(A2, A2.positive_roots.index((1, 1)), [1, 1]) == 2
    assert pairing_with_root(B2, B2.positive_roots.index((0, 1)), [1, 1]) == F(1, 2)
    assert sorted(B2.rho_pairings) == [F(1, 2), 1, F(3, 2), 2]


def test_pairing_index_out_of_range(A2):
    with pytest.raises(IndexError):
        pairing_with_root(A2, 3, [1, 1])


def test_weyl_dim_examples(A2):
    assert weyl_dim(A2, [0, 0]) == 1
    assert weyl_dim(A2, [1, 0]) == 3
    assert weyl_dim(A2, [1, 1]) == 8


def test_weyl_dim_adjoint():
    # the highest root is the adjoint highest weight, of dimension n
    for label in ["A3", "B3", "C3", "D4", "G2", "F4"]:
        rs = rs_of(label)
        highest = max(rs.positive_roots, key=sum)
        coords = [sum(h * rs.cartan[j][i] for j, h in enumerate(highest)) for i in range(rs.r)]
        assert weyl_dim(rs, coords) == rs.n


def test_weyl_dim_rejects_non_dominant(A2):
    with pytest.raises(ValueError):
        weyl_dim(A2, [-1, 0])
    with pytest.raises(ValueError):
        weyl_dim(A2, [F(1, 2), 0])


def test_casimir_examples(A1, A2):
    assert casimir(A2, [0, 0]) == 0
    assert casimir(A2, [1, 0]) == F(-8, 3)
    for k in range(12):
        assert casimir(A1, [k]) == -F((k + 1) ** 2 - 1, 2)


def test_sum_of_positive_roots_is_two_rho():
    for label in SMALL_TYPES:
        rs = rs_of(label)
        total = [0] * rs.r
        for alpha in rs.positive_roots:
            for i, a in enumerate(alpha):
                for j in range(rs.r):
                    total[j] += a * rs.cartan[i][j]
        assert total == [2] * rs.r


def test_coroot_duality():
    # <a_i^vee, w_j> = delta_ij with a_i^vee = 2 a_i / |a_i|^2
    for label in SMALL_TYPES:
        rs = rs_of(label)
        for i in range(rs.r):
            unit = tuple(int(i == j) for j in range(rs.r))
            row = rs.pairing_matrix[rs.positive_roots.index(unit)]
            assert [2 * p / rs.root_lengths[i] for p in row] == [int(i == j) for j in range(rs.r)]


def test_rho_pairings_positive_and_long_root_length():
    for label in SMALL_TYPES:
        rs = rs_of(label)
        assert all(p > 0 for p in rs.rho_pairings)
        assert max(rs.root_norms_squared) == 2


def test_coroot_gram_inverse_of_weight_gram():
    for label in SMALL_TYPES:
        rs = rs_of(label)
        g = np.array(rs.gram_weights, dtype=object)
        q = np.array(coroot_gram(rs), dtype=object)
        assert (g.dot(q) == np.eye(rs.r, dtype=int)).all()


def test_weights_to_roots(A2):
    assert weights_to_roots(A2, [1, 1]) == (1, 1)
    assert weights_to_roots(A2, [1, 0]) == (F(2, 3), F(1, 3))


# -- invariants ----------------------------------------------------------------

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SMALL_TYPES), st.data())
def test_inner_bilinear_symmetric(label, data):
    rs = rs_of(label)
    vec = st.lists(rationals, min_size=rs.r, max_size=rs.r)
    u, v, w = data.draw(vec), data.draw(vec), data.draw(vec)
    c = data.draw(rationals)
    assert inner(rs, u, v) == inner(rs, v, u)
    uw = [a + c * b for a, b in zip(u, w)]
    assert inner(rs, uw, v) == inner(rs, u, v) + c * inner(rs, w, v)
    if any(u):
        assert inner(rs, u, u) > 0


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SMALL_TYPES), st.data())
def test_reflection_invariance(label, data):
    rs = rs_of(label)
    vec = st.lists(rationals, min_size=rs.r, max_size=rs.r)
    u, v = data.draw(vec), data.draw(vec)
    i = data.draw(st.integers(0, rs.r - 1))
    su, sv = reflect(rs, i, u), reflect(rs, i, v)
    assert inner(rs, su, sv) == inner(rs, u, v)
    assert reflect(rs, i, su) == tuple(F(x) for x in u)

    def pairings(lam):
        pos = [sum(p * x for p, x in zip(row, lam)) for row in rs.pairing_matrix]
        return sorted(pos + [-p for p in pos])

    assert pairings(su) == pairings(u)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SMALL_TYPES), st.data())
def test_d_vanishes_on_walls(label, data):
    rs = rs_of(label)
    lam = data.draw(st.lists(st.integers(0, 6), min_size=rs.r, max_size=rs.r))
    i = data.draw(st.integers(0, rs.r - 1))
    lam[i] = 0
    assert math.prod(pairing_with_root(rs, k, lam) for k in range(rs.m)) == 0


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from(["A1", "A2", "B2", "G2", "A3"]),
    st.fractions(min_value=F(1, 9), max_value=9, max_denominator=9),
    st.data(),
)
def test_scaling_covariance(label, s, data):
    base = rs_of(label)
    scaled = build_root_system(parse_group(label, [s]))
    lam = data.draw(st.lists(st.integers(0, 5), min_size=base.r, max_size=base.r))
    assert scaled.rho_pairings == tuple(s * p for p in base.rho_pairings)
    assert inner(scaled, lam, lam) == s * inner(base, lam, lam)
    assert weyl_dim(scaled, lam) == weyl_dim(base, lam)
    assert casimir(scaled, lam) == s * casimir(base, lam)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["A1", "A2", "B2", "G2"]), st.sampled_from(["A1", "B2", "A3"]), st.data())
def test_product_factorizes(left, right, data):
    a, b = rs_of(left), rs_of(right)
    prod = rs_of(f"{left}x{right}")
    assert (prod.r, prod.m, prod.n) == (a.r + b.r, a.m + b.m, a.n + b.n)
    assert prod.weyl_order == a.weyl_order * b.weyl_order
    x = data.draw(st.lists(st.integers(0, 4), min_size=a.r, max_size=a.r))
    y = data.draw(st.lists(st.integers(0, 4), min_size=b.r, max_size=b.r))
    assert weyl_dim(prod, x + y) == weyl_dim(a, x) * weyl_dim(b, y)
    assert casimir(prod, x + y) == casimir(a, x) + casimir(b, y)


# -- dominant weights -------------------------------------------------------------


def test_dominant_weights_examples(A1, A2):
    assert [w.coords for w in dominant_weights_within(A1, 1.5)] == [(0,), (1,), (2,)]
    assert [w.coords for w in dominant_weights_within(A2, 1.0)] == [(0, 0), (0, 1), (1, 0)]
    for label in ["A1", "B2", "F4"]:
        assert [w.coords for w in dominant_weights_within(rs_of(label), 1e-9)] == [(0,) * rs_of(label).r]


def test_dominant_weights_boundary_is_exact(A1):
    # |2 w| = sqrt(2) exactly; the closed ball keeps it
    pts = [w.coords for w in dominant_weights_within(A1, math.sqrt(2))]
    assert pts[-1] == (2,)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["A1", "A2", "B2", "G2", "A3"]), st.floats(0.1, 4.0))
def test_dominant_weights_vs_box_scan(label, radius):
    rs = rs_of(label)
    g = np.array(rs.gram_weights, dtype=float)
    side = int(radius / math.sqrt(min(np.diag(g)))) + 2
    grid = np.stack(np.meshgrid(*[np.arange(side)] * rs.r, indexing="ij"), -1).reshape(-1, rs.r)
    norms = np.einsum("ij,jk,ik->i", grid, g, grid)
    expected = sorted(tuple(int(v) for v in row) for row, q in zip(grid, norms) if q <= radius**2 * (1 - 1e-9))
    got = [w.coords for w in dominant_weights_within(rs, radius)]
    assert got == sorted(got)
    assert all(inner(rs, w, w) <= F(radius) ** 2 for w in got)
    assert set(expected) <= set(got)


def test_weight_flags():
    assert Weight((0, 2)).is_dominant and not Weight((0, 2)).is_strictly_dominant
    assert not Weight((-1, 2)).is_dominant


# -- parsing and validation ----------------------------------------------------------


@pytest.mark.parametrize("text", ["A1xA1", "A1 x A1", " a1X a1 "])
def test_parse_whitespace_insensitive(text):
    assert parse_group(text).factors == (("A", 1), ("A", 1))


@pytest.mark.parametrize("text", ["A0", "E5", "F3", "G3", "D1", "Q2", "", "A2x", "A-1"])
def test_parse_rejects(text):
    with pytest.raises(RootSystemError):
        build_root_system(parse_group(text))


def test_parse_rejects_bad_scale():
    with pytest.raises(RootSystemError):
        parse_group("A1xA1", [1, 2, 3])
    with pytest.raises(RootSystemError):
        parse_group("A1", [-1])


def test_single_scale_applies_to_every_factor():
    assert parse_group("A1xA1", [3]).scale == (3, 3)


def test_cartan_matrix_bourbaki():
    assert cartan_matrix("B", 2) == [[2, -2], [-1, 2]]
    assert cartan_matrix("C", 2) == [[2, -1], [-2, 2]]
    assert cartan_matrix("G", 2) == [[2, -1], [-3, 2]]


def test_load_cartan_file(tmp_path):
    path = tmp_path / "g2.json"
    path.write_text(json.dumps({"cartan": [[2, -1], [-3, 2]], "scale": [3]}))
    rs = build_root_system(load_cartan_file(path))
    ref = build_root_system(parse_group("G2", [3]))
    assert rs.weyl_order == 12
    assert set(rs.positive_roots) == set(ref.positive_roots)
    assert rs.rho_pairings == ref.rho_pairings


@pytest.mark.parametrize(
    "cartan",
    [
        [[2, -1], [-1, -2]],  # bad diagonal
        [[2, 1], [1, 2]],  # positive off-diagonal
        [[2, -1], [0, 2]],  # asymmetric zero pattern
        [[2, -2], [-2, 2]],  # affine A1, not positive definite
        [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]],  # affine A2
        [[2, -1], [-1]],
    ],
)
def test_bad_cartan_files(tmp_path, cartan):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"cartan": cartan}))
    with pytest.raises(RootSystemError):
        build_root_system(load_cartan_file(path))


def test_unreadable_cartan_file(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    with pytest.raises(RootSystemError):
        load_cartan_file(path)
