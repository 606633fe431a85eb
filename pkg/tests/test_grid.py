import numpy as np
import pytest

import anderson2d as a2
from anderson2d import TorusGrid, GridMismatchError

from conftest import random_field

PI = np.pi


def test_grid_basic_invariants():
    g = TorusGrid(32)
    assert g.n * g.h == pytest.approx(2 * PI, rel=1e-15)
    assert g.total_measure == pytest.approx(4 * PI**2, rel=1e-12)
    with pytest.raises(ValueError):
        TorusGrid(7)
    with pytest.raises(ValueError):
        TorusGrid(-4)


def test_inner_l2_values(grid16):
    g = grid16
    one = np.ones((g.n, g.n))
    assert a2.inner_l2(g, one, one) == pytest.approx(4 * PI**2, rel=1e-12)
    c1 = np.cos(g.x1 + 0 * g.x2)
    s1 = np.sin(g.x1 + 0 * g.x2)
    assert abs(a2.inner_l2(g, c1, s1)) <= 1e-12
    assert a2.inner_l2(g, c1, c1) == pytest.approx(2 * PI**2, rel=1e-12)


def test_inner_l2_grid_mismatch(grid8, grid16):
    with pytest.raises(GridMismatchError):
        a2.inner_l2(grid8, np.ones((8, 8)), np.ones((16, 16)))


def test_norm_lp(grid16):
    g = grid16
    one = np.ones((g.n, g.n))
    assert a2.norm_lp(g, one, 2) == pytest.approx(2 * PI, rel=1e-12)
    assert a2.norm_lp(g, -3 * one, np.inf) == 3.0
    # int cos^4 over the torus = (3/8) * 4 pi^2, exact for band-limited u
    c1 = np.cos(g.x1 + 0 * g.x2)
    assert a2.norm_lp(g, c1, 4) == pytest.approx((4 * PI**2 * 3 / 8) ** 0.25,
                                                 rel=1e-12)
    with pytest.raises(ValueError):
        a2.norm_lp(g, one, 0.5)


def test_norm_lp_quadrature_oracle(grid8):
    # independent quadrature on a much finer grid; the positive profile
    # keeps |u|^3 band-limited so both quadratures are exact
    u8 = 2.0 + np.cos(grid8.x1 + 0 * grid8.x2)
    gf = TorusGrid(128)
    uf = 2.0 + np.cos(gf.x1 + 0 * gf.x2)
    p = 3.0
    fine = (gf.cell_measure * np.sum(np.abs(uf) ** p)) ** (1 / p)
    assert a2.norm_lp(grid8, u8, p) == pytest.approx(fine, rel=1e-12)


def test_geodesic_dist(grid16):
    g = grid16
    assert a2.geodesic_dist(g, (3, 5), (3, 5)) == 0.0
    assert a2.geodesic_dist(g, (0, 0), (g.n // 2, 0)) == pytest.approx(PI)
    assert a2.geodesic_dist(g, (0, 0), (g.n - 1, 0)) == pytest.approx(g.h)
    # symmetry and torus diameter
    assert a2.geodesic_dist(g, (1, 2), (9, 14)) == a2.geodesic_dist(g, (9, 14), (1, 2))
    assert a2.geodesic_dist(g, (0, 0), (8, 8)) <= PI * np.sqrt(2) + 1e-12
    with pytest.raises(IndexError):
        a2.geodesic_dist(g, (0, 0), (16, 0))


def test_dft_round_trip_and_modes(grid16):
    g = grid16
    one = np.ones((g.n, g.n))
    hat = a2.dft_forward(g, one)
    assert hat[0, 0] == pytest.approx(1.0)
    assert np.max(np.abs(hat.ravel()[1:])) <= 1e-14
    c1 = np.cos(g.x1 + 0 * g.x2)
    hat = a2.dft_forward(g, c1)
    assert hat[1, 0] == pytest.approx(0.5, abs=1e-13)
    assert hat[-1, 0] == pytest.approx(0.5, abs=1e-13)

    u = random_field(g, 3)
    back = a2.dft_inverse(g, a2.dft_forward(g, u))
    assert np.max(np.abs(back - u)) <= 1e-12 * np.max(np.abs(u))


def test_hermitian_symmetry(grid16):
    u = random_field(grid16, 11)
    hat = a2.dft_forward(grid16, u)
    from anderson2d.grid import hermitian_symmetry_defect
    assert hermitian_symmetry_defect(grid16, hat) <= 1e-12


def test_parseval(grid16):
    g = grid16
    u, v = random_field(g, 1), random_field(g, 2)
    lhs = a2.inner_l2(g, u, v)
    rhs = 4 * PI**2 * np.real(np.sum(a2.dft_forward(g, u)
                                     * np.conj(a2.dft_forward(g, v))))
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_convolve_identities(grid8):
    g = grid8
    u = random_field(g, 5)
    delta = a2.dirac(g, (0, 0))
    assert np.max(np.abs(a2.convolve(g, u, delta) - u)) <= 1e-10
    one = np.ones((g.n, g.n))
    expect = g.cell_measure * np.sum(u)
    assert np.max(np.abs(a2.convolve(g, u, one) - expect)) <= 1e-10


def test_convolve_matches_double_sum(grid8):
    g = grid8
    u, w = random_field(g, 6), random_field(g, 7)
    direct = np.zeros((g.n, g.n))
    for i in range(g.n):
        for j in range(g.n):
            acc = 0.0
            for k in range(g.n):
                for l in range(g.n):
                    acc += w[(i - k) % g.n, (j - l) % g.n] * u[k, l]
            direct[i, j] = g.cell_measure * acc
    fast = a2.convolve(g, u, w)
    assert np.max(np.abs(fast - direct)) <= 1e-10
    assert np.max(np.abs(fast - a2.convolve(g, w, u))) <= 1e-12


def test_norm_lp_even_abs_invariance(grid16):
    u = random_field(grid16, 9)
    assert a2.norm_lp(grid16, np.abs(u), 4) == pytest.approx(
        a2.norm_lp(grid16, u, 4), rel=1e-14)


def test_field_io_roundtrip(tmp_path, grid8):
    u = random_field(grid8, 12)
    for ext in ("csv", "f64"):
        path = tmp_path / f"field.{ext}"
        a2.save_field(grid8, u, path)
        g2, v = a2.load_field(path)
        assert g2.n == grid8.n
        assert np.array_equal(u, v)  # 17 sig digits round-trips float64

    # byte-exactness of repeated dumps
    p1, p2 = tmp_path / "a.f64", tmp_path / "b.f64"
    a2.save_field(grid8, u, p1)
    a2.save_field(grid8, u, p2)
    assert p1.read_bytes() == p2.read_bytes()
