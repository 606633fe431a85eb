"""Discrete geometry and calculus on the flat 2-torus [0, 2*pi)^2.

Fields are real (n, n) numpy arrays indexed row-major as (x1-index,
x2-index).  All integrals are the uniform quadrature h^2 * sum, which is
exact for band-limited integrands, so the spectral identities (Parseval,
convolution theorem) hold to rounding.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi


class GridMismatchError(ValueError):
    """Two fields live on different grids."""


@dataclass(frozen=True)
class TorusGrid:
    """Uniform n x n grid on [0, 2*pi)^2 with spectral wavenumbers.

    Attributes:
        n: points per axis, positive and even.
        h: spacing 2*pi / n.
    """

    n: int
    h: float = field(init=False)

    def __post_init__(self):
        if self.n <= 0 or self.n % 2 != 0:
            raise ValueError(f"grid size must be positive and even, got {self.n}")
        object.__setattr__(self, "h", TWO_PI / self.n)

    @property
    def x1(self):
        """Coordinate array along the first axis, shape (n, 1)."""
        return (self.h * np.arange(self.n))[:, None]

    @property
    def x2(self):
        """Coordinate array along the second axis, shape (1, n)."""
        return (self.h * np.arange(self.n))[None, :]

    @property
    def k1(self):
        """Integer wavenumbers along axis 0 in FFT layout, shape (n, 1)."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n)[:, None]

    @property
    def k2(self):
        """Integer wavenumbers along axis 1 in FFT layout, shape (1, n)."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n)[None, :]

    @property
    def lap_multiplier(self):
        """Fourier symbol of the Laplacian, -(k1^2 + k2^2), FFT layout."""
        return -(self.k1**2 + self.k2**2)

    @property
    def cell_measure(self):
        return self.h * self.h

    @property
    def total_measure(self):
        return self.cell_measure * self.n * self.n

    def canonical_wavenumbers(self):
        """Wavenumber pairs in the canonical lexicographic order.

        Returns an (n^2, 2) integer array of (kx1, kx2) with each component
        in [-n/2, n/2), sorted lexicographically.  All spectral dumps use
        this order.
        """
        half = self.n // 2
        ks = np.arange(-half, half)
        kk1, kk2 = np.meshgrid(ks, ks, indexing="ij")
        return np.stack([kk1.ravel(), kk2.ravel()], axis=1)

    def zeros(self):
        return np.zeros((self.n, self.n))

    def check_field(self, u):
        u = np.asarray(u, dtype=float)
        if u.shape != (self.n, self.n):
            raise GridMismatchError(
                f"field shape {u.shape} does not match grid ({self.n}, {self.n})"
            )
        return u


def inner_l2(grid, u, v):
    """L^2 inner product h^2 * sum(u * v)."""
    u = grid.check_field(u)
    v = grid.check_field(v)
    return grid.cell_measure * float(np.sum(u * v))


def norm_l2(grid, u):
    return np.sqrt(max(inner_l2(grid, u, u), 0.0))


def norm_lp(grid, u, p):
    """L^p norm (h^2 sum |u|^p)^{1/p}; max |u| for p = inf."""
    u = grid.check_field(u)
    if p == np.inf:
        return float(np.max(np.abs(u)))
    if p < 1:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    return float((grid.cell_measure * np.sum(np.abs(u) ** p)) ** (1.0 / p))


def geodesic_dist(grid, x, y):
    """Geodesic (wrap-around) distance between two grid points given as
    index pairs."""
    d = 0.0
    for xi, yi in zip(x, y):
        if not (0 <= xi < grid.n and 0 <= yi < grid.n):
            raise IndexError(f"grid index out of range: {x}, {y}")
        delta = abs(xi - yi) * grid.h
        delta = min(delta, TWO_PI - delta)
        d += delta * delta
    return float(np.sqrt(d))


def geodesic_dist_field(grid, x0=(0, 0)):
    """Field of geodesic distances d(., x0); d(x0, x0) = 0."""
    i = np.arange(grid.n)
    d1 = np.abs(i - x0[0]) * grid.h
    d1 = np.minimum(d1, TWO_PI - d1)
    d2 = np.abs(i - x0[1]) * grid.h
    d2 = np.minimum(d2, TWO_PI - d2)
    return np.sqrt(d1[:, None] ** 2 + d2[None, :] ** 2)


def dft_forward(grid, u):
    """Fourier coefficients u_hat(k) = n^-2 sum_x u(x) e^{-i k.x}, FFT layout."""
    u = grid.check_field(u)
    return np.fft.fft2(u) / (grid.n * grid.n)


def dft_inverse(grid, u_hat):
    """Inverse of :func:`dft_forward`; returns the real field."""
    u_hat = np.asarray(u_hat, dtype=complex)
    if u_hat.shape != (grid.n, grid.n):
        raise GridMismatchError(
            f"coefficient shape {u_hat.shape} does not match grid"
        )
    return np.real(np.fft.ifft2(u_hat * (grid.n * grid.n)))


def hermitian_symmetry_defect(grid, u_hat):
    """Relative defect of coeff(-k) = conj(coeff(k)); ~0 for real fields."""
    flipped = np.conj(np.roll(np.flip(u_hat, axis=(0, 1)), 1, axis=(0, 1)))
    scale = np.max(np.abs(u_hat)) or 1.0
    return float(np.max(np.abs(u_hat - flipped)) / scale)


def canonical_coefficients(grid, u_hat):
    """Flatten FFT-layout coefficients into the canonical wavenumber order."""
    half = grid.n // 2
    shifted = np.fft.fftshift(u_hat)  # rows/cols now ordered -n/2 .. n/2-1
    del half
    return shifted.ravel()


def convolve(grid, u, w):
    """Periodic convolution (w * u)(x) = h^2 sum_y w(x - y) u(y), spectral."""
    u = grid.check_field(u)
    w = grid.check_field(w)
    return grid.cell_measure * np.real(
        np.fft.ifft2(np.fft.fft2(u) * np.fft.fft2(w))
    )


def dirac(grid, x0):
    """Discrete Dirac mass at x0: h^-2 at the node, so inner_l2(delta, phi)
    = phi(x0)."""
    d = grid.zeros()
    d[x0[0], x0[1]] = 1.0 / grid.cell_measure
    return d


# ---------------------------------------------------------------------------
# field dump formats: .csv (i,j,value) and .f64 (raw little-endian binary)

_F64_HEADER = struct.Struct("<II")


def save_field(grid, u, path):
    """Write a field to `path`; format chosen by extension (.csv or .f64)."""
    u = grid.check_field(u)
    path = str(path)
    if path.endswith(".csv"):
        with open(path, "w") as fh:
            fh.write("i,j,value\n")
            for i in range(grid.n):
                for j in range(grid.n):
                    fh.write(f"{i},{j},{u[i, j]:.17g}\n")
    elif path.endswith(".f64"):
        with open(path, "wb") as fh:
            fh.write(_F64_HEADER.pack(grid.n, 0))
            fh.write(np.ascontiguousarray(u, dtype="<f8").tobytes())
    else:
        raise ValueError(f"unknown field extension for {path!r} (use .csv or .f64)")


def load_field(path):
    """Read a field written by :func:`save_field`; returns (grid, values)."""
    path = str(path)
    if path.endswith(".csv"):
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        n = int(data[:, 0].max()) + 1
        grid = TorusGrid(n)
        u = np.zeros((n, n))
        u[data[:, 0].astype(int), data[:, 1].astype(int)] = data[:, 2]
        return grid, u
    if path.endswith(".f64"):
        with open(path, "rb") as fh:
            n, _ = _F64_HEADER.unpack(fh.read(_F64_HEADER.size))
            u = np.frombuffer(fh.read(), dtype="<f8").reshape(n, n).copy()
        return TorusGrid(n), u
    raise ValueError(f"unknown field extension for {path!r} (use .csv or .f64)")
