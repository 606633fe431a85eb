"""Kato-class moduli, form bounds and the spectral theory of -H_c + a.

The two Kato moduli (log-kernel and heat-kernel form) are the discrete
versions of the equivalent smallness conditions that make the quadratic
form -H_c + a well behaved; the eigendecomposition orders its spectrum
mu_0 <= mu_1 <= ... , records the last non-positive index m, and the gap
delta is the minimum of the generalized Rayleigh quotient
(v, (-H_c + a) v) / (v, (-H_c) v) over the complement of the first m+1
eigenfields.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np
import scipy.linalg
import scipy.sparse.linalg as spla

from .grid import geodesic_dist_field, inner_l2
from .operator import DENSE_LIMIT, SolverError
from .potentials import Potential


class SpectralInconsistencyError(RuntimeError):
    """A computed quantity violates a structural sign constraint."""


@dataclass
class Spectrum:
    """Ordered low eigenpairs of the form -H_c + a.

    eigenfields are L^2-orthonormal; m is the largest index with mu <= 0
    (-1 if mu_0 > 0); delta is filled by gap_delta.
    """

    eigenvalues: np.ndarray
    eigenfields: List[np.ndarray]
    m: int
    delta: float = np.nan
    residuals: np.ndarray = field(default=None)


def _as_field(a):
    return a.field if isinstance(a, Potential) else a


def kato_modulus_log(grid, a, r):
    """sup_x of the quadrature of |ln d(x, .)| |a| over the ball d < r.

    The log singularity at the center node is replaced by |ln(h/2)|.
    Translation invariance of d makes this a periodic convolution.
    """
    a = grid.check_field(_as_field(a))
    if not (0 < r < 1):
        raise ValueError(f"radius must lie in (0, 1), got {r}")
    if r <= grid.h:
        raise ValueError(f"radius {r} does not exceed the spacing {grid.h}")
    d = geodesic_dist_field(grid, (0, 0))
    kernel = np.zeros_like(d)
    mask = d < r
    np.log(np.where(mask & (d > 0), d, 1.0), out=kernel)
    kernel = np.abs(kernel)
    kernel[0, 0] = abs(np.log(grid.h / 2.0))
    kernel *= mask
    # value(x) = h^2 sum_y kernel(x - y) |a(y)|: circular convolution
    conv = np.real(np.fft.ifft2(np.fft.fft2(kernel) * np.fft.fft2(np.abs(a))))
    return float(grid.cell_measure * conv.max())


def kato_modulus_heat(op, a, T, n_nodes=16):
    """sup_x int_0^T (e^{s H_c} |a|)(x) ds on a geometric time grid."""
    if not (0 < T <= 1):
        raise ValueError(f"horizon must lie in (0, 1], got {T}")
    grid = op.grid
    a = grid.check_field(_as_field(a))
    s_nodes = np.geomspace(T / 256.0, T, n_nodes)
    profiles = np.stack([op.heat_apply(s, np.abs(a)) for s in s_nodes])
    integral = np.trapezoid(profiles, s_nodes, axis=0)
    # leading [0, T/256] sliver: integrand is continuous at 0+ with value |a|
    integral += s_nodes[0] * profiles[0]
    return float(integral.max())


def resolvent_sup_norm(op, a, lam):
    """||(-H_c + lam)^{-1} |a| ||_inf."""
    a = op.grid.check_field(_as_field(a))
    sol = op.resolvent_solve(lam, np.abs(a))
    return float(np.max(np.abs(sol)))


def form_bound_constant(op, a, eta):
    """Smallest m_eta with <u, |a| u> <= eta ||u||_E^2 + m_eta ||u||^2.

    Equals the positive part of the top eigenvalue of the symmetric
    operator M_{|a|} - eta (-H_c).
    """
    if eta <= 0:
        raise ValueError(f"eta must be positive, got {eta}")
    grid = op.grid
    a = np.abs(grid.check_field(_as_field(a)))
    n = grid.n
    if n <= DENSE_LIMIT:
        mat = -eta * (-op.dense_h() + op.c * np.eye(n * n))
        mat[np.diag_indices_from(mat)] += a.ravel()
        top = float(scipy.linalg.eigvalsh(mat)[-1])
    else:
        def matvec(v):
            u = v.reshape(n, n)
            return (a * u - eta * op.apply_minus_hc(u)).ravel()

        lin = spla.LinearOperator((n * n, n * n), matvec=matvec, dtype=float)
        try:
            top = float(spla.eigsh(lin, k=1, which="LA",
                                   return_eigenvectors=False, tol=1e-10)[0])
        except spla.ArpackNoConvergence as exc:
            raise SolverError(f"form-bound eigensolve did not converge: {exc}")
    return max(top, 0.0)


def _index_m(vals):
    """Largest index with mu <= 0 (-1 if none); eigenvalues within rounding
    of zero count as non-positive so the index is rounding-stable."""
    vals = np.asarray(vals)
    tol = 1e-10 * (1.0 + float(np.max(np.abs(vals))))
    return int(np.sum(vals <= tol)) - 1


def _canonical_sign(grid, v):
    """Fix the sign so the largest-magnitude entry is positive."""
    flat = v.ravel()
    i = int(np.argmax(np.abs(flat)))
    return -v if flat[i] < 0 else v


def _canonicalize_clusters(grid, vals, vecs, tol=1e-9):
    """Reproducible bases inside numerically degenerate eigenclusters.

    Within each cluster (consecutive gaps < tol) the subspace is re-spanned
    by projecting the canonical Fourier modes, in canonical wavenumber
    order, onto the cluster and orthonormalizing; signs are then fixed.
    """
    n = grid.n
    ks = grid.canonical_wavenumbers()
    out = [v.copy() for v in vecs]
    i = 0
    while i < len(vals):
        j = i + 1
        while j < len(vals) and vals[j] - vals[j - 1] < tol:
            j += 1
        if j - i > 1:
            basis = np.stack([out[t].ravel() for t in range(i, j)], axis=1)
            # L^2-orthonormal columns; projector P = basis basis^T h^2
            new_cols = []
            for k1, k2 in ks:
                phase = np.exp(1j * (k1 * grid.x1 + k2 * grid.x2))
                for mode in (np.real(phase), np.imag(phase)):
                    if np.max(np.abs(mode)) < 1e-12:
                        continue
                    coeff = basis.T @ mode.ravel() * grid.cell_measure
                    cand = basis @ coeff
                    for col in new_cols:
                        cand = cand - col * (col @ cand) * grid.cell_measure
                    nrm = np.sqrt(cand @ cand * grid.cell_measure)
                    if nrm > 1e-8:
                        new_cols.append(cand / nrm)
                    if len(new_cols) == j - i:
                        break
                if len(new_cols) == j - i:
                    break
            if len(new_cols) == j - i:
                for t, col in enumerate(new_cols):
                    out[i + t] = col.reshape(n, n)
        i = j
    return [_canonical_sign(grid, v) for v in out]


def eigendecompose(op, a, count):
    """Lowest `count` eigenpairs of the symmetric form -H_c + a."""
    grid = op.grid
    a = grid.check_field(_as_field(a))
    n = grid.n
    if count > n * n:
        raise ValueError(f"count {count} exceeds grid dimension {n * n}")
    if n <= DENSE_LIMIT:
        mat = -op.dense_h() + op.c * np.eye(n * n)
        mat[np.diag_indices_from(mat)] += a.ravel()
        vals, vecs = scipy.linalg.eigh(mat)
        m = _index_m(vals)
        vals_out = vals[:count]
        # eigh columns are Euclidean-orthonormal; rescale to L^2
        fields = [vecs[:, i].reshape(n, n) / grid.h for i in range(count)]
    else:
        def matvec(v):
            u = v.reshape(n, n)
            return (op.apply_minus_hc(u) + a * u).ravel()

        lin = spla.LinearOperator((n * n, n * n), matvec=matvec, dtype=float)
        k = count
        while True:
            try:
                vals_out, vecs = spla.eigsh(lin, k=k, which="SA", tol=1e-10)
            except spla.ArpackNoConvergence as exc:
                raise SolverError(f"eigendecomposition did not converge: {exc}")
            if vals_out[-1] > 0 or k >= n * n - 1:
                break
            k = min(2 * k, n * n - 1)  # need a positive eigenvalue to place m
        m = _index_m(vals_out)
        fields = [vecs[:, i].reshape(n, n) / grid.h for i in range(count)]
        vals_out = vals_out[:count]
    fields = _canonicalize_clusters(grid, vals_out, fields)
    res = np.array([
        np.sqrt(max(inner_l2(grid, r, r), 0.0))
        for r in (op.apply_minus_hc(e) + a * e - mu * e
                  for mu, e in zip(vals_out, fields))
    ])
    return Spectrum(eigenvalues=np.asarray(vals_out, dtype=float),
                    eigenfields=fields, m=m, residuals=res)


def gap_delta(op, a, spectrum):
    """Positive gap of -H_c + a over the complement of its non-positive modes.

    delta = min over E_{>m} of (v, (-H_c + a) v) / (v, (-H_c) v); raises
    if the computed value is not strictly positive.
    """
    grid = op.grid
    a = grid.check_field(_as_field(a))
    n = grid.n
    m = spectrum.m
    if len(spectrum.eigenvalues) <= m + 1:
        raise ValueError("spectrum must contain at least m + 2 eigenpairs")
    if n <= DENSE_LIMIT:
        mat_a = -op.dense_h() + op.c * np.eye(n * n)
        mat_b = mat_a.copy()
        mat_a[np.diag_indices_from(mat_a)] += a.ravel()
        vals, vecs = scipy.linalg.eigh(mat_a)
        V = vecs[:, m + 1:]
        A_r = np.diag(vals[m + 1:])
        B_r = V.T @ mat_b @ V
        delta = float(scipy.linalg.eigh(A_r, B_r, eigvals_only=True)[0])
    else:
        def amat(v):
            u = np.asarray(v).reshape(n, n)
            return (op.apply_minus_hc(u) + a * u).reshape(-1, 1)

        def bmat(v):
            return op.apply_minus_hc(np.asarray(v).reshape(n, n)).reshape(-1, 1)

        A = spla.LinearOperator((n * n, n * n),
                                matvec=lambda v: amat(v).ravel(), dtype=float)
        B = spla.LinearOperator((n * n, n * n),
                                matvec=lambda v: bmat(v).ravel(), dtype=float)
        if m >= 0:
            # L^2-orthogonality to e_0..e_m == B-orthogonality to (-H_c)^{-1} e_i
            Y = np.stack([op.resolvent_solve(0.0, e).ravel()
                          for e in spectrum.eigenfields[:m + 1]], axis=1)
        else:
            Y = None
        rng = np.random.default_rng(0)
        X = rng.standard_normal((n * n, 3))
        vals, _ = spla.lobpcg(A, X, B=B, Y=Y, largest=False, tol=1e-10,
                              maxiter=500)
        delta = float(np.min(vals))
    if delta <= 0:
        raise SpectralInconsistencyError(
            f"computed spectral gap is not positive: delta = {delta}"
        )
    spectrum.delta = delta
    return delta
