"""Critical points of the energy functional for -H_c u + a u = f(., u).

The functional is Phi(u) = 1/2 ||u||_E^2 + int (1/2 a u^2 - F(., u)); its
critical points are the weak solutions.  Three searches are provided: a
Picard fixed-point baseline (no convergence guarantee, diagnostic only),
a path-deformation mountain-pass search for the case with no non-positive
form modes (m = -1), and a deflated Newton search seeded along eigenfield
directions for multi-solution sweeps.  Acceptance of a candidate is
residual-based and method-agnostic.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, List, Optional

import numpy as np
import scipy.linalg

from .grid import inner_l2, norm_l2
from .operator import DENSE_LIMIT, SolverError
from .potentials import Potential
from .spectral import eigendecompose


class NotFoundError(RuntimeError):
    """No acceptable critical point was located."""


# ---------------------------------------------------------------------------
# nonlinearities

@dataclass(frozen=True)
class Nonlinearity:
    """Pointwise nonlinearity f with antiderivative F and growth data.

    The callables act on value arrays; ell is the growth exponent of f
    (|f| <~ 1 + |z|^(ell-1)), gamma > 2 and k > 0 are the superquadraticity
    threshold data (gamma F <= z f for |z| >= k).
    """

    f: Callable[[np.ndarray], np.ndarray]
    dfdz: Callable[[np.ndarray], np.ndarray]
    F: Callable[[np.ndarray], np.ndarray]
    ell: float
    gamma: float
    k: float
    odd: bool
    name: str = "custom"


def pow3():
    """f(z) = z^3, the basic focusing cubic."""
    return Nonlinearity(
        f=lambda z: z**3,
        dfdz=lambda z: 3.0 * z**2,
        F=lambda z: 0.25 * z**4,
        ell=4.0, gamma=4.0, k=1.0, odd=True, name="pow3",
    )


def pow_ell(ell):
    """f(z) = z |z|^ell for even ell, the odd power family."""
    ell = int(ell)
    if ell <= 0 or ell % 2 != 0:
        raise ValueError(f"power must be a positive even integer, got {ell}")
    return Nonlinearity(
        f=lambda z: z * np.abs(z)**ell,
        dfdz=lambda z: (ell + 1.0) * np.abs(z)**ell,
        F=lambda z: np.abs(z)**(ell + 2) / (ell + 2.0),
        ell=float(ell + 2), gamma=float(ell + 2), k=1.0, odd=True,
        name=f"pow:{ell}",
    )


def tabulated(z_table, f_table, ell, gamma, k, odd=False):
    """Nonlinearity interpolated from samples, with quadrature-built F."""
    z_table = np.asarray(z_table, dtype=float)
    f_table = np.asarray(f_table, dtype=float)
    order = np.argsort(z_table)
    z_table, f_table = z_table[order], f_table[order]
    F_table = np.concatenate([[0.0], np.cumsum(
        0.5 * (f_table[1:] + f_table[:-1]) * np.diff(z_table))])
    F_table -= np.interp(0.0, z_table, F_table)
    df_table = np.gradient(f_table, z_table)
    return Nonlinearity(
        f=lambda z: np.interp(z, z_table, f_table),
        dfdz=lambda z: np.interp(z, z_table, df_table),
        F=lambda z: np.interp(z, z_table, F_table),
        ell=ell, gamma=gamma, k=k, odd=odd, name="tabulated",
    )


def from_spec(spec):
    """Resolve `pow3` or `pow:<ell>` nonlinearity strings."""
    if spec == "pow3":
        return pow3()
    if spec.startswith("pow:"):
        return pow_ell(int(spec.split(":")[1]))
    raise ValueError(f"unknown nonlinearity spec {spec!r}")


def check_assumption_a(nl, z_max=None, n_samples=2001):
    """Numerically audit the structural growth conditions on f.

    Checks |f| <= C (1 + |z|^(ell-1)), |f'| <= C' (1 + |z|^(ell-2)),
    F >= 0, gamma F <= z f on |z| >= k, the coercive lower bound
    F >= c1 |z|^gamma - c2, and f(z) = o(z) near zero.  Raises ValueError
    with a witness for any violated condition.
    """
    if z_max is None:
        z_max = 10.0 * max(nl.k, 1.0)
    z = np.linspace(-z_max, z_max, n_samples)
    fz, dfz, Fz = nl.f(z), nl.dfdz(z), nl.F(z)

    report = {}
    report["C_f"] = float(np.max(np.abs(fz) / (1.0 + np.abs(z)**(nl.ell - 1))))
    report["C_fprime"] = float(np.max(np.abs(dfz) / (1.0 + np.abs(z)**(nl.ell - 2))))

    if np.min(Fz) < -1e-12:
        i = int(np.argmin(Fz))
        raise ValueError(f"F is negative: F({z[i]}) = {Fz[i]}")
    big = np.abs(z) >= nl.k
    slack = z[big] * fz[big] - nl.gamma * Fz[big]
    if np.min(slack) < -1e-10 * (1.0 + np.max(np.abs(z[big] * fz[big]))):
        i = int(np.argmin(slack))
        zi = z[big][i]
        raise ValueError(
            f"superquadraticity fails at z = {zi}: "
            f"gamma F = {nl.gamma * nl.F(zi)} > z f = {zi * nl.f(zi)}"
        )
    # F >= c1 |z|^gamma - c2: fit c1 from the far field, then c2
    far = np.abs(z) >= max(2.0 * nl.k, 0.5 * z_max)
    c1 = float(np.min(Fz[far] / np.abs(z[far])**nl.gamma))
    c2 = float(max(np.max(c1 * np.abs(z)**nl.gamma - Fz), 0.0))
    report["c1"], report["c2"] = c1, c2
    if c1 <= 0:
        raise ValueError(f"no positive coercivity constant: c1 = {c1}")

    z_small = np.geomspace(1e-8, 1e-2, 25)
    ratio = np.abs(nl.f(z_small)) / z_small
    if not (ratio[0] <= 1e-3 or ratio[0] <= 0.1 * ratio[-1]):
        raise ValueError(
            f"f(z)/z does not vanish near 0: f({z_small[0]})/z = {ratio[0]}"
        )
    if nl.odd:
        defect = np.max(np.abs(nl.f(z) + nl.f(-z)))
        if defect > 1e-10 * (1.0 + np.max(np.abs(fz))):
            raise ValueError(f"declared odd but f(z) + f(-z) defect = {defect}")
    quad_defect = np.max(np.abs(np.gradient(Fz, z) - fz)[10:-10])
    report["F_quadrature_defect"] = float(quad_defect)
    return report


# ---------------------------------------------------------------------------
# the functional

@dataclass(frozen=True)
class AndersonProblem:
    op: object
    a: Potential
    nl: Nonlinearity

    def __post_init__(self):
        self.op.grid.check_field(self.a.field)

    @property
    def grid(self):
        return self.op.grid


@dataclass
class SolveResult:
    u: np.ndarray
    phi: float
    residual_l2: float
    grad_e_norm: float
    iterations: int
    method: str
    converged: bool
    trace: List[tuple] = dc_field(default_factory=list)
    seed: Optional[int] = None
    info: dict = dc_field(default_factory=dict)


def energy(problem, u):
    """Phi(u) = 1/2 ||u||_E^2 + int (1/2 a u^2 - F(., u))."""
    op, grid = problem.op, problem.grid
    u = grid.check_field(u)
    quad = 0.5 * op.energy_norm(u)**2
    rest = grid.cell_measure * float(
        np.sum(0.5 * problem.a.field * u * u - problem.nl.F(u)))
    val = quad + rest
    if not np.isfinite(val):
        raise OverflowError("energy overflowed; field is too large")
    return val


def residual(problem, u):
    """(-H_c + a) u - f(., u), the L^2 representative of Phi'(u)."""
    op = problem.op
    return op.apply_minus_hc(u) + problem.a.field * u - problem.nl.f(u)


def energy_gradient(problem, u):
    """Return (residual, grad_e) with grad_e the Riesz gradient in E.

    grad_e = (-H_c)^{-1} residual, so <grad_e, v>_E = Phi'(u)(v); its
    E-norm is sqrt(<residual, grad_e>_{L^2}).
    """
    r = residual(problem, u)
    g = problem.op.resolvent_solve(0.0, r)
    return r, g


def grad_e_norm(problem, r, g):
    return float(np.sqrt(max(inner_l2(problem.grid, r, g), 0.0)))


# ---------------------------------------------------------------------------
# searches

def picard_baseline(problem, u0=None, max_iter=200, tol=1e-10):
    """Fixed-point iteration u <- (-H_c)^{-1} (f(., u) - a u).

    A diagnostic baseline only: convergence is not guaranteed; divergence
    (||u|| > 1e8) is a reported outcome, not an error.
    """
    op, grid = problem.op, problem.grid
    u = grid.zeros() if u0 is None else grid.check_field(u0).copy()
    trace = []
    for it in range(max_iter):
        r = residual(problem, u)
        res = norm_l2(grid, r)
        trace.append((energy(problem, u), res, op.energy_norm(u)))
        if res <= tol * (1.0 + norm_l2(grid, u)):
            return SolveResult(u=u, phi=energy(problem, u), residual_l2=res,
                               grad_e_norm=res, iterations=it, method="picard",
                               converged=True, trace=trace)
        if norm_l2(grid, u) > 1e8:
            return SolveResult(u=u, phi=np.inf, residual_l2=res,
                               grad_e_norm=res, iterations=it, method="picard",
                               converged=False, trace=trace,
                               info={"diverged": True})
        u = op.resolvent_solve(0.0, problem.nl.f(u) - problem.a.field * u)
    r = residual(problem, u)
    res = norm_l2(grid, r)
    return SolveResult(u=u, phi=energy(problem, u), residual_l2=res,
                       grad_e_norm=res, iterations=max_iter, method="picard",
                       converged=False, trace=trace)


def _deflation_factor(grid, u, roots, rho, with_grad=False):
    """Multiplicative deflation penalty against +/- each root.

    Within L^2 distance rho of a root the factor grows like 1/d^2 (shifted
    so it is continuous, = 1 at distance rho); outside it is 1.
    """
    M = 1.0
    grad = np.zeros_like(u)
    for root in roots:
        for s in (1.0, -1.0):
            diff = u - s * root
            d2 = max(inner_l2(grid, diff, diff), 1e-30)
            if d2 < rho * rho:
                M *= 1.0 + 1.0 / d2 - 1.0 / (rho * rho)
                if with_grad:
                    # d/du of the factor, divided by the factor itself later
                    grad += (-2.0 * grid.cell_measure / (d2 * d2)) * diff \
                        / (1.0 + 1.0 / d2 - 1.0 / (rho * rho))
    if with_grad:
        return M, grad
    return M


def _newton_step_dense(problem, u, G, M, Mgrad):
    """Newton step for the deflated system G(u) = M(u) R(u), dense path."""
    op, grid = problem.op, problem.grid
    n = grid.n
    J = -op.dense_h() + op.c * np.eye(n * n)
    J[np.diag_indices_from(J)] += (problem.a.field - problem.nl.dfdz(u)).ravel()
    # Mgrad holds grad(log M), so J_G = M J + (M R) grad(log M)^T
    JG = M * J + np.outer(G.ravel(), Mgrad.ravel())
    try:
        step = scipy.linalg.solve(JG, -G.ravel())
    except scipy.linalg.LinAlgError:
        raise SolverError("singular deflated Jacobian")
    return step.reshape(n, n)


def _newton_step_krylov(problem, u, G, M, Mgrad):
    import scipy.sparse.linalg as spla
    op, grid = problem.op, problem.grid
    n = grid.n
    dfu = problem.nl.dfdz(u)

    def matvec(v):
        w = v.reshape(n, n)
        Jv = op.apply_minus_hc(w) + (problem.a.field - dfu) * w
        return (M * Jv + G * float(np.sum(Mgrad * w))).ravel()

    A = spla.LinearOperator((n * n, n * n), matvec=matvec, dtype=float)
    sym = -grid.lap_multiplier + op.c

    def precond(v):
        return np.real(np.fft.ifft2(np.fft.fft2(v.reshape(n, n)) / sym)).ravel() / M

    Mop = spla.LinearOperator((n * n, n * n), matvec=precond, dtype=float)
    step, info = spla.lgmres(A, -G.ravel(), M=Mop, rtol=1e-8, atol=0.0,
                             maxiter=200)
    if info != 0:
        raise SolverError(f"deflated Newton linear solve stalled (info={info})")
    return step.reshape(n, n)


def newton_solve(problem, u0, tol=1e-6, max_iter=100, deflate=(), rho=0.5):
    """Damped Newton on the (optionally deflated) residual system.

    Returns (u, iterations) on success; raises SolverError / NotFoundError
    otherwise.  Acceptance is on the *undeflated* relative residual.
    """
    grid = problem.grid
    u = grid.check_field(u0).copy()
    dense = grid.n <= DENSE_LIMIT
    for it in range(max_iter):
        R = residual(problem, u)
        res = norm_l2(grid, R)
        if res <= tol * (1.0 + norm_l2(grid, u)):
            return u, it
        M, Mgrad = _deflation_factor(grid, u, deflate, rho, with_grad=True)
        G = M * R
        if dense:
            step = _newton_step_dense(problem, u, G, M, Mgrad)
        else:
            step = _newton_step_krylov(problem, u, G, M, Mgrad)
        # backtracking on the deflated residual norm
        g0 = norm_l2(grid, G)
        s = 1.0
        for _ in range(30):
            cand = u + s * step
            Mc = _deflation_factor(grid, cand, deflate, rho)
            gc = norm_l2(grid, Mc * residual(problem, cand))
            if gc < (1.0 - 1e-4 * s) * g0:
                u = cand
                break
            s *= 0.5
        else:
            raise SolverError("Newton line search failed to reduce the residual")
    raise SolverError(f"Newton did not converge within {max_iter} iterations")


def _result_from(problem, u, iterations, method, trace=None, seed=None,
                 info=None):
    grid = problem.grid
    r, g = energy_gradient(problem, u)
    return SolveResult(
        u=u, phi=energy(problem, u),
        residual_l2=norm_l2(grid, r),
        grad_e_norm=grad_e_norm(problem, r, g),
        iterations=iterations, method=method, converged=True,
        trace=trace or [], seed=seed, info=info or {},
    )


def _initial_amplitude(problem, v):
    """Scale t for a start direction v: stationarity of t -> Phi(t v) along
    the cubic-like profile, via a short 1-D search."""
    op, grid = problem.op, problem.grid
    quad = op.energy_norm(v)**2 + inner_l2(grid, problem.a.field * v, v)
    ts = np.geomspace(1e-2, 1e3, 60)
    vals = np.array([quad * t - inner_l2(grid, problem.nl.f(t * v), v)
                     for t in ts])
    sign_change = np.where(np.diff(np.sign(vals)) != 0)[0]
    if len(sign_change) == 0:
        return 1.0
    i = sign_change[0]
    return float(0.5 * (ts[i] + ts[i + 1]))


def _negative_endpoint(problem, v):
    """Scale v (unit E-norm) until Phi < 0; exists since gamma > 2."""
    t = 1.0
    for _ in range(60):
        if energy(problem, t * v) < 0:
            return t * v
        t *= 1.5
    raise NotFoundError("could not find a negative-energy endpoint")


def mountain_pass_geometry(problem, spectrum, r1=1.0, n_samples=100, seed=0):
    """Witness of the linking geometry: min Phi on the r1-sphere of E_{>m}
    and a direction with negative energy; logged with each saddle search."""
    op, grid = problem.op, problem.grid
    rng = np.random.default_rng(seed)
    m = spectrum.m
    low = spectrum.eigenfields[:m + 1]
    min_phi = np.inf
    for _ in range(n_samples):
        v = rng.standard_normal((grid.n, grid.n))
        for e in low:
            v = v - e * inner_l2(grid, v, e)
        v = v * (r1 / op.energy_norm(v))
        min_phi = min(min_phi, energy(problem, v))
    e_dir = spectrum.eigenfields[0]
    e_neg = _negative_endpoint(problem, e_dir / op.energy_norm(e_dir))
    return {"r1": r1, "min_phi_sphere": float(min_phi),
            "r2": float(op.energy_norm(e_neg)),
            "phi_endpoint": float(energy(problem, e_neg))}


def _path_mountain_pass(problem, direction, path_points, step, tol, max_iter,
                        trace):
    """Elastic-string saddle search from 0 to a negative-energy endpoint.

    The endpoint is taken along `direction`.  Repeatedly displaces the
    path's energy maximizer along the negative Riesz gradient (with
    backtracking), re-tensioning the string, until the gradient at the
    maximizer is small enough to hand off to Newton.
    """
    op, grid = problem.op, problem.grid
    endpoint = _negative_endpoint(problem, direction / op.energy_norm(direction))
    ts = np.linspace(0.0, 1.0, path_points)
    path = [t * endpoint for t in ts]
    coarse_tol = max(np.sqrt(tol), 100 * tol)
    best = None
    for it in range(max_iter):
        phis = [energy(problem, p) for p in path]
        j = int(np.argmax(phis[1:-1])) + 1
        r, g = energy_gradient(problem, path[j])
        gn = grad_e_norm(problem, r, g)
        trace.append((phis[j], gn, op.energy_norm(path[j])))
        best = path[j]
        if gn <= coarse_tol:
            return best, it
        s = step
        for _ in range(20):
            cand = path[j] - s * g
            if energy(problem, cand) < phis[j]:
                path[j] = cand
                break
            s *= 0.5
        # re-tension: replace neighbours by averages to keep the string taut
        for i in (j - 1, j + 1):
            if 0 < i < len(path) - 1:
                path[i] = 0.5 * (path[i - 1] + path[i + 1])
    return best, max_iter


def mountain_pass_solve(problem, spectrum=None, r1=1.0, path_points=41,
                        step=0.1, tol=1e-6, max_iter=5000, seed=0):
    """Saddle search for a nontrivial critical point with Phi(u) > 0.

    With no non-positive form modes (m = -1) a path-deformation search
    localizes the pass and Newton polishes it; with m >= 0 a deflated
    Newton search starts from the first positive-mode eigenfield.  The
    returned point always satisfies the relative residual test; zero is
    rejected (||u||_{L^2} >= 1e-3).
    """
    op, grid = problem.op, problem.grid
    if spectrum is None:
        spectrum = eigendecompose(op, problem.a, count=8)
    # the search needs several directions above the non-positive block
    while (spectrum.m + 4 > len(spectrum.eigenvalues)
           and len(spectrum.eigenvalues) < grid.n * grid.n):
        spectrum = eigendecompose(op, problem.a,
                                  count=min(spectrum.m + 8, grid.n * grid.n))
    m = spectrum.m
    trace = []
    geometry = mountain_pass_geometry(problem, spectrum, r1=r1, seed=seed)
    rng = np.random.default_rng(seed)

    def accept(u, its, method):
        res = _result_from(problem, u, its, method, trace=trace, seed=seed,
                           info={"geometry": geometry, "m": m})
        if res.residual_l2 > tol * (1.0 + norm_l2(grid, u)):
            return None
        if norm_l2(grid, u) < 1e-3 or res.phi <= 0:
            return None
        return res

    if m == -1:
        u_coarse, its = _path_mountain_pass(problem, spectrum.eigenfields[0],
                                            path_points, step, tol, max_iter,
                                            trace)
        try:
            u, its2 = newton_solve(problem, u_coarse, tol=tol, deflate=[grid.zeros()])
            res = accept(u, its + its2, "mountain-pass")
            if res is not None:
                return res
        except SolverError:
            pass
        # fall through to eigen-direction Newton starts as a rescue
    start_idx = max(m + 1, 0)
    for attempt in range(10):
        idx = min(start_idx + attempt % 3, len(spectrum.eigenfields) - 1)
        e = spectrum.eigenfields[idx]
        v = e / norm_l2(grid, e)
        u0 = _initial_amplitude(problem, v) * v
        if attempt > 0:
            pert = rng.standard_normal((grid.n, grid.n))
            u0 = u0 + 0.05 * pert * norm_l2(grid, u0) / max(norm_l2(grid, pert), 1e-30)
        try:
            u, its = newton_solve(problem, u0, tol=tol,
                                  deflate=[grid.zeros()])
        except SolverError:
            continue
        res = accept(u, its, "deflated-newton")
        if res is not None:
            return res
    raise NotFoundError("no nontrivial positive-energy critical point found")


def fountain_solve(problem, n_solutions, spectrum=None, tol=1e-6,
                   max_iter=100, rho=0.5, seed=0, max_starts=60):
    """Multi-solution sweep for odd nonlinearities.

    Deflated Newton searches start along successive eigenfield directions
    (several amplitudes and seeded perturbations), deflating against the
    +/- pair of every accepted solution; results are pairwise distinct in
    the sign-identified L^2 distance and sorted by increasing energy.
    """
    if not problem.nl.odd:
        raise ValueError("fountain search requires an odd nonlinearity")
    op, grid = problem.op, problem.grid
    if spectrum is None:
        spectrum = eigendecompose(op, problem.a,
                                  count=min(max(12, n_solutions + 8),
                                            grid.n * grid.n))
    m = spectrum.m
    rng = np.random.default_rng(seed)
    found: List[SolveResult] = []

    def distinct(u):
        if norm_l2(grid, u) < 1e-3:
            return False
        for r in found:
            d = min(norm_l2(grid, u - r.u), norm_l2(grid, u + r.u))
            if d <= 1e-2:
                return False
        return True

    def try_accept(u, its, j):
        if not distinct(u):
            return False
        res = _result_from(problem, u, its, "fountain", seed=seed,
                           info={"start_direction": int(j)})
        if res.residual_l2 > tol * (1.0 + norm_l2(grid, u)):
            return False
        found.append(res)
        return True

    # phase 1: cheap deflated-Newton starts along eigenfield directions
    starts = []
    for j in range(max(m + 1, 0), len(spectrum.eigenfields)):
        starts.append((j, 1.0, 0.0))
    for j in range(max(m + 1, 0), len(spectrum.eigenfields)):
        starts.append((j, 2.0, 0.0))
        starts.append((j, 0.5, 0.05))
    for j, amp, pert in starts:
        if len(found) >= n_solutions:
            break
        e = spectrum.eigenfields[min(j, len(spectrum.eigenfields) - 1)]
        v = e / norm_l2(grid, e)
        u0 = amp * _initial_amplitude(problem, v) * v
        if pert > 0:
            w = rng.standard_normal((grid.n, grid.n))
            u0 = u0 + pert * norm_l2(grid, u0) * w / max(norm_l2(grid, w), 1e-30)
        roots = [grid.zeros()] + [r.u for r in found]
        try:
            u, its = newton_solve(problem, u0, tol=tol, max_iter=max_iter,
                                  deflate=roots, rho=rho)
        except SolverError:
            continue
        try_accept(u, its, j)

    # phase 2: elastic-string searches along successive eigen-directions;
    # more expensive, but robust where the Newton basins are tiny (e.g.
    # near-singular Jacobians along split degenerate branches)
    for j in range(max(m + 1, 0), len(spectrum.eigenfields)):
        if len(found) >= n_solutions:
            break
        u0, _ = _path_mountain_pass(problem, spectrum.eigenfields[j],
                                    path_points=41, step=0.1, tol=tol,
                                    max_iter=3000, trace=[])
        try:
            u, its = newton_solve(problem, u0, tol=tol, max_iter=max_iter)
        except SolverError:
            continue
        try_accept(u, its, j)

    # phase 3: randomized perturbation sweep as a last resort
    attempt = 0
    while len(found) < n_solutions and attempt < max_starts:
        j = max(m + 1, 0) + attempt % max(len(spectrum.eigenfields) -
                                          max(m + 1, 0), 1)
        amp, pert = float(rng.uniform(0.3, 3.0)), 0.1
        attempt += 1
        e = spectrum.eigenfields[min(j, len(spectrum.eigenfields) - 1)]
        v = e / norm_l2(grid, e)
        u0 = amp * _initial_amplitude(problem, v) * v
        w = rng.standard_normal((grid.n, grid.n))
        u0 = u0 + pert * norm_l2(grid, u0) * w / max(norm_l2(grid, w), 1e-30)
        roots = [grid.zeros()] + [r.u for r in found]
        try:
            u, its = newton_solve(problem, u0, tol=tol, max_iter=max_iter,
                                  deflate=roots, rho=rho)
        except SolverError:
            continue
        try_accept(u, its, j)
    found.sort(key=lambda r: r.phi)
    if len(found) < n_solutions:
        for r in found:
            r.info["warning"] = (
                f"requested {n_solutions} solutions, found {len(found)}")
    return found


def ps_diagnostics(trace, phi_tail_tol=1e-8, grad_tol=1e-6, norm_bound=1e6):
    """Palais-Smale style audit of a solver trace.

    Entries are (phi, grad_norm[, energy_norm]) tuples.  Reports whether
    the energies became Cauchy, the gradients vanished and the iterates
    stayed bounded, and flags the pathological combination of vanishing
    gradients with unbounded iterates.
    """
    phis = np.array([t[0] for t in trace], dtype=float)
    grads = np.array([t[1] for t in trace], dtype=float)
    norms = np.array([t[2] if len(t) > 2 else np.nan for t in trace])
    tail = max(len(trace) // 5, 2)
    phi_converged = bool(len(phis) >= 2 and
                         np.max(np.abs(np.diff(phis[-tail:]))) < phi_tail_tol
                         and np.isfinite(phis[-1]))
    grad_vanishes = bool(grads[-1] < grad_tol)
    bounded = bool(np.nanmax(norms) < norm_bound) if np.any(np.isfinite(norms)) \
        else bool(np.all(np.isfinite(phis)))
    return {
        "phi_converged": phi_converged,
        "grad_vanishes": grad_vanishes,
        "iterates_bounded": bounded,
        "suspect_unbounded_ps": bool(grad_vanishes and not bounded),
        "last_phi": float(phis[-1]) if len(phis) else np.nan,
        "last_grad": float(grads[-1]) if len(grads) else np.nan,
    }
