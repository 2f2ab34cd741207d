"""
Per-wavenumber banded solvers on the channel.

Every problem decouples in the Fourier index k into a banded system over the
interior x2 nodes. Factorizations are cached per (n2, k, parameter) and
reused across solves; the cached SuperLU objects are only read after
construction.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate as sp_integrate
from scipy import sparse
from scipy.sparse import linalg as sparse_linalg

from ..exceptions import PreconditionError, SingularSystemError
from .fields import VelocityField, d1_array, d2_array, ddx1_physical, h_k_norm, l2_norm
from .grid import ChannelGrid, Field, SpectralField, to_physical, to_spectral

LERAY_GAUGE_TOL = 1e-8


@dataclass
class BandedOperator:
    """Interior-node system for one wavenumber, with its factorization."""

    k: int
    matrix: sparse.csc_matrix
    lu: sparse_linalg.SuperLU

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        rhs = np.asarray(rhs)
        if np.iscomplexobj(rhs):
            both = self.lu.solve(np.column_stack([rhs.real, rhs.imag]))
            return both[:, 0] + 1j * both[:, 1]
        return self.lu.solve(rhs.astype(float))


@dataclass
class StokesSolution:
    v: VelocityField
    psi: Field
    q: Field


def _factorize(k: int, matrix: sparse.spmatrix) -> BandedOperator:
    matrix = sparse.csc_matrix(matrix)
    try:
        lu = sparse_linalg.splu(matrix)
    except RuntimeError as exc:
        raise SingularSystemError(f"banded system for k={k} is singular: {exc}") from exc
    return BandedOperator(k=k, matrix=matrix, lu=lu)


@lru_cache(maxsize=None)
def dirichlet_second_difference(n2: int) -> sparse.csc_matrix:
    """D^2 on interior nodes with zero wall values."""
    h = 1.0 / (n2 - 1)
    n = n2 - 2
    return sparse.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(n, n), format="csc") / h**2


@lru_cache(maxsize=None)
def mode_laplacian(n2: int, k: int) -> sparse.csc_matrix:
    n = n2 - 2
    return sparse.csc_matrix(dirichlet_second_difference(n2) - k**2 * sparse.identity(n))


@lru_cache(maxsize=None)
def clamped_bilaplacian(n2: int, k: int) -> sparse.csc_matrix:
    """(D^2 - k^2)^2 with psi = d2 psi = 0 at both walls.

    The ghost value psi_{-1} = psi_1 turns the first interior row of the
    fourth-difference stencil into (7, -4, 1)/h^4, which is L@L plus 2/h^4 on
    the two corner entries.
    """
    h = 1.0 / (n2 - 1)
    n = n2 - 2
    lap = mode_laplacian(n2, k)
    corner = sparse.lil_matrix((n, n))
    corner[0, 0] = 2.0 / h**4
    corner[n - 1, n - 1] = 2.0 / h**4
    return sparse.csc_matrix(lap @ lap + corner.tocsc())


@lru_cache(maxsize=None)
def biharmonic_operator(n2: int, k: int) -> BandedOperator:
    return _factorize(k, clamped_bilaplacian(n2, k))


@lru_cache(maxsize=None)
def helmholtz_operator(n2: int, k: int, alpha: float) -> BandedOperator:
    n = n2 - 2
    return _factorize(k, sparse.identity(n) - alpha * mode_laplacian(n2, k))


@lru_cache(maxsize=None)
def implicit_vorticity_operator(n2: int, k: int, dt: float) -> BandedOperator:
    """(D^2 - k^2) - dt/2 (D^2 - k^2)^2 for the Crank-Nicolson stream-function update."""
    return _factorize(k, mode_laplacian(n2, k) - 0.5 * dt * clamped_bilaplacian(n2, k))


def clear_factorization_cache() -> None:
    for cached in (biharmonic_operator, helmholtz_operator, implicit_vorticity_operator, leray_operator):
        cached.cache_clear()


# -- clamped biharmonic / Stokes ---------------------------------------------


def solve_biharmonic_coeffs(grid: ChannelGrid, h_coeffs: np.ndarray) -> np.ndarray:
    """Per-mode clamped solve on coefficient rows; returns (kmax+1, n2) with zero walls."""
    if not np.all(np.isfinite(h_coeffs)):
        raise PreconditionError("biharmonic source must be finite")
    psi = np.zeros((grid.kmax + 1, grid.n2), dtype=complex)
    for k in range(grid.kmax + 1):
        if k == 0 and not np.any(h_coeffs[0, 1:-1]):
            # d1 rho never has k = 0 content
            continue
        psi[k, 1:-1] = biharmonic_operator(grid.n2, k).solve(h_coeffs[k, 1:-1])
    psi[0] = psi[0].real
    return psi


def solve_biharmonic_clamped(h: SpectralField) -> Field:
    return to_physical(SpectralField(h.grid, solve_biharmonic_coeffs(h.grid, h.coeffs)))


def _stokes_pressure(grid: ChannelGrid, v1_hat: np.ndarray, rho_hat: np.ndarray) -> np.ndarray:
    q = np.zeros_like(v1_hat)
    k = grid.wavenumbers
    lap_v1 = d2_array(v1_hat, grid.dx2) - (k**2)[:, None] * v1_hat
    q[1:] = lap_v1[1:] / (1j * k[1:, None])
    # k = 0: d2 q0 = -rho0, fixed up to a constant
    q0 = -sp_integrate.cumulative_trapezoid(rho_hat[0].real, dx=grid.dx2, initial=0.0)
    q0 -= sp_integrate.trapezoid(q0, dx=grid.dx2)
    q[0] = q0
    return q


def solve_stokes_buoyancy(rho: Field) -> StokesSolution:
    """Steady Stokes flow -lap v + grad q + (0, rho) = 0 with no-slip walls."""
    grid = rho.grid
    rho_hat = to_spectral(rho)
    k = grid.wavenumbers[:, None]
    psi_hat = solve_biharmonic_coeffs(grid, 1j * k * rho_hat.coeffs)
    v1_hat = -d1_array(psi_hat, grid.dx2, "interior-centered")
    v2_hat = 1j * k * psi_hat
    q_hat = _stokes_pressure(grid, v1_hat, rho_hat.coeffs)
    v = VelocityField(
        to_physical(SpectralField(grid, v1_hat)),
        to_physical(SpectralField(grid, v2_hat)),
    )
    return StokesSolution(
        v=v,
        psi=to_physical(SpectralField(grid, psi_hat)),
        q=to_physical(SpectralField(grid, q_hat)),
    )


def stokes_residual(rho: Field, solution: StokesSolution) -> tuple[float, float]:
    """L2 norms of both momentum residual components.

    Evaluated on nodes at least two cells from a wall, where every stencil
    involved is centered.
    """
    grid = rho.grid
    h = grid.dx2

    def lap(f: Field) -> np.ndarray:
        return d2_array(f.values, h) + ddx1_physical(f, 2).values

    r1 = -lap(solution.v.u1) + ddx1_physical(solution.q).values
    r2 = -lap(solution.v.u2) + d1_array(solution.q.values, h) + rho.values
    norms = []
    for r in (r1, r2):
        masked = np.zeros_like(r)
        masked[:, 2:-2] = r[:, 2:-2]
        norms.append(l2_norm(Field(grid, masked)))
    return norms[0], norms[1]


# -- Leray projection ----------------------------------------------------------


@lru_cache(maxsize=None)
def gradient_matrix(n2: int) -> sparse.csc_matrix:
    """Second-order x2 derivative on all nodes, one-sided at the walls."""
    h = 1.0 / (n2 - 1)
    d = sparse.lil_matrix((n2, n2))
    for j in range(1, n2 - 1):
        d[j, j - 1] = -0.5 / h
        d[j, j + 1] = 0.5 / h
    d[0, 0:3] = np.array([-1.5, 2.0, -0.5]) / h
    d[n2 - 1, n2 - 3 : n2] = np.array([0.5, -2.0, 1.5]) / h
    return d.tocsc()


@lru_cache(maxsize=None)
def _weights(n2: int) -> sparse.csc_matrix:
    h = 1.0 / (n2 - 1)
    w = np.full(n2, h)
    w[0] = w[-1] = 0.5 * h
    return sparse.diags(w, format="csc")


@lru_cache(maxsize=None)
def leray_operator(n2: int, k: int) -> BandedOperator:
    """Normal equations of min_q ||f + G q||_W with G = (ik, D).

    k = 0 is bordered with the weight row so that q has zero mean.
    """
    d = gradient_matrix(n2)
    w = _weights(n2)
    normal = k**2 * w + d.T @ w @ d
    if k > 0:
        return _factorize(k, normal)
    weights = w.diagonal()[:, None]
    bordered = sparse.bmat([[normal, sparse.csc_matrix(weights)], [sparse.csc_matrix(weights.T), None]])
    return _factorize(k, bordered)


def _leray_potential(f1_hat: np.ndarray, f2_hat: np.ndarray, grid: ChannelGrid) -> np.ndarray:
    n2 = grid.n2
    d = gradient_matrix(n2)
    w = _weights(n2)
    q = np.zeros((grid.kmax + 1, n2), dtype=complex)
    for k in range(grid.kmax + 1):
        # G^H W f = -ik W f1 + D^T W f2
        rhs = -(-1j * k * (w @ f1_hat[k]) + d.T @ (w @ f2_hat[k]))
        op = leray_operator(n2, k)
        if k == 0:
            solution = op.solve(np.concatenate([rhs, [0.0]]))
            gauge = solution[-1]
            scale = max(float(np.max(np.abs(rhs))), 1.0)
            if abs(gauge) > LERAY_GAUGE_TOL * scale:
                raise PreconditionError(
                    f"k=0 Neumann compatibility violated (multiplier {abs(gauge):.3e})"
                )
            q[0] = solution[:-1].real
        else:
            q[k] = op.solve(rhs)
    return q


def _as_spectral_pair(f: VelocityField) -> tuple[np.ndarray, np.ndarray]:
    if not (f.u1.is_finite() and f.u2.is_finite()):
        raise PreconditionError("Leray projection needs finite input")
    return to_spectral(f.u1).coeffs, to_spectral(f.u2).coeffs


def leray_decompose(f: VelocityField) -> tuple[VelocityField, Field]:
    """Return (v, q) with v = -grad q - f, v weakly divergence-free, q zero mean."""
    grid = f.grid
    f1, f2 = _as_spectral_pair(f)
    q = _leray_potential(f1, f2, grid)
    k = grid.wavenumbers[:, None]
    d = gradient_matrix(grid.n2)
    grad_q1 = 1j * k * q
    grad_q2 = (d @ q.T).T
    v = VelocityField(
        to_physical(SpectralField(grid, -grad_q1 - f1)),
        to_physical(SpectralField(grid, -grad_q2 - f2)),
    )
    return v, to_physical(SpectralField(grid, q))


def leray_project(f: VelocityField) -> VelocityField:
    """Orthogonal projection onto discretely divergence-free fields.

    Equals minus the v of leray_decompose, so that the map is idempotent.
    """
    v, _ = leray_decompose(f)
    return VelocityField(v.u1.scaled(-1.0), v.u2.scaled(-1.0))


def weak_divergence(u: VelocityField) -> Field:
    """Divergence adjoint to the projection's gradient: -W^-1 G^H W u."""
    grid = u.grid
    u1, u2 = _as_spectral_pair(u)
    d = gradient_matrix(grid.n2)
    w = _weights(grid.n2)
    w_inv = 1.0 / w.diagonal()
    k = grid.wavenumbers[:, None]
    div = 1j * k * u1 - (w_inv[:, None] * (d.T @ (w @ u2.T))).T
    return to_physical(SpectralField(grid, div))


# -- Helmholtz ---------------------------------------------------------------


def solve_helmholtz(k: int, alpha: float, rhs: np.ndarray) -> np.ndarray:
    """Solve (I - alpha (D^2 - k^2)) y = rhs on interior nodes, y = 0 at walls."""
    if alpha < 0:
        raise PreconditionError(f"alpha must be >= 0, got {alpha}")
    rhs = np.asarray(rhs)
    n2 = rhs.shape[-1]
    out = np.zeros_like(rhs, dtype=complex if np.iscomplexobj(rhs) else float)
    out[1:-1] = helmholtz_operator(n2, int(k), float(alpha)).solve(rhs[1:-1])
    return out


# -- norm equivalence ----------------------------------------------------------


def apply_bilaplacian(f: Field) -> Field:
    """Clamped discrete bilaplacian of f, zero on wall rows."""
    grid = f.grid
    hat = to_spectral(f).coeffs
    out = np.zeros_like(hat)
    for k in range(grid.kmax + 1):
        out[k, 1:-1] = clamped_bilaplacian(grid.n2, k) @ hat[k, 1:-1]
    return to_physical(SpectralField(grid, out))


def bilaplacian_constant(f: Field) -> float:
    """Empirical ||f||_H4 / ||lap^2 f|| for a clamped field."""
    denom = l2_norm(apply_bilaplacian(f))
    if denom == 0.0:
        raise PreconditionError("bilaplacian of the field vanishes")
    return h_k_norm(f, 4) / denom


__all__ = [
    "BandedOperator",
    "StokesSolution",
    "apply_bilaplacian",
    "bilaplacian_constant",
    "clear_factorization_cache",
    "leray_decompose",
    "leray_project",
    "solve_biharmonic_clamped",
    "solve_helmholtz",
    "solve_stokes_buoyancy",
    "stokes_residual",
    "weak_divergence",
]
