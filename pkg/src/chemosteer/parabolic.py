"""Implicit-Euler forward solver for the drift-diffusion equation and its
exact algebraic transpose.

The spatial operator is in conservative flux form with zero flux at the
boundary faces,

    F_{i+1/2} = (u_{i+1} - u_i)/h - B_{i+1/2} (u_i + u_{i+1})/2,
    (A u)_i   = (F_{i+1/2} - F_{i-1/2}) / h,

so the total mass h * sum(u) is exactly conserved by force-free steps.  The
backward solver is the transpose of the forward time-stepping map in the
discrete L2 inner products, not an independent discretization: this is what
makes the control Gramian exactly symmetric.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .elliptic import DriftField
from .grid import DomainSpec, TimeGrid


class SolverError(RuntimeError):
    """Non-finite values encountered during time stepping."""


@dataclass(frozen=True)
class SpaceTimeField:
    """Cell-sampled scalar field over all time levels, values shape (M+1, N)."""

    values: np.ndarray
    h: float
    dt: float

    @property
    def sup_norm(self) -> float:
        return float(np.abs(self.values).max())

    def l2_at_level(self, k: int) -> float:
        return level_l2(self.values[k], self.h)

    def l2_space_time(self) -> float:
        return space_time_l2(self.values, self.h, self.dt)


def level_l2(slice_values: np.ndarray, h: float) -> float:
    """Discrete L2(Omega) norm via cell quadrature."""
    return float(np.sqrt(h * np.sum(np.square(slice_values))))


def space_time_l2(values: np.ndarray, h: float, dt: float) -> float:
    """Discrete L2(Q) norm, summing levels 1..M (the implicit-step levels)."""
    return float(np.sqrt(dt * h * np.sum(np.square(values[1:]))))


def inner_l2(x: np.ndarray, y: np.ndarray, h: float) -> float:
    """Discrete L2(Omega) inner product."""
    return float(h * np.dot(np.ravel(x), np.ravel(y)))


def rho0_const(b_sup: float, T: float) -> float:
    """Growth exponent (1 + |B|^2)(1 + T) of the sup-norm estimate."""
    return (1.0 + b_sup * b_sup) * (1.0 + T)


def step_matrix_banded(face_drift: np.ndarray, domain: DomainSpec, dt: float,
                       transpose: bool = False) -> np.ndarray:
    """Banded form of I - dt*A (or its transpose) for one implicit step."""
    n = domain.n_cells
    h = domain.h
    bi = face_drift[1:n]                      # interior faces 1..n-1
    upper = (1.0 / h) * (1.0 / h - 0.5 * bi)  # coeff of u_{i+1} in row i
    lower = (1.0 / h) * (1.0 / h + 0.5 * bi)  # coeff of u_{i-1} in row i+1
    diag = np.zeros(n)
    diag[:-1] -= (1.0 / h) * (1.0 / h + 0.5 * bi)
    diag[1:] -= (1.0 / h) * (1.0 / h - 0.5 * bi)
    if transpose:
        upper, lower = lower, upper
    ab = np.zeros((3, n))
    ab[0, 1:] = -dt * upper
    ab[1, :] = 1.0 - dt * diag
    ab[2, :-1] = -dt * lower
    return ab


def m_matrix_report(drift: DriftField, domain: DomainSpec, time: TimeGrid) -> dict:
    """Check whether every implicit step matrix is an M-matrix.

    Off-diagonal entries of I - dt*A are nonpositive iff h |B| <= 2 on every
    interior face; positivity of the data is then preserved by each step.
    """
    b_max = float(np.abs(drift.faces[:, 1:-1]).max()) if domain.n_cells > 1 else 0.0
    margin = 2.0 / domain.h - b_max
    return {
        "is_m_matrix": bool(margin >= 0.0),
        "max_face_drift": b_max,
        "threshold": 2.0 / domain.h,
    }


def solve_forward(u0: np.ndarray, drift: DriftField, f, domain: DomainSpec,
                  time: TimeGrid) -> np.ndarray:
    """March (I - dt A_k) u^{k+1} = u^k + dt (1_omega f)^{k+1} over all steps.

    f may be None (no control) or a (M+1, N) array; its level-0 slice is
    never used.  Returns the full trajectory, shape (M+1, N).
    """
    n = domain.n_cells
    m = time.n_steps
    u = np.empty((m + 1, n))
    u[0] = np.asarray(u0, dtype=float)
    if not np.all(np.isfinite(u[0])):
        raise SolverError("non-finite initial data")
    mask = domain.omega_mask
    for k in range(m):
        rhs = u[k].copy()
        if f is not None:
            rhs[mask] += time.dt * f[k + 1][mask]
        ab = step_matrix_banded(drift.faces[k], domain, time.dt)
        u[k + 1] = solve_banded((1, 1), ab, rhs)
        if not np.all(np.isfinite(u[k + 1])):
            raise SolverError(f"non-finite state after forward step {k + 1}")
    return u


def solve_adjoint(phiT: np.ndarray, drift: DriftField, domain: DomainSpec,
                  time: TimeGrid) -> np.ndarray:
    """Exact transpose of the forward map, marched backward from phi^M = phiT.

    phi[k] = (I - dt A_k)^{-T} phi[k+1], so that for any u0 and control f

        <u^M, phiT> = <u0, phi[0]> + dt * sum_{k=1..M} <(1_omega f)^k, phi[k-1]>

    holds to rounding error.  The control at level k therefore pairs with
    the adjoint value stored at level k-1.
    """
    n = domain.n_cells
    m = time.n_steps
    phi = np.empty((m + 1, n))
    phi[m] = np.asarray(phiT, dtype=float)
    if not np.all(np.isfinite(phi[m])):
        raise SolverError("non-finite terminal data")
    for k in range(m - 1, -1, -1):
        ab = step_matrix_banded(drift.faces[k], domain, time.dt, transpose=True)
        phi[k] = solve_banded((1, 1), ab, phi[k + 1])
        if not np.all(np.isfinite(phi[k])):
            raise SolverError(f"non-finite adjoint state at level {k}")
    return phi


def linf_estimate_report(u: np.ndarray, u0: np.ndarray, f, drift: DriftField,
                         domain: DomainSpec, time: TimeGrid) -> dict:
    """Empirical version of the sup-norm growth estimate.

    Reports K0 = |force|_inf + |u0|_inf, the exponent rho0, and the fitted
    constant C_hat = ln(|u|_inf / K0) / rho0 (-inf when |u|_inf <= K0).
    """
    u0 = np.asarray(u0, dtype=float)
    if f is None:
        force_sup = 0.0
    else:
        masked = np.where(domain.omega_mask[None, :], f[1:], 0.0)
        force_sup = float(np.abs(masked).max()) if masked.size else 0.0
    k0 = force_sup + float(np.abs(u0).max())
    sup_u = float(np.abs(u).max())
    rho0 = rho0_const(drift.sup_norm, time.horizon_T)
    report = {
        "K0": k0,
        "rho0": rho0,
        "sup_u": sup_u,
        "degenerate": bool(k0 == 0.0),
    }
    if k0 == 0.0:
        report["C_hat"] = float("nan")
        report["consistent"] = bool(sup_u == 0.0)
    else:
        report["C_hat"] = float(np.log(sup_u / k0) / rho0) if sup_u > k0 else float("-inf")
        report["consistent"] = True
    return report
