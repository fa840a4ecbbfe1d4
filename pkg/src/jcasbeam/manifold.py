"""Riemannian conjugate gradient on the fixed-power sphere of precoders.

The feasible set is { F : ||F||_F^2 = P }. The solver minimizes the weighted
tradeoff between matching a sensing covariance and staying close to the
communications precoder,

    gamma(F) = rho * ||F F^H - R||_F^2 + (1 - rho) * ||F - F_hat||_F^2,

using projected gradients, Polak-Ribiere (nonnegative) conjugate directions
with projection-based transport, an Armijo backtracking line search along the
normalization retraction, and monotone descent by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def tradeoff_objective(f: np.ndarray, cov: np.ndarray, f_comm: np.ndarray, rho: float) -> float:
    sens = np.linalg.norm(f @ f.conj().T - cov) ** 2
    comm = np.linalg.norm(f - f_comm) ** 2
    return float(rho * sens + (1.0 - rho) * comm)


def tradeoff_gradient(f: np.ndarray, cov: np.ndarray, f_comm: np.ndarray, rho: float) -> np.ndarray:
    """Euclidean (conjugate-coordinate) gradient of the tradeoff objective."""
    return 4.0 * rho * ((f @ f.conj().T - cov) @ f) + 2.0 * (1.0 - rho) * (f - f_comm)


def _inner(a: np.ndarray, b: np.ndarray) -> float:
    """Real inner product Re tr(A^H B) on complex matrices."""
    return float(np.real(np.vdot(a, b)))


def project_to_tangent(f: np.ndarray, g: np.ndarray, power: float) -> np.ndarray:
    """Remove the radial component of g at the sphere point f (||f||^2 = power)."""
    return g - (_inner(f, g) / power) * f


def retract(f: np.ndarray, step: float, direction: np.ndarray, power: float) -> np.ndarray:
    """Move along ``direction`` then renormalize back onto the power sphere."""
    v = f + step * direction
    return np.sqrt(power) * v / np.linalg.norm(v)


def transport(f_new: np.ndarray, g: np.ndarray, power: float) -> np.ndarray:
    """Carry a tangent vector to the new point by projecting onto its tangent space."""
    return project_to_tangent(f_new, g, power)


def polak_ribiere_mu(g_new: np.ndarray, g_prev: np.ndarray, g_prev_transported: np.ndarray) -> float:
    """Nonnegative Polak-Ribiere coefficient; zero resets to steepest descent."""
    denom = _inner(g_prev, g_prev)
    if denom <= 0.0:
        return 0.0
    return max(0.0, _inner(g_new, g_new - g_prev_transported) / denom)


def armijo_step(
    phi,
    phi0: float,
    slope: float,
    delta0: float = 1.0,
    contraction: float = 0.5,
    c: float = 1e-4,
    max_backtracks: int = 50,
):
    """Backtracking line search on the scalar function ``phi``.

    Returns (delta, value, ok): ok is True when the sufficient-decrease
    condition phi(delta) <= phi0 + c * delta * slope held; otherwise the last
    trial point is returned so the caller can decide whether it still helps.

    An accepted step is polished by probing further contractions while they
    strictly improve. The first acceptable step often straddles the 1-d
    minimizer (phi(delta) can sit barely below phi0 on the far side of the
    valley), and stopping there makes descent stagnate; the probe costs one
    evaluation and keeps the sufficient-decrease condition intact, since
    shrinking delta only weakens the required decrease.
    """
    delta = delta0
    value = phi(delta)
    accepted = False
    for _ in range(max_backtracks):
        if value <= phi0 + c * delta * slope:
            accepted = True
            break
        delta *= contraction
        value = phi(delta)
    if not accepted and value > phi0 + c * delta * slope:
        return delta, value, False
    for _ in range(max_backtracks):
        probe = phi(delta * contraction)
        if probe >= value:
            break
        delta *= contraction
        value = probe
    return delta, value, True


@dataclass(frozen=True)
class RcgResult:
    """Solver output with the full descent trace for diagnostics."""

    precoder: np.ndarray
    objective: float
    objective_trace: np.ndarray  # gamma per iterate, monotone nonincreasing
    gradient_norms: np.ndarray
    iterations: int
    converged: bool
    stop_reason: str


def solve_rcg(
    f0: np.ndarray,
    cov: np.ndarray,
    f_comm: np.ndarray,
    rho: float,
    power: float,
    grad_tol: float | None = None,
    max_iter: int = 500,
    plateau_tol: float = 1e-10,
    plateau_runs: int = 3,
    callback=None,
) -> RcgResult:
    """Minimize the tradeoff objective over the fixed-power sphere from ``f0``.

    Stops when the Riemannian gradient norm falls below ``grad_tol``
    (default 1e-6 * sqrt(power)), when the objective decrease stays below
    ``plateau_tol`` for ``plateau_runs`` consecutive iterations, when the line
    search cannot make progress, or after ``max_iter`` iterations.
    """
    if grad_tol is None:
        grad_tol = 1e-6 * np.sqrt(power)

    f = np.sqrt(power) * f0 / np.linalg.norm(f0)
    gamma = tradeoff_objective(f, cov, f_comm, rho)
    grad = project_to_tangent(f, tradeoff_gradient(f, cov, f_comm, rho), power)
    direction = -grad

    trace = [gamma]
    grad_norms = [float(np.linalg.norm(grad))]
    plateau = 0
    converged = False
    reason = "max_iterations"
    it = 0

    while it < max_iter:
        if grad_norms[-1] <= grad_tol:
            converged = True
            reason = "gradient_norm"
            break

        slope = _inner(grad, direction)
        if slope >= 0.0:
            # conjugate direction lost descent; fall back to steepest descent
            direction = -grad
            slope = -grad_norms[-1] ** 2

        def phi(delta):
            return tradeoff_objective(retract(f, delta, direction, power), cov, f_comm, rho)

        delta, value, ok = armijo_step(phi, gamma, slope)
        if not ok and value >= gamma:
            converged = True
            reason = "line_search_stall"
            break

        f_new = retract(f, delta, direction, power)
        grad_new = project_to_tangent(
            f_new, tradeoff_gradient(f_new, cov, f_comm, rho), power
        )
        mu = polak_ribiere_mu(grad_new, grad, transport(f_new, grad, power))
        direction = -grad_new + mu * transport(f_new, direction, power)

        decrease = gamma - value
        f, grad, gamma = f_new, grad_new, value
        it += 1
        trace.append(gamma)
        grad_norms.append(float(np.linalg.norm(grad)))
        if callback is not None:
            callback(it, f, grad)

        if abs(decrease) <= plateau_tol:
            plateau += 1
            if plateau >= plateau_runs:
                converged = True
                reason = "objective_plateau"
                break
        else:
            plateau = 0

    return RcgResult(
        precoder=f,
        objective=gamma,
        objective_trace=np.asarray(trace),
        gradient_norms=np.asarray(grad_norms),
        iterations=it,
        converged=converged,
        stop_reason=reason,
    )
