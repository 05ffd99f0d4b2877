"""Minimizers of the discrete energy over displacements vanishing outside Q_eps.

Two paths: `solve_quadratic` (conjugate gradients on the matrix-free gradient operator,
projection potential only) and `solve_general` (accelerated, diagonally scaled gradient
descent with backtracking for any convex potential). Both start from u = 0 and stop once
|grad E| <= tol * (1 + |eps^d f|).
"""
import math
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from lattice_model.core.exceptions import LineSearchStalled, MaxIterations, NonFiniteEnergy
from lattice_model.core.grid import DiscreteField, GridSpec
from lattice_model.core.params import ModelParams
from lattice_model.components.energy import EnergyBreakdown, EnergyModel
from lattice_model.components.fibers import FiberSet
from lattice_model.potentials import AbstractPotential, ProjectionPotential

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
GENERAL_MAX_ITER = 100_000
CG_RESTARTS = 3
# relative rounding level of an energy difference, scaled by max(|E|, 1)
ENERGY_NOISE_RTOL = 1e-12


@dataclass
class SolveReport:
    """Outcome of a minimization.

    Attributes:
        minimizer: the final iterate.
        energy: total_energy of the minimizer.
        iterations: number of iterations performed.
        gradient_norm: Euclidean norm of the energy gradient at the minimizer.
        converged: whether gradient_norm <= tolerance.
        method: "quadratic" or "general".
        tolerance: the absolute gradient tolerance that was applied.
        history: total energy after every accepted iterate.
    """
    minimizer: DiscreteField
    energy: EnergyBreakdown
    iterations: int
    gradient_norm: float
    converged: bool
    method: str
    tolerance: float = 0.0
    history: List[float] = field(default_factory=list)

    def to_dict(self):
        return {
            "energy": self.energy.to_dict(),
            "iterations": self.iterations,
            "gradient_norm": self.gradient_norm,
            "converged": self.converged,
            "method": self.method,
            "tolerance": self.tolerance,
        }


def _force_values(f: Optional[DiscreteField], grid: GridSpec) -> np.ndarray:
    if f is None:
        return np.zeros((grid.size, grid.dim))
    grid.require_same(f.grid, "force")
    return f.values


def _report(model: EnergyModel, values: np.ndarray, forces: np.ndarray, iterations: int,
            tolerance: float, method: str, history: List[float]) -> SolveReport:
    u = DiscreteField(model.grid, values)
    f = DiscreteField(model.grid, forces)
    grad_norm = float(np.linalg.norm(model.gradient(u, f)))
    return SolveReport(minimizer=u, energy=model.energy(u, f), iterations=iterations,
                       gradient_norm=grad_norm, converged=grad_norm <= tolerance,
                       method=method, tolerance=tolerance, history=history)


def solve_quadratic(f: Optional[DiscreteField], fibers: Optional[FiberSet], grid: GridSpec,
                    params: Optional[ModelParams] = None,
                    pot: Optional[AbstractPotential] = None, tol: float = DEFAULT_TOL,
                    maxiter: Optional[int] = None,
                    x0: Optional[DiscreteField] = None) -> SolveReport:
    """Solve the stationarity system A u = eps^d f of a quadratic energy by Jacobi
    preconditioned conjugate gradients, with A applied through the energy gradient.

    Args:
        - f (DiscreteField): force, None for f = 0.
        - fibers (FiberSet): sampled connections, None for the local energy only.
        - grid (GridSpec): grid of the unknowns.
        - params (ModelParams): defaults to the parameters of the fibers.
        - pot (AbstractPotential): must be flagged convex and quadratic; projection by default.
        - tol (float): relative gradient tolerance.
        - maxiter (int): iteration cap, 10 * N * d by default.
        - x0 (DiscreteField): starting point, u = 0 by default.

    Returns:
        SolveReport: with method "quadratic".

    Raises:
        MaxIterations: if the cap is reached; `best` holds the last iterate's report.
        NonFiniteEnergy: if the iteration produces NaN or infinity.
    """
    pot = pot or ProjectionPotential()
    if not (pot.quadratic and pot.convex):
        raise ValueError(f"{pot} is not flagged convex and quadratic, use solve_general")
    model = EnergyModel(grid, fibers, pot, params)
    forces = _force_values(f, grid)
    shape = (grid.size, grid.dim)
    unknowns = grid.size * grid.dim
    rhs = (grid.cell_volume * forces).ravel()
    tolerance = tol * (1.0 + float(np.linalg.norm(rhs)))
    maxiter = maxiter if maxiter is not None else 10 * unknowns
    inv_diag = 1.0 / model.diagonal().ravel()

    def matvec(v):
        return model.gradient(np.asarray(v).reshape(shape)).ravel()

    operator = LinearOperator((unknowns, unknowns), matvec=matvec, dtype=float)
    preconditioner = LinearOperator((unknowns, unknowns), matvec=lambda v: inv_diag * np.ravel(v),
                                    dtype=float)

    start = np.zeros(unknowns) if x0 is None else np.asarray(x0.values, dtype=float).ravel()
    history = [model.energy(start.reshape(shape), forces).total]
    counter = {"iterations": 0}

    def callback(xk):
        counter["iterations"] += 1
        history.append(model.energy(xk.reshape(shape), forces).total)

    solution = start
    # cg stops on its recursive residual; restart until the true residual agrees
    for _ in range(CG_RESTARTS):
        if float(np.linalg.norm(matvec(solution) - rhs)) <= tolerance:
            break
        remaining = max(maxiter - counter["iterations"], 1)
        solution, info = cg(operator, rhs, x0=solution, rtol=0.0, atol=tolerance,
                            maxiter=remaining, M=preconditioner, callback=callback)
        if not np.all(np.isfinite(solution)):
            raise NonFiniteEnergy("Conjugate gradients produced a non-finite iterate")
        if info != 0:
            break

    report = _report(model, solution.reshape(shape), forces, counter["iterations"],
                     tolerance, "quadratic", history)
    if not math.isfinite(report.energy.total):
        raise NonFiniteEnergy("Energy of the conjugate gradient solution is not finite", report)
    if not report.converged:
        raise MaxIterations(f"Conjugate gradients stopped after {report.iterations} iterations "
                            f"with gradient norm {report.gradient_norm:.3e} > {tolerance:.3e}",
                            report)
    logger.info(f"Quadratic solve: {report.iterations} iterations, "
                f"gradient norm {report.gradient_norm:.3e}, energy {report.energy.total:.10g}")
    return report


def _line_search(model: EnergyModel, point: np.ndarray, grad: np.ndarray, direction: np.ndarray,
                 forces: np.ndarray, step: float, energy_scale: float, armijo: float = 1e-4,
                 shrink: float = 0.5, max_backtracks: int = 60):
    """Backtracking until E(point + t*d) - E(point) <= armijo * t * <grad, d>.

    Once |E(point + t*d) - E(point)| is below the rounding level of the energy the
    comparison carries no information, and the step is judged on the slope instead:
    <grad E(point + t*d), d> <= (1 - 2*armijo) * |<grad, d>|, which is the same
    condition for a quadratic along the ray.
    Returns (t, candidate, change) or None if no step was accepted."""
    slope = float(np.sum(grad * direction))
    noise = ENERGY_NOISE_RTOL * max(abs(energy_scale), 1.0)
    for _ in range(max_backtracks):
        candidate = point + step * direction
        change = model.energy_change(point, candidate, forces)
        if math.isfinite(change):
            if change <= armijo * step * slope:
                return step, candidate, change
            if abs(change) <= noise:
                slope_at = float(np.sum(model.gradient(candidate, forces) * direction))
                if slope_at <= (1.0 - 2.0 * armijo) * abs(slope):
                    return step, candidate, change
        step *= shrink
    return None


def solve_general(f: Optional[DiscreteField], fibers: Optional[FiberSet], grid: GridSpec,
                  params: Optional[ModelParams] = None,
                  pot: Optional[AbstractPotential] = None, tol: float = DEFAULT_TOL,
                  maxiter: int = GENERAL_MAX_ITER) -> SolveReport:
    """Accelerated gradient descent with Jacobi scaling, Armijo backtracking and momentum
    restarts. An iterate is accepted only if it does not increase the energy by more than
    its rounding level; the recorded history is nonincreasing. Near the minimizer, where
    energy differences drown in rounding, steps are accepted on the directional derivative.

    Raises:
        MaxIterations: if `maxiter` iterations do not meet the tolerance.
        LineSearchStalled: if backtracking from the current iterate finds no decrease.
        NonFiniteEnergy: if the energy at u = 0 is not finite.
    """
    pot = pot or ProjectionPotential()
    if not pot.convex:
        logger.warning(f"{pot} is not flagged convex; descent may stop at a local minimizer")
    model = EnergyModel(grid, fibers, pot, params)
    forces = _force_values(f, grid)
    tolerance = tol * (1.0 + float(np.linalg.norm(grid.cell_volume * forces)))
    inv_diag = 1.0 / model.diagonal()

    x = np.zeros((grid.size, grid.dim))
    energy = model.energy(x, forces).total
    if not math.isfinite(energy):
        raise NonFiniteEnergy("Energy at the initial iterate is not finite")
    history = [energy]
    x_prev = x.copy()
    theta, step = 1.0, 1.0

    for iteration in range(1, maxiter + 1):
        grad_x = model.gradient(x, forces)
        if float(np.linalg.norm(grad_x)) <= tolerance:
            report = _report(model, x, forces, iteration - 1, tolerance, "general", history)
            logger.info(f"General solve: {report.iterations} iterations, "
                        f"gradient norm {report.gradient_norm:.3e}, energy {report.energy.total:.10g}")
            return report

        theta_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * theta ** 2))
        y = x + ((theta - 1.0) / theta_next) * (x - x_prev)
        grad_y = grad_x if theta == 1.0 else model.gradient(y, forces)
        found = _line_search(model, y, grad_y, -inv_diag * grad_y, forces, min(2.0 * step, 1e6),
                             history[-1])
        accepted = None
        if found is not None:
            t, candidate, _ = found
            change = model.energy_change(x, candidate, forces)
            if change <= ENERGY_NOISE_RTOL * max(abs(history[-1]), 1.0):
                accepted = (t, candidate, change)
                theta = theta_next
        if accepted is None:
            # momentum restart: plain scaled gradient step from x
            theta = 1.0
            found = _line_search(model, x, grad_x, -inv_diag * grad_x, forces,
                                 min(2.0 * step, 1e6), history[-1])
            if found is None:
                best = _report(model, x, forces, iteration, tolerance, "general", history)
                raise LineSearchStalled(
                    f"No decrease found at iteration {iteration}, gradient norm "
                    f"{best.gradient_norm:.3e} > {tolerance:.3e}", best)
            accepted = found
        step, candidate, change = accepted
        x_prev, x = x, candidate
        history.append(history[-1] + min(change, 0.0))
        if iteration % 500 == 0:
            logger.debug(f"iteration {iteration}: energy {history[-1]:.12g}, step {step:.3e}")

    best = _report(model, x, forces, maxiter, tolerance, "general", history)
    raise MaxIterations(f"No convergence in {maxiter} iterations, gradient norm "
                        f"{best.gradient_norm:.3e} > {tolerance:.3e}", best)


def minimize(f: Optional[DiscreteField], fibers: Optional[FiberSet], grid: GridSpec,
             params: Optional[ModelParams] = None, pot: Optional[AbstractPotential] = None,
             **kwargs) -> SolveReport:
    """Dispatch to the quadratic path when the potential allows it."""
    pot = pot or ProjectionPotential()
    if pot.quadratic and pot.convex:
        return solve_quadratic(f, fibers, grid, params, pot, **kwargs)
    return solve_general(f, fibers, grid, params, pot, **kwargs)
