"""Poisson-weighted superposition of block solutions and atomic inversion.

The superposition weights are e^{-xi^2/2} xi^m / sqrt(m!); blocks with
distinct m are orthogonal, so with the truncation tail below 1e-10 the
state stays normalized to that accuracy.  All per-m trajectories share one
(theta0, phi0): each block has its own lambda and hence its own trajectory,
and a common initial rotation is what makes the superposition well-defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .auxiliary import AuxState, solve_aux
from .blocks import SubspaceBlock
from .errors import ConfigurationError, TruncationError
from .evolution import ExactSolution
from .fock import FockSpaceSpec
from .profiles import ModelParams

DEFAULT_TAIL_BOUND = 1e-10


def poisson_tail(xi: float, m_max: int) -> float:
    """e^{-xi^2} sum_{m > m_max} xi^{2m} / m!, summed to convergence."""
    if xi == 0.0:
        return 0.0
    x = xi * xi
    log_term = -x + (m_max + 1) * math.log(x) - math.lgamma(m_max + 2)
    term = math.exp(log_term)
    total = 0.0
    m = m_max + 1
    while term > 1e-18 * max(total, 1e-300):
        total += term
        m += 1
        term *= x / m
        if m > m_max + 10000:
            break
    return total


def m_max_for_tail(xi: float, bound: float = DEFAULT_TAIL_BOUND) -> int:
    """Smallest truncation with Poisson tail weight below ``bound``."""
    m = 0
    while poisson_tail(xi, m) >= bound:
        m += 1
        if m > 100000:
            raise TruncationError(f"no truncation reaches tail bound {bound} for xi={xi}")
    return m


@dataclass(frozen=True)
class CoherentSpec:
    """Superposition parameter xi, truncation m_max, branch sigma."""

    xi: float
    m_max: int
    sigma: int = +1
    tail_bound: float = DEFAULT_TAIL_BOUND

    def __post_init__(self):
        if self.xi < 0:
            raise ConfigurationError(f"xi must be nonnegative, got {self.xi}")
        if self.m_max < 0:
            raise ConfigurationError(f"m_max must be nonnegative, got {self.m_max}")
        if self.sigma not in (+1, -1):
            raise ConfigurationError(f"sigma must be +1 or -1, got {self.sigma}")
        tail = poisson_tail(self.xi, self.m_max)
        if tail >= self.tail_bound:
            raise TruncationError(
                f"truncation m_max={self.m_max} leaves tail weight {tail:.3e} "
                f">= {self.tail_bound:g} for xi={self.xi}"
            )

    @classmethod
    def for_xi(cls, xi: float, sigma: int = +1, tail_bound: float = DEFAULT_TAIL_BOUND):
        return cls(xi=xi, m_max=m_max_for_tail(xi, tail_bound), sigma=sigma, tail_bound=tail_bound)

    def weights(self) -> np.ndarray:
        """e^{-xi^2/2} xi^m / sqrt(m!) for m = 0 .. m_max."""
        m = np.arange(self.m_max + 1)
        if self.xi == 0.0:
            out = np.zeros(self.m_max + 1)
            out[0] = 1.0
            return out
        log_w = -0.5 * self.xi**2 + m * math.log(self.xi) - 0.5 * np.array(
            [math.lgamma(v + 1) for v in m]
        )
        return np.exp(log_w)


def solve_block_family(
    cspec: CoherentSpec,
    spec: FockSpaceSpec,
    params: ModelParams,
    window: tuple[float, float],
    initial: AuxState,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> list[ExactSolution]:
    """Exact solutions for m = 0 .. m_max, all from the same initial angles."""
    if spec.cutoff < cspec.m_max + spec.k + spec.guard + 1:
        raise TruncationError(
            f"cutoff {spec.cutoff} too small for m_max={cspec.m_max}: "
            f"need at least {cspec.m_max + spec.k + spec.guard + 1}"
        )
    solutions = []
    for m in range(cspec.m_max + 1):
        block = SubspaceBlock.for_space(spec, m)
        traj = solve_aux(initial, window, params, block.lam, rtol=rtol, atol=atol)
        solutions.append(ExactSolution(block, cspec.sigma, traj))
    return solutions


def build_coherent_state(cspec: CoherentSpec, t: float, solutions) -> np.ndarray:
    """Weighted superposition of the per-m solutions at time t."""
    solutions = list(solutions)
    if len(solutions) != cspec.m_max + 1:
        raise ConfigurationError(
            f"expected {cspec.m_max + 1} block solutions, got {len(solutions)}"
        )
    w = cspec.weights()
    out = np.zeros(2 * solutions[0].block.cutoff, dtype=complex)
    for weight, sol in zip(w, solutions):
        if sol.sigma != cspec.sigma:
            raise ConfigurationError(
                f"block solution branch sigma={sol.sigma} does not match "
                f"the superposition sigma={cspec.sigma}"
            )
        out += weight * sol.state_at(t)
    return out


def atomic_inversion(state: np.ndarray) -> float:
    """<sigma_z> of a full-space state: excited population minus ground."""
    state = np.asarray(state)
    half = state.size // 2
    return float(np.sum(np.abs(state[:half]) ** 2) - np.sum(np.abs(state[half:]) ** 2))
