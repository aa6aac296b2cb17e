"""Steady-angle (adiabatic) scenarios and Berry phases.

A scenario holds theta constant by construction: the coupling phase is
locked to -phi with phi advancing at the mode frequency, and the transition
frequency is solved from the steady-azimuth constraint

    (k w - w0 - w) sin theta = 2 |g| sqrt(lam) cos theta

given a constant coupling modulus (solving for w0 rather than |g| keeps the
modulus nonnegative).  Adiabaticity is exact here, not a slow-drive
expansion: the constraint makes (theta, phi) a fixed point of the angle
equations with phi-dot = w, so over one azimuthal cycle the geometric phase
reduces to the solid-angle law -sigma pi (1 - cos theta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .auxiliary import AuxState, AuxTrajectory, solve_aux
from .blocks import SubspaceBlock, lambda_value
from .errors import ConfigurationError, CycleError
from .evolution import (
    SIGMA_Z2,
    EvolutionOperator,
    block_hamiltonian,
    invariant_matrix,
    phase_rate_geometric,
)
from .fock import Operator
from .profiles import ModelParams, TimeProfile
from .quadrature import cumulative_antiderivative


@dataclass(frozen=True)
class AdiabaticScenario:
    """Constant-theta parameter set for one block, with its cycle period."""

    theta: float
    m: int
    k: int
    g_mod: float
    phi0: float
    params: ModelParams
    period: float

    @property
    def lam(self) -> int:
        return lambda_value(self.m, self.k)

    def initial_state(self) -> AuxState:
        return AuxState(self.theta, self.phi0)


def build_adiabatic_scenario(
    theta: float,
    omega: TimeProfile,
    m: int,
    k: int = 3,
    g_mod: float = 0.05,
    phi0: float = 0.0,
) -> AdiabaticScenario:
    """Derive (omega0, coupling profiles) that freeze theta with phi-dot = omega.

    Only constant mode-frequency profiles are supported: phi(t) must equal
    phi0 + integral of omega, and only the constant case stays inside the
    profile vocabulary exactly.
    """
    if not 0.0 < theta < math.pi:
        raise ConfigurationError(f"theta must lie in (0, pi), got {theta}")
    if omega.kind != "constant":
        raise ConfigurationError(
            "adiabatic scenarios require a constant mode-frequency profile"
        )
    if g_mod < 0:
        raise ConfigurationError(f"coupling modulus must be nonnegative, got {g_mod}")
    w = float(omega(0.0))
    if w <= 0:
        raise ConfigurationError(f"mode frequency must be positive, got {w}")
    lam = lambda_value(m, k)
    # Steady azimuth: w0 = (k-1) w - 2 |g| sqrt(lam) cot(theta).
    omega0 = (k - 1) * w - 2.0 * g_mod * math.sqrt(lam) / math.tan(theta)
    params = ModelParams(
        omega=omega,
        omega0=TimeProfile.constant(omega0),
        g_mod=TimeProfile.constant(g_mod),
        g_phase=TimeProfile.linear(-phi0, -w),
        k=k,
    )
    return AdiabaticScenario(
        theta=float(theta),
        m=m,
        k=k,
        g_mod=float(g_mod),
        phi0=float(phi0),
        params=params,
        period=2.0 * math.pi / w,
    )


def hamiltonian_invariant_relation_residual(
    scenario: AdiabaticScenario, t: float, cos_guard: float = 1e-6
) -> float:
    """Block residual of H = w N - w/2 - c I with c = ((k-1) w - w0) / (2 cos theta).

    The coefficient reads (2w - w0)/(2 cos theta) in the three-photon case.
    Requires cos theta bounded away from zero.
    """
    theta = scenario.theta
    if abs(math.cos(theta)) < cos_guard:
        raise ConfigurationError(
            f"relation undefined near theta = pi/2: |cos theta| = {abs(math.cos(theta)):.3e}"
        )
    params = scenario.params
    w = float(params.omega(t))
    w0 = float(params.omega0(t))
    k = scenario.k
    block = SubspaceBlock(m=scenario.m, k=k, cutoff=scenario.m + k + 1)
    h2 = block_hamiltonian(block, params, t)

    phi_t = scenario.phi0 + w * t
    inv = invariant_matrix(AuxState(theta, phi_t))
    n_block = np.diag([scenario.m + k / 2.0, scenario.m + k / 2.0 + 1.0]).astype(complex)
    coeff = ((k - 1) * w - w0) / (2.0 * math.cos(theta))
    rhs = w * n_block - 0.5 * w * np.eye(2) - coeff * inv
    return float(np.max(np.abs(h2 - rhs)))


def invariant_from_couplings(scenario: AdiabaticScenario, t: float) -> np.ndarray:
    """Block invariant rebuilt from the couplings under the steady constraint:

        I = -2 cos th / (k w - w0 - phi') [ g Q + g* Qdag - (1/2)(k w - w0 - phi') sigma_z ]

    with phi' = w; block level, so Q -> sqrt(lam) sigma_-.  Must coincide
    with the angle form of the invariant.
    """
    params = scenario.params
    w = float(params.omega(t))
    w0 = float(params.omega0(t))
    g = params.coupling(t)
    root = math.sqrt(scenario.lam)
    denom = scenario.k * w - w0 - w
    if abs(denom) < 1e-12:
        raise ConfigurationError(
            "coupling form of the invariant undefined: k w - w0 - phi' vanishes "
            "(theta = pi/2 scenarios)"
        )
    q2 = np.array([[0.0, 0.0], [root, 0.0]], dtype=complex)
    inner = g * q2 + np.conj(g) * q2.conj().T - 0.5 * denom * SIGMA_Z2
    return (-2.0 * math.cos(scenario.theta) / denom) * inner


def solve_scenario(
    scenario: AdiabaticScenario,
    t_final: float | None = None,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> AuxTrajectory:
    """Integrate the angle equations over one cycle (or ``t_final``)."""
    horizon = scenario.period if t_final is None else float(t_final)
    return solve_aux(
        scenario.initial_state(),
        (0.0, horizon),
        scenario.params,
        scenario.lam,
        rtol=rtol,
        atol=atol,
    )


def berry_phase_cycle(theta: float, sigma: int) -> float:
    """Closed-cycle geometric phase: -sigma pi (1 - cos theta)."""
    if sigma not in (+1, -1):
        raise ConfigurationError(f"sigma must be +1 or -1, got {sigma}")
    return -sigma * math.pi * (1.0 - math.cos(theta))


def berry_phase_numeric(
    scenario: AdiabaticScenario,
    sigma: int,
    t_final: float | None = None,
    rtol: float = 1e-10,
    closure_tol: float = 1e-6,
) -> float:
    """Geometric phase integrated along the solved trajectory over one cycle.

    Raises CycleError unless phi advances by exactly 2 pi over the window.
    """
    if sigma not in (+1, -1):
        raise ConfigurationError(f"sigma must be +1 or -1, got {sigma}")
    traj = solve_scenario(scenario, t_final=t_final, rtol=rtol)
    sweep = traj.phis[-1] - traj.phis[0]
    if abs(sweep - 2.0 * math.pi) > closure_tol:
        raise CycleError(
            f"azimuthal cycle does not close: phi advanced by {sweep:.9f} "
            f"instead of 2*pi over [0, {traj.t1}]"
        )
    rates = np.array(
        [
            phase_rate_geometric(sigma, AuxState(th, ph), traj.rates_at(t)[1])
            for t, th, ph in zip(traj.times, traj.thetas, traj.phis)
        ]
    )
    return float(cumulative_antiderivative(traj.times, rates)(traj.t1))


def conjugated_invariant(block: SubspaceBlock, trajectory: AuxTrajectory, op):
    """Constant of motion t -> U(t) O U^dag(t) built from an ordinary operator.

    ``op`` is a full-space matrix/Operator.  With i dU/dt = H U, the
    conjugation satisfies the invariant equation, so its expectation in any
    solution inside the block is conserved; for O = sigma_z it reproduces
    the angle form of the invariant.  (Conjugating the other way, U^dag O U,
    gives the Heisenberg-picture operator, which is not conserved.)
    """
    mat = op.matrix if isinstance(op, Operator) else np.asarray(op, dtype=complex)
    propagator = EvolutionOperator(block, trajectory)

    def at(t: float) -> np.ndarray:
        u = propagator.full_at(float(t))
        return u @ mat @ u.conj().T

    return at
