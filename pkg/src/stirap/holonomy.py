"""Berry phase of the dark state along (Theta, phi) control paths.

gamma = -integral of sin^2(Theta) dphi along the path, with a brute-force
oracle that propagates the Schrodinger equation and reads the phase picked
up relative to the instantaneous dark state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError, NonAdiabaticRunError, PreconditionError
from .hamiltonian import TransmonParams, adiabatic_frame, build_rotating_hamiltonian
from .lindblad import TimeGrid, evolve
from .pulses import (
    Convention,
    GaussianPulse,
    PhaseRamp,
    PulseSequence,
    Transition,
    global_adiabaticity_metric,
)
from .units import TWO_PI


@dataclass(frozen=True)
class ParameterPath:
    """Sampled control path (t, Theta, phi); phi is unwrapped on entry."""

    samples: np.ndarray  # (n, 3) columns t_ns, theta_rad, phi_rad

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 2 or s.shape[1] != 3 or s.shape[0] < 2:
            raise ConfigurationError("path needs at least two (t, theta, phi) samples")
        if np.any(np.diff(s[:, 0]) <= 0):
            raise ConfigurationError("path times must be strictly increasing")
        if np.any(s[:, 1] < -1e-9) or np.any(s[:, 1] > math.pi / 2 + 1e-9):
            raise ConfigurationError("theta must lie in [0, pi/2]")
        s = s.copy()
        s[:, 2] = np.unwrap(s[:, 2])
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    def reversed(self) -> "ParameterPath":
        s = self.samples
        return ParameterPath(np.column_stack([-s[::-1, 0], s[::-1, 1], s[::-1, 2]]))


@dataclass(frozen=True)
class PhaseResult:
    gamma_berry: float
    gamma_oracle: Optional[float]
    mismatch: Optional[float]
    leakage: Optional[float] = None


def wrap_angle(x: float) -> float:
    """Wrap to (-pi, pi]."""
    return float(-((-x + math.pi) % TWO_PI - math.pi))


def _trapezoid_gamma(theta: np.ndarray, phi: np.ndarray) -> float:
    s2 = np.sin(theta) ** 2
    return float(-np.sum(0.5 * (s2[:-1] + s2[1:]) * np.diff(phi)))


def berry_phase(path: ParameterPath, tol: float = 1e-8, max_refinements: int = 24) -> float:
    """-integral of sin^2(Theta) dphi, trapezoid with midpoint refinement.

    The sampled path is treated as piecewise linear in t; subdivision
    continues until successive estimates agree to tol.
    """
    theta = path.samples[:, 1].copy()
    phi = path.samples[:, 2].copy()
    gamma = _trapezoid_gamma(theta, phi)
    for _ in range(max_refinements):
        mid_theta = 0.5 * (theta[:-1] + theta[1:])
        mid_phi = 0.5 * (phi[:-1] + phi[1:])
        new_theta = np.empty(theta.size * 2 - 1)
        new_phi = np.empty_like(new_theta)
        new_theta[0::2] = theta
        new_theta[1::2] = mid_theta
        new_phi[0::2] = phi
        new_phi[1::2] = mid_phi
        theta, phi = new_theta, new_phi
        refined = _trapezoid_gamma(theta, phi)
        if abs(refined - gamma) < tol:
            return refined
        gamma = refined
    return gamma


def realized_path(seq: PulseSequence, times: np.ndarray) -> ParameterPath:
    """The (Theta, phi) trajectory a sequence traces out.

    Theta = atan2(Omega01, Omega12) from the envelope magnitudes and
    phi = phi12 - phi01 from the complex amplitude arguments, unwrapped.
    """
    a01 = seq.complex_amplitude(Transition.T01, times)
    a12 = seq.complex_amplitude(Transition.T12, times)
    theta = np.arctan2(np.abs(a01), np.abs(a12))
    phi12 = np.unwrap(-np.angle(a12))
    phi01 = np.unwrap(-np.angle(a01))
    return ParameterPath(np.column_stack([times, theta, phi12 - phi01]))


@dataclass(frozen=True)
class OraclePhase:
    gamma: float
    leakage: float
    dynamical: float  # accumulated <D|H|D> integral that was subtracted


def adiabatic_phase_oracle(
    seq: PulseSequence,
    params: TransmonParams,
    grid: TimeGrid,
    metric_threshold: float = 10.0,
) -> OraclePhase:
    """Propagate the dark state and read off the geometric phase.

    Requires two-photon-resonant zero-detuning drives and a global
    adiabaticity metric above metric_threshold (stricter than transfer
    runs; phase errors are more sensitive).  The dynamical contribution
    along the instantaneous dark state (zero up to numerical detuning
    drift) is subtracted.  Leakage above 1% invalidates the oracle.
    """
    if abs(seq.detuning(Transition.T01)) > 1e-12 or abs(seq.detuning(Transition.T12)) > 1e-12:
        raise PreconditionError("phase oracle needs zero drive detunings")
    report = global_adiabaticity_metric(seq, Convention.CYCLIC)
    if report.global_metric <= metric_threshold:
        raise PreconditionError(
            f"global adiabaticity metric {report.global_metric:.2f} <= {metric_threshold}"
        )

    psi0 = adiabatic_frame(seq.drive_sample(grid.t_start)).dark
    sim = evolve(psi0, seq, params, grid, dissipative=False, store_states=True)

    overlaps = np.empty(len(sim.states), dtype=complex)
    energies = np.empty(len(sim.states))
    for k, (t, state) in enumerate(zip(sim.times, sim.states)):
        sample = seq.drive_sample(t)
        dark = adiabatic_frame(sample).dark
        overlaps[k] = dark.overlap(state)
        h = build_rotating_hamiltonian(sample)
        energies[k] = float(np.real(np.vdot(dark.amplitudes, h @ dark.amplitudes)))

    leakage = float(1.0 - np.abs(overlaps[-1]) ** 2)
    if leakage > 0.01:
        raise NonAdiabaticRunError(
            f"dark-state leakage {leakage:.4f} exceeds 1%; oracle invalid", leakage=leakage
        )
    phase_series = np.unwrap(np.angle(overlaps))
    dynamical = float(np.trapezoid(energies, sim.times))
    gamma = float(phase_series[-1] - phase_series[0] + dynamical)
    return OraclePhase(gamma=gamma, leakage=leakage, dynamical=dynamical)


def plateau_phase_sequence(
    theta: float = math.pi / 4,
    phi_total: float = math.pi,
    sigma: float = 45.0,
    omega_rms: float = TWO_PI * 0.2,
    ramp_span: float = 90.0,
) -> PulseSequence:
    """Fully overlapped pulse pair holding Theta fixed while phi12 winds.

    Both envelopes share the same Gaussian so tan(Theta) is constant in
    time; the 1-2 drive phase ramps by phi_total across the central
    ramp_span where the envelopes are strong, which keeps the winding
    adiabatic.  omega_rms sets sqrt(Omega01^2 + Omega12^2) at the peak.
    """
    if not 0.0 <= theta <= math.pi / 2:
        raise ConfigurationError("theta must lie in [0, pi/2]")
    ramp = PhaseRamp(-ramp_span / 2.0, ramp_span / 2.0, phi_total)
    om01 = omega_rms * math.sin(theta)
    om12 = omega_rms * math.cos(theta)
    p01 = GaussianPulse(Transition.T01, om01, 0.0, sigma)
    p12 = GaussianPulse(Transition.T12, om12, 0.0, sigma, phase_ramp=ramp)
    window = (-4.0 * sigma, 4.0 * sigma)
    return PulseSequence(pulses=(p12, p01), t_separation_ns=0.0, window=window)


def berry_vs_oracle(
    seq: PulseSequence,
    params: TransmonParams,
    grid: TimeGrid,
    metric_threshold: float = 10.0,
) -> PhaseResult:
    """Compare the path integral against the propagation oracle."""
    oracle = adiabatic_phase_oracle(seq, params, grid, metric_threshold)
    path = realized_path(seq, grid.times[:: max(1, grid.sample_stride // 2)])
    gamma_b = berry_phase(path)
    return PhaseResult(
        gamma_berry=gamma_b,
        gamma_oracle=oracle.gamma,
        mismatch=abs(wrap_angle(gamma_b - oracle.gamma)),
        leakage=oracle.leakage,
    )
