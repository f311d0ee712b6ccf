"""Rotating-frame Hamiltonians, the adiabatic eigenframe, dispersive shifts.

Drive phases enter through complex amplitudes A = Omega * exp(-i*phi)
placed on the middle row (the |1><0| and |1><2| couplings), which is the
convention under which the dark state is
cos(Theta)|0> - sin(Theta) exp(i*(phi12-phi01))|2> and H|D> = 0 at
two-photon resonance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .core import ComplexMatrix, Ket
from .errors import (
    ConfigurationError,
    NonDispersiveError,
    PreconditionError,
    UndefinedFrameError,
)
from .units import mhz_to_rad_ns, rate_mhz_to_per_ns


@dataclass(frozen=True)
class SplitSpec:
    """Quasi-degenerate intermediate level: |1> split into |1a>, |1b>.

    Levels sit symmetrically at +-delta_split/2 around the nominal |1>;
    branch_weights scale both drive couplings into each branch.
    """

    delta_split_mhz: float
    branch_weights: Tuple[float, float] = (1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0))

    def __post_init__(self):
        if self.delta_split_mhz < 0:
            raise ConfigurationError("delta_split must be nonnegative")
        wa, wb = self.branch_weights
        if abs(wa * wa + wb * wb - 1.0) > 1e-9:
            raise ConfigurationError("branch weights must satisfy wa^2 + wb^2 = 1")


@dataclass(frozen=True)
class TransmonParams:
    """Measured transmon parameters, in the units the lab quotes them.

    Transition frequencies are Lamb-shift renormalized ordinary
    frequencies (omega_tilde / 2pi, MHz); decay/dephasing rates are plain
    rates in MHz (1e6 events per second, no 2pi).
    """

    f01_mhz: float = 5270.0
    f12_mhz: float = 4820.0
    gamma10_mhz: float = 2.4
    gamma21_mhz: float = 5.2
    gamma_phi10_mhz: float = 0.4
    gamma_phi21_mhz: float = 0.4
    split: Optional[SplitSpec] = None

    def __post_init__(self):
        for name in ("gamma10_mhz", "gamma21_mhz", "gamma_phi10_mhz", "gamma_phi21_mhz"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be nonnegative")
        if not self.f01_mhz > self.f12_mhz:
            raise ConfigurationError("need f01 > f12 (negative anharmonicity)")

    @property
    def gamma10(self) -> float:
        """Relaxation rate 1->0 in 1/ns."""
        return rate_mhz_to_per_ns(self.gamma10_mhz)

    @property
    def gamma21(self) -> float:
        return rate_mhz_to_per_ns(self.gamma21_mhz)

    @property
    def gamma_phi10(self) -> float:
        return rate_mhz_to_per_ns(self.gamma_phi10_mhz)

    @property
    def gamma_phi21(self) -> float:
        return rate_mhz_to_per_ns(self.gamma_phi21_mhz)

    @property
    def dim(self) -> int:
        return 4 if self.split is not None else 3


@dataclass(frozen=True)
class DriveSample:
    """Instantaneous drive parameters, angular units (rad/ns, rad)."""

    omega01: float
    omega12: float
    delta01: float = 0.0
    delta12: float = 0.0
    phi01: float = 0.0
    phi12: float = 0.0

    def __post_init__(self):
        if self.omega01 < 0 or self.omega12 < 0:
            raise ConfigurationError("drive amplitudes must be nonnegative")


def build_rotating_hamiltonian(s: DriveSample) -> ComplexMatrix:
    """Three-level rotating-frame Hamiltonian, rad/ns (hbar = 1).

    H = (1/2) [[0,         A01*,      0     ],
               [A01,       2 d01,     A12   ],
               [0,         A12*,      2(d01+d12)]],
    with A_ij = Omega_ij exp(-i phi_ij).  Hermitian by construction.
    """
    a01 = s.omega01 * np.exp(-1j * s.phi01)
    a12 = s.omega12 * np.exp(-1j * s.phi12)
    h = np.zeros((3, 3), dtype=complex)
    h[1, 0] = 0.5 * a01
    h[0, 1] = np.conj(h[1, 0])
    h[1, 2] = 0.5 * a12
    h[2, 1] = np.conj(h[1, 2])
    h[1, 1] = s.delta01
    h[2, 2] = s.delta01 + s.delta12
    return h


@dataclass(frozen=True)
class AdiabaticFrame:
    """Dark/bright/plus/minus frame at two-photon resonance.

    omega_plus/minus follow the conventional quoted normalization
    d01 +- sqrt(d01^2 + O01^2 + O12^2), which is twice the corresponding
    eigenvalue of build_rotating_hamiltonian (whose couplings carry the
    factor 1/2).  omega_dark is identically 0.
    """

    theta: float
    phi: float
    omega_plus: float
    omega_minus: float
    omega_dark: float
    dark: Ket
    bright: Ket
    plus: Ket
    minus: Ket


def adiabatic_frame(s: DriveSample) -> AdiabaticFrame:
    if abs(s.delta01 + s.delta12) > 1e-12:
        raise PreconditionError(
            f"two-photon resonance violated: delta01 + delta12 = {s.delta01 + s.delta12:.3e}"
        )
    if s.omega01 == 0.0 and s.omega12 == 0.0:
        raise UndefinedFrameError("adiabatic frame undefined with both drives off")

    theta = math.atan2(s.omega01, s.omega12)
    phi = s.phi12 - s.phi01
    omega_r2 = s.omega01**2 + s.omega12**2
    root = math.sqrt(s.delta01**2 + omega_r2)
    omega_plus = s.delta01 + root
    omega_minus = s.delta01 - root
    phi_mix = math.atan2(
        math.sqrt(omega_r2 / 2.0),
        math.sqrt((omega_r2 + s.delta01**2) / 2.0) + s.delta01 / math.sqrt(2.0),
    )

    e = np.exp(1j * phi)
    dark = np.array([math.cos(theta), 0.0, -math.sin(theta) * e], dtype=complex)
    bright = np.array([math.sin(theta), 0.0, math.cos(theta) * e], dtype=complex)
    # The exact |+->/|-> eigenvectors carry the 0-1 drive phase on their
    # bright component; it reduces to the textbook form when phi01 = 0.
    e01 = np.exp(1j * s.phi01)
    one = np.array([0.0, 1.0, 0.0], dtype=complex)
    plus = math.sin(phi_mix) * e01 * bright + math.cos(phi_mix) * one
    minus = math.cos(phi_mix) * e01 * bright - math.sin(phi_mix) * one

    return AdiabaticFrame(
        theta=theta,
        phi=phi,
        omega_plus=omega_plus,
        omega_minus=omega_minus,
        omega_dark=0.0,
        dark=Ket(dark),
        bright=Ket(bright),
        plus=Ket(plus),
        minus=Ket(minus),
    )


@dataclass(frozen=True)
class CavityParams:
    """Readout cavity model parameters, ordinary frequencies in MHz."""

    f_res_mhz: float = 7000.0
    kappa_mhz: float = 1.0
    g_mhz: Tuple[float, ...] = (80.0, 113.1, 138.6)
    epsilon_mhz: float = 0.1
    eta: float = 1.0
    f_meas_mhz: Optional[float] = None

    def __post_init__(self):
        if self.kappa_mhz <= 0:
            raise ConfigurationError("cavity linewidth kappa must be positive")
        if any(g < 0 for g in self.g_mhz):
            raise ConfigurationError("couplings g must be nonnegative")

    @property
    def f_meas(self) -> float:
        return self.f_res_mhz if self.f_meas_mhz is None else self.f_meas_mhz


@dataclass(frozen=True)
class DispersiveShifts:
    """chi_{j,j+1} = g^2 / (omega_{j,j+1} - omega_res), all in MHz.

    pulls_mhz[j] is the cavity frequency shift with the transmon in |j>,
    relative to the transmon-in-|0> cavity line:
    pull_j = chi_{j-1,j} + chi_{0,1} - chi_{j,j+1}, pull_0 = 0.
    """

    chi_mhz: Tuple[float, ...]
    lamb_shifted_mhz: Tuple[float, ...]
    pulls_mhz: Tuple[float, ...]


def dispersive_shifts(cav: CavityParams, bare_transitions_mhz: Sequence[float]) -> DispersiveShifts:
    transitions = tuple(bare_transitions_mhz)
    gs = cav.g_mhz[: len(transitions)]
    if len(gs) < len(transitions):
        raise ConfigurationError("need one coupling g per transition")
    chis = []
    for g, f in zip(gs, transitions):
        delta = f - cav.f_res_mhz
        if abs(delta) < 10.0 * g:
            raise NonDispersiveError(
                f"transition at {f} MHz too close to cavity: |Delta| = {abs(delta):.1f} < 10 g"
            )
        chis.append(g * g / delta)
    lamb = [f + chis[j] - (chis[j - 1] if j > 0 else 0.0) for j, f in enumerate(transitions)]
    pulls = [0.0]
    for j in range(1, len(transitions) + 1):
        chi_below = chis[j - 1]
        chi_above = chis[j] if j < len(chis) else 0.0
        pulls.append(chi_below + chis[0] - chi_above)
    return DispersiveShifts(chi_mhz=tuple(chis), lamb_shifted_mhz=tuple(lamb), pulls_mhz=tuple(pulls))


def build_split_hamiltonian(s: DriveSample, split: Optional[SplitSpec]) -> ComplexMatrix:
    """4-level Hamiltonian in the basis {|0>, |1a>, |1b>, |2>}, rad/ns.

    The intermediate branches sit at delta01 -+ omega_split/2 and couple
    to |0> and |2> with the branch-weighted drive amplitudes.
    """
    if split is None:
        raise ConfigurationError("split spec required for the 4-level Hamiltonian")
    wa, wb = split.branch_weights
    omega_split = mhz_to_rad_ns(split.delta_split_mhz)
    a01 = s.omega01 * np.exp(-1j * s.phi01)
    a12 = s.omega12 * np.exp(-1j * s.phi12)
    h = np.zeros((4, 4), dtype=complex)
    h[1, 0] = 0.5 * wa * a01
    h[2, 0] = 0.5 * wb * a01
    h[1, 3] = 0.5 * wa * a12
    h[2, 3] = 0.5 * wb * a12
    h[0, 1] = np.conj(h[1, 0])
    h[0, 2] = np.conj(h[2, 0])
    h[3, 1] = np.conj(h[1, 3])
    h[3, 2] = np.conj(h[2, 3])
    h[1, 1] = s.delta01 - omega_split / 2.0
    h[2, 2] = s.delta01 + omega_split / 2.0
    h[3, 3] = s.delta01 + s.delta12
    return h
