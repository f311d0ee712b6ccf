"""Vectorized many-trajectory RK4 for parameter sweeps.

Integrates a batch of independent systems that share the time grid and
dissipator but differ in their pulse sequences (amplitudes, detunings,
timing).  Cells are processed in fixed-size chunks so results are
bit-identical regardless of how chunks are distributed over workers.
Numerics match lindblad.evolve step for step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigurationError
from .hamiltonian import TransmonParams
from .lindblad import LindbladSpec, TimeGrid, build_dissipators
from .pulses import PulseSequence, Transition
from .units import mhz_to_rad_ns

CHUNK_SIZE = 128


@dataclass
class BatchResult:
    times: np.ndarray  # (n_samples,)
    populations: np.ndarray  # (n_cells, n_samples, dim)
    trace_drift: np.ndarray  # (n_cells,)
    min_eig: np.ndarray  # (n_cells,)
    failures: Tuple[Tuple[int, str], ...] = ()

    def peak(self, level: int) -> np.ndarray:
        return self.populations[:, :, level].max(axis=1)

    def final(self, level: int) -> np.ndarray:
        return self.populations[:, -1, level]


def _chunk_drive(seqs: Sequence[PulseSequence], t_half: np.ndarray, dim: int,
                 params: TransmonParams):
    """Complex drive amplitudes on the half-step grid plus static diagonals."""
    n_cells = len(seqs)
    a01 = np.empty((n_cells, t_half.size), dtype=complex)
    a12 = np.empty((n_cells, t_half.size), dtype=complex)
    diag = np.zeros((n_cells, dim), dtype=complex)
    for c, seq in enumerate(seqs):
        a01[c] = seq.complex_amplitude(Transition.T01, t_half)
        a12[c] = seq.complex_amplitude(Transition.T12, t_half)
        d01 = seq.detuning(Transition.T01)
        d12 = seq.detuning(Transition.T12)
        if dim == 3:
            diag[c, 1] = d01
            diag[c, 2] = d01 + d12
        else:
            omega_split = mhz_to_rad_ns(params.split.delta_split_mhz)
            diag[c, 1] = d01 - omega_split / 2.0
            diag[c, 2] = d01 + omega_split / 2.0
            diag[c, 3] = d01 + d12
    return a01, a12, diag


def _fill_h(out: np.ndarray, a01: np.ndarray, a12: np.ndarray, dim: int,
            weights: Optional[Tuple[float, float]]):
    """Write the coupling entries for one substep into out (n,dim,dim)."""
    if dim == 3:
        out[:, 1, 0] = 0.5 * a01
        out[:, 0, 1] = np.conj(out[:, 1, 0])
        out[:, 1, 2] = 0.5 * a12
        out[:, 2, 1] = np.conj(out[:, 1, 2])
    else:
        wa, wb = weights
        out[:, 1, 0] = 0.5 * wa * a01
        out[:, 2, 0] = 0.5 * wb * a01
        out[:, 1, 3] = 0.5 * wa * a12
        out[:, 2, 3] = 0.5 * wb * a12
        out[:, 0, 1] = np.conj(out[:, 1, 0])
        out[:, 0, 2] = np.conj(out[:, 2, 0])
        out[:, 3, 1] = np.conj(out[:, 1, 3])
        out[:, 3, 2] = np.conj(out[:, 2, 3])


def evolve_chunk(
    seqs: Sequence[PulseSequence],
    params: TransmonParams,
    grid: TimeGrid,
    dim: int = 3,
    dissipative: bool = True,
    rho0: Optional[np.ndarray] = None,
) -> BatchResult:
    """Integrate one chunk of cells on a shared grid; density-matrix path."""
    n_cells = len(seqs)
    n = grid.n_steps
    dt = grid.dt
    t_half = grid.t_start + 0.5 * dt * np.arange(2 * n + 1)
    a01, a12, diag = _chunk_drive(seqs, t_half, dim, params)
    weights = params.split.branch_weights if (dim == 4 and params.split) else None
    if dim == 4 and params.split is None:
        raise ConfigurationError("4-level batch needs transmon split parameters")

    spec = build_dissipators(params, dim) if dissipative else LindbladSpec(jumps=())
    dsup_t = np.ascontiguousarray(spec.superoperator(dim).T)
    have_dissipator = bool(spec.jumps)

    if rho0 is None:
        rho0 = np.zeros((dim, dim), dtype=complex)
        rho0[0, 0] = 1.0
    rho = np.broadcast_to(rho0, (n_cells, dim, dim)).astype(complex).copy()

    hb = np.zeros((n_cells, dim, dim), dtype=complex)
    idx = np.arange(dim)
    hb[:, idx, idx] = diag

    sample_steps = set(range(0, n + 1, grid.sample_stride)) | {n}
    n_samples = len(sample_steps)
    times = np.empty(n_samples)
    pops = np.empty((n_cells, n_samples, dim))
    max_drift = np.zeros(n_cells)
    min_eig = np.zeros(n_cells)

    def rhs(i_sub: int, y: np.ndarray) -> np.ndarray:
        _fill_h(hb, a01[:, i_sub], a12[:, i_sub], dim, weights)
        out = hb @ y
        out -= y @ hb
        out *= -1j
        if have_dissipator:
            out += (y.reshape(n_cells, -1) @ dsup_t).reshape(n_cells, dim, dim)
        return out

    sample_i = 0

    def record(step: int):
        nonlocal sample_i
        tr = np.einsum("cii->c", rho)
        drift = np.abs(tr.real - 1.0) + np.abs(tr.imag)
        herm = 0.5 * (rho + np.conj(np.swapaxes(rho, 1, 2)))
        eigs = np.linalg.eigvalsh(herm)
        np.maximum(max_drift, drift, out=max_drift)
        np.minimum(min_eig, eigs[:, 0], out=min_eig)
        times[sample_i] = grid.t_start + step * dt
        pops[:, sample_i, :] = np.einsum("cii->ci", rho).real
        sample_i += 1

    record(0)
    for step in range(n):
        i = 2 * step
        k1 = rhs(i, rho)
        k2 = rhs(i + 1, rho + (0.5 * dt) * k1)
        k3 = rhs(i + 1, rho + (0.5 * dt) * k2)
        k4 = rhs(i + 2, rho + dt * k3)
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (step + 1) in sample_steps:
            record(step + 1)

    failures = []
    for c in range(n_cells):
        if max_drift[c] > 1e-6:
            failures.append((c, f"trace drift {max_drift[c]:.3e}"))
        elif min_eig[c] < -1e-6:
            failures.append((c, f"negative eigenvalue {min_eig[c]:.3e}"))
    return BatchResult(
        times=times,
        populations=pops,
        trace_drift=max_drift,
        min_eig=min_eig,
        failures=tuple(failures),
    )


def evolve_chunk_ket(
    seqs: Sequence[PulseSequence],
    params: TransmonParams,
    grid: TimeGrid,
    dim: int = 3,
    psi0: Optional[np.ndarray] = None,
) -> BatchResult:
    """Dissipationless Schrodinger propagation for one chunk of cells."""
    n_cells = len(seqs)
    n = grid.n_steps
    dt = grid.dt
    t_half = grid.t_start + 0.5 * dt * np.arange(2 * n + 1)
    a01, a12, diag = _chunk_drive(seqs, t_half, dim, params)
    weights = params.split.branch_weights if (dim == 4 and params.split) else None

    if psi0 is None:
        psi0 = np.zeros(dim, dtype=complex)
        psi0[0] = 1.0
    psi = np.broadcast_to(psi0.reshape(1, dim, 1), (n_cells, dim, 1)).astype(complex).copy()

    hb = np.zeros((n_cells, dim, dim), dtype=complex)
    idx = np.arange(dim)
    hb[:, idx, idx] = diag

    sample_steps = set(range(0, n + 1, grid.sample_stride)) | {n}
    n_samples = len(sample_steps)
    times = np.empty(n_samples)
    pops = np.empty((n_cells, n_samples, dim))
    max_drift = np.zeros(n_cells)

    def rhs(i_sub: int, y: np.ndarray) -> np.ndarray:
        _fill_h(hb, a01[:, i_sub], a12[:, i_sub], dim, weights)
        return -1j * (hb @ y)

    sample_i = 0

    def record(step: int):
        nonlocal sample_i
        p = np.abs(psi[:, :, 0]) ** 2
        drift = np.abs(p.sum(axis=1) - 1.0)
        np.maximum(max_drift, drift, out=max_drift)
        times[sample_i] = grid.t_start + step * dt
        pops[:, sample_i, :] = p
        sample_i += 1

    record(0)
    for step in range(n):
        i = 2 * step
        k1 = rhs(i, psi)
        k2 = rhs(i + 1, psi + (0.5 * dt) * k1)
        k3 = rhs(i + 1, psi + (0.5 * dt) * k2)
        k4 = rhs(i + 2, psi + dt * k3)
        psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (step + 1) in sample_steps:
            record(step + 1)

    failures = tuple(
        (c, f"norm drift {max_drift[c]:.3e}") for c in range(n_cells) if max_drift[c] > 1e-6
    )
    return BatchResult(
        times=times,
        populations=pops,
        trace_drift=max_drift,
        min_eig=np.zeros(n_cells),
        failures=failures,
    )


def run_batch(
    seqs: Sequence[PulseSequence],
    params: TransmonParams,
    grid: TimeGrid,
    dim: int = 3,
    dissipative: bool = True,
    rho0: Optional[np.ndarray] = None,
    workers: int = 1,
    chunk_size: int = CHUNK_SIZE,
) -> BatchResult:
    """Run all cells chunk by chunk, optionally over a process pool.

    The chunk partition is independent of the worker count, so serial and
    parallel runs produce identical bytes.
    """
    chunks = [list(range(i, min(i + chunk_size, len(seqs)))) for i in range(0, len(seqs), chunk_size)]
    args = [([seqs[i] for i in ch], params, grid, dim, dissipative, rho0) for ch in chunks]
    if workers > 1 and len(chunks) > 1:
        import concurrent.futures as cf

        with cf.ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one_chunk, args))
    else:
        results = [_run_one_chunk(a) for a in args]

    times = results[0].times
    pops = np.concatenate([r.populations for r in results], axis=0)
    drift = np.concatenate([r.trace_drift for r in results])
    min_eig = np.concatenate([r.min_eig for r in results])
    failures: List[Tuple[int, str]] = []
    for ch, r in zip(chunks, results):
        failures.extend((ch[c], msg) for c, msg in r.failures)
    return BatchResult(times=times, populations=pops, trace_drift=drift,
                       min_eig=min_eig, failures=tuple(failures))


def _run_one_chunk(args) -> BatchResult:
    seqs, params, grid, dim, dissipative, rho0 = args
    return evolve_chunk(seqs, params, grid, dim, dissipative, rho0)
