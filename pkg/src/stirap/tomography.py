"""Dispersive-readout tomography: synthetic homodyne traces and inversion.

Reference traces come from the classical driven-damped cavity amplitude
da/dtau = -i*Delta_j*a - (kappa/2)*a - i*eps, a(0) = 0, with the
state-dependent dispersive pull Delta_j.  A measured trace is a convex
combination of the references weighted by the populations; inversion is
exponentially-weighted least squares on the probability simplex, solved
by Levenberg-Marquardt with an exact active-set polish at the bounds.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .errors import ConfigurationError, MaxIterationsError, SingularDesignError
from .hamiltonian import CavityParams, TransmonParams, dispersive_shifts
from .lindblad import SimResult
from .units import mhz_to_rad_ns

DEFAULT_TAU_MAX = 1500.0  # ns
DEFAULT_DTAU = 5.0  # ns
DEFAULT_WEIGHT = 700.0  # ns, exponential weighting time constant


@dataclass(frozen=True)
class ReferenceTrace:
    """Homodyne response {I(tau), Q(tau)} of one prepared transmon state."""

    taus: np.ndarray
    I: np.ndarray
    Q: np.ndarray
    state_label: int

    def __post_init__(self):
        for name in ("taus", "I", "Q"):
            a = np.ascontiguousarray(getattr(self, name), dtype=float)
            a.flags.writeable = False
            object.__setattr__(self, name, a)
        if not (self.taus.shape == self.I.shape == self.Q.shape):
            raise ConfigurationError("trace arrays must share one tau grid")


@dataclass(frozen=True)
class MeasuredTrace:
    taus: np.ndarray
    I: np.ndarray
    Q: np.ndarray


@dataclass(frozen=True)
class TomographyResult:
    p: Tuple[float, float, float]
    residual: float  # weighted RMS over I and Q samples
    iterations: int


def _cavity_amplitude(taus: np.ndarray, delta: float, kappa: float, eps: float) -> np.ndarray:
    """Exact solution of the driven damped cavity mode, a(0) = 0."""
    pole = 1j * delta + 0.5 * kappa
    a_ss = -1j * eps / pole
    return a_ss * (1.0 - np.exp(-pole * taus))


def _ladder_transitions(trans: TransmonParams, n: int) -> List[float]:
    """Extend the measured 01/12 transitions down the anharmonic ladder."""
    anharm = trans.f12_mhz - trans.f01_mhz
    out = [trans.f01_mhz, trans.f12_mhz]
    while len(out) < n:
        out.append(out[-1] + anharm)
    return out[:n]


def synth_reference_traces(
    cav: CavityParams,
    trans: TransmonParams,
    tau_max: float = DEFAULT_TAU_MAX,
    dtau: float = DEFAULT_DTAU,
    decoherence_corrected: bool = False,
) -> Tuple[ReferenceTrace, ReferenceTrace, ReferenceTrace]:
    """Per-state cavity responses on a tau grid 0..tau_max.

    I = -2 eta Re<a>, Q = +2 eta Im<a>; the overall homodyne sign is part
    of the conversion factor eta.  With decoherence_corrected=True the
    |1> and |2> references include relaxation during readout: the cavity
    amplitude is propagated jointly with the decaying level occupations.
    """
    taus = np.arange(0.0, tau_max + dtau / 2, dtau)
    shifts = dispersive_shifts(cav, _ladder_transitions(trans, len(cav.g_mhz)))
    pulls = shifts.pulls_mhz[:3]
    if len(pulls) < 3:
        raise ConfigurationError("need couplings for at least two transitions")
    kappa = mhz_to_rad_ns(cav.kappa_mhz)
    eps = mhz_to_rad_ns(cav.epsilon_mhz)
    deltas = [mhz_to_rad_ns(cav.f_res_mhz + pull - cav.f_meas) for pull in pulls]

    traces = []
    for j in range(3):
        if decoherence_corrected and j > 0:
            amp = _decaying_state_amplitude(taus, j, deltas, kappa, eps, trans)
        else:
            amp = _cavity_amplitude(taus, deltas[j], kappa, eps)
        traces.append(
            ReferenceTrace(
                taus=taus,
                I=-2.0 * cav.eta * amp.real,
                Q=2.0 * cav.eta * amp.imag,
                state_label=j,
            )
        )
    return tuple(traces)


def _decaying_state_amplitude(taus, j, deltas, kappa, eps, trans: TransmonParams):
    """<a>(tau) for a transmon prepared in |j> that relaxes during readout.

    Tracks alpha_k = Tr[a rho |k><k|]; relaxation transfers amplitude
    weight down the ladder while each component rings up at its own pull.
    """
    g10, g21 = trans.gamma10, trans.gamma21

    def pops(tau):
        if j == 1:
            p1 = np.exp(-g10 * tau)
            return np.array([1.0 - p1, p1, 0.0])
        p2 = np.exp(-g21 * tau)
        if abs(g10 - g21) < 1e-12:
            p1 = g21 * tau * np.exp(-g10 * tau)
        else:
            p1 = g21 / (g10 - g21) * (np.exp(-g21 * tau) - np.exp(-g10 * tau))
        return np.array([1.0 - p1 - p2, p1, p2])

    poles = np.array([1j * d + 0.5 * kappa for d in deltas])

    def rhs(tau, alpha):
        p = pops(tau)
        out = -poles * alpha - 1j * eps * p
        out[0] += g10 * alpha[1]
        out[1] += -g10 * alpha[1] + g21 * alpha[2]
        out[2] += -g21 * alpha[2]
        return out

    n_sub = 10  # RK4 substeps per tau sample
    alpha = np.zeros(3, dtype=complex)
    out = np.empty(taus.size, dtype=complex)
    out[0] = 0.0
    for i in range(1, taus.size):
        h = (taus[i] - taus[i - 1]) / n_sub
        tau = taus[i - 1]
        for _ in range(n_sub):
            k1 = rhs(tau, alpha)
            k2 = rhs(tau + h / 2, alpha + h / 2 * k1)
            k3 = rhs(tau + h / 2, alpha + h / 2 * k2)
            k4 = rhs(tau + h, alpha + h * k3)
            alpha = alpha + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            tau += h
        out[i] = alpha.sum()
    return out


def _check_grids(refs: Sequence[ReferenceTrace]):
    base = refs[0].taus
    for r in refs[1:]:
        if r.taus.shape != base.shape or not np.array_equal(r.taus, base):
            raise ConfigurationError("reference traces must share one tau grid")


def mix_traces(
    p: Sequence[float],
    refs: Sequence[ReferenceTrace],
    noise_std: float = 0.0,
    seed: int = 0,
) -> MeasuredTrace:
    """Convex combination of the references plus seeded Gaussian noise."""
    p = np.asarray(p, dtype=float)
    if p.shape != (3,) or np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
        raise ConfigurationError(f"populations must lie on the probability simplex, got {p}")
    _check_grids(refs)
    i_mix = sum(pj * r.I for pj, r in zip(p, refs))
    q_mix = sum(pj * r.Q for pj, r in zip(p, refs))
    if noise_std > 0.0:
        rng = np.random.default_rng(seed)
        i_mix = i_mix + rng.normal(0.0, noise_std, i_mix.size)
        q_mix = q_mix + rng.normal(0.0, noise_std, q_mix.size)
    return MeasuredTrace(taus=refs[0].taus.copy(), I=i_mix, Q=q_mix)


def trace_scale(refs: Sequence[ReferenceTrace]) -> float:
    """Full scale of the reference set: max |I|,|Q| over all traces."""
    return max(max(np.abs(r.I).max(), np.abs(r.Q).max()) for r in refs)


def design_matrix(refs: Sequence[ReferenceTrace], weight_ns: float = DEFAULT_WEIGHT) -> np.ndarray:
    """Weighted 3-column design (stacked I and Q rows), one column per state."""
    w = np.exp(-refs[0].taus / weight_ns)
    return np.column_stack([np.concatenate([w * r.I, w * r.Q]) for r in refs])


def design_condition(refs: Sequence[ReferenceTrace], weight_ns: float = DEFAULT_WEIGHT) -> float:
    return float(np.linalg.cond(design_matrix(refs, weight_ns)))


def _project_triangle(x: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x0 >= 0, x1 >= 0, x0 + x1 <= 1}."""
    x = np.clip(x, 0.0, None)
    if x[0] + x[1] > 1.0:
        # project onto the hypotenuse segment from (1,0) to (0,1)
        t = min(max((x[0] - x[1] + 1.0) / 2.0, 0.0), 1.0)
        x = np.array([t, 1.0 - t])
    return x


def _active_set_polish(a: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Exact minimizer of ||b - A x||^2 over the triangle (convex QP, tiny).

    Tries the unconstrained optimum, each edge, and each vertex; returns
    the feasible candidate with the lowest cost.
    """
    candidates = []
    ata = a.T @ a
    atb = a.T @ b
    try:
        xu = np.linalg.solve(ata, atb)
        if xu[0] >= -1e-14 and xu[1] >= -1e-14 and xu.sum() <= 1.0 + 1e-14:
            candidates.append(np.clip(xu, 0.0, 1.0))
    except np.linalg.LinAlgError:
        pass
    # edges: x0 = 0; x1 = 0; x0 + x1 = 1
    for edge in range(3):
        if edge == 0:
            col = a[:, 1]
            t = float(col @ b) / float(col @ col) if col @ col > 0 else 0.0
            cand = np.array([0.0, min(max(t, 0.0), 1.0)])
        elif edge == 1:
            col = a[:, 0]
            t = float(col @ b) / float(col @ col) if col @ col > 0 else 0.0
            cand = np.array([min(max(t, 0.0), 1.0), 0.0])
        else:
            col = a[:, 0] - a[:, 1]
            rhs = b - a[:, 1]
            t = float(col @ rhs) / float(col @ col) if col @ col > 0 else 0.0
            t = min(max(t, 0.0), 1.0)
            cand = np.array([t, 1.0 - t])
        candidates.append(cand)
    candidates.extend([np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([0.0, 1.0])])
    candidates.append(x)

    def cost(xc):
        r = b - a @ xc
        return float(r @ r)

    best = min(candidates, key=cost)
    return best


def reconstruct_populations(
    meas: MeasuredTrace,
    refs: Sequence[ReferenceTrace],
    weight_ns: float = DEFAULT_WEIGHT,
    max_iterations: int = 200,
    lambda_init: float = 1e-3,
    step_tol: float = 1e-10,
) -> TomographyResult:
    """Invert a measured trace to populations on the probability simplex.

    Minimizes sum_tau exp(-2 tau / w) * |r_meas - sum_j p_j r_j|^2 in the
    reduced coordinates (p0, p1), p2 = 1 - p0 - p1, by Levenberg-Marquardt
    (lambda up/down factor 10) with projection onto the simplex and a
    final exact active-set solve when the optimum sits on a bound.
    """
    _check_grids(list(refs) + [ReferenceTrace(meas.taus, meas.I, meas.Q, -1)])
    full_design = design_matrix(refs, weight_ns)
    cond = float(np.linalg.cond(full_design))
    if cond > 1e6:
        raise SingularDesignError(f"reference traces too degenerate: condition {cond:.3e}")

    w = np.exp(-meas.taus / weight_ns)
    wb = np.concatenate([w * meas.I, w * meas.Q])
    r2col = full_design[:, 2]
    a = np.column_stack([full_design[:, 0] - r2col, full_design[:, 1] - r2col])
    b = wb - r2col

    def cost(x):
        r = b - a @ x
        return float(r @ r)

    ata = a.T @ a
    x = np.array([1.0 / 3.0, 1.0 / 3.0])
    f = cost(x)
    lam = lambda_init
    iterations = 0
    converged = False
    for iterations in range(1, max_iterations + 1):
        g = a.T @ (b - a @ x)
        try:
            delta = np.linalg.solve(ata + lam * np.eye(2), g)
        except np.linalg.LinAlgError:
            lam *= 10.0
            continue
        x_new = _project_triangle(x + delta)
        f_new = cost(x_new)
        if f_new <= f:
            step = float(np.linalg.norm(x_new - x))
            x, f = x_new, f_new
            lam = max(lam / 10.0, 1e-300)
            if step < step_tol:
                converged = True
                break
        else:
            lam *= 10.0
            if lam > 1e15:
                converged = True  # stuck at a constrained point; polish below
                break

    x = _active_set_polish(a, b, x)
    f = cost(x)
    n_eff = 2 * np.sum(w**2)
    # p2 computed against the rounded sum keeps p0 + p1 + p2 == 1 exactly
    result = TomographyResult(
        p=(float(x[0]), float(x[1]), float(1.0 - (float(x[0]) + float(x[1])))),
        residual=float(np.sqrt(f / n_eff)),
        iterations=iterations,
    )
    if not converged and iterations >= max_iterations:
        raise MaxIterationsError(
            f"Levenberg-Marquardt did not converge in {max_iterations} iterations", result=result
        )
    return result


def tomography_timeline(
    sim: SimResult,
    refs: Sequence[ReferenceTrace],
    noise_std: float = 0.0,
    weight_ns: float = DEFAULT_WEIGHT,
    seed: int = 0,
) -> List[TomographyResult]:
    """Mix-and-invert at every sampled simulation time.

    Emulates the measurement pipeline end to end, including its bias;
    per-time noise seeds derive deterministically from (seed, index).
    """
    if sim.populations.shape[1] != 3:
        raise ConfigurationError("tomography timeline needs a 3-level simulation")
    results = []
    for idx in range(sim.populations.shape[0]):
        p = np.clip(sim.populations[idx], 0.0, None)
        p = p / p.sum()
        cell_seed = np.random.SeedSequence([seed, idx]).generate_state(1)[0]
        meas = mix_traces(p, refs, noise_std=noise_std, seed=int(cell_seed))
        results.append(reconstruct_populations(meas, refs, weight_ns=weight_ns))
    return results


def traces_to_csv(path, traces: Sequence) -> None:
    """Write reference/measured traces as tau_ns, I, Q, state_label rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tau_ns", "I", "Q", "state_label"])
        for tr in traces:
            label = getattr(tr, "state_label", -1)
            for tau, iv, qv in zip(tr.taus, tr.I, tr.Q):
                writer.writerow([repr(float(tau)), repr(float(iv)), repr(float(qv)), label])


def traces_from_csv(path) -> List[ReferenceTrace]:
    """Read traces back, grouped by state_label (measured traces as -1)."""
    groups = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            groups.setdefault(int(row["state_label"]), []).append(
                (float(row["tau_ns"]), float(row["I"]), float(row["Q"]))
            )
    out = []
    for label in sorted(groups):
        rows = np.array(groups[label])
        out.append(ReferenceTrace(taus=rows[:, 0], I=rows[:, 1], Q=rows[:, 2], state_label=label))
    return out
