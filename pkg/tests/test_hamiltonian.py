import math

import numpy as np
import pytest

from stirap.core import jacobi_eigh
from stirap.errors import (
    ConfigurationError,
    NonDispersiveError,
    PreconditionError,
    UndefinedFrameError,
)
from stirap.hamiltonian import (
    CavityParams,
    DriveSample,
    SplitSpec,
    TransmonParams,
    adiabatic_frame,
    build_rotating_hamiltonian,
    build_split_hamiltonian,
    dispersive_shifts,
)
from stirap.units import TWO_PI, mhz_to_rad_ns


class TestBuildRotatingHamiltonian:
    def test_zero_drive_zero_matrix(self):
        h = build_rotating_hamiltonian(DriveSample(0.0, 0.0))
        assert np.all(h == 0)

    def test_paper_couplings(self):
        s = DriveSample(mhz_to_rad_ns(43.4), mhz_to_rad_ns(38.2))
        h = build_rotating_hamiltonian(s)
        # couplings are Omega/2 = pi * f * 1e-3
        assert abs(h[0, 1] - math.pi * 43.4e-3) < 1e-15
        assert abs(h[1, 2] - math.pi * 38.2e-3) < 1e-15
        assert np.all(np.diag(h) == 0)

    def test_exact_hermiticity(self, rng):
        for _ in range(50):
            s = DriveSample(*rng.uniform(0, 0.5, 2), *rng.uniform(-0.2, 0.2, 2),
                            *rng.uniform(-math.pi, math.pi, 2))
            h = build_rotating_hamiltonian(s)
            assert np.max(np.abs(h - h.conj().T)) == 0.0

    def test_eigenvalues_match_methods_formula(self, rng):
        # at two-photon resonance the spectrum is {0, omega_pm / 2} with
        # omega_pm = d01 +- sqrt(d01^2 + O01^2 + O12^2) as conventionally
        # quoted (the Hamiltonian itself carries the factor 1/2)
        for _ in range(1000):
            om01, om12 = rng.uniform(0, 0.5, 2)
            d01 = rng.uniform(-0.3, 0.3)
            phi01, phi12 = rng.uniform(-math.pi, math.pi, 2)
            s = DriveSample(om01, om12, d01, -d01, phi01, phi12)
            h = build_rotating_hamiltonian(s)
            root = math.sqrt(d01**2 + om01**2 + om12**2)
            expected = np.sort([0.0, (d01 - root) / 2.0, (d01 + root) / 2.0])
            assert np.max(np.abs(np.linalg.eigvalsh(h) - expected)) < 1e-10

    def test_eigensolver_cross_check(self):
        s = DriveSample(0.3, 0.2, 0.1, -0.1, 0.4, -0.9)
        h = build_rotating_hamiltonian(s)
        vals, _ = jacobi_eigh(h)
        assert np.allclose(vals, np.linalg.eigvalsh(h), atol=1e-12)


class TestAdiabaticFrame:
    def test_stirap_start(self):
        f = adiabatic_frame(DriveSample(0.0, 0.25))
        assert f.theta == 0.0
        assert np.allclose(f.dark.amplitudes, [1, 0, 0])

    def test_equal_amplitudes_zero_detuning(self):
        om = mhz_to_rad_ns(40.0)
        f = adiabatic_frame(DriveSample(om, om))
        assert abs(f.theta - math.pi / 4) < 1e-12
        assert abs(f.phi - 0.0) < 1e-12
        # quoted normalization: omega_pm = +- sqrt(2) Omega
        assert abs(f.omega_plus - math.sqrt(2) * om) < 1e-12
        assert abs(f.omega_minus + math.sqrt(2) * om) < 1e-12
        assert f.omega_dark == 0.0
        # Phi = pi/4 at zero detuning
        assert abs(np.abs(f.plus.amplitudes[1]) - math.cos(math.pi / 4)) < 1e-12

    def test_stirap_end(self):
        f = adiabatic_frame(DriveSample(0.25, 0.0, phi01=0.3, phi12=0.5))
        assert abs(f.theta - math.pi / 2) < 1e-12
        expected = -np.exp(1j * (0.5 - 0.3))
        assert abs(f.dark.amplitudes[2] - expected) < 1e-12
        assert abs(f.dark.amplitudes[0]) < 1e-12

    def test_dark_state_annihilated(self, rng):
        for _ in range(200):
            om01, om12 = rng.uniform(0.01, 0.5, 2)
            d01 = rng.uniform(-0.3, 0.3)
            phi01, phi12 = rng.uniform(-math.pi, math.pi, 2)
            s = DriveSample(om01, om12, d01, -d01, phi01, phi12)
            h = build_rotating_hamiltonian(s)
            f = adiabatic_frame(s)
            assert np.max(np.abs(h @ f.dark.amplitudes)) < 1e-10

    def test_frame_orthonormal_and_eigen(self, rng):
        for _ in range(100):
            om01, om12 = rng.uniform(0.01, 0.5, 2)
            d01 = rng.uniform(-0.3, 0.3)
            phi01, phi12 = rng.uniform(-math.pi, math.pi, 2)
            s = DriveSample(om01, om12, d01, -d01, phi01, phi12)
            f = adiabatic_frame(s)
            basis = np.column_stack([f.dark.amplitudes, f.bright.amplitudes,
                                     f.plus.amplitudes, f.minus.amplitudes])
            assert abs(np.vdot(f.dark.amplitudes, f.bright.amplitudes)) < 1e-12
            assert abs(f.dark.amplitudes[1]) == 0.0  # never touches |1>
            gram = basis[:, [0, 2, 3]].conj().T @ basis[:, [0, 2, 3]]
            assert np.max(np.abs(gram - np.eye(3))) < 1e-10
            h = build_rotating_hamiltonian(s)
            for ket, val in ((f.plus, f.omega_plus), (f.minus, f.omega_minus)):
                assert np.max(np.abs(h @ ket.amplitudes - (val / 2.0) * ket.amplitudes)) < 1e-10

    def test_two_photon_violation(self):
        with pytest.raises(PreconditionError):
            adiabatic_frame(DriveSample(0.1, 0.1, delta01=0.05, delta12=0.0))

    def test_undefined_frame(self):
        with pytest.raises(UndefinedFrameError):
            adiabatic_frame(DriveSample(0.0, 0.0))


class TestDispersiveShifts:
    def test_simple_ratio(self):
        cav = CavityParams(f_res_mhz=6000.0, g_mhz=(50.0,), kappa_mhz=1.0)
        res = dispersive_shifts(cav, [7000.0])
        assert abs(res.chi_mhz[0] - 2.5) < 1e-12  # 50^2 / 1000

    def test_zero_coupling(self):
        cav = CavityParams(f_res_mhz=7000.0, g_mhz=(0.0, 0.0), kappa_mhz=1.0)
        res = dispersive_shifts(cav, [5270.0, 4820.0])
        assert res.chi_mhz == (0.0, 0.0)
        assert res.lamb_shifted_mhz == (5270.0, 4820.0)
        assert res.pulls_mhz == (0.0, 0.0, 0.0)

    def test_lamb_shift_composition(self):
        cav = CavityParams(f_res_mhz=7000.0, g_mhz=(80.0, 113.1), kappa_mhz=1.0)
        res = dispersive_shifts(cav, [5270.0, 4820.0])
        chi01, chi12 = res.chi_mhz
        assert abs(res.lamb_shifted_mhz[0] - (5270.0 + chi01)) < 1e-12
        assert abs(res.lamb_shifted_mhz[1] - (4820.0 + chi12 - chi01)) < 1e-12
        assert abs(res.pulls_mhz[1] - (2 * chi01 - chi12)) < 1e-12

    def test_non_dispersive_guard(self):
        cav = CavityParams(f_res_mhz=5000.0, g_mhz=(80.0,), kappa_mhz=1.0)
        with pytest.raises(NonDispersiveError):
            dispersive_shifts(cav, [5300.0])

    def test_against_jaynes_cummings_diagonalization(self):
        # oracle: diagonalize the ladder Jaynes-Cummings Hamiltonian with a
        # photon cutoff and read the per-state cavity pull from the dressed
        # energies E(j, n=1) - E(j, n=0), referenced to the j=0 pull.
        f_res = 7000.0
        transitions = [5270.0, 4820.0]
        gs = (50.0, 70.71)
        n_lvl, n_ph = 3, 6

        energies = [0.0]
        for f in transitions:
            energies.append(energies[-1] + f)

        dim = n_lvl * n_ph
        h = np.zeros((dim, dim))

        def idx(j, n):
            return j * n_ph + n

        for j in range(n_lvl):
            for n in range(n_ph):
                h[idx(j, n), idx(j, n)] = energies[j] + f_res * n
        for j in range(n_lvl - 1):
            for n in range(n_ph - 1):
                # g (|j+1><j| a + h.c.): couples (j, n+1) <-> (j+1, n)
                amp = gs[j] * math.sqrt(n + 1)
                h[idx(j + 1, n), idx(j, n + 1)] = amp
                h[idx(j, n + 1), idx(j + 1, n)] = amp

        vals, vecs = np.linalg.eigh(h)

        def dressed_energy(j, n):
            overlaps = np.abs(vecs[idx(j, n), :])
            return vals[int(overlaps.argmax())]

        pulls_jc = []
        for j in range(3):
            cav_freq = dressed_energy(j, 1) - dressed_energy(j, 0)
            pulls_jc.append(cav_freq)
        pulls_jc = [p - pulls_jc[0] for p in pulls_jc]

        cav = CavityParams(f_res_mhz=f_res, g_mhz=gs, kappa_mhz=1.0)
        res = dispersive_shifts(cav, transitions)
        for mine, oracle in zip(res.pulls_mhz[1:], pulls_jc[1:]):
            assert abs(mine - oracle) <= 0.05 * abs(oracle)


class TestSplitHamiltonian:
    def test_degenerate_limit_embeds_three_level(self):
        s = DriveSample(0.3, 0.25, 0.05, -0.05, 0.2, -0.4)
        h4 = build_split_hamiltonian(s, SplitSpec(0.0, (1.0, 0.0)))
        h3 = build_rotating_hamiltonian(s)
        keep = np.ix_([0, 1, 3], [0, 1, 3])
        assert np.max(np.abs(h4[keep] - h3)) < 1e-15
        assert np.max(np.abs(h4[2, [0, 3]])) == 0.0  # |1b> decoupled

    def test_fifteen_megahertz_separation(self):
        s = DriveSample(0.2, 0.2)
        h4 = build_split_hamiltonian(s, SplitSpec(15.0))
        assert abs((h4[2, 2] - h4[1, 1]).real - TWO_PI * 0.015) < 1e-15

    def test_midpoint_gap_collapse(self):
        # Both branches couple with the same Omega01:Omega12 ratio, so the
        # dark vector (cos, 0, 0, -sin) survives the split exactly.  What
        # breaks at the midpoint drive is the adiabatic protection: a second
        # eigenvalue collapses onto the dark state's zero, removing the gap.
        s = DriveSample(mhz_to_rad_ns(25.0), mhz_to_rad_ns(22.0))
        h4 = build_split_hamiltonian(s, SplitSpec(15.0))
        theta = math.atan2(s.omega01, s.omega12)
        dark = np.array([math.cos(theta), 0.0, 0.0, -math.sin(theta)], dtype=complex)
        assert np.max(np.abs(h4 @ dark)) < 1e-15
        gaps = np.sort(np.abs(np.linalg.eigvalsh(h4)))
        assert gaps[1] < 1e-12  # degenerate with the dark state: no gap
        # at the branch-a resonance the degeneracy lifts
        s_res = DriveSample(s.omega01, s.omega12, mhz_to_rad_ns(7.5), -mhz_to_rad_ns(7.5))
        h4_res = build_split_hamiltonian(s_res, SplitSpec(15.0))
        gaps_res = np.sort(np.abs(np.linalg.eigvalsh(h4_res)))
        assert gaps_res[1] > mhz_to_rad_ns(1.0)

    def test_eigenvalue_convergence_to_three_level(self):
        s = DriveSample(0.3, 0.25, 0.07, -0.07)
        h3 = build_rotating_hamiltonian(s)
        vals3 = np.sort(np.linalg.eigvalsh(h3))
        h4 = build_split_hamiltonian(s, SplitSpec(0.0, (1.0, 0.0)))
        vals4 = np.sort(np.linalg.eigvalsh(h4))
        # three-level spectrum plus the decoupled |1b> at its diagonal
        expected = np.sort(np.concatenate([vals3, [s.delta01]]))
        assert np.max(np.abs(vals4 - expected)) < 1e-10

    def test_missing_split(self):
        with pytest.raises(ConfigurationError):
            build_split_hamiltonian(DriveSample(0.1, 0.1), None)

    def test_weight_normalization(self):
        with pytest.raises(ConfigurationError):
            SplitSpec(15.0, (1.0, 1.0))


class TestTransmonParams:
    def test_rate_conversion(self):
        p = TransmonParams()
        assert abs(p.gamma10 - 2.4e-3) < 1e-15
        assert abs(p.gamma21 - 5.2e-3) < 1e-15

    def test_negative_rate_rejected(self):
        with pytest.raises(ConfigurationError):
            TransmonParams(gamma10_mhz=-0.1)

    def test_anharmonicity_sign(self):
        with pytest.raises(ConfigurationError):
            TransmonParams(f01_mhz=4000.0, f12_mhz=5000.0)
