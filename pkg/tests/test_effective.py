import math

import numpy as np
import pytest

from plasmonics import effective as eff, media
from plasmonics.errors import AccuracyError, DomainError, ResonantCompositeError
from plasmonics.specfun import ModeIndex


class TestQ0:
    def test_equal_media(self):
        taus = eff.q0_eigenvalues(2.0, 2.0, media.ball_np_spectrum(4))
        assert all(t == 2.0 for t in taus)

    def test_frohlich_zero(self):
        # tau = 0 at the dipole eigenvalue iff eps_c = -2 eps_m
        taus = eff.q0_eigenvalues(1.0, -2.0, [1.0 / 6.0])
        assert abs(taus[0]) < 1e-15

    def test_affine_ordering(self):
        spec = media.ball_np_spectrum(6)
        taus = eff.q0_eigenvalues(1.0, -3.0, spec)  # eps_m - eps_c = 4 > 0
        assert all(a.real > b.real for a, b in zip(taus, taus[1:]))

    def test_empty(self):
        with pytest.raises(DomainError):
            eff.q0_eigenvalues(1.0, 2.0, [])


class TestQ1:
    def test_exact_dipole_matrix(self):
        # analytic n = 1 reduction: the multiplet matrix of W_R in the
        # Cartesian basis is Tr(R)/5 Id - (4/15) R, so the eigenvalues of the
        # first-order shift are eps_c R_p / 3
        R = np.diag([1.0, -1.0, 0.0])
        aniso = eff.AnisoPermittivity(eps_c=-2.0 + 0.3j, delta=0.1, r_matrix=R)
        P = eff.q1_multiplet(aniso, 1)
        ev = sorted(np.linalg.eigvals(P), key=lambda z: z.real)
        want = sorted([(-2.0 + 0.3j) * p / 3.0 for p in (1.0, -1.0, 0.0)],
                      key=lambda z: z.real)
        assert max(abs(a - b) for a, b in zip(ev, want)) < 1e-8

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_isotropic_identity(self, n):
        # R = alpha Id must reproduce the derivative of the isotropic
        # eigenvalue: eps_c alpha (1/2 - lambda_n)
        alpha = 0.7
        eps_c = -2.0 + 0.3j
        aniso = eff.AnisoPermittivity(eps_c=eps_c, delta=0.1, r_matrix=alpha * np.eye(3))
        got = eff.q1_correction(aniso, ModeIndex(n, 0))
        want = eps_c * alpha * (0.5 - media.ball_np_eigenvalue(n))
        assert abs(got - want) < 1e-8

    def test_multiplet_trace(self):
        R = np.array([[0.4, 0.1, 0.0], [0.1, -0.2, 0.05], [0.0, 0.05, 0.3]])
        eps_c = -1.5 + 0.2j
        aniso = eff.AnisoPermittivity(eps_c=eps_c, delta=0.1, r_matrix=R)
        P = eff.q1_multiplet(aniso, 1)
        want = eps_c * np.trace(R) * (0.5 - 1.0 / 6.0)
        assert abs(np.trace(P) - want) < 1e-8

    def test_traceless_example_mode(self):
        # (n, m) = (1, 0) with R = diag(1, -1, 0): Y_1^0 is the pure z mode,
        # whose Cartesian shift eigenvalue is eps_c R_zz / 3 = 0
        aniso = eff.AnisoPermittivity(eps_c=-2.0, delta=0.1,
                                      r_matrix=np.diag([1.0, -1.0, 0.0]))
        val = eff.q1_correction(aniso, ModeIndex(1, 0))
        assert abs(val) < 1e-9

    def test_degree_validation(self):
        aniso = eff.AnisoPermittivity(eps_c=1.0, delta=0.1, r_matrix=np.eye(3))
        with pytest.raises(DomainError):
            eff.q1_multiplet(aniso, 2, degree=4)

    def test_asymmetric_r_rejected(self):
        with pytest.raises(DomainError):
            eff.AnisoPermittivity(eps_c=1.0, delta=0.1,
                                  r_matrix=np.array([[1, 1, 0], [0, 1, 0], [0, 0, 1.0]]))


class TestAnisoResonance:
    def test_isotropic_reduction(self):
        drude = media.DrudeParams(1.0, 1.0, 0.02)
        res = eff.aniso_resonance(drude, 1.0, np.diag([1.0, -1.0, 0.0]), delta=0.0)
        assert len(res) == 1 and res[0]["multiplicity"] == 3

    def test_isotropic_equivalence_rate(self):
        # R = alpha Id at small delta equals the isotropic resonance with
        # eps_c (1 + delta alpha) up to O(delta^2)
        alpha = 0.8
        drude = media.DrudeParams(1.0, 1.0, 0.02)
        diffs = []
        for delta in (0.05, 0.1):
            res = eff.aniso_resonance(drude, 1.0, alpha * np.eye(3), delta=delta)
            assert len(res) == 1
            om_a = res[0]["omega_star"]

            def tau_scaled(w):
                eps_c = media.drude_permittivity(drude, w) * (1.0 + delta * alpha)
                return (1.0 + eps_c) / 2.0 + (1.0 - eps_c) / 6.0

            from plasmonics.sphere_modes import minimize_modulus
            om_iso = minimize_modulus(tau_scaled, (0.05, 0.99))
            diffs.append(abs(om_a - om_iso))
        assert diffs[0] <= 4.0 * (0.05 / 0.1) ** 2 * diffs[1] + 1e-12
        assert diffs[1] < 5e-3

    def test_traceless_splitting(self):
        drude = media.DrudeParams(1.0, 1.0, 0.02)
        res = eff.aniso_resonance(drude, 1.0, np.diag([1.0, -1.0, 0.0]), delta=0.1)
        found = [r for r in res if r["found"]]
        assert len(found) == 3  # number of distinct eigenvalues of R
        oms = sorted(r["omega_star"] for r in found)
        assert oms[0] < oms[1] < oms[2]

    def test_delta_bound(self):
        drude = media.DrudeParams(1.0, 1.0, 0.02)
        with pytest.raises(DomainError):
            eff.aniso_resonance(drude, 1.0, np.eye(3), delta=0.5)


class TestMaxwellGarnett:
    def test_dilute_limit(self):
        et = eff.mg_effective(1.0, 4.0, 1e-9)
        assert np.max(np.abs(et.gamma_star - np.eye(3))) < 1e-8

    @pytest.mark.parametrize("f", [1e-3, 1e-2, 0.1])
    def test_clausius_mossotti_identity(self, f):
        eps_m, eps_c = 1.0, 4.0 + 0.0j
        et = eff.mg_effective(eps_m, eps_c, f)
        beta = (eps_c - eps_m) / (eps_c + 2 * eps_m)
        cm = eps_m * (1 + 3 * f * beta / (1 - f * beta))
        assert abs(et.gamma_star[0, 0] - cm) <= 1e-12
        assert np.allclose(et.gamma_star, et.gamma_star.T)

    def test_resonant_composite_error(self):
        # f beta = 1 makes Id - f M / 3 singular: beta = 10 at f = 0.1
        with pytest.raises(ResonantCompositeError):
            eff.mg_effective(1.0, -7.0 / 3.0, 0.1)

    def test_plasmonic_effective_medium(self):
        # near resonance with f M = O(1) the mixing term can have a
        # negative-definite real part
        eps_c = -2.05 + 0.01j
        et = eff.mg_effective(1.0, eps_c, 0.1)
        mix = et.gamma_star / 1.0 - np.eye(3)
        assert np.all(np.linalg.eigvalsh((mix + mix.conj().T).real / 2) < 0)

    def test_validity_trip_toward_resonance(self):
        # at f = 0.1 the flag is raised far from resonance and trips as the
        # Drude contrast approaches the Frohlich point
        drude = media.DrudeParams(1.0, 1.0, 0.02)
        spectrum = media.ball_np_spectrum(64, include_zero_degree=True) + [0.0]
        rows = []
        for om in (2.5, 1.5, 0.9, 0.7, 0.62, 0.58):
            eps_c = media.drude_permittivity(drude, om)
            et = eff.mg_effective(1.0, eps_c, 0.1)
            dist = media.spectral_distance(media.lambda_star(eps_c, 1.0), spectrum)
            rows.append((dist, et.valid, et.margin))
        assert rows[0][1] is True          # far from resonance: valid
        assert rows[-1][1] is False        # near the Frohlich point: tripped
        # the margin is a strictly increasing function of the spectral distance
        by_dist = sorted(rows)
        assert all(a[2] < b[2] for a, b in zip(by_dist, by_dist[1:]))

    def test_f_validation(self):
        with pytest.raises(DomainError):
            eff.mg_effective(1.0, 4.0, 0.0)
        with pytest.raises(DomainError):
            eff.mg_effective(1.0, 4.0, 1.0)


class TestPeriodicRegularPart:
    def test_inversion_symmetry(self):
        x = [0.11, 0.23, 0.31]
        a = eff.periodic_regular_part(x)
        b = eff.periodic_regular_part([-v for v in x])
        assert abs(a - b) < 1e-13

    def test_alpha_independence(self):
        x = [0.1, 0.05, -0.2]
        a = eff.periodic_regular_part(x, alpha=math.sqrt(math.pi))
        b = eff.periodic_regular_part(x, alpha=2.0)
        assert abs(a - b) < 1e-11

    def test_quadratic_coefficient(self):
        r0 = eff.periodic_regular_part([0.0, 0.0, 0.0])
        coefs = []
        for axis in range(3):
            ts = np.linspace(1e-3, 5e-2, 10)
            vals = []
            for t in ts:
                x = np.zeros(3)
                x[axis] = t
                vals.append(eff.periodic_regular_part(x, certify=False) - r0)
            coefs.append(np.polyfit(ts**2, vals, 1)[0])
        for c in coefs:
            assert abs(c - (-1.0 / 6.0)) < 0.02 / 6.0
        assert max(coefs) - min(coefs) < 0.01 / 6.0

    def test_laplacian(self):
        h = 1e-3
        x0 = np.array([0.07, -0.04, 0.1])
        lap = 0.0
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            lap += (eff.periodic_regular_part(x0 + e, certify=False)
                    + eff.periodic_regular_part(x0 - e, certify=False)
                    - 2 * eff.periodic_regular_part(x0, certify=False)) / h**2
        assert abs(lap - (-1.0)) < 1e-3

    def test_out_of_cell(self):
        with pytest.raises(DomainError):
            eff.periodic_regular_part([0.6, 0.0, 0.0])

    def test_non_convergent_parameters(self):
        with pytest.raises(AccuracyError):
            eff.periodic_regular_part([0.1, 0.0, 0.0], alpha=25.0, m_max=1)
