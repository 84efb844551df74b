"""Anisotropic quasi-static resonances of the unit ball and Maxwell-Garnett
homogenization of a dilute cubic array of inclusions.

Anisotropic permittivity ``A = eps_c (Id + delta R)`` perturbs the boundary
operator ``Q_A`` whose leading eigenvalues are ``tau_j = (eps_m + eps_c)/2 +
(eps_m - eps_c) lambda_j``; the first-order shifts are diagonal matrix
elements of an explicitly known kernel correction, reduced here to the single
weakly singular surface functional

    w[jl] = <W_R Y_j, Y_l>,   W_R[f](x) = surf_int (R d, d)/(4 pi |d|^3) f(y),

with d = x - y, evaluated by pole-rotated singularity-subtracted quadrature
(the subtraction constant is the exact identity surf_int (R d, d)/(4 pi
|d|^3) dsigma = Tr R / 3 on the unit sphere).

The Maxwell-Garnett tensor is ``eps_m (Id + f M (Id - f M / 3)^{-1})`` with M
the unit-volume polarization tensor; its validity window shrinks like
dist(lambda, spectrum)^(3/5) as the composite approaches resonance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import media as _media
from . import specfun
from .errors import AccuracyError, DomainError, ResonantCompositeError
from .quasistatic import PolarizationTensor, ball_polarization_tensor
from .sphere_modes import minimize_modulus


@dataclass(frozen=True)
class AnisoPermittivity:
    """A = eps_c (Id + delta R) with R real symmetric, ||R|| = O(1)."""

    eps_c: complex
    delta: float
    r_matrix: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r_matrix, dtype=float)
        if r.shape != (3, 3) or not np.allclose(r, r.T, atol=1e-14):
            raise DomainError("R must be a real symmetric 3x3 matrix")
        object.__setattr__(self, "r_matrix", r)
        if self.delta < 0:
            raise DomainError("delta must be nonnegative")

    def matrix(self) -> np.ndarray:
        return self.eps_c * (np.eye(3) + self.delta * self.r_matrix)


@dataclass(frozen=True)
class EffectiveTensor:
    gamma_star: np.ndarray
    f: float
    remainder_scale: float
    valid: bool
    margin: float
    inverse_norm: float  # diagnostic ||(Id - f M / 3)^{-1}||


def q0_eigenvalues(eps_m: complex, eps_c: complex, np_spectrum) -> list[complex]:
    """Leading eigenvalues tau_j = (eps_m + eps_c)/2 + (eps_m - eps_c) lambda_j."""
    spectrum = list(np_spectrum)
    if not spectrum:
        raise DomainError("q0_eigenvalues needs a nonempty spectrum")
    return [(eps_m + eps_c) / 2.0 + (eps_m - eps_c) * lam for lam in spectrum]


def _rotation_to(direction: np.ndarray) -> np.ndarray:
    # rotation taking the north pole to ``direction``
    z = np.array([0.0, 0.0, 1.0])
    c = float(np.dot(z, direction))
    if c > 1.0 - 1e-14:
        return np.eye(3)
    if c < -1.0 + 1e-14:
        return np.diag([1.0, -1.0, -1.0])
    axis = np.cross(z, direction)
    s = np.linalg.norm(axis)
    axis = axis / s
    K = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    return np.eye(3) + s * K + (1 - c) * (K @ K)


def _w_matrix(n: int, r_matrix: np.ndarray, degree: int) -> np.ndarray:
    """Multiplet matrix w[jl] = <W_R Y_(n,j), Y_(n,l)> by singularity-subtracted
    quadrature; j, l run over m = -n..n."""
    trR = float(np.trace(r_matrix))
    # outer (smooth) rule
    pts, wts = specfun.sphere_quadrature(degree)
    ys_outer = specfun.scalar_harmonics_grid(n, pts)
    modes = [(n, m) for m in range(-n, n + 1)]
    # inner rule: Gauss-Legendre in the polar angle (regular at the pole
    # after subtraction), uniform azimuth, in a frame with x at the pole
    ngam = 2 * degree + 2
    gam, wg = np.polynomial.legendre.leggauss(ngam)
    gam = 0.5 * math.pi * (gam + 1.0)
    wg = wg * 0.5 * math.pi * np.sin(gam)
    phi = 2.0 * math.pi * np.arange(ngam) / ngam
    wphi = 2.0 * math.pi / ngam
    cg, sg = np.cos(gam), np.sin(gam)
    local = np.stack([
        np.outer(sg, np.cos(phi)).ravel(),
        np.outer(sg, np.sin(phi)).ravel(),
        np.outer(cg, np.ones_like(phi)).ravel(),
    ], axis=1)
    w_inner = (np.outer(wg, np.full_like(phi, wphi))).ravel()

    w_of_x = np.zeros((len(pts), len(modes)), dtype=complex)
    for i, x in enumerate(pts):
        rot = _rotation_to(x)
        yy = local @ rot.T
        delta = x[None, :] - yy
        dist = np.linalg.norm(delta, axis=1)
        quad = np.einsum("ka,ab,kb->k", delta, r_matrix, delta)
        kern = quad / (4.0 * math.pi * dist**3)
        ys_inner = specfun.scalar_harmonics_grid(n, yy)
        for jdx, nm in enumerate(modes):
            fy = ys_inner[nm]
            fx = ys_outer[nm][i]
            w_of_x[i, jdx] = np.sum(w_inner * kern * (fy - fx)) + fx * trR / 3.0
    w = np.zeros((len(modes), len(modes)), dtype=complex)
    for ldx, nm in enumerate(modes):
        proj = wts * np.conj(ys_outer[nm])
        for jdx in range(len(modes)):
            w[jdx, ldx] = np.sum(proj * w_of_x[:, jdx])
    return w


def q1_multiplet(aniso: AnisoPermittivity, n: int, degree: int | None = None,
                 check: bool = True) -> np.ndarray:
    """First-order multiplet matrix P[jl] of the degree-n eigenvalue group.

    P = eps_c (Tr(R)/4 * Id - (2n+3)/4 * w); convergence is certified by
    comparing two quadrature degrees (AccuracyError on disagreement).
    """
    if degree is None:
        degree = 2 * n + 8
    if degree < 2 * n + 8:
        raise DomainError("quadrature degree must be at least 2n + 8")
    w = _w_matrix(n, aniso.r_matrix, degree)
    if check:
        w2 = _w_matrix(n, aniso.r_matrix, degree + 6)
        scale = max(np.max(np.abs(w2)), 1e-30)
        if np.max(np.abs(w - w2)) > 1e-6 * scale:
            raise AccuracyError(
                f"W_R quadrature not converged at degrees {degree}/{degree + 6}")
        w = w2
    trR = float(np.trace(aniso.r_matrix))
    return aniso.eps_c * (trR / 4.0 * np.eye(2 * n + 1) - (2 * n + 3) / 4.0 * w)


def q1_correction(aniso: AnisoPermittivity, mode: specfun.ModeIndex,
                  degree: int | None = None) -> complex:
    """Diagonal first-order shift tau_(j,1) = P[jj] for the mode (n, m)."""
    P = q1_multiplet(aniso, mode.n, degree)
    j = mode.m + mode.n
    return complex(P[j, j])


def aniso_resonance(drude: _media.DrudeParams, eps_m: float, r_matrix: np.ndarray,
                    delta: float, omega_range: tuple[float, float] = (0.05, 0.99),
                    n: int = 1, degree: int | None = None,
                    merge_tol: float = 1e-7) -> list[dict]:
    """Quasi-static resonances of a weakly anisotropic Drude ball.

    Minimizes ``|tau_n(omega) + delta * tau_(k,1)(omega)|`` over omega for
    each eigenvalue path k of the degree-n multiplet; paths whose minimizers
    coincide within ``merge_tol`` are reported once (the multiplet splits
    into as many resonances as R has distinct eigenvalues).
    """
    if delta > 0.2:
        raise DomainError("first-order anisotropic expansion advised only for delta <= 0.2")
    lam_n = _media.ball_np_eigenvalue(n)
    # P is eps_c times a frequency-independent geometric matrix
    probe = AnisoPermittivity(eps_c=1.0, delta=delta, r_matrix=np.asarray(r_matrix, dtype=float))
    geo = q1_multiplet(probe, n, degree)
    path_vals = np.linalg.eigvalsh((geo + geo.conj().T) / 2.0)
    results = []
    for pv in path_vals:
        def tau(w: float) -> complex:
            eps_c = _media.drude_permittivity(drude, w)
            tau0 = (eps_m + eps_c) / 2.0 + (eps_m - eps_c) * lam_n
            return tau0 + delta * eps_c * pv

        om = minimize_modulus(tau, omega_range)
        if om is None:
            results.append({"omega_star": None, "path_shift": float(pv), "found": False})
            continue
        results.append({"omega_star": om, "path_shift": float(pv), "found": True,
                        "tau_at_min": tau(om)})
    merged: list[dict] = []
    for res in sorted(results, key=lambda r: (r["omega_star"] is None, r["omega_star"] or 0.0)):
        if res["found"] and merged and merged[-1]["found"] \
                and abs(merged[-1]["omega_star"] - res["omega_star"]) <= merge_tol:
            merged[-1]["multiplicity"] += 1
            continue
        res = dict(res)
        res["multiplicity"] = 1
        merged.append(res)
    return merged


def mg_effective(eps_m: complex, eps_c: complex, f: float,
                 m_tensor: PolarizationTensor | None = None,
                 np_spectrum=None, validity_constant: float = 0.1) -> EffectiveTensor:
    """Maxwell-Garnett effective permittivity of a dilute cubic array.

    ``m_tensor`` is the polarization tensor of the unit-volume inclusion
    (defaults to a unit-volume ball at the pole-normalized contrast).  The
    validity flag requires ``f <= validity_constant * dist^(3/5)`` where dist
    is the distance of the contrast to the inclusion spectrum; the remainder
    scale is ``f^(8/3)/dist^2``.
    """
    if not (0.0 < f < 1.0):
        raise DomainError("volume fraction must lie in (0, 1)")
    if m_tensor is None:
        lam = _media.lambda_star(eps_c, eps_m)
        unit_radius = (3.0 / (4.0 * math.pi)) ** (1.0 / 3.0)
        m_tensor = ball_polarization_tensor(lam, unit_radius)
    if np_spectrum is None:
        np_spectrum = _media.ball_np_spectrum(64, include_zero_degree=True) + [0.0]
    M = m_tensor.matrix
    core = np.eye(3) - (f / 3.0) * M
    det = np.linalg.det(core)
    if abs(det) < 1e-14 * max(1.0, np.max(np.abs(M)) ** 3):
        raise ResonantCompositeError("Id - f M / 3 is numerically singular")
    inv = np.linalg.inv(core)
    gamma = eps_m * (np.eye(3) + f * (M @ inv))
    dist = _media.spectral_distance(m_tensor.lam, np_spectrum)
    margin = validity_constant * dist ** 0.6 - f
    return EffectiveTensor(
        gamma_star=gamma,
        f=f,
        remainder_scale=f ** (8.0 / 3.0) / dist**2 if dist > 0 else math.inf,
        valid=margin >= 0.0,
        margin=margin,
        inverse_norm=float(np.linalg.norm(inv, 2)),
    )


def periodic_regular_part(x, alpha: float | None = None, m_max: int = 3,
                          certify: bool = True) -> float:
    """Smooth remainder R(x) of the cubic-lattice periodic Green function
    after removing the free-space singularity -1/(4 pi |x|).

    Ewald-split evaluation; with ``certify`` the truncation radii are grown
    by 2 and the two values must agree to 1e-10 (AccuracyError otherwise).
    Near the origin R(x) = R(0) - |x|^2/6 + O(|x|^4).
    """
    x = np.asarray(x, dtype=float)
    if np.max(np.abs(x)) >= 0.5:
        raise DomainError("x must lie in the open unit cell (|x_i| < 1/2)")
    if alpha is None:
        alpha = math.sqrt(math.pi)

    def evaluate(mm: int) -> float:
        rng = np.arange(-mm, mm + 1)
        mx, my, mz = np.meshgrid(rng, rng, rng, indexing="ij")
        lat = np.stack([mx.ravel(), my.ravel(), mz.ravel()], axis=1).astype(float)
        nonzero = np.any(lat != 0, axis=1)
        # real-space images (m != 0)
        dv = x[None, :] - lat[nonzero]
        dn = np.linalg.norm(dv, axis=1)
        real_sum = np.sum(_erfc_vec(alpha * dn) / (4.0 * math.pi * dn))
        # reciprocal sum (n != 0)
        kv = lat[nonzero]
        k2 = np.sum(kv * kv, axis=1)
        recip_sum = np.sum(np.exp(-math.pi**2 * k2 / alpha**2)
                           * np.cos(2.0 * math.pi * (kv @ x))
                           / (4.0 * math.pi**2 * k2))
        r = float(np.linalg.norm(x))
        if r == 0.0:
            self_term = alpha / (2.0 * math.pi**1.5)
        else:
            self_term = math.erf(alpha * r) / (4.0 * math.pi * r)
        return 1.0 / (4.0 * alpha**2) + self_term - real_sum - recip_sum

    val = evaluate(m_max)
    if certify:
        val2 = evaluate(m_max + 2)
        if abs(val - val2) > 1e-10:
            raise AccuracyError(
                f"Ewald sums not converged: {val!r} vs {val2!r} at m_max={m_max}")
        val = val2
    return val


def _erfc_vec(v: np.ndarray) -> np.ndarray:
    return np.array([math.erfc(t) for t in v])
