"""Dispersive material models and the contrast parameters that drive all
resonance conditions.

The electric contrast is ``lambda_eps = (eps_c + eps_m) / (2 (eps_m - eps_c))``
and likewise for ``lambda_mu``; a sphere's dipole resonance (Frohlich
condition ``eps_c = -2 eps_m``) sits at ``lambda_eps = -1/6``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, DegenerateContrastError, DomainError

#: Neumann-Poincare eigenvalue of the unit ball for harmonic degree n >= 1.
def ball_np_eigenvalue(n: int) -> float:
    if n < 1:
        raise DomainError("ball eigenvalues are indexed by n >= 1")
    return 1.0 / (2.0 * (2.0 * n + 1.0))


#: Eigenvalue attached to the constant density (degree 0).
BALL_LAMBDA0 = 0.5


def ball_np_spectrum(n_max: int, include_zero_degree: bool = False) -> list[float]:
    """Ball Neumann-Poincare eigenvalues ``1/(2(2n+1))`` for n = 1..n_max."""
    eigs = [ball_np_eigenvalue(n) for n in range(1, n_max + 1)]
    if include_zero_degree:
        eigs.insert(0, BALL_LAMBDA0)
    return eigs


@dataclass(frozen=True)
class DrudeParams:
    """Free-electron (Drude) dispersion parameters.

    eps(omega) = eps_inf - omega_p**2 / (omega**2 + i*gamma_damp*omega).
    Frequencies are in whatever unit omega_p is given in; the package default
    normalizes omega_p = 1.
    """

    eps_inf: float = 1.0
    omega_p: float = 1.0
    gamma_damp: float = 0.0

    def __post_init__(self):
        if self.omega_p <= 0:
            raise DomainError("omega_p must be positive")
        if self.gamma_damp < 0:
            raise DomainError("gamma_damp must be nonnegative")


@dataclass(frozen=True)
class MediumPair:
    """Host (m) and particle (c) permittivity/permeability at one frequency."""

    eps_m: complex
    mu_m: complex
    eps_c: complex
    mu_c: complex

    @property
    def nonmagnetic(self) -> bool:
        return self.mu_c == self.mu_m


@dataclass(frozen=True)
class Contrasts:
    """Mobius-transformed contrasts; ``lambda_mu`` is None for nonmagnetic
    pairs (the magnetic contrast diverges as mu_c -> mu_m)."""

    lambda_eps: complex
    lambda_mu: complex | None

    @property
    def nonmagnetic(self) -> bool:
        return self.lambda_mu is None


def drude_permittivity(p: DrudeParams, omega: float) -> complex:
    """Drude permittivity at ``omega > 0``; Im >= 0 whenever gamma_damp >= 0."""
    if omega <= 0:
        raise DomainError("drude_permittivity requires omega > 0")
    return p.eps_inf - p.omega_p**2 / (omega * (omega + 1j * p.gamma_damp))


def contrasts(m: MediumPair) -> Contrasts:
    """Both contrast parameters of a medium pair.

    Raises DegenerateContrastError when eps_c == eps_m; reports the magnetic
    contrast as the nonmagnetic sentinel (None) when mu_c == mu_m.
    """
    if m.eps_c == m.eps_m:
        raise DegenerateContrastError("eps_c == eps_m leaves lambda_eps undefined")
    lam_eps = (m.eps_c + m.eps_m) / (2.0 * (m.eps_m - m.eps_c))
    if m.nonmagnetic:
        return Contrasts(lambda_eps=lam_eps, lambda_mu=None)
    lam_mu = (m.mu_c + m.mu_m) / (2.0 * (m.mu_m - m.mu_c))
    return Contrasts(lambda_eps=lam_eps, lambda_mu=lam_mu)


def lambda_star(eps_c: complex, eps_m: complex) -> complex:
    """Pole-normalized electric contrast ``(eps_c + eps_m) / (2 (eps_c - eps_m))``.

    This sign convention puts the ball dipole pole at ``lambda_star = 1/6``
    exactly when ``eps_c = -2 eps_m``, which is where the exact Mie
    coefficient S_1 blows up; use it wherever a resolvent ``(lambda I - K)``
    is evaluated.
    """
    if eps_c == eps_m:
        raise DegenerateContrastError("eps_c == eps_m leaves the contrast undefined")
    return (eps_c + eps_m) / (2.0 * (eps_c - eps_m))


def spectral_distance(lam: complex, spectrum, include_negatives: bool = False) -> float:
    """Distance from ``lam`` to a finite spectrum (optionally symmetrized)."""
    spectrum = list(spectrum)
    if not spectrum:
        raise DomainError("spectral_distance requires a nonempty spectrum")
    vals = list(spectrum)
    if include_negatives:
        vals += [-s for s in spectrum]
    return min(abs(complex(lam) - complex(s)) for s in vals)


def wavenumber(eps: complex, mu: complex, omega: float) -> complex:
    """k = omega*sqrt(eps*mu) on the principal branch, flipped so Im k >= 0."""
    k = omega * complex(eps * mu) ** 0.5
    if k.imag < 0:
        k = -k
    return k


def wavenumbers(m: MediumPair, omega: float) -> tuple[complex, complex]:
    """Host and particle wavenumbers (k_m, k_c)."""
    return wavenumber(m.eps_m, m.mu_m, omega), wavenumber(m.eps_c, m.mu_c, omega)


@dataclass(frozen=True)
class MaterialPreset:
    """Bundle of Drude particle parameters plus host constants."""

    drude: DrudeParams
    mu_c: complex = 1.0
    eps_m: float = 1.0
    mu_m: float = 1.0

    def medium_at(self, omega: float) -> MediumPair:
        return MediumPair(
            eps_m=complex(self.eps_m),
            mu_m=complex(self.mu_m),
            eps_c=drude_permittivity(self.drude, omega),
            mu_c=complex(self.mu_c),
        )


_PRESET_KEYS = {"eps_inf", "omega_p", "gamma", "mu_c_re", "mu_c_im", "eps_m", "mu_m"}


def load_material_preset(path) -> MaterialPreset:
    """Parse a flat ``key = value`` text file into a MaterialPreset.

    Recognized keys: eps_inf, omega_p, gamma, mu_c_re, mu_c_im, eps_m, mu_m.
    Blank lines and '#' comments are ignored; missing keys fall back to
    vacuum-like defaults.
    """
    values: dict[str, float] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _PRESET_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = float(val.strip())
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad number {val.strip()!r}") from exc
    drude = DrudeParams(
        eps_inf=values.get("eps_inf", 1.0),
        omega_p=values.get("omega_p", 1.0),
        gamma_damp=values.get("gamma", 0.0),
    )
    mu_c = complex(values.get("mu_c_re", 1.0), values.get("mu_c_im", 0.0))
    return MaterialPreset(
        drude=drude,
        mu_c=mu_c,
        eps_m=values.get("eps_m", 1.0),
        mu_m=values.get("mu_m", 1.0),
    )
