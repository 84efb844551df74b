"""Plasmonic resonances, scattering spectra, and effective-medium properties
of spherical and core-shell metallic nanoparticles."""

__version__ = "0.1.0"

__all__ = [
    "specfun",
    "media",
    "mie",
    "sphere_modes",
    "shell_modes",
    "quasistatic",
    "effective",
    "cli",
    "errors",
]
