"""Laguerre-Gaussian transverse profiles and overlap integrals.

Only radial index p = 0 modes are used. The azimuthal factor exp(i l phi)
integrates to a Kronecker delta, so every overlap reduces to a single
radial integral evaluated with adaptive quadrature.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import pi, sqrt

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .errors import ConfigError, NumericFailure

QUAD_EPSABS = 1e-12
# quad's own error estimate is allowed to be a bit looser than the target
QUAD_MAX_ERR = 1e-10


@dataclass(frozen=True)
class BeamGeometry:
    """Quantum-beam waist and the axial waist offset of the driving beam.

    ``zs_over_zr`` is the distance between the two waists in units of the
    quantum beam's Rayleigh length. The driving beam width at the cell
    follows Gaussian divergence, ``w_d = w_s * sqrt(1 + zs_over_zr**2)``.
    """

    quantum_waist: float = 1.0
    zs_over_zr: float = 0.0

    def __post_init__(self):
        if not self.quantum_waist > 0:
            raise ConfigError(f"quantum_waist must be > 0, got {self.quantum_waist}")
        if not self.zs_over_zr >= 0:
            raise ConfigError(f"zs_over_zr must be >= 0, got {self.zs_over_zr}")

    @property
    def driving_waist(self) -> float:
        return self.quantum_waist * sqrt(1.0 + self.zs_over_zr**2)

    def waist(self, role: str) -> float:
        if role == "s":
            return self.quantum_waist
        if role == "d":
            return self.driving_waist
        raise ConfigError(f"field role must be 's' or 'd', got {role!r}")


@dataclass(frozen=True)
class OverlapTable:
    driving_oam: int
    max_oam: int
    entries: dict = field(default_factory=dict)

    def __getitem__(self, pair):
        l, m = pair
        if (l, m) in self.entries:
            return self.entries[(l, m)]
        return self.entries[(m, l)]

    @property
    def pairs(self):
        return list(self.entries)


def mode_area(l: int, w: float) -> float:
    """Cross-sectional area ``pi w^2 (|l| + 1) / 4`` of an OAM-``l`` mode."""
    return pi * w**2 * (abs(l) + 1) / 4.0


def _log_radial(l: int, w: float, rho):
    # log of sqrt((|l|+1)/(2|l|!)) (rho sqrt2/w)^|l| exp(-rho^2/w^2)
    l = abs(l)
    rho = np.asarray(rho, dtype=float)
    x = rho * sqrt(2.0) / w
    with np.errstate(divide="ignore"):
        logx = np.where(x > 0, np.log(np.where(x > 0, x, 1.0)), -np.inf)
    pref = 0.5 * (np.log(l + 1.0) - np.log(2.0) - gammaln(l + 1.0))
    power = l * logx if l else np.zeros_like(x)
    return pref + power - rho**2 / w**2


def radial_profile(role: str, l: int, geometry: BeamGeometry, rho):
    """Modulus of the area-normalized LG mode at radius ``rho`` (azimuth 0).

    ``role`` is ``"s"`` for the quantum field, ``"d"`` for the driving field.
    The mode integrates to its area, ``int |U_l|^2 d^2 rho = S_l``.
    """
    w = geometry.waist(role)
    rho_arr = np.asarray(rho, dtype=float)
    if np.any(rho_arr < 0):
        raise ConfigError("radius must be non-negative")
    out = np.exp(_log_radial(l, w, rho_arr))
    return float(out) if np.ndim(out) == 0 else out


def unit_mode(l: int, w: float, rho):
    """Quantum-mode modulus normalized to unit L2 norm over the plane."""
    return np.exp(_log_radial(l, w, rho)) / sqrt(mode_area(l, w))


def driving_mode(k: int, w: float, rho):
    """Driving-mode modulus normalized to a peak value of one."""
    k = abs(k)
    x = np.asarray(rho, dtype=float) * sqrt(2.0) / w
    if k == 0:
        return np.exp(-x**2 / 2.0)
    # peak of x^k exp(-x^2/2) sits at x = sqrt(k)
    log_peak = 0.5 * k * np.log(k) - 0.5 * k
    with np.errstate(divide="ignore"):
        logx = np.log(np.where(x > 0, x, 1.0))
    val = np.exp(k * logx - x**2 / 2.0 - log_peak)
    return np.where(x > 0, val, 0.0)


def _radial_integral(fn, r_max):
    val, err = integrate.quad(fn, 0.0, r_max, epsabs=QUAD_EPSABS, epsrel=1e-12, limit=400)
    if not np.isfinite(val) or err > QUAD_MAX_ERR:
        raise NumericFailure(f"radial quadrature did not converge (estimate {val}, error {err})")
    return val


def _r_max(w_s: float, *orders: int) -> float:
    # the integrand carries at least two quantum modes, so its Gaussian
    # envelope is set by w_s; the driving mode only multiplies by <= 1
    return 8.0 * w_s * sqrt(max(orders) + 1)


def mode_norm(l: int, geometry: BeamGeometry) -> float:
    """Numerical ``int |u_l|^2 2 pi rho d rho`` for the unit-normalized quantum mode."""
    w = geometry.quantum_waist
    return _radial_integral(lambda r: 2 * pi * r * unit_mode(l, w, r) ** 2, _r_max(w, abs(l)))


def overlap_chi(k: int, l: int, m: int, geometry: BeamGeometry) -> float:
    """Dimensionless overlap of driving mode ``k`` with quantum modes ``l`` and ``m``.

    The quantum modes are unit-L2-normalized and the driving mode is
    normalized to unit peak, so the result lies in [0, 1] and tends to one
    for ``k = 0, l = m`` as the driving beam approaches a plane wave.
    The selection rule is not applied here; see :func:`overlap_table`.
    """
    if min(k, l, m) < 0:
        raise ConfigError("k, l, m must be non-negative")
    # sort so chi(k, l, m) and chi(k, m, l) share one code path
    l, m = sorted((l, m))
    w_s, w_d = geometry.quantum_waist, geometry.driving_waist

    def integrand(r):
        return 2 * pi * r * driving_mode(k, w_d, r) * unit_mode(l, w_s, r) * unit_mode(m, w_s, r)

    return _radial_integral(integrand, _r_max(w_s, l, m))


def _check_truncation(max_oam: int):
    if max_oam < 2 or max_oam % 2:
        raise ConfigError(f"max_oam must be an even integer >= 2, got {max_oam}")


def allowed_pairs(k: int, max_oam: int) -> list[tuple[int, int]]:
    """Beam-splitter pairs ``(l, m)``, ``m - l = k``, inside ``[0, max_oam - 1]``.

    Pairs are listed once with ``l <= m``; the coupling is symmetric.
    """
    if k not in (0, 1):
        raise ConfigError(f"driving OAM must be 0 or 1, got {k}")
    return [(m, m + k) for m in range(max_oam - k)]


def parametric_pairs(k: int, max_oam: int) -> list[tuple[int, int]]:
    """Pairs obeying the parametric rule ``l + m = k`` (kept for reference)."""
    if k not in (0, 1):
        raise ConfigError(f"driving OAM must be 0 or 1, got {k}")
    return [(l, k - l) for l in range(0, min(k, max_oam - 1) + 1) if l <= k - l]


def overlap_table(k: int, max_oam: int, geometry: BeamGeometry) -> OverlapTable:
    """Overlaps for every beam-splitter pair allowed by driving OAM ``k``."""
    _check_truncation(max_oam)
    entries = {pair: overlap_chi(k, *pair, geometry) for pair in allowed_pairs(k, max_oam)}
    return OverlapTable(driving_oam=k, max_oam=max_oam, entries=entries)
