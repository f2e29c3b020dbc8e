"""Effective QND coupling constants and the Bogoliubov coupling matrices.

Index convention: row/column ``r`` of every K x K matrix is the mode with
OAM ``r``; the light block comes first in the 2K-dimensional matrices.
Mode areas are absorbed so that all mode operators have unit commutators.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError
from .lgmodes import BeamGeometry, OverlapTable, allowed_pairs, parametric_pairs, overlap_table

__all__ = [
    "SystemConfig",
    "CouplingMatrix",
    "allowed_pairs",
    "parametric_pairs",
    "effective_constants",
    "build_S",
    "build_H",
    "build_M",
    "couplings_for",
]

MAX_OAM_LIMIT = 32


@dataclass(frozen=True)
class SystemConfig:
    """One QND interaction: regime, truncation, strength and geometry.

    ``strength`` (eta) folds the atom number, dipole coupling, detuning and
    integral interaction time into one dimensionless factor, so that
    ``chi_tilde(l, m) = eta * chi_hat(k, l, m)``. When ``constants`` is given
    it replaces the geometric constants verbatim, one per allowed pair.
    """

    regime: int
    max_oam: int
    strength: float = 1.0
    geometry: BeamGeometry = BeamGeometry()
    constants: Optional[tuple] = None

    def __post_init__(self):
        if self.regime not in (0, 1):
            raise ConfigError(f"regime must be 0 or 1, got {self.regime}")
        if self.max_oam < 2 or self.max_oam % 2:
            raise ConfigError(f"max_oam must be an even integer >= 2, got {self.max_oam}")
        if self.max_oam > MAX_OAM_LIMIT:
            raise ConfigError(f"max_oam is limited to {MAX_OAM_LIMIT}")
        if self.strength < 0:
            raise ConfigError(f"strength must be >= 0, got {self.strength}")
        if self.constants is not None:
            object.__setattr__(self, "constants", tuple(float(c) for c in self.constants))
            want = self.max_oam - self.regime
            if len(self.constants) != want:
                raise ConfigError(
                    f"regime {self.regime} with max_oam {self.max_oam} needs {want} constants, "
                    f"got {len(self.constants)}"
                )

    @property
    def pairs(self):
        return allowed_pairs(self.regime, self.max_oam)


@dataclass(frozen=True)
class CouplingMatrix:
    """Light-to-atom coupling block ``C`` of a QND step.

    ``kind`` is ``"S"`` (k = 0, diagonal), ``"H"`` (k = 1, two off-diagonals)
    or ``"custom"`` for blocks assembled elsewhere (e.g. per-subsystem
    spectral constants).
    """

    kind: str
    matrix: np.ndarray

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def effective_constants(config: SystemConfig, table: Optional[OverlapTable] = None) -> dict:
    """Map each allowed pair to ``chi_tilde = eta * chi_hat``.

    With bypass constants on the config the table is ignored and the
    constants are returned as given.
    """
    pairs = config.pairs
    if config.constants is not None:
        return dict(zip(pairs, config.constants))
    if table is None:
        table = overlap_table(config.regime, config.max_oam, config.geometry)
    if table.driving_oam != config.regime or table.max_oam != config.max_oam:
        raise ConfigError(
            f"overlap table (k={table.driving_oam}, K={table.max_oam}) does not match "
            f"config (k={config.regime}, K={config.max_oam})"
        )
    return {pair: config.strength * table[pair] for pair in pairs}


def _constants_array(constants, n):
    if isinstance(constants, dict):
        vals = list(constants.values())
    else:
        vals = list(constants)
    if len(vals) != n:
        raise ConfigError(f"expected {n} constants, got {len(vals)}")
    return np.asarray(vals, dtype=float)


def build_S(config: SystemConfig, constants) -> CouplingMatrix:
    """Diagonal k = 0 coupling, ``S[m, m] = -i chi_tilde(m, m) / 2``."""
    if config.regime != 0:
        raise ConfigError("build_S needs regime 0")
    chi = _constants_array(constants, config.max_oam)
    return CouplingMatrix("S", np.diag(-0.5j * chi))


def build_H(config: SystemConfig, constants) -> CouplingMatrix:
    """k = 1 coupling: light ``m`` couples to atom ``m + 1`` and vice versa."""
    if config.regime != 1:
        raise ConfigError("build_H needs regime 1")
    chi = _constants_array(constants, config.max_oam - 1)
    band = -0.5j * chi
    return CouplingMatrix("H", np.diag(band, 1) + np.diag(band, -1))


def build_M(H: CouplingMatrix) -> np.ndarray:
    """Creation-operator input-output matrix ``[[I, H*], [H*, I]]``."""
    if H.kind != "H":
        raise ConfigError(f"build_M needs an H-kind coupling, got {H.kind!r}")
    K = H.dimension
    eye = np.eye(K)
    Hc = H.matrix.conj()
    return np.block([[eye, Hc], [Hc, eye]]).astype(complex)


def couplings_for(config: SystemConfig, table: Optional[OverlapTable] = None) -> CouplingMatrix:
    """Coupling matrix for a config, choosing S or H by regime."""
    constants = effective_constants(config, table)
    if config.regime == 0:
        return build_S(config, constants)
    return build_H(config, constants)
