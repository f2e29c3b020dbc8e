"""Linear Bogoliubov maps on 2K bosonic modes (K light, then K atomic).

A map stores two matrices acting on the column of creation operators::

    a_dag_out = E @ a_dag_in + F @ a_in
    a_out     = E.conj() @ a_in + F.conj() @ a_dag_in

Commutators are preserved iff ``E E^dag - F F^dag = I`` and ``E F^T`` is
symmetric.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coupling import CouplingMatrix
from .errors import ConfigError, ConsistencyError

SYMPLECTIC_TOL = 1e-10
MAX_MODES = 64


@dataclass(frozen=True)
class LinearOpMap:
    E: np.ndarray
    F: np.ndarray

    def __post_init__(self):
        E = np.asarray(self.E, dtype=complex)
        F = np.asarray(self.F, dtype=complex)
        if E.shape != F.shape or E.ndim != 2 or E.shape[0] != E.shape[1]:
            raise ConfigError(f"E and F must be equal square matrices, got {E.shape}, {F.shape}")
        if E.shape[0] > MAX_MODES:
            raise ConfigError(f"at most {MAX_MODES} modes are supported")
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "F", F)

    @property
    def dimension(self) -> int:
        return self.E.shape[0]

    def symplectic_residuals(self) -> tuple[float, float]:
        """Max-abs residuals of the two commutator-preservation identities."""
        n = self.dimension
        r1 = self.E @ self.E.conj().T - self.F @ self.F.conj().T - np.eye(n)
        EFt = self.E @ self.F.T
        return float(np.abs(r1).max()), float(np.abs(EFt - EFt.T).max())

    def is_symplectic(self, tol: float = SYMPLECTIC_TOL) -> bool:
        return max(self.symplectic_residuals()) <= tol


@dataclass(frozen=True)
class OperatorLinearForm:
    """``sum_i g[i] a_dag_i + l[i] a_i`` over 2K modes."""

    g: np.ndarray
    l: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.g, dtype=complex)
        l = np.asarray(self.l, dtype=complex)
        if g.shape != l.shape or g.ndim != 1:
            raise ConfigError("creation and annihilation coefficients must be equal-length vectors")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "l", l)

    @classmethod
    def creation(cls, g) -> "OperatorLinearForm":
        g = np.asarray(g, dtype=complex)
        return cls(g, np.zeros_like(g))

    @property
    def dimension(self) -> int:
        return self.g.shape[0]

    def commutator(self, other: "OperatorLinearForm") -> complex:
        """Scalar ``[self, other]`` for unit bosonic commutators."""
        return complex(np.dot(self.l, other.g) - np.dot(self.g, other.l))

    def in_basis(self, W: np.ndarray) -> "OperatorLinearForm":
        """Re-express in the modes ``b_r = sum_i W[r, i] a_i`` (W real orthogonal)."""
        return OperatorLinearForm(W @ self.g, W @ self.l)


def identity_map(n: int) -> LinearOpMap:
    return LinearOpMap(np.eye(n), np.zeros((n, n)))


def qnd_map(coupling: CouplingMatrix) -> LinearOpMap:
    """One QND step with light-atom coupling block ``C``.

    ``E = [[I, C], [C, I]]`` and ``F = [[0, C*], [C*, 0]]``.
    """
    C = np.asarray(coupling.matrix, dtype=complex)
    K = C.shape[0]
    eye, zero = np.eye(K), np.zeros((K, K))
    E = np.block([[eye, C], [C, eye]])
    F = np.block([[zero, C.conj()], [C.conj(), zero]])
    return LinearOpMap(E, F)


def rotation_map(theta1: float, theta2: float, K: int) -> LinearOpMap:
    """Phase rotation: light creation operators by ``exp(-i theta1)``, atomic by ``exp(-i theta2)``."""
    phases = np.concatenate([np.full(K, np.exp(-1j * theta1)), np.full(K, np.exp(-1j * theta2))])
    return LinearOpMap(np.diag(phases), np.zeros((2 * K, 2 * K)))


def compose(second: LinearOpMap, first: LinearOpMap) -> LinearOpMap:
    """Map applying ``first`` and then ``second``."""
    if second.dimension != first.dimension:
        raise ConfigError(f"dimension mismatch: {second.dimension} vs {first.dimension}")
    E = second.E @ first.E + second.F @ first.F.conj()
    F = second.E @ first.F + second.F @ first.E.conj()
    return LinearOpMap(E, F)


def compose_all(*maps: LinearOpMap) -> LinearOpMap:
    """Compose in application order: ``compose_all(m1, m2, m3)`` applies m1 first."""
    out = maps[0]
    for m in maps[1:]:
        out = compose(m, out)
    return out


def invert(m: LinearOpMap, tol: float = 1e-9) -> LinearOpMap:
    """Input operators in terms of output operators: ``E_inv = E^dag``, ``F_inv = -F^T``."""
    res = m.symplectic_residuals()
    if max(res) > tol:
        raise ConsistencyError(f"map is not symplectic (residuals {res[0]:.3g}, {res[1]:.3g})")
    return LinearOpMap(m.E.conj().T, -m.F.T)


def substitute(form: OperatorLinearForm, inverse: LinearOpMap) -> OperatorLinearForm:
    """Rewrite a form in input operators as a form in output operators.

    ``inverse`` expresses input creation operators through output ones,
    as returned by :func:`invert`.
    """
    if form.dimension != inverse.dimension:
        raise ConfigError(f"dimension mismatch: form {form.dimension}, map {inverse.dimension}")
    Ei, Fi = inverse.E, inverse.F
    g = Ei.T @ form.g + Fi.conj().T @ form.l
    l = Fi.T @ form.g + Ei.conj().T @ form.l
    return OperatorLinearForm(g, l)


@dataclass(frozen=True)
class QuadratureRelations:
    """A map written on quadratures ``a = x + i y`` (x: X or Q, y: Y or P).

    ``x_out = xx @ x + xy @ y`` and ``y_out = yx @ x + yy @ y``, each block
    2K x 2K with the light modes first.
    """

    xx: np.ndarray
    xy: np.ndarray
    yx: np.ndarray
    yy: np.ndarray

    def light_gain_from_atom(self) -> np.ndarray:
        """K x K block: weight of ``P_j`` in ``X_m^out``."""
        K = self.xx.shape[0] // 2
        return self.xy[:K, K:]

    def atom_gain_from_light(self) -> np.ndarray:
        """K x K block: weight of ``Y_m`` in ``Q_j^out``."""
        K = self.xx.shape[0] // 2
        return self.xy[K:, :K]


def quadrature_relations(m: LinearOpMap) -> QuadratureRelations:
    S, D = m.E + m.F, m.E - m.F
    return QuadratureRelations(xx=S.real, xy=D.imag, yx=-S.imag, yy=D.real)


def quadrature_io(m: LinearOpMap, tol: float = 1e-10) -> QuadratureRelations:
    """Quadrature form of a QND map, checked against the QND pattern.

    The pattern is: ``x`` and ``y`` of each system keep their own value,
    ``Y`` and ``P`` are conserved, ``X`` only picks up ``P`` and ``Q`` only
    picks up ``Y``, with the same gain matrix (transposed) in both
    directions.
    """
    q = quadrature_relations(m)
    n = m.dimension
    K = n // 2
    checks = {
        "x keeps unit weight": np.abs(q.xx - np.eye(n)).max(),
        "y conserved": np.abs(q.yy - np.eye(n)).max() + np.abs(q.yx).max(),
        "no light-light or atom-atom feed": np.abs(q.xy[:K, :K]).max() + np.abs(q.xy[K:, K:]).max(),
        "reciprocal gains": np.abs(q.light_gain_from_atom() - q.atom_gain_from_light().T).max(),
    }
    bad = {name: v for name, v in checks.items() if v > tol}
    if bad:
        raise ConsistencyError(f"map does not follow the QND quadrature pattern: {bad}")
    return q
