"""Exact sparse Fock-space states built by applying linear operator forms to vacuum."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt
from typing import Iterable, Optional, Sequence

import numpy as np

from .bogoliubov import OperatorLinearForm
from .errors import ConfigError, NumericFailure

PRUNE_TOL = 1e-15


@dataclass(frozen=True)
class FockState:
    """Sparse superposition of occupation-number states over ``n_modes`` modes."""

    n_modes: int
    amps: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for key, a in self.amps.items():
            key = tuple(int(n) for n in key)
            if len(key) != self.n_modes or min(key, default=0) < 0:
                raise ConfigError(f"bad occupation key {key} for {self.n_modes} modes")
            clean[key] = clean.get(key, 0.0) + complex(a)
        kept = {k: a for k, a in sorted(clean.items()) if abs(a) > PRUNE_TOL}
        object.__setattr__(self, "amps", kept)

    @classmethod
    def vacuum(cls, n_modes: int) -> "FockState":
        return cls(n_modes, {(0,) * n_modes: 1.0})

    @classmethod
    def basis(cls, occupations: Sequence[int]) -> "FockState":
        return cls(len(occupations), {tuple(occupations): 1.0})

    def norm(self) -> float:
        return sqrt(sum(abs(a) ** 2 for a in self.amps.values()))

    def max_excitation(self) -> int:
        return max((sum(k) for k in self.amps), default=0)

    def __add__(self, other: "FockState") -> "FockState":
        _check_modes(self, other)
        out = dict(self.amps)
        for k, a in other.amps.items():
            out[k] = out.get(k, 0.0) + a
        return FockState(self.n_modes, out)

    def __sub__(self, other: "FockState") -> "FockState":
        return self + (-1.0) * other

    def __mul__(self, c) -> "FockState":
        return FockState(self.n_modes, {k: c * a for k, a in self.amps.items()})

    __rmul__ = __mul__

    def normalized(self) -> "FockState":
        n = self.norm()
        if n == 0:
            raise NumericFailure("cannot normalize a zero state")
        return self * (1.0 / n)

    def filter(self, keep) -> "FockState":
        """Keep only the keys for which ``keep(key)`` is true."""
        return FockState(self.n_modes, {k: a for k, a in self.amps.items() if keep(k)})


def _check_modes(a: FockState, b: FockState):
    if a.n_modes != b.n_modes:
        raise ConfigError(f"mode-count mismatch: {a.n_modes} vs {b.n_modes}")


def apply_form(form: OperatorLinearForm, state: FockState) -> FockState:
    """``(sum_i g_i a_dag_i + l_i a_i) |state>``."""
    if form.dimension != state.n_modes:
        raise ConfigError(f"form has {form.dimension} modes, state has {state.n_modes}")
    gi = np.flatnonzero(np.abs(form.g) > 0)
    li = np.flatnonzero(np.abs(form.l) > 0)
    out: dict = {}
    for key, a in state.amps.items():
        occ = list(key)
        for i in gi:
            n = occ[i]
            occ[i] = n + 1
            k = tuple(occ)
            out[k] = out.get(k, 0.0) + a * form.g[i] * sqrt(n + 1)
            occ[i] = n
        for i in li:
            n = occ[i]
            if n == 0:
                continue
            occ[i] = n - 1
            k = tuple(occ)
            out[k] = out.get(k, 0.0) + a * form.l[i] * sqrt(n)
            occ[i] = n
    return FockState(state.n_modes, out)


def evaluate_on_vacuum(forms: Sequence[OperatorLinearForm]) -> FockState:
    """Operator product ``forms[0] forms[1] ... |vac>``; the last form acts first."""
    if not forms:
        raise ConfigError("need at least one form")
    state = FockState.vacuum(forms[0].dimension)
    for f in reversed(list(forms)):
        state = apply_form(f, state)
    return state


def inner(a: FockState, b: FockState) -> complex:
    """``<a|b>``, antilinear in ``a``."""
    _check_modes(a, b)
    small, big = (a, b) if len(a.amps) <= len(b.amps) else (b, a)
    s = 0j
    for k, x in small.amps.items():
        y = big.amps.get(k)
        if y is not None:
            s += (x.conjugate() * y) if small is a else (y.conjugate() * x)
    return complex(s)


def fidelity(state: FockState, target: FockState) -> float:
    ns = inner(state, state).real
    nt = inner(target, target).real
    if ns <= 0:
        raise NumericFailure("fidelity of a zero-norm state")
    if nt <= 0:
        raise ConfigError("fidelity target has zero norm")
    return float(min(1.0, abs(inner(target, state)) ** 2 / (ns * nt)))


@dataclass(frozen=True)
class StateDecomposition:
    """Least-squares expansion ``state ~ a1 T + a2 I + a3 NQ + a4 s|vac> + rest``.

    ``alpha`` holds the complex coefficients on the (non-orthogonal) reference
    states: swap target ``T``, input ``I``, bunched reference ``NQ`` and the
    scaled vacuum. The ``*_weight`` fields come from Gram-Schmidt in that
    order and add up with ``remainder_weight`` to the squared norm.
    """

    alpha: tuple
    swap_weight: float
    input_weight: float
    nq_weight: float
    vacuum_weight: float
    remainder_weight: float
    fit_residual: float
    swap_input_degenerate: bool = False
    vacuum_scale_zero: bool = False

    @property
    def ratios(self) -> tuple:
        """``(1, |a2/a1|, |a3/a1|, |a4/a1|)``."""
        a1 = self.alpha[0]
        if a1 == 0:
            raise NumericFailure("swap component vanishes; ratios undefined")
        return (1.0,) + tuple(abs(a / a1) for a in self.alpha[1:])


def _vec(states: Iterable[FockState], keys):
    return np.array([[s.amps.get(k, 0.0) for k in keys] for s in states], dtype=complex).T


def decompose(
    state: FockState,
    input_state: FockState,
    swap_target: FockState,
    nq_reference: Optional[FockState] = None,
    vacuum_scale: complex = 1.0,
    tol: float = 1e-12,
) -> StateDecomposition:
    """Expand ``state`` over swap target, input, bunched reference and vacuum.

    When the swap target is parallel to the input (symmetric inputs) the two
    cannot be told apart: the merged coefficient goes to ``a1``, ``a2`` is
    zero and ``swap_input_degenerate`` is set. With ``vacuum_scale == 0`` the
    vacuum reference is used unscaled and ``vacuum_scale_zero`` is set.
    """
    n = state.n_modes
    for s in (input_state, swap_target) + ((nq_reference,) if nq_reference is not None else ()):
        _check_modes(state, s)
    vac = FockState.vacuum(n)
    vac_zero = abs(vacuum_scale) <= tol
    refs = [swap_target, input_state, nq_reference, vac if vac_zero else vacuum_scale * vac]

    # swap target parallel to input?
    nt, ni = swap_target.norm(), input_state.norm()
    degenerate = abs(abs(inner(swap_target, input_state)) - nt * ni) <= 1e-10 * max(1.0, nt * ni)

    use = [0, 3]
    if not degenerate:
        use.insert(1, 1)
    if nq_reference is not None and nq_reference.norm() > tol:
        use.insert(-1, 2)

    keys = sorted(set(state.amps).union(*(refs[i].amps for i in use)))
    A = _vec([refs[i] for i in use], keys)
    b = _vec([state], keys)[:, 0]
    coef, *_ = np.linalg.lstsq(A, b, rcond=None)
    alpha = [0j] * 4
    for i, c in zip(use, coef):
        alpha[i] = complex(c)
    resid = float(np.linalg.norm(A @ coef - b))

    # orthogonal weights, Gram-Schmidt in reference order
    Q, _ = np.linalg.qr(A)
    proj = Q.conj().T @ b
    weights = [0.0] * 4
    for i, p in zip(use, proj):
        weights[i] = float(abs(p) ** 2)
    total = float(np.vdot(b, b).real)
    return StateDecomposition(
        alpha=tuple(alpha),
        swap_weight=weights[0],
        input_weight=weights[1],
        nq_weight=weights[2],
        vacuum_weight=weights[3],
        remainder_weight=max(0.0, total - sum(weights)),
        fit_residual=resid,
        swap_input_degenerate=degenerate,
        vacuum_scale_zero=vac_zero,
    )
