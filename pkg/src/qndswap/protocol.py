"""QND - rotation - QND SWAP protocol on the encoded two-qubit subsystems."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import pi
from typing import Optional, Sequence, Union

import numpy as np

from .bogoliubov import (
    LinearOpMap,
    OperatorLinearForm,
    compose_all,
    invert,
    qnd_map,
    rotation_map,
    substitute,
)
from .coupling import CouplingMatrix, SystemConfig, build_M, couplings_for
from .errors import ConfigError, ConsistencyError, SingularParameterError
from .fock import FockState, StateDecomposition, decompose, evaluate_on_vacuum, fidelity
from .lgmodes import BeamGeometry, overlap_table
from .spectral import QubitEncoding, build_encoding_k0, build_encoding_k1, eigendecompose, group_tetrads

NORM_TOL = 1e-12
WEAK_NU2 = 10.0

Constants = Union[float, Sequence[float]]


# --- closed forms for one k = 0 subsystem ---------------------------------


def alpha_closed_form(nu1: float, nu2: float) -> tuple:
    """Relative component sizes at ``theta1 = theta2 = pi/2``, in the printed form.

    Returns ``(1, a2, a3, a4)`` with ``a2 = (2 - n1 n2)^2 / (n1 + n2)^2``,
    ``a3 = (2 - n1 n2) / (n1 + n2)`` and
    ``a4 = (n1 - n2 + n1 n2^2) / (n1 + n2)^2``.

    The exact vacuum coefficient is twice ``a4``; see :func:`alpha_exact`.
    """
    s = nu1 + nu2
    if s == 0:
        raise SingularParameterError("nu1 + nu2 must be nonzero")
    p = 2.0 - nu1 * nu2
    return (1.0, p**2 / s**2, p / s, (nu1 - nu2 + nu1 * nu2**2) / s**2)


def gtilde_ltilde(nu1: float, nu2: float, theta1: float, theta2: float, as_printed: bool = False):
    """Input creation operators of one subsystem in terms of output operators.

    ``(A_dag, B_dag)_in = Gt (A_dag, B_dag)_out + Lt (A, B)_out`` for the
    chain QND(nu1), rotation(theta1, theta2), QND(nu2). With
    ``as_printed=True`` the widely quoted form is returned instead; it has
    the wrong sign on the ``nu1 nu2 sin`` terms and does not invert the chain.
    """
    e1, e2 = np.exp(1j * theta1), np.exp(1j * theta2)
    s1, s2 = np.sin(theta1), np.sin(theta2)
    p = nu1 * nu2
    off_g = [nu2 * e1 + nu1 * e2, nu2 * e2 + nu1 * e1]
    if as_printed:
        G = [[-2j * e1 + p * s2, off_g[0]], [off_g[1], -2j * e2 + p * s1]]
        L = [[-p * s2, -nu2 / e1 - nu1 * e2], [-nu2 / e2 - nu1 * e1, -p * s1]]
    else:
        G = [[-2j * e1 - p * s2, off_g[0]], [off_g[1], -2j * e2 - p * s1]]
        L = [[p * s2, -nu1 / e2 - nu2 * e1], [-nu1 / e1 - nu2 * e2, p * s1]]
    return 0.5j * np.array(G), 0.5j * np.array(L)


def alpha_exact(nu1: float, nu2: float, theta1: float = pi / 2, theta2: float = pi / 2) -> dict:
    """Complex component coefficients relative to the SWAP term, from the exact inverse.

    Keys: ``a2`` (input), ``a3_light``/``a3_atom`` (bunched light and atomic
    pairs), ``a4`` (vacuum, multiplying ``sum_x c_x t_x``).
    """
    G, L = gtilde_ltilde(nu1, nu2, theta1, theta2)
    a1 = G[0, 1] * G[1, 0]
    if a1 == 0:
        raise SingularParameterError("SWAP component vanishes")
    return {
        "a2": G[0, 0] * G[1, 1] / a1,
        "a3_light": G[0, 0] * G[1, 0] / a1,
        "a3_atom": G[0, 1] * G[1, 1] / a1,
        "a4": (L[0, 0] * G[1, 0] + L[0, 1] * G[1, 1]) / a1,
    }


@dataclass(frozen=True)
class PickedConstants:
    nu1: float
    nu2: float
    weak: bool


def pick_constants(nu2: float) -> PickedConstants:
    """``nu1 = 2 / nu2``; ``weak`` flags ``nu2 < 10`` where vacuum leakage is not small."""
    if not nu2 > 0:
        raise SingularParameterError(f"nu2 must be > 0, got {nu2}")
    return PickedConstants(2.0 / nu2, float(nu2), nu2 < WEAK_NU2)


def two_qubit_matrix(regime: int, nu: float) -> np.ndarray:
    """Single-QND action on ``(|0>_1, |0>_2, |1>_1, |1>_2)``, ignoring non-two-qubit terms.

    Not unitary for ``nu != 0``.
    """
    g = 0.5j * nu
    if regime == 0:
        blk = np.array([[1, g], [g, 1]])
        return np.kron(np.eye(2), blk).astype(complex)
    if regime == 1:
        return np.array([[1, 0, 0, g], [0, 1, g, 0], [0, g, 1, 0], [g, 0, 0, 1]], dtype=complex)
    raise ConfigError(f"regime must be 0 or 1, got {regime}")


# --- parameters and inputs ------------------------------------------------


@dataclass(frozen=True)
class QubitAmplitudes:
    """Light qubit ``c0|0> + c1|1>`` and atomic qubit ``t0|0> + t1|1>``."""

    c0: complex
    c1: complex
    t0: complex
    t1: complex

    def __post_init__(self):
        for name in ("c0", "c1", "t0", "t1"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        for q, (a, b) in (("light", (self.c0, self.c1)), ("atomic", (self.t0, self.t1))):
            n = abs(a) ** 2 + abs(b) ** 2
            if abs(n - 1.0) > NORM_TOL:
                raise ConfigError(f"{q} qubit amplitudes have squared norm {n}, need 1")

    @property
    def c(self) -> np.ndarray:
        return np.array([self.c0, self.c1])

    @property
    def t(self) -> np.ndarray:
        return np.array([self.t0, self.t1])

    @classmethod
    def random(cls, rng: np.random.Generator) -> "QubitAmplitudes":
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        c, t = v[:2] / np.linalg.norm(v[:2]), v[2:] / np.linalg.norm(v[2:])
        return cls(c[0], c[1], t[0], t[1])


@dataclass(frozen=True)
class ProtocolParams:
    """Regime, truncation, QND constants and rotation angles (radians).

    ``nu1``/``nu2`` are scalars shared by every subsystem, or one value per
    subsystem (length ``K/2``). For ``k = 0`` a per-mode list (length ``K``)
    is also accepted, which is what geometry-derived constants produce.
    """

    regime: int
    max_oam: int
    nu1: Constants
    nu2: Constants
    theta1: float = pi / 2
    theta2: float = pi / 2

    def __post_init__(self):
        if self.regime not in (0, 1):
            raise ConfigError(f"regime must be 0 or 1, got {self.regime}")
        if self.max_oam < 2 or self.max_oam % 2:
            raise ConfigError(f"max_oam must be an even integer >= 2, got {self.max_oam}")
        for name in ("nu1", "nu2"):
            v = getattr(self, name)
            if np.ndim(v):
                v = tuple(float(x) for x in v)
                object.__setattr__(self, name, v)
            else:
                v = float(v)
                object.__setattr__(self, name, v)
            if np.any(np.asarray(v) < 0):
                raise ConfigError(f"{name} must be >= 0")
            self._expand(v)
        for name in ("theta1", "theta2"):
            th = float(getattr(self, name))
            if not 0.0 <= th < 2 * pi:
                raise ConfigError(f"{name} must lie in [0, 2 pi), got {th}")
            object.__setattr__(self, name, th)

    @property
    def n_subsystems(self) -> int:
        return self.max_oam // 2

    def _expand(self, v) -> np.ndarray:
        K, n = self.max_oam, self.n_subsystems
        a = np.asarray(v, dtype=float)
        if a.ndim == 0:
            a = np.full(n, float(a))
        if self.regime == 0:
            if a.shape == (n,):
                return np.repeat(a, 2)
            if a.shape == (K,):
                return a
            raise ConfigError(f"k=0 constants need 1, {n} or {K} values, got {a.size}")
        if a.shape != (n,):
            raise ConfigError(f"k=1 constants need 1 or {n} values, got {a.size}")
        return a

    def constants(self, step: int) -> np.ndarray:
        """Per-mode (k = 0) or per-subsystem (k = 1) constants of QND step 1 or 2."""
        return self._expand(self.nu1 if step == 1 else self.nu2)


def step_coupling(params: ProtocolParams, encoding: QubitEncoding, step: int) -> CouplingMatrix:
    """Light-atom block of QND step ``step`` built from the encoding.

    Each coupled pair of logical modes gets gain ``nu / 2``; for ``k = 0``
    this is the diagonal ``S`` block.
    """
    nu = params.constants(step)
    K = params.max_oam
    if params.regime == 0:
        return CouplingMatrix("S", np.diag(-0.5j * nu))
    X = np.zeros((K, K))
    for j, v in enumerate(encoding.vectors):
        l_odd, l_even = v[0][:K], v[1][:K]
        a_odd, a_even = v[2][K:], v[3][K:]
        X += 0.5 * nu[j] * (np.outer(l_even, a_odd) + np.outer(l_odd, a_even))
    if np.abs(X - X.T).max() > 1e-10:
        raise ConsistencyError("encoding does not give a reciprocal light-atom coupling")
    return CouplingMatrix("custom", -1j * 0.5 * (X + X.T))


def _check_encoding(params: ProtocolParams, encoding: QubitEncoding):
    if encoding.regime != params.regime or encoding.max_oam != params.max_oam:
        raise ConsistencyError(
            f"encoding (k={encoding.regime}, K={encoding.max_oam}) does not match "
            f"params (k={params.regime}, K={params.max_oam})"
        )
    if np.abs(encoding.gram() - np.eye(2 * params.max_oam)).max() > 1e-9:
        raise ConsistencyError("encoding vectors are not orthonormal")


def protocol_map(params: ProtocolParams, encoding: QubitEncoding) -> LinearOpMap:
    """Forward map of QND(nu1), rotation(theta1, theta2), QND(nu2)."""
    _check_encoding(params, encoding)
    return compose_all(
        qnd_map(step_coupling(params, encoding, 1)),
        rotation_map(params.theta1, params.theta2, params.max_oam),
        qnd_map(step_coupling(params, encoding, 2)),
    )


def _amps_list(amps, n) -> list:
    if isinstance(amps, QubitAmplitudes):
        amps = [amps]
    amps = list(amps)
    if len(amps) != n:
        raise ConfigError(f"need {n} amplitude records (one per subsystem), got {len(amps)}")
    return amps


def _qubit_forms(a: QubitAmplitudes, vecs: np.ndarray):
    """Creation forms of the light and atomic qubits of one subsystem (physical basis)."""
    light = OperatorLinearForm.creation(a.c0 * vecs[0] + a.c1 * vecs[1])
    atom = OperatorLinearForm.creation(a.t0 * vecs[2] + a.t1 * vecs[3])
    return light, atom


def prepare_input(amps, encoding: QubitEncoding) -> FockState:
    """Product input state in the physical modes (OAM order, light then atoms).

    The number of Fock keys grows quickly with ``K`` for k = 1 encodings,
    whose logical modes spread over many physical ones.
    """
    amps = _amps_list(amps, encoding.n_subsystems)
    forms = []
    for a, vecs in zip(amps, encoding.vectors):
        forms.extend(_qubit_forms(a, vecs))
    state = evaluate_on_vacuum(forms)
    if abs(state.norm() - 1.0) > NORM_TOL:
        raise ConsistencyError(f"input state norm {state.norm()} differs from 1")
    return state


# --- running the protocol --------------------------------------------------


@dataclass(frozen=True)
class SubsystemReferences:
    """Reference states of one subsystem on the logical modes."""

    input_state: FockState
    target: FockState
    nq: FockState
    vacuum_scale: complex
    light: tuple
    atom: tuple


def subsystem_references(a: QubitAmplitudes, j: int, n_modes: int, pairing) -> SubsystemReferences:
    """Input, SWAP target, bunched reference and vacuum weight of subsystem ``j``.

    Logical mode order is ``(|0>_1, |1>_1, |0>_2, |1>_2)`` per subsystem.
    ``pairing[x]`` is the atomic state coupled to light state ``x``; the
    target is SWAP for the identity pairing and (X x X) SWAP for the
    flipped one.
    """
    base = 4 * j
    L, A = (base, base + 1), (base + 2, base + 3)
    c, t = a.c, a.t

    def form(coefs, idx):
        g = np.zeros(n_modes, dtype=complex)
        for x, i in enumerate(idx):
            g[i] += coefs[x]
        return OperatorLinearForm.creation(g)

    p = list(pairing)
    light_c = form(c, L)
    atom_t = form(t, A)
    atom_c = form(c, [A[p[x]] for x in (0, 1)])
    light_t = form(t, [L[p[y]] for y in (0, 1)])
    inp = evaluate_on_vacuum([light_c, atom_t])
    tgt = evaluate_on_vacuum([atom_c, light_t])
    nq = evaluate_on_vacuum([light_c, light_t]) + evaluate_on_vacuum([atom_c, atom_t])
    s = complex(sum(c[x] * t[p[x]] for x in (0, 1)))
    return SubsystemReferences(inp, tgt, nq, s, L, A)


@dataclass(frozen=True)
class SubsystemResult:
    fidelity: float
    decomposition: StateDecomposition
    two_qubit_weight: float
    cross_leakage: float
    projection_distance: float
    norm: float

    @property
    def ratios(self) -> tuple:
        return self.decomposition.ratios


@dataclass(frozen=True)
class ProtocolResult:
    params: ProtocolParams
    subsystems: list
    pre_normalization_norm: float
    swap_times_xx: bool
    n_keys: int = 0
    max_excitation: int = 0

    @property
    def fidelities(self) -> list:
        return [s.fidelity for s in self.subsystems]


def _phase_aligned_distance(state: FockState, target: FockState) -> float:
    """Max componentwise gap between normalized states after removing a global phase."""
    s, t = state.normalized(), target.normalized()
    keys = sorted(set(s.amps) | set(t.amps))
    sv = np.array([s.amps.get(k, 0) for k in keys])
    tv = np.array([t.amps.get(k, 0) for k in keys])
    ov = np.vdot(sv, tv)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.abs(sv * phase - tv).max())


def output_state(params: ProtocolParams, a: QubitAmplitudes, j: int, encoding: QubitEncoding, inverse: LinearOpMap):
    """Output of subsystem ``j`` on all 2K logical modes."""
    W = encoding.basis()
    light, atom = _qubit_forms(a, encoding.vectors[j])
    forms = [substitute(f, inverse).in_basis(W) for f in (light, atom)]
    return evaluate_on_vacuum(forms)


def run_swap(params: ProtocolParams, amps, encoding: QubitEncoding) -> ProtocolResult:
    """Run the three-step protocol over all 2K modes and analyse each subsystem.

    The forward map is inverted, the input creation forms are rewritten in
    output operators and evaluated against the output vacuum. Each
    subsystem's pair of forms is evaluated separately on the logical modes;
    ``cross_leakage`` is the share of that state whose excitations sit in
    another subsystem's modes.
    """
    amps = _amps_list(amps, params.n_subsystems)
    inverse = invert(protocol_map(params, encoding))
    n = 2 * params.max_oam
    results, total_norm, n_keys, max_exc = [], 1.0, 0, 0
    for j, a in enumerate(amps):
        psi = output_state(params, a, j, encoding, inverse)
        refs = subsystem_references(a, j, n, encoding.pairing)
        group = set(range(4 * j, 4 * j + 4))
        norm2 = psi.norm() ** 2
        inside = psi.filter(lambda k: all(i in group for i, nk in enumerate(k) if nk))
        leak = max(0.0, 1.0 - inside.norm() ** 2 / norm2)
        two_q = psi.filter(
            lambda k: sum(k[i] for i in refs.light) == 1 and sum(k[i] for i in refs.atom) == 1 and sum(k) == 2
        )
        dec = decompose(psi, refs.input_state, refs.target, refs.nq, refs.vacuum_scale)
        results.append(
            SubsystemResult(
                fidelity=fidelity(psi, refs.target),
                decomposition=dec,
                two_qubit_weight=two_q.norm() ** 2 / norm2,
                cross_leakage=leak,
                projection_distance=_phase_aligned_distance(two_q, refs.target) if two_q.amps else 2.0,
                norm=float(np.sqrt(norm2)),
            )
        )
        total_norm *= float(np.sqrt(norm2))
        n_keys += len(psi.amps)
        max_exc = max(max_exc, psi.max_excitation())
    return ProtocolResult(params, results, total_norm, params.regime == 1, n_keys, max_exc)


def run_parallel(params: ProtocolParams, amps: Sequence[QubitAmplitudes], encoding: QubitEncoding) -> ProtocolResult:
    """All ``K/2`` subsystems at once; one amplitude record per subsystem is required."""
    if isinstance(amps, QubitAmplitudes) or len(amps) != params.n_subsystems:
        got = 1 if isinstance(amps, QubitAmplitudes) else len(amps)
        raise ConfigError(f"need {params.n_subsystems} subsystem inputs, got {got}")
    return run_swap(params, amps, encoding)


# --- scenarios and sweeps ---------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    """Everything needed for a run, with constants given directly or via strengths.

    Constants mode sets ``nu1``/``nu2``. Strength mode sets ``eta1``/``eta2``
    and derives the constants from the geometry: ``eta * chi_hat(m, m)`` per
    mode for ``k = 0``, ``2 eta mu_j`` per tetrad for ``k = 1``.
    """

    regime: int = 0
    max_oam: int = 2
    nu1: Optional[Constants] = None
    nu2: Optional[Constants] = None
    eta1: Optional[float] = None
    eta2: Optional[float] = None
    geometry: BeamGeometry = field(default_factory=BeamGeometry)
    theta1: float = pi / 2
    theta2: float = pi / 2
    inputs: tuple = ()

    def __post_init__(self):
        by_nu = self.nu1 is not None or self.nu2 is not None
        by_eta = self.eta1 is not None or self.eta2 is not None
        if by_nu == by_eta:
            raise ConfigError("give either nu1/nu2 or eta1/eta2")
        if by_nu and (self.nu1 is None or self.nu2 is None):
            raise ConfigError("both nu1 and nu2 are required")
        if by_eta and (self.eta1 is None or self.eta2 is None):
            raise ConfigError("both eta1 and eta2 are required")
        if by_eta and min(self.eta1, self.eta2) < 0:
            raise ConfigError("eta must be >= 0")
        object.__setattr__(self, "inputs", tuple(self.inputs))

    @property
    def strength_mode(self) -> bool:
        return self.eta1 is not None


def geometric_encoding(regime: int, max_oam: int, geometry: BeamGeometry) -> QubitEncoding:
    if regime == 0:
        return build_encoding_k0(max_oam)
    M = build_M(couplings_for(SystemConfig(1, max_oam, 1.0, geometry)))
    return build_encoding_k1(eigendecompose(M))


def geometric_constants(regime: int, max_oam: int, geometry: BeamGeometry) -> np.ndarray:
    """Unit-strength constants: ``chi_hat(m, m)`` per mode (k = 0) or ``2 mu_j`` per tetrad (k = 1)."""
    if regime == 0:
        table = overlap_table(0, max_oam, geometry)
        return np.array([table[(m, m)] for m in range(max_oam)])
    M = build_M(couplings_for(SystemConfig(1, max_oam, 1.0, geometry)))
    return np.array([2.0 * t.mu for t in group_tetrads(eigendecompose(M))])


def resolve(scenario: Scenario):
    """``(ProtocolParams, QubitEncoding)`` for a scenario."""
    s = scenario
    enc = geometric_encoding(s.regime, s.max_oam, s.geometry)
    if s.strength_mode:
        base = geometric_constants(s.regime, s.max_oam, s.geometry)
        nu1, nu2 = tuple(s.eta1 * base), tuple(s.eta2 * base)
    else:
        nu1, nu2 = s.nu1, s.nu2
    return ProtocolParams(s.regime, s.max_oam, nu1, nu2, s.theta1, s.theta2), enc


def run_scenario(scenario: Scenario) -> ProtocolResult:
    params, enc = resolve(scenario)
    return run_swap(params, scenario.inputs, enc)


SWEEP_VARS = ("nu2", "eta", "zs_over_zr")


def sweep_point(scenario: Scenario, var: str, value: float) -> Scenario:
    """Scenario at one grid value.

    ``nu2`` keeps the product rule ``nu1 = 2 / nu2``; ``eta`` sets both step
    strengths to ``value``; ``zs_over_zr`` moves the driving-beam waist.
    """
    if var == "nu2":
        if scenario.strength_mode:
            raise ConfigError("nu2 sweeps need a constants-mode scenario")
        return replace(scenario, nu1=pick_constants(value).nu1, nu2=float(value))
    if var == "eta":
        if not scenario.strength_mode:
            raise ConfigError("eta sweeps need a strength-mode scenario")
        return replace(scenario, eta1=float(value), eta2=float(value))
    if var == "zs_over_zr":
        return replace(scenario, geometry=replace(scenario.geometry, zs_over_zr=float(value)))
    raise ConfigError(f"sweep variable must be one of {SWEEP_VARS}, got {var!r}")


def sweep(scenario: Scenario, var: str, values: Sequence[float]) -> list:
    """``[(value, ProtocolResult), ...]`` in grid order."""
    values = list(values)
    if not values:
        raise ConfigError("empty sweep grid")
    return [(float(v), run_scenario(sweep_point(scenario, var, v))) for v in values]
