"""Spectrum of the k = 1 input-output matrix and the qubit encodings.

``M = I + i J`` with ``J`` real symmetric, so the eigenvectors of ``M`` are
the real orthonormal eigenvectors of ``J`` and ``lambda = 1 + i kappa``.
``J`` only links even light modes with odd atomic modes (sector A) and odd
light modes with even atomic modes (sector B); it is also invariant under
exchanging the light and atomic blocks, and flipping the sign of the
atomic block maps ``kappa -> -kappa``. These three symmetries give the
tetrads ``{1 + i mu, 1 + i mu, 1 - i mu, 1 - i mu}``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ConsistencyError, NumericFailure

STRUCT_TOL = 1e-9
CLUSTER_TOL = 1e-8
SUPPORT_TOL = 1e-10

EVEN_LIGHT_ODD_ATOM = "EVEN-LIGHT/ODD-ATOM"
ODD_LIGHT_EVEN_ATOM = "ODD-LIGHT/EVEN-ATOM"

LOGICAL_LABELS = ("0_1", "1_1", "0_2", "1_2")


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues and real orthonormal eigenvectors (columns) of ``M``.

    Ordered by descending ``Im(lambda)``; within a degenerate cluster the
    sector-A vector of each pair comes first and pairs are ordered by their
    lowest participating mode.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dimension(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def max_oam(self) -> int:
        return self.dimension // 2

    @property
    def kappa(self) -> np.ndarray:
        return self.eigenvalues.imag

    def vector(self, n: int) -> np.ndarray:
        return self.eigenvectors[:, n]

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.T


@dataclass(frozen=True)
class Tetrad:
    mu: float
    indices: tuple


@dataclass(frozen=True)
class QubitEncoding:
    """Coefficient vectors over the 2K physical modes for every logical state.

    ``vectors[j]`` is a 4 x 2K array with rows ``|0>_1, |1>_1, |0>_2, |1>_2``
    of subsystem ``j``. Qubit 1 lives in the light modes, qubit 2 in the
    atomic modes. ``pairing[x]`` is the atomic logical state that a QND step
    couples to light logical state ``x``: identity for k = 0, flipped for
    k = 1.
    """

    regime: int
    vectors: np.ndarray

    @property
    def n_subsystems(self) -> int:
        return self.vectors.shape[0]

    @property
    def max_oam(self) -> int:
        return self.vectors.shape[2] // 2

    @property
    def pairing(self) -> tuple:
        return (0, 1) if self.regime == 0 else (1, 0)

    def basis(self) -> np.ndarray:
        """2K x 2K matrix whose rows are all logical modes, subsystem-major."""
        return self.vectors.reshape(-1, self.vectors.shape[2])

    def gram(self) -> np.ndarray:
        W = self.basis()
        return W @ W.conj().T


def _sector_masks(K: int):
    idx = np.arange(K)
    even = idx % 2 == 0
    a = np.concatenate([even, ~even])
    return a, ~a


def _swap(v, K):
    return np.concatenate([v[K:], v[:K]])


def _flip(v, K):
    return np.concatenate([v[:K], -v[K:]])


def _first_index(v, tol=SUPPORT_TOL):
    nz = np.flatnonzero(np.abs(v) > tol)
    return int(nz[0]) if nz.size else len(v)


def _sign_fix(v, tol=SUPPORT_TOL):
    i = _first_index(v, tol)
    if i < len(v) and v[i] < 0:
        return -v
    return v


def _subspace_in(Vc, mask, tol=1e-6):
    """Orthonormal basis of ``span(Vc)`` intersected with the masked coordinates."""
    P = Vc * mask[:, None]
    U, s, _ = np.linalg.svd(P, full_matrices=False)
    return U[:, s > 1 - tol] * mask[:, None]


def _project_onto(Vc, v):
    p = Vc @ (Vc.T @ v)
    return p / np.linalg.norm(p)


def _order_by_support(vectors):
    return sorted(vectors, key=_first_index)


def _resolve_cluster(Vc, K):
    """Split a degenerate cluster into (sector A, sector B) pairs."""
    maskA, maskB = _sector_masks(K)
    A = _subspace_in(Vc, maskA)
    B = _subspace_in(Vc, maskB)
    d = Vc.shape[1]
    if A.shape[1] + B.shape[1] != d or A.shape[1] != B.shape[1]:
        return None
    A = [_sign_fix(a) for a in _order_by_support(list(A.T))]
    pairs = []
    for a in A:
        # swap(a) is an eigenvector with the same kappa; take its sector-B image
        pairs.append((a, _sign_fix(_project_onto(B, _swap(a, K)))))
    return pairs


def _resolve_zero_cluster(Vc, K):
    """Null space of J: pair light-even with atom-odd vectors by support."""
    idx = np.arange(2 * K)
    light_even = (idx < K) & (idx % 2 == 0)
    atom_odd = (idx >= K) & ((idx - K) % 2 == 1)
    U = _order_by_support([_sign_fix(u) for u in _subspace_in(Vc, light_even).T])
    W = _order_by_support([_sign_fix(w) for w in _subspace_in(Vc, atom_odd).T])
    if len(U) != len(W) or 4 * len(U) != Vc.shape[1]:
        return None
    plus = [((u + w) / np.sqrt(2), _swap((u + w) / np.sqrt(2), K)) for u, w in zip(U, W)]
    minus = [((u - w) / np.sqrt(2), _swap((u - w) / np.sqrt(2), K)) for u, w in zip(U, W)]
    return plus, minus


def eigendecompose(M: np.ndarray) -> EigenSystem:
    """Eigen-decomposition ``M = sum_n lambda_n m_n m_n^T`` with real ``m_n``."""
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    if M.shape != (n, n) or n % 2:
        raise ConfigError(f"M must be square with even dimension, got {M.shape}")
    K = n // 2
    if np.abs(M.real - np.eye(n)).max() > 1e-12:
        raise ConfigError("M must have unit real part")
    J = M.imag
    if np.abs(J - J.T).max() > 1e-12:
        raise ConfigError("Im(M) must be symmetric")
    try:
        kappa, V = np.linalg.eigh(J)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"eigensolve failed: {exc}") from exc
    order = np.argsort(-kappa, kind="stable")
    kappa, V = kappa[order], V[:, order]

    scale = max(1.0, float(np.abs(kappa).max()))
    bounds = [0]
    for i in range(1, n):
        if kappa[i - 1] - kappa[i] > CLUSTER_TOL * scale:
            bounds.append(i)
    bounds.append(n)
    clusters = [(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]

    vecs = V.copy()
    vals = kappa.copy()
    resolved = {}
    for lo, hi in clusters:
        mean = float(kappa[lo:hi].mean())
        vals[lo:hi] = mean
        if abs(mean) <= CLUSTER_TOL * scale:
            zero = _resolve_zero_cluster(V[:, lo:hi], K)
            if zero is not None:
                plus, minus = zero
                seq = [v for pair in plus for v in pair]
                seq += [v for pair in reversed(minus) for v in pair]
                vecs[:, lo:hi] = np.column_stack(seq)
                vals[lo:hi] = 0.0
            continue
        if mean > 0:
            pairs = _resolve_cluster(V[:, lo:hi], K)
            if pairs is not None:
                resolved[(lo, hi)] = pairs
                vecs[:, lo:hi] = np.column_stack([v for p in pairs for v in p])
    # negative clusters mirror positive ones through the atomic sign flip
    for lo, hi in clusters:
        mean = vals[lo]
        if mean >= -CLUSTER_TOL * scale:
            continue
        mirror = (n - hi, n - lo)
        Vc = V[:, lo:hi]
        if mirror in resolved:
            pairs = [
                (_sign_fix(_project_onto(Vc, _flip(a, K))), _sign_fix(_project_onto(Vc, _flip(b, K))))
                for a, b in resolved[mirror]
            ]
        else:
            pairs = _resolve_cluster(Vc, K)
            if pairs is None:
                continue
        vecs[:, lo:hi] = np.column_stack([v for p in reversed(pairs) for v in p])

    vecs = np.column_stack([_sign_fix(vecs[:, i]) for i in range(n)])
    es = EigenSystem(eigenvalues=1.0 + 1j * vals, eigenvectors=vecs)
    resid = np.linalg.norm(es.reconstruct() - M)
    if resid > 1e-9:
        raise NumericFailure(f"eigen reconstruction residual {resid:.3g} exceeds 1e-9")
    return es


def parity_classify(v: np.ndarray, tol: float = STRUCT_TOL) -> str:
    """Parity sector of an eigenvector of a k = 1 matrix ``M``."""
    v = np.asarray(v)
    K = v.shape[0] // 2
    maskA, maskB = _sector_masks(K)
    outA = np.linalg.norm(v[~maskA])
    outB = np.linalg.norm(v[~maskB])
    if outA <= tol:
        return EVEN_LIGHT_ODD_ATOM
    if outB <= tol:
        return ODD_LIGHT_EVEN_ATOM
    raise ConsistencyError(f"vector mixes parities (off-sector norms {outA:.3g}, {outB:.3g})")


def group_tetrads(es: EigenSystem, tol: float = STRUCT_TOL) -> list[Tetrad]:
    """Group the 2K eigenvalues into K/2 tetrads, largest ``mu`` first."""
    n = es.dimension
    if n % 4:
        raise ConsistencyError(f"dimension {n} cannot hold whole tetrads")
    kap = es.kappa
    scale = max(1.0, float(np.abs(kap).max()))
    out = []
    for j in range(n // 4):
        idx = (2 * j, 2 * j + 1, n - 2 - 2 * j, n - 1 - 2 * j)
        mu = kap[idx[0]]
        pattern = np.array([mu, mu, -mu, -mu])
        if mu < -tol * scale or np.abs(kap[list(idx)] - pattern).max() > tol * scale:
            raise ConsistencyError(f"spectrum is not tetradic at tetrad {j}: {kap[list(idx)]}")
        labels = [parity_classify(es.vector(i), tol) for i in idx]
        want = [EVEN_LIGHT_ODD_ATOM, ODD_LIGHT_EVEN_ATOM] * 2
        if labels != want:
            raise ConsistencyError(f"tetrad {j} has parity pattern {labels}")
        out.append(Tetrad(mu=float(max(mu, 0.0)), indices=idx))
    return out


@dataclass(frozen=True)
class PairStructureReport:
    checked: bool
    swap_partner_residual: float
    conjugate_partner_residual: float


def _signless_residual(u, v):
    return min(np.linalg.norm(u - v), np.linalg.norm(u + v))


def pair_structure_check(es: EigenSystem, tol: float = STRUCT_TOL) -> PairStructureReport:
    """Check both partner rules within every tetrad, up to eigenvector sign.

    Equal-eigenvalue partners exchange their light and atomic blocks;
    conjugate partners share the light block and negate the atomic block.
    Tetrads with ``mu = 0`` are skipped (the basis is a convention there).
    """
    K = es.max_oam
    swap_res = conj_res = 0.0
    checked = False
    for t in group_tetrads(es, tol):
        if t.mu <= tol:
            continue
        checked = True
        e1, e2, e3, e4 = (es.vector(i) for i in t.indices)
        swap_res = max(swap_res, _signless_residual(e2, _swap(e1, K)), _signless_residual(e4, _swap(e3, K)))
        conj_res = max(conj_res, _signless_residual(e3, _flip(e1, K)), _signless_residual(e4, _flip(e2, K)))
    if max(swap_res, conj_res) > tol:
        raise ConsistencyError(
            f"pair structure violated (swap partners {swap_res:.3g}, conjugate partners {conj_res:.3g})"
        )
    return PairStructureReport(checked, swap_res, conj_res)


def build_encoding_k0(K: int) -> QubitEncoding:
    """Subsystem ``j`` uses OAM ``2j`` and ``2j + 1`` in both light and atoms."""
    if K < 2 or K % 2:
        raise ConfigError(f"max_oam must be an even integer >= 2, got {K}")
    vecs = np.zeros((K // 2, 4, 2 * K))
    for j in range(K // 2):
        vecs[j, 0, 2 * j] = 1.0
        vecs[j, 1, 2 * j + 1] = 1.0
        vecs[j, 2, K + 2 * j] = 1.0
        vecs[j, 3, K + 2 * j + 1] = 1.0
    return QubitEncoding(regime=0, vectors=vecs)


def _blocks(v, K):
    z = np.zeros(K)
    return np.concatenate([v[:K], z]), np.concatenate([z, v[K:]])


def _light_atom_split(e, K, tol):
    light, atom = _blocks(np.sqrt(2.0) * e, K)
    for name, part in (("light", light), ("atomic", atom)):
        if abs(np.linalg.norm(part) - 1.0) > tol:
            raise ConsistencyError(f"{name} block of an eigenvector does not carry half the weight")
    if _first_index(light) < len(light) and light[_first_index(light)] < 0:
        light, atom = -light, -atom
    return light, atom


def build_encoding_k1(es: EigenSystem, tol: float = STRUCT_TOL) -> QubitEncoding:
    """Logical states of every tetrad, built from its eigenoperators.

    For tetrad ``(E1, E2, E3, E4)`` the combinations ``(E1 +- E3)/sqrt 2``
    are pure even-light and pure odd-atom states, ``(E2 +- E4)/sqrt 2``
    pure odd-light and even-atom. Logical map: ``|0>_1`` odd light,
    ``|1>_1`` even light, ``|0>_2`` odd atom, ``|1>_2`` even atom. The
    light and atomic vectors of a pair share one sign, so the QND gain
    between them is ``+mu``.
    """
    K = es.max_oam
    tetrads = group_tetrads(es, tol)
    vecs = np.zeros((len(tetrads), 4, 2 * K))
    for j, t in enumerate(tetrads):
        e1, e2, e3, e4 = (es.vector(i) for i in t.indices)
        for a, b in ((e1, e3), (e2, e4)):
            for combo in ((a + b) / np.sqrt(2), (a - b) / np.sqrt(2)):
                light_w = np.linalg.norm(combo[:K])
                atom_w = np.linalg.norm(combo[K:])
                if min(light_w, atom_w) > tol:
                    raise ConsistencyError(
                        f"tetrad {j}: partner combination is neither light nor atomic "
                        f"(weights {light_w:.3g}, {atom_w:.3g})"
                    )
        light_even, atom_odd = _light_atom_split(e1, K, tol)
        light_odd, atom_even = _light_atom_split(e2, K, tol)
        vecs[j] = np.stack([light_odd, light_even, atom_odd, atom_even])
    return QubitEncoding(regime=1, vectors=vecs)


def block_diagonalize(M: np.ndarray, es: EigenSystem, tol: float = STRUCT_TOL) -> list[np.ndarray]:
    """4 x 4 blocks of ``M`` in the basis (odd atom, even light, even atom, odd light).

    Each block has unit diagonal and ``i mu`` linking the two states of each
    coupled pair; everything outside the blocks must vanish.
    """
    enc = build_encoding_k1(es, tol)
    order = [2, 1, 3, 0]
    B = np.concatenate([enc.vectors[j][order] for j in range(enc.n_subsystems)]).T
    T = B.T @ np.asarray(M) @ B
    blocks = []
    off = T.copy()
    for j, t in enumerate(group_tetrads(es, tol)):
        s = slice(4 * j, 4 * j + 4)
        blk = T[s, s].copy()
        off[s, s] = 0
        im = 1j * t.mu
        want = np.array([[1, im, 0, 0], [im, 1, 0, 0], [0, 0, 1, im], [0, 0, im, 1]])
        if np.abs(blk - want).max() > tol:
            raise ConsistencyError(f"block {j} does not match the tetrad pattern")
        blocks.append(blk)
    if np.abs(off).max() > tol:
        raise ConsistencyError(f"off-block residual {np.abs(off).max():.3g} exceeds {tol}")
    return blocks
