import itertools
from math import pi, sqrt

import numpy as np
import pytest

from qndswap.bogoliubov import OperatorLinearForm, invert, substitute
from qndswap.errors import ConfigError, ConsistencyError, SingularParameterError
from qndswap.lgmodes import BeamGeometry
from qndswap.protocol import (
    ProtocolParams,
    QubitAmplitudes,
    Scenario,
    alpha_closed_form,
    alpha_exact,
    geometric_constants,
    gtilde_ltilde,
    output_state,
    pick_constants,
    prepare_input,
    protocol_map,
    resolve,
    run_parallel,
    run_scenario,
    run_swap,
    step_coupling,
    sweep,
)
from qndswap.coupling import SystemConfig, build_M, couplings_for
from qndswap.fock import evaluate_on_vacuum
from qndswap.spectral import build_encoding_k0, build_encoding_k1, eigendecompose

HALF = pi / 2
ENC2 = build_encoding_k0(2)


def amps(c0, c1, t0, t1):
    return QubitAmplitudes(c0, c1, t0, t1)


# --- closed forms -------------------------------------------------------------


def test_closed_form_values():
    r = 2 ** 0.5
    _, a2, a3, a4 = alpha_closed_form(r, r)
    assert a2 == pytest.approx(0, abs=1e-15) and a3 == pytest.approx(0, abs=1e-15)
    assert a4 == pytest.approx(sqrt(2) / 4)
    _, a2, a3, a4 = alpha_closed_form(0.1, 20)
    assert a2 == pytest.approx(0, abs=1e-15) and a4 == pytest.approx(20.1 / 404.01)
    assert alpha_closed_form(1, 1) == pytest.approx((1, 0.25, 0.5, 0.25))
    with pytest.raises(SingularParameterError):
        alpha_closed_form(0, 0)


def test_exact_vacuum_term_is_twice_the_closed_form(rng):
    # the exact inverse gives the same a2, a3 but twice the vacuum term
    for n1, n2 in rng.uniform(0.1, 20, (10, 2)):
        ex = alpha_exact(n1, n2)
        _, a2, a3, a4 = alpha_closed_form(n1, n2)
        assert abs(ex["a2"]) == pytest.approx(abs(a2), abs=1e-12)
        assert abs(ex["a3_light"]) == pytest.approx(abs(a3), abs=1e-12)
        assert abs(ex["a3_atom"]) == pytest.approx(abs(a3), abs=1e-12)
        assert abs(ex["a4"]) == pytest.approx(2 * abs(a4), rel=1e-12)


def test_pick_constants():
    p = pick_constants(20)
    assert p.nu1 == pytest.approx(0.1) and not p.weak
    assert pick_constants(2).nu1 == 1 and pick_constants(2).weak
    assert pick_constants(sqrt(2)).nu1 == pytest.approx(sqrt(2))
    with pytest.raises(SingularParameterError):
        pick_constants(0)


def test_gtilde_ltilde_zero_constants():
    th1, th2 = 0.4, 2.2
    G, L = gtilde_ltilde(0, 0, th1, th2)
    assert np.allclose(G, np.diag([np.exp(1j * th1), np.exp(1j * th2)]))
    assert np.allclose(L, 0)


@pytest.mark.parametrize("seed", range(5))
def test_gtilde_ltilde_invert_the_chain(seed):
    rng = np.random.default_rng(seed)
    n1, n2 = rng.uniform(0, 20, 2)
    th1, th2 = rng.uniform(0, 2 * pi, 2)
    inv = invert(protocol_map(ProtocolParams(0, 2, n1, n2, th1, th2), ENC2))
    G, L = gtilde_ltilde(n1, n2, th1, th2)
    idx = np.ix_([0, 2], [0, 2])
    assert np.abs(inv.E[idx] - G).max() <= 1e-10
    assert np.abs(inv.F[idx] - L).max() <= 1e-10
    Gp, Lp = gtilde_ltilde(n1, n2, th1, th2, as_printed=True)
    assert np.allclose(Gp[0, 1], G[0, 1]) and np.allclose(Gp[1, 0], G[1, 0])


def test_gtilde_off_diagonal_at_working_point():
    n1, n2 = 0.1, 20
    G, _ = gtilde_ltilde(n1, n2, HALF, HALF)
    assert G[0, 1] == pytest.approx(0.5j * (n1 + n2) * 1j)


# --- inputs -------------------------------------------------------------------


def test_amplitudes_validation():
    with pytest.raises(ConfigError):
        amps(1, 1, 1, 0)
    a = amps(0.6, 0.8j, 1, 0)
    assert np.allclose(a.c, [0.6, 0.8j])


def test_prepare_input_k0():
    s = prepare_input(amps(1, 0, 1, 0), ENC2)
    assert s.amps == {(1, 0, 1, 0): 1}
    s = prepare_input(amps(0, 1, 0, 1), ENC2)
    assert s.amps == {(0, 1, 0, 1): 1}


def test_prepare_input_k1_uses_eigenvector_weights():
    K = 4
    enc = build_encoding_k1(eigendecompose(build_M(couplings_for(SystemConfig(1, K, 1.0, BeamGeometry(zs_over_zr=3))))))
    a = [amps(1, 0, 1, 0), amps(0, 1, 0, 1)]
    s = prepare_input(a, enc)
    assert s.norm() == pytest.approx(1, abs=1e-12)
    v = enc.vectors
    # coefficient of light mode 1 x atom mode 1 x (second subsystem light 0, atom 0)
    key = (0, 1, 1, 0, 0, 1, 1, 0)
    # permanent over the four single-excitation forms
    forms = [v[0][0], v[0][2], v[1][1], v[1][3]]
    want = sum(np.prod([f[m] for f, m in zip(forms, modes)]) for modes in itertools.permutations([1, 2, 5, 6]))
    assert s.amps.get(key, 0) == pytest.approx(want, abs=1e-12)


# --- protocol runs -------------------------------------------------------------


def test_swap_of_basis_states():
    r = run_swap(ProtocolParams(0, 2, 0.1, 20), amps(1, 0, 0, 1), ENC2).subsystems[0]
    # |0>_1 |1>_2 -> |1>_1 |0>_2, no vacuum term because sum c_x t_x = 0
    assert r.projection_distance <= 1e-9
    assert r.fidelity == pytest.approx(1, abs=1e-12)


def test_one_one_ratios_against_exact_inverse(rng):
    a = QubitAmplitudes.random(rng)
    r = run_swap(ProtocolParams(0, 2, 1.0, 1.0), a, ENC2).subsystems[0]
    assert r.ratios[1] == pytest.approx(0.25, abs=1e-12)
    assert r.ratios[2] == pytest.approx(0.5, abs=1e-12)
    assert r.ratios[3] == pytest.approx(0.5, abs=1e-12)
    assert r.decomposition.fit_residual < 1e-12


def _dense_output(n1, n2, th1, th2, a, cutoff=4):
    """Independent dense-matrix evaluation of the protocol output on A0, A1, B0, B1."""
    G, L = gtilde_ltilde(n1, n2, th1, th2)
    d = cutoff
    lower = np.diag(np.sqrt(np.arange(1, d)), 1)
    eye = np.eye(d)

    def op(i):
        mats = [eye] * 4
        mats[i] = lower
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    A, B = [op(0), op(1)], [op(2), op(3)]

    def light_in(x):  # A_x,in^dag in terms of output operators
        return G[0, 0] * A[x].T + G[0, 1] * B[x].T + L[0, 0] * A[x] + L[0, 1] * B[x]

    def atom_in(x):
        return G[1, 0] * A[x].T + G[1, 1] * B[x].T + L[1, 0] * A[x] + L[1, 1] * B[x]

    vac = np.zeros(d**4)
    vac[0] = 1
    light = a.c0 * light_in(0) + a.c1 * light_in(1)
    atom = a.t0 * atom_in(0) + a.t1 * atom_in(1)
    return light @ atom @ vac


@pytest.mark.parametrize("nus", [(1.0, 1.0), (0.3, 7.0), (0.1, 20.0), (2.0, 0.5)])
def test_fock_engine_matches_dense_oracle(nus, rng):
    th1, th2 = rng.uniform(0, 2 * pi, 2)
    a = QubitAmplitudes.random(rng)
    params = ProtocolParams(0, 2, nus[0], nus[1], th1, th2)
    psi = output_state(params, a, 0, ENC2, invert(protocol_map(params, ENC2)))
    dense = _dense_output(nus[0], nus[1], th1, th2, a)
    d = 4
    # logical order (A0, A1, B0, B1) equals the dense tensor order
    for key, amp in psi.amps.items():
        idx = ((key[0] * d + key[1]) * d + key[2]) * d + key[3]
        assert amp == pytest.approx(dense[idx], abs=1e-10)
    assert np.linalg.norm(dense) == pytest.approx(psi.norm(), rel=1e-12)


def test_product_condition_removes_input_and_bunching(rng):
    for n2 in (2.0, 5.0, 30.0):
        r = run_swap(ProtocolParams(0, 2, 2 / n2, n2), QubitAmplitudes.random(rng), ENC2).subsystems[0]
        assert r.ratios[1] < 1e-9 and r.ratios[2] < 1e-9
        assert r.ratios[3] == pytest.approx(2 / (n2 + 2 / n2), rel=1e-10)


def test_fidelity_grows_with_nu2(rng):
    a = QubitAmplitudes.random(rng)
    f = [run_swap(ProtocolParams(0, 2, 2 / n, n), a, ENC2).subsystems[0].fidelity for n in (2, 5, 10, 20, 50)]
    assert np.all(np.diff(f) > 0)


def test_symmetric_input_is_flagged():
    a = amps(1, 0, 1, 0)
    r = run_swap(ProtocolParams(0, 2, 1.0, 1.0), a, ENC2).subsystems[0]
    assert r.decomposition.swap_input_degenerate
    # SWAP and identity merge: 0.75 = 1 - 0.25 in units of the SWAP coefficient
    assert r.decomposition.alpha[0] == pytest.approx(0.75)


def test_zero_coupling_leaves_input():
    a = amps(0.6, 0.8, 1, 0)
    r = run_swap(ProtocolParams(0, 2, 0.0, 0.0), a, ENC2).subsystems[0]
    swapped = amps(1, 0, 0.6, 0.8)
    # |<SWAP psi|psi>|^2 for product states
    overlap = abs(np.vdot(swapped.c, a.c) * np.vdot(swapped.t, a.t)) ** 2
    assert r.fidelity == pytest.approx(overlap, abs=1e-12)


def test_parallel_k0_factorizes(rng):
    a = [QubitAmplitudes.random(rng) for _ in range(2)]
    enc = build_encoding_k0(4)
    params = ProtocolParams(0, 4, 0.4, 3.0)
    res = run_parallel(params, a, enc)
    single = [run_swap(ProtocolParams(0, 2, 0.4, 3.0), x, ENC2).subsystems[0] for x in a]
    for s, t in zip(res.subsystems, single):
        assert s.fidelity == pytest.approx(t.fidelity, abs=1e-12)
        assert s.cross_leakage <= 1e-12
    assert res.pre_normalization_norm == pytest.approx(single[0].norm * single[1].norm)
    # full product state over all modes equals the product of subsystem states
    inv = invert(protocol_map(params, enc))
    full_forms = []
    for j, x in enumerate(a):
        v = enc.vectors[j]
        for g in (x.c0 * v[0] + x.c1 * v[1], x.t0 * v[2] + x.t1 * v[3]):
            full_forms.append(substitute(OperatorLinearForm.creation(g), inv))
    full = evaluate_on_vacuum(full_forms)
    assert full.norm() == pytest.approx(res.pre_normalization_norm, rel=1e-12)
    with pytest.raises(ConfigError):
        run_parallel(params, a[:1], enc)


def test_k1_parallel_per_subsystem_constants(rng):
    g = BeamGeometry(zs_over_zr=4.0)
    base = geometric_constants(1, 4, g)
    eta2 = 20 / base.min()
    scen = Scenario(regime=1, max_oam=4, nu1=tuple(2 / (eta2 * base)), nu2=tuple(eta2 * base), geometry=g,
                    inputs=[QubitAmplitudes.random(rng) for _ in range(2)])
    res = run_scenario(scen)
    assert res.swap_times_xx
    for s in res.subsystems:
        assert s.projection_distance <= 1e-9
        assert s.cross_leakage <= 1e-12


def test_step_coupling_reproduces_geometric_H():
    g = BeamGeometry(zs_over_zr=2.0)
    params, enc = resolve(Scenario(regime=1, max_oam=6, eta1=1.3, eta2=0.7, geometry=g))
    H = couplings_for(SystemConfig(1, 6, 1.3, g)).matrix
    assert np.abs(step_coupling(params, enc, 1).matrix - H).max() <= 1e-12


def test_params_validation():
    with pytest.raises(ConfigError):
        ProtocolParams(0, 2, -1, 1)
    with pytest.raises(ConfigError):
        ProtocolParams(0, 2, 1, 1, theta1=7.0)
    with pytest.raises(ConfigError):
        ProtocolParams(1, 4, (1, 2, 3), 1)
    assert ProtocolParams(0, 4, (1, 2), 1).constants(1).tolist() == [1, 1, 2, 2]
    with pytest.raises(ConsistencyError):
        run_swap(ProtocolParams(1, 2, 1, 1), amps(1, 0, 1, 0), ENC2)


def test_scenario_and_sweep(rng):
    a = (QubitAmplitudes.random(rng),)
    with pytest.raises(ConfigError):
        Scenario(nu1=1.0, eta1=1.0, eta2=1.0)
    with pytest.raises(ConfigError):
        Scenario(nu1=1.0)
    base = Scenario(regime=0, max_oam=2, nu1=1.0, nu2=2.0, inputs=a)
    rows = sweep(base, "nu2", [2, 5, 10, 20, 50])
    fids = [r.subsystems[0].fidelity for _, r in rows]
    assert [v for v, _ in rows] == [2, 5, 10, 20, 50]
    assert np.all(np.diff(fids) > 0)
    assert len(sweep(base, "nu2", [20])) == 1
    with pytest.raises(ConfigError):
        sweep(base, "nu2", [])
    with pytest.raises(ConfigError):
        sweep(base, "eta", [1.0])
    strong = Scenario(regime=0, max_oam=2, eta1=0.1, eta2=20, inputs=a)
    zs_rows = sweep(strong, "zs_over_zr", [0.0, 50.0])
    assert zs_rows[1][1].params.nu2[0] > zs_rows[0][1].params.nu2[0]
