import math

import numpy as np
import pytest
from helpers import random_couplings, random_field, random_joint
from hypothesis import given, settings
from hypothesis import strategies as st

from twomode_jc.evolution import (
    JaynesCummingsEvolver,
    apply_branch_quasimode,
    atom_detection_collapse,
    branch_matrices,
    evolve,
    reduced_field_density,
)
from twomode_jc.fock import (
    AtomFieldState,
    Basis,
    TwoModeState,
    block_slice,
    distance_up_to_phase,
    make_basis_state,
    total_photons,
)
from twomode_jc.quasimode import build_transform, to_mode_basis, to_quasimode_basis
from twomode_jc.wigner import CouplingConfig

SQRT_HALF = 1 / math.sqrt(2)


# -- quasi-mode branches -----------------------------------------------------


def test_ee_on_vacuum():
    vac = TwoModeState.vacuum(1, Basis.QUASIMODE)
    out = apply_branch_quasimode("ee", vac, 0.9)
    assert out.amplitude(0, 0) == pytest.approx(math.cos(0.9))


def test_gg_and_eg_on_vacuum():
    vac = TwoModeState.vacuum(1, Basis.QUASIMODE)
    assert apply_branch_quasimode("gg", vac, 0.9).amplitude(0, 0) == 1
    assert apply_branch_quasimode("eg", vac, 0.9).norm() == 0


def test_ge_creates_quasi_photon_in_mode_one():
    state = make_basis_state((1, 2), 4, Basis.QUASIMODE)
    out = apply_branch_quasimode("ge", state, 0.4)
    assert out.amplitude(2, 2) == pytest.approx(-1j * math.sin(0.4 * math.sqrt(2)))
    assert out.norm() == pytest.approx(abs(math.sin(0.4 * math.sqrt(2))))


def test_eg_annihilates_quasi_photon():
    state = make_basis_state((3, 1), 4, Basis.QUASIMODE)
    out = apply_branch_quasimode("eg", state, 0.4)
    assert out.amplitude(2, 1) == pytest.approx(-1j * math.sin(0.4 * math.sqrt(3)))
    # quasi-mode 2 photons alone are inert
    assert apply_branch_quasimode("eg", make_basis_state((0, 2), 4, Basis.QUASIMODE), 0.4).norm() == 0


def test_ge_overflow():
    with pytest.raises(ValueError, match="cutoff"):
        apply_branch_quasimode("ge", make_basis_state((1, 0), 1, Basis.QUASIMODE), 0.3)


def test_branch_rejects_mode_basis():
    with pytest.raises(ValueError):
        apply_branch_quasimode("ee", TwoModeState.vacuum(1), 0.3)


# -- coefficient matrices ----------------------------------------------------


def test_branch_matrices_at_zero_time(rng):
    t = build_transform(random_couplings(rng), 5)
    for two_j in range(5):
        bm = branch_matrices(two_j / 2, 0.0, t)
        np.testing.assert_allclose(bm.C, np.eye(two_j + 1), atol=1e-14)
        np.testing.assert_allclose(bm.C_bar, np.eye(two_j + 1), atol=1e-14)
        assert np.abs(bm.S).max() == 0 and (bm.S_bar.size == 0 or np.abs(bm.S_bar).max() == 0)
        assert bm.S.shape == (two_j + 2, two_j + 1)
        assert bm.S_bar.shape == (two_j, two_j + 1)


def test_j_zero_matrices(rng):
    couplings = random_couplings(rng)
    t = build_transform(couplings, 1)
    tau = 1.234
    bm = branch_matrices(0, tau, t)
    np.testing.assert_allclose(bm.C, [[math.cos(tau)]])
    np.testing.assert_allclose(bm.S[:, 0], -1j * math.sin(tau) * t.block(1)[:, 0], atol=1e-15)
    # same column through the quasi-mode path
    joint = AtomFieldState.product("e", TwoModeState.vacuum(1))
    ground = evolve(joint, tau, t).ground
    np.testing.assert_allclose(bm.S[:, 0], ground.block(1), atol=1e-14)


def test_branch_matrix_unitarity(rng):
    for _ in range(20):
        t = build_transform(random_couplings(rng), 9)
        tau = rng.uniform(0, 2 * math.pi)
        two_j = int(rng.integers(0, 9))
        bm = branch_matrices(two_j / 2, tau, t)
        excited = (np.abs(bm.C) ** 2).sum(axis=0) + (np.abs(bm.S) ** 2).sum(axis=0)
        ground = (np.abs(bm.C_bar) ** 2).sum(axis=0) + (np.abs(bm.S_bar) ** 2).sum(axis=0)
        np.testing.assert_allclose(excited, 1, atol=1e-10)
        np.testing.assert_allclose(ground, 1, atol=1e-10)


def test_fock_action_matches_quasimode_path(rng):
    """Coefficient matrices equal D . (quasi-mode branch) . D^dag on Fock vectors."""
    cutoff = 7
    for _ in range(5):
        t = build_transform(random_couplings(rng), cutoff)
        tau = rng.uniform(-3, 3)
        for two_j in range(0, 7):
            bm = branch_matrices(two_j / 2, tau, t)
            for k in range(two_j + 1):
                fock = make_basis_state((two_j - k, k), cutoff)
                quasi = to_quasimode_basis(fock, t)
                got = {
                    br: to_mode_basis(apply_branch_quasimode(br, quasi, tau), t) for br in ("ee", "ge", "eg", "gg")
                }
                np.testing.assert_allclose(got["ee"].block(two_j), bm.C[:, k], atol=1e-10)
                np.testing.assert_allclose(got["gg"].block(two_j), bm.C_bar[:, k], atol=1e-10)
                np.testing.assert_allclose(got["ge"].block(two_j + 1), bm.S[:, k], atol=1e-10)
                if two_j:
                    np.testing.assert_allclose(got["eg"].block(two_j - 1), bm.S_bar[:, k], atol=1e-10)


# -- full evolution ----------------------------------------------------------


def test_vacuum_excited_quarter_period(equal_couplings):
    t = build_transform(equal_couplings, 2)
    out = evolve(AtomFieldState.product("e", TwoModeState.vacuum(2)), math.pi / 2, t)
    assert out.excited.norm() < 1e-15
    np.testing.assert_allclose(out.ground.block(1), [-1j * SQRT_HALF, -1j * SQRT_HALF], atol=1e-15)


def test_zero_time_is_identity(rng):
    t = build_transform(random_couplings(rng), 5)
    psi = random_joint(rng, 5, 4)
    np.testing.assert_allclose(evolve(psi, 0.0, t).to_vector(), psi.to_vector(), atol=1e-14)


@pytest.mark.parametrize("tau", [0.3, 2.0, 17.0])
def test_ground_vacuum_is_stationary(tau, rng):
    t = build_transform(random_couplings(rng), 2)
    psi = AtomFieldState.product("g", TwoModeState.vacuum(2))
    np.testing.assert_allclose(evolve(psi, tau, t).to_vector(), psi.to_vector(), atol=1e-15)


def test_headroom_required():
    t = build_transform(CouplingConfig(1, 1), 2)
    with pytest.raises(ValueError, match="headroom"):
        evolve(AtomFieldState.product("e", make_basis_state((1, 1), 2)), 0.3, t)
    # ground atoms only absorb, so the top sector is fine
    evolve(AtomFieldState.product("g", make_basis_state((1, 1), 2)), 0.3, t)


def test_evolve_keeps_input_basis(rng):
    couplings = random_couplings(rng)
    t = build_transform(couplings, 3)
    psi_mode = random_joint(rng, 3, 2)
    quasi = AtomFieldState(to_quasimode_basis(psi_mode.excited, t), to_quasimode_basis(psi_mode.ground, t))
    out_q = evolve(quasi, 0.8, t)
    out_m = evolve(psi_mode, 0.8, t)
    assert out_q.basis is Basis.QUASIMODE
    np.testing.assert_allclose(to_mode_basis(out_q.ground, t).amplitudes, out_m.ground.amplitudes, atol=1e-13)


def test_unitarity(rng):
    for _ in range(30):
        t = build_transform(random_couplings(rng), 6)
        psi = random_joint(rng, 6, 5)
        assert abs(evolve(psi, rng.uniform(0, 4 * math.pi), t).norm() - 1) < 1e-10


def _excitation_distribution(state):
    photons = total_photons(state.cutoff)
    dist = np.zeros(state.cutoff + 2)
    np.add.at(dist, photons + 1, np.abs(state.excited.amplitudes) ** 2)
    np.add.at(dist, photons, np.abs(state.ground.amplitudes) ** 2)
    return dist


def test_excitation_number_conserved(rng):
    for _ in range(10):
        t = build_transform(random_couplings(rng), 6)
        psi = random_joint(rng, 6, 5)
        out = evolve(psi, rng.uniform(0, 10), t)
        np.testing.assert_allclose(_excitation_distribution(out), _excitation_distribution(psi), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    st.floats(-6, 6),
    st.floats(-6, 6),
    st.integers(0, 2**32 - 1),
)
def test_composition(tau1, tau2, seed):
    rng = np.random.default_rng(seed)
    t = build_transform(random_couplings(rng), 6)
    psi = random_joint(rng, 6, 4)
    once = evolve(psi, tau1 + tau2, t)
    twice = evolve(evolve(psi, tau1, t), tau2, t)
    np.testing.assert_allclose(once.to_vector(), twice.to_vector(), atol=1e-9)


def test_reversibility(rng):
    for _ in range(10):
        t = build_transform(random_couplings(rng), 6)
        psi = random_joint(rng, 6, 4)
        tau = rng.uniform(0, 8)
        back = evolve(evolve(psi, tau, t).with_cutoff(6), -tau, t)
        np.testing.assert_allclose(back.to_vector(), psi.to_vector(), atol=1e-9)


# -- trace-out and detection -------------------------------------------------


def test_reduced_density_of_product_is_pure(rng):
    psi = random_field(rng, 3)
    rho = reduced_field_density(AtomFieldState.product("e", psi))
    np.testing.assert_allclose(rho.matrix, np.outer(psi.amplitudes, psi.amplitudes.conj()), atol=1e-15)


def test_reduced_density_after_first_atom(rng):
    tau = 0.77
    t = build_transform(random_couplings(rng), 1)
    joint = evolve(AtomFieldState.product("e", TwoModeState.vacuum(1)), tau, t)
    rho = reduced_field_density(joint)
    np.testing.assert_allclose(np.sort(rho.eigenvalues())[-2:], sorted([math.cos(tau) ** 2, math.sin(tau) ** 2]), atol=1e-14)


def test_reduced_density_maximally_entangled():
    joint = AtomFieldState(
        make_basis_state((1, 0), 1).scaled(SQRT_HALF), make_basis_state((0, 1), 1).scaled(SQRT_HALF)
    )
    rho = reduced_field_density(joint)
    np.testing.assert_allclose(np.sort(rho.eigenvalues())[-2:], [0.5, 0.5], atol=1e-15)


def test_collapse_after_first_atom(rng):
    tau = 0.6
    t = build_transform(random_couplings(rng), 1)
    joint = evolve(AtomFieldState.product("e", TwoModeState.vacuum(1, Basis.QUASIMODE)), tau, t)
    field, prob = atom_detection_collapse(joint, "g")
    assert prob == pytest.approx(math.sin(tau) ** 2, abs=1e-15)
    assert field.basis is Basis.QUASIMODE
    assert field.amplitude(1, 0) == pytest.approx(1.0, abs=1e-15)


def test_collapse_on_product_state(rng):
    psi = random_field(rng, 3)
    field, prob = atom_detection_collapse(AtomFieldState.product("e", psi), "e")
    assert prob == pytest.approx(1.0, abs=1e-14)
    assert distance_up_to_phase(field, psi) < 1e-14
    lead = field.amplitudes[np.argmax(np.abs(field.amplitudes))]
    assert abs(lead.imag) < 1e-15 and lead.real > 0


def test_collapse_impossible_outcome(rng):
    with pytest.raises(ValueError, match="probability"):
        atom_detection_collapse(AtomFieldState.product("e", random_field(rng, 2)), "g")


# -- estimator ---------------------------------------------------------------


def test_evolver_estimator(rng):
    couplings = random_couplings(rng)
    est = JaynesCummingsEvolver(g1=couplings.g1, g2=couplings.g2, cutoff=4, tau=1.3).fit()
    X = np.stack([random_joint(rng, 4, 3).to_vector() for _ in range(3)])
    Y = est.transform(X)
    assert Y.shape == X.shape
    np.testing.assert_allclose(np.linalg.norm(Y, axis=1), 1, atol=1e-12)
    np.testing.assert_allclose(est.inverse_transform(Y), X, atol=1e-10)
    single = est.evolve_state(AtomFieldState.from_vector(X[0], 4))
    np.testing.assert_allclose(single.to_vector(), Y[0], atol=1e-15)
