"""Interaction-picture time evolution of the resonant two-mode JC model.

Only quasi-mode 1 couples to the atom, so in the quasi-mode Fock basis
``||n1, n2>>`` (``n1 = j + m``) the propagator ``U(tau) = exp(-i tau H_int / hbar g)``
acts branch by branch as

    U_ee ||n1,n2>> = cos(tau sqrt(n1+1)) ||n1,n2>>
    U_ge ||n1,n2>> = -i sin(tau sqrt(n1+1)) ||n1+1,n2>>
    U_eg ||n1,n2>> = -i sin(tau sqrt(n1)) ||n1-1,n2>>
    U_gg ||n1,n2>> = cos(tau sqrt(n1)) ||n1,n2>>

with ``U = U_ee |e><e| + U_ge |g><e| + U_eg |e><g| + U_gg |g><g|``.
The free Hamiltonian commutes with ``H_int`` and is left out.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_amplitude_rows, check_tau, twice
from .fock import (
    AtomFieldState,
    Basis,
    FieldDensityOperator,
    TwoModeState,
    check_atom,
    n_states,
    state_index,
    total_photons,
)
from .quasimode import build_transform, change_basis
from .wigner import CouplingConfig, big_D_block

BRANCHES = ("ee", "ge", "eg", "gg")

COLLAPSE_MIN_PROBABILITY = 1e-14


def _quasi_occupations(cutoff):
    totals = total_photons(cutoff)
    n2 = np.concatenate([np.arange(total + 1) for total in range(cutoff + 1)])
    return totals - n2, n2


def apply_branch_quasimode(branch, state, tau):
    """Apply one atomic branch ``U_ab(tau)`` to a quasi-mode field state.

    The result is unnormalized and keeps the input cutoff; ``ge`` raises if the
    state has amplitude in the top photon sector.
    """
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}, got {branch!r}")
    if state.basis is not Basis.QUASIMODE:
        raise ValueError("apply_branch_quasimode expects a quasi-mode state")
    tau = check_tau(tau)
    n1, n2 = _quasi_occupations(state.cutoff)
    amps = state.amplitudes

    if branch == "ee":
        return TwoModeState(state.cutoff, np.cos(tau * np.sqrt(n1 + 1)) * amps, Basis.QUASIMODE)
    if branch == "gg":
        return TwoModeState(state.cutoff, np.cos(tau * np.sqrt(n1)) * amps, Basis.QUASIMODE)

    out = np.zeros_like(amps)
    if branch == "ge":
        if np.any(state.block(state.cutoff) != 0):
            raise ValueError(
                f"U_ge would create a photon above cutoff {state.cutoff}; "
                "enlarge the cutoff before evolving"
            )
        src = np.nonzero(n1 + n2 < state.cutoff)[0]
        dst = state_index(n1[src] + 1, n2[src])
        out[dst] = -1j * np.sin(tau * np.sqrt(n1[src] + 1)) * amps[src]
    else:
        src = np.nonzero(n1 > 0)[0]
        dst = state_index(n1[src] - 1, n2[src])
        out[dst] = -1j * np.sin(tau * np.sqrt(n1[src])) * amps[src]
    return TwoModeState(state.cutoff, out, Basis.QUASIMODE)


@dataclass(frozen=True, eq=False)
class BranchMatrices:
    """Fock-basis matrices of the four branches restricted to one ``j`` block.

    ``C``, ``C_bar``: (2j+1, 2j+1); ``S``: (2j+2, 2j+1); ``S_bar``: (2j, 2j+1).
    Rows and columns run over descending ``m``.
    """

    two_j: int
    tau: float
    C: np.ndarray
    S: np.ndarray
    S_bar: np.ndarray
    C_bar: np.ndarray

    @property
    def j(self):
        return Fraction(self.two_j, 2)


def _d_block(t, two_j):
    if two_j < len(t.blocks_):
        return t.blocks_[two_j]
    return big_D_block(two_j, t.couplings_.euler)


def branch_matrices(j, tau, t):
    """``C^j``, ``S^j``, ``S_bar^j`` and ``C_bar^j`` as sums over quasi-mode ``nu``.

    For example ``C^j_{m'm} = sum_nu cos(tau sqrt(j+nu+1)) D_{m'nu} conj(D_{m nu})``.
    """
    two_j = twice(j, "j")
    tau = check_tau(tau)
    check_is_fitted(t, "blocks_")
    if not 0 <= two_j <= t.cutoff:
        raise ValueError(f"j = {two_j}/2 exceeds the transform cutoff {t.cutoff}/2")
    D = _d_block(t, two_j)
    D_dag = D.conj().T
    # column k of D <-> nu = j - k, so j + nu = 2j - k = quasi-mode-1 occupation
    occ = two_j - np.arange(two_j + 1)
    cos_up, sin_up = np.cos(tau * np.sqrt(occ + 1)), np.sin(tau * np.sqrt(occ + 1))
    cos_0, sin_0 = np.cos(tau * np.sqrt(occ)), np.sin(tau * np.sqrt(occ))

    C = (D * cos_up) @ D_dag
    C_bar = (D * cos_0) @ D_dag
    # nu + 1/2 in D^{(j+1/2)} shares the column index k with nu in D^{(j)}
    D_up = _d_block(t, two_j + 1)
    S = -1j * (D_up[:, : two_j + 1] * sin_up) @ D_dag
    if two_j == 0:
        S_bar = np.zeros((0, 1), dtype=complex)
    else:
        # nu = -j has sin(0) = 0 and no partner in D^{(j-1/2)}
        D_down = _d_block(t, two_j - 1)
        S_bar = -1j * (D_down * sin_0[:two_j]) @ D_dag[:two_j, :]
    return BranchMatrices(two_j, tau, C, S, S_bar, C_bar)


def _check_headroom(state):
    if np.any(state.excited.block(state.cutoff) != 0):
        raise ValueError(
            f"excited part occupies the top sector N={state.cutoff}; "
            "evolution needs one photon of cutoff headroom"
        )


def evolve(state, tau, t):
    """Propagate a joint atom-field state by ``U(tau)``.

    The result is returned in the basis of the input.
    """
    tau = check_tau(tau)
    check_is_fitted(t, "blocks_")
    if state.cutoff > t.cutoff:
        raise ValueError(f"transform cutoff {t.cutoff} is below the state cutoff {state.cutoff}")
    _check_headroom(state)
    exc = change_basis(state.excited, t, Basis.QUASIMODE)
    gnd = change_basis(state.ground, t, Basis.QUASIMODE)

    new_exc = apply_branch_quasimode("ee", exc, tau).amplitudes + apply_branch_quasimode("eg", gnd, tau).amplitudes
    new_gnd = apply_branch_quasimode("ge", exc, tau).amplitudes + apply_branch_quasimode("gg", gnd, tau).amplitudes

    out_exc = TwoModeState(state.cutoff, new_exc, Basis.QUASIMODE)
    out_gnd = TwoModeState(state.cutoff, new_gnd, Basis.QUASIMODE)
    return AtomFieldState(change_basis(out_exc, t, state.basis), change_basis(out_gnd, t, state.basis))


def reduced_field_density(state):
    """Trace out the atom: ``|excited><excited| + |ground><ground|``."""
    e, g = state.excited.amplitudes, state.ground.amplitudes
    rho = np.outer(e, e.conj()) + np.outer(g, g.conj())
    return FieldDensityOperator(state.cutoff, rho, state.basis)


def fix_phase(amplitudes):
    """Rotate a vector so its largest-magnitude entry is real and positive."""
    amplitudes = np.asarray(amplitudes, dtype=complex)
    lead = amplitudes[np.argmax(np.abs(amplitudes))]
    if lead == 0:
        return amplitudes
    return amplitudes * (abs(lead) / lead)


def atom_detection_collapse(state, outcome):
    """Condition on detecting the atom in ``outcome``.

    Returns ``(field_state, probability)``. The free global phase is fixed by
    making the largest amplitude real and positive.
    """
    part = state.part(check_atom(outcome))
    prob = part.norm() ** 2
    if prob < COLLAPSE_MIN_PROBABILITY:
        raise ValueError(f"outcome {outcome!r} has probability {prob:.3g}; cannot condition on it")
    amps = fix_phase(part.amplitudes / np.sqrt(prob))
    return TwoModeState(part.cutoff, amps, part.basis), float(prob)


class JaynesCummingsEvolver(TransformerMixin, BaseEstimator):
    """Estimator-style wrapper around :func:`evolve`.

    Rows of ``X`` are stacked mode-basis joint amplitudes ``[excited; ground]``
    of length ``2 * n_states(cutoff)``; ``transform`` returns them propagated by
    ``tau`` and ``inverse_transform`` propagates by ``-tau``.
    """

    def __init__(self, g1=1.0, g2=1.0, cutoff=1, tau=0.0):
        self.g1 = g1
        self.g2 = g2
        self.cutoff = cutoff
        self.tau = tau

    def fit(self, X=None, y=None):
        check_tau(self.tau)
        self.transform_ = build_transform(CouplingConfig(self.g1, self.g2), self.cutoff)
        self.n_features_in_ = 2 * n_states(self.cutoff)
        return self

    def _run(self, X, tau):
        check_is_fitted(self, "transform_")
        X = check_amplitude_rows(X, self.n_features_in_)
        rows = [
            evolve(AtomFieldState.from_vector(row, self.cutoff), tau, self.transform_).to_vector()
            for row in X
        ]
        return np.array(rows)

    def transform(self, X):
        return self._run(X, self.tau)

    def inverse_transform(self, X):
        return self._run(X, -self.tau)

    def evolve_state(self, state):
        check_is_fitted(self, "transform_")
        return evolve(state, self.tau, self.transform_)
