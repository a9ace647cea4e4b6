"""Change of basis between mode and quasi-mode Fock states.

For each total photon number ``N = 2j`` the quasi-mode states are

    ||j, m>> = sum_{m'} D^{(j)}_{m' m} |j, m'>

so a quasi-mode amplitude vector ``b~`` maps to mode amplitudes ``D @ b~`` and
back with ``D^dag``. Blocks with different ``N`` never mix.
"""

import numpy as np
from scipy.linalg import block_diag
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_amplitude_rows, check_cutoff
from .fock import Basis, FieldDensityOperator, TwoModeState, block_slice, n_states
from .wigner import CouplingConfig, big_D_block


class QuasiModeTransform(TransformerMixin, BaseEstimator):
    """Block-diagonal SU(2) transform for a pair of couplings.

    ``transform`` maps rows of mode-basis amplitudes to the quasi-mode basis and
    ``inverse_transform`` goes back. Fitting ignores ``X``; it only materializes
    the ``D^{(j)}`` blocks for ``j = 0, 1/2, ..., cutoff/2``.

    Parameters
    ----------
    g1, g2 : complex
        Coupling constants of mode 1 and mode 2. Only their ratio matters here.
    cutoff : int
        Maximum total photon number.

    Attributes
    ----------
    couplings_ : CouplingConfig
    blocks_ : tuple of ndarray
        ``blocks_[N]`` is ``D^{(N/2)}`` with rows/cols ordered by descending m.
    """

    def __init__(self, g1=1.0, g2=1.0, cutoff=1):
        self.g1 = g1
        self.g2 = g2
        self.cutoff = cutoff

    def fit(self, X=None, y=None):
        cutoff = check_cutoff(self.cutoff)
        self.couplings_ = CouplingConfig(self.g1, self.g2)
        euler = self.couplings_.euler
        blocks = []
        for two_j in range(cutoff + 1):
            block = big_D_block(two_j, euler)
            block.setflags(write=False)
            blocks.append(block)
        self.blocks_ = tuple(blocks)
        self.n_features_in_ = n_states(cutoff)
        return self

    def _apply(self, X, adjoint):
        check_is_fitted(self, "blocks_")
        X = check_amplitude_rows(X, self.n_features_in_)
        out = np.empty_like(X)
        for total, block in enumerate(self.blocks_):
            sl = block_slice(total)
            mat = block.conj().T if adjoint else block
            out[:, sl] = X[:, sl] @ mat.T
        return out

    def transform(self, X):
        """Mode-basis rows to quasi-mode-basis rows."""
        return self._apply(X, adjoint=True)

    def inverse_transform(self, X):
        """Quasi-mode-basis rows to mode-basis rows."""
        return self._apply(X, adjoint=False)

    def to_mode_matrix(self):
        """Dense matrix ``T`` with ``mode = T @ quasi``."""
        check_is_fitted(self, "blocks_")
        return block_diag(*self.blocks_)

    def block(self, two_j):
        check_is_fitted(self, "blocks_")
        if not 0 <= two_j < len(self.blocks_):
            raise ValueError(f"j = {two_j}/2 is outside this transform (cutoff {self.cutoff})")
        return self.blocks_[two_j]


def build_transform(couplings, cutoff):
    """Fitted :class:`QuasiModeTransform` for ``couplings`` up to ``cutoff`` photons."""
    return QuasiModeTransform(g1=couplings.g1, g2=couplings.g2, cutoff=cutoff).fit()


def _check_covers(state_cutoff, t):
    check_is_fitted(t, "blocks_")
    if state_cutoff > t.cutoff:
        raise ValueError(f"transform cutoff {t.cutoff} is below the state cutoff {state_cutoff}")


def to_mode_basis(state, t):
    if state.basis is not Basis.QUASIMODE:
        raise ValueError("to_mode_basis expects a quasi-mode state")
    _check_covers(state.cutoff, t)
    out = np.empty(state.dim, dtype=complex)
    for total in range(state.cutoff + 1):
        out[block_slice(total)] = t.blocks_[total] @ state.block(total)
    return TwoModeState(state.cutoff, out, Basis.MODE)


def to_quasimode_basis(state, t):
    if state.basis is not Basis.MODE:
        raise ValueError("to_quasimode_basis expects a mode-basis state")
    _check_covers(state.cutoff, t)
    out = np.empty(state.dim, dtype=complex)
    for total in range(state.cutoff + 1):
        out[block_slice(total)] = t.blocks_[total].conj().T @ state.block(total)
    return TwoModeState(state.cutoff, out, Basis.QUASIMODE)


def change_basis(state, t, target):
    """Return ``state`` expressed in ``target``, transforming only if needed."""
    if state.basis is target:
        return state
    return to_mode_basis(state, t) if target is Basis.MODE else to_quasimode_basis(state, t)


def density_to_basis(rho, t, target):
    """Rotate a field density operator into ``target`` (``rho -> T rho T^dag``)."""
    if rho.basis is target:
        return rho
    _check_covers(rho.cutoff, t)
    mat = block_diag(*t.blocks_[: rho.cutoff + 1])
    if target is Basis.QUASIMODE:
        mat = mat.conj().T
    return FieldDensityOperator(rho.cutoff, mat @ rho.matrix @ mat.conj().T, target)
