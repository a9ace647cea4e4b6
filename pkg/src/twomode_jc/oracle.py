"""Brute-force reference: exponentiate the truncated interaction Hamiltonian.

Works directly in the physical mode basis with no quasi-mode transform, so it
shares nothing with :mod:`twomode_jc.evolution` beyond the state containers.
The joint space is ordered ``[|e> (x) field; |g> (x) field]``, matching
:meth:`AtomFieldState.to_vector`.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ._validation import check_cutoff, check_tau
from .evolution import evolve
from .fock import AtomFieldState, Basis, fock_labels, make_basis_state, n_states, state_index, total_photons
from .quasimode import build_transform
from .wigner import CouplingConfig

CROSSCHECK_TOL = 1e-9


def _annihilation_ops(cutoff):
    dim = n_states(cutoff)
    a1 = np.zeros((dim, dim))
    a2 = np.zeros((dim, dim))
    for label in fock_labels(cutoff):
        col = state_index(label.n1, label.n2)
        if label.n1:
            a1[state_index(label.n1 - 1, label.n2), col] = np.sqrt(label.n1)
        if label.n2:
            a2[state_index(label.n1, label.n2 - 1), col] = np.sqrt(label.n2)
    return a1, a2


@dataclass(frozen=True, eq=False)
class TruncatedHamiltonian:
    """Dimensionless ``H / (hbar g)`` on ``{e, g} x {n1 + n2 <= cutoff}``."""

    cutoff: int
    matrix: np.ndarray
    couplings: CouplingConfig = field(repr=False)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @cached_property
    def eigensystem(self):
        return np.linalg.eigh(self.matrix)

    def excitation_numbers(self):
        """Atomic excitation plus photon number for every basis state."""
        photons = total_photons(self.cutoff)
        return np.concatenate([photons + 1, photons])

    def propagator(self, tau):
        evals, evecs = self.eigensystem
        return (evecs * np.exp(-1j * evals * tau)) @ evecs.conj().T

    def energy(self, state):
        vec = state.to_vector()
        return float(np.real(vec.conj() @ self.matrix @ vec))


def build_hamiltonian(couplings, cutoff, free_frequency=None):
    """Interaction Hamiltonian ``sigma+ (gamma1 a1 + gamma2 a2) + h.c.``.

    With ``free_frequency`` (``omega / g``) the resonant free term
    ``omega ((sigma_z + 1)/2 + n1 + n2)`` is added as well.
    """
    cutoff = check_cutoff(cutoff)
    if cutoff < 1:
        raise ValueError("the oracle needs cutoff >= 1")
    a1, a2 = _annihilation_ops(cutoff)
    lower = couplings.gamma1 * a1 + couplings.gamma2 * a2
    dim = n_states(cutoff)
    H = np.zeros((2 * dim, 2 * dim), dtype=complex)
    H[:dim, dim:] = lower
    H[dim:, :dim] = lower.conj().T
    if free_frequency is not None:
        photons = total_photons(cutoff)
        H += free_frequency * np.diag(np.concatenate([photons + 1.0, photons]))
    return TruncatedHamiltonian(cutoff, H, couplings)


def evolve_exact(state, tau, H):
    """``exp(-i H tau) state`` by Hermitian eigendecomposition."""
    tau = check_tau(tau)
    if state.basis is not Basis.MODE:
        raise ValueError("the oracle works in the mode basis")
    if state.cutoff != H.cutoff:
        state = state.with_cutoff(H.cutoff)
    vec = H.propagator(tau) @ state.to_vector()
    return AtomFieldState.from_vector(vec, H.cutoff)


def _excited_support(state):
    return state.excited.max_photons()


def crosscheck(state, tau, couplings, cutoff):
    """Max amplitude deviation between the algebraic and brute-force paths.

    The algebraic path always gets enough headroom to be exact; the oracle runs
    at ``cutoff``. Agreement is expected to ~1e-12 once the state's excitation
    number stays within ``cutoff``; a smaller cutoff is a truncation artefact.
    """
    if state.basis is not Basis.MODE:
        raise ValueError("crosscheck expects a mode-basis state")
    alg_cutoff = max(cutoff, state.cutoff, _excited_support(state) + 1)
    alg = evolve(state.with_cutoff(alg_cutoff), tau, build_transform(couplings, alg_cutoff))
    exact = evolve_exact(state.with_cutoff(cutoff), tau, build_hamiltonian(couplings, cutoff))
    a = alg.to_vector()
    b = exact.with_cutoff(alg_cutoff).to_vector()
    overlap = np.vdot(b, a)
    if abs(overlap) > 0:
        b = b * (overlap / abs(overlap))
    return float(np.max(np.abs(a - b)))


@dataclass
class CrosscheckReport:
    deviations: list
    draws: list
    tolerance: float = CROSSCHECK_TOL

    @property
    def max_deviation(self):
        return max(self.deviations)

    @property
    def worst_draw(self):
        return self.draws[int(np.argmax(self.deviations))]

    @property
    def passed(self):
        return self.max_deviation <= self.tolerance


def random_couplings(rng):
    g1, g2 = rng.normal(size=2) + 1j * rng.normal(size=2)
    return CouplingConfig(complex(g1), complex(g2))


def crosscheck_batch(n_draws, seed=0, cutoff=8, max_photons=4, tau_max=2 * np.pi):
    """Seeded batch of :func:`crosscheck` runs over random couplings and times.

    Initial states cycle through ``|e;0,0>``, ``|g;n1,n2>`` and ``|e;n1,n2>``
    with ``n1 + n2 <= min(max_photons, cutoff)``. States reaching the cutoff
    leave the oracle without headroom, which makes a small ``cutoff`` a
    negative control.
    """
    if n_draws < 1:
        raise ValueError("at least one draw is required")
    rng = np.random.default_rng(seed)
    labels = fock_labels(min(max_photons, cutoff))
    deviations, draws = [], []
    for i in range(n_draws):
        couplings = random_couplings(rng)
        tau = float(rng.uniform(0.0, tau_max))
        kind = i % 3
        label = labels[0] if kind == 0 else labels[rng.integers(len(labels))]
        atom = "g" if kind == 1 else "e"
        field = make_basis_state(label, cutoff)
        state = AtomFieldState.product(atom, field)
        deviations.append(crosscheck(state, tau, couplings, cutoff))
        draws.append(
            {
                "draw": i,
                "atom": atom,
                "n1": label.n1,
                "n2": label.n2,
                "tau": tau,
                "g1": couplings.g1,
                "g2": couplings.g2,
            }
        )
    return CrosscheckReport(deviations, draws)
