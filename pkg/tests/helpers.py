"""Independent reference computations used only by the tests."""

import math
from itertools import product

import numpy as np

from twomode_jc.fock import AtomFieldState, TwoModeState, n_states
from twomode_jc.wigner import CouplingConfig


def random_couplings(rng):
    g1, g2 = rng.normal(size=2) + 1j * rng.normal(size=2)
    return CouplingConfig(complex(g1), complex(g2))


def random_field(rng, cutoff, max_photons=None, basis=None):
    max_photons = cutoff if max_photons is None else max_photons
    vec = np.zeros(n_states(cutoff), dtype=complex)
    k = n_states(max_photons)
    vec[:k] = rng.normal(size=k) + 1j * rng.normal(size=k)
    state = TwoModeState(cutoff, vec / np.linalg.norm(vec))
    return state if basis is None else TwoModeState(cutoff, state.amplitudes, basis)


def random_joint(rng, cutoff, max_photons):
    vec = np.zeros(2 * n_states(cutoff), dtype=complex)
    k = n_states(max_photons)
    dim = n_states(cutoff)
    for start in (0, dim):
        vec[start : start + k] = rng.normal(size=k) + 1j * rng.normal(size=k)
    return AtomFieldState.from_vector(vec / np.linalg.norm(vec), cutoff)


def enumerate_outcome_weights(tau_list):
    """Sum sin^2/cos^2 products over all 2^n detection records, grouped by ground count."""
    p = np.zeros(len(tau_list) + 1)
    for record in product("eg", repeat=len(tau_list)):
        weight, photons = 1.0, 0
        for tau, outcome in zip(tau_list, record):
            arg = tau * math.sqrt(photons + 1)
            if outcome == "g":
                weight *= math.sin(arg) ** 2
                photons += 1
            else:
                weight *= math.cos(arg) ** 2
        p[photons] += weight
    return p


def small_d_by_exponential(two_j, theta):
    """``exp(-i theta J_y)`` from the spin-j ladder operators (rows by descending m)."""
    from scipy.linalg import expm

    m = two_j / 2 - np.arange(two_j + 1)
    j = two_j / 2
    jp = np.zeros((two_j + 1, two_j + 1))
    for k in range(1, two_j + 1):
        # J+ |j, m> = sqrt(j(j+1) - m(m+1)) |j, m+1>
        jp[k - 1, k] = math.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    jy = (jp - jp.T) / 2j
    return expm(-1j * theta * jy).real
