"""Entangled N-photon state generation: single-step, conditional, non-conditional.

Every probability has a closed form built from branch matrices, Wigner columns
or the weight recursion, and a ``simulate_*`` counterpart that propagates
states with :func:`~twomode_jc.evolution.evolve`. The tests tie the two together.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_tau_list, twice
from .evolution import atom_detection_collapse, branch_matrices, evolve, reduced_field_density
from .fock import (
    AtomFieldState,
    Basis,
    FieldDensityOperator,
    ModeFockLabel,
    TwoModeState,
    check_atom,
    n_states,
    state_index,
)
from .quasimode import build_transform
from .wigner import big_D_block


@dataclass(frozen=True, eq=False)
class TargetState:
    """``|Psi_N> = sum_k c_k |N-k, k>``.

    ``coefficients[k]`` multiplies ``|N-k, k>``, which is also the Schwinger
    coefficient for ``m = N/2 - k``.
    """

    N: int
    coefficients: np.ndarray

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"target photon number must be positive, got {self.N}")
        coeffs = np.array(self.coefficients, dtype=complex)
        if coeffs.shape != (self.N + 1,):
            raise ValueError(f"expected {self.N + 1} coefficients, got shape {coeffs.shape}")
        if abs(np.linalg.norm(coeffs) - 1.0) > 1e-12:
            raise ValueError("target coefficients must be normalized")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    def to_state(self, cutoff=None):
        cutoff = self.N if cutoff is None else cutoff
        if cutoff < self.N:
            raise ValueError(f"cutoff {cutoff} cannot hold {self.N} photons")
        vec = np.zeros(n_states(cutoff), dtype=complex)
        start = state_index(self.N, 0)
        vec[start : start + self.N + 1] = self.coefficients
        return TwoModeState(cutoff, vec, Basis.MODE)


@dataclass(frozen=True)
class BellTarget:
    """``(|N,0> + sign |0,N>) / sqrt(2)`` with ``sign`` ``'+'`` or ``'-'``."""

    N: int
    sign: str = "+"

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"Bell target needs N >= 1, got {self.N}")
        aliases = {"+": "+", "plus": "+", "-": "-", "minus": "-"}
        if self.sign not in aliases:
            raise ValueError(f"sign must be '+' or '-', got {self.sign!r}")
        object.__setattr__(self, "sign", aliases[self.sign])

    def to_target(self):
        coeffs = np.zeros(self.N + 1, dtype=complex)
        coeffs[0] = 1 / math.sqrt(2)
        coeffs[-1] = (1 if self.sign == "+" else -1) / math.sqrt(2)
        return TargetState(self.N, coeffs)

    def to_state(self, cutoff=None):
        return self.to_target().to_state(cutoff)


def as_target(target):
    if isinstance(target, BellTarget):
        return target.to_target()
    if isinstance(target, TargetState):
        return target
    raise TypeError(f"expected TargetState or BellTarget, got {type(target).__name__}")


@dataclass(frozen=True, eq=False)
class NonConditionalWeights:
    """Weights ``p_j`` of ``||2j, 0>>`` after ``n`` unobserved atoms.

    ``weights[k]`` is ``p_{k/2}``, i.e. the probability that ``k`` of the ``n``
    atoms left in the ground state.
    """

    n: int
    weights: np.ndarray
    tau_list: tuple

    def weight(self, j):
        k = twice(j, "j")
        if not 0 <= k <= self.n:
            return 0.0
        return float(self.weights[k])


# -- single step -------------------------------------------------------------


def contributing_fock_set(N, atom):
    """Initial Fock states that can feed an ``N``-photon target in one step."""
    check_atom(atom)
    if N < 1:
        raise ValueError("N must be at least 1")
    other = N - 1 if atom == "e" else N + 1
    same = {ModeFockLabel(N - k, k) for k in range(N + 1)}
    return same | {ModeFockLabel(other - k, k) for k in range(other + 1)}


def _check_single_step(initial_field, N):
    if initial_field.basis is not Basis.MODE:
        raise ValueError("initial field must be given in the mode basis")
    if initial_field.cutoff < N + 1:
        raise ValueError(f"initial field cutoff {initial_field.cutoff} must be at least N + 1 = {N + 1}")


def single_step_probability(initial_field, atom, target, tau, couplings):
    """Probability of finding ``target`` after one atom passes for time ``tau``.

    Closed form: a C (or C-bar) term from the N-photon sector plus an S (or
    S-bar) term from the sector with one photon fewer (atom ``e``) or more
    (atom ``g``).
    """
    check_atom(atom)
    target = as_target(target)
    N = target.N
    _check_single_step(initial_field, N)
    t = build_transform(couplings, N + 1)
    c_conj = target.coefficients.conj()
    if atom == "e":
        stay = branch_matrices(N / 2, tau, t).C
        move = branch_matrices((N - 1) / 2, tau, t).S
        source = initial_field.block(N - 1)
    else:
        stay = branch_matrices(N / 2, tau, t).C_bar
        move = branch_matrices((N + 1) / 2, tau, t).S_bar
        source = initial_field.block(N + 1)
    first = c_conj @ stay @ initial_field.block(N)
    second = c_conj @ move @ source
    return float(abs(first) ** 2 + abs(second) ** 2)


def simulate_single_step_probability(initial_field, atom, target, tau, couplings):
    """Same quantity as :func:`single_step_probability` via evolve + partial trace."""
    check_atom(atom)
    target = as_target(target)
    _check_single_step(initial_field, target.N)
    cutoff = initial_field.cutoff + 1
    state = AtomFieldState.product(atom, initial_field.with_cutoff(cutoff))
    rho = reduced_field_density(evolve(state, tau, build_transform(couplings, cutoff)))
    return rho.expectation(target.to_state(cutoff))


def bell_probabilities_from_N00(N, tau, couplings):
    """Bell-state probabilities after one excited atom meets ``|N,0>``.

    Returns ``((p_plus, p_minus) for Psi_N, (p_plus, p_minus) for Psi_{N+1})``.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    bm = branch_matrices(N / 2, tau, build_transform(couplings, N + 1))
    c_top, c_bottom = bm.C[0, 0], bm.C[N, 0]
    s_top, s_bottom = bm.S[0, 0], bm.S[N + 1, 0]
    same = (float(0.5 * abs(c_top + c_bottom) ** 2), float(0.5 * abs(c_top - c_bottom) ** 2))
    nxt = (float(0.5 * abs(s_top + s_bottom) ** 2), float(0.5 * abs(s_top - s_bottom) ** 2))
    return same, nxt


# -- conditional -------------------------------------------------------------


def _wigner_column(N, couplings):
    return big_D_block(N, couplings.euler)[:, 0]


def conditional_state(N, couplings, cutoff=None):
    """Field after ``N`` excited atoms all detected in ``g``: quasi-mode ``||N, 0>>``."""
    if N < 0:
        raise ValueError("N must be non-negative")
    cutoff = N if cutoff is None else cutoff
    vec = np.zeros(n_states(cutoff), dtype=complex)
    start = state_index(N, 0)
    vec[start : start + N + 1] = _wigner_column(N, couplings)
    return TwoModeState(cutoff, vec, Basis.MODE)


def conditional_overlap(target, N, couplings):
    """``|<Psi_N | chi_N>|^2`` from the Wigner column of ``D^{(N/2)}``."""
    target = as_target(target)
    if target.N != N:
        raise ValueError(f"target has {target.N} photons but N = {N}")
    return float(abs(target.coefficients.conj() @ _wigner_column(N, couplings)) ** 2)


def conditional_success_probability(tau_list):
    """Probability that atoms ``1..N`` all exit in ``g``: ``prod sin^2(tau_l sqrt(l))``."""
    taus = np.asarray(check_tau_list(tau_list))
    ell = np.arange(1, len(taus) + 1)
    return float(np.prod(np.sin(taus * np.sqrt(ell)) ** 2))


def run_conditional_sequence(tau_list, couplings):
    """Inject excited atoms into the vacuum and post-select each on ``g``.

    Returns the final field (phase fixed by the collapse convention) and the
    product of detection probabilities.
    """
    taus = check_tau_list(tau_list)
    N = len(taus)
    t = build_transform(couplings, N)
    field = TwoModeState.vacuum(N)
    success = 1.0
    for tau in taus:
        evolved = evolve(AtomFieldState.product("e", field), tau, t)
        field, prob = atom_detection_collapse(evolved, "g")
        success *= prob
    return field, success


# -- non-conditional ---------------------------------------------------------


def nonconditional_weights(tau_list):
    """Quasi-mode occupation weights after ``n`` unobserved atoms.

    ``p^{(n)}_k = cos^2(tau_n sqrt(k+1)) p^{(n-1)}_k + sin^2(tau_n sqrt(k)) p^{(n-1)}_{k-1}``
    with ``k = 2j`` and ``p^{(0)}_0 = 1``.
    """
    taus = check_tau_list(tau_list)
    p = np.ones(1)
    for tau in taus:
        k = np.arange(len(p) + 1)
        stay = np.cos(tau * np.sqrt(k + 1)) ** 2
        climb = np.sin(tau * np.sqrt(k)) ** 2
        new = np.zeros(len(p) + 1)
        new[:-1] += stay[:-1] * p
        new[1:] += climb[1:] * p
        p = new
    return NonConditionalWeights(len(taus), p, tuple(taus))


def nonconditional_probability(target, tau_list, couplings):
    """Conditional overlap times the weight of ``||N, 0>>`` after ``n >= N`` steps."""
    target = as_target(target)
    if len(tau_list) < target.N:
        raise ValueError(
            f"{len(tau_list)} steps cannot produce {target.N} photons; at least N steps are needed"
        )
    weight = nonconditional_weights(tau_list).weight(target.N / 2)
    return weight * conditional_overlap(target, target.N, couplings)


def outcome_branches(tau_list, couplings):
    """Unnormalized field states for every atom outcome sequence.

    Keys are tuples of ``'e'``/``'g'``; the squared norm of each value is the
    probability of that detection record. The cutoff equals ``len(tau_list)``.
    """
    taus = check_tau_list(tau_list)
    cutoff = len(taus)
    t = build_transform(couplings, cutoff)
    branches = {(): TwoModeState.vacuum(cutoff)}
    for tau in taus:
        nxt = {}
        for record, field in branches.items():
            evolved = evolve(AtomFieldState.product("e", field), tau, t)
            nxt[record + ("e",)] = evolved.excited
            nxt[record + ("g",)] = evolved.ground
        branches = nxt
    return branches


def simulate_nonconditional_density(tau_list, couplings):
    """Field density operator after ``n`` unobserved atoms, by direct simulation.

    Each step evolves every pure branch with a fresh excited atom and traces the
    atom out, so the result is the sum of the reduced densities.
    """
    taus = check_tau_list(tau_list)
    cutoff = len(taus)
    if cutoff == 0:
        return FieldDensityOperator.from_pure(TwoModeState.vacuum(0))
    branches = outcome_branches(taus[:-1], couplings)
    t = build_transform(couplings, cutoff)
    rho = np.zeros((n_states(cutoff), n_states(cutoff)), dtype=complex)
    for field in branches.values():
        prob = field.norm() ** 2
        if prob == 0.0:
            continue
        joint = AtomFieldState.product("e", field.normalized().with_cutoff(cutoff))
        rho += prob * reduced_field_density(evolve(joint, taus[-1], t)).matrix
    return FieldDensityOperator(cutoff, rho, Basis.MODE)


def simulate_nonconditional_probability(target, tau_list, couplings):
    target = as_target(target)
    rho = simulate_nonconditional_density(tau_list, couplings)
    if rho.cutoff < target.N:
        return 0.0
    return rho.expectation(target.to_state(rho.cutoff))

