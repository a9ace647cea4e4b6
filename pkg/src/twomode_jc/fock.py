"""Two-mode Fock-state bookkeeping and state containers.

States live on the simplex ``n1 + n2 <= cutoff``. Amplitudes are stored
densely, grouped by total photon number ``N = 2j`` and, inside each group,
ordered by descending ``m`` (equivalently ascending ``n2``)::

    index(n1, n2) = N (N + 1) / 2 + n2,    N = n1 + n2

Half-integer labels are carried as doubled ints (``two_j``, ``two_m``) so that
they compare exactly.
"""

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._validation import check_amplitudes, check_cutoff, check_half_integer_pair, twice

NORM_TOL = 1e-12
EVOLVED_NORM_TOL = 1e-9


class Basis(enum.Enum):
    MODE = "mode"
    QUASIMODE = "quasimode"


ATOM_LEVELS = ("e", "g")


def check_atom(atom):
    if atom not in ATOM_LEVELS:
        raise ValueError(f"atom level must be 'e' or 'g', got {atom!r}")
    return atom


@dataclass(frozen=True)
class ModeFockLabel:
    """Photon numbers ``(n1, n2)`` of the two physical modes."""

    n1: int
    n2: int

    def __post_init__(self):
        for name in ("n1", "n2"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise TypeError(f"{name} must be an integer")
            if value < 0:
                raise ValueError(f"{name} must be non-negative, got {value}")

    @property
    def total(self):
        return self.n1 + self.n2

    def __str__(self):
        return f"|{self.n1},{self.n2}>"


@dataclass(frozen=True)
class SchwingerLabel:
    """Angular-momentum label ``(j, m)`` stored as ``(2j, 2m)``."""

    two_j: int
    two_m: int

    def __post_init__(self):
        check_half_integer_pair(self.two_j, self.two_m)

    @classmethod
    def from_values(cls, j, m):
        return cls(twice(j, "j"), twice(m, "m"))

    @property
    def j(self):
        return Fraction(self.two_j, 2)

    @property
    def m(self):
        return Fraction(self.two_m, 2)

    def __str__(self):
        return f"|{self.j},{self.m}>_S"


def schwinger_from_fock(label):
    return SchwingerLabel(label.n1 + label.n2, label.n1 - label.n2)


def fock_from_schwinger(label):
    if not isinstance(label, SchwingerLabel):
        raise TypeError("expected a SchwingerLabel")
    # SchwingerLabel already rejects invalid (j, m); re-check in case of
    # object.__setattr__ tampering on the frozen instance.
    check_half_integer_pair(label.two_j, label.two_m)
    return ModeFockLabel((label.two_j + label.two_m) // 2, (label.two_j - label.two_m) // 2)


def n_states(cutoff):
    """Number of two-mode Fock states with ``n1 + n2 <= cutoff``."""
    return (cutoff + 1) * (cutoff + 2) // 2


def state_index(n1, n2):
    total = n1 + n2
    return total * (total + 1) // 2 + n2


def block_slice(total):
    """Slice of the dense amplitude vector holding the ``n1 + n2 = total`` block."""
    start = total * (total + 1) // 2
    return slice(start, start + total + 1)


def fock_labels(cutoff):
    """All labels in storage order."""
    return [ModeFockLabel(total - n2, n2) for total in range(cutoff + 1) for n2 in range(total + 1)]


def total_photons(cutoff):
    """Total photon number of every storage slot, as an int array."""
    return np.concatenate([np.full(total + 1, total) for total in range(cutoff + 1)])


def _freeze(arr):
    arr = np.array(arr, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


def _check_basis(basis):
    if not isinstance(basis, Basis):
        raise TypeError(f"basis must be a Basis member, got {basis!r}")


@dataclass(frozen=True, eq=False)
class TwoModeState:
    """Pure two-mode field state with a total-photon cutoff.

    The amplitude array is copied and made read-only. Normalization is not
    enforced here since branch operators produce unnormalized vectors; use
    :meth:`is_normalized` where it matters.
    """

    cutoff: int
    amplitudes: np.ndarray
    basis: Basis = Basis.MODE

    def __post_init__(self):
        check_cutoff(self.cutoff)
        _check_basis(self.basis)
        arr = check_amplitudes(self.amplitudes, n_states(self.cutoff))
        object.__setattr__(self, "amplitudes", _freeze(arr))

    @classmethod
    def from_dict(cls, amplitudes, cutoff, basis=Basis.MODE, normalize=False):
        """Build from ``{(n1, n2): amplitude}``."""
        check_cutoff(cutoff)
        vec = np.zeros(n_states(cutoff), dtype=complex)
        for key, value in amplitudes.items():
            label = key if isinstance(key, ModeFockLabel) else ModeFockLabel(*key)
            if label.total > cutoff:
                raise ValueError(f"{label} exceeds cutoff {cutoff}")
            vec[state_index(label.n1, label.n2)] += value
        state = cls(cutoff, vec, basis)
        return state.normalized() if normalize else state

    @classmethod
    def vacuum(cls, cutoff=0, basis=Basis.MODE):
        return make_basis_state(ModeFockLabel(0, 0), cutoff, basis)

    @property
    def dim(self):
        return self.amplitudes.shape[0]

    def amplitude(self, n1, n2):
        if n1 + n2 > self.cutoff:
            return 0j
        return complex(self.amplitudes[state_index(n1, n2)])

    def block(self, total):
        """Amplitudes of the ``n1 + n2 = total`` sector, ordered by ascending n2."""
        if total > self.cutoff:
            return np.zeros(total + 1, dtype=complex)
        return self.amplitudes[block_slice(total)]

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol=NORM_TOL):
        return abs(self.norm() - 1.0) <= tol

    def normalized(self):
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return TwoModeState(self.cutoff, self.amplitudes / nrm, self.basis)

    def max_photons(self):
        """Largest total photon number with non-zero amplitude (-1 for the zero vector)."""
        occupied = np.nonzero(self.amplitudes)[0]
        if occupied.size == 0:
            return -1
        return int(total_photons(self.cutoff)[occupied[-1]])

    def with_cutoff(self, cutoff):
        """Zero-pad to a larger cutoff, or drop empty sectors to a smaller one."""
        check_cutoff(cutoff)
        dim = n_states(cutoff)
        if cutoff >= self.cutoff:
            vec = np.zeros(dim, dtype=complex)
            vec[: self.dim] = self.amplitudes
        else:
            if self.max_photons() > cutoff:
                raise ValueError(f"state has support above the requested cutoff {cutoff}")
            vec = self.amplitudes[:dim]
        return TwoModeState(cutoff, vec, self.basis)

    def scaled(self, factor):
        return TwoModeState(self.cutoff, factor * self.amplitudes, self.basis)

    def to_dict(self, tol=0.0):
        return {
            (label.n1, label.n2): complex(a)
            for label, a in zip(fock_labels(self.cutoff), self.amplitudes)
            if abs(a) > tol
        }

    def __repr__(self):
        terms = ", ".join(f"{k}: {v:.6g}" for k, v in self.to_dict(1e-12).items())
        return f"TwoModeState(cutoff={self.cutoff}, basis={self.basis.value}, {{{terms}}})"


@dataclass(frozen=True, eq=False)
class FieldDensityOperator:
    """Density operator on the truncated two-mode field space.

    Hermiticity and unit trace are checked on construction; positivity is
    available through :meth:`is_valid` because it needs an eigendecomposition.
    """

    cutoff: int
    matrix: np.ndarray
    basis: Basis = Basis.MODE

    def __post_init__(self):
        check_cutoff(self.cutoff)
        _check_basis(self.basis)
        dim = n_states(self.cutoff)
        mat = np.array(self.matrix, dtype=complex)
        if mat.shape != (dim, dim):
            raise ValueError(f"matrix must have shape ({dim}, {dim}), got {mat.shape}")
        if not np.allclose(mat, mat.conj().T, rtol=0.0, atol=1e-10):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(mat) - 1.0) > EVOLVED_NORM_TOL:
            raise ValueError(f"density matrix trace {np.trace(mat).real:.3g} != 1")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_pure(cls, state):
        vec = state.amplitudes
        return cls(state.cutoff, np.outer(vec, vec.conj()), state.basis)

    def trace(self):
        return float(np.trace(self.matrix).real)

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)

    def is_valid(self, tol=NORM_TOL):
        herm = np.allclose(self.matrix, self.matrix.conj().T, rtol=0.0, atol=tol)
        return herm and abs(self.trace() - 1.0) <= tol and self.eigenvalues().min() >= -1e-10

    def expectation(self, state):
        """``<psi| rho |psi>`` for a field state in the same basis."""
        if state.basis is not self.basis or state.cutoff != self.cutoff:
            raise ValueError("state and density operator must share basis and cutoff")
        vec = state.amplitudes
        return float(np.real(vec.conj() @ self.matrix @ vec))

    def with_cutoff(self, cutoff):
        check_cutoff(cutoff)
        dim = n_states(cutoff)
        if cutoff >= self.cutoff:
            mat = np.zeros((dim, dim), dtype=complex)
            mat[: self.matrix.shape[0], : self.matrix.shape[0]] = self.matrix
        else:
            mat = self.matrix[:dim, :dim]
        return FieldDensityOperator(cutoff, mat, self.basis)


@dataclass(frozen=True, eq=False)
class AtomFieldState:
    """Joint state ``|e> (x) excited + |g> (x) ground``."""

    excited: TwoModeState
    ground: TwoModeState

    def __post_init__(self):
        if self.excited.cutoff != self.ground.cutoff:
            raise ValueError("excited and ground parts must share a cutoff")
        if self.excited.basis is not self.ground.basis:
            raise ValueError("excited and ground parts must share a basis")

    @classmethod
    def product(cls, atom, field):
        """``|atom> (x) field``."""
        check_atom(atom)
        zero = TwoModeState(field.cutoff, np.zeros(field.dim), field.basis)
        return cls(field, zero) if atom == "e" else cls(zero, field)

    @classmethod
    def from_vector(cls, vector, cutoff, basis=Basis.MODE):
        """Split a stacked ``[excited; ground]`` amplitude vector."""
        dim = n_states(cutoff)
        vec = check_amplitudes(vector, 2 * dim, "vector")
        return cls(TwoModeState(cutoff, vec[:dim], basis), TwoModeState(cutoff, vec[dim:], basis))

    @property
    def cutoff(self):
        return self.excited.cutoff

    @property
    def basis(self):
        return self.excited.basis

    def to_vector(self):
        return np.concatenate([self.excited.amplitudes, self.ground.amplitudes])

    def norm(self):
        return float(np.linalg.norm(self.to_vector()))

    def part(self, atom):
        return self.excited if check_atom(atom) == "e" else self.ground

    def with_cutoff(self, cutoff):
        return AtomFieldState(self.excited.with_cutoff(cutoff), self.ground.with_cutoff(cutoff))


def make_basis_state(label, cutoff, basis=Basis.MODE):
    check_cutoff(cutoff)
    if not isinstance(label, ModeFockLabel):
        label = ModeFockLabel(*label)
    if label.total > cutoff:
        raise ValueError(f"{label} has {label.total} photons, above cutoff {cutoff}")
    vec = np.zeros(n_states(cutoff), dtype=complex)
    vec[state_index(label.n1, label.n2)] = 1.0
    return TwoModeState(cutoff, vec, basis)


def inner_product(a, b):
    """Hermitian inner product ``<a|b>``; both states must share basis and cutoff."""
    if a.basis is not b.basis:
        raise ValueError(
            f"basis mismatch ({a.basis.value} vs {b.basis.value}); transform one state first"
        )
    if a.cutoff != b.cutoff:
        raise ValueError(f"cutoff mismatch ({a.cutoff} vs {b.cutoff})")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def distance_up_to_phase(a, b):
    """Max-abs distance between two amplitude vectors after aligning global phase."""
    a = np.asarray(getattr(a, "amplitudes", a), dtype=complex)
    b = np.asarray(getattr(b, "amplitudes", b), dtype=complex)
    overlap = np.vdot(b, a)
    if abs(overlap) > 0:
        b = b * (overlap / abs(overlap))
    return float(np.max(np.abs(a - b)))
