"""Wigner rotation matrices of SU(2) and the Euler angles of a coupling pair.

Sign convention
---------------
``small_d`` uses the z-y-z convention ``d(theta) = exp(-i theta J_y)``::

    d^{1/2}(theta) = [[ cos(theta/2), -sin(theta/2)],
                      [ sin(theta/2),  cos(theta/2)]]     (rows/cols m = +1/2, -1/2)

and ``big_D = exp(-i (m_row phi + m_col chi)) small_d``. This is the convention
that makes column ``m`` of ``D^{(j)}`` equal to the mode-basis expansion of
``(A1^dag)^{j+m} (A2^dag)^{j-m} |0,0> / sqrt((j+m)! (j-m)!)`` with
``A1 = gamma1 a1 + gamma2 a2`` and ``A2 = -conj(gamma2) a1 + conj(gamma1) a2``.
:func:`dmatrix_by_expansion` computes that expansion directly from binomial
sums and is the reference the tests lock ``small_d`` against.

Matrix blocks returned here index rows and columns by descending ``m``
(``m = j, j-1, ..., -j``), which is ascending ``n2`` in the Fock storage order.
"""

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._validation import check_half_integer_pair, twice

MAX_TWO_J = 128

# Above this the alternating factorial sum loses too many digits to cancellation
# (about 1e-10 at 2j = 40, garbage by 2j = 80); larger blocks come from an
# eigendecomposition of J_y instead.
SUM_MAX_TWO_J = 24


@dataclass(frozen=True)
class EulerAngles:
    phi: float
    theta: float
    chi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")


@dataclass(frozen=True)
class CouplingConfig:
    """Complex atom-mode couplings ``g1``, ``g2`` and the derived rotation.

    ``gamma_i = g_i / g`` with ``g = sqrt(|g1|^2 + |g2|^2)``;
    ``cos(theta/2) = |gamma1|``, ``sin(theta/2) = |gamma2|``,
    ``phi = arg gamma1 - arg gamma2``, ``chi = arg gamma1 + arg gamma2``.
    """

    g1: complex
    g2: complex

    def __post_init__(self):
        g1, g2 = complex(self.g1), complex(self.g2)
        if not (cmath.isfinite(g1) and cmath.isfinite(g2)):
            raise ValueError("couplings must be finite")
        if g1 == 0 and g2 == 0:
            raise ValueError("at least one coupling must be non-zero")
        object.__setattr__(self, "g1", g1)
        object.__setattr__(self, "g2", g2)

    @classmethod
    def from_polar(cls, g1_mag, g1_phase, g2_mag, g2_phase):
        return cls(cmath.rect(g1_mag, g1_phase), cmath.rect(g2_mag, g2_phase))

    @property
    def g(self):
        return math.hypot(abs(self.g1), abs(self.g2))

    @property
    def gamma1(self):
        return self.g1 / self.g

    @property
    def gamma2(self):
        return self.g2 / self.g

    @property
    def euler(self):
        phi1 = cmath.phase(self.gamma1)
        phi2 = cmath.phase(self.gamma2)
        theta = 2.0 * math.atan2(abs(self.gamma2), abs(self.gamma1))
        return EulerAngles(phi=phi1 - phi2, theta=theta, chi=phi1 + phi2)


def euler_from_couplings(g1, g2):
    return CouplingConfig(g1, g2)


def _check_labels(two_j, two_m_row, two_m_col):
    if two_j > MAX_TWO_J:
        raise ValueError(f"j = {two_j}/2 exceeds the supported maximum {MAX_TWO_J // 2}")
    check_half_integer_pair(two_j, two_m_row)
    check_half_integer_pair(two_j, two_m_col)


@lru_cache(maxsize=None)
def _sum_terms(two_j, two_mp, two_m):
    # Terms of sum_k (-1)^(k - m + m') sqrt((j+m)!(j-m)!(j+m')!(j-m')!)
    #   / ((j+m-k)! k! (j-k-m')! (k-m+m')!) cos^(2j-2k+m-m') sin^(2k-m+m'),
    # with the squared coefficient kept as an exact rational.
    jpm, jmm = (two_j + two_m) // 2, (two_j - two_m) // 2
    jpmp, jmmp = (two_j + two_mp) // 2, (two_j - two_mp) // 2
    delta = (two_mp - two_m) // 2
    f = math.factorial
    root_sq = f(jpm) * f(jmm) * f(jpmp) * f(jmmp)
    terms = []
    for k in range(max(0, -delta), min(jpm, jmmp) + 1):
        den = f(jpm - k) * f(k) * f(jmmp - k) * f(k + delta)
        coef = math.sqrt(Fraction(root_sq, den * den))
        sign = -1.0 if (k + delta) % 2 else 1.0
        terms.append((sign * coef, two_j - 2 * k - delta, 2 * k + delta))
    return tuple(terms)


def _small_d_by_sum(two_j, two_mp, two_m, theta):
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return sum(coef * c**pc * s**ps for coef, pc, ps in _sum_terms(two_j, two_mp, two_m))


def _small_d_by_eigh(two_j, theta):
    two_m = two_j - 2 * np.arange(two_j + 1)
    j = two_j / 2
    m_lower = two_m[1:] / 2
    # <m+1| J+ |m> = sqrt(j(j+1) - m(m+1)); J_y = (J+ - J-) / 2i
    ladder = np.sqrt(j * (j + 1) - m_lower * (m_lower + 1))
    jy = np.zeros((two_j + 1, two_j + 1), dtype=complex)
    idx = np.arange(two_j)
    jy[idx, idx + 1] = ladder / 2j
    jy[idx + 1, idx] = -ladder / 2j
    evals, evecs = np.linalg.eigh(jy)
    return ((evecs * np.exp(-1j * theta * evals)) @ evecs.conj().T).real


def _small_d_twice(two_j, two_mp, two_m, theta):
    if two_j <= SUM_MAX_TWO_J:
        return _small_d_by_sum(two_j, two_mp, two_m, theta)
    block = _small_d_block_cached(two_j, theta)
    return float(block[(two_j - two_mp) // 2, (two_j - two_m) // 2])


def small_d(j, m_row, m_col, theta):
    """Wigner small-d element ``d^{(j)}_{m_row, m_col}(theta)``.

    Labels may be ints, half-integer floats or ``Fraction`` objects.
    """
    two_j, two_mp, two_m = twice(j, "j"), twice(m_row, "m_row"), twice(m_col, "m_col")
    _check_labels(two_j, two_mp, two_m)
    return _small_d_twice(two_j, two_mp, two_m, float(theta))


def big_D(j, m_row, m_col, euler):
    two_j, two_mp, two_m = twice(j, "j"), twice(m_row, "m_row"), twice(m_col, "m_col")
    _check_labels(two_j, two_mp, two_m)
    phase = cmath.exp(-0.5j * (two_mp * euler.phi + two_m * euler.chi))
    return phase * _small_d_twice(two_j, two_mp, two_m, euler.theta)


@lru_cache(maxsize=256)
def _small_d_block_cached(two_j, theta):
    size = two_j + 1
    if two_j > SUM_MAX_TWO_J:
        block = _small_d_by_eigh(two_j, theta)
    else:
        block = np.empty((size, size))
        for row in range(size):
            for col in range(size):
                block[row, col] = _small_d_by_sum(two_j, two_j - 2 * row, two_j - 2 * col, theta)
    block.setflags(write=False)
    return block


def small_d_block(two_j, theta):
    """Full ``(2j+1) x (2j+1)`` small-d matrix, rows/cols by descending m."""
    _check_labels(two_j, two_j, two_j)
    return _small_d_block_cached(int(two_j), float(theta))


def big_D_block(two_j, euler):
    """Full ``D^{(j)}`` matrix for the given Euler angles, rows/cols by descending m."""
    two_m = two_j - 2 * np.arange(two_j + 1)
    row_phase = np.exp(-0.5j * two_m * euler.phi)
    col_phase = np.exp(-0.5j * two_m * euler.chi)
    return row_phase[:, None] * small_d_block(two_j, euler.theta) * col_phase[None, :]


def dmatrix_by_expansion(j, m_col, couplings):
    """Column ``m_col`` of ``D^{(j)}`` by expanding the quasi-mode creation operators.

    Applies ``(conj(g1) a1^dag + conj(g2) a2^dag)^{j+m} (-g2 a1^dag + g1 a2^dag)^{j-m}``
    (with normalized ``g``) to the vacuum via two binomial sums, divides by
    ``sqrt((j+m)! (j-m)!)`` and returns the coefficients of ``|j+m', j-m'>`` for
    ``m' = j, ..., -j``. Shares no code with :func:`small_d`.
    """
    two_j, two_m = twice(j, "j"), twice(m_col, "m_col")
    check_half_integer_pair(two_j, two_m)
    p, q = (two_j + two_m) // 2, (two_j - two_m) // 2
    g1, g2 = couplings.gamma1, couplings.gamma2
    out = np.zeros(two_j + 1, dtype=complex)
    for a in range(p + 1):
        left = math.comb(p, a) * g1.conjugate() ** a * g2.conjugate() ** (p - a)
        for c in range(q + 1):
            right = math.comb(q, c) * (-g2) ** c * g1 ** (q - c)
            n1 = a + c
            n2 = two_j - n1
            # a1^dag^n1 a2^dag^n2 |0,0> = sqrt(n1! n2!) |n1, n2>
            out[n2] += left * right * math.sqrt(math.factorial(n1) * math.factorial(n2))
    return out / math.sqrt(math.factorial(p) * math.factorial(q))


def dmatrix_block_by_expansion(two_j, couplings):
    """All columns of :func:`dmatrix_by_expansion` for one ``j``, stacked."""
    cols = [dmatrix_by_expansion(two_j / 2, (two_j - 2 * k) / 2, couplings) for k in range(two_j + 1)]
    return np.column_stack(cols)
