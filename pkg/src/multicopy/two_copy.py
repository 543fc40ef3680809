"""Two-copy angular momentum algebra, its eigensystem, and difference statistics.

Two bosonic modes carry an angular momentum via the quadratic forms
``L_i = A^dag (sigma_i'/2) A`` with ``A = (a_1, a_2)``; the z component

    L_z = (x_1 p_2 - p_1 x_2)/2 = (i/2)(a_1 a_2^dag - a_1^dag a_2)

is invariant under simultaneous rotation and squeezing of both copies and
annihilates two copies of any squeezed vacuum.  Measuring it on two replicas
of a one-mode state yields half-integer outcomes ``m``; this module computes
that distribution by projecting onto the exact per-sector eigenbasis (the
operator commutes with the total photon number, so no global diagonalization
is ever needed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .distributions import ObservableSummary, OutcomeDistribution
from .fock import DensityOp, FockArray, FockTruncation, State, gate_tail
from .operators import (
    ModeOperator,
    quadratic_operator,
    quadrature_p,
    quadrature_x,
)
from .passive import sector_quadratic

__all__ = [
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "TwoCopyOperators",
    "SectorEigenbasis",
    "build_angular_components",
    "quadrature_angular_components",
    "exchange_operator",
    "sector_eigenbasis",
    "closed_form_lowest_weight",
    "closed_form_m0",
    "outcome_distribution_Lz",
    "entropy_and_variance_Lz",
    "thermal_outcome_law",
    "two_state_mixture_entropy",
]

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
PAULI_Y = np.array([[0.0, -1j], [1j, 0.0]], dtype=np.complex128)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)


@dataclass(frozen=True)
class TwoCopyOperators:
    """The angular momentum components with ladder, squared and Casimir operators."""

    lx: ModeOperator
    ly: ModeOperator
    lz: ModeOperator
    lplus: ModeOperator
    lminus: ModeOperator
    lsq: ModeOperator
    l0: ModeOperator


def _require_two_modes(trunc: FockTruncation) -> None:
    if trunc.modes != 2:
        raise ValueError(f"two-copy operators need a 2-mode truncation, got {trunc.modes}")


def build_angular_components(trunc: FockTruncation) -> TwoCopyOperators:
    """All two-copy angular momentum operators in their mode-operator form."""
    _require_two_modes(trunc)
    lx = quadratic_operator(PAULI_Z / 2.0, trunc)
    ly = quadratic_operator(PAULI_X / 2.0, trunc)
    lz = quadratic_operator(PAULI_Y / 2.0, trunc)
    lplus = quadratic_operator((PAULI_Z + 1j * PAULI_X) / 2.0, trunc)
    lminus = quadratic_operator((PAULI_Z - 1j * PAULI_X) / 2.0, trunc)
    lsq = ModeOperator(
        trunc,
        lx.matrix @ lx.matrix + ly.matrix @ ly.matrix + lz.matrix @ lz.matrix,
    )
    l0 = quadratic_operator(np.eye(2) / 2.0, trunc)
    return TwoCopyOperators(lx, ly, lz, lplus, lminus, lsq, l0)


def quadrature_angular_components(trunc: FockTruncation) -> TwoCopyOperators:
    """Independent construction of (L_x, L_y, L_z) from quadrature operators."""
    _require_two_modes(trunc)
    X1, P1 = quadrature_x(trunc, 1).matrix, quadrature_p(trunc, 1).matrix
    X2, P2 = quadrature_x(trunc, 2).matrix, quadrature_p(trunc, 2).matrix
    lz = ModeOperator(trunc, (X1 @ P2 - P1 @ X2) / 2.0)
    ly = ModeOperator(trunc, (X1 @ X2 + P1 @ P2) / 2.0)
    lx = ModeOperator(trunc, ((X1 @ X1 + P1 @ P1) - (X2 @ X2 + P2 @ P2)) / 4.0)
    lplus = ModeOperator(trunc, lx.matrix + 1j * ly.matrix)
    lminus = ModeOperator(trunc, lx.matrix - 1j * ly.matrix)
    lsq = ModeOperator(
        trunc, lx.matrix @ lx.matrix + ly.matrix @ ly.matrix + lz.matrix @ lz.matrix
    )
    l0 = quadratic_operator(np.eye(2) / 2.0, trunc)
    return TwoCopyOperators(lx, ly, lz, lplus, lminus, lsq, l0)


def exchange_operator(trunc: FockTruncation) -> ModeOperator:
    """Permutation swapping the two modes: ``P|n1, n2> = |n2, n1>``."""
    _require_two_modes(trunc)
    labels = trunc.basis_labels()
    d = trunc.local_dim
    swapped = labels[:, 1] * d + labels[:, 0]
    source = np.arange(trunc.dim)
    perm = sp.csr_matrix(
        (np.ones(trunc.dim), (swapped, source)), shape=(trunc.dim, trunc.dim)
    )
    return ModeOperator(trunc, perm, hermitian=True)


# ---------------------------------------------------------------------------
# Eigensystem
# ---------------------------------------------------------------------------


def _twice(l_value) -> int:
    twice = 2.0 * float(l_value)
    rounded = round(twice)
    if abs(twice - rounded) > 1e-9 or rounded < 0:
        raise ValueError(f"l must be a nonnegative half-integer, got {l_value}")
    return int(rounded)


@lru_cache(maxsize=None)
def _sector_eigensystem(twice_l: int) -> tuple[tuple[int, ...], np.ndarray]:
    """Exact eigensystem of L_z on the sector with total photon number ``2l``.

    Returns outcome labels (ascending) and a unitary whose column ``k`` holds
    the eigenvector for ``m = -l + k`` in the sector basis ``|j, 2l - j>``,
    ``j = 0..2l``.  The eigenvector phase is fixed so that the first nonzero
    amplitude in lexicographic Fock order is real positive.
    """
    n = twice_l
    G = sector_quadratic(PAULI_Y / 2.0, 2, n)
    vals, vecs = np.linalg.eigh(G)
    twice_ms = tuple(-n + 2 * k for k in range(n + 1))
    expected = np.array(twice_ms, dtype=np.float64) / 2.0
    if np.max(np.abs(vals - expected)) > 1e-9:
        raise AssertionError(f"unexpected sector spectrum at 2l={n}: {vals}")
    for k in range(n + 1):
        col = vecs[:, k]
        first = np.flatnonzero(np.abs(col) > 1e-12)[0]
        phase = col[first] / abs(col[first])
        vecs[:, k] = col * np.conj(phase)
    vecs.setflags(write=False)
    return twice_ms, vecs


@dataclass(frozen=True)
class SectorEigenbasis:
    """Orthonormal eigenvectors of L_z on one total-photon-number sector."""

    twice_l: int
    twice_ms: tuple[int, ...]
    vectors: tuple[FockArray, ...]

    def vector_for(self, twice_m: int) -> FockArray:
        return self.vectors[self.twice_ms.index(twice_m)]


def _embed_sector_vector(coeffs: np.ndarray, twice_l: int, trunc: FockTruncation) -> FockArray:
    n = twice_l
    amps = np.zeros(trunc.dim, dtype=np.complex128)
    for j in range(n + 1):
        amps[trunc.flat_index((j, n - j))] = coeffs[j]
    return FockArray(trunc, amps)


def sector_eigenbasis(l_value, trunc: FockTruncation) -> SectorEigenbasis:
    """Eigenbasis of the total-photon-number sector ``n1 + n2 = 2l``."""
    _require_two_modes(trunc)
    twice_l = _twice(l_value)
    if twice_l > trunc.cutoff:
        raise ValueError(
            f"sector 2l={twice_l} does not fit a per-mode cutoff of {trunc.cutoff}"
        )
    twice_ms, C = _sector_eigensystem(twice_l)
    vectors = tuple(
        _embed_sector_vector(C[:, k], twice_l, trunc) for k in range(twice_l + 1)
    )
    return SectorEigenbasis(twice_l, twice_ms, vectors)


def _dfact(n: int) -> int:
    """Double factorial with the empty-product convention for n <= 0."""
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def closed_form_lowest_weight(l_value, trunc: FockTruncation) -> FockArray:
    """Closed-form lowest-weight eigenvector (m = -l), normalized numerically.

    Built from the finite sum over ``|k, 2l-k>`` with binomial amplitudes and
    quarter-phases; serves as an independent oracle for the diagonalization.
    """
    _require_two_modes(trunc)
    twice_l = _twice(l_value)
    if twice_l > trunc.cutoff:
        raise ValueError(f"sector 2l={twice_l} exceeds cutoff {trunc.cutoff}")
    n = twice_l
    coeffs = np.zeros(n + 1, dtype=np.complex128)
    for k in range((n - 1) // 2 + 1):
        amp = (1j**k) * math.sqrt(math.comb(n, k))
        coeffs[k] += amp
        coeffs[n - k] += amp * ((-1) ** k) * (1j**n)
    if n % 2 == 0:
        half = n // 2
        coeffs[half] += (1j**half) * math.sqrt(math.comb(n, half))
    vec = _embed_sector_vector(coeffs, n, trunc)
    return vec.normalize()


def closed_form_m0(l_value, trunc: FockTruncation) -> FockArray:
    """Closed-form m = 0 eigenvector for integer ``l``, supported on even pairs.

    Coefficients are double-factorial ratios; normalized numerically.
    """
    _require_two_modes(trunc)
    twice_l = _twice(l_value)
    if twice_l % 2 != 0:
        raise ValueError(f"m = 0 closed form needs integer l, got {l_value}")
    l = twice_l // 2
    if twice_l > trunc.cutoff:
        raise ValueError(f"sector 2l={twice_l} exceeds cutoff {trunc.cutoff}")
    coeffs = np.zeros(twice_l + 1, dtype=np.complex128)
    for i in range((l - 1) // 2 + 1):
        alpha = math.sqrt(
            _dfact(2 * l)
            * _dfact(2 * l - 2 * i - 1)
            * _dfact(2 * i - 1)
            / (_dfact(2 * l - 2 * i) * _dfact(2 * l - 1) * _dfact(2 * i))
        )
        coeffs[2 * i] += alpha
        coeffs[2 * l - 2 * i] += alpha
    if l % 2 == 0:
        beta = math.sqrt(
            _dfact(2 * l) * _dfact(l - 1) ** 2 / (_dfact(l) ** 2 * _dfact(2 * l - 1))
        )
        coeffs[l] += beta
    vec = _embed_sector_vector(coeffs, twice_l, trunc)
    return vec.normalize()


# ---------------------------------------------------------------------------
# Outcome distribution
# ---------------------------------------------------------------------------


def _one_mode_support(state: State) -> int:
    if isinstance(state, FockArray):
        nz = np.flatnonzero(np.abs(state.amplitudes) > 0.0)
    else:
        nz = np.flatnonzero(
            np.abs(state.matrix).max(axis=0) + np.abs(state.matrix).max(axis=1) > 0.0
        )
    return int(nz.max()) if nz.size else 0


def outcome_distribution_Lz(
    state: State, *, tail_max: float | None = None
) -> OutcomeDistribution:
    """Outcome distribution of the two-copy observable on two replicas of ``state``.

    Projects the two-copy product onto every sector eigenvector; exact for the
    truncated input because every contributing sector is covered in full.
    """
    if state.truncation.modes != 1:
        raise ValueError("outcome_distribution_Lz expects a one-mode state")
    input_tail = gate_tail(state, tail_max).tail_mass
    support = _one_mode_support(state)
    probs: dict[int, float] = {}
    pure = isinstance(state, FockArray)
    amps = state.amplitudes if pure else None
    rho = None if pure else state.matrix
    for n in range(2 * support + 1):
        twice_ms, C = _sector_eigensystem(n)
        j = np.arange(max(0, n - support), min(support, n) + 1)
        rows = C[j, :]
        if pure:
            w = amps[j] * amps[n - j]
            p_vec = np.abs(rows.conj().T @ w) ** 2
        else:
            R = rho[np.ix_(j, j)] * rho[np.ix_(n - j, n - j)]
            p_vec = np.einsum("jm,jk,km->m", rows.conj(), R, rows).real
        for k, twice_m in enumerate(twice_ms):
            if p_vec[k] != 0.0:
                probs[twice_m] = probs.get(twice_m, 0.0) + float(p_vec[k])
    return OutcomeDistribution(probs, tail_mass=input_tail)


def entropy_and_variance_Lz(
    state: State, *, tail_max: float | None = None
) -> ObservableSummary:
    """Shannon entropy (nats) and variance of the two-copy observable."""
    dist = outcome_distribution_Lz(state, tail_max=tail_max)
    return ObservableSummary(dist.entropy(), dist.variance(), dist)


def thermal_outcome_law(mean_n: float, max_abs_twice_d: int) -> OutcomeDistribution:
    """Reference geometric-difference law ``P(d) = (2n+1)^-1 (n/(n+1))^{2|d|}``."""
    if mean_n < 0:
        raise ValueError("mean photon number must be >= 0")
    if mean_n == 0.0:
        return OutcomeDistribution({0: 1.0})
    ratio = mean_n / (mean_n + 1.0)
    norm = 1.0 / (2.0 * mean_n + 1.0)
    probs = {
        d: norm * ratio ** abs(d) for d in range(-max_abs_twice_d, max_abs_twice_d + 1)
    }
    return OutcomeDistribution(probs)


def two_state_mixture_entropy(alpha: float) -> float:
    """Closed-form entropy for ``alpha |0><0| + (1 - alpha) |1><1|`` (nats)."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    h = (1.0 - alpha) ** 2 * math.log(2.0)
    if 0.0 < alpha:
        h -= 2.0 * alpha * math.log(alpha)
    if alpha < 1.0:
        h -= 2.0 * (1.0 - alpha) * math.log(1.0 - alpha)
    return h
