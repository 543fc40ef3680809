"""Three-copy uncertainty observable: algebra, distribution, entropy, variance.

Three replicas carry the components

    M_x = (x_2 p_3 - p_2 x_3)/2,  M_y = (x_3 p_1 - p_3 x_1)/2,
    M_z = (x_1 p_2 - p_1 x_2)/2,

and the measured observable is ``M = (M_x + M_y + M_z)/sqrt(3)``, the angular
momentum component along the diagonal direction.  Uniform displacement of the
three copies acts along that same direction, so M is invariant under all
Gaussian unitaries, not just rotations and squeezing.

The outcome distribution defaults to the difference-readout circuit (balanced
three-mode combiner followed by the two-copy stage on modes 2 and 3), computed
exactly sector by sector; per-sector diagonalization of M is kept as an
independent cross-check for small supports.
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
    Displace,
    ModeOperator,
    annihilation,
    apply_unitary,
    compose_circuit_mode_matrix,
    number,
    quadratic_operator,
    quadrature_p,
    quadrature_x,
)
from .passive import (
    sector_basis,
    sector_quadratic,
    three_copy_elements,
    three_copy_first_stage,
    difference_distribution,
)

__all__ = [
    "GELL_MANN_X",
    "GELL_MANN_Y",
    "GELL_MANN_Z",
    "ThreeCopyOperators",
    "FeasibilityError",
    "build_three_copy",
    "gell_mann_components",
    "quadrature_components",
    "squared_sum_reference",
    "outcome_distribution_M",
    "entropy_and_variance_M",
    "displacement_invariance_check",
    "DisplacementInvarianceReport",
]

# The three SU(3) generators expressing the components: S_x, S_y, S_z.
GELL_MANN_X = np.array(
    [[0, 0, 0], [0, 0, -1j], [0, 1j, 0]], dtype=np.complex128
)
GELL_MANN_Y = np.array(
    [[0, 0, 1j], [0, 0, 0], [-1j, 0, 0]], dtype=np.complex128
)
GELL_MANN_Z = np.array(
    [[0, -1j, 0], [1j, 0, 0], [0, 0, 0]], dtype=np.complex128
)

_M_COEFF = (GELL_MANN_X + GELL_MANN_Y + GELL_MANN_Z) / (2.0 * math.sqrt(3.0))

# Per-sector diagonalization is a small-cutoff cross-check; refuse sectors
# beyond this total photon number (dimension C(n+2, 2) grows quadratically).
_DIAG_MAX_TOTAL = 60


class FeasibilityError(ValueError):
    """Requested computation exceeds the supported problem size."""


@dataclass(frozen=True)
class ThreeCopyOperators:
    """The three components and the diagonal observable ``M`` as sparse operators."""

    mx: ModeOperator
    my: ModeOperator
    mz: ModeOperator
    m: ModeOperator


def _require_three_modes(trunc: FockTruncation) -> None:
    if trunc.modes != 3:
        raise ValueError(f"three-copy operators need a 3-mode truncation, got {trunc.modes}")


def build_three_copy(trunc: FockTruncation) -> ThreeCopyOperators:
    """Components built from mode-operator products ``(i/2)(a_b a_c^dag - a_b^dag a_c)``."""
    _require_three_modes(trunc)
    a = [annihilation(trunc, m).matrix for m in (1, 2, 3)]

    def component(b: int, c: int) -> ModeOperator:
        return ModeOperator(trunc, 0.5j * (a[b] @ a[c].getH() - a[b].getH() @ a[c]))

    mx = component(1, 2)
    my = component(2, 0)
    mz = component(0, 1)
    m = ModeOperator(trunc, (mx.matrix + my.matrix + mz.matrix) / math.sqrt(3.0))
    return ThreeCopyOperators(mx, my, mz, m)


def gell_mann_components(trunc: FockTruncation) -> ThreeCopyOperators:
    """Components as quadratic forms ``A^dag (S_i / 2) A`` in the SU(3) generators."""
    _require_three_modes(trunc)
    mx = quadratic_operator(GELL_MANN_X / 2.0, trunc)
    my = quadratic_operator(GELL_MANN_Y / 2.0, trunc)
    mz = quadratic_operator(GELL_MANN_Z / 2.0, trunc)
    m = quadratic_operator(_M_COEFF, trunc)
    return ThreeCopyOperators(mx, my, mz, m)


def quadrature_components(trunc: FockTruncation) -> ThreeCopyOperators:
    """Components built from quadrature products (independent construction)."""
    _require_three_modes(trunc)
    X = [quadrature_x(trunc, m).matrix for m in (1, 2, 3)]
    P = [quadrature_p(trunc, m).matrix for m in (1, 2, 3)]

    def component(b: int, c: int) -> ModeOperator:
        return ModeOperator(trunc, (X[b] @ P[c] - P[b] @ X[c]) / 2.0)

    mx = component(1, 2)
    my = component(2, 0)
    mz = component(0, 1)
    m = ModeOperator(trunc, (mx.matrix + my.matrix + mz.matrix) / math.sqrt(3.0))
    return ThreeCopyOperators(mx, my, mz, m)


def squared_sum_reference(trunc: FockTruncation) -> ModeOperator:
    """``(N(N+1) - (sum a_i^dag^2)(sum a_j^2))/4`` with ``N`` the total number."""
    _require_three_modes(trunc)
    a = [annihilation(trunc, m).matrix for m in (1, 2, 3)]
    N = (number(trunc, 1) + number(trunc, 2) + number(trunc, 3)).matrix
    lowering = a[0] @ a[0] + a[1] @ a[1] + a[2] @ a[2]
    eye = sp.identity(trunc.dim, dtype=np.complex128, format="csr")
    return ModeOperator(trunc, (N @ (N + eye) - lowering.getH() @ lowering) / 4.0)


# ---------------------------------------------------------------------------
# Outcome distribution
# ---------------------------------------------------------------------------


@lru_cache(maxsize=64)
def _m_sector_eigensystem(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact eigensystem of M on the three-mode sector with total photons ``n``.

    Eigenvalues are half-integers with ``|m| <= n/2``; returns the rounded
    ``twice_m`` per column and the eigenvector matrix in the sector basis.
    """
    G = sector_quadratic(_M_COEFF, 3, n)
    vals, vecs = np.linalg.eigh(G)
    twice = np.round(2.0 * vals)
    if np.max(np.abs(2.0 * vals - twice)) > 1e-8:
        raise AssertionError(f"sector {n} spectrum is not half-integer: {vals}")
    if np.max(np.abs(twice)) > n:
        raise AssertionError(f"sector {n} eigenvalue outside |m| <= n/2")
    vecs.setflags(write=False)
    return twice.astype(np.int64), vecs


def _diagonalization_distribution(
    state: State, support: int, input_tail: float, weight_floor: float
) -> OutcomeDistribution:
    if 3 * support > _DIAG_MAX_TOTAL:
        raise FeasibilityError(
            f"diagonalization route limited to total photon number {_DIAG_MAX_TOTAL}; "
            f"state support {support} needs {3 * support}. Use the circuit route."
        )
    pure = isinstance(state, FockArray)
    amps = state.amplitudes if pure else None
    rho = None if pure else state.matrix
    probs: dict[int, float] = {}
    skipped = 0.0
    for n in range(3 * support + 1):
        basis = sector_basis(3, n)
        in_grid = np.flatnonzero((basis <= support).all(axis=1))
        if in_grid.size == 0:
            continue
        sub = basis[in_grid]
        twice_ms, C = _m_sector_eigensystem(n)
        rows = C[in_grid, :]
        if pure:
            w = amps[sub[:, 0]] * amps[sub[:, 1]] * amps[sub[:, 2]]
            weight = float(np.vdot(w, w).real)
            if weight < weight_floor:
                skipped += weight
                continue
            p_vec = np.abs(rows.conj().T @ w) ** 2
        else:
            R = np.ones((in_grid.size, in_grid.size), dtype=np.complex128)
            for m in range(3):
                R *= rho[np.ix_(sub[:, m], sub[:, m])]
            weight = float(np.trace(R).real)
            if weight < weight_floor:
                skipped += max(weight, 0.0)
                continue
            p_vec = np.einsum("jm,jk,km->m", rows.conj(), R, rows).real
        for twice_m in np.unique(twice_ms):
            mass = float(p_vec[twice_ms == twice_m].sum())
            if mass != 0.0:
                probs[int(twice_m)] = probs.get(int(twice_m), 0.0) + mass
    return OutcomeDistribution(probs, tail_mass=input_tail + skipped)


def _one_mode_support(state: State) -> int:
    if isinstance(state, FockArray):
        nz = np.flatnonzero(np.abs(state.amplitudes) > 0.0)
    else:
        nz = np.flatnonzero(
            np.abs(state.matrix).max(axis=0) + np.abs(state.matrix).max(axis=1) > 0.0
        )
    return int(nz.max()) if nz.size else 0


def outcome_distribution_M(
    state: State,
    *,
    route: str = "circuit",
    tail_max: float | None = None,
    weight_floor: float = 1e-18,
) -> OutcomeDistribution:
    """Outcome distribution of M on three replicas of a one-mode ``state``.

    ``route="circuit"`` (default) streams the difference-readout circuit sector
    by sector; ``route="diagonalization"`` projects onto per-sector eigenvectors
    of M instead.  Both are exact for the truncated input and agree up to
    floating-point noise.
    """
    if state.truncation.modes != 1:
        raise ValueError("outcome_distribution_M expects a one-mode state")
    if route == "circuit":
        return difference_distribution(
            state,
            three_copy_elements(),
            readout=(2, 3),
            modes=3,
            tail_max=tail_max,
            weight_floor=weight_floor,
        )
    if route == "diagonalization":
        input_tail = gate_tail(state, tail_max).tail_mass
        return _diagonalization_distribution(
            state, _one_mode_support(state), input_tail, weight_floor
        )
    raise ValueError(f"unknown route {route!r}; expected 'circuit' or 'diagonalization'")


def entropy_and_variance_M(
    state: State, *, route: str = "circuit", tail_max: float | None = None
) -> ObservableSummary:
    """Shannon entropy (nats) and variance of M on three replicas of ``state``."""
    dist = outcome_distribution_M(state, route=route, tail_max=tail_max)
    return ObservableSummary(dist.entropy(), dist.variance(), dist)


@dataclass(frozen=True)
class DisplacementInvarianceReport:
    """Displacement-invariance evidence for the three-copy observable."""

    tv_distance: float
    first_stage_vector: tuple[complex, complex, complex]
    vector_residual: float
    passed: bool


def displacement_invariance_check(
    state: State,
    alpha: complex,
    *,
    tv_tol: float = 1e-6,
    tail_max: float | None = None,
) -> DisplacementInvarianceReport:
    """Compare the M distribution of ``state`` against its displaced version.

    Also verifies that the first circuit stage concentrates a uniform
    displacement ``(alpha, alpha, alpha)`` onto ``(sqrt(3) alpha, 0, 0)``.
    """
    base = outcome_distribution_M(state, tail_max=tail_max)
    displaced_state = apply_unitary(Displace(alpha), state)
    displaced = outcome_distribution_M(displaced_state, tail_max=tail_max)
    tv = base.tv_distance(displaced)

    V = compose_circuit_mode_matrix(three_copy_first_stage(), 3)
    vec = V @ np.array([alpha, alpha, alpha], dtype=np.complex128)
    expected = np.array([math.sqrt(3.0) * alpha, 0.0, 0.0], dtype=np.complex128)
    residual = float(np.max(np.abs(vec - expected)))
    return DisplacementInvarianceReport(
        tv_distance=tv,
        first_stage_vector=tuple(vec),
        vector_residual=residual,
        passed=tv <= tv_tol and residual <= 1e-12,
    )
