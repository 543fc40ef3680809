"""Sector-wise simulation of passive (photon-number-conserving) circuits.

A passive circuit is block diagonal over total-photon-number sectors, and each
sector block is exact regardless of the per-mode cutoff.  Evolving products of
one-mode states sector by sector therefore yields outcome distributions that
are exact for the truncated input, at a fraction of the memory of a full
multi-mode density matrix.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence

import numpy as np

from .distributions import OutcomeDistribution
from .fock import DensityOp, FockArray, State, gate_tail
from .operators import (
    BeamSplitter,
    GaussianUnitarySpec,
    PhaseRotation,
    is_passive,
    passive_hamiltonian,
)

__all__ = [
    "two_copy_elements",
    "two_copy_alt_elements",
    "three_copy_first_stage",
    "three_copy_elements",
    "sector_basis",
    "sector_quadratic",
    "sector_unitary",
    "difference_distribution",
]

# Sector unitaries up to this dimension are kept for reuse across calls.
_CACHE_MAX_DIM = 450
_UNITARY_CACHE: dict[tuple, np.ndarray] = {}

# Sectors whose input weight falls below this floor are skipped; the skipped
# weight is reported in the distribution's tail mass.
WEIGHT_FLOOR = 1e-18


def two_copy_elements() -> tuple[GaussianUnitarySpec, ...]:
    """Two-copy difference circuit: pi/2 rotation on mode 2, then a 50:50 splitter."""
    return (PhaseRotation(math.pi / 2, mode=2), BeamSplitter(1, 2, 0.5))


def two_copy_alt_elements() -> tuple[GaussianUnitarySpec, ...]:
    """Variant with the splitter first and the pi/2 rotation on output mode 1."""
    return (BeamSplitter(1, 2, 0.5), PhaseRotation(math.pi / 2, mode=1))


def three_copy_first_stage() -> tuple[GaussianUnitarySpec, ...]:
    """Balanced three-mode combiner: splitters of transmittance 1/2 and 2/3."""
    return (BeamSplitter(1, 2, 0.5), BeamSplitter(1, 3, 2.0 / 3.0))


def three_copy_elements() -> tuple[GaussianUnitarySpec, ...]:
    """Three-copy difference circuit: combiner, then the two-copy stage on modes 2, 3."""
    return three_copy_first_stage() + (
        PhaseRotation(math.pi / 2, mode=3),
        BeamSplitter(2, 3, 0.5),
    )


@lru_cache(maxsize=None)
def sector_basis(modes: int, n: int) -> np.ndarray:
    """Occupation tuples with total ``n``, lexicographically ordered, shape (dim, modes)."""
    if modes == 1:
        return np.array([[n]], dtype=np.int64)
    rows = []
    for first in range(n + 1):
        rest = sector_basis(modes - 1, n - first)
        block = np.empty((rest.shape[0], modes), dtype=np.int64)
        block[:, 0] = first
        block[:, 1:] = rest
        rows.append(block)
    return np.vstack(rows)


@lru_cache(maxsize=None)
def _sector_index(modes: int, n: int) -> dict[tuple[int, ...], int]:
    basis = sector_basis(modes, n)
    return {tuple(int(v) for v in row): i for i, row in enumerate(basis)}


def sector_quadratic(coefficients: np.ndarray, modes: int, n: int) -> np.ndarray:
    """Dense sector block of ``sum_ab K[a, b] a_a^dag a_b`` (exact, untruncated)."""
    K = np.asarray(coefficients, dtype=np.complex128)
    basis = sector_basis(modes, n)
    index = _sector_index(modes, n)
    dim = basis.shape[0]
    G = np.zeros((dim, dim), dtype=np.complex128)
    G[np.arange(dim), np.arange(dim)] = basis.astype(np.float64) @ np.diag(K)
    for a in range(modes):
        for b in range(modes):
            if a == b or K[a, b] == 0:
                continue
            for src, occ in enumerate(basis):
                if occ[b] == 0:
                    continue
                target = occ.copy()
                target[b] -= 1
                target[a] += 1
                dst = index[tuple(int(v) for v in target)]
                G[dst, src] += K[a, b] * math.sqrt(occ[b] * (occ[a] + 1))
    return G


def _expm_hermitian(H: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(H)
    return (vecs * np.exp(-1j * vals)) @ vecs.conj().T


def sector_unitary(
    elements: tuple[GaussianUnitarySpec, ...], modes: int, n: int
) -> np.ndarray:
    """Exact sector block of the circuit unitary (first element acts first)."""
    key = (elements, modes, n)
    cached = _UNITARY_CACHE.get(key)
    if cached is not None:
        return cached
    for e in elements:
        if not is_passive(e):
            raise ValueError(f"non-passive element {type(e).__name__} in sector circuit")
    dim = sector_basis(modes, n).shape[0]
    U = np.eye(dim, dtype=np.complex128)
    for e in elements:
        h = passive_hamiltonian(e, modes)
        U = _expm_hermitian(sector_quadratic(h, modes, n)) @ U
    if dim <= _CACHE_MAX_DIM:
        _UNITARY_CACHE[key] = U
    return U


def _is_fock_diagonal(rho: DensityOp, tol: float = 1e-13) -> bool:
    off = rho.matrix - np.diag(rho.matrix.diagonal())
    return bool(np.max(np.abs(off)) <= tol)


def difference_distribution(
    state: State,
    elements: Sequence[GaussianUnitarySpec],
    readout: tuple[int, int],
    *,
    modes: int | None = None,
    tail_max: float | None = None,
    weight_floor: float = WEIGHT_FLOOR,
) -> OutcomeDistribution:
    """Distribution of half the output photon-number difference on ``readout``.

    As many identical replicas of the one-mode ``state`` as the circuit has
    modes are fed through it; the returned outcomes are ``twice_d = n_a - n_b``
    for the 1-based readout pair ``(a, b)``.  Computation is exact sector by
    sector; sectors below ``weight_floor`` are skipped and accounted in
    ``tail_mass``.
    """
    if state.truncation.modes != 1:
        raise ValueError("difference_distribution expects a one-mode input state")
    elements = tuple(elements)
    if modes is None:
        modes = max(
            [readout[0], readout[1]]
            + [getattr(e, "mode", 0) for e in elements]
            + [getattr(e, "mode_b", 0) for e in elements]
        )
    copies = modes
    ra, rb = readout[0] - 1, readout[1] - 1

    input_tail = gate_tail(state, tail_max).tail_mass

    if isinstance(state, FockArray):
        amps = state.amplitudes
        support = int(np.max(np.nonzero(np.abs(amps) > 0.0)[0])) if amps.any() else 0
        kind = "pure"
    else:
        diag = np.clip(state.diagonal(), 0.0, None)
        nonzero = np.nonzero(
            np.abs(state.matrix).max(axis=0) + np.abs(state.matrix).max(axis=1) > 0.0
        )[0]
        support = int(nonzero.max()) if nonzero.size else 0
        kind = "diagonal" if _is_fock_diagonal(state) else "mixed"

    probs: dict[int, float] = {}
    skipped = 0.0
    for n in range(copies * support + 1):
        basis = sector_basis(modes, n)
        in_grid = np.flatnonzero((basis <= support).all(axis=1))
        if in_grid.size == 0:
            continue
        sub = basis[in_grid]
        if kind == "pure":
            vec = np.prod(amps[sub], axis=1)
            weight = float(np.vdot(vec, vec).real)
            if weight < weight_floor:
                skipped += weight
                continue
            U = sector_unitary(elements, modes, n)
            out = np.abs(U[:, in_grid] @ vec) ** 2
        elif kind == "diagonal":
            w = np.prod(diag[sub], axis=1)
            weight = float(w.sum())
            if weight < weight_floor:
                skipped += weight
                continue
            U = sector_unitary(elements, modes, n)
            out = (np.abs(U[:, in_grid]) ** 2) @ w
        else:
            R = np.ones((in_grid.size, in_grid.size), dtype=np.complex128)
            for m in range(modes):
                R *= state.matrix[np.ix_(sub[:, m], sub[:, m])]
            weight = float(np.trace(R).real)
            if weight < weight_floor:
                skipped += max(weight, 0.0)
                continue
            U = sector_unitary(elements, modes, n)
            cols = U[:, in_grid]
            out = np.einsum("im,in,mn->i", cols, cols.conj(), R).real
        twice_d = basis[:, ra] - basis[:, rb]
        for d in np.unique(twice_d):
            mass = float(out[twice_d == d].sum())
            if mass != 0.0:
                probs[int(d)] = probs.get(int(d), 0.0) + mass
    return OutcomeDistribution(probs, tail_mass=input_tail + skipped)
