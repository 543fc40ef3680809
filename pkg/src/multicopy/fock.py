"""Truncated multi-mode Fock spaces and elementary state algebra.

Basis convention: the flat index of ``|n1, ..., nk>`` is
``sum_i n_i * (cutoff+1)**(k-i)``, i.e. mode 1 is the most significant digit
(C-order reshape of a ``(cutoff+1,)*k`` tensor).  Mode labels are 1-based
throughout, matching the optical-circuit diagrams.

States are immutable after construction; constructors never renormalize
silently.  Truncation loss is quantified with :func:`tail_mass`, the
probability weight carried by basis states with any occupation number at or
above ``cutoff - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "NORM_TOL",
    "FockTruncation",
    "FockArray",
    "DensityOp",
    "TailReport",
    "TailGateError",
    "TailMassWarning",
    "State",
    "tensor_product",
    "partial_trace",
    "expectation",
    "tail_mass",
    "embed",
    "interior_indices",
    "interior_block",
]

NORM_TOL = 1e-9

MAX_MODES = 3


class TailGateError(RuntimeError):
    """Raised when a computation is blocked by excessive truncation tail."""


class TailMassWarning(UserWarning):
    """Emitted when a result carries a noticeable truncation tail."""


@dataclass(frozen=True)
class FockTruncation:
    """Per-mode photon-number cutoff and mode count of a truncated Fock space."""

    cutoff: int
    modes: int = 1

    def __post_init__(self) -> None:
        if int(self.cutoff) != self.cutoff or self.cutoff < 1:
            raise ValueError(f"cutoff must be an integer >= 1, got {self.cutoff!r}")
        if int(self.modes) != self.modes or not 1 <= self.modes <= MAX_MODES:
            raise ValueError(f"modes must be in 1..{MAX_MODES}, got {self.modes!r}")

    @property
    def local_dim(self) -> int:
        return self.cutoff + 1

    @property
    def dim(self) -> int:
        return self.local_dim ** self.modes

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.local_dim,) * self.modes

    def flat_index(self, occupations: Sequence[int]) -> int:
        """Flat basis index of ``|n1, ..., nk>``."""
        ns = tuple(occupations)
        if len(ns) != self.modes:
            raise ValueError(f"expected {self.modes} occupation numbers, got {len(ns)}")
        for n in ns:
            if not 0 <= n <= self.cutoff:
                raise ValueError(f"occupation {n} outside 0..{self.cutoff}")
        return int(np.ravel_multi_index(ns, self.shape))

    def multi_index(self, flat: int) -> tuple[int, ...]:
        """Occupation numbers ``(n1, ..., nk)`` of a flat basis index."""
        if not 0 <= flat < self.dim:
            raise ValueError(f"flat index {flat} outside 0..{self.dim - 1}")
        return tuple(int(n) for n in np.unravel_index(flat, self.shape))

    def basis_labels(self) -> np.ndarray:
        """Integer array of shape ``(dim, modes)`` listing all occupations."""
        return np.stack(
            np.unravel_index(np.arange(self.dim), self.shape), axis=1
        ).astype(np.int64)


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class FockArray:
    """Pure state on a truncated Fock space as a flat complex amplitude vector."""

    truncation: FockTruncation
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != self.truncation.dim:
            raise ValueError(
                f"amplitude vector has length {amps.size}, expected {self.truncation.dim}"
            )
        if not np.all(np.isfinite(amps.view(np.float64))):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", _freeze(amps))

    @property
    def dim(self) -> int:
        return self.truncation.dim

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def normalize(self) -> "FockArray":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return FockArray(self.truncation, self.amplitudes / n)

    def amplitude(self, occupations: Sequence[int]) -> complex:
        return complex(self.amplitudes[self.truncation.flat_index(occupations)])

    def overlap(self, other: "FockArray") -> complex:
        _check_same_truncation(self, other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def to_density(self) -> "DensityOp":
        return DensityOp(self.truncation, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityOp:
    """Mixed state on a truncated Fock space as a dense complex matrix."""

    truncation: FockTruncation
    matrix: np.ndarray

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix, dtype=np.complex128)
        d = self.truncation.dim
        if mat.shape != (d, d):
            raise ValueError(f"matrix has shape {mat.shape}, expected {(d, d)}")
        if not np.all(np.isfinite(mat.view(np.float64))):
            raise ValueError("matrix entries must be finite")
        object.__setattr__(self, "matrix", _freeze(mat))

    @property
    def dim(self) -> int:
        return self.truncation.dim

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()

    def is_hermitian(self, tol: float = NORM_TOL) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T)) <= tol)

    def normalize(self) -> "DensityOp":
        t = self.trace()
        if t <= 0.0:
            raise ValueError("trace must be positive to normalize")
        return DensityOp(self.truncation, self.matrix / t)

    def validate(self, tol: float = NORM_TOL) -> None:
        """Check Hermiticity, unit trace and spectral positivity."""
        if not self.is_hermitian(tol):
            raise ValueError("density operator is not Hermitian within tolerance")
        if abs(self.trace() - 1.0) > tol:
            raise ValueError(f"trace {self.trace()} differs from 1 beyond tolerance")
        evals = np.linalg.eigvalsh(self.matrix)
        if evals.min() < -tol:
            raise ValueError(f"negative eigenvalue {evals.min()} beyond tolerance")


State = Union[FockArray, DensityOp]


@dataclass(frozen=True)
class TailReport:
    """Probability weight sitting next to the truncation boundary."""

    tail_mass: float

    def __post_init__(self) -> None:
        if not -1e-12 <= self.tail_mass <= 1.0 + 1e-12:
            raise ValueError(f"tail mass {self.tail_mass} outside [0, 1]")


def _check_same_truncation(a, b) -> None:
    if a.truncation != b.truncation:
        raise ValueError(f"truncation mismatch: {a.truncation} vs {b.truncation}")


def tensor_product(a: State, b: State) -> State:
    """Composite of two states of the same kind, mode 1 block most significant."""
    if a.truncation.cutoff != b.truncation.cutoff:
        raise ValueError(
            f"cutoff mismatch: {a.truncation.cutoff} vs {b.truncation.cutoff}"
        )
    modes = a.truncation.modes + b.truncation.modes
    if modes > MAX_MODES:
        raise ValueError(f"composite would have {modes} modes, maximum is {MAX_MODES}")
    trunc = FockTruncation(a.truncation.cutoff, modes)
    if isinstance(a, FockArray) and isinstance(b, FockArray):
        return FockArray(trunc, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DensityOp) and isinstance(b, DensityOp):
        return DensityOp(trunc, np.kron(a.matrix, b.matrix))
    raise TypeError("tensor_product requires two states of the same kind")


def n_copies(state: State, copies: int) -> State:
    """``copies``-fold tensor power of a one-mode state."""
    if state.truncation.modes != 1:
        raise ValueError("n_copies expects a one-mode state")
    out: State = state
    for _ in range(copies - 1):
        out = tensor_product(out, state)
    return out


def partial_trace(rho: DensityOp, keep: Iterable[int]) -> DensityOp:
    """Reduced density operator on the 1-based modes in ``keep``."""
    if not isinstance(rho, DensityOp):
        raise TypeError("partial_trace expects a DensityOp")
    k = rho.truncation.modes
    kept = sorted(set(int(m) for m in keep))
    if not kept:
        raise ValueError("keep set must be nonempty")
    if any(m < 1 or m > k for m in kept):
        raise ValueError(f"keep set {kept} outside modes 1..{k}")
    if len(kept) == k:
        return rho
    d = rho.truncation.local_dim
    tensor = rho.matrix.reshape((d,) * (2 * k))
    row = list(range(k))
    col = [k + i for i in range(k)]
    for m in range(1, k + 1):
        if m not in kept:
            col[m - 1] = row[m - 1]
    out_axes = [row[m - 1] for m in kept] + [col[m - 1] for m in kept]
    reduced = np.einsum(tensor, row + col, out_axes)
    nk = len(kept)
    return DensityOp(
        FockTruncation(rho.truncation.cutoff, nk), reduced.reshape(d**nk, d**nk)
    )


def _as_matrix(op) -> np.ndarray:
    return getattr(op, "matrix", op)


def expectation(op, state: State) -> complex:
    """``<psi|O|psi>`` or ``Tr(rho O)`` for an operator on the same truncation."""
    mat = _as_matrix(op)
    if mat.shape[0] != state.dim:
        raise ValueError(f"operator dimension {mat.shape[0]} != state dimension {state.dim}")
    if isinstance(state, FockArray):
        return complex(np.vdot(state.amplitudes, mat @ state.amplitudes))
    return complex(np.sum((mat @ state.matrix).diagonal()))


def tail_mass(state: State) -> TailReport:
    """Weight on basis states with any occupation ``>= cutoff - 1``."""
    trunc = state.truncation
    labels = trunc.basis_labels()
    mask = (labels >= trunc.cutoff - 1).any(axis=1)
    if isinstance(state, FockArray):
        weights = state.probabilities()
    else:
        weights = np.clip(state.diagonal(), 0.0, None)
    total = float(weights.sum())
    if total <= 0.0:
        return TailReport(0.0)
    return TailReport(float(weights[mask].sum()) / total)


def gate_tail(state: State, tail_max: float | None) -> TailReport:
    """Tail report for ``state``; raises :class:`TailGateError` above ``tail_max``."""
    report = tail_mass(state)
    if tail_max is not None and report.tail_mass > tail_max:
        raise TailGateError(
            f"tail mass {report.tail_mass:.3e} exceeds gate {tail_max:.3e}; "
            "increase the cutoff"
        )
    return report


def embed(state: State, cutoff: int) -> State:
    """Same state expressed at a larger per-mode cutoff (exact zero-padding)."""
    old = state.truncation
    if cutoff < old.cutoff:
        raise ValueError("embed target cutoff must not be smaller")
    if cutoff == old.cutoff:
        return state
    new = FockTruncation(cutoff, old.modes)
    labels = old.basis_labels()
    weights = (new.local_dim) ** np.arange(old.modes - 1, -1, -1, dtype=np.int64)
    idx = labels @ weights
    if isinstance(state, FockArray):
        amps = np.zeros(new.dim, dtype=np.complex128)
        amps[idx] = state.amplitudes
        return FockArray(new, amps)
    mat = np.zeros((new.dim, new.dim), dtype=np.complex128)
    mat[np.ix_(idx, idx)] = state.matrix
    return DensityOp(new, mat)


def interior_indices(
    trunc: FockTruncation,
    *,
    per_mode_margin: int | None = None,
    total_margin: int | None = None,
) -> np.ndarray:
    """Flat indices of basis states away from the truncation boundary.

    ``per_mode_margin=m`` keeps states with every occupation ``<= cutoff - m``;
    ``total_margin=m`` keeps states with total occupation ``<= cutoff - m``.
    """
    labels = trunc.basis_labels()
    mask = np.ones(trunc.dim, dtype=bool)
    if per_mode_margin is not None:
        mask &= (labels <= trunc.cutoff - per_mode_margin).all(axis=1)
    if total_margin is not None:
        mask &= labels.sum(axis=1) <= trunc.cutoff - total_margin
    return np.flatnonzero(mask)


def interior_block(matrix, indices: np.ndarray) -> np.ndarray:
    """Dense sub-block of ``matrix`` on the given row/column index set."""
    mat = _as_matrix(matrix)
    if hasattr(mat, "toarray"):
        mat = mat.toarray()
    return mat[np.ix_(indices, indices)]
