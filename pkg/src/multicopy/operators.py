"""Ladder and quadrature operators, Gaussian unitaries, and state constructors.

Conventions (hbar = 1): ``a = (x + i p)/sqrt(2)``, a phase rotation by ``theta``
maps ``a -> exp(-i theta) a`` in the Heisenberg picture, the squeezing operator
is ``S(s) = exp((conj(s) a^2 - s a^dag^2)/2)`` with ``s = r exp(i phi)``, and a
beam splitter of transmittance ``t`` defaults to the real symmetric mode matrix
``[[sqrt(t), sqrt(1-t)], [sqrt(1-t), -sqrt(t)]]``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .fock import (
    DensityOp,
    FockArray,
    FockTruncation,
    State,
    TailMassWarning,
    TailReport,
    interior_indices,
    tail_mass,
)
from .statespec import StateSpec

__all__ = [
    "ModeOperator",
    "annihilation",
    "creation",
    "number",
    "quadrature_x",
    "quadrature_p",
    "identity",
    "quadratic_operator",
    "PhaseRotation",
    "Squeeze",
    "Displace",
    "BeamSplitter",
    "GaussianUnitarySpec",
    "is_passive",
    "mode_matrix",
    "passive_hamiltonian",
    "generator",
    "unitary_matrix",
    "circuit_unitary",
    "apply_unitary",
    "compose_circuit_mode_matrix",
    "make_state",
    "vacuum_state",
    "fock_state",
    "coherent_state",
    "squeezed_vacuum_state",
    "thermal_state",
    "displaced_squeezed_thermal_state",
    "mixture_state",
]


@dataclass(frozen=True)
class ModeOperator:
    """Sparse operator on a truncated Fock space, tagged with its truncation."""

    truncation: FockTruncation
    matrix: sp.spmatrix
    hermitian: bool = False

    def __post_init__(self) -> None:
        mat = sp.csr_matrix(self.matrix, dtype=np.complex128)
        d = self.truncation.dim
        if mat.shape != (d, d):
            raise ValueError(f"operator shape {mat.shape}, expected {(d, d)}")
        if self.hermitian:
            delta = abs(mat - mat.getH())
            if delta.count_nonzero() and delta.max() > 1e-10:
                raise ValueError("operator flagged Hermitian is not Hermitian")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.truncation.dim

    def dag(self) -> "ModeOperator":
        return ModeOperator(self.truncation, self.matrix.getH(), self.hermitian)

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def apply(self, state: FockArray) -> FockArray:
        if state.truncation != self.truncation:
            raise ValueError("truncation mismatch between operator and state")
        return FockArray(self.truncation, self.matrix @ state.amplitudes)

    def _coerce(self, other) -> sp.spmatrix:
        if isinstance(other, ModeOperator):
            if other.truncation != self.truncation:
                raise ValueError("truncation mismatch between operators")
            return other.matrix
        return other

    def __matmul__(self, other) -> "ModeOperator":
        return ModeOperator(self.truncation, self.matrix @ self._coerce(other))

    def __add__(self, other) -> "ModeOperator":
        return ModeOperator(self.truncation, self.matrix + self._coerce(other))

    def __sub__(self, other) -> "ModeOperator":
        return ModeOperator(self.truncation, self.matrix - self._coerce(other))

    def __neg__(self) -> "ModeOperator":
        return ModeOperator(self.truncation, -self.matrix)

    def __mul__(self, scalar) -> "ModeOperator":
        return ModeOperator(self.truncation, self.matrix * scalar)

    __rmul__ = __mul__


def _check_mode(trunc: FockTruncation, mode: int) -> None:
    if not 1 <= mode <= trunc.modes:
        raise ValueError(f"mode {mode} outside 1..{trunc.modes}")


def _single_mode_destroy(local_dim: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, local_dim)), 1, format="csr", dtype=np.complex128)


def _embed_single(trunc: FockTruncation, mode: int, op: sp.spmatrix) -> sp.csr_matrix:
    d = trunc.local_dim
    mat = sp.identity(1, dtype=np.complex128, format="csr")
    for m in range(1, trunc.modes + 1):
        factor = op if m == mode else sp.identity(d, dtype=np.complex128, format="csr")
        mat = sp.kron(mat, factor, format="csr")
    return mat


def annihilation(trunc: FockTruncation, mode: int = 1) -> ModeOperator:
    """Truncated annihilation operator of the given mode."""
    _check_mode(trunc, mode)
    return ModeOperator(trunc, _embed_single(trunc, mode, _single_mode_destroy(trunc.local_dim)))


def creation(trunc: FockTruncation, mode: int = 1) -> ModeOperator:
    return annihilation(trunc, mode).dag()


def number(trunc: FockTruncation, mode: int = 1) -> ModeOperator:
    _check_mode(trunc, mode)
    diag = sp.diags(np.arange(trunc.local_dim, dtype=np.complex128), 0, format="csr")
    return ModeOperator(trunc, _embed_single(trunc, mode, diag), hermitian=True)


def quadrature_x(trunc: FockTruncation, mode: int = 1) -> ModeOperator:
    a = annihilation(trunc, mode).matrix
    return ModeOperator(trunc, (a + a.getH()) / math.sqrt(2), hermitian=True)


def quadrature_p(trunc: FockTruncation, mode: int = 1) -> ModeOperator:
    a = annihilation(trunc, mode).matrix
    return ModeOperator(trunc, (a - a.getH()) / (1j * math.sqrt(2)), hermitian=True)


def identity(trunc: FockTruncation) -> ModeOperator:
    return ModeOperator(trunc, sp.identity(trunc.dim, dtype=np.complex128, format="csr"), True)


def quadratic_operator(coefficients: np.ndarray, trunc: FockTruncation) -> ModeOperator:
    """``sum_ab K[a, b] a_a^dag a_b`` for a ``modes x modes`` coefficient matrix."""
    K = np.asarray(coefficients, dtype=np.complex128)
    k = trunc.modes
    if K.shape != (k, k):
        raise ValueError(f"coefficient matrix shape {K.shape}, expected {(k, k)}")
    ops = [annihilation(trunc, m + 1).matrix for m in range(k)]
    total = sp.csr_matrix((trunc.dim, trunc.dim), dtype=np.complex128)
    for a in range(k):
        for b in range(k):
            if K[a, b] != 0:
                total = total + K[a, b] * (ops[a].getH() @ ops[b])
    hermitian = bool(np.max(np.abs(K - K.conj().T)) < 1e-12)
    return ModeOperator(trunc, total, hermitian=hermitian)


# ---------------------------------------------------------------------------
# Gaussian unitary specifications
# ---------------------------------------------------------------------------

SYMMETRIC = "symmetric"
ROTATION = "rotation"


@dataclass(frozen=True)
class PhaseRotation:
    """Phase rotation by ``theta`` radians on one mode: ``a -> exp(-i theta) a``."""

    theta: float
    mode: int = 1


@dataclass(frozen=True)
class Squeeze:
    """Single-mode squeezing with complex parameter ``s = r exp(i phi)``."""

    s: complex
    mode: int = 1


@dataclass(frozen=True)
class Displace:
    """Displacement ``D(alpha) = exp(alpha a^dag - conj(alpha) a)``."""

    alpha: complex
    mode: int = 1


@dataclass(frozen=True)
class BeamSplitter:
    """Two-mode beam splitter of transmittance ``t``.

    The default ``symmetric`` convention uses the real involutive mode matrix
    ``[[sqrt(t), sqrt(1-t)], [sqrt(1-t), -sqrt(t)]]``; ``rotation`` uses the
    proper rotation ``[[sqrt(t), -sqrt(1-t)], [sqrt(1-t), sqrt(t)]]``.
    """

    mode_a: int
    mode_b: int
    transmittance: float
    convention: str = SYMMETRIC

    def __post_init__(self) -> None:
        if self.mode_a == self.mode_b:
            raise ValueError("beam splitter modes must be distinct")
        if not 0.0 <= self.transmittance <= 1.0:
            raise ValueError(f"transmittance {self.transmittance} outside [0, 1]")
        if self.convention not in (SYMMETRIC, ROTATION):
            raise ValueError(f"unknown beam-splitter convention {self.convention!r}")


GaussianUnitarySpec = Union[PhaseRotation, Squeeze, Displace, BeamSplitter]


def is_passive(spec: GaussianUnitarySpec) -> bool:
    return isinstance(spec, (PhaseRotation, BeamSplitter))


def _bs_block(spec: BeamSplitter) -> np.ndarray:
    ct = math.sqrt(spec.transmittance)
    st = math.sqrt(1.0 - spec.transmittance)
    if spec.convention == SYMMETRIC:
        return np.array([[ct, st], [st, -ct]], dtype=np.complex128)
    return np.array([[ct, -st], [st, ct]], dtype=np.complex128)


def mode_matrix(spec: GaussianUnitarySpec, modes: int) -> np.ndarray:
    """Heisenberg-picture linear map of mode operators for a passive element."""
    V = np.eye(modes, dtype=np.complex128)
    if isinstance(spec, PhaseRotation):
        V[spec.mode - 1, spec.mode - 1] = np.exp(-1j * spec.theta)
        return V
    if isinstance(spec, BeamSplitter):
        idx = [spec.mode_a - 1, spec.mode_b - 1]
        V[np.ix_(idx, idx)] = _bs_block(spec)
        return V
    raise ValueError(f"{type(spec).__name__} is not a passive element")


def passive_hamiltonian(spec: GaussianUnitarySpec, modes: int) -> np.ndarray:
    """Hermitian ``h`` with ``mode_matrix = expm(-i h)`` for a passive element."""
    h = np.zeros((modes, modes), dtype=np.complex128)
    if isinstance(spec, PhaseRotation):
        h[spec.mode - 1, spec.mode - 1] = spec.theta
        return h
    if isinstance(spec, BeamSplitter):
        idx = [spec.mode_a - 1, spec.mode_b - 1]
        V = _bs_block(spec)
        if spec.convention == SYMMETRIC:
            # V is an involution; exp(i*pi*(I - V)/2) = V exactly.
            block = -math.pi * (np.eye(2) - V) / 2.0
        else:
            phi = math.atan2(math.sqrt(1.0 - spec.transmittance), math.sqrt(spec.transmittance))
            block = phi * np.array([[0.0, -1j], [1j, 0.0]])
        h[np.ix_(idx, idx)] = block
        return h
    raise ValueError(f"{type(spec).__name__} is not a passive element")


def generator(spec: GaussianUnitarySpec, trunc: FockTruncation) -> sp.csr_matrix:
    """Anti-Hermitian sparse ``A`` with the element's unitary ``U = expm(A)``."""
    if is_passive(spec):
        h = passive_hamiltonian(spec, trunc.modes)
        return sp.csr_matrix(-1j * quadratic_operator(h, trunc).matrix)
    if isinstance(spec, Displace):
        _check_mode(trunc, spec.mode)
        a = annihilation(trunc, spec.mode).matrix
        return sp.csr_matrix(spec.alpha * a.getH() - np.conj(spec.alpha) * a)
    if isinstance(spec, Squeeze):
        _check_mode(trunc, spec.mode)
        a = annihilation(trunc, spec.mode).matrix
        a2 = a @ a
        return sp.csr_matrix((np.conj(spec.s) * a2 - spec.s * a2.getH()) / 2.0)
    raise TypeError(f"unsupported element {spec!r}")


def unitary_matrix(spec: GaussianUnitarySpec, trunc: FockTruncation) -> np.ndarray:
    """Dense unitary of one element via eigendecomposition of its generator."""
    H = (1j * generator(spec, trunc)).toarray()
    vals, vecs = np.linalg.eigh(H)
    return (vecs * np.exp(-1j * vals)) @ vecs.conj().T


def circuit_unitary(specs: Sequence[GaussianUnitarySpec], trunc: FockTruncation) -> np.ndarray:
    """Dense unitary of an ordered element sequence (first element acts first)."""
    U = np.eye(trunc.dim, dtype=np.complex128)
    for spec in specs:
        U = unitary_matrix(spec, trunc) @ U
    return U


def apply_unitary(
    spec: GaussianUnitarySpec, state: State, *, tail_max: float | None = None
) -> State:
    """Evolve a state by one Gaussian element at the state's truncation.

    Norm is preserved up to truncation effects; when ``tail_max`` is given and
    the result's tail mass exceeds it, a :class:`TailMassWarning` is emitted.
    """
    trunc = state.truncation
    if isinstance(state, FockArray):
        amps = expm_multiply(generator(spec, trunc), state.amplitudes)
        out: State = FockArray(trunc, amps)
    else:
        U = unitary_matrix(spec, trunc)
        out = DensityOp(trunc, U @ state.matrix @ U.conj().T)
    if tail_max is not None:
        report = tail_mass(out)
        if report.tail_mass > tail_max:
            warnings.warn(
                f"tail mass {report.tail_mass:.3e} exceeds {tail_max:.3e} after "
                f"{type(spec).__name__}",
                TailMassWarning,
                stacklevel=2,
            )
    return out


def apply_circuit(
    specs: Sequence[GaussianUnitarySpec], state: State, *, tail_max: float | None = None
) -> State:
    for spec in specs:
        state = apply_unitary(spec, state, tail_max=tail_max)
    return state


def compose_circuit_mode_matrix(
    specs: Sequence[GaussianUnitarySpec], modes: int
) -> np.ndarray:
    """Heisenberg map ``a_i -> sum_j V[i, j] a_j`` of a passive element sequence."""
    for spec in specs:
        if not is_passive(spec):
            raise ValueError(f"non-passive element {type(spec).__name__} in circuit")
    V = np.eye(modes, dtype=np.complex128)
    for spec in specs:
        V = mode_matrix(spec, modes) @ V
    return V


# ---------------------------------------------------------------------------
# State constructors
# ---------------------------------------------------------------------------


def vacuum_state(trunc: FockTruncation) -> FockArray:
    amps = np.zeros(trunc.dim, dtype=np.complex128)
    amps[0] = 1.0
    return FockArray(trunc, amps)


def fock_state(trunc: FockTruncation, n: int) -> FockArray:
    """One-mode photon-number state ``|n>``."""
    if trunc.modes != 1:
        raise ValueError("fock_state builds one-mode states")
    if not 0 <= n <= trunc.cutoff:
        raise ValueError(f"photon number {n} outside 0..{trunc.cutoff}")
    amps = np.zeros(trunc.dim, dtype=np.complex128)
    amps[n] = 1.0
    return FockArray(trunc, amps)


def coherent_state(trunc: FockTruncation, alpha: complex) -> FockArray:
    """Truncated coherent state, renormalized over the kept amplitudes."""
    if trunc.modes != 1:
        raise ValueError("coherent_state builds one-mode states")
    n = np.arange(trunc.local_dim)
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, trunc.local_dim)))))
    amps = np.exp(n * np.log(complex(alpha)) - log_fact / 2.0) if alpha != 0 else None
    if amps is None:
        return vacuum_state(trunc)
    amps = np.asarray(amps, dtype=np.complex128)
    amps *= math.exp(-abs(alpha) ** 2 / 2.0)
    return FockArray(trunc, amps).normalize()


def squeezed_vacuum_state(trunc: FockTruncation, s: complex) -> FockArray:
    """Truncated squeezed vacuum ``S(s)|0>``, renormalized over the kept amplitudes.

    Amplitudes follow from ``(cosh r a + exp(i phi) sinh r a^dag) S(s)|0> = 0``:
    only even occupations appear, with
    ``c_{2k} = (-exp(i phi) tanh r)^k sqrt((2k-1)!!/(2k)!!) / sqrt(cosh r)``.
    """
    if trunc.modes != 1:
        raise ValueError("squeezed_vacuum_state builds one-mode states")
    r = abs(s)
    if r == 0.0:
        return vacuum_state(trunc)
    phase = s / r
    amps = np.zeros(trunc.dim, dtype=np.complex128)
    c = 1.0 / math.sqrt(math.cosh(r))
    amps[0] = c
    ratio = -phase * math.tanh(r)
    k = 1
    while 2 * k <= trunc.cutoff:
        c = c * ratio * math.sqrt((2 * k - 1) / (2 * k))
        amps[2 * k] = c
        k += 1
    return FockArray(trunc, amps).normalize()


def thermal_state(trunc: FockTruncation, mean_n: float) -> DensityOp:
    """Truncated thermal state with geometric photon statistics, renormalized."""
    if trunc.modes != 1:
        raise ValueError("thermal_state builds one-mode states")
    if mean_n < 0:
        raise ValueError(f"mean photon number must be >= 0, got {mean_n}")
    n = np.arange(trunc.local_dim, dtype=np.float64)
    if mean_n == 0.0:
        probs = np.zeros(trunc.local_dim)
        probs[0] = 1.0
    else:
        probs = (mean_n / (mean_n + 1.0)) ** n / (mean_n + 1.0)
        probs /= probs.sum()
    return DensityOp(trunc, np.diag(probs.astype(np.complex128)))


def displaced_squeezed_thermal_state(
    trunc: FockTruncation, alpha: complex, s: complex, mean_n: float
) -> State:
    """``D(alpha) S(s) rho_th(mean_n) S^dag D^dag``; pure when ``mean_n == 0``."""
    if mean_n == 0.0:
        state: State = squeezed_vacuum_state(trunc, s) if s != 0 else vacuum_state(trunc)
    else:
        state = thermal_state(trunc, mean_n)
        if s != 0:
            state = apply_unitary(Squeeze(s), state)
    if alpha != 0:
        state = apply_unitary(Displace(alpha), state)
    return state


def mixture_state(
    trunc: FockTruncation, components: Sequence[tuple[float, State]]
) -> DensityOp:
    """Convex mixture of states on the same truncation."""
    if not components:
        raise ValueError("mixture needs at least one component")
    weights = np.array([w for w, _ in components], dtype=np.float64)
    if np.any(weights < -1e-12) or abs(weights.sum() - 1.0) > 1e-9:
        raise ValueError("mixture weights must be nonnegative and sum to 1")
    mat = np.zeros((trunc.dim, trunc.dim), dtype=np.complex128)
    for w, comp in components:
        if comp.truncation != trunc:
            raise ValueError("mixture component truncation mismatch")
        rho = comp.to_density() if isinstance(comp, FockArray) else comp
        mat += w * rho.matrix
    return DensityOp(trunc, mat)


def make_state(
    spec: StateSpec,
    cutoff: int,
    *,
    tail_max: float | None = None,
    strict: bool = False,
) -> tuple[State, TailReport]:
    """Build the state described by ``spec`` at the requested cutoff.

    Returns the state together with its tail report.  If ``tail_max`` is given
    and exceeded, a :class:`TailMassWarning` is emitted, or a ``ValueError`` is
    raised when ``strict`` is set.
    """
    trunc = FockTruncation(cutoff, 1)
    kind = spec.kind
    p = spec.param_dict
    if kind == "vacuum":
        state: State = vacuum_state(trunc)
    elif kind == "fock":
        state = fock_state(trunc, int(p["n"]))
    elif kind == "coherent":
        state = coherent_state(trunc, p["alpha"])
    elif kind == "squeezed":
        state = squeezed_vacuum_state(trunc, p["s"])
    elif kind == "thermal":
        state = thermal_state(trunc, float(p["mean_n"]))
    elif kind == "displaced_squeezed_thermal":
        state = displaced_squeezed_thermal_state(
            trunc, p.get("alpha", 0j), p.get("s", 0j), float(p.get("mean_n", 0.0))
        )
    elif kind == "mixture":
        parts = []
        for weight, sub in p["components"]:
            sub_state, _ = make_state(sub, cutoff)
            parts.append((weight, sub_state))
        state = mixture_state(trunc, parts)
    else:
        raise ValueError(f"unknown state kind {kind!r}")
    report = tail_mass(state)
    if tail_max is not None and report.tail_mass > tail_max:
        message = (
            f"state {kind!r} at cutoff {cutoff} has tail mass "
            f"{report.tail_mass:.3e} > {tail_max:.3e}"
        )
        if strict:
            raise ValueError(message)
        warnings.warn(message, TailMassWarning, stacklevel=2)
    return state, report


def interior_commutator_check(trunc: FockTruncation) -> float:
    """Max deviation of ``[x, p] - i`` on states with occupation headroom."""
    x = quadrature_x(trunc).matrix
    p = quadrature_p(trunc).matrix
    comm = (x @ p - p @ x).toarray()
    idx = interior_indices(trunc, per_mode_margin=1)
    target = 1j * np.eye(trunc.dim)
    return float(np.max(np.abs((comm - target)[np.ix_(idx, idx)])))
