"""Named optical circuits, difference readout, and cross-route equivalence checks.

Circuit documents are ordered JSON arrays of elements (angles in radians,
complex values as ``[re, im]``)::

    [{"kind": "phase_rotation", "theta": 1.5707963267948966, "mode": 2},
     {"kind": "beam_splitter", "modes": [1, 2], "transmittance": 0.5}]

Preset names: ``fig1_two_copy`` (two-copy difference circuit),
``fig3_alternative`` (splitter before the rotation), and ``fig4_three_copy``
(three-copy circuit); ``fig1``/``fig3``/``fig4`` are accepted shorthands.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from .distributions import OutcomeDistribution
from .fock import DensityOp, FockArray, FockTruncation, State, interior_block, interior_indices
from .operators import (
    BeamSplitter,
    Displace,
    GaussianUnitarySpec,
    PhaseRotation,
    Squeeze,
    annihilation,
    apply_circuit,
    compose_circuit_mode_matrix,
    is_passive,
)
from .passive import (
    difference_distribution,
    three_copy_elements,
    two_copy_alt_elements,
    two_copy_elements,
)
from .statespec import StateSpecError, complex_to_json, parse_complex
from .two_copy import build_angular_components, outcome_distribution_Lz
from .three_copy import outcome_distribution_M

__all__ = [
    "CircuitSpec",
    "DifferenceReadout",
    "PRESET_NAMES",
    "run_circuit",
    "photon_difference_distribution",
    "sample_differences",
    "lz_distribution_via_circuit",
    "verify_operator_table",
    "OperatorTableReport",
    "circuit_vs_projector_equivalence",
    "EquivalenceReport",
]

PRESET_NAMES = ("fig1_two_copy", "fig3_alternative", "fig4_three_copy")

_PRESET_ALIASES = {
    "fig1": "fig1_two_copy",
    "fig3": "fig3_alternative",
    "fig4": "fig4_three_copy",
}

_PRESETS: dict[str, tuple[tuple[GaussianUnitarySpec, ...], int, tuple[int, int]]] = {
    "fig1_two_copy": (two_copy_elements(), 2, (1, 2)),
    "fig3_alternative": (two_copy_alt_elements(), 2, (1, 2)),
    "fig4_three_copy": (three_copy_elements(), 3, (2, 3)),
}


@dataclass(frozen=True)
class CircuitSpec:
    """A named preset or an explicit ordered element list."""

    elements: tuple[GaussianUnitarySpec, ...]
    modes: int
    name: str | None = None
    default_readout: tuple[int, int] | None = None

    @classmethod
    def preset(cls, name: str) -> "CircuitSpec":
        resolved = _PRESET_ALIASES.get(name, name)
        if resolved not in _PRESETS:
            raise ValueError(f"unknown circuit preset {name!r}; known: {PRESET_NAMES}")
        elements, modes, readout = _PRESETS[resolved]
        return cls(elements, modes, resolved, readout)

    @classmethod
    def from_elements(
        cls, elements: Sequence[GaussianUnitarySpec], modes: int | None = None
    ) -> "CircuitSpec":
        elements = tuple(elements)
        if modes is None:
            modes = max(
                [1]
                + [getattr(e, "mode", 0) for e in elements]
                + [getattr(e, "mode_b", 0) for e in elements]
                + [getattr(e, "mode_a", 0) for e in elements]
            )
        return cls(elements, modes)

    @property
    def passive(self) -> bool:
        return all(is_passive(e) for e in self.elements)

    def mode_matrix(self) -> np.ndarray:
        return compose_circuit_mode_matrix(self.elements, self.modes)

    # -- JSON serialization ------------------------------------------------

    @classmethod
    def from_json(cls, text: str) -> "CircuitSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise StateSpecError(f"invalid circuit JSON: {exc}") from exc
        return cls.from_list(data)

    @classmethod
    def from_list(cls, data: Any) -> "CircuitSpec":
        if not isinstance(data, (list, tuple)):
            raise StateSpecError("circuit document must be an array of elements")
        elements = tuple(_element_from_dict(item, i) for i, item in enumerate(data))
        return cls.from_elements(elements)

    def to_list(self) -> list[dict[str, Any]]:
        return [_element_to_dict(e) for e in self.elements]


def _element_from_dict(item: Any, position: int) -> GaussianUnitarySpec:
    if not isinstance(item, Mapping):
        raise StateSpecError(f"circuit element {position}: expected an object")
    kind = item.get("kind")
    try:
        if kind == "phase_rotation":
            return PhaseRotation(float(item["theta"]), int(item.get("mode", 1)))
        if kind == "beam_splitter":
            modes = item["modes"]
            return BeamSplitter(
                int(modes[0]),
                int(modes[1]),
                float(item["transmittance"]),
                str(item.get("convention", "symmetric")),
            )
        if kind == "squeeze":
            return Squeeze(parse_complex(item["s"], "s"), int(item.get("mode", 1)))
        if kind == "displace":
            return Displace(parse_complex(item["alpha"], "alpha"), int(item.get("mode", 1)))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise StateSpecError(f"circuit element {position}: {exc}") from exc
    raise StateSpecError(f"circuit element {position}: unknown kind {kind!r}")


def _element_to_dict(e: GaussianUnitarySpec) -> dict[str, Any]:
    if isinstance(e, PhaseRotation):
        return {"kind": "phase_rotation", "theta": e.theta, "mode": e.mode}
    if isinstance(e, BeamSplitter):
        return {
            "kind": "beam_splitter",
            "modes": [e.mode_a, e.mode_b],
            "transmittance": e.transmittance,
            "convention": e.convention,
        }
    if isinstance(e, Squeeze):
        return {"kind": "squeeze", "s": complex_to_json(e.s), "mode": e.mode}
    if isinstance(e, Displace):
        return {"kind": "displace", "alpha": complex_to_json(e.alpha), "mode": e.mode}
    raise TypeError(f"unsupported element {e!r}")


def run_circuit(
    circuit: CircuitSpec, state: State, *, tail_max: float | None = None
) -> State:
    """Evolve a multi-mode state through the circuit at the state's truncation."""
    if state.truncation.modes != circuit.modes:
        raise ValueError(
            f"state has {state.truncation.modes} modes, circuit needs {circuit.modes}"
        )
    return apply_circuit(circuit.elements, state, tail_max=tail_max)


@dataclass(frozen=True)
class DifferenceReadout:
    """Distribution of half the photon-number difference of a mode pair."""

    modes: tuple[int, int]
    distribution: OutcomeDistribution


def photon_difference_distribution(
    state: State, mode_pair: tuple[int, int]
) -> DifferenceReadout:
    """Readout ``d = (n_a - n_b)/2`` from the diagonal of the pair's marginal."""
    k = state.truncation.modes
    a, b = mode_pair
    if not (1 <= a <= k and 1 <= b <= k) or a == b:
        raise ValueError(f"invalid readout pair {mode_pair} for {k} modes")
    shape = state.truncation.shape
    if isinstance(state, FockArray):
        weights = state.probabilities().reshape(shape)
    else:
        weights = np.clip(state.diagonal(), 0.0, None).reshape(shape)
    keep_axes = (a - 1, b - 1)
    other = tuple(ax for ax in range(k) if ax not in keep_axes)
    joint = weights.sum(axis=other) if other else weights
    if a > b:
        joint = joint.T
    d = state.truncation.local_dim
    probs: dict[int, float] = {}
    for na in range(d):
        for nb in range(d):
            p = float(joint[na, nb])
            if p != 0.0:
                probs[na - nb] = probs.get(na - nb, 0.0) + p
    return DifferenceReadout((a, b), OutcomeDistribution(probs))


def sample_differences(
    readout: DifferenceReadout, n_samples: int, seed: int
) -> np.ndarray:
    """Seeded demonstration sampler over ``twice_d`` outcomes."""
    dist = readout.distribution
    keys = np.array(sorted(dist.probs), dtype=np.int64)
    p = np.array([dist.probs[k] for k in keys])
    p = p / p.sum()
    rng = np.random.default_rng(seed)
    return rng.choice(keys, size=n_samples, p=p)


def lz_distribution_via_circuit(
    state: State, *, tail_max: float | None = None
) -> OutcomeDistribution:
    """Two-copy observable statistics via the difference circuit (exact per sector)."""
    return difference_distribution(
        state, two_copy_elements(), readout=(1, 2), modes=2, tail_max=tail_max
    )


# ---------------------------------------------------------------------------
# Operator-table and route-equivalence reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OperatorTableReport:
    """Entrywise residuals of every operator form against the canonical one."""

    residuals: dict[tuple[str, str], float]
    tolerance: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tolerance


def verify_operator_table(
    trunc: FockTruncation,
    *,
    tolerance: float = 1e-9,
    bs_convention: str = "symmetric",
) -> OperatorTableReport:
    """Check the component table in input, output, and alternative output modes.

    Each angular momentum component has three quadratic expressions: in the
    input modes ``a``, in the outputs ``b`` of the difference circuit, and in
    the outputs ``c`` of the variant circuit.  All must agree entrywise on the
    interior block.  ``bs_convention`` exists for fault-injection tests.
    """
    if trunc.modes != 2:
        raise ValueError("operator table is defined on a 2-mode truncation")
    ops = build_angular_components(trunc)
    A = [annihilation(trunc, m).matrix for m in (1, 2)]

    def linear_combination(V_row: np.ndarray):
        return V_row[0] * A[0] + V_row[1] * A[1]

    def with_convention(elements):
        fixed = []
        for e in elements:
            if isinstance(e, BeamSplitter):
                fixed.append(
                    BeamSplitter(e.mode_a, e.mode_b, e.transmittance, bs_convention)
                )
            else:
                fixed.append(e)
        return tuple(fixed)

    Vb = compose_circuit_mode_matrix(with_convention(two_copy_elements()), 2)
    Vc = compose_circuit_mode_matrix(with_convention(two_copy_alt_elements()), 2)
    B = [linear_combination(Vb[i]) for i in range(2)]
    C = [linear_combination(Vc[i]) for i in range(2)]

    forms = {
        ("lx", "a"): 0.5 * (A[0].getH() @ A[0] - A[1].getH() @ A[1]),
        ("ly", "a"): 0.5 * (A[0].getH() @ A[1] + A[0] @ A[1].getH()),
        ("lz", "a"): 0.5j * (A[0] @ A[1].getH() - A[0].getH() @ A[1]),
        ("lx", "b"): 0.5 * (B[0] @ B[1].getH() + B[0].getH() @ B[1]),
        ("ly", "b"): 0.5j * (B[0] @ B[1].getH() - B[0].getH() @ B[1]),
        ("lz", "b"): 0.5 * (B[0].getH() @ B[0] - B[1].getH() @ B[1]),
        ("lx", "c"): 0.5j * (C[0] @ C[1].getH() - C[0].getH() @ C[1]),
        ("ly", "c"): 0.5 * (C[0].getH() @ C[0] - C[1].getH() @ C[1]),
        ("lz", "c"): 0.5 * (C[0] @ C[1].getH() + C[0].getH() @ C[1]),
    }
    canonical = {"lx": ops.lx.matrix, "ly": ops.ly.matrix, "lz": ops.lz.matrix}
    idx = interior_indices(trunc, per_mode_margin=1)
    residuals = {}
    for (component, frame), matrix in forms.items():
        delta = interior_block(matrix - canonical[component], idx)
        residuals[(component, frame)] = float(np.max(np.abs(delta)))
    return OperatorTableReport(residuals, tolerance)


@dataclass(frozen=True)
class EquivalenceReport:
    """Total-variation distances between circuit readout and projector routes."""

    tv_two_copy: float
    tv_three_copy: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return max(self.tv_two_copy, self.tv_three_copy) < self.tolerance


def circuit_vs_projector_equivalence(
    state: State,
    *,
    tolerance: float = 1e-6,
    tail_max: float | None = None,
) -> EquivalenceReport:
    """Readout distributions of both circuits against their projector routes."""
    lz_circ = lz_distribution_via_circuit(state, tail_max=tail_max)
    lz_proj = outcome_distribution_Lz(state, tail_max=tail_max)
    m_circ = outcome_distribution_M(state, route="circuit", tail_max=tail_max)
    m_diag = outcome_distribution_M(state, route="diagonalization", tail_max=tail_max)
    return EquivalenceReport(
        lz_circ.tv_distance(lz_proj), m_circ.tv_distance(m_diag), tolerance
    )
