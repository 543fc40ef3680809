"""One-mode covariance calculus and Gaussian closed-form entropies.

The covariance matrix uses hbar = 1 quadratures,

    gamma = [[<x^2> - <x>^2,        <{x,p}>/2 - <x><p>],
             [<{x,p}>/2 - <x><p>,   <p^2> - <p>^2     ]],

so the minimum-uncertainty bound reads ``det gamma >= 1/4`` and the one-mode
symplectic eigenvalue is ``nu = sqrt(det gamma)`` (``nu = 1/2`` for every pure
Gaussian state).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import FockTruncation, State, embed, expectation
from .operators import quadrature_p, quadrature_x

__all__ = [
    "CovarianceState",
    "SymplecticSummary",
    "SRCheck",
    "ClosedFormEntropies",
    "covariance_of",
    "raw_second_moment_matrix",
    "symplectic_summary",
    "sr_check",
    "gaussian_entropy_closed_forms",
    "e_function",
    "gaussian_entropy_rows",
]

LN_PI_E = math.log(math.pi) + 1.0

# Operator headroom used when evaluating quadrature moments, so that the
# moments are exact for the state's amplitudes rather than polluted by the
# truncated matrix boundary.
_MOMENT_HEADROOM = 2


@dataclass(frozen=True)
class CovarianceState:
    """2x2 quadrature covariance matrix plus the vector of quadrature means."""

    gamma: np.ndarray
    mean: np.ndarray

    def __post_init__(self) -> None:
        gamma = np.asarray(self.gamma, dtype=np.float64)
        mean = np.asarray(self.mean, dtype=np.float64)
        if gamma.shape != (2, 2):
            raise ValueError(f"gamma must be 2x2, got {gamma.shape}")
        if mean.shape != (2,):
            raise ValueError(f"mean must be length 2, got {mean.shape}")
        if abs(gamma[0, 1] - gamma[1, 0]) > 1e-9:
            raise ValueError("gamma must be symmetric")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "mean", mean)

    @property
    def det_gamma(self) -> float:
        return float(np.linalg.det(self.gamma))


@dataclass(frozen=True)
class SymplecticSummary:
    """One-mode symplectic data: det gamma, nu = sqrt(det), purity = 1/(2 nu)."""

    det_gamma: float
    nu: float
    purity: float


@dataclass(frozen=True)
class SRCheck:
    """Result of the minimum-uncertainty determinant check."""

    det_gamma: float
    bound: float
    satisfied: bool


@dataclass(frozen=True)
class ClosedFormEntropies:
    """Gaussian closed forms: difference-observable entropy and h(x, p)."""

    h_lz: float
    h_xp: float


def _moments(state: State) -> tuple[float, float, float, float, float]:
    if state.truncation.modes != 1:
        raise ValueError("covariance calculus expects a one-mode state")
    work = embed(state, state.truncation.cutoff + _MOMENT_HEADROOM)
    trunc = work.truncation
    X = quadrature_x(trunc).matrix
    P = quadrature_p(trunc).matrix
    mx = expectation(X, work).real
    mp = expectation(P, work).real
    mxx = expectation(X @ X, work).real
    mpp = expectation(P @ P, work).real
    mxp_sym = expectation(X @ P + P @ X, work).real / 2.0
    return mx, mp, mxx, mpp, mxp_sym


def covariance_of(state: State) -> CovarianceState:
    """Covariance matrix and quadrature means of a one-mode state."""
    mx, mp, mxx, mpp, mxp_sym = _moments(state)
    gamma = np.array(
        [[mxx - mx * mx, mxp_sym - mx * mp], [mxp_sym - mx * mp, mpp - mp * mp]]
    )
    return CovarianceState(gamma, np.array([mx, mp]))


def raw_second_moment_matrix(state: State) -> CovarianceState:
    """Second-moment matrix without mean subtraction (centered-state convention)."""
    mx, mp, mxx, mpp, mxp_sym = _moments(state)
    gamma = np.array([[mxx, mxp_sym], [mxp_sym, mpp]])
    return CovarianceState(gamma, np.array([mx, mp]))


def symplectic_summary(cov: CovarianceState) -> SymplecticSummary:
    det = cov.det_gamma
    if det < 0:
        raise ValueError(f"covariance determinant {det} is negative")
    nu = math.sqrt(det)
    return SymplecticSummary(det, nu, 1.0 / (2.0 * nu) if nu > 0 else math.inf)


def sr_check(cov: CovarianceState, tol: float = 1e-9) -> SRCheck:
    """Check ``det gamma >= 1/4`` within tolerance."""
    det = cov.det_gamma
    return SRCheck(det, 0.25, det >= 0.25 - tol)


def gaussian_entropy_closed_forms(nu: float) -> ClosedFormEntropies:
    """Closed-form entropies of a one-mode Gaussian state with symplectic value ``nu``.

    ``h_lz = ln(2 nu) - ((4 nu^2 - 1)/(4 nu)) ln((2 nu - 1)/(2 nu + 1))`` (nats),
    with the second term continued to 0 at ``nu = 1/2``, and
    ``h_xp = ln(pi e) + ln(2 nu)``.
    """
    if nu < 0.5 - 1e-12:
        raise ValueError(f"symplectic value {nu} below the physical minimum 1/2")
    nu = max(nu, 0.5)
    h_xp = LN_PI_E + math.log(2.0 * nu)
    if nu <= 0.5 + 1e-15:
        return ClosedFormEntropies(0.0, h_xp)
    h_lz = math.log(2.0 * nu) - (4.0 * nu * nu - 1.0) / (4.0 * nu) * math.log(
        (2.0 * nu - 1.0) / (2.0 * nu + 1.0)
    )
    return ClosedFormEntropies(h_lz, h_xp)


def e_function(mean_n: float) -> float:
    """Excess-entropy function ``-(2 n (n+1)/(2 n+1)) ln(n/(n+1))``, in [0, 1]."""
    if mean_n < 0:
        raise ValueError(f"mean photon number must be >= 0, got {mean_n}")
    if mean_n == 0.0:
        return 0.0
    return (
        -2.0 * mean_n * (mean_n + 1.0) / (2.0 * mean_n + 1.0)
        * math.log(mean_n / (mean_n + 1.0))
    )


def gaussian_entropy_rows(nus: np.ndarray | list[float]) -> list[dict[str, float]]:
    """Grid rows ``(nu, mean_n, H, h_xp, E)`` for the Gaussian closed forms."""
    rows = []
    for nu in nus:
        forms = gaussian_entropy_closed_forms(float(nu))
        mean_n = float(nu) - 0.5
        rows.append(
            {
                "nu": float(nu),
                "mean_n": mean_n,
                "H": forms.h_lz,
                "h_xp": forms.h_xp,
                "E": e_function(mean_n),
            }
        )
    return rows
