"""Closed-form inversion of outcome probabilities to a pure state.

Both inverters report failure instead of raising when the state sits on the
measure-zero set where the closed form breaks down (a vanishing anchor or
chain amplitude), so that noisy tomography runs can count them as data.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .constructions import (
    RankOneConstructionParams,
    TwoDConstructionParams,
    build_psic_2d,
    build_rank_one_3dm2,
    rank_one_frame_operator,
)
from .errors import DimensionMismatch
from .linalg import sqrt_psd
from .objects import OutcomeDistribution, Povm, PureState, gauge_fix, probabilities

ANCHOR_TOL = 1e-12
CHAIN_TOL = 1e-12


class FailureKind(enum.Enum):
    ZERO_ANCHOR_AMPLITUDE = "ZeroAnchorAmplitude"
    CHAIN_BROKEN = "ChainBroken"
    NEGATIVE_RADICAND = "NegativeRadicand"


@dataclass(frozen=True)
class Failure:
    kind: FailureKind
    index: int | None = None

    def __str__(self) -> str:
        if self.kind is FailureKind.CHAIN_BROKEN:
            return f"{self.kind.value}({self.index})"
        return self.kind.value


@dataclass(frozen=True, eq=False)
class ReconstructionReport:
    """Recovered state plus a residual that re-predicts the input probabilities.

    ``state`` is ``None`` and ``residual`` is NaN whenever ``failure`` is set.
    ``chain_norms`` holds the squared amplitudes ``|phi_j|^2`` that the
    rank-one inverter derives independently from the three-outcome sums.
    """

    state: PureState | None
    residual: float
    failure: Failure | None = None
    chain_norms: np.ndarray | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.failure is None


def _failed(kind: FailureKind, index: int | None = None) -> ReconstructionReport:
    return ReconstructionReport(None, float("nan"), Failure(kind, index))


def _residual(povm: Povm, state: PureState, probs: OutcomeDistribution) -> float:
    predicted = probabilities(povm, PureState(state.amplitudes))
    return float(np.max(np.abs(predicted.values - probs.values)))


def _check_alignment(probs: OutcomeDistribution, povm: Povm) -> None:
    if len(probs) != len(povm):
        raise DimensionMismatch(f"{len(probs)} probabilities for a {len(povm)}-outcome POVM")
    if probs.labels is not None and tuple(probs.labels) != tuple(povm.labels):
        raise DimensionMismatch("probability labels do not match the POVM labels")


@lru_cache(maxsize=64)
def _psic_2d_povm(params: TwoDConstructionParams) -> Povm:
    return build_psic_2d(params)


@lru_cache(maxsize=64)
def _rank_one_setup(params: RankOneConstructionParams):
    povm = build_rank_one_3dm2(params)
    root = sqrt_psd(rank_one_frame_operator(params))
    return povm, root


def invert_psic_2d(probs: OutcomeDistribution, params: TwoDConstructionParams) -> ReconstructionReport:
    """Invert the 2D-outcome construction for a normalized state.

    ``r_0 = sqrt(p0/a)``, then every ``x_j`` and ``y_j`` follows linearly from
    its own middle probability.  The throw-away probability is never used.
    """
    povm = _psic_2d_povm(params)
    _check_alignment(probs, povm)
    dim, a, b = params.dim, params.a, params.b
    p = probs.values
    r0_sq = p[0] / a
    if r0_sq < -ANCHOR_TOL:
        return _failed(FailureKind.NEGATIVE_RADICAND)
    if r0_sq < ANCHOR_TOL:
        return _failed(FailureKind.ZERO_ANCHOR_AMPLITUDE)
    r0 = np.sqrt(r0_sq)
    px = p[1:dim]
    py = p[dim : 2 * dim - 1]
    amps = np.empty(dim, dtype=np.complex128)
    amps[0] = r0
    amps[1:] = (px - b) / (2 * b * r0) + 1j * (py - b) / (2 * b * r0)
    state = gauge_fix(PureState(amps))
    return ReconstructionReport(state, _residual(povm, state, probs))


def invert_rank_one_3dm2(
    probs: OutcomeDistribution, params: RankOneConstructionParams
) -> ReconstructionReport:
    """Invert the 3D-2 rank-one construction, walking the chain ``c_0 -> c_1 -> ... -> c_{D-1}``.

    Dressed probabilities of ``psi`` equal raw probabilities of
    ``phi = G^{-1/2} psi``.  Each link solves three equations for
    ``conj(phi_{j-1}) phi_j``; the final state is ``G^{1/2} phi``.
    """
    povm, root = _rank_one_setup(params)
    _check_alignment(probs, povm)
    dim, a, b, theta = params.dim, params.a, params.b, params.theta
    c2, s2 = np.cos(theta / 2) ** 2, np.sin(theta / 2) ** 2
    p = probs.values

    anchor_sq = p[0] / a
    if anchor_sq < -ANCHOR_TOL:
        return _failed(FailureKind.NEGATIVE_RADICAND)
    if anchor_sq < ANCHOR_TOL:
        return _failed(FailureKind.ZERO_ANCHOR_AMPLITUDE)

    # conj of e^{-2 pi i (alpha-1)/3}; the three factors sum to zero
    demod = np.exp(2j * np.pi * np.arange(3) / 3)
    phi = np.zeros(dim, dtype=np.complex128)
    phi[0] = np.sqrt(anchor_sq)
    norms = np.zeros(dim)
    norms[0] = anchor_sq
    for j in range(1, dim):
        prev_sq = abs(phi[j - 1]) ** 2
        if prev_sq < CHAIN_TOL:
            return _failed(FailureKind.CHAIN_BROKEN, j)
        triple = p[1 + 3 * (j - 1) : 4 + 3 * (j - 1)] / b
        norms[j] = (triple.sum() - 3 * c2 * prev_sq) / (3 * s2)
        cross = 2.0 / (3.0 * np.sin(theta)) * np.dot(demod, triple)
        phi[j] = cross * phi[j - 1] / prev_sq

    state = gauge_fix(PureState(root.matrix @ phi))
    return ReconstructionReport(state, _residual(povm, state, probs), chain_norms=norms)


def premeasure_basis_choice(freqs: OutcomeDistribution | np.ndarray) -> int:
    """Index of the most frequent computational-basis outcome; ties go to the lowest index."""
    values = freqs.values if isinstance(freqs, OutcomeDistribution) else np.asarray(freqs, dtype=float)
    return int(np.argmax(values))


def swap_anchor(dim: int, index: int) -> np.ndarray:
    """Permutation that exchanges basis states ``|0>`` and ``|index>``; it is its own inverse."""
    perm = np.arange(dim)
    perm[0], perm[index] = index, 0
    return perm


def relabel_povm(povm: Povm, index: int) -> Povm:
    """Same POVM with ``|index>`` playing the role of ``|0>``."""
    perm = swap_anchor(povm.dim, index)
    return Povm([op.matrix[np.ix_(perm, perm)] for op in povm], povm.labels)


def relabel_state(state: PureState, index: int) -> PureState:
    perm = swap_anchor(state.dim, index)
    return PureState(state.amplitudes[perm], normalized=state.normalized)
