"""Certificates for informational completeness.

Three kinds of evidence live here: the frame rank of a POVM inside the
real ``D^2``-dimensional space of Hermitian operators, an empirical
round-trip certification of pure-state completeness, and explicit witness
pairs of distinct states that a sub-minimal POVM cannot tell apart.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotFound, ZeroVector
from .linalg import HermitianOperator, expectation
from .objects import OutcomeDistribution, Povm, PureState, fidelity, gauge_fix, probabilities, random_pure_state
from .reconstruction import ReconstructionReport

log = logging.getLogger(__name__)

Inverter = Callable[[OutcomeDistribution], ReconstructionReport]

SUCCESS_FIDELITY = 1 - 1e-9
WITNESS_GAP = 1e-8
WITNESS_INFIDELITY = 1e-3
REPULSION_FIDELITY = 0.999


def derive_seed(master: int, index: int) -> np.random.SeedSequence:
    """Independent per-trial stream keyed on (master seed, trial index)."""
    return np.random.SeedSequence([int(master), int(index)])


# --- frame rank --------------------------------------------------------------


def gell_mann_basis(dim: int) -> np.ndarray:
    """Orthonormal Hermitian basis ``(D^2, D, D)``: scaled identity then generalized Gell-Mann matrices."""
    basis = [np.eye(dim, dtype=np.complex128) / np.sqrt(dim)]
    for j in range(dim):
        for k in range(j + 1, dim):
            sym = np.zeros((dim, dim), dtype=np.complex128)
            sym[j, k] = sym[k, j] = 1 / np.sqrt(2)
            anti = np.zeros((dim, dim), dtype=np.complex128)
            anti[j, k] = -1j / np.sqrt(2)
            anti[k, j] = 1j / np.sqrt(2)
            basis += [sym, anti]
    for level in range(1, dim):
        diag = np.zeros(dim)
        diag[:level] = 1.0
        diag[level] = -level
        basis.append(np.diag(diag / np.sqrt(level * (level + 1))).astype(np.complex128))
    return np.stack(basis)


def hermitian_coefficients(ops: Sequence[HermitianOperator] | np.ndarray) -> np.ndarray:
    """Real ``(n, D^2)`` expansion coefficients ``tr(B_k H)`` over :func:`gell_mann_basis`."""
    mats = np.stack([getattr(op, "matrix", op) for op in ops])
    basis = gell_mann_basis(mats.shape[-1])
    return np.einsum("kij,cji->ck", basis, mats).real


@dataclass(frozen=True)
class FrameReport:
    frame_rank: int
    dim_hermitian: int
    is_ic: bool
    singular_values: np.ndarray


def frame_rank(povm: Povm, tol: float = 1e-10) -> FrameReport:
    """Dimension of the span of the POVM elements among Hermitian operators."""
    coeffs = hermitian_coefficients(povm.elements)
    sv = np.linalg.svd(coeffs, compute_uv=False)
    rank = int(np.count_nonzero(sv > tol * sv[0]))
    d2 = povm.dim**2
    return FrameReport(rank, d2, rank == d2, sv)


# --- empirical certification -------------------------------------------------


@dataclass(frozen=True)
class CertificationResult:
    trials: int
    successes: int
    declared_failures: int
    silent_failures: int
    worst_residual: float
    worst_infidelity: float

    @property
    def passed(self) -> bool:
        return (
            self.successes + self.declared_failures == self.trials
            and self.declared_failures <= 0.01 * self.trials
        )


def certify_psic(povm: Povm, inverter: Inverter, trials: int, seed: int) -> CertificationResult:
    """Forward-then-invert ``trials`` Haar states and tally the outcomes.

    A trial succeeds when the inverter returns a state with fidelity at least
    ``1 - 1e-9``; a declared failure is one the inverter flags itself; anything
    else is a silent failure and fails the certificate outright.
    """
    successes = declared = silent = 0
    worst_residual = 0.0
    worst_infidelity = 0.0
    for trial in range(trials):
        state = random_pure_state(povm.dim, derive_seed(seed, trial))
        report = inverter(probabilities(povm, state))
        if report.failure is not None:
            declared += 1
            continue
        infid = 1.0 - fidelity(state, report.state) if report.state is not None else 1.0
        worst_infidelity = max(worst_infidelity, infid)
        if np.isfinite(report.residual):
            worst_residual = max(worst_residual, report.residual)
        if infid <= 1 - SUCCESS_FIDELITY:
            successes += 1
        else:
            silent += 1
    return CertificationResult(trials, successes, declared, silent, worst_residual, worst_infidelity)


# --- ambiguity witnesses -----------------------------------------------------


@dataclass(frozen=True)
class AmbiguityWitness:
    """Two normalized, gauge-fixed states with (numerically) equal outcome probabilities."""

    state_a: PureState
    state_b: PureState
    prob_gap: float
    infidelity: float
    restarts_used: int = 1


class _AmbiguityObjective:
    """Squared probability mismatch plus a repulsion from the target, on unit vectors.

    States are stored as real vectors ``xi = (Re psi, Im psi)``.
    """

    def __init__(self, povm: Povm, target: np.ndarray, penalty: float, repulsion: float) -> None:
        self.ops = povm.stacked()
        self.target = target
        self.target_probs = np.einsum("i,cij,j->c", target.conj(), self.ops, target).real
        self.penalty = penalty
        self.repulsion = repulsion
        self.dim = povm.dim

    def split(self, xi: np.ndarray) -> np.ndarray:
        return xi[: self.dim] + 1j * xi[self.dim :]

    def residuals(self, xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Residual vector and its Jacobian restricted to the tangent space of the sphere.

        Residuals are the probability mismatches followed by one repulsion
        term ``sqrt(penalty) * max(0, F - repulsion)``.
        """
        psi = self.split(xi)
        e_psi = self.ops @ psi
        probs = np.einsum("i,ci->c", psi.conj(), e_psi).real
        overlap = np.vdot(self.target, psi)
        excess = abs(overlap) ** 2 - self.repulsion
        root = np.sqrt(self.penalty)

        # complex rows encode (d/dRe + i d/dIm) of each residual
        rows = np.vstack([2 * e_psi, 2 * root * overlap * self.target if excess > 0 else np.zeros(self.dim)])
        jac = np.hstack([rows.real, rows.imag])
        jac -= np.outer(jac @ xi, xi)
        res = np.concatenate([probs - self.target_probs, [root * max(excess, 0.0)]])
        return res, jac


def _descend(obj: _AmbiguityObjective, xi: np.ndarray, max_iter: int, grad_tol: float) -> np.ndarray:
    """Damped Gauss-Newton descent on the unit sphere with a backtracking line search."""
    res, jac = obj.residuals(xi)
    value = float(res @ res)
    n = xi.size
    for _ in range(max_iter):
        grad = 2 * jac.T @ res
        if np.linalg.norm(grad) < grad_tol or value < 1e-30:
            break
        damping = np.sqrt(min(value, 1e-2))
        aug = np.vstack([jac, damping * np.eye(n)])
        direction = np.linalg.lstsq(aug, np.concatenate([-res, np.zeros(n)]), rcond=None)[0]
        slope = float(grad @ direction)
        if slope >= 0:
            direction, slope = -grad, -float(grad @ grad)
        step = 1.0
        while True:
            trial = xi + step * direction
            trial /= np.linalg.norm(trial)
            t_res, t_jac = obj.residuals(trial)
            t_value = float(t_res @ t_res)
            if t_value <= value + 1e-4 * step * slope or step < 1e-12:
                break
            step *= 0.5
        if t_value >= value:
            break
        xi, res, jac, value = trial, t_res, t_jac, t_value
    return xi


def find_ambiguity(
    povm: Povm,
    target: PureState,
    restarts: int = 50,
    seed: int = 0,
    *,
    penalty: float = 10.0,
    repulsion: float = REPULSION_FIDELITY,
    max_iter: int = 2000,
    grad_tol: float = 1e-10,
) -> AmbiguityWitness:
    """Search for a state distinct from ``target`` with the same outcome probabilities.

    Multi-start descent from Haar seeds on the unit sphere of ``C^D``.  The
    first start that reaches a probability gap of at most ``1e-8`` at an
    infidelity of at least ``1e-3`` is returned.

    Raises
    ------
    NotFound
        If no start yields an acceptable witness; this does not prove the
        target is uniquely determined.
    """
    if target.dim != povm.dim:
        raise DimensionMismatch(f"target dim {target.dim} does not match POVM dim {povm.dim}")
    tgt = target.normalize()
    obj = _AmbiguityObjective(povm, tgt.amplitudes, penalty, repulsion)
    best = None
    for start in range(restarts):
        psi0 = random_pure_state(povm.dim, derive_seed(seed, start)).amplitudes
        xi = _descend(obj, np.concatenate([psi0.real, psi0.imag]), max_iter, grad_tol)
        candidate = gauge_fix(PureState(obj.split(xi) / np.linalg.norm(xi), normalized=True))
        gap = float(np.max(np.abs(probabilities(povm, candidate).values - obj.target_probs)))
        infid = 1.0 - fidelity(candidate, tgt)
        if best is None or gap < best[0]:
            best = (gap, infid)
        if gap <= WITNESS_GAP and infid >= WITNESS_INFIDELITY:
            return AmbiguityWitness(gauge_fix(tgt), candidate, gap, infid, start + 1)
    log.info("no ambiguity witness after %d restarts (best gap %.3e)", restarts, best[0] if best else np.nan)
    raise NotFound(f"no witness within {restarts} restarts")


def trine_reflection(state: PureState) -> PureState:
    """Mirror a qubit through the equatorial plane: Bloch ``(x, y, z) -> (x, y, -z)``.

    ``(c0, c1) -> (conj c1, conj c0)`` keeps ``conj(c0) c1`` and swaps the
    populations, which is exactly that reflection.
    """
    if state.dim != 2:
        raise DimensionMismatch("trine reflection is defined for qubits only")
    if state.norm_squared == 0.0:
        raise ZeroVector("cannot reflect the zero vector")
    c0, c1 = state.amplitudes
    return gauge_fix(PureState(np.array([np.conj(c1), np.conj(c0)]), normalized=state.normalized))


def rank_one_variant_partner(state: PureState) -> PureState:
    """Second root of the quadratic that the rank-one middle elements leave open.

    For each ``j`` the probabilities fix ``|c_j|^2 + 2 r0 x_j`` and
    ``|c_j|^2 + 2 r0 y_j``; the other solution of that pair of equations is
    substituted for every ``j``.  The partner is generally unnormalized.
    """
    psi = gauge_fix(state).amplitudes
    r0 = psi[0].real
    if abs(psi[0]) ** 2 < 1e-12:
        raise ZeroVector("partner construction needs a nonzero anchor amplitude c_0")
    x, y = psi[1:].real, psi[1:].imag
    d = x - y
    y_alt = -(d + r0) - y
    x_alt = y_alt + d
    amps = np.concatenate([[r0], x_alt + 1j * y_alt])
    return PureState(amps)


def operator_probabilities(ops: Sequence[HermitianOperator], state: PureState) -> np.ndarray:
    """Expectation values of an arbitrary operator list (no completeness required)."""
    return np.array([expectation(op, state) for op in ops])
