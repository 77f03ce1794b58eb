"""POVM families: the 2D-outcome and 3D-2 rank-one constructions, qubit
Bloch-vector measurements, complementary bases, and the ``G^{-1/2}`` trick
that turns any spanning set of positive operators into a POVM.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import (
    IndexOutOfRange,
    IndicesEqual,
    InvalidParameter,
    InvalidPovm,
    SingularFrame,
    SingularOperator,
    ThrowawayNotPositive,
)
from .linalg import POSITIVITY_FLOOR, HermitianOperator, inv_sqrt, min_eigenvalue, projector
from .objects import Povm, PureState, bloch_operator

THETA_TETRA = float(np.arccos(-1.0 / 3.0))

TETRAHEDRON = np.array(
    [
        [0.0, 0.0, 1.0],
        [2 * np.sqrt(2) / 3, 0.0, -1 / 3],
        [-np.sqrt(2) / 3, np.sqrt(2 / 3), -1 / 3],
        [-np.sqrt(2) / 3, -np.sqrt(2 / 3), -1 / 3],
    ]
)

TRINE = np.array(
    [
        [1.0, 0.0, 0.0],
        [-0.5, np.sqrt(3) / 2, 0.0],
        [-0.5, -np.sqrt(3) / 2, 0.0],
    ]
)


@dataclass(frozen=True)
class TwoDConstructionParams:
    """Weights of the 2D-outcome construction; both default to ``1/(4 dim)``."""

    dim: int
    a: float | None = None
    b: float | None = None

    def __post_init__(self) -> None:
        if int(self.dim) != self.dim or self.dim < 2:
            raise InvalidParameter(f"dim must be an integer >= 2, got {self.dim!r}")
        default = 1.0 / (4 * self.dim)
        a = default if self.a is None else float(self.a)
        b = default if self.b is None else float(self.b)
        if not (a > 0 and b > 0):
            raise InvalidParameter(f"a and b must be positive, got a={a!r}, b={b!r}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class RankOneConstructionParams:
    """Angle and raw weights of the 3D-2 rank-one construction.

    With ``a`` and ``b`` left unset the weights are ``b = 1/3`` and
    ``a = sin^2(theta/2)`` for ``dim >= 3``, which make the frame operator
    ``G = I - cos^2(theta/2)|D-1><D-1|``.  For ``dim == 2`` the default is
    ``a = b = 1/2``, which at the tetrahedral angle gives ``G = I`` and hence
    the tetrahedral POVM itself.
    """

    dim: int
    theta: float = THETA_TETRA
    a: float | None = None
    b: float | None = None

    def __post_init__(self) -> None:
        if int(self.dim) != self.dim or self.dim < 2:
            raise InvalidParameter(f"dim must be an integer >= 2, got {self.dim!r}")
        theta = float(self.theta)
        if not 0.0 < theta < np.pi:
            raise InvalidParameter(f"theta must lie in (0, pi), got {theta!r}")
        if self.dim == 2:
            a_def, b_def = 0.5, 0.5
        else:
            a_def, b_def = np.sin(theta / 2) ** 2, 1.0 / 3.0
        a = a_def if self.a is None else float(self.a)
        b = b_def if self.b is None else float(self.b)
        if not (a > 0 and b > 0):
            raise InvalidParameter(f"a and b must be positive, got a={a!r}, b={b!r}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def diagonal_frame_weights(cls, dim: int, theta: float = THETA_TETRA) -> RankOneConstructionParams:
        """``b = 1/3`` and ``a = sin^2(theta/2)`` for every ``dim``, including 2."""
        return cls(dim, theta, a=np.sin(theta / 2) ** 2, b=1.0 / 3.0)

    @property
    def uses_diagonal_frame_weights(self) -> bool:
        return bool(
            np.isclose(self.b, 1.0 / 3.0, rtol=0, atol=1e-15)
            and np.isclose(self.a, np.sin(self.theta / 2) ** 2, rtol=0, atol=1e-15)
        )


def _check_pair(dim: int, j: int, k: int) -> None:
    if not (0 <= j < dim and 0 <= k < dim):
        raise IndexOutOfRange(f"indices ({j}, {k}) out of range for dim {dim}")
    if j == k:
        raise IndicesEqual(f"subspace indices must differ, got ({j}, {k})")


def subspace_pauli(dim: int, j: int, k: int, which: Literal["X", "Y", "Z", "P"]) -> HermitianOperator:
    """Pauli operator acting on the span of ``|j>`` and ``|k>``.

    ``"P"`` returns the projector ``|j><j| + |k><k|`` onto that subspace.
    """
    _check_pair(dim, j, k)
    m = np.zeros((dim, dim), dtype=np.complex128)
    if which == "X":
        m[j, k] = m[k, j] = 1.0
    elif which == "Y":
        m[j, k] = -1j
        m[k, j] = 1j
    elif which == "Z":
        m[j, j], m[k, k] = 1.0, -1.0
    elif which == "P":
        m[j, j] = m[k, k] = 1.0
    else:
        raise InvalidParameter(f"unknown Pauli label {which!r}")
    return HermitianOperator(m)


def psic_2d_labels(dim: int) -> list[str]:
    return ["E0", *(f"x,{j}" for j in range(1, dim)), *(f"y,{j}" for j in range(1, dim)), "T"]


def build_psic_2d(params: TwoDConstructionParams) -> Povm:
    """2D-element POVM: ``a|0><0|``, ``b(I + X_0j)``, ``b(I + Y_0j)`` and the throw-away ``T``.

    Raises
    ------
    ThrowawayNotPositive
        If ``T = I - (sum of the others)`` has an eigenvalue below ``-1e-10``.
    """
    dim, a, b = params.dim, params.a, params.b
    eye = np.eye(dim)
    anchor = np.zeros((dim, dim), dtype=np.complex128)
    anchor[0, 0] = a
    xs = [b * (eye + subspace_pauli(dim, 0, j, "X").matrix) for j in range(1, dim)]
    ys = [b * (eye + subspace_pauli(dim, 0, j, "Y").matrix) for j in range(1, dim)]
    body = [anchor, *xs, *ys]
    throwaway = HermitianOperator(eye - sum(body))
    lam = min_eigenvalue(throwaway)
    if lam < -POSITIVITY_FLOOR:
        raise ThrowawayNotPositive(
            f"throw-away element has eigenvalue {lam:.4g} for dim={dim}, a={a}, b={b}; "
            "choose smaller weights"
        )
    return Povm([*body, throwaway], psic_2d_labels(dim))


def failed_rank_one_variant(dim: int, a: float, b: float) -> tuple[list[HermitianOperator], list[str]]:
    """Rank-one replacement of the middle elements: ``b(P_0j + X_0j)``, ``b(P_0j + Y_0j)``.

    The returned list carries no throw-away element. Its outcome probabilities
    contain the quadratic term ``|c_j|^2`` and so leave a two-fold ambiguity
    in every ``c_j``.
    """
    if dim < 2:
        raise InvalidParameter("dim must be >= 2")
    anchor = np.zeros((dim, dim), dtype=np.complex128)
    anchor[0, 0] = a
    ops = [HermitianOperator(anchor)]
    labels = ["E0"]
    for which in ("X", "Y"):
        for j in range(1, dim):
            p = subspace_pauli(dim, 0, j, "P").matrix
            ops.append(HermitianOperator(b * (p + subspace_pauli(dim, 0, j, which).matrix)))
            labels.append(f"{which.lower()},{j}")
    return ops, labels


def rank_one_state_vectors(params: RankOneConstructionParams, j: int, k: int) -> np.ndarray:
    dim = params.dim
    _check_pair(dim, j, k)
    half = params.theta / 2
    vecs = np.zeros((4, dim), dtype=np.complex128)
    vecs[0, j] = 1.0
    for alpha in (1, 2, 3):
        vecs[alpha, j] = np.cos(half)
        vecs[alpha, k] = np.exp(2j * np.pi * (alpha - 1) / 3) * np.sin(half)
    return vecs


def build_rank_one_states(params: RankOneConstructionParams, j: int, k: int) -> list[PureState]:
    """The four states ``|j>`` and ``cos(theta/2)|j> + w^(alpha-1) sin(theta/2)|k>``, ``w = e^{2 pi i/3}``."""
    return [PureState(v, normalized=True) for v in rank_one_state_vectors(params, j, k)]


def rank_one_labels(dim: int) -> list[str]:
    return ["E0", *(f"{j - 1}-{j};{alpha}" for j in range(1, dim) for alpha in (1, 2, 3))]


def rank_one_raw_elements(params: RankOneConstructionParams) -> list[HermitianOperator]:
    """Undressed elements ``a|0><0|`` and ``b|psi_{j-1,j;alpha}><psi_{j-1,j;alpha}|``."""
    dim = params.dim
    anchor = np.zeros((dim, dim), dtype=np.complex128)
    anchor[0, 0] = params.a
    ops = [HermitianOperator(anchor)]
    for j in range(1, dim):
        vecs = rank_one_state_vectors(params, j - 1, j)
        ops.extend(projector(np.sqrt(params.b) * vecs[alpha]) for alpha in (1, 2, 3))
    return ops


def rank_one_frame_operator(params: RankOneConstructionParams) -> HermitianOperator:
    """Sum ``G`` of the undressed rank-one elements."""
    return HermitianOperator(sum(op.matrix for op in rank_one_raw_elements(params)))


def expected_rank_one_frame(params: RankOneConstructionParams) -> HermitianOperator:
    """Closed form of ``G`` for general weights: diagonal, built pair by pair."""
    dim, a, b = params.dim, params.a, params.b
    c2, s2 = np.cos(params.theta / 2) ** 2, np.sin(params.theta / 2) ** 2
    diag = np.zeros(dim)
    diag[0] = a
    for j in range(1, dim):
        diag[j - 1] += 3 * b * c2
        diag[j] += 3 * b * s2
    return HermitianOperator(np.diag(diag))


def build_rank_one_3dm2(params: RankOneConstructionParams) -> Povm:
    """Rank-one POVM with ``3 dim - 2`` elements.

    The raw elements are dressed as ``G^{-1/2} F G^{-1/2}``; with the default
    weights only the last pair's three elements actually change.

    Raises
    ------
    InvalidPovm
        If the frame operator disagrees with its closed form (internal check).
    """
    raw = rank_one_raw_elements(params)
    povm, frame = normalize_elements(raw, rank_one_labels(params.dim))
    if not frame.allclose(expected_rank_one_frame(params), atol=1e-12):
        raise InvalidPovm("frame operator of the rank-one construction does not match its closed form")
    if params.uses_diagonal_frame_weights:
        target = np.eye(params.dim)
        target[-1, -1] -= np.cos(params.theta / 2) ** 2
        if not frame.allclose(target, atol=1e-12):
            raise InvalidPovm("frame operator differs from I - cos^2(theta/2)|D-1><D-1|")
    return povm


def _bloch_povm(vectors: np.ndarray, weight: float) -> Povm:
    ops = [bloch_operator(weight, weight, n) for n in vectors]
    return Povm(ops, [f"E{c}" for c in range(1, len(ops) + 1)])


def build_tetrahedral() -> Povm:
    """Qubit SIC-POVM ``(1/4)(I + n_c . sigma)`` with the apex at the north pole."""
    return _bloch_povm(TETRAHEDRON, 0.25)


def build_trine() -> Povm:
    """Three-outcome equatorial qubit POVM ``(1/3)(I + n_c . sigma)``."""
    return _bloch_povm(TRINE, 1.0 / 3.0)


def fourier_basis(dim: int) -> np.ndarray:
    """Rows are ``f_k = D^{-1/2} sum_j e^{2 pi i jk/D} |e_j>`` for ``j, k = 1..D``."""
    idx = np.arange(1, dim + 1)
    return np.exp(2j * np.pi * np.outer(idx, idx) / dim) / np.sqrt(dim)


def build_complementary_bases(dim: int) -> Povm:
    """Coin-flip amalgamation of the standard and Fourier bases (``2 dim`` elements)."""
    if dim < 2:
        raise InvalidParameter("dim must be >= 2")
    e = np.eye(dim, dtype=np.complex128)
    f = fourier_basis(dim)
    ops = [projector(np.sqrt(0.5) * v) for v in e] + [projector(np.sqrt(0.5) * v) for v in f]
    labels = [f"e{c}" for c in range(1, dim + 1)] + [f"f{c}" for c in range(1, dim + 1)]
    return Povm(ops, labels)


def amalgamate_last_pair(povm: Povm) -> Povm:
    """Merge ``e_D`` and ``f_D`` of a complementary-bases POVM into one element (``2 dim - 1`` total)."""
    dim = povm.dim
    expected = [f"e{c}" for c in range(1, dim + 1)] + [f"f{c}" for c in range(1, dim + 1)]
    if list(povm.labels) != expected:
        raise InvalidParameter("amalgamate_last_pair expects the output of build_complementary_bases")
    e_last, f_last = povm[f"e{dim}"], povm[f"f{dim}"]
    keep = [c for c, label in enumerate(povm.labels) if label not in (f"e{dim}", f"f{dim}")]
    ops = [povm[c] for c in keep] + [e_last + f_last]
    labels = [povm.labels[c] for c in keep] + [f"e{dim}+f{dim}"]
    return Povm(ops, labels)


def normalize_elements(
    elements: Sequence[HermitianOperator],
    labels: Sequence[str] | None = None,
) -> tuple[Povm, HermitianOperator]:
    """Turn positive operators ``F^c`` into the POVM ``G^{-1/2} F^c G^{-1/2}``.

    Returns the POVM and ``G = sum_c F^c``; ``G`` is needed to map states
    back and forth between the dressed and undressed pictures.

    Raises
    ------
    SingularFrame
        If ``G`` has an eigenvalue at or below ``1e-10``; such an element set
        cannot be informationally complete.
    """
    ops = [e if isinstance(e, HermitianOperator) else HermitianOperator(e) for e in elements]
    frame = HermitianOperator(sum(op.matrix for op in ops))
    try:
        root = inv_sqrt(frame)
    except SingularOperator as exc:
        raise SingularFrame(str(exc)) from exc
    return Povm([op.sandwich(root) for op in ops], labels), frame
