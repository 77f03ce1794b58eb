"""Dense complex linear algebra kernel.

Every matrix function (square root, inverse square root, positivity test)
goes through :func:`eig_hermitian`, so there is exactly one numerical path
to audit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import DimensionMismatch, IndefiniteOperator, NonHermitianInput, SingularOperator

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    from .objects import PureState

HERM_TOL = 1e-12
POSITIVITY_FLOOR = 1e-10


class HermitianOperator:
    """Immutable D x D complex Hermitian matrix.

    Small asymmetries (below ``HERM_TOL`` relative to the largest entry) are
    removed by symmetrizing; anything larger is rejected.
    """

    __slots__ = ("_matrix",)

    def __init__(self, matrix: ArrayLike) -> None:
        m = np.array(matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise DimensionMismatch(f"expected a non-empty square matrix, got shape {m.shape}")
        scale = float(np.max(np.abs(m)))
        asym = float(np.max(np.abs(m - m.conj().T)))
        if asym > HERM_TOL * scale:
            raise NonHermitianInput(f"matrix is not Hermitian (max asymmetry {asym:.3e})")
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        self._matrix = m

    @property
    def matrix(self) -> NDArray[np.complex128]:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._matrix.copy()
        return self._matrix.astype(dtype)

    def __add__(self, other: HermitianOperator) -> HermitianOperator:
        return HermitianOperator(self._matrix + _as_matrix(other))

    def __sub__(self, other: HermitianOperator) -> HermitianOperator:
        return HermitianOperator(self._matrix - _as_matrix(other))

    def __mul__(self, scalar: float) -> HermitianOperator:
        if np.iscomplexobj(scalar) and np.imag(scalar) != 0:
            raise NonHermitianInput("Hermitian operators only scale by real numbers")
        return HermitianOperator(self._matrix * float(np.real(scalar)))

    __rmul__ = __mul__

    def __neg__(self) -> HermitianOperator:
        return HermitianOperator(-self._matrix)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HermitianOperator):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self._matrix, other._matrix))

    def __hash__(self) -> int:
        return hash(self._matrix.tobytes())

    def __repr__(self) -> str:
        return f"HermitianOperator(dim={self.dim})"

    def trace(self) -> float:
        return float(np.real(np.trace(self._matrix)))

    def sandwich(self, outer: HermitianOperator) -> HermitianOperator:
        """Return ``outer @ self @ outer``."""
        o = _as_matrix(outer)
        return HermitianOperator(o @ self._matrix @ o)

    def allclose(self, other: HermitianOperator | ArrayLike, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self._matrix, _as_matrix(other), rtol=0.0, atol=atol))


def _as_matrix(op) -> NDArray[np.complex128]:
    if isinstance(op, HermitianOperator):
        return op.matrix
    return np.asarray(op, dtype=np.complex128)


def identity(dim: int) -> HermitianOperator:
    return HermitianOperator(np.eye(dim))


def projector(vector: ArrayLike) -> HermitianOperator:
    """Return the (unnormalized) outer product ``|v><v|``."""
    v = np.asarray(vector, dtype=np.complex128).ravel()
    return HermitianOperator(np.outer(v, v.conj()))


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending real eigenvalues and orthonormal eigenvector columns."""

    eigenvalues: NDArray[np.float64]
    eigenvectors: NDArray[np.complex128]

    def recompose(self, values: NDArray[np.float64] | None = None) -> NDArray[np.complex128]:
        lam = self.eigenvalues if values is None else values
        v = self.eigenvectors
        return (v * lam) @ v.conj().T


def eig_hermitian(op: HermitianOperator | ArrayLike) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian operator, eigenvalues ascending.

    Raises
    ------
    NonHermitianInput
        If ``op`` is a raw array that is not Hermitian within ``HERM_TOL``.
    """
    if not isinstance(op, HermitianOperator):
        op = HermitianOperator(op)
    values, vectors = np.linalg.eigh(op.matrix)
    values = np.asarray(values, dtype=np.float64)
    values.setflags(write=False)
    vectors.setflags(write=False)
    return EigenDecomposition(values, vectors)


def min_eigenvalue(op: HermitianOperator) -> float:
    return float(eig_hermitian(op).eigenvalues[0])


def rank(op: HermitianOperator, rel_tol: float = 1e-8) -> int:
    """Count eigenvalues above ``rel_tol`` times the largest magnitude."""
    lam = np.abs(eig_hermitian(op).eigenvalues)
    top = lam.max()
    if top == 0.0:
        return 0
    return int(np.count_nonzero(lam > rel_tol * top))


def inv_sqrt(op: HermitianOperator, floor: float = POSITIVITY_FLOOR) -> HermitianOperator:
    """Inverse square root of a positive-definite operator.

    Raises
    ------
    SingularOperator
        If any eigenvalue is at or below ``floor``.
    """
    dec = eig_hermitian(op)
    if dec.eigenvalues[0] <= floor:
        raise SingularOperator(
            f"smallest eigenvalue {dec.eigenvalues[0]:.3e} is not above floor {floor:.1e}"
        )
    return HermitianOperator(dec.recompose(1.0 / np.sqrt(dec.eigenvalues)))


def sqrt_psd(op: HermitianOperator, floor: float = POSITIVITY_FLOOR) -> HermitianOperator:
    """Principal square root of a positive semidefinite operator.

    Eigenvalues in ``[-floor, 0)`` are clamped to zero; anything more negative
    raises :class:`IndefiniteOperator`.
    """
    dec = eig_hermitian(op)
    if dec.eigenvalues[0] < -floor:
        raise IndefiniteOperator(f"operator has eigenvalue {dec.eigenvalues[0]:.3e}")
    return HermitianOperator(dec.recompose(np.sqrt(np.clip(dec.eigenvalues, 0.0, None))))


def expectation(op: HermitianOperator, state: PureState | ArrayLike) -> float:
    """Return the real quadratic form ``<psi|op|psi>`` for an unnormalized vector."""
    psi = getattr(state, "amplitudes", state)
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    m = _as_matrix(op)
    if psi.shape[0] != m.shape[0]:
        raise DimensionMismatch(f"state has dim {psi.shape[0]}, operator has dim {m.shape[0]}")
    value = np.vdot(psi, m @ psi)
    bound = HERM_TOL * float(np.vdot(psi, psi).real) * float(np.linalg.norm(m, 2))
    if abs(value.imag) > bound:
        raise NonHermitianInput(f"quadratic form has imaginary part {value.imag:.3e}")
    return float(value.real)
