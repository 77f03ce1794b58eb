"""Pure states, POVMs and outcome distributions.

Unnormalized states are first class: ``PureState.normalized`` is a claim that
is checked, not an assumption, because the rank-one inversion and the
``G^{-1/2}`` renormalization both work on unnormalized vectors.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .errors import DimensionMismatch, InvalidPovm, NonUnitBloch, ZeroVector
from .linalg import POSITIVITY_FLOOR, HermitianOperator, eig_hermitian

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

NORM_TOL = 1e-10
COMPLETENESS_TOL = 1e-10
ZERO_AMPLITUDE = 1e-12

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


@dataclass(frozen=True, eq=False)
class PureState:
    """Amplitude vector ``c_0 .. c_{D-1}`` of a (possibly unnormalized) pure state."""

    amplitudes: NDArray[np.complex128]
    normalized: bool = False

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=np.complex128).ravel()
        if amps.size == 0:
            raise DimensionMismatch("a pure state needs at least one amplitude")
        if self.normalized and abs(np.vdot(amps, amps).real - 1.0) > NORM_TOL:
            raise ValueError(f"state flagged normalized but has norm^2 {np.vdot(amps, amps).real!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, dim: int, index: int) -> PureState:
        amps = np.zeros(dim, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps, normalized=True)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalize(self) -> PureState:
        """Unit-norm copy; a state already flagged as normalized is returned as is."""
        if self.normalized:
            return self
        n2 = self.norm_squared
        if n2 <= 0.0:
            raise ZeroVector("cannot normalize the zero vector")
        return PureState(self.amplitudes / np.sqrt(n2), normalized=True)

    def __repr__(self) -> str:
        return f"PureState(dim={self.dim}, normalized={self.normalized}, amplitudes={self.amplitudes!r})"


class Povm:
    """Ordered, labeled list of positive operators that sum to the identity.

    Construction fails with :class:`InvalidPovm` when any element has an
    eigenvalue below ``-1e-10`` or when the elements miss the identity by more
    than ``1e-10`` in Frobenius norm.
    """

    def __init__(
        self,
        elements: Sequence[HermitianOperator | ArrayLike],
        labels: Sequence[str] | None = None,
    ) -> None:
        ops = tuple(e if isinstance(e, HermitianOperator) else HermitianOperator(e) for e in elements)
        if not ops:
            raise InvalidPovm("a POVM needs at least one element")
        dim = ops[0].dim
        if any(op.dim != dim for op in ops):
            raise DimensionMismatch("POVM elements have inconsistent dimensions")
        if labels is None:
            labels = [f"E{c}" for c in range(len(ops))]
        labels = tuple(str(s) for s in labels)
        if len(labels) != len(ops):
            raise InvalidPovm(f"{len(labels)} labels for {len(ops)} elements")
        if len(set(labels)) != len(labels):
            raise InvalidPovm("POVM labels must be unique")

        self.min_eigenvalues = np.array([eig_hermitian(op).eigenvalues[0] for op in ops])
        for label, lam in zip(labels, self.min_eigenvalues):
            if lam < -POSITIVITY_FLOOR:
                raise InvalidPovm(f"element {label!r} is not positive (min eigenvalue {lam:.3e})")
        total = sum(op.matrix for op in ops)
        self.completeness_residual = float(np.linalg.norm(total - np.eye(dim)))
        if self.completeness_residual > COMPLETENESS_TOL:
            raise InvalidPovm(f"elements do not sum to identity (residual {self.completeness_residual:.3e})")

        self.dim = dim
        self.elements = ops
        self.labels = labels

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, key: int | str) -> HermitianOperator:
        if isinstance(key, str):
            return self.elements[self.labels.index(key)]
        return self.elements[key]

    def __repr__(self) -> str:
        return f"Povm(dim={self.dim}, n={len(self)}, labels={list(self.labels)})"

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def stacked(self) -> NDArray[np.complex128]:
        """All element matrices as an ``(n, D, D)`` array."""
        return np.stack([op.matrix for op in self.elements])


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Outcome probabilities (or frequencies) index-aligned with a POVM."""

    values: NDArray[np.float64]
    normalized_state: bool = True
    labels: tuple[str, ...] | None = field(default=None)

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=np.float64).ravel()
        if np.any(vals < -1e-12):
            raise ValueError(f"negative outcome probability {vals.min():.3e}")
        if self.normalized_state and abs(vals.sum() - 1.0) > 1e-9:
            raise ValueError(f"probabilities of a normalized state sum to {vals.sum()!r}")
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != vals.size:
                raise DimensionMismatch(f"{len(labels)} labels for {vals.size} values")
            object.__setattr__(self, "labels", labels)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, key: int | str) -> float:
        if isinstance(key, str):
            if self.labels is None:
                raise KeyError(key)
            return float(self.values[self.labels.index(key)])
        return float(self.values[key])

    @property
    def total(self) -> float:
        return float(self.values.sum())


@dataclass(frozen=True)
class BlochVector:
    components: tuple[float, float, float]

    def __post_init__(self) -> None:
        comps = tuple(float(x) for x in np.asarray(self.components, dtype=np.float64).ravel())
        if len(comps) != 3:
            raise DimensionMismatch("a Bloch vector has three components")
        object.__setattr__(self, "components", comps)

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.components))

    def as_array(self) -> NDArray[np.float64]:
        return np.array(self.components)


def probabilities(povm: Povm, state: PureState) -> OutcomeDistribution:
    """Outcome probabilities ``<psi|E^c|psi>``; they sum to ``<psi|psi>``."""
    if state.dim != povm.dim:
        raise DimensionMismatch(f"state dim {state.dim} does not match POVM dim {povm.dim}")
    psi = state.amplitudes
    raw = np.einsum("i,cij,j->c", psi.conj(), povm.stacked(), psi)
    vals = np.clip(raw.real, 0.0, None)
    return OutcomeDistribution(vals, normalized_state=state.normalized, labels=povm.labels)


def gauge_fix(state: PureState) -> PureState:
    """Rotate the global phase so the first nonzero amplitude is real and positive."""
    amps = state.amplitudes
    nonzero = np.flatnonzero(np.abs(amps) > ZERO_AMPLITUDE)
    if nonzero.size == 0:
        raise ZeroVector("state has no amplitude above 1e-12")
    k = nonzero[0]
    lead = amps[k]
    if lead.imag == 0.0 and lead.real > 0:
        return state
    fixed = amps * (abs(lead) / lead)
    fixed[k] = abs(lead)
    return PureState(fixed, normalized=state.normalized)


def fidelity(a: PureState, b: PureState) -> float:
    """Gauge-invariant overlap ``|<a|b>|^2 / (<a|a><b|b>)``."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"dims {a.dim} and {b.dim} differ")
    na, nb = a.norm_squared, b.norm_squared
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("fidelity is undefined for the zero vector")
    # rounding can push the ratio a few ulps past 1
    return min(1.0, float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2 / (na * nb)))


def random_pure_state(dim: int, seed: int | np.random.SeedSequence | None) -> PureState:
    """Haar-random normalized, gauge-fixed state from i.i.d. complex Gaussians."""
    if dim < 1:
        raise DimensionMismatch("dim must be at least 1")
    if dim == 1:
        return PureState(np.ones(1, dtype=complex), normalized=True)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return gauge_fix(PureState(z / np.linalg.norm(z), normalized=True))


def bloch_of_state(state: PureState) -> BlochVector:
    if state.dim != 2:
        raise DimensionMismatch("Bloch vectors are defined for qubits only")
    c0, c1 = state.amplitudes
    n2 = state.norm_squared
    if n2 == 0.0:
        raise ZeroVector("zero vector has no Bloch vector")
    cross = np.conj(c0) * c1
    return BlochVector((2 * cross.real / n2, 2 * cross.imag / n2, (abs(c0) ** 2 - abs(c1) ** 2) / n2))


def state_of_bloch(v: BlochVector | ArrayLike) -> PureState:
    """Gauge-fixed qubit state with unit Bloch vector ``v``."""
    m = v.as_array() if isinstance(v, BlochVector) else np.asarray(v, dtype=np.float64).ravel()
    if m.shape != (3,):
        raise DimensionMismatch("a Bloch vector has three components")
    length = float(np.linalg.norm(m))
    if abs(length - 1.0) > NORM_TOL:
        raise NonUnitBloch(f"pure qubit states need a unit Bloch vector, got length {length!r}")
    mx, my, mz = m / length
    polar = np.arccos(np.clip(mz, -1.0, 1.0))
    azimuth = np.arctan2(my, mx)
    amps = np.array([np.cos(polar / 2), np.exp(1j * azimuth) * np.sin(polar / 2)])
    return gauge_fix(PureState(amps / np.linalg.norm(amps), normalized=True))


def bloch_operator(a: float, b: float, n: ArrayLike) -> HermitianOperator:
    """Qubit operator ``a I + b n.sigma``."""
    n = np.asarray(n, dtype=np.float64)
    return HermitianOperator(a * np.eye(2) + b * sum(nk * s for nk, s in zip(n, PAULIS)))
