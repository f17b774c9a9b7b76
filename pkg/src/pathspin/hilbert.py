"""Small dense complex linear algebra on labeled bases.

Everything here is sized for the interferometer: two path channels times
two spin states, never more than 8 basis vectors. Values are immutable;
arrays are copied on construction and marked read-only.

Spin conventions: the computational basis is z (``up``, ``down``). The x
kets are shorthands, ``right = (up + down)/sqrt(2)`` and
``left = (up - down)/sqrt(2)``, so that ``up = (right + left)/sqrt(2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

MAX_DIM = 8
SQRT1_2 = 1.0 / math.sqrt(2.0)

SPIN_LABELS = ("up", "down")


class BasisMismatchError(ValueError):
    """Raised when two objects live on different labeled bases."""


@dataclass(frozen=True)
class Tolerances:
    algebraic: float = 1e-12
    eigen: float = 1e-10

    def __post_init__(self):
        if not (self.algebraic > 0 and self.eigen > 0):
            raise ValueError("tolerances must be strictly positive")
        if self.algebraic > self.eigen:
            raise ValueError("algebraic tolerance must not exceed eigen tolerance")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class Basis:
    """Ordered, distinct basis labels.

    Product labels are joined with commas, so ``(a*b)*c`` and ``a*(b*c)``
    flatten to the same labels.
    """

    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise ValueError("basis must have at least one label")
        if len(set(labels)) != len(labels):
            raise ValueError(f"basis labels must be distinct: {labels}")
        if len(labels) > MAX_DIM:
            raise ValueError(f"dimension {len(labels)} exceeds maximum {MAX_DIM}")

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown basis label {label!r}; have {self.labels}") from None

    def __mul__(self, other: "Basis") -> "Basis":
        return Basis(tuple(f"{a},{b}" for a in self.labels for b in other.labels))

    def __iter__(self):
        return iter(self.labels)

    def __len__(self):
        return len(self.labels)


SPIN = Basis(SPIN_LABELS)


def path_basis(*labels: str) -> Basis:
    return Basis(labels)


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=complex)
    if not np.all(np.isfinite(out)):
        raise ValueError("entries must be finite")
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes over a basis.

    ``normalized=True`` (the default) enforces unit norm at construction;
    intermediate arithmetic may build vectors with ``normalized=False``.
    """

    amplitudes: np.ndarray
    basis: Basis
    normalized: bool = True
    tol: float = field(default=DEFAULT_TOL.algebraic, repr=False)

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.ndim != 1 or amps.shape[0] != self.basis.dim:
            raise BasisMismatchError(
                f"{amps.shape} amplitudes do not fit basis of dimension {self.basis.dim}"
            )
        object.__setattr__(self, "amplitudes", amps)
        if self.normalized and abs(self.norm() - 1.0) > self.tol:
            raise ValueError(f"state is not normalized (norm {self.norm()!r})")

    @property
    def dim(self) -> int:
        return self.basis.dim

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, label: str) -> complex:
        return complex(self.amplitudes[self.basis.index(label)])

    def normalize(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.amplitudes / n, self.basis)

    def scaled(self, factor: complex) -> "StateVector":
        factor = complex(factor)
        keep = self.normalized and abs(abs(factor) - 1.0) <= self.tol
        return StateVector(self.amplitudes * factor, self.basis, normalized=keep)

    def relabel(self, basis: Basis) -> "StateVector":
        """Same amplitudes, new labels (e.g. feed BS2 output into another splitter)."""
        return StateVector(self.amplitudes, basis, normalized=self.normalized)

    def __add__(self, other: "StateVector") -> "StateVector":
        _check_same_basis(self.basis, other.basis)
        return StateVector(self.amplitudes + other.amplitudes, self.basis, normalized=False)

    def __sub__(self, other: "StateVector") -> "StateVector":
        _check_same_basis(self.basis, other.basis)
        return StateVector(self.amplitudes - other.amplitudes, self.basis, normalized=False)

    def __rmul__(self, factor: complex) -> "StateVector":
        return StateVector(self.amplitudes * complex(factor), self.basis, normalized=False)


@dataclass(frozen=True, eq=False)
class Operator:
    """Square complex matrix mapping ``basis_in`` amplitudes to ``basis_out``."""

    matrix: np.ndarray
    basis_in: Basis
    basis_out: Basis | None = None

    def __post_init__(self):
        mat = _frozen(self.matrix)
        if self.basis_out is None:
            object.__setattr__(self, "basis_out", self.basis_in)
        n = self.basis_in.dim
        if mat.shape != (n, n) or self.basis_out.dim != n:
            raise BasisMismatchError(f"operator of shape {mat.shape} does not fit dimension {n}")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.basis_in.dim

    def adjoint(self) -> "Operator":
        return Operator(self.matrix.conj().T, self.basis_out, self.basis_in)

    def __matmul__(self, other: "Operator") -> "Operator":
        """Composition: ``(self @ other)`` applies ``other`` first."""
        _check_same_basis(self.basis_in, other.basis_out)
        return Operator(self.matrix @ other.matrix, other.basis_in, self.basis_out)

    def __add__(self, other: "Operator") -> "Operator":
        _check_same_basis(self.basis_in, other.basis_in)
        _check_same_basis(self.basis_out, other.basis_out)
        return Operator(self.matrix + other.matrix, self.basis_in, self.basis_out)

    def expectation(self, state: StateVector) -> complex:
        return inner(state, apply(self, state))


def _check_same_basis(a: Basis, b: Basis) -> None:
    if a.labels != b.labels:
        raise BasisMismatchError(f"basis mismatch: {a.labels} vs {b.labels}")


def ket(basis: Basis, label: str) -> StateVector:
    amps = np.zeros(basis.dim, dtype=complex)
    amps[basis.index(label)] = 1.0
    return StateVector(amps, basis)


def state(basis: Basis, amplitudes: Sequence[complex]) -> StateVector:
    return StateVector(np.asarray(amplitudes, dtype=complex), basis)


def spin_up() -> StateVector:
    return ket(SPIN, "up")


def spin_down() -> StateVector:
    return ket(SPIN, "down")


def spin_right() -> StateVector:
    return state(SPIN, [SQRT1_2, SQRT1_2])


def spin_left() -> StateVector:
    return state(SPIN, [SQRT1_2, -SQRT1_2])


def spin_from_x(a: complex, b: complex, *, normalized: bool = True) -> StateVector:
    """Spin state ``a|right> + b|left>`` in z coordinates."""
    amps = SQRT1_2 * np.array([a + b, a - b], dtype=complex)
    return StateVector(amps, SPIN, normalized=normalized)


# change of basis: columns are |right>, |left> in z coordinates
X_TO_Z = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) * SQRT1_2


def operator_from_x(matrix_x) -> Operator:
    """Spin operator given by its matrix in the (right, left) basis."""
    m = np.asarray(matrix_x, dtype=complex)
    return Operator(X_TO_Z @ m @ X_TO_Z.conj().T, SPIN)


def identity(basis: Basis) -> Operator:
    return Operator(np.eye(basis.dim, dtype=complex), basis)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Product state, first factor major."""
    return StateVector(
        np.kron(a.amplitudes, b.amplitudes),
        a.basis * b.basis,
        normalized=a.normalized and b.normalized,
    )


def tensor_op(a: Operator, b: Operator) -> Operator:
    return Operator(
        np.kron(a.matrix, b.matrix), a.basis_in * b.basis_in, a.basis_out * b.basis_out
    )


def apply(op: Operator, s: StateVector) -> StateVector:
    _check_same_basis(op.basis_in, s.basis)
    out = op.matrix @ s.amplitudes
    normalized = s.normalized and abs(np.linalg.norm(out) - 1.0) <= s.tol
    return StateVector(out, op.basis_out, normalized=normalized)


def inner(a: StateVector, b: StateVector) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    _check_same_basis(a.basis, b.basis)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def projector(basis: Basis, label: str) -> Operator:
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    i = basis.index(label)
    mat[i, i] = 1.0
    return Operator(mat, basis)


def projector_onto(s: StateVector) -> Operator:
    return Operator(np.outer(s.amplitudes, s.amplitudes.conj()), s.basis)


def is_unitary(op: Operator, tol: Tolerances = DEFAULT_TOL) -> bool:
    m = op.matrix
    dev = np.max(np.abs(m.conj().T @ m - np.eye(op.dim)))
    return bool(dev <= tol.algebraic)


def is_hermitian(op: Operator, tol: Tolerances = DEFAULT_TOL) -> bool:
    m = op.matrix
    return bool(np.max(np.abs(m - m.conj().T)) <= tol.algebraic)


def hermitian_eigenvalues(op: Operator, tol: Tolerances = DEFAULT_TOL) -> list[float]:
    """Ascending real eigenvalues of a Hermitian operator.

    Dimension 2 uses the closed-form quadratic roots; larger operators use
    cyclic complex Jacobi rotations.
    """
    if not is_hermitian(op, tol):
        raise ValueError("operator is not Hermitian")
    m = 0.5 * (op.matrix + op.matrix.conj().T)
    if op.dim == 1:
        return [float(m[0, 0].real)]
    if op.dim == 2:
        a, d = float(m[0, 0].real), float(m[1, 1].real)
        half_gap = math.hypot(0.5 * (a - d), float(abs(m[0, 1])))
        mean = 0.5 * (a + d)
        return [mean - half_gap, mean + half_gap]
    values, vectors = jacobi_eigh(m)
    residual = np.max(np.abs(vectors @ np.diag(values) @ vectors.conj().T - m))
    if residual > tol.eigen:
        raise ArithmeticError(f"eigen reconstruction residual {residual:.3g} exceeds tolerance")
    return sorted(float(v) for v in values)


def jacobi_eigh(a: np.ndarray, eps: float = 1e-12, max_sweeps: int = 100):
    """Cyclic Jacobi eigendecomposition of a Hermitian matrix.

    Returns ``(values, vectors)`` with ``a = V diag(values) V^H``. Sweeps
    stop once the off-diagonal Frobenius norm is at most ``eps``.
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= eps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) == 0.0:
                    continue
                # U = D R: D rephases q so the pivot is real, R is a real Givens rotation
                d = (apq / abs(apq)).conjugate()
                app, aqq = a[p, p].real, a[q, q].real
                theta = 0.5 * math.atan2(2.0 * abs(apq), aqq - app)
                c, s = math.cos(theta), math.sin(theta)
                rot = np.eye(n, dtype=complex)
                rot[p, p] = c
                rot[p, q] = s
                rot[q, p] = -s * d
                rot[q, q] = c * d
                a = rot.conj().T @ a @ rot
                v = v @ rot
    else:
        raise ArithmeticError("Jacobi iteration did not converge")
    return np.diag(a).real.copy(), v


def complex_pair(z: complex) -> list[float]:
    """JSON form of a complex scalar."""
    z = complex(z)
    return [z.real, z.imag]


def equal_up_to_phase(a: StateVector, b: StateVector, tol: float = 1e-12) -> bool:
    """True when ``|<a|b>| = |a| |b|`` within ``tol``."""
    ov = abs(inner(a, b))
    return abs(ov - a.norm() * b.norm()) <= tol
