"""Interferometer elements as operators on path (x) spin.

Path channels come in stages, each a 2-dim path space:

    ("in1", "in2") --BS1--> ("psi1", "psi2") --BS2--> ("psi3", "psi4") --BS3--> ("psi5", "psi6")

The particle enters BS1 through ``in2``, so ``psi1`` is the transmitted arm
and ``psi2`` the reflected one. Every element is a full 4x4 operator whose
input and output labels pin down where it sits in the setup.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .hilbert import (
    SPIN,
    SQRT1_2,
    Basis,
    Operator,
    identity,
    operator_from_x,
    projector,
    tensor_op,
)

STAGES: tuple[tuple[str, str], ...] = (
    ("in1", "in2"),
    ("psi1", "psi2"),
    ("psi3", "psi4"),
    ("psi5", "psi6"),
)

SOURCE_PORT = "in2"

# reflection picks up a factor i, transmission a factor 1
BS_MATRIX = SQRT1_2 * np.array([[1j, 1.0], [1.0, 1j]], dtype=complex)


class ElementKind(Enum):
    SPIN_ROTATOR = "SpinRotator"
    BEAM_SPLITTER = "BeamSplitter"
    PHASE_SHIFTER = "PhaseShifter"
    MIRROR = "Mirror"


@dataclass(frozen=True)
class ElementSpec:
    """Declarative element description; ``build`` turns it into an operator."""

    kind: ElementKind
    parameter: float | None = None
    target: str | None = None
    in_labels: tuple[str, str] | None = None
    out_labels: tuple[str, str] | None = None

    def __post_init__(self):
        if self.parameter is not None and not np.isfinite(self.parameter):
            raise ValueError("element parameter must be finite")

    def build(self, paths: tuple[str, str] = STAGES[1]) -> Operator:
        if self.kind is ElementKind.SPIN_ROTATOR:
            return spin_rotator(self.parameter or 0.0, paths)
        if self.kind is ElementKind.BEAM_SPLITTER:
            return beam_splitter(self.in_labels, self.out_labels)
        if self.kind is ElementKind.PHASE_SHIFTER:
            return phase_shifter(self.target, self.parameter or 0.0)
        return mirror(paths)


def stage_of(label: str) -> tuple[str, str]:
    for stage in STAGES:
        if label in stage:
            return stage
    raise KeyError(f"unknown path label {label!r}")


def path_space(paths: tuple[str, str]) -> Basis:
    return Basis(tuple(paths))


def product_space(paths: tuple[str, str]) -> Basis:
    return path_space(paths) * SPIN


def _on_path(path_matrix: np.ndarray, paths_in, paths_out=None) -> Operator:
    paths_out = paths_in if paths_out is None else paths_out
    path_op = Operator(path_matrix, path_space(paths_in), path_space(paths_out))
    return tensor_op(path_op, identity(SPIN))


def spin_rotator_spin(delta: float) -> Operator:
    """SR on the spin factor alone: phase ``e^{i delta}`` on ``|left>``."""
    return operator_from_x(np.diag([1.0, cmath.exp(1j * delta)]))


def spin_rotator(delta: float, paths: tuple[str, str] = STAGES[0]) -> Operator:
    """SR(delta), identity on the path factor.

    Maps ``|up> -> (|right> + e^{i delta}|left>)/sqrt(2)``; completed
    unitarily as a diagonal operator in the x basis.
    """
    return tensor_op(identity(path_space(paths)), spin_rotator_spin(delta))


def beam_splitter(in_labels: tuple[str, str], out_labels: tuple[str, str]) -> Operator:
    labels = tuple(in_labels) + tuple(out_labels)
    if len(set(labels)) != 4:
        raise ValueError(f"beam splitter labels must be distinct: {labels}")
    return _on_path(BS_MATRIX, tuple(in_labels), tuple(out_labels))


def phase_shifter(target: str, phase: float) -> Operator:
    paths = stage_of(target)
    diag = [cmath.exp(1j * phase) if p == target else 1.0 for p in paths]
    return _on_path(np.diag(diag), paths)


def mirror(paths: tuple[str, str] = STAGES[1]) -> Operator:
    # M1/M2 add no relative phase; a common phase is unobservable
    return identity(product_space(paths))


def stern_gerlach_projectors(path: str) -> tuple[Operator, Operator]:
    """``(|path><path| (x) |up><up|, |path><path| (x) |down><down|)``."""
    space = product_space(stage_of(path))
    return projector(space, f"{path},up"), projector(space, f"{path},down")


BS1 = beam_splitter(STAGES[0], STAGES[1])
BS2 = beam_splitter(STAGES[1], STAGES[2])
BS3 = beam_splitter(STAGES[2], STAGES[3])


def interferometer(delta: float, phi: float) -> Operator:
    """SR -> BS1 -> PS(phi on psi2) -> M1/M2 -> BS2."""
    return BS2 @ mirror() @ phase_shifter("psi2", phi) @ BS1 @ spin_rotator(delta)


def extended_interferometer(delta: float, phi: float, eta: float) -> Operator:
    """The two-splitter setup followed by PS(eta on psi3) -> M3/M4 -> BS3."""
    return BS3 @ mirror(STAGES[2]) @ phase_shifter("psi3", eta) @ interferometer(delta, phi)
