"""Probabilistic dense coding with an unpolarized spin preparation.

With input spin ``alpha|right> + beta|left>`` the two spin states Bob can
receive are ``phi1 = alpha|right> + beta|left>`` (delta = 0) and
``phi2 = alpha|right> - beta|left>`` (delta = pi). They overlap by
``alpha^2 - beta^2``, so Bob uses a three-outcome measurement: S1 means
phi1, S2 means phi2, S3 is inconclusive.

The three operators published for this measurement sum to the identity,
but S3 has eigenvalues ``1 - 2 beta^2`` and ``1 - 2 alpha^2``, one of which
is negative unless ``alpha = beta``. ``povm_validate`` reports this, and
``discrimination_probs``/``sample_discrimination`` refuse invalid sets
instead of clamping. The ungated ``effect_expectations`` exposes the
formal values for diagnostics: ``<phi1|S1|phi1> = 4 alpha^2 beta^2``, which
is what ``1 - <phi1|S3|phi1>`` evaluates to, not the printed
``2(1 - 2 alpha^2 beta^2)`` (that form is kept as ``paper_formula_value``).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import optics, protocol
from .hilbert import (
    DEFAULT_TOL,
    SPIN,
    Operator,
    StateVector,
    Tolerances,
    hermitian_eigenvalues,
    identity,
    inner,
    is_hermitian,
    ket,
    operator_from_x,
    spin_from_x,
    tensor,
)
from .protocol import Message, ShotRecord, encode
from .rng import inverse_cdf, partitions, shot_uniforms

EFFECT_LABELS = ("S1", "S2", "S3")
# what each outcome tells Bob about the spin state
CONCLUSIONS = {"S1": "phi1", "S2": "phi2", "S3": None}


class InvalidPovmError(ValueError):
    """Probabilities requested from an operator set that is not a POVM."""

    def __init__(self, report: "PovmReport"):
        super().__init__(
            f"not a valid POVM (min eigenvalue {report.min_eigenvalue:.6g}, "
            f"completeness residual {report.completeness_residual:.3g})"
        )
        self.report = report


@dataclass(frozen=True)
class SpinPreparation:
    alpha: float
    beta: float | None = None
    delta: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.beta is None:
            object.__setattr__(self, "beta", math.sqrt(max(0.0, 1.0 - self.alpha**2)))
        if self.beta < 0:
            raise ValueError("beta must be nonnegative; carry phases in delta")
        if abs(self.alpha**2 + self.beta**2 - 1.0) > 1e-12:
            raise ValueError("alpha^2 + beta^2 must equal 1")

    @classmethod
    def from_alpha_squared(cls, a2: float, delta: float = 0.0) -> "SpinPreparation":
        return cls(math.sqrt(a2), math.sqrt(1.0 - a2), delta)

    def spin_state(self, delta: float | None = None) -> StateVector:
        """``alpha|right> + beta e^{i delta}|left>``."""
        d = self.delta if delta is None else delta
        return spin_from_x(self.alpha, self.beta * cmath.exp(1j * d))

    @property
    def phi1(self) -> StateVector:
        return spin_from_x(self.alpha, self.beta)

    @property
    def phi2(self) -> StateVector:
        return spin_from_x(self.alpha, -self.beta)


def output_states(prep: SpinPreparation) -> dict[Message, StateVector]:
    """The four path (x) spin states reaching Bob, keyed by message."""
    basis = optics.path_space(optics.STAGES[2])
    out = {}
    for m in protocol.MESSAGES:
        # phi = 0 exits on psi3 with a factor i, phi = pi exits on psi4
        path = ket(basis, "psi3").scaled(1j) if m.b_path == 0 else ket(basis, "psi4")
        spin = prep.phi1 if m.b_spin == 0 else prep.phi2
        out[m] = tensor(path, spin)
    return out


def pipeline_output_states(prep: SpinPreparation) -> dict[Message, StateVector]:
    """Same four states by running the interferometer on ``alpha|right> + beta|left>``."""
    start = spin_from_x(prep.alpha, prep.beta)
    return {m: protocol.evolve(encode(m), spin=start) for m in protocol.MESSAGES}


class LinearIndependence(NamedTuple):
    independent: bool
    gram_determinant: float


def linear_independence(a: StateVector, b: StateVector, tol: float = 1e-12) -> LinearIndependence:
    g = np.array([[inner(a, a), inner(a, b)], [inner(b, a), inner(b, b)]])
    det = float(np.linalg.det(g).real)
    return LinearIndependence(det > tol, det)


@dataclass(frozen=True)
class PovmSet:
    """Hermitian spin operators summing to the identity.

    Positivity is deliberately not checked here; see ``povm_validate``.
    """

    effects: tuple[Operator, ...]
    labels: tuple[str, ...] = EFFECT_LABELS

    def __post_init__(self):
        object.__setattr__(self, "effects", tuple(self.effects))
        if len(self.effects) != len(self.labels):
            raise ValueError("one label per effect")
        for e in self.effects:
            if e.basis_in != SPIN or not is_hermitian(e):
                raise ValueError("effects must be Hermitian operators on the spin space")
        if completeness_residual(self.effects) > DEFAULT_TOL.algebraic:
            raise ValueError("effects do not sum to the identity")

    def __getitem__(self, label: str) -> Operator:
        return self.effects[self.labels.index(label)]


def completeness_residual(effects) -> float:
    total = sum((e.matrix for e in effects), np.zeros((2, 2), dtype=complex))
    return float(np.max(np.abs(total - identity(SPIN).matrix)))


def paper_povm(prep: SpinPreparation) -> PovmSet:
    """The published three-outcome operator set, given in the x basis."""
    a, b = prep.alpha, prep.beta
    s1 = [[b * b, a * b], [a * b, a * a]]
    s2 = [[b * b, -a * b], [-a * b, a * a]]
    s3 = [[1 - 2 * b * b, 0.0], [0.0, 1 - 2 * a * a]]
    return PovmSet(tuple(operator_from_x(m) for m in (s1, s2, s3)))


@dataclass(frozen=True)
class PovmReport:
    completeness_residual: float
    eigenvalues: tuple[tuple[float, ...], ...]
    is_positive: tuple[bool, ...]
    overall_valid: bool

    @property
    def min_eigenvalue(self) -> float:
        return min(min(ev) for ev in self.eigenvalues)


def povm_validate(povm: PovmSet, tol: Tolerances = DEFAULT_TOL) -> PovmReport:
    eigs = tuple(tuple(hermitian_eigenvalues(e, tol)) for e in povm.effects)
    positive = tuple(bool(ev[0] >= -tol.eigen) for ev in eigs)
    residual = completeness_residual(povm.effects)
    return PovmReport(residual, eigs, positive, all(positive) and residual <= tol.algebraic)


def effect_expectations(povm: PovmSet, state: StateVector) -> dict[str, float]:
    """Formal ``<state|S_k|state>``; not probabilities unless the set is valid."""
    return {lab: float(e.expectation(state).real) for lab, e in zip(povm.labels, povm.effects)}


@dataclass(frozen=True)
class DiscriminationResult:
    probabilities: dict[str, float]
    success_probability: float

    def __post_init__(self):
        if abs(sum(self.probabilities.values()) - 1.0) > 1e-12:
            raise ValueError("outcome probabilities must sum to 1")

    @property
    def conclusions(self) -> dict[str, str | None]:
        return {lab: CONCLUSIONS.get(lab) for lab in self.probabilities}


def discrimination_probs(povm: PovmSet, state: StateVector) -> DiscriminationResult:
    report = povm_validate(povm)
    if not report.overall_valid:
        raise InvalidPovmError(report)
    probs = effect_expectations(povm, state)
    # clip roundoff below zero; genuine negatives were rejected above
    probs = {k: max(0.0, v) for k, v in probs.items()}
    total = sum(probs.values())
    probs = {k: v / total for k, v in probs.items()}
    return DiscriminationResult(probs, 1.0 - probs["S3"])


def formal_success(prep: SpinPreparation) -> float:
    """``1 - <phi1|S3|phi1>`` evaluated directly, valid POVM or not."""
    return 1.0 - effect_expectations(paper_povm(prep), prep.phi1)["S3"]


def paper_formula_value(prep: SpinPreparation) -> float:
    """The printed closed form ``2(1 - 2 alpha^2 beta^2)``; exceeds 1 off the symmetric point."""
    return 2.0 * (1.0 - 2.0 * prep.alpha**2 * prep.beta**2)


def idp_optimum(prep: SpinPreparation) -> float:
    """Best unambiguous success for equiprobable phi1, phi2: ``1 - |<phi1|phi2>|``."""
    return 1.0 - abs(inner(prep.phi1, prep.phi2))


def sample_discrimination(
    povm: PovmSet,
    prep: SpinPreparation,
    message: Message,
    shots: int,
    seed: int,
    workers: int = 1,
) -> ShotRecord:
    """Seeded shots of (path channel, spin outcome); counts keyed ``"psi3,S1"`` etc."""
    if shots < 1:
        raise ValueError("shots must be at least 1")
    spin = prep.phi1 if message.b_spin == 0 else prep.phi2
    result = discrimination_probs(povm, spin)
    p = [result.probabilities[lab] for lab in povm.labels]
    path = "psi3" if message.b_path == 0 else "psi4"

    counts = np.zeros(len(p), dtype=int)
    for start, stop in partitions(shots, workers):
        u = shot_uniforms(seed, start, stop)
        counts += np.bincount(inverse_cdf(p, u), minlength=len(p))
    keys = [f"{pth},{lab}" for pth in optics.STAGES[2] for lab in povm.labels]
    record = dict.fromkeys(keys, 0)
    for lab, n in zip(povm.labels, counts):
        record[f"{path},{lab}"] = int(n)
    return ShotRecord(seed, shots, record)


def decode_outcome(key: str) -> Message | None:
    """Message implied by a ``"path,effect"`` outcome; None when inconclusive."""
    path, effect = key.split(",")
    conclusion = CONCLUSIONS[effect]
    if conclusion is None:
        return None
    return Message(0 if conclusion == "phi1" else 1, 0 if path == "psi3" else 1)


def round_trip_rate(record: ShotRecord, message: Message) -> float:
    hits = sum(n for key, n in record.counts.items() if decode_outcome(key) == message)
    return hits / record.shots
