"""Deterministic dense coding through the two-splitter interferometer.

Alice picks the spin-rotator phase ``delta`` and path phase ``phi`` from
{0, pi}; Bob reads which of the four Stern-Gerlach outputs S1..S4 fired.

Bit mapping: a message is ``(b_spin, b_path)`` with ``delta = pi*b_spin``
and ``phi = pi*b_path``. The U names follow the parameter table
U1=(0,0), U2=(0,pi), U3=(pi,0), U4=(pi,pi). Evolving them gives
U1->S1, U2->S3, U3->S2, U4->S4; note that S-labels printed alongside the
original scheme swap U2 and U3, which the evolution does not support.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cache

import numpy as np

from . import optics
from .hilbert import (
    SQRT1_2,
    StateVector,
    apply,
    ket,
    spin_from_x,
    spin_up,
    tensor,
)
from .rng import sample_counts

PI = math.pi


class DetectorChannel(Enum):
    S1 = ("psi3", "up")
    S2 = ("psi3", "down")
    S3 = ("psi4", "up")
    S4 = ("psi4", "down")

    @property
    def path(self) -> str:
        return self.value[0]

    @property
    def spin(self) -> str:
        return self.value[1]

    @property
    def label(self) -> str:
        return f"{self.path},{self.spin}"


CHANNELS = tuple(DetectorChannel)


@dataclass(frozen=True)
class Message:
    b_spin: int
    b_path: int

    def __post_init__(self):
        if self.b_spin not in (0, 1) or self.b_path not in (0, 1):
            raise ValueError(f"message bits must be 0 or 1, got {self.bits}")

    @property
    def bits(self) -> tuple[int, int]:
        return (self.b_spin, self.b_path)

    @classmethod
    def parse(cls, text: str) -> "Message":
        if len(text) != 2 or set(text) - {"0", "1"}:
            raise ValueError(f"expected two characters over {{0,1}}, got {text!r}")
        return cls(int(text[0]), int(text[1]))

    def __str__(self):
        return f"{self.b_spin}{self.b_path}"


MESSAGES = tuple(Message(s, p) for s in (0, 1) for p in (0, 1))

_U_NAMES = {(0, 0): "U1", (0, 1): "U2", (1, 0): "U3", (1, 1): "U4"}


@dataclass(frozen=True)
class EncoderSettings:
    delta: float
    phi: float
    name: str | None = None

    def __post_init__(self):
        expected = _name_for(self.delta, self.phi)
        if self.name is not None and self.name != expected:
            raise ValueError(f"name {self.name!r} inconsistent with (delta, phi)")


def _name_for(delta: float, phi: float) -> str | None:
    def bit(x):
        for b in (0, 1):
            if abs(x - b * PI) <= 1e-12:
                return b
        return None

    key = (bit(delta), bit(phi))
    return _U_NAMES.get(key) if None not in key else None


def encode(msg: Message) -> EncoderSettings:
    return EncoderSettings(PI * msg.b_spin, PI * msg.b_path, _U_NAMES[msg.bits])


def settings(delta: float, phi: float) -> EncoderSettings:
    """Arbitrary (diagnostic) phase pair; named when it is one of U1..U4."""
    return EncoderSettings(delta, phi, _name_for(delta, phi))


def input_state(spin: StateVector | None = None) -> StateVector:
    """Particle at the BS1 source port with the given spin (default up)."""
    path = ket(optics.path_space(optics.STAGES[0]), optics.SOURCE_PORT)
    return tensor(path, spin_up() if spin is None else spin)


def rotated_spin(delta: float) -> StateVector:
    """SR output for an up-polarized input."""
    return spin_from_x(SQRT1_2, SQRT1_2 * cmath.exp(1j * delta))


def evolve(s: EncoderSettings, spin: StateVector | None = None) -> StateVector:
    """State arriving at the Stern-Gerlach devices, by element composition."""
    return apply(optics.interferometer(s.delta, s.phi), input_state(spin))


def closed_form_after_phase_shifter(delta: float, phi: float) -> StateVector:
    """``(|psi1> + i e^{i phi}|psi2>)/sqrt(2) (x) |chi>``."""
    path = np.array([1.0, 1j * cmath.exp(1j * phi)]) * SQRT1_2
    return _product(path, optics.STAGES[1], rotated_spin(delta))


def closed_form_after_bs2(delta: float, phi: float, spin: StateVector | None = None) -> StateVector:
    """``(1/2)[i(1+e^{i phi})|psi3> + (1-e^{i phi})|psi4>] (x) |chi>``."""
    e = cmath.exp(1j * phi)
    path = 0.5 * np.array([1j * (1 + e), 1 - e])
    chi = rotated_spin(delta) if spin is None else apply(optics.spin_rotator_spin(delta), spin)
    return _product(path, optics.STAGES[2], chi)


def _product(path_amps, paths, spin: StateVector) -> StateVector:
    path = StateVector(path_amps, optics.path_space(paths))
    return tensor(path, spin)


@dataclass(frozen=True)
class OutcomeDistribution:
    probabilities: dict[DetectorChannel, float]

    def __post_init__(self):
        total = sum(self.probabilities.values())
        if abs(total - 1.0) > 1e-12 or min(self.probabilities.values()) < 0:
            raise ValueError(f"not a distribution: {self.probabilities}")

    def as_vector(self) -> np.ndarray:
        return np.array([self.probabilities[c] for c in CHANNELS])

    def argmax(self) -> DetectorChannel:
        # lowest channel id wins ties
        vec = self.as_vector()
        return CHANNELS[int(np.argmax(vec))]

    def to_dict(self) -> dict[str, float]:
        return {c.name: self.probabilities[c] for c in CHANNELS}


def detection_distribution(s: StateVector) -> OutcomeDistribution:
    if s.basis != optics.product_space(optics.STAGES[2]):
        raise ValueError(f"expected a state on the BS2 output space, got {s.basis.labels}")
    if not s.normalized:
        raise ValueError("detection requires a normalized state")
    probs = {}
    for path in optics.STAGES[2]:
        for proj, spin in zip(optics.stern_gerlach_projectors(path), ("up", "down")):
            projected = apply(proj, s)
            probs[DetectorChannel((path, spin))] = float(np.sum(np.abs(projected.amplitudes) ** 2))
    # clean roundoff so the distribution sums to 1
    total = sum(probs.values())
    return OutcomeDistribution({c: p / total for c, p in probs.items()})


@cache
def _decode_table() -> dict[DetectorChannel, Message]:
    table = {}
    for m in MESSAGES:
        table[detection_distribution(evolve(encode(m))).argmax()] = m
    if len(table) != 4:
        raise AssertionError("encoding is not a bijection onto the detector channels")
    return table


def decode(channel: DetectorChannel) -> Message:
    return _decode_table()[channel]


def transmit(msg: Message) -> Message:
    """Noise-free round trip: encode, evolve, read the certain detector, decode."""
    return decode(detection_distribution(evolve(encode(msg))).argmax())


@dataclass(frozen=True)
class ShotRecord:
    seed: int
    shots: int
    counts: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts do not sum to shots")

    def frequencies(self) -> dict[str, float]:
        return {k: v / self.shots for k, v in self.counts.items()}


def sample_shots(s: EncoderSettings, shots: int, seed: int, workers: int = 1) -> ShotRecord:
    if shots < 1:
        raise ValueError("shots must be at least 1")
    dist = detection_distribution(evolve(s))
    counts = sample_counts(dist.as_vector(), shots, seed, workers=workers)
    return ShotRecord(seed, shots, {c.name: int(n) for c, n in zip(CHANNELS, counts)})


def channel_matrix() -> np.ndarray:
    """Row ``m`` is the detector distribution for message ``m`` (MESSAGES order)."""
    return np.array([detection_distribution(evolve(encode(m))).as_vector() for m in MESSAGES])


def mutual_information(channel, prior) -> float:
    """I(X;Y) in bits for ``P(y|x) = channel[x, y]`` and input ``prior``."""
    w = np.asarray(channel, dtype=float)
    px = np.asarray(prior, dtype=float)
    if w.ndim != 2 or px.shape != (w.shape[0],):
        raise ValueError("channel must be 2-D with one row per prior entry")
    if np.any(w < 0) or np.any(np.abs(w.sum(axis=1) - 1) > 1e-9):
        raise ValueError("channel rows must be probability distributions")
    if np.any(px < 0) or abs(px.sum() - 1) > 1e-9:
        raise ValueError("prior must be a probability distribution")
    joint = px[:, None] * w
    py = joint.sum(axis=0)
    indep = px[:, None] * py[None, :]
    mask = joint > 0  # 0 log 0 = 0
    return float(np.sum(joint[mask] * np.log2(joint[mask] / indep[mask])))
