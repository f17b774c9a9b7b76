"""Dense coding on the path and spin of a single spin-1/2 particle."""

from .hilbert import Basis, Operator, StateVector, Tolerances
from .protocol import DetectorChannel, EncoderSettings, Message

__all__ = [
    "Basis",
    "DetectorChannel",
    "EncoderSettings",
    "Message",
    "Operator",
    "StateVector",
    "Tolerances",
]

__version__ = "0.1.0"
