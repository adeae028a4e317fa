"""Simulation and security analysis of a Bell-state quantum dialogue.

Alice and Bob exchange two bits each per group of two Bell pairs, using
entanglement swapping and a shared secret Bell pair that Bob learns by
measurement. See :mod:`qdialogue.protocol` for the session driver and
:mod:`qdialogue.analysis` for Eve's information and the leakage audit.
"""

from .bellalg import BellClass, Collection, PauliCode
from .protocol import SessionConfig, SessionTranscript, run_session

__all__ = ["BellClass", "Collection", "PauliCode", "SessionConfig", "SessionTranscript", "run_session"]
__version__ = "0.1.0"
