"""Distributed quantum circuit compilation with remote-CX telegates and noisy fidelity estimation."""

from .circuit import Circuit, GateKind, Instruction
from .distributor import CommunicationQubitError, DistributedCircuit, distribute
from .scheduler import Assignment, CapacityError, NetworkConfig, QPUSpec

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "CapacityError",
    "Circuit",
    "CommunicationQubitError",
    "DistributedCircuit",
    "GateKind",
    "Instruction",
    "NetworkConfig",
    "QPUSpec",
    "distribute",
]
