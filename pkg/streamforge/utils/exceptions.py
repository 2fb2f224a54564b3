# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations


class BuilderError(Exception):
    """
    Raised when incontered errors on builders.
    """


class ConfigError(Exception):
    """
    Raised when incontered errors on run configuration.
    """


##############################
# Experiment description
##############################


class SpecError(Exception):
    """
    Raised when an experiment description cannot be loaded.
    """


class ParseError(SpecError):
    """
    Raised when a GraphML or config file is malformed.
    """


class ValidationError(SpecError):
    """
    Raised when an experiment description violates an invariant.
    """

    def __init__(self, element: str, reason: str) -> None:
        super().__init__(f"{element}: {reason}")
        self.element = element
        self.reason = reason


class MissingConfigError(SpecError):
    """
    Raised when a *Cfg reference points to a missing file.
    """


class UnsupportedStructureError(SpecError):
    """
    Raised when a config file uses nesting beyond flat maps.
    """


##############################
# Simulation engine
##############################


class SimulationError(Exception):
    """
    Raised when incontered errors in the event engine.
    """


class SchedulingInPastError(SimulationError):
    """
    Raised when an event is scheduled before the current clock.
    """


class HandlerPanic(SimulationError):
    """
    Raised when an event handler fails.
    """

    def __init__(self, time: int, seq: int, target: str, kind: str) -> None:
        super().__init__(f"Handler of event #{seq} '{kind}' for '{target}' failed at t={time}us.")
        self.time = time
        self.seq = seq
        self.target = target
        self.kind = kind


##############################
# Network
##############################


class NetworkError(Exception):
    """
    Raised when incontered errors in the emulated network.
    """


class DisconnectedError(NetworkError):
    """
    Raised when hosts that must communicate have no path.
    """

    def __init__(self, pairs: list[tuple[str, str]]) -> None:
        listed = ", ".join(f"{a}<->{b}" for a, b in pairs)
        super().__init__(f"Unreachable host pairs: {listed}")
        self.pairs = pairs


class UnknownPortError(NetworkError):
    """
    Raised when a (node, port) pair does not exist.
    """


##############################
# Workload
##############################


class WorkloadError(Exception):
    """
    Raised when incontered errors in application components.
    """


class MalformedRecordError(WorkloadError):
    """
    Raised when an operator cannot interpret a record.
    """


##############################
# Faults and metrics
##############################


class FaultError(Exception):
    """
    Raised when incontered errors on faults.
    """


class TargetMissingError(FaultError):
    """
    Raised when a fault targets an unknown element.
    """


class IoError(Exception):
    """
    Raised when exported artifacts cannot be written or read.
    """
