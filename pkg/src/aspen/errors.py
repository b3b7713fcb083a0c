"""Exception types shared across the solver, the builtin extensions and the bridge."""

from __future__ import annotations


class SolverError(Exception):
    """Base class for everything raised on purpose by this package."""


class ParseError(SolverError):
    """Malformed ground program text."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class DisjunctiveHeadUnsupported(ParseError):
    """Rule head with more than one atom; this solver handles normal rules only."""


class UnknownAtom(SolverError):
    """An extension referenced an atom id outside the program's symbol table."""


class PluginContractViolation(SolverError):
    """An extension broke one of the documented method contracts."""


class EngineInvariantError(SolverError):
    """Internal consistency audit failed; indicates a solver bug."""


class ResourceLimit(SolverError):
    """Conflict or time budget exhausted before the search finished."""

    def __init__(self, message: str, models=None, statistics=None):
        super().__init__(message)
        self.models = list(models) if models is not None else []
        self.statistics = statistics


class MalformedConstraint(SolverError):
    """A constraint atom's term does not follow the arithmetic grammar."""


class DomainProductTooLarge(SolverError):
    """The CSP domain product exceeds the exhaustive-search cap."""


class BridgeError(SolverError):
    """Base class for plugin process and wire protocol failures."""


class SpawnFailed(BridgeError):
    """The plugin command line could not be started."""


class HandshakeError(BridgeError):
    """The plugin's init response was missing, malformed, or declared unknown methods."""


class ProtocolVersionMismatch(BridgeError):
    """The plugin rejected the host's protocol version."""


class ProtocolError(BridgeError):
    """A response line violated the wire protocol (bad JSON, wrong id, bad shape)."""


class ResponseTimeout(BridgeError):
    """The plugin did not answer a request within the deadline."""


class PluginCrashed(BridgeError):
    """The plugin process exited while a request was outstanding."""
