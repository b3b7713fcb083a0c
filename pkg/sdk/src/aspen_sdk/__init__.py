"""aspen-sdk: write out-of-process solver plugins in Python.

Subclass :class:`Plugin`, override the handlers you need, and call
:func:`serve`. See :mod:`aspen_sdk.plugin` for the wire contract.
"""

from .plugin import (
    E_HANDLER,
    E_METHOD_NOT_FOUND,
    E_PARSE,
    E_VERSION,
    METHODS,
    PROTOCOL_VERSION,
    Directive,
    Plugin,
    serve,
)

__version__ = "0.1.0"

__all__ = [
    "Directive",
    "E_HANDLER",
    "E_METHOD_NOT_FOUND",
    "E_PARSE",
    "E_VERSION",
    "METHODS",
    "PROTOCOL_VERSION",
    "Plugin",
    "serve",
]
