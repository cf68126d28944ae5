"""Exception types shared across the toolkit."""


class SgsaccError(Exception):
    """Base class for all toolkit errors."""


class SchemaError(SgsaccError):
    """Schema file is malformed or violates a schema invariant."""


class SchemaConflictError(SchemaError):
    """Two services in one catalog share a name."""


class DataError(SgsaccError):
    """Instance or generation file is malformed."""


class SlotResolutionError(DataError):
    """An action references a slot its service schema does not define."""

    def __init__(self, message, instance_id=None, slot=None):
        super().__init__(message)
        self.instance_id = instance_id
        self.slot = slot


class ValueDomainError(SgsaccError):
    """A slot value falls outside the domain its schema allows."""


class NliError(SgsaccError):
    """Base class for NLI backend failures."""


class TransportError(NliError):
    """Backend unreachable after the configured number of attempts."""

    def __init__(self, message, attempts=0, last_status=None):
        super().__init__(message)
        self.attempts = attempts
        self.last_status = last_status


class ProtocolError(NliError):
    """Backend answered with a malformed or invalid payload."""


class PipelineError(SgsaccError):
    """Internal wiring bug, e.g. references missing for an action."""
