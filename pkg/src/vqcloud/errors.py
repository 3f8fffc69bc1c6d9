"""Exception hierarchy shared by the client, the cloud service and the trainer."""


class VQCloudError(Exception):
    """Base class for every error raised by this package."""


class InvalidGateError(VQCloudError, ValueError):
    """A gate refers to a qubit outside the register or is otherwise malformed."""


class InvalidInputError(VQCloudError, ValueError):
    """An input-state descriptor is not a valid basis or two-basis superposition."""


class InvalidArgumentError(VQCloudError, ValueError):
    pass


class ConfigurationError(VQCloudError, ValueError):
    """Specs that are individually valid but mutually inconsistent (e.g. qubit counts)."""


class ShapeError(VQCloudError, ValueError):
    pass


class EncodingError(VQCloudError, ValueError):
    """A feature vector cannot be mapped to a normalized coefficient vector."""


class ProtocolError(VQCloudError):
    """The cloud answered, but the answer is inconsistent with the request."""


class TransportError(VQCloudError):
    """The cloud endpoint could not be reached."""


class ServiceError(VQCloudError):
    """Structured rejection returned by the cloud service.

    ``code`` is machine readable and ``status`` is the HTTP status the
    service used (or would use) for it.
    """

    def __init__(self, code: str, message: str, status: int = 400):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.status = status

    def to_dict(self) -> dict:
        return {"error": {"code": self.code, "message": self.message}}


class ServiceStartupError(VQCloudError):
    pass


class ReferenceExhausted(VQCloudError):
    """No unused basis index is left to serve as a sign reference."""


class TrainingAborted(VQCloudError):
    """Raised when the training loop hits a non-finite cost.

    ``state`` holds everything needed to inspect or resume the run.
    """

    def __init__(self, message: str, state: dict):
        super().__init__(message)
        self.state = state


class GradientInterrupted(TransportError):
    """A transport failure in the middle of a gradient evaluation.

    ``partial`` maps the shifted-parameter keys that did complete to their
    evaluated values, so a caller can retry only what is missing.
    """

    def __init__(self, message: str, partial: dict):
        super().__init__(message)
        self.partial = partial
