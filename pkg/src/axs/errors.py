"""Error codes shared across the pipeline stages and the wire protocol."""

from __future__ import annotations


class PipelineError(Exception):
    """Error with a stable machine-readable code.

    The code travels on the wire in error envelopes, so it must stay
    stable even if the message text changes.
    """

    code = "PIPELINE_ERROR"

    def __init__(self, message: str = "", *, code: str | None = None):
        super().__init__(message or self.__class__.code)
        if code is not None:
            self.code = code


class InvalidParams(PipelineError):
    code = "INVALID_PARAMS"


class InvalidSettings(PipelineError):
    code = "INVALID_SETTINGS"


class DuplicateId(PipelineError):
    code = "DUPLICATE_ID"


class RoomFull(PipelineError):
    code = "ROOM_FULL"


class DuplicateParticipant(PipelineError):
    code = "DUPLICATE_PARTICIPANT"


class SessionClosed(PipelineError):
    code = "SESSION_CLOSED"


class SessionUnknown(PipelineError):
    code = "SESSION_UNKNOWN"


class QueueFull(PipelineError):
    code = "QUEUE_FULL"


class BackendTimeout(PipelineError):
    code = "BACKEND_TIMEOUT"


class BackendUnavailable(PipelineError):
    code = "BACKEND_UNAVAILABLE"


class MalformedResponse(PipelineError):
    code = "MALFORMED_RESPONSE"


class PairNotRegistered(PipelineError):
    code = "PAIR_NOT_REGISTERED"


class InvalidPair(PipelineError):
    code = "INVALID_PAIR"


class MissingLexicon(PipelineError):
    code = "MISSING_LEXICON"


class ParseError(PipelineError):
    code = "PARSE_ERROR"


class WrongLandmarkCount(PipelineError):
    code = "WRONG_LANDMARK_COUNT"


class DegeneratePose(PipelineError):
    code = "DEGENERATE_POSE"


class TooShort(PipelineError):
    code = "TOO_SHORT"


class NoInputs(PipelineError):
    code = "NO_INPUTS"


class MissingSign(PipelineError):
    code = "MISSING_SIGN"


class EmptySequence(PipelineError):
    code = "EMPTY_SEQUENCE"


class NotInBuffer(PipelineError):
    code = "NOT_IN_BUFFER"


class EmptyWindow(PipelineError):
    code = "EMPTY_WINDOW"


class NoSamples(PipelineError):
    code = "NO_SAMPLES"
