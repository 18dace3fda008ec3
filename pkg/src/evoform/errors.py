"""Exception types shared across the package."""


class EvoformError(Exception):
    """Base class for all domain errors."""

    code = "error"


class BitLengthError(EvoformError):
    """Bit string or hex string has the wrong length for its layout."""

    code = "bad-length"


class InvalidSpaceError(EvoformError):
    """A search space with an empty channel or variable mask."""

    code = "invalid-space"


class InvalidMaskError(EvoformError):
    """An empty channel mask where at least one channel is required."""

    code = "invalid-mask"


class InvalidPickError(EvoformError):
    """Pick indices outside the population, or too many picks."""

    code = "invalid-picks"


class MeshFormatError(EvoformError):
    """Malformed OBJ text or out-of-range face indices."""

    code = "malformed-mesh"


class UnknownIdError(EvoformError):
    """Lookup of a session, room, mesh, or individual id that does not exist."""

    code = "unknown-id"


class NotAMemberError(EvoformError):
    """Peer access attempted from outside the room."""

    code = "not-a-member"


class NotPermittedError(EvoformError):
    """Injection between sessions that do not share a room."""

    code = "not-permitted"


class StaleDonorError(EvoformError):
    """Injection of an individual that is no longer visible via peer_sample."""

    code = "stale-donor"
