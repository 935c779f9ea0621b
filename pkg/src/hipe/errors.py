"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Shapes or regions do not agree (mismatched dims, out-of-bounds region)."""


class InputTooSmallError(ValueError):
    """Input smaller than the 8x8 minimum the engine supports."""


class HfaFormatError(ValueError):
    """Array file does not conform to the HFA layout (bad magic, rank or dims)."""


class HfaTruncatedError(HfaFormatError):
    """Array file header declares more payload than the file contains."""


class UnsupportedSubstrateError(ValueError):
    """Substrate cannot be applied in the requested mode (e.g. local mean on a scattered mask)."""


class InvalidAnnotationError(ValueError):
    """Pointing-game target region is empty or otherwise unusable."""


class ProtocolError(RuntimeError):
    """External scoring peer violated the wire protocol or died mid-exchange."""


class HandshakeError(ProtocolError):
    """External scoring peer sent a bad handshake."""


class OracleTimeoutError(ProtocolError):
    """External scoring peer did not answer within the allotted time."""
