"""Exception hierarchy shared across the platform."""


class ImageHuntError(Exception):
    """Base class for all errors raised by this package."""


class EmptyQueryError(ImageHuntError):
    """A hunt was requested with neither an image link nor keywords."""


class MissingImageLinkError(ImageHuntError):
    """An image-mode engine request was built without an image link."""


class BackendUnreachableError(ImageHuntError):
    """The search backend could not be reached or answered with a failure."""


class UndecodableImageError(ImageHuntError):
    """Input bytes could not be decoded as an image."""


class ZeroAreaImageError(ImageHuntError):
    """An operation received an image without any pixels."""


class UnknownAssetError(ImageHuntError):
    """No stored asset exists under the requested identifier."""


class NoProvenanceError(ImageHuntError):
    """A credit line was requested for an asset without provenance."""


class FetchFailureError(ImageHuntError):
    """A remote or local link could not be fetched."""


class UnknownStyleError(ImageHuntError):
    """The requested pre-coded style is not in the registry."""


class ExternalBackendError(ImageHuntError):
    """The external style backend failed or returned a malformed response."""


class UnknownSessionError(ImageHuntError):
    """No session exists under the requested identifier."""


class UnknownLayerError(ImageHuntError):
    """The session has no layer under the requested identifier."""


class RegionError(ImageHuntError):
    """A cut region is degenerate or entirely outside the image bounds."""


class ConfigError(ImageHuntError):
    """The configuration file or environment overrides are invalid."""


class ServeError(ImageHuntError):
    """The HTTP server could not be started."""
