"""Exception hierarchy.

Every failure a caller can act on derives from RespicamError so batch runners
can record it per subject instead of aborting the sweep.
"""

from __future__ import annotations


class RespicamError(Exception):
    """Base class for all respicam failures."""


# frame_io
class NoFramesError(RespicamError):
    pass


class DimensionMismatchError(RespicamError):
    pass


class DecodeError(RespicamError):
    pass


# roi / cropping
class OutOfBoundsError(RespicamError):
    pass


class RoiTooSmallError(RespicamError):
    pass


# imgproc / features
class ImageTooSmallError(RespicamError):
    pass


class BadWindowError(RespicamError):
    pass


class NoCornersError(RespicamError):
    pass


# tracking
class TrackingCollapseError(RespicamError):
    pass


# respsignal
class NoTracksError(RespicamError):
    pass


class LengthMismatchError(RespicamError):
    pass


class BadCutoffError(RespicamError):
    pass


class ConstantSignalError(RespicamError):
    pass


class SignalTooShortError(RespicamError):
    pass


# synthgen
class BadSpecError(RespicamError):
    pass


class WriteError(RespicamError):
    pass


# bench
class NoDataError(RespicamError):
    pass


class ManifestError(RespicamError):
    pass


class ConfigError(RespicamError):
    pass


__all__ = [
    "RespicamError",
    "NoFramesError",
    "DimensionMismatchError",
    "DecodeError",
    "OutOfBoundsError",
    "RoiTooSmallError",
    "ImageTooSmallError",
    "BadWindowError",
    "NoCornersError",
    "TrackingCollapseError",
    "NoTracksError",
    "LengthMismatchError",
    "BadCutoffError",
    "ConstantSignalError",
    "SignalTooShortError",
    "BadSpecError",
    "WriteError",
    "NoDataError",
    "ManifestError",
    "ConfigError",
]
