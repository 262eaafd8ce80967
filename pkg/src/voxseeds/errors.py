"""Exception hierarchy for voxseeds.

Every error raised on purpose by this package derives from VoxseedsError so
callers (notably the CLI) can map failure classes to diagnostics.
"""


class VoxseedsError(Exception):
    """Base class for all voxseeds errors."""


class InputDomainError(VoxseedsError, ValueError):
    """An argument violates a documented precondition (bad range, shape mismatch)."""


class ConfigurationError(VoxseedsError, ValueError):
    """A run configuration is unsatisfiable (e.g. volume too small for the grid)."""


class DegenerateVolumeError(VoxseedsError, ValueError):
    """The volume has no intensity spread; the requested transform is undefined."""


class NiftiFormatError(VoxseedsError, ValueError):
    """A NIfTI-1 file is malformed; the message names the offending field."""


class OrientationError(VoxseedsError, ValueError):
    """The image carries no usable orientation; pass an explicit permutation."""


class OwnershipError(VoxseedsError, RuntimeError):
    """Caller bug: a block move was requested from a supervoxel that does not own it."""
