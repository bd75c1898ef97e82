"""Exception hierarchy.

Input problems and reconstruction failures are kept apart because the CLI
maps them to different exit codes.
"""


class CurveReconError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(CurveReconError, ValueError):
    """Malformed or inconsistent input (files, indices, parameters)."""


class MeshFormatError(InvalidInputError):
    """A mesh file could not be parsed."""


class NonManifoldError(InvalidInputError):
    """The mesh fails manifold validation."""


class ReconstructionError(CurveReconError, RuntimeError):
    """The pipeline could not produce a result for valid input."""


class DisconnectedError(ReconstructionError):
    """Two samples (or graph nodes) that must be connected are not."""


class UndefinedFeatureSizeError(ReconstructionError):
    """Local feature size is undefined: empty medial axis and no bound."""


class UnsatisfiableSamplingError(ReconstructionError):
    """Subsampling could not meet the requested targets."""
