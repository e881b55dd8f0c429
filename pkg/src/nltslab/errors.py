"""Exception types shared across the package."""

from __future__ import annotations


class NltsLabError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(NltsLabError):
    """Operands have incompatible lengths or shapes."""


class CapExceeded(NltsLabError):
    """An exhaustive enumeration would exceed the configured cap."""


class EnumerationCapExceeded(CapExceeded):
    """A codeword/subset enumeration is too large even for sampling setup."""


class AsymmetricGenerators(NltsLabError):
    """A Cayley generator set is not closed under inversion."""


class DegenerateFace(NltsLabError):
    """A balanced-product face has coinciding corners."""


class NotBipartite(NltsLabError):
    """A graph expected to be bipartite is not."""


class NotLeftRegular(NltsLabError):
    """A bipartite graph is not left-regular of the expected degree."""


class ConvergenceFailure(NltsLabError):
    """The eigensolver did not converge."""


class LengthMismatch(NltsLabError):
    """Two codes do not share the expected block length."""


class DegreeMismatch(NltsLabError):
    """Graph degree does not match the local code length."""


class NotOrthogonal(NltsLabError):
    """H_x and H_z have a row pair with odd overlap."""

    def __init__(self, row_x: int, row_z: int):
        self.row_x = row_x
        self.row_z = row_z
        super().__init__(
            f"X row {row_x} and Z row {row_z} overlap on an odd number of columns"
        )


class OrthogonalityFailure(NltsLabError):
    """A Tanner construction produced non-commuting checks (index plumbing bug
    or incompatible local codes)."""

    def __init__(self, vertex_z: int, vertex_x: int, message: str = ""):
        self.vertex_z = vertex_z
        self.vertex_x = vertex_x
        detail = f" ({message})" if message else ""
        super().__init__(
            f"checks at Z-vertex {vertex_z} and X-vertex {vertex_x} anticommute{detail}"
        )


class NotNormalized(NltsLabError):
    """A statevector is not normalized to within tolerance."""


class DimensionCap(CapExceeded):
    """A statevector or dense-operator build exceeds the qubit cap."""


class EnvelopeFailure(NltsLabError):
    """The amplification polynomial failed its numeric envelope check."""


class PreconditionFailed(NltsLabError):
    """A certificate's precondition does not hold for the given inputs."""


class DegenerateCode(NltsLabError):
    """The code has no logical qubits (k = 0)."""


class ConfigError(NltsLabError):
    """An experiment configuration is malformed."""


class IoFailure(NltsLabError):
    """Report files could not be written."""
