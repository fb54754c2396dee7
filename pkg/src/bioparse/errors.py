"""Exception taxonomy shared by the library and the CLI.

The CLI maps these onto process exit codes: UsageError -> 1,
FormatError -> 2, DomainError -> 3.
"""


class BioparseError(Exception):
    """Base class for all library errors."""


class UsageError(BioparseError):
    """Bad invocation: unknown flag, out-of-range option, unpaired input files."""


class FormatError(BioparseError):
    """Malformed or unreadable file content (wrong magic, bad PNG type, broken JSON)."""


class DomainError(BioparseError):
    """Operation preconditions violated by the data (empty mask, single-class labels)."""


class FitError(DomainError):
    """Distribution fitting impossible (too few samples, degenerate variance)."""


class ResolutionError(DomainError):
    """Prompt mentions an object phrase missing from the ontology vocabulary."""
