"""Exception types shared across the package."""


class OperadForgeError(ValueError):
    """Base class for all domain errors."""


class DuplicateLabel(OperadForgeError):
    pass


class OverlappingCycles(OperadForgeError):
    pass


class Unstable(OperadForgeError):
    pass


class LabelMismatch(OperadForgeError):
    pass


class ColourMismatch(OperadForgeError):
    pass


class MissingLabel(OperadForgeError):
    pass


class LabelCollision(OperadForgeError):
    pass


class SingularOmega(OperadForgeError):
    pass


class SymmetryViolation(OperadForgeError):
    pass


class KindMismatch(OperadForgeError):
    pass


class KeyMissing(OperadForgeError):
    pass


class PreconditionViolated(OperadForgeError):
    pass
