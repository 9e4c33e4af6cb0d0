import numpy as np


class SemiRadiusError(Exception):
    """Base class for every error raised by semiradius."""


class NotHermitian(SemiRadiusError, np.linalg.LinAlgError):
    pass


class NotPSD(SemiRadiusError, np.linalg.LinAlgError):
    pass


class NonConvergence(SemiRadiusError, np.linalg.LinAlgError):
    pass


class NonSquare(SemiRadiusError, ValueError):
    pass


class DimensionMismatch(SemiRadiusError, ValueError):
    pass


class BadShape(SemiRadiusError, ValueError):
    pass


class NotAdjointable(SemiRadiusError):
    """T does not admit an A-adjoint (R(T*A) is not inside R(A))."""


class MembershipMismatch(SemiRadiusError):
    """The null-space test and the Douglas range test disagreed."""


class MethodDisagreement(SemiRadiusError):
    """Compression and ThetaSup radii differ beyond tolerance."""


class DegenerateZ(SemiRadiusError):
    """The unit vector of a Buzano triple has (numerically) zero seminorm."""


class UnknownCheck(SemiRadiusError, KeyError):
    pass


class NotAnInequality(SemiRadiusError, ValueError):
    pass


class MatrixFileError(SemiRadiusError, ValueError):
    pass
