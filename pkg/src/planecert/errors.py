"""Exception hierarchy shared by every module."""


class CertError(Exception):
    """Base class for all failures raised by planecert."""


class NotUnimodular(CertError, ValueError):
    pass


class FieldMismatch(CertError, TypeError):
    """Arithmetic mixed two different quadratic fields."""


class IndeterminateAtPrecisionCap(CertError):
    """Interval refinement could not separate two reals before the cap."""


class NonHyperbolic(CertError, ValueError):
    pass


class SameAxis(CertError, ValueError):
    pass


class CapExceeded(CertError):
    pass


class DegenerateCrown(CertError, ValueError):
    pass


class OriginInRegion(CertError, ValueError):
    pass


class VanishingCorner(CertError):
    def __init__(self, message, element=None):
        super().__init__(message)
        self.element = element


class HullCheckFailed(CertError):
    def __init__(self, message, pairs=()):
        super().__init__(message)
        self.pairs = tuple(pairs)


class NotElementaryTensor(CertError, ValueError):
    pass


class SupportNotCovered(CertError):
    pass


class CertificateMismatch(CertError):
    pass


class FamilyNotVerified(CertError):
    pass


class UnboundedSupport(CertError, ValueError):
    pass


class ParseError(CertError, ValueError):
    pass
