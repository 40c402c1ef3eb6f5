"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class CSMinimalError(Exception):
    """Base class for all library errors."""


class NumericError(CSMinimalError):
    """A numeric procedure failed (CLI exit code 2)."""


class DomainError(NumericError, ValueError):
    """A profile state left sin r > 0, 0 < theta < pi/2."""


class IntegrationError(NumericError):
    def __init__(self, message, status=None, t=None):
        super().__init__(message)
        self.status = status
        self.t = t


class ShootingError(NumericError):
    def __init__(self, message, scan=()):
        super().__init__(message)
        self.scan = list(scan)

    def scan_table(self):
        lines = ["      r0              mismatch"]
        for r0, g in self.scan:
            lines.append(f"  {r0:.10f}  {g: .6e}")
        return "\n".join(lines)


class FrontierError(NumericError):
    """The truncation bound never activated before the (i, j) cap."""


class InvariantError(CSMinimalError):
    """A structural identity failed beyond tolerance (CLI exit code 3)."""


class SymmetryError(InvariantError):
    pass


class InconsistentVerdictError(InvariantError):
    pass
