"""Exception hierarchy.

Every error raised by the library derives from :class:`TPMarkovError`.  The
three intermediate classes map onto the CLI exit codes: validation problems
exit with 2, refusals caused by the wrong periodicity class with 3 and
resource caps with 4.
"""


class TPMarkovError(Exception):
    """Base class for all library errors."""


class ValidationError(TPMarkovError, ValueError):
    exit_code = 2


class RefusedError(TPMarkovError):
    exit_code = 3


class ResourceError(TPMarkovError):
    exit_code = 4


# input validation
class NonStochasticRow(ValidationError):
    def __init__(self, row, total):
        self.row = row
        self.total = total
        super().__init__(f"row {row} sums to {total!r}, not 1")


class NegativeEntry(ValidationError):
    pass


class NonPositiveVariance(ValidationError):
    pass


class NonZeroTotalMass(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


# structural conditions on the chain / emissions
class Reducible(RefusedError):
    pass


class Periodic(RefusedError):
    pass


class ZeroStationaryMass(RefusedError):
    pass


class DegenerateAtZero(RefusedError):
    pass


class NotStronglyAperiodic(RefusedError):
    pass


class PeriodicQ(RefusedError):
    pass


class AperiodicQ(RefusedError):
    pass


class EmissionNotLatticeConcentrated(RefusedError):
    pass


class InconsistentResidues(RefusedError):
    pass


# resource / numerical caps
class LatticeOverflow(ResourceError):
    pass


class TailNotResolved(ResourceError):
    pass


class MassDrift(ResourceError):
    pass
