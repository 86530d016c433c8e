"""Exception hierarchy.

Everything raised on purpose derives from PolycorrError so callers can
catch one type at the CLI boundary. Subclasses separate property-engine
failures from analysis/correction failures and from input handling.
"""


class PolycorrError(Exception):
    """Base class for all errors raised by this package."""


# -- property engine ---------------------------------------------------------

class ThermoError(PolycorrError):
    pass


class ComponentLookupError(ThermoError):
    """A composition references a component the database does not know."""


class StateRangeError(ThermoError):
    """(P, T) outside the validity range of the component data."""


class EosStateError(ThermoError):
    """The equation of state has no physical vapor root at (P, T)."""


class ExponentError(ThermoError):
    """Polytropic-exponent evaluation hit an unphysical denominator."""


# -- point analysis / correction ---------------------------------------------

class AnalysisError(PolycorrError):
    pass


class DegenerateCompressionError(AnalysisError):
    """Inlet and discharge specific volumes coincide; no exponent defined."""


class EfficiencyUndefinedError(AnalysisError):
    pass


class IsentropicSolveError(AnalysisError):
    """Entropy root could not be bracketed or refined."""


class HeadUndefinedError(AnalysisError):
    pass


class ConvergenceError(AnalysisError):
    """An iterative scheme exhausted its sweep budget."""


class DataQualityError(AnalysisError):
    """Input point violates a physical precondition (e.g. head <= 0)."""


# -- reference maps -----------------------------------------------------------

class MapError(PolycorrError):
    pass


class InsufficientDataError(MapError):
    pass


class FitError(MapError):
    """Degenerate design matrix (flows do not span a usable range)."""


class DeviationUndefinedError(MapError):
    pass


# -- configuration / ingestion / synthesis ------------------------------------

class InputError(PolycorrError):
    pass


class ConfigError(InputError):
    pass


class SchemaError(InputError):
    """CSV header or file structure does not match the documented schema."""


class RowError(InputError):
    """One CSV row failed validation; carries the 1-based row number."""

    def __init__(self, row_number: int, message: str):
        super().__init__(f"row {row_number}: {message}")
        self.row_number = row_number
        self.reason = message


class ScenarioError(InputError):
    """Synthetic scenario produces unphysical states; names the parameter."""
