"""Exception hierarchy for fieldsense."""


class FieldsenseError(Exception):
    """Base class for all fieldsense errors."""


class SchemaError(FieldsenseError):
    """Invalid or unloadable form schema."""


class DataError(FieldsenseError):
    """Invalid or unloadable historical data file."""


class PreprocessError(FieldsenseError):
    """Preprocessing wiped out all usable fields or instances."""


class TargetError(FieldsenseError):
    """Requested suggestion target is unknown or not modeled."""
