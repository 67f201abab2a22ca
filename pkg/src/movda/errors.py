"""Exception types raised by the rating engine."""


class MovdaError(Exception):
    """Base class for all engine errors."""


class InvalidArgumentError(MovdaError, ValueError):
    pass


class DataIntegrityError(MovdaError, ValueError):
    """A game record contradicts itself (e.g. margin sign vs outcome)."""

    def __init__(self, message, game_id=None, row=None):
        self.game_id = game_id
        self.row = row
        where = []
        if game_id is not None:
            where.append(f"game {game_id!r}")
        if row is not None:
            where.append(f"row {row}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)


class SchemaError(MovdaError, ValueError):
    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)


class InsufficientDataError(MovdaError, ValueError):
    pass


class UnidentifiableParameterError(MovdaError, ValueError):
    def __init__(self, parameter, message):
        self.parameter = parameter
        super().__init__(f"parameter {parameter!r} is not identifiable: {message}")


class OrderingError(MovdaError, ValueError):
    pass


class ConfigurationError(MovdaError, ValueError):
    pass


class UndefinedMetricError(MovdaError, ValueError):
    pass


class NumericalError(MovdaError, ArithmeticError):
    pass
