"""
Unified Exception Handling for the subgroup OFDM simulator.
"""

from typing import Any, Dict, Optional
from fastapi import HTTPException
from loguru import logger


class SimulationException(Exception):
    """Base exception for the simulator."""

    def __init__(
        self,
        message: str,
        code: str = "SIMULATION_ERROR",
        details: Optional[Dict[str, Any]] = None,
    ):
        self.message = message
        self.code = code
        self.details = details or {}
        super().__init__(self.message)


class InvalidGeneratorError(SimulationException, ValueError):
    """Raised when a subgroup generator d does not divide n."""

    def __init__(self, n: int, d: int, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            f"Invalid generator: d={d} does not divide n={n}",
            "INVALID_GENERATOR",
            details,
        )
        self.n = n
        self.d = d


class SignalShapeError(SimulationException, ValueError):
    """Raised when a block, tap vector or prefix has an incompatible length."""

    def __init__(
        self,
        message: str,
        expected: Optional[int] = None,
        actual: Optional[int] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message, "SIGNAL_SHAPE_ERROR", details)
        self.expected = expected
        self.actual = actual


class DegenerateSignalError(SimulationException, ValueError):
    """Raised when a ratio is requested on a zero-energy vector."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, "DEGENERATE_SIGNAL", details)


class ChannelModelError(SimulationException, ValueError):
    """Raised for inadmissible power delay profiles."""

    def __init__(
        self, message: str, model: str = "", details: Optional[Dict[str, Any]] = None
    ):
        super().__init__(message, "CHANNEL_MODEL_ERROR", details)
        self.model = model


class EstimationError(SimulationException, ValueError):
    """Raised when a channel estimator cannot produce an estimate."""

    def __init__(
        self, message: str, method: str = "", details: Optional[Dict[str, Any]] = None
    ):
        super().__init__(message, "ESTIMATION_ERROR", details)
        self.method = method


class ConfigurationError(SimulationException, ValueError):
    """Exception raised for configuration issues."""

    def __init__(
        self,
        message: str,
        config_key: str = "",
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message, "CONFIGURATION_ERROR", details)
        self.config_key = config_key


class ResultsFormatError(SimulationException, ValueError):
    """Raised when a results CSV is malformed."""

    def __init__(
        self, message: str, column: str = "", details: Optional[Dict[str, Any]] = None
    ):
        super().__init__(message, "RESULTS_FORMAT_ERROR", details)
        self.column = column


class SweepCellError(SimulationException):
    """Raised when one (channel, d, snr) cell of a sweep fails."""

    def __init__(
        self,
        message: str,
        cell: Optional[Dict[str, Any]] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message, "SWEEP_CELL_ERROR", details)
        self.cell = cell or {}


class ErrorHandler:
    """Centralized error handler for the simulator."""

    @staticmethod
    def log_error(error: Exception, context: str = "") -> None:
        """Log error with context."""
        if isinstance(error, SimulationException):
            logger.error(f"[{error.code}] {context}: {error.message}")
            if error.details:
                logger.error(f"Error details: {error.details}")
        else:
            logger.error(f"{context}: {str(error)}")

    @staticmethod
    def to_exit_code(error: Exception) -> int:
        """Map an error to the CLI exit-code convention (2 = usage, 1 = failure)."""
        if isinstance(error, (ConfigurationError, InvalidGeneratorError)):
            return 2
        return 1

    @staticmethod
    def to_http_exception(error: Exception) -> HTTPException:
        """Convert simulator exception to HTTP exception."""
        if isinstance(error, (ConfigurationError, InvalidGeneratorError)):
            return HTTPException(
                status_code=400,
                detail={
                    "error": error.code,
                    "message": error.message,
                    "details": error.details,
                },
            )
        elif isinstance(error, (ChannelModelError, SignalShapeError)):
            return HTTPException(
                status_code=422,
                detail={"error": error.code, "message": error.message},
            )
        elif isinstance(error, SweepCellError):
            return HTTPException(
                status_code=500,
                detail={
                    "error": error.code,
                    "message": error.message,
                    "cell": error.cell,
                },
            )
        elif isinstance(error, SimulationException):
            return HTTPException(
                status_code=500,
                detail={"error": error.code, "message": error.message},
            )
        else:
            return HTTPException(
                status_code=500,
                detail={
                    "error": "INTERNAL_ERROR",
                    "message": str(error),
                },
            )

    @staticmethod
    def handle_and_raise_http(error: Exception, context: str = "") -> None:
        """Log error and raise as HTTP exception."""
        ErrorHandler.log_error(error, context)
        raise ErrorHandler.to_http_exception(error)


# Convenience functions
def handle_error_and_raise(error: Exception, context: str = "") -> None:
    """Log error and re-raise as HTTP exception."""
    ErrorHandler.handle_and_raise_http(error, context)
