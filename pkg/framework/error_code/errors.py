from enum import IntEnum
from typing import Optional, Dict, Any

class ErrorCode(IntEnum):
    """Hierarchical error code system"""

    # System errors (99000-99999)
    UNKNOWN_ERROR = 99999
    CONFIGURATION_ERROR = 99997

    # Infrastructure errors (90000-98999)
    FILE_SYSTEM_ERROR = 93000

    # Input errors (40000-49999)
    VALIDATION_ERROR = 40000
    PARSE_ERROR = 40100
    STRUCTURE_ERROR = 40200

    # Inference errors (50000-59999)
    GENERATION_ERROR = 50100
    PLACEMENT_ERROR = 50200
    INFEASIBILITY_ERROR = 50300
    REFUSAL_ERROR = 50400

class DetailedError(Exception):
    """Structured error with detailed information"""

    def __init__(
        self,
        code: ErrorCode,
        user_message: str,
        developer_message: Optional[str] = None,
        internal_message: Optional[str] = None,
        context: Optional[Dict[str, Any]] = None,
        cause: Optional[Exception] = None
    ):
        self.code = code
        self.user_message = user_message
        self.developer_message = developer_message or user_message
        self.internal_message = internal_message or developer_message or user_message
        self.context = context or {}
        self.cause = cause
        super().__init__(self.user_message)

    @property
    def message(self) -> str:
        return self.user_message

    def is_usage_error(self) -> bool:
        """Errors caused by how the tool was invoked (CLI exit code 1)"""
        return self.code in [
            ErrorCode.VALIDATION_ERROR,
            ErrorCode.CONFIGURATION_ERROR
        ]

    @classmethod
    def wrap(cls, error: Exception, code: ErrorCode = ErrorCode.UNKNOWN_ERROR) -> "DetailedError":
        """``error`` itself when already detailed, else a ``code`` error caused by it"""
        if isinstance(error, DetailedError):
            return error
        return cls(
            code,
            f"unexpected error: {error}",
            developer_message=f"{type(error).__name__}: {error}",
            context={'type': type(error).__name__},
            cause=error
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": True,
            "code": int(self.code),
            "message": self.user_message,
            "context": self.context
        }


def argument_error(message: str, **context: Any) -> DetailedError:
    return DetailedError(ErrorCode.VALIDATION_ERROR, message, context=context)


def structure_error(message: str, **context: Any) -> DetailedError:
    return DetailedError(ErrorCode.STRUCTURE_ERROR, message, context=context)
