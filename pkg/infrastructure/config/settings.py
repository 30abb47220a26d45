import os
from typing import Optional, Dict, Any
from dotenv import load_dotenv
from framework.interfaces.core import CoreService
from framework.error_code.errors import DetailedError, ErrorCode
from infrastructure.logging.structured import configure_logging, get_logger

load_dotenv()

class EnvironmentConfig(CoreService):

    def __init__(self, configure: bool = True):
        self._cache: Dict[str, Any] = {}
        self._load_config()
        if configure:
            configure_logging(self._cache['LOG_LEVEL'], self._cache['LOG_FORMAT'])
        self._logger = get_logger("sourceinf")

    def _load_config(self):
        try:
            self._cache = self._read_environment()
        except ValueError as e:
            raise DetailedError(
                ErrorCode.CONFIGURATION_ERROR,
                f"malformed numeric setting: {e}",
                cause=e
            )

    @staticmethod
    def _read_environment() -> Dict[str, Any]:
        return {
            'LOG_LEVEL': os.getenv('LOG_LEVEL', 'WARNING'),
            'LOG_FORMAT': os.getenv('LOG_FORMAT', 'console'),
            'DEFAULT_DELTA': float(os.getenv('DEFAULT_DELTA', '1.0')),
            'DEFAULT_K_MAX': int(os.getenv('DEFAULT_K_MAX', '3')),
            'DEFAULT_TAU': int(os.getenv('DEFAULT_TAU', '2')),
            'IP_MAX_ITER': int(os.getenv('IP_MAX_ITER', '20')),
            'IP_ETA_CONVERGE': int(os.getenv('IP_ETA_CONVERGE', '0')),
            'PLACEMENT_MAX_ATTEMPTS': int(os.getenv('PLACEMENT_MAX_ATTEMPTS', '1000')),
            'BENCHMARK_JOBS': int(os.getenv('BENCHMARK_JOBS', '1')),
        }

    def get_config(self, key: str) -> Optional[Any]:
        return self._cache.get(key)

    def set_config(self, key: str, value: Any) -> None:
        self._cache[key] = value

    def get_all_config(self) -> Dict[str, Any]:
        return self._cache.copy()

    def validate(self) -> None:
        checks = [
            ('DEFAULT_DELTA', lambda v: v > 0, "must be positive"),
            ('DEFAULT_K_MAX', lambda v: v >= 1, "must be at least 1"),
            ('DEFAULT_TAU', lambda v: v >= 2, "must be at least 2"),
            ('IP_MAX_ITER', lambda v: v >= 1, "must be at least 1"),
            ('IP_ETA_CONVERGE', lambda v: v >= 0, "must be nonnegative"),
            ('BENCHMARK_JOBS', lambda v: v >= 1, "must be at least 1"),
            ('LOG_FORMAT', lambda v: v in ('console', 'json'), "must be 'console' or 'json'"),
        ]
        for key, ok, reason in checks:
            value = self.get_config(key)
            if value is None or not ok(value):
                raise DetailedError(
                    ErrorCode.CONFIGURATION_ERROR,
                    f"{key} {reason}",
                    context={'key': key, 'value': value}
                )

    # LogProvider implementation
    def info(self, message: str, **kwargs) -> None:
        self._logger.info(message, **kwargs)

    def error(self, message: str, error: Optional[Exception] = None, **kwargs) -> None:
        if error is not None:
            kwargs['error'] = str(error)
            kwargs['error_type'] = type(error).__name__
        self._logger.error(message, **kwargs)

    def debug(self, message: str, **kwargs) -> None:
        self._logger.debug(message, **kwargs)

    def warning(self, message: str, **kwargs) -> None:
        self._logger.warning(message, **kwargs)

    # ErrorProvider implementation
    def wrap_error(self, code: int, error: Exception) -> Dict[str, Any]:
        return DetailedError.wrap(error, ErrorCode(code)).to_dict()
