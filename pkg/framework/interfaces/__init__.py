from .core import ConfigProvider, LogProvider, ErrorProvider, CoreService

__all__ = [
    'ConfigProvider',
    'LogProvider',
    'ErrorProvider',
    'CoreService'
]
