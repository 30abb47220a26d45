from injector import Injector, Module, provider, singleton

from application.cli.handlers import CliHandlers
from framework.interfaces.core import CoreService
from infrastructure.config.settings import EnvironmentConfig


class CoreModule(Module):
    """Binds the environment-backed CoreService used for config and logging"""

    @singleton
    @provider
    def provide_core_service(self) -> CoreService:
        config = EnvironmentConfig()
        config.validate()
        return config


def build_injector(*modules: Module) -> Injector:
    return Injector([CoreModule(), *modules])


def resolve_handlers(injector: Injector) -> CliHandlers:
    return injector.get(CliHandlers)
