#!/usr/bin/env python3
import sys
from typing import List, Optional

from application.cli.container import build_injector, resolve_handlers
from application.cli.parser import build_parser
from framework.error_code.errors import DetailedError, ErrorCode
from framework.interfaces.core import CoreService

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


def _log_failure(failure: DetailedError, core_service: CoreService) -> None:
    record = core_service.wrap_error(ErrorCode.UNKNOWN_ERROR, failure)
    core_service.error("command_failed", code=record["code"], detail=record["message"], context=record["context"])


def run_cli(argv: Optional[List[str]] = None) -> int:
    """Parse ``argv`` and run one subcommand; returns the process exit code"""
    parser = build_parser()
    core_service: Optional[CoreService] = None
    try:
        args = parser.parse_args(argv)
        handlers = resolve_handlers(build_injector())
        core_service = handlers.core_service
        return handlers.dispatch(args)

    except Exception as e:
        failure = DetailedError.wrap(e)
        print(f"❌ {failure.message}", file=sys.stderr)
        if failure.is_usage_error():
            help_text = failure.context.get('help')
            if help_text:
                print(help_text, file=sys.stderr, end="")
            return EXIT_USAGE
        if core_service is not None:
            _log_failure(failure, core_service)
        return EXIT_RUNTIME


if __name__ == "__main__":
    try:
        sys.exit(run_cli(sys.argv[1:]))
    except KeyboardInterrupt:
        print("\n🛑 Stopped by user", file=sys.stderr)
        sys.exit(EXIT_RUNTIME)
