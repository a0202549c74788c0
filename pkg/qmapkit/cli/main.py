import argparse
import sys

from loguru import logger

from .. import LOG_FORMAT, __version__
from ..errors import (
    NotClosed,
    NotPrestable,
    PoleSurvived,
    QmapkitError,
    TooLarge,
    UnboundedEnumeration,
)
from .fixed_loci import FixedLociCommand
from .ifunction import IFunctionCommand
from .quasimap import QuasimapCommand
from .stability import StabilityCommand


EXIT_CODES = {
    NotPrestable: 2,
    TooLarge: 3,
    UnboundedEnumeration: 3,
    PoleSurvived: 4,
    NotClosed: 4,
}


def exit_code_for(error: Exception) -> int:
    for cls in type(error).__mro__:
        if cls in EXIT_CODES:
            return EXIT_CODES[cls]
    return 2


def main(argv=None):
    parser = argparse.ArgumentParser(
        "qmapkit CLI",
        usage="qmapkit <command> [<args>]",
        epilog="For more information about a command, run: `qmapkit <command> --help`",
    )
    parser.add_argument("--version", "-v", help="Display qmapkit version", action="store_true")
    parser.add_argument("--verbose", help="Log debug messages", action="store_true")
    commands_parser = parser.add_subparsers(help="commands")

    # Register commands
    StabilityCommand.register_subcommand(commands_parser)
    QuasimapCommand.register_subcommand(commands_parser)
    FixedLociCommand.register_subcommand(commands_parser)
    IFunctionCommand.register_subcommand(commands_parser)

    args = parser.parse_args(argv)

    if args.version:
        print(__version__)
        return 0

    if not hasattr(args, "func"):
        parser.print_help()
        return 2

    if args.verbose:
        logger.configure(handlers=[dict(sink=sys.stderr, format=LOG_FORMAT, level="DEBUG")])

    command = args.func(args)
    try:
        return command.run()
    except QmapkitError as e:
        logger.error(str(e))
        return exit_code_for(e)
    except OSError as e:
        logger.error(f"Cannot read input: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
