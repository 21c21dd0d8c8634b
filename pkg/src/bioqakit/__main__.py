"""Entry point for bioqakit CLI."""

import argparse
import logging
import sys
from dataclasses import fields
from pathlib import Path

from . import __version__
from .cli import CLI
from .config import PipelineConfig
from .decorators import COMMANDS
from .errors import BioqaError
from .models import Context, Output

# Import commands to register them
from . import commands  # noqa: F401

CONFIG_FIELDS = frozenset(f.name for f in fields(PipelineConfig))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bioqakit",
        description="Convert, audit and score BioASQ questions as SQuAD-style QA data",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", type=Path, help="TOML config file (default: [tool.bioqakit])")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="More logging (-vv for debug)"
    )

    subparsers = parser.add_subparsers(dest="command", help="Available commands")
    for cmd_name, cmd_info in COMMANDS.items():
        subparser = subparsers.add_parser(cmd_name, help=cmd_info["help"])
        for argument in cmd_info["arguments"]:
            subparser.add_argument(*argument.flags, **argument.options)
    return parser


def main(argv: list[str] | None = None) -> int:
    """Main CLI entry point; returns the process exit code."""
    cli = CLI()
    parser = build_parser()
    args = parser.parse_args(argv)

    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")

    # Show help if no command provided
    if not args.command:
        parser.print_help()
        return 0

    # Flags named after config fields layer over the file config; the rest go to the command
    options = {k: v for k, v in vars(args).items() if k not in ("command", "config", "verbose")}
    overrides = {k: v for k, v in options.items() if k in CONFIG_FIELDS}
    kwargs = {k: v for k, v in options.items() if k not in CONFIG_FIELDS}

    try:
        ctx = Context.from_path(config_file=args.config).with_overrides(**overrides)
    except BioqaError as e:
        return cli.display(
            Output(
                success=False,
                message=f"Failed to load configuration: {e.message}",
                data={"error": e.to_dict()},
                exit_code=e.exit_code,
            )
        )

    return cli.display(COMMANDS[args.command]["func"](ctx, **kwargs))


if __name__ == "__main__":
    sys.exit(main())
