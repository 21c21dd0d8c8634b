"""Command decorator for mini-Typer pattern."""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from functools import wraps
from typing import Any

from .errors import BioqaError
from .models import Context, Output

LOG = logging.getLogger(__name__)

# Global registry of commands
COMMANDS: dict[str, dict[str, Any]] = {}


@dataclass(frozen=True)
class Arg:
    """One argparse argument: positional flags plus add_argument keywords."""

    flags: tuple[str, ...]
    options: dict[str, Any] = field(default_factory=dict)


def arg(*flags: str, **options: Any) -> Arg:
    return Arg(flags, options)


def command(name: str, help_text: str, arguments: tuple[Arg, ...] = ()):
    """
    Decorator for CLI commands that handles errors and registration.

    Args:
        name: Command name for CLI
        help_text: Help text to display
        arguments: Subcommand arguments, added to its subparser by ``__main__``
    """

    def decorator(func: Callable[..., Output]) -> Callable[..., Output]:
        @wraps(func)
        def wrapper(ctx: Context, *args, **kwargs) -> Output:
            try:
                return func(ctx, *args, **kwargs)
            except BioqaError as e:
                LOG.debug("Command '%s' failed", name, exc_info=True)
                return Output(
                    success=False,
                    message=e.message,
                    data={"error": e.to_dict()},
                    details=[{"type": "text", "content": f"Error type: {type(e).__name__}"}],
                    exit_code=e.exit_code,
                )
            except Exception as e:
                LOG.debug("Command '%s' crashed", name, exc_info=True)
                return Output(
                    success=False,
                    message=f"Command '{name}' failed: {e}",
                    data={"error": {"type": type(e).__name__, "message": str(e), "exit_code": 1}},
                    details=[{"type": "text", "content": f"Error type: {type(e).__name__}"}],
                )

        # Store wrapper which includes all decorators applied to func
        COMMANDS[name] = {
            "func": wrapper,
            "help": help_text,
            "arguments": arguments,
        }
        return wrapper

    return decorator
