"""CLI display logic for bioqakit."""

import json
import sys

from .constants import (
    ARROW,
    CHECK_MARK,
    CROSS_MARK,
    INFO_MARK,
    WARNING_SIGN,
)
from .models import Output


class CLI:
    """Handles display of Output objects and CLI interaction."""

    def display(self, output: Output) -> int:
        """Display an Output object and return the process exit code.

        Failures also write the machine-readable error JSON to stderr as the
        last line, so scripts can parse it without scraping messages.
        """
        if output.message:
            if output.success:
                print(output.message)
            else:
                print(f"Error: {output.message}", file=sys.stderr)

        stream = sys.stdout if output.success else sys.stderr
        for detail in output.details or []:
            print(self._render(detail), file=stream)

        # Next steps section
        if output.next_steps:
            print(file=stream)
            for step in output.next_steps:
                print(f"  {ARROW} {step}", file=stream)

        if output.success:
            return 0
        error = (output.data or {}).get("error")
        if error is None:
            error = {"type": "Failure", "message": output.message, "exit_code": output.exit_code}
        print(json.dumps(error, ensure_ascii=False, sort_keys=True), file=sys.stderr)
        return output.exit_code

    def _render(self, detail: dict) -> str:
        detail_type = detail.get("type", "text")
        content = detail.get("content", "")

        if detail_type == "success":
            return f"  {CHECK_MARK} {content}"
        if detail_type == "error":
            return f"  {CROSS_MARK} {content}"
        if detail_type == "warning":
            return f"  {WARNING_SIGN} {content}"
        if detail_type == "info":
            return f"  {INFO_MARK} {content}"
        if detail_type == "check":
            # For checks, show pass/fail clearly but minimally
            status = CHECK_MARK if detail.get("success") else CROSS_MARK
            lines = [f"  {status} {detail.get('name', '')}: {detail.get('message', '')}"]
            lines += [f"    {sub}" for sub in detail.get("sub_details", [])]
            if detail.get("overflow", 0) > 0:
                lines.append(f"    ... and {detail['overflow']} more")
            return "\n".join(lines)
        if detail_type == "metric":
            return f"  {detail.get('name', '')}: {detail.get('value', 0.0):.4f}"
        if detail_type == "spacer":
            return ""
        return f"  {content or detail}"
