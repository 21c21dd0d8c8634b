"""Workflow builder for orchestrating multi-part validations."""

from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from typing import Any

from .models import Context, Output

Operation = Callable[..., Output]

SUB_DETAIL_LIMIT = 10


class Workflow:
    """Builder for validation workflows: sequential checks and parallel groups."""

    def __init__(self, name: str):
        self.name = name
        self.operations: list[tuple[str, Any]] = []

    def check(self, func: Operation) -> "Workflow":
        """Add a validation check that collects failures without stopping."""
        self.operations.append(("check", func))
        return self

    def parallel(self, *funcs: Operation) -> "Workflow":
        """Add parallel operations that run simultaneously."""
        self.operations.append(("parallel", funcs))
        return self

    def run(self, ctx: Context, **kwargs) -> Output:
        """Execute the workflow and return aggregated results.

        Each passing operation's ``data`` is collected under its function name.
        """
        check_failures: list[Output] = []
        details: list[dict[str, Any]] = []
        data: dict[str, Any] = {}

        def record(func: Operation, result: Output) -> None:
            lines = [d.get("content", "") for d in result.details or []]
            details.append(
                {
                    "type": "check",
                    "name": func.__name__,
                    "success": result.success,
                    "message": result.message,
                    "sub_details": lines[:SUB_DETAIL_LIMIT],
                    "overflow": max(0, len(lines) - SUB_DETAIL_LIMIT),
                }
            )
            if result.data:
                data[func.__name__] = result.data

        for op_type, operation in self.operations:
            if op_type == "check":
                result = operation(ctx, **kwargs)
                record(operation, result)
                if not result.success:
                    check_failures.append(result)

            elif op_type == "parallel":
                for func, result in zip(operation, self._run_parallel(ctx, operation, **kwargs)):
                    record(func, result)
                    if not result.success:
                        check_failures.append(result)

        if check_failures:
            return Output(
                success=False,
                message=f"{len(check_failures)} check(s) failed in '{self.name}'",
                data=data,
                details=details,
                exit_code=max(f.exit_code for f in check_failures),
            )

        return Output(
            success=True,
            message=f"Workflow '{self.name}' completed successfully",
            data=data,
            details=details,
        )

    def _run_parallel(self, ctx: Context, funcs: tuple, **kwargs) -> list[Output]:
        """Execute functions in parallel; results come back in submission order."""
        with ThreadPoolExecutor() as executor:
            futures = [executor.submit(func, ctx, **kwargs) for func in funcs]
            results = []
            for func, future in zip(funcs, futures):
                try:
                    results.append(future.result())
                except Exception as e:
                    results.append(
                        Output(success=False, message=f"Parallel task {func.__name__} failed: {e}")
                    )
        return results

