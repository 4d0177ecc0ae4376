"""
User interface components for spectrafrac
"""

from contextlib import contextmanager
from typing import Any, Dict, List, Mapping, Sequence

from rich.console import Console
from rich.panel import Panel
from rich.table import Table


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


class SpectraUI:
    def __init__(self, use_colors: bool = True, stderr: bool = False):
        self.console = Console(no_color=not use_colors, stderr=stderr)

    def info(self, message: str):
        self.console.print(f"[info] {message}", style="blue", markup=False)

    def success(self, message: str):
        self.console.print(f"[ok] {message}", style="green", markup=False)

    def error(self, message: str):
        self.console.print(f"[error] {message}", style="red", markup=False)

    def warning(self, message: str):
        self.console.print(f"[warn] {message}", style="yellow", markup=False)

    @contextmanager
    def status(self, message: str):
        with self.console.status(message, spinner="dots"):
            yield

    def show_report(self, title: str, report: Mapping[str, Any]):
        table = Table(title=title, show_header=False)
        table.add_column("Field", style="cyan")
        table.add_column("Value", style="green")
        for key, value in report.items():
            table.add_row(str(key), _fmt(value))
        self.console.print(table)

    def show_table(self, title: str, columns: Sequence[str], rows: Sequence[Sequence[Any]]):
        table = Table(title=title)
        for column in columns:
            table.add_column(column, style="cyan" if column == columns[0] else None)
        for row in rows:
            table.add_row(*[_fmt(v) for v in row])
        self.console.print(table)

    def show_checks(self, checks: List[Dict[str, Any]]):
        table = Table(title="Acceptance checks")
        table.add_column("Check", style="cyan")
        table.add_column("Status")
        table.add_column("Time (s)", justify="right")
        table.add_column("Detail", style="yellow")
        for check in checks:
            status = "[green]pass[/green]" if check.get("passed") else "[red]FAIL[/red]"
            if check.get("skipped"):
                status = "[dim]skipped[/dim]"
            table.add_row(check.get("name", ""), status, f"{check.get('elapsed', 0.0):.2f}", check.get("detail", ""))
        self.console.print(table)

    def show_history(self, entries: List[Dict[str, Any]]):
        table = Table(title="Run History")
        table.add_column("Date", style="cyan")
        table.add_column("Command", style="yellow")
        table.add_column("Arguments", style="green")
        table.add_column("Time (s)", justify="right")
        table.add_column("Status", style="magenta")
        for entry in entries:
            table.add_row(
                entry.get("timestamp", "Unknown"),
                entry.get("command", ""),
                entry.get("arguments", ""),
                f"{entry.get('execution_time', 0.0):.2f}",
                "ok" if entry.get("success", False) else "failed",
            )
        self.console.print(table)

    def show_outputs(self, paths: Sequence[str]):
        self.console.print(Panel("\n".join(paths), title="Outputs", border_style="blue"))
