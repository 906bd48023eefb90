import logging
import os
from pathlib import Path
from typing import List, Optional

from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.table import Table

from src.errors import CaPeriodsError
from src.models import CheckResult


def setup_logging(level: Optional[str] = None, console: Optional[Console] = None) -> None:
    """Route library logging through rich on stderr. Level defaults to CA_PERIODS_LOG_LEVEL or WARNING."""
    level = (level or os.getenv("CA_PERIODS_LOG_LEVEL", "WARNING")).upper()
    handler = RichHandler(console=console or Console(stderr=True), show_path=False, rich_tracebacks=False)
    logging.basicConfig(level=level, format="%(message)s", datefmt="[%X]", handlers=[handler], force=True)


class ConsoleView:
    """Human-facing messages. Machine output (JSON, CSV, integers) bypasses this and goes to stdout verbatim."""

    def __init__(self, console: Optional[Console] = None):
        self.console = console or Console(stderr=True)

    def display_failure(self, error: CaPeriodsError):
        self.console.print(f"[red]{type(error).__name__}[/red] [dim](exit {error.exit_code})[/dim]: {escape(str(error))}")

    def display_written(self, path: Path):
        self.console.print(f"[green]✓[/green] wrote [cyan]{path}[/cyan]")

    def display_construction(self, kind: str, n: int, rule_path: Path, sidecar: Path, bound: int):
        self.console.print(
            f"[green]✓[/green] {kind} rule on n={n} states written to [cyan]{rule_path}[/cyan], "
            f"encoding in [cyan]{sidecar}[/cyan]"
        )
        self.console.print(f"guaranteed X >= {bound}", style="dim")

    def show_status(self, message: str, spinner: str = "dots"):
        return self.console.status(message, spinner=spinner)

    def display_checks(self, results: List[CheckResult]):
        table = Table(title="Verification", show_lines=False)
        table.add_column("check", style="cyan")
        table.add_column("result")
        table.add_column("detail", style="dim")
        for r in results:
            table.add_row(r.name, "[green]pass[/green]" if r.passed else "[red]FAIL[/red]", r.detail)
        self.console.print(table)

        failed = sum(not r.passed for r in results)
        if failed:
            self.console.print(f"\n[bold red]{failed} of {len(results)} checks failed.[/bold red]")
        else:
            self.console.print(f"\n[bold green]All {len(results)} checks passed.[/bold green]")

    def display_skipped(self, what: str, reason: str):
        self.console.print(f"[yellow]skipped {what}:[/yellow] {reason}")
