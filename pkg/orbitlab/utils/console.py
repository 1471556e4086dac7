"""
Console utilities for orbitlab. Handles pretty output and formatting.

Human-readable output goes to stderr so that stdout can carry a JSON report.
"""

from rich.console import Console
from rich.panel import Panel

from orbitlab.app_settings import VERSION

console = Console(stderr=True)


def print_banner(use_color=True, silent=False):
    """Print the one-line application banner."""
    if silent:
        return
    if use_color:
        console.print(f"[bold bright_white]orbitlab[/bold bright_white] [dim]v{VERSION}[/dim]  "
                      "[bold bright_green]exact and p-adic arithmetic dynamics[/bold bright_green]")
    else:
        console.print(f"orbitlab v{VERSION}  exact and p-adic arithmetic dynamics",
                      markup=False, highlight=False)


def print_info_panel(text: str, use_color: bool = True, title: str = "Experiment"):
    """Print an info panel with the given text."""
    if use_color:
        console.print(Panel(text, title=title, border_style="cyan", expand=False, padding=(0, 3)))
    else:
        console.print("=" * 50, markup=False)
        console.print(f" {text}", markup=False, highlight=False)
        console.print("=" * 50, markup=False)
