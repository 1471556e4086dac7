"""
Report summaries for orbitlab experiments.
"""

import json

from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from orbitlab.core.result import ExperimentReport
from orbitlab.utils.logger import logger

# Result keys worth a row of their own, per command
HEADLINE_KEYS = {
    "classify": ("type", "subtype", "pcf", "confidence", "degree"),
    "fixed-points": ("count",),
    "orbit-closure": ("verdict", "verified", "partial", "samples"),
    "dml": ("hits", "progressions", "confidence", "n_max", "prime", "period"),
    "polydisk": ("r", "swapped", "reduction"),
    "attractor": ("contraction",),
    "adelic": ("member", "groups", "witnesses"),
    "independence": ("independence", "diophantine"),
    "good-fixed-point": ("r_property",),
    "invariant-curves": ("degree", "branch_bound"),
    "split-structure": ("verdict", "pair", "curve"),
    "preimage-chain": ("ratios_divide", "truncated"),
}

_MAX_CELL = 70


def _cell(value) -> str:
    text = value if isinstance(value, str) else json.dumps(value, sort_keys=True)
    return text if len(text) <= _MAX_CELL else text[:_MAX_CELL - 1] + "…"


def _status_style(report: ExperimentReport) -> str:
    if not report.ok:
        return "red"
    confidence = (report.result or {}).get("confidence")
    return "yellow" if confidence == "evidence" else "green"


def print_report_summary(report: ExperimentReport, console: Console, use_color: bool = True,
                         verbose: bool = False):
    """
    Print a summary table for an experiment report.

    Args:
        report: The experiment report
        console: Rich console object for output
        use_color: Whether to use color in output
        verbose: Show every top-level result key, not only the headline ones
    """
    style = _status_style(report) if use_color else ""

    if not report.ok:
        text = f"{report.error.get('kind')}: {report.error.get('message')}"
        if use_color:
            console.print(Panel(text, title=f"{report.command or 'manifest'} failed",
                                border_style=style, expand=False))
        else:
            console.print(f"{report.command or 'manifest'} failed - {text}", markup=False)
        return

    result = report.result or {}
    keys = list(result) if verbose else [k for k in HEADLINE_KEYS.get(report.command, ()) if k in result]
    if verbose:
        logger.debug(f"{report.command}: {len(result)} result keys")

    table = Table(box=box.ROUNDED)
    table.add_column("Field", style="cyan" if use_color else "", no_wrap=True)
    table.add_column("Value", style="magenta" if use_color else "")

    for key in keys:
        table.add_row(key, _cell(result[key]))

    if report.provenance is not None:
        prov = report.provenance
        table.add_row("precision", str(prov.precision), style="dim" if use_color else "")
        table.add_row("seed", str(prov.seed), style="dim" if use_color else "")

    title = f"[{style}]{report.command}[/{style}]" if use_color else report.command
    console.print(f"Results Summary: {title}")
    console.print(table)
