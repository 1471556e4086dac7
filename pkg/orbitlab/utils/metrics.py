"""
Per-stage timing for orbitlab experiments.

Timings are shown with --metrics and never written into reports, which
stay byte-identical between runs.
"""

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Dict, List, Optional


@dataclass
class RunMetrics:
    """Track wall time of each stage of an experiment."""

    start_time: float = field(default_factory=time.perf_counter)
    end_time: Optional[float] = None
    stages: List[str] = field(default_factory=list)
    durations: Dict[str, float] = field(default_factory=dict)
    counters: Dict[str, int] = field(default_factory=dict)

    @contextmanager
    def stage(self, name: str):
        """
        Time a block; repeated stages accumulate.

        Args:
            name: Stage label shown in the summary
        """
        t0 = time.perf_counter()
        try:
            yield
        finally:
            if name not in self.durations:
                self.stages.append(name)
                self.durations[name] = 0.0
            self.durations[name] += time.perf_counter() - t0

    def count(self, name: str, amount: int = 1):
        self.counters[name] = self.counters.get(name, 0) + amount

    def finalize(self):
        """Mark the run as complete and record end time."""
        self.end_time = time.perf_counter()

    def get_duration(self) -> float:
        end = self.end_time if self.end_time else time.perf_counter()
        return end - self.start_time

    def get_summary(self) -> Dict:
        """
        Get a summary of all metrics.

        Returns:
            Dictionary with total duration, per-stage durations and counters
        """
        return {
            'duration': round(self.get_duration(), 3),
            'stages': {name: round(self.durations[name], 3) for name in self.stages},
            'counters': dict(sorted(self.counters.items())),
        }

    def print_summary(self, use_color: bool = True):
        """
        Print a formatted summary of metrics.

        Args:
            use_color: Whether to use colored output
        """
        from rich.table import Table

        from orbitlab.utils.console import console

        summary = self.get_summary()
        total = summary['duration'] or 1.0

        if use_color:
            table = Table(show_header=True, header_style="bold cyan", border_style="cyan")
            table.add_column("Stage", style="white", width=25)
            table.add_column("Time", justify="right", style="green")
            table.add_column("Share", justify="right", style="dim")
            for name, secs in summary['stages'].items():
                table.add_row(name, f"{secs:.3f}s", f"{100 * secs / total:.1f}%")
            table.add_row("[bold]Total[/bold]", f"[bold]{summary['duration']:.3f}s[/bold]", "")
            for name, value in summary['counters'].items():
                table.add_row(f"[dim]{name}[/dim]", f"{value:,}", "")
            console.print()
            console.print("Performance Metrics:")
            console.print(table)
        else:
            lines = ["", "=" * 60, "Performance Metrics".center(60), "=" * 60]
            lines += [f"{name:<25}{secs:>10.3f}s" for name, secs in summary['stages'].items()]
            lines.append(f"{'Total':<25}{summary['duration']:>10.3f}s")
            lines += [f"{name:<25}{value:>10,}" for name, value in summary['counters'].items()]
            lines.append("=" * 60)
            # stdout may carry the report
            console.print("\n".join(lines), markup=False, highlight=False)
