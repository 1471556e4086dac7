"""
Command-line interface for orbitlab experiments.
"""

import argparse
import os
import sys
import traceback

from orbitlab.app_settings import VERSION
from orbitlab.core.config import COMMANDS
from orbitlab.core.result import ExperimentReport
from orbitlab.core.runner import ExperimentRunner
from orbitlab.errors import OrbitlabError
from orbitlab.utils.console import console, print_banner, print_info_panel
from orbitlab.utils.file_utils import export_report, load_manifest, render_report
from orbitlab.utils.logger import logger, setup_logger
from orbitlab.utils.metrics import RunMetrics
from orbitlab.utils.report import print_report_summary
from orbitlab.utils.validators import validate_file_path, validate_precision


class _HelpFormatter(argparse.RawDescriptionHelpFormatter,
                     argparse.ArgumentDefaultsHelpFormatter):
    """Preserves epilog newlines AND shows (default: X) for each argument."""
    pass


class ArgumentParserWithBanner(argparse.ArgumentParser):
    """ArgumentParser that shows the banner before help"""

    def __init__(self, *args, **kwargs):
        self.silent_mode = kwargs.pop('silent_mode', False)
        super().__init__(*args, **kwargs)

    def print_help(self, file=None):
        if not self.silent_mode:
            print_banner(True, False)
        super().print_help(file)

    def error(self, message):
        if not self.silent_mode:
            print_banner(True, False)
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _commands_epilog() -> str:
    width = max(len(c) for c in COMMANDS)
    lines = [f"  {name:<{width}}  {spec['description']}" for name, spec in COMMANDS.items()]
    return (
        "Commands (manifest 'command' key):\n" + "\n".join(lines) + "\n\n"
        "Examples:\n"
        "  orbitlab --manifest experiments/classify.toml\n"
        "  orbitlab --manifest experiments/dml.toml --out reports/dml.json --pretty\n"
        "  ORBITLAB_PRECISION=60 orbitlab --manifest experiments/attractor.toml --metrics\n"
    )


def parse_arguments(argv=None):
    """Parse command line arguments."""
    argv = sys.argv[1:] if argv is None else argv
    silent_mode = '-s' in argv or '--silent' in argv

    parser = ArgumentParserWithBanner(
        prog="orbitlab",
        description="orbitlab - exact and p-adic experiments in arithmetic dynamics",
        epilog=_commands_epilog(),
        formatter_class=_HelpFormatter,
        silent_mode=silent_mode,
    )

    parser.add_argument("-m", "--manifest", required=True, metavar="PATH",
                        help="TOML experiment manifest")
    parser.add_argument("-o", "--out", metavar="PATH",
                        help="Report file (JSON); overrides the manifest 'output'. Without either, "
                             "the report goes to stdout")
    parser.add_argument("--precision", type=int, metavar="M",
                        help="p-adic precision M; overrides the manifest and ORBITLAB_PRECISION")
    parser.add_argument("--seed", type=int, help="Seed for any randomized sampling")

    fmt = parser.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="pretty", action="store_false", help="Compact JSON report")
    fmt.add_argument("--pretty", dest="pretty", action="store_true", help="Indented JSON report")
    parser.set_defaults(pretty=True)

    parser.add_argument("-nc", "--no-color", action="store_true", help="Disable colors in output")
    parser.add_argument("-v", "--verbose", action="store_true", help="Verbose mode (debug logging)")
    parser.add_argument("-s", "--silent", action="store_true", help="Silent mode (show only errors)")
    parser.add_argument("--log-file", metavar="PATH", help="Also log to a rotating file")
    parser.add_argument("--metrics", action="store_true", help="Show per-stage timings at the end")
    parser.add_argument("--version", action="version", version=f"orbitlab v{VERSION}")

    return parser.parse_args(argv)


def _check_args(args):
    """Reject inconsistent flags before anything runs."""
    if args.verbose and args.silent:
        raise ValueError("Cannot use --verbose and --silent simultaneously")

    is_valid, error_msg = validate_file_path(args.manifest)
    if not is_valid:
        raise ValueError(f"Invalid manifest path: {error_msg}")

    if args.precision is not None:
        is_valid, error_msg = validate_precision(args.precision)
        if not is_valid:
            raise ValueError(f"Invalid precision: {error_msg}")


def _emit(report: ExperimentReport, out_path, pretty: bool) -> bool:
    if out_path:
        return export_report(report, out_path, pretty)
    sys.stdout.write(render_report(report, pretty))
    sys.stdout.flush()
    return True


def main(argv=None):
    """
    Main function for the command-line interface.

    Exit codes: 0 success, 2 precondition violation, 64 unknown command,
    65 malformed manifest or map spec, 130 interrupted.
    """
    args = None
    try:
        args = parse_arguments(argv)
        _check_args(args)
        use_color = not (args.no_color or os.environ.get("NO_COLOR"))
        setup_logger(verbose=args.verbose, silent=args.silent, log_file=args.log_file,
                     use_color=use_color)

        metrics = RunMetrics()
        try:
            with metrics.stage("load manifest"):
                manifest = load_manifest(args.manifest)
        except OrbitlabError as e:
            logger.error(str(e))
            report = ExperimentReport.failure("", e)
            _emit(report, args.out, args.pretty)
            sys.exit(report.exit_code())

        base_dir = os.path.dirname(os.path.abspath(args.manifest))
        out_path = args.out
        if not out_path and manifest.get("output"):
            # relative to the manifest, like map_spec
            out_path = os.path.join(base_dir, str(manifest["output"]))
        show_summary = bool(out_path) and not args.silent
        if show_summary:
            print_banner(use_color, False)
            print_info_panel(f"{manifest.get('command', '?')}  ->  {out_path}", use_color)

        runner = ExperimentRunner(precision=args.precision, seed=args.seed, metrics=metrics)
        report = runner.run_manifest(manifest, base_dir)

        with metrics.stage("write report"):
            written = _emit(report, out_path, args.pretty)
        if not written:
            sys.exit(2)

        if show_summary:
            print_report_summary(report, console, use_color, args.verbose)

        if args.metrics:
            metrics.finalize()
            metrics.print_summary(use_color=use_color)

        sys.exit(report.exit_code())

    except KeyboardInterrupt:
        if not getattr(args, 'silent', False):
            console.print("\n[bold red]Interrupted by user.[/bold red]")
        sys.exit(130)
    except ValueError as e:
        logger.error(str(e))
        sys.exit(2)
    except Exception as e:
        logger.error(f"Unexpected error: {str(e)}")
        if getattr(args, 'verbose', False):
            traceback.print_exc()
        sys.exit(2)


if __name__ == "__main__":
    main()
