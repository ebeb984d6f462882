"""Command-line front end.

Two subcommands:

* ``apply``   content + stylized image -> photorealistic output image
* ``analyze`` content + stylized + output -> gradient-histogram report

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass

import numpy as np

from .analysis import DEFAULT_BINS, analysis_report
from .gradient import GradientTerm
from .image import load_image, save_image
from .solver import Backend, SolverConfig, apply_photorealism

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERIC = 3


@dataclass
class CliConfig:
    command: str
    content_path: str
    stylized_path: str
    output_path: str
    style_path: str | None = None
    lambda_l: float = 5.0
    lambda_ab: float = 1.0
    solver: Backend = Backend.SPECTRAL
    gradient_term: GradientTerm = GradientTerm.ORIGINAL
    report_path: str | None = None
    bins: int = DEFAULT_BINS
    cg_tolerance: float = 1e-8
    cg_max_iterations: int = 10000

    def validate(self) -> None:
        if self.lambda_l < 0 or self.lambda_ab < 0:
            raise ValueError("lambda weights must be non-negative")
        if self.gradient_term is GradientTerm.HISTMATCH and not self.style_path:
            raise ValueError("--gradient-term histmatch requires --style")


class _Parser(argparse.ArgumentParser):
    """argparse's default usage-error exit code is 2; this tool reserves 2 for I/O."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="photograd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    apply_p = sub.add_parser("apply", help="post-process a stylized image into a photorealistic one")
    apply_p.add_argument("--content", required=True, help="original photograph (PNG or JPEG)")
    apply_p.add_argument("--stylized", required=True, help="stylized image to make photorealistic")
    apply_p.add_argument("--out", required=True, help="output PNG path")
    apply_p.add_argument("--style", help="style image, needed for --gradient-term histmatch")
    apply_p.add_argument("--lambda-l", type=float, default=5.0, dest="lambda_l",
                         help="gradient weight for the L channel (default 5)")
    apply_p.add_argument("--lambda-ab", type=float, default=1.0, dest="lambda_ab",
                         help="gradient weight for the a and b channels (default 1)")
    apply_p.add_argument("--solver", choices=[b.value for b in Backend], default="fft")
    apply_p.add_argument("--gradient-term", choices=[t.value for t in GradientTerm],
                         default="original", dest="gradient_term")
    apply_p.add_argument("--report", help="write the per-channel solve report as JSON here")

    analyze_p = sub.add_parser("analyze", help="compare gradient histograms of a content/stylized/output triple")
    analyze_p.add_argument("--content", required=True)
    analyze_p.add_argument("--stylized", required=True)
    analyze_p.add_argument("--out", required=True, help="the already-produced output image to analyze")
    analyze_p.add_argument("--bins", type=int, default=DEFAULT_BINS,
                           help="histogram bin count, odd (default 101)")
    analyze_p.add_argument("--report", help="JSON report path; a .csv twin is written next to it "
                                            "(default: <out>.analysis.json)")
    return parser


def parse_config(argv) -> CliConfig:
    args = build_parser().parse_args(argv)
    return CliConfig(
        command=args.command,
        content_path=args.content,
        stylized_path=args.stylized,
        output_path=args.out,
        style_path=getattr(args, "style", None),
        lambda_l=getattr(args, "lambda_l", 5.0),
        lambda_ab=getattr(args, "lambda_ab", 1.0),
        solver=Backend(getattr(args, "solver", "fft")),
        gradient_term=GradientTerm(getattr(args, "gradient_term", "original")),
        report_path=args.report,
        bins=getattr(args, "bins", DEFAULT_BINS),
    )


def run_apply(config: CliConfig) -> int:
    content = load_image(config.content_path)
    stylized = load_image(config.stylized_path)
    style = load_image(config.style_path) if config.style_path else None
    solver_config = SolverConfig(
        lambda_l=config.lambda_l,
        lambda_ab=config.lambda_ab,
        backend=config.solver,
        cg_tolerance=config.cg_tolerance,
        cg_max_iterations=config.cg_max_iterations,
        gradient_term=config.gradient_term,
        style=style,
    )
    start = time.perf_counter()
    output, reports = apply_photorealism(content, stylized, solver_config)
    wall = time.perf_counter() - start
    if not all(r.converged for r in reports):
        print("photograd: solver did not converge within the iteration budget", file=sys.stderr)
        return EXIT_NUMERIC
    save_image(output, config.output_path)
    payload = {"wall_time_seconds": wall}
    for name, report in zip("lab", reports):
        payload[f"residual_{name}"] = report.residual_norm
        payload[f"iterations_{name}"] = report.iterations
    if config.report_path:
        with open(config.report_path, "w") as fh:
            json.dump(payload, fh, indent=2)
    else:
        for name, report in zip("lab", reports):
            print(
                f"channel {name}: residual={report.residual_norm:.3e} "
                f"iterations={report.iterations} time={report.wall_time:.3f}s",
                file=sys.stderr,
            )
        print(f"total solve time: {wall:.3f}s", file=sys.stderr)
    return EXIT_OK


def run_analyze(config: CliConfig) -> int:
    content = load_image(config.content_path)
    stylized = load_image(config.stylized_path)
    produced = load_image(config.output_path)
    report = analysis_report(content, stylized, produced, bins=config.bins)
    print(f"kl_stylized_vs_content = {report.kl_stylized_vs_content:.6f}")
    print(f"kl_output_vs_content = {report.kl_output_vs_content:.6f}")
    json_path = config.report_path or f"{config.output_path}.analysis.json"
    csv_path = f"{json_path[:-5] if json_path.endswith('.json') else json_path}.csv"
    report.write_json(json_path)
    report.write_csv(csv_path)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        config = parse_config(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        config.validate()
        if config.command == "apply":
            return run_apply(config)
        return run_analyze(config)
    except OSError as exc:
        print(f"photograd: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"photograd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"photograd: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
