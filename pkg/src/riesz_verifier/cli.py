"""CLI entry point for the Riesz space verification suite."""
import asyncio
import logging
import sys
from pathlib import Path

import click
from dotenv import load_dotenv

from riesz_core.errors import ResourceCapError, RieszError, ScenarioError
from riesz_core.settings import Settings

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)

EXIT_INPUT_ERROR = 2
EXIT_CAP_EXCEEDED = 3


def _configure(env_file: str, debug: bool, **overrides) -> Settings:
    if debug:
        logging.getLogger().setLevel(logging.DEBUG)
    load_dotenv(env_file)
    try:
        return Settings.from_env().with_overrides(**overrides)
    except RieszError as e:
        click.secho(f"❌ Invalid settings: {e}", fg="red", err=True)
        sys.exit(EXIT_INPUT_ERROR)


def _emit(report, output_format: str, timings: bool) -> None:
    from riesz_verifier.report import render_structured, render_text

    render = render_structured if output_format == "structured" else render_text
    click.echo(render(report, timings=timings), nl=False)


def _run(scenario, settings: Settings, concurrent: bool):
    from riesz_verifier.suite import run_suite, run_suite_async

    if concurrent:
        return asyncio.run(run_suite_async(scenario, settings))
    return run_suite(scenario, settings)


format_option = click.option(
    "--format",
    "output_format",
    type=click.Choice(["text", "structured"], case_sensitive=False),
    default="text",
    show_default=True,
    help="Report format: 'text' for people, 'structured' (JSON) for tools",
)
env_file_option = click.option(
    "--env-file", default=".env", show_default=True, help="Path to .env file"
)
debug_option = click.option("--debug", is_flag=True, default=False, help="Enable debug logging")


@click.group()
def cli() -> None:
    """Riesz Verify: exact checks of conditional independence and Markov properties."""


@cli.command()
@click.argument("scenario_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--no-timings", is_flag=True, default=False, help="Leave timings out of the report")
@click.option("--cap-blocks", type=int, default=None, help="Max blocks per enumerated partition")
@click.option("--concurrent", is_flag=True, default=False, help="Run checks in worker threads")
@format_option
@env_file_option
@debug_option
def verify(
    scenario_file: Path,
    no_timings: bool,
    cap_blocks: int | None,
    concurrent: bool,
    output_format: str,
    env_file: str,
    debug: bool,
) -> None:
    """Run every check of a scenario file and print the report."""
    from riesz_verifier.scenario import load_scenario

    settings = _configure(env_file, debug, cap_blocks=cap_blocks)
    try:
        scenario = load_scenario(scenario_file.read_text(encoding="utf-8"))
    except ScenarioError as e:
        click.secho(f"❌ {scenario_file}: {e}", fg="red", err=True)
        sys.exit(EXIT_INPUT_ERROR)

    logger.info(f"Verifying {scenario.name} ({len(scenario.checks)} checks)")
    report = _run(scenario, settings, concurrent)
    _emit(report, output_format, not no_timings)
    sys.exit(report.exit_code)


@cli.group()
def demo() -> None:
    """Run a built-in scenario."""


@demo.command("two-coin")
@click.option("--no-timings", is_flag=True, default=False, help="Leave timings out of the report")
@format_option
@env_file_option
@debug_option
def two_coin(no_timings: bool, output_format: str, env_file: str, debug: bool) -> None:
    """Two fair coins: independence, Markov and martingale battery."""
    from riesz_verifier.scenario import load_bundled

    settings = _configure(env_file, debug)
    report = _run(load_bundled("two_coin"), settings, concurrent=False)
    _emit(report, output_format, not no_timings)
    sys.exit(report.exit_code)


@demo.command("random-walk")
@click.option("--steps", type=int, default=3, show_default=True, help="Number of +-1 steps")
@click.option("--no-timings", is_flag=True, default=False, help="Leave timings out of the report")
@format_option
@env_file_option
@debug_option
def random_walk(
    steps: int, no_timings: bool, output_format: str, env_file: str, debug: bool
) -> None:
    """Rademacher walk: Brownian axioms, Markov property and martingale checks."""
    from riesz_verifier.generator import walk_scenario

    settings = _configure(env_file, debug)
    try:
        scenario = walk_scenario(steps, settings.walk_cap)
    except ResourceCapError as e:
        click.secho(f"❌ {e}", fg="red", err=True)
        sys.exit(EXIT_CAP_EXCEEDED)
    except RieszError as e:
        click.secho(f"❌ {e}", fg="red", err=True)
        sys.exit(EXIT_INPUT_ERROR)
    report = _run(scenario, settings, concurrent=False)
    _emit(report, output_format, not no_timings)
    sys.exit(report.exit_code)


@cli.command()
@click.argument("report_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--no-timings", is_flag=True, default=False, help="Leave timings out of the report")
@format_option
def report(report_file: Path, no_timings: bool, output_format: str) -> None:
    """Re-render a structured report in another format."""
    import json

    from riesz_verifier.report import load_report

    try:
        loaded = load_report(report_file.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        click.secho(f"❌ {report_file}: not a structured report ({e})", fg="red", err=True)
        sys.exit(EXIT_INPUT_ERROR)
    _emit(loaded, output_format, not no_timings)


def main() -> None:
    cli()
