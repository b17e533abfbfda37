#!/usr/bin/env python3
"""Command-line entry point for the QKD analyzer.

Subcommands:
- analyze: exact sweep of a run-level event over N (CSV or JSON)
- simulate: Monte Carlo estimate for one configuration
- fit: exponential trend fit of a sweep CSV
- export: PRISM model plus properties sidecar
- check: evaluate a P=?[F ...] property on a built or imported chain
- tables: detection/correct-measurement tables at N = 5, 10, 15, 20
- compare: BB84 against B92 for one attack

Usage:
    python -m src.main analyze bb84 ir detect --inclusive-rounds
    python -m src.main simulate bb84 ir -n 6 --trials 100000 --seed 42
    python -m src.main check "P=?[F(detected=1)]" --protocol bb84 --attack ir -n 6
"""

import asyncio
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Annotated

import typer
import yaml
from dotenv import load_dotenv
from loguru import logger
from pydantic import ValidationError

from src.analysis.curve_fit import fit as fit_points
from src.analysis.dtmc import build_chain, load_chain, reach_probability_iterative
from src.analysis.montecarlo import simulate as simulate_event
from src.analysis.pctl import evaluate, parse_query, resolve_aliases
from src.analysis.prism import export_prism
from src.analysis.sweep import (
    build_tables,
    compare_protocols,
    comparison_to_json,
    read_sweep_csv,
    run_sweep,
    sweep_to_csv,
    sweep_to_json,
    table_to_csv,
)
from src.constants import EXIT_DOMAIN, MAX_SEED, TABLE_N_VALUES
from src.errors import AnalyzerError
from src.models.chain import ChainSpec
from src.models.config import AnalysisConfig, AnalyzerConfig, AnalyzerSettings
from src.models.quantum import AttackStrategy, DetectionRule, Event, EveCorrectRule, Protocol
from src.models.results import FitForm
from src.utils.config_loader import load_analyzer_config
from src.utils.logging import setup_logging
from src.utils.rational import to_decimal_string
from src.utils.slug import model_stem

app = typer.Typer(help="Exact and simulated analysis of BB84/B92 key exchange under eavesdropping.")


@dataclass
class AppState:
    """Configuration shared by every subcommand."""

    config: AnalyzerConfig
    settings: AnalyzerSettings


ProtocolArg = Annotated[Protocol, typer.Argument(help="Key distribution protocol")]
AttackArg = Annotated[AttackStrategy, typer.Argument(help="Eavesdropper: none, ir or rs")]
RoundsOpt = Annotated[int, typer.Option("--rounds", "-n", min=1, help="Qubit exchanges")]
DetectionOpt = Annotated[
    DetectionRule | None, typer.Option("--detection", help="Detection rule (config default)")
]
EveRuleOpt = Annotated[
    EveCorrectRule | None, typer.Option("--eve-rule", help="Eve-correct rule (config default)")
]
NoStopOpt = Annotated[
    bool, typer.Option("--no-stop-on-detect", help="Keep exchanging after Eve is detected")
]
FormatOpt = Annotated[str, typer.Option("--format", "-f", help="csv or json")]
InclusiveRoundsOpt = Annotated[
    bool,
    typer.Option(
        "--inclusive-rounds/--no-inclusive-rounds",
        "--paper-compat/--no-paper-compat",
        help="Evaluate N+1 exchanges per N",
    ),
]


@app.callback()
def main(
    ctx: typer.Context,
    config_file: Annotated[
        Path | None, typer.Option("--config", "-c", help="Path to analyzer.yaml")
    ] = None,
    verbose: Annotated[bool, typer.Option("--verbose", "-v", help="Debug logging")] = False,
) -> None:
    """Load configuration and logging before any subcommand runs."""
    load_dotenv()
    settings = AnalyzerSettings()
    config_path = config_file or settings.config
    try:
        config = load_analyzer_config(config_path)
    except (yaml.YAMLError, ValidationError) as e:
        raise typer.BadParameter(
            f"Invalid configuration {config_path}: {e}", param_hint="--config"
        ) from e
    if verbose:
        config.logging.level = "DEBUG"
    setup_logging(config.logging)
    ctx.obj = AppState(config=config, settings=settings)


@contextmanager
def domain_errors(command: str) -> Iterator[None]:
    """Report analyzer errors on stderr and exit with the domain error code."""
    try:
        yield
    except AnalyzerError as e:
        logger.error("Command failed", command=command, component=e.component, error=str(e))
        typer.echo(f"Error ({e.component}): {e}", err=True)
        raise typer.Exit(EXIT_DOMAIN) from e


def _state(ctx: typer.Context) -> AppState:
    state = ctx.obj
    if not isinstance(state, AppState):
        raise typer.BadParameter("Analyzer state not initialised")
    return state


def _analysis(
    state: AppState,
    detection: DetectionRule | None,
    eve_rule: EveCorrectRule | None,
    no_stop_on_detect: bool,
) -> AnalysisConfig:
    updates = {
        key: value
        for key, value in (
            ("detection", detection),
            ("eve_rule", eve_rule),
            ("stop_on_detect", False if no_stop_on_detect else None),
        )
        if value is not None
    }
    return state.config.analysis.model_copy(update=updates)


def _spec(
    protocol: Protocol, attack: AttackStrategy, rounds: int, analysis: AnalysisConfig
) -> ChainSpec:
    return ChainSpec(
        protocol=protocol,
        attack=attack,
        detection=analysis.detection,
        eve_rule=analysis.eve_rule,
        rounds=rounds,
        stop_on_detect=analysis.stop_on_detect,
    )


def _check_format(output_format: str) -> str:
    if output_format not in ("csv", "json"):
        raise typer.BadParameter(f"Unknown format '{output_format}', use csv or json")
    return output_format


def _n_range(state: AppState, n_min: int | None, n_max: int | None) -> list[int]:
    low = n_min if n_min is not None else state.config.analysis.n_min
    high = n_max if n_max is not None else state.config.analysis.n_max
    if low > high:
        raise typer.BadParameter(f"--n-min ({low}) must not exceed --n-max ({high})")
    return list(range(low, high + 1))


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        typer.echo(text, nl=not text.endswith("\n"))
        return
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(text, encoding="utf-8")
    logger.info("Output written", path=str(output))


@app.command()
def analyze(
    ctx: typer.Context,
    protocol: ProtocolArg,
    attack: AttackArg,
    event: Annotated[Event, typer.Argument(help="detect or cm")] = Event.DETECTED,
    n_min: Annotated[int | None, typer.Option("--n-min", min=1)] = None,
    n_max: Annotated[int | None, typer.Option("--n-max", min=1)] = None,
    inclusive_rounds: InclusiveRoundsOpt = False,
    output_format: FormatOpt = "csv",
    mc_trials: Annotated[
        int | None, typer.Option("--mc-trials", min=1, help="Add Monte Carlo columns")
    ] = None,
    seed: Annotated[int | None, typer.Option("--seed", min=0, max=MAX_SEED)] = None,
    detection: DetectionOpt = None,
    eve_rule: EveRuleOpt = None,
    no_stop_on_detect: NoStopOpt = False,
    output: Annotated[Path | None, typer.Option("--output", "-o")] = None,
) -> None:
    """
    Sweep the exact probability of EVENT over N.

    CSV output starts with one "# " line holding the run metadata as JSON,
    followed by the header and one row per N.
    """
    if seed is not None and mc_trials is None:
        raise typer.BadParameter("--seed only applies with --mc-trials", param_hint="--seed")
    state = _state(ctx)
    output_format = _check_format(output_format)
    n_values = _n_range(state, n_min, n_max)
    analysis = _analysis(state, detection, eve_rule, no_stop_on_detect)

    simulation = None
    if mc_trials is not None:
        simulation = state.config.simulation.model_copy(
            update={"trials": mc_trials} | ({"seed": seed} if seed is not None else {})
        )

    with domain_errors("analyze"):
        result = asyncio.run(
            run_sweep(protocol, attack, event, n_values, inclusive_rounds, analysis, simulation)
        )
    _emit(sweep_to_csv(result) if output_format == "csv" else sweep_to_json(result), output)


@app.command()
def simulate(
    ctx: typer.Context,
    protocol: ProtocolArg,
    attack: AttackArg,
    rounds: RoundsOpt,
    event: Annotated[Event, typer.Option("--event", help="detect or cm")] = Event.DETECTED,
    trials: Annotated[int | None, typer.Option("--trials", min=1)] = None,
    seed: Annotated[int | None, typer.Option("--seed", min=0, max=MAX_SEED)] = None,
    workers: Annotated[int | None, typer.Option("--workers", min=1)] = None,
    detection: DetectionOpt = None,
    eve_rule: EveRuleOpt = None,
    no_stop_on_detect: NoStopOpt = False,
) -> None:
    """Monte Carlo estimate for one configuration, printed as JSON."""
    state = _state(ctx)
    analysis = _analysis(state, detection, eve_rule, no_stop_on_detect)
    spec = _spec(protocol, attack, rounds, analysis)
    sim = state.config.simulation

    with domain_errors("simulate"):
        estimate = simulate_event(
            spec,
            event,
            trials=trials if trials is not None else sim.trials,
            seed=seed if seed is not None else sim.seed,
            workers=workers if workers is not None else sim.workers,
            chunk_size=sim.chunk_size,
        )
    typer.echo(estimate.model_dump_json(indent=2))


@app.command()
def fit(
    ctx: typer.Context,
    input_csv: Annotated[Path, typer.Argument(exists=True, dir_okay=False, help="Sweep CSV")],
    form: Annotated[FitForm, typer.Option("--form")] = FitForm.ONE_MINUS_DECAY,
    column: Annotated[str, typer.Option("--column", help="Column to fit against N")] = "p_exact",
) -> None:
    """Fit an exponential trend to a sweep CSV, printed as JSON."""
    state = _state(ctx)
    with domain_errors("fit"):
        model = fit_points(read_sweep_csv(input_csv, column), form, state.config.fitting)
    typer.echo(model.model_dump_json(indent=2))


@app.command()
def export(
    ctx: typer.Context,
    protocol: ProtocolArg,
    attack: AttackArg,
    rounds: RoundsOpt,
    output: Annotated[
        Path | None, typer.Option("--output", "-o", help="Model file (default: output dir)")
    ] = None,
    detection: DetectionOpt = None,
    eve_rule: EveRuleOpt = None,
    no_stop_on_detect: NoStopOpt = False,
) -> None:
    """Write a PRISM model and its properties file."""
    state = _state(ctx)
    export_config = state.config.export
    analysis = _analysis(state, detection, eve_rule, no_stop_on_detect)
    spec = _spec(protocol, attack, rounds, analysis)

    with domain_errors("export"):
        model = export_prism(spec, export_config.significant_digits)

    model_path = output or (
        state.settings.output_dir / f"{model_stem(spec)}{export_config.model_extension}"
    )
    properties_path = model_path.with_suffix(export_config.properties_extension)
    model_path.parent.mkdir(parents=True, exist_ok=True)
    model_path.write_text(model.text, encoding="utf-8")
    properties_path.write_text(model.properties, encoding="utf-8")

    logger.info("Model exported", model=str(model_path), properties=str(properties_path))
    typer.echo(str(model_path))
    typer.echo(str(properties_path))


@app.command()
def check(
    ctx: typer.Context,
    query: Annotated[str, typer.Argument(help='Property such as "P=?[F(detected=1)]"')],
    protocol: Annotated[Protocol | None, typer.Option("--protocol")] = None,
    attack: Annotated[AttackStrategy | None, typer.Option("--attack")] = None,
    rounds: Annotated[int | None, typer.Option("--rounds", "-n", min=1)] = None,
    chain_file: Annotated[
        Path | None,
        typer.Option("--chain-file", exists=True, dir_okay=False, help="JSON chain to check"),
    ] = None,
    iterative: Annotated[
        bool, typer.Option("--iterative", help="Floating-point Jacobi solve")
    ] = False,
    detection: DetectionOpt = None,
    eve_rule: EveRuleOpt = None,
    no_stop_on_detect: NoStopOpt = False,
) -> None:
    """Evaluate QUERY on the chain of a configuration or on an imported chain."""
    state = _state(ctx)
    if chain_file is None and (protocol is None or attack is None or rounds is None):
        raise typer.BadParameter("Give --protocol, --attack and --rounds, or --chain-file")

    with domain_errors("check"):
        parsed = parse_query(query)
        if protocol is not None and attack is not None and rounds is not None:
            analysis = _analysis(state, detection, eve_rule, no_stop_on_detect)
            chain = build_chain(_spec(protocol, attack, rounds, analysis))
        else:
            chain = load_chain(chain_file)  # type: ignore[arg-type]

        if iterative:
            solver = state.config.solver
            value = reach_probability_iterative(
                chain,
                resolve_aliases(parsed.target),
                tolerance=solver.iterative_tolerance,
                max_sweeps=solver.max_sweeps,
            )
            typer.echo(f"{parsed}: {value:.12g}")
            return

        probability = evaluate(chain, parsed)

    typer.echo(f"{parsed}")
    typer.echo(f"exact: {probability}")
    typer.echo(f"decimal: {to_decimal_string(probability)}")


@app.command()
def tables(
    ctx: typer.Context,
    protocol: ProtocolArg,
    inclusive_rounds: InclusiveRoundsOpt = True,
    output_format: FormatOpt = "json",
    eve_rule: EveRuleOpt = None,
    no_stop_on_detect: NoStopOpt = False,
) -> None:
    """Detection and correct-measurement tables at N = 5, 10, 15, 20 with trend fits."""
    state = _state(ctx)
    output_format = _check_format(output_format)
    analysis = _analysis(state, None, eve_rule, no_stop_on_detect)

    with domain_errors("tables"):
        report = asyncio.run(
            build_tables(protocol, TABLE_N_VALUES, inclusive_rounds, analysis, state.config.fitting)
        )
    typer.echo(table_to_csv(report) if output_format == "csv" else report.model_dump_json(indent=2))


@app.command()
def compare(
    ctx: typer.Context,
    attack: AttackArg,
    event: Annotated[Event, typer.Argument(help="detect or cm")] = Event.DETECTED,
    n_min: Annotated[int | None, typer.Option("--n-min", min=1)] = None,
    n_max: Annotated[int | None, typer.Option("--n-max", min=1)] = None,
    inclusive_rounds: InclusiveRoundsOpt = False,
    eve_rule: EveRuleOpt = None,
    no_stop_on_detect: NoStopOpt = False,
) -> None:
    """BB84 against B92 for one attack, printed as JSON."""
    state = _state(ctx)
    n_values = _n_range(state, n_min, n_max)
    analysis = _analysis(state, None, eve_rule, no_stop_on_detect)

    with domain_errors("compare"):
        rows = asyncio.run(compare_protocols(attack, event, n_values, inclusive_rounds, analysis))
    typer.echo(comparison_to_json(rows))


if __name__ == "__main__":
    app()
