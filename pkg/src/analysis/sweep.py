"""Sweeps over N, table reproduction, protocol comparison and trend reports.

Every N is an independent exact evaluation, so sweeps fan out over a bounded
number of worker threads and reassemble the rows in N order.
"""

import asyncio
import csv
import io
import json
from collections.abc import Sequence
from fractions import Fraction
from pathlib import Path

from src.analysis.curve_fit import fit
from src.analysis.dtmc import CORRECT_COUNT, DETECTED, build_chain, reach_probability
from src.analysis.montecarlo import simulate
from src.constants import SWEEP_CSV_HEADER, TABLE_N_VALUES
from src.errors import DegenerateInputError
from src.models.chain import ChainSpec, Comparator, StatePredicate
from src.models.config import AnalysisConfig, FittingConfig, SimulationConfig
from src.models.quantum import AttackStrategy, Event, Protocol
from src.models.results import (
    ComparisonRow,
    FitForm,
    SweepMetadata,
    SweepResult,
    SweepRow,
    TableReport,
    TableRow,
    TrendReport,
)
from src.utils.logging import get_logger

logger = get_logger(__name__)


def rounds_for(n: int, inclusive_rounds: bool) -> int:
    """Number of qubit exchanges evaluated for N; the tables count 0..N inclusively."""
    if n < 1:
        raise ValueError(f"N must be at least 1, got {n}")
    return n + 1 if inclusive_rounds else n


def event_target(event: Event, rounds: int) -> StatePredicate:
    """Chain predicate for a run-level event."""
    if event is Event.DETECTED:
        return StatePredicate.of(DETECTED, Comparator.EQ, 1)
    return StatePredicate.of(CORRECT_COUNT, Comparator.GT, rounds // 2)


def exact_probability(spec: ChainSpec, event: Event) -> Fraction:
    """Exact probability of ``event`` over a ``spec.rounds`` run."""
    return reach_probability(build_chain(spec), event_target(event, spec.rounds))


def make_spec(
    protocol: Protocol,
    attack: AttackStrategy,
    rounds: int,
    analysis: AnalysisConfig,
) -> ChainSpec:
    return ChainSpec(
        protocol=protocol,
        attack=attack,
        detection=analysis.detection,
        eve_rule=analysis.eve_rule,
        rounds=rounds,
        stop_on_detect=analysis.stop_on_detect,
    )


async def run_sweep(
    protocol: Protocol,
    attack: AttackStrategy,
    event: Event,
    n_values: Sequence[int],
    inclusive_rounds: bool,
    analysis: AnalysisConfig | None = None,
    simulation: SimulationConfig | None = None,
) -> SweepResult:
    """
    Evaluate ``event`` for every N in ``n_values``.

    Args:
        protocol: BB84 or B92
        attack: Eavesdropper strategy
        event: ``detect`` or ``cm``
        n_values: N values to evaluate
        inclusive_rounds: Evaluate N+1 exchanges per N
        analysis: Rules and concurrency limit
        simulation: When given, each row also carries a Monte Carlo estimate

    Returns:
        SweepResult with rows ordered by N
    """
    analysis = analysis or AnalysisConfig()
    semaphore = asyncio.Semaphore(analysis.max_concurrent)

    def evaluate(n: int) -> SweepRow:
        spec = make_spec(protocol, attack, rounds_for(n, inclusive_rounds), analysis)
        exact = exact_probability(spec, event)
        row = SweepRow(N=n, rounds=spec.rounds, p_exact=float(exact), exact=str(exact))
        if simulation is not None:
            estimate = simulate(
                spec,
                event,
                trials=simulation.trials,
                seed=simulation.seed,
                workers=simulation.workers,
                chunk_size=simulation.chunk_size,
            )
            row = row.model_copy(
                update={"p_mc": estimate.point_estimate, "mc_stderr": estimate.standard_error}
            )
        return row

    async def evaluate_with_semaphore(n: int) -> SweepRow:
        async with semaphore:
            return await asyncio.to_thread(evaluate, n)

    rows = await asyncio.gather(*(evaluate_with_semaphore(n) for n in sorted(set(n_values))))

    logger.info(
        "Sweep finished",
        protocol=protocol.value,
        attack=attack.value,
        event=event.value,
        points=len(rows),
        inclusive_rounds=inclusive_rounds,
    )
    return SweepResult(
        metadata=SweepMetadata(
            protocol=protocol,
            attack=attack,
            event=event,
            inclusive_rounds=inclusive_rounds,
            detection=analysis.detection.value,
            eve_rule=analysis.eve_rule.value,
            stop_on_detect=analysis.stop_on_detect,
            mc_trials=simulation.trials if simulation else None,
            seed=simulation.seed if simulation else None,
        ),
        rows=sorted(rows, key=lambda row: row.N),
    )


def sweep_to_csv(result: SweepResult) -> str:
    """Render a sweep as CSV preceded by a ``#`` metadata line."""
    buffer = io.StringIO()
    buffer.write("# " + result.metadata.model_dump_json() + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SWEEP_CSV_HEADER)
    for row in result.rows:
        writer.writerow(
            [
                row.N,
                row.rounds,
                repr(row.p_exact),
                "" if row.p_mc is None else repr(row.p_mc),
                "" if row.mc_stderr is None else repr(row.mc_stderr),
            ]
        )
    return buffer.getvalue()


def sweep_to_json(result: SweepResult) -> str:
    return result.model_dump_json(indent=2)


def read_sweep_csv(path: Path | str, column: str = "p_exact") -> list[tuple[float, float]]:
    """
    Read (N, value) points from a sweep CSV.

    Lines starting with ``#`` are skipped; rows with an empty value are dropped.

    Raises:
        DegenerateInputError: If the file lacks the N column or ``column``
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = [line for line in text.splitlines() if line.strip() and not line.startswith("#")]
    reader = csv.DictReader(lines)
    fields = reader.fieldnames or []
    if "N" not in fields or column not in fields:
        raise DegenerateInputError(f"CSV {path} needs columns 'N' and '{column}', found {fields}")

    points: list[tuple[float, float]] = []
    for record in reader:
        value = (record.get(column) or "").strip()
        if not value:
            continue
        try:
            points.append((float(record["N"]), float(value)))
        except ValueError as e:
            raise DegenerateInputError(f"Non-numeric entry in {path}: {record}") from e
    return points


def trend_report(
    column: str,
    points: Sequence[tuple[float, float]],
    form: FitForm,
    config: FittingConfig | None = None,
) -> TrendReport:
    """
    Check that ``points`` move the way ``form`` predicts and fit them.

    OneMinusDecay columns must be nondecreasing in N, Decay columns
    nonincreasing. A fit that cannot be computed is reported as a note.
    """
    ordered = sorted(points)
    values = [y for _, y in ordered]
    pairs = list(zip(values, values[1:], strict=False))
    if form is FitForm.ONE_MINUS_DECAY:
        direction = "nondecreasing"
        monotone = all(later >= earlier for earlier, later in pairs)
    else:
        direction = "nonincreasing"
        monotone = all(later <= earlier for earlier, later in pairs)

    model = None
    note = None
    try:
        model = fit(ordered, form, config)
    except DegenerateInputError as e:
        note = str(e)
        logger.warning("Trend fit skipped", column=column, reason=note)

    return TrendReport(column=column, monotone=monotone, direction=direction, fit=model, note=note)


async def build_tables(
    protocol: Protocol,
    n_values: Sequence[int] = TABLE_N_VALUES,
    inclusive_rounds: bool = True,
    analysis: AnalysisConfig | None = None,
    fitting: FittingConfig | None = None,
) -> TableReport:
    """Detection and correct-measurement probabilities for both attacks at the table N values."""
    analysis = analysis or AnalysisConfig()
    columns = {
        "p_ed_random_substitution": (AttackStrategy.RANDOM_SUBSTITUTION, Event.DETECTED),
        "p_ed_intercept_resend": (AttackStrategy.INTERCEPT_RESEND, Event.DETECTED),
        "p_cm_random_substitution": (AttackStrategy.RANDOM_SUBSTITUTION, Event.CM_EXCEEDS_HALF),
        "p_cm_intercept_resend": (AttackStrategy.INTERCEPT_RESEND, Event.CM_EXCEEDS_HALF),
    }
    sweeps = await asyncio.gather(
        *(
            run_sweep(protocol, attack, event, n_values, inclusive_rounds, analysis)
            for attack, event in columns.values()
        )
    )
    by_column = dict(zip(columns, sweeps, strict=True))

    rows = [
        TableRow(
            N=row.N,
            rounds=row.rounds,
            **{name: by_column[name].rows[i].p_exact for name in columns},
        )
        for i, row in enumerate(sweeps[0].rows)
    ]
    trends = [
        trend_report(
            name,
            [(r.N, r.p_exact) for r in by_column[name].rows],
            FitForm.ONE_MINUS_DECAY if event is Event.DETECTED else FitForm.DECAY,
            fitting,
        )
        for name, (_, event) in columns.items()
    ]
    return TableReport(
        protocol=protocol,
        inclusive_rounds=inclusive_rounds,
        eve_rule=analysis.eve_rule.value,
        rows=rows,
        trends=trends,
    )


async def compare_protocols(
    attack: AttackStrategy,
    event: Event,
    n_values: Sequence[int],
    inclusive_rounds: bool,
    analysis: AnalysisConfig | None = None,
) -> list[ComparisonRow]:
    """BB84 and B92 side by side for one attack and event."""
    bb84, b92 = await asyncio.gather(
        run_sweep(Protocol.BB84, attack, event, n_values, inclusive_rounds, analysis),
        run_sweep(Protocol.B92, attack, event, n_values, inclusive_rounds, analysis),
    )
    return [
        ComparisonRow(
            N=left.N,
            rounds=left.rounds,
            bb84=left.p_exact,
            b92=right.p_exact,
            difference=right.p_exact - left.p_exact,
        )
        for left, right in zip(bb84.rows, b92.rows, strict=True)
    ]


def table_to_csv(report: TableReport) -> str:
    buffer = io.StringIO()
    fields = list(TableRow.model_fields)
    writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in report.rows:
        writer.writerow(row.model_dump())
    return buffer.getvalue()


def comparison_to_json(rows: Sequence[ComparisonRow]) -> str:
    return json.dumps([row.model_dump() for row in rows], indent=2)
