"""Unit tests for sweeps, tables, comparisons and trend reports."""

import json
from fractions import Fraction
from pathlib import Path

import pytest

from src.analysis.sweep import (
    build_tables,
    compare_protocols,
    exact_probability,
    read_sweep_csv,
    rounds_for,
    run_sweep,
    sweep_to_csv,
    sweep_to_json,
    table_to_csv,
    trend_report,
)
from src.errors import DegenerateInputError
from src.models.chain import ChainSpec
from src.models.config import AnalysisConfig, SimulationConfig
from src.models.quantum import AttackStrategy, Event, Protocol
from src.models.results import FitForm


class TestRounds:
    """Test the N to exchanges mapping."""

    def test_inclusive_rounds_adds_one(self) -> None:
        assert rounds_for(5, inclusive_rounds=True) == 6
        assert rounds_for(5, inclusive_rounds=False) == 5

    def test_rejects_zero(self) -> None:
        with pytest.raises(ValueError):
            rounds_for(0, inclusive_rounds=False)


class TestExactProbability:
    """Test event evaluation on built chains."""

    def test_detection(self, bb84_ir_spec: ChainSpec) -> None:
        assert exact_probability(bb84_ir_spec, Event.DETECTED) == Fraction(144495, 262144)

    def test_correct_measurement_without_eve(self) -> None:
        spec = ChainSpec(protocol=Protocol.BB84, attack=AttackStrategy.NO_EVE, rounds=5)

        assert exact_probability(spec, Event.CM_EXCEEDS_HALF) == 0


class TestRunSweep:
    """Test sweeps over N."""

    async def test_rows_ordered_by_n(self, analysis_config: AnalysisConfig) -> None:
        result = await run_sweep(
            Protocol.BB84,
            AttackStrategy.INTERCEPT_RESEND,
            Event.DETECTED,
            [20, 5, 15, 10, 5],
            inclusive_rounds=True,
            analysis=analysis_config,
        )

        assert [row.N for row in result.rows] == [5, 10, 15, 20]
        assert [row.rounds for row in result.rows] == [6, 11, 16, 21]

    async def test_table_values(self, analysis_config: AnalysisConfig) -> None:
        result = await run_sweep(
            Protocol.BB84,
            AttackStrategy.INTERCEPT_RESEND,
            Event.DETECTED,
            [5, 10, 15, 20],
            inclusive_rounds=True,
            analysis=analysis_config,
        )

        expected = [0.5512, 0.7698, 0.8819, 0.9394]
        for row, value in zip(result.rows, expected, strict=True):
            assert abs(row.p_exact - value) <= 5e-4
        assert result.rows[0].exact == "144495/262144"

    async def test_no_eve_is_zero(self) -> None:
        result = await run_sweep(
            Protocol.BB84,
            AttackStrategy.NO_EVE,
            Event.DETECTED,
            range(1, 6),
            inclusive_rounds=False,
        )

        assert all(row.p_exact == 0.0 for row in result.rows)

    async def test_metadata_echo(self, analysis_config: AnalysisConfig) -> None:
        result = await run_sweep(
            Protocol.B92,
            AttackStrategy.RANDOM_SUBSTITUTION,
            Event.CM_EXCEEDS_HALF,
            [1, 2],
            inclusive_rounds=False,
            analysis=analysis_config,
        )

        assert result.metadata.inclusive_rounds is False
        assert result.metadata.event is Event.CM_EXCEEDS_HALF
        assert result.metadata.eve_rule == "basis-and-bit-match-sifted"
        assert result.metadata.mc_trials is None

    async def test_monte_carlo_columns(self, analysis_config: AnalysisConfig) -> None:
        simulation = SimulationConfig(trials=20_000, seed=3)

        result = await run_sweep(
            Protocol.BB84,
            AttackStrategy.RANDOM_SUBSTITUTION,
            Event.DETECTED,
            [2, 4],
            inclusive_rounds=False,
            analysis=analysis_config,
            simulation=simulation,
        )

        for row in result.rows:
            assert row.p_mc is not None
            assert row.mc_stderr is not None
            assert abs(row.p_mc - row.p_exact) <= 4 * row.mc_stderr
        assert result.metadata.mc_trials == 20_000
        assert result.metadata.seed == 3


class TestSweepFormats:
    """Test CSV and JSON rendering."""

    async def test_csv_layout(self) -> None:
        result = await run_sweep(
            Protocol.BB84, AttackStrategy.INTERCEPT_RESEND, Event.DETECTED, [1, 2], False
        )

        lines = sweep_to_csv(result).splitlines()

        assert lines[0].startswith("# ")
        assert json.loads(lines[0][2:])["inclusive_rounds"] is False
        assert lines[1] == "N,rounds,p_exact,p_mc,mc_stderr"
        assert lines[2] == "1,1,0.125,,"
        assert lines[3] == "2,2,0.234375,,"

    async def test_csv_is_read_back(self, tmp_path: Path) -> None:
        result = await run_sweep(
            Protocol.BB84, AttackStrategy.RANDOM_SUBSTITUTION, Event.DETECTED, [1, 2, 3], True
        )
        path = tmp_path / "sweep.csv"
        path.write_text(sweep_to_csv(result))

        points = read_sweep_csv(path)

        assert points == [(float(r.N), r.p_exact) for r in result.rows]
        assert read_sweep_csv(path, column="p_mc") == []

    def test_read_missing_column(self, tmp_path: Path) -> None:
        path = tmp_path / "other.csv"
        path.write_text("x,y\n1,2\n")

        with pytest.raises(DegenerateInputError, match="needs columns"):
            read_sweep_csv(path)

    def test_read_non_numeric(self, tmp_path: Path) -> None:
        path = tmp_path / "bad.csv"
        path.write_text("N,p_exact\n1,abc\n")

        with pytest.raises(DegenerateInputError, match="Non-numeric"):
            read_sweep_csv(path)

    async def test_json(self) -> None:
        result = await run_sweep(
            Protocol.B92, AttackStrategy.INTERCEPT_RESEND, Event.DETECTED, [3], True
        )

        document = json.loads(sweep_to_json(result))

        assert document["metadata"]["protocol"] == "b92"
        assert document["rows"][0]["rounds"] == 4
        assert document["rows"][0]["exact"] == "1695/4096"


class TestTrendReport:
    """Test monotonicity verdicts and attached fits."""

    def test_rising_column(self) -> None:
        points = [(n, 1 - 0.75 ** (n + 1)) for n in (5, 10, 15, 20)]

        report = trend_report("p_ed", points, FitForm.ONE_MINUS_DECAY)

        assert report.monotone
        assert report.direction == "nondecreasing"
        assert report.fit is not None
        assert report.fit.a == pytest.approx(0.75, abs=1e-6)

    def test_non_monotone_column(self) -> None:
        report = trend_report("p_cm", [(5, 0.4), (10, 0.5), (15, 0.1)], FitForm.DECAY)

        assert not report.monotone
        assert report.direction == "nonincreasing"

    def test_unfittable_column_gets_note(self) -> None:
        report = trend_report("p_cm", [(5, 0.0), (10, 0.0), (15, 0.0)], FitForm.DECAY)

        assert report.fit is None
        assert report.note is not None


class TestTablesAndComparison:
    """Test the table and comparison builders."""

    async def test_bb84_tables(self, analysis_config: AnalysisConfig) -> None:
        report = await build_tables(Protocol.BB84, analysis=analysis_config)

        assert [row.N for row in report.rows] == [5, 10, 15, 20]
        assert report.inclusive_rounds
        expected_rs = [0.822, 0.9577, 0.9899, 0.9976]
        for row, value in zip(report.rows, expected_rs, strict=True):
            assert abs(row.p_ed_random_substitution - value) <= 5e-4
        assert abs(report.rows[0].p_ed_intercept_resend - 0.5512) <= 5e-4

        trends = {trend.column: trend for trend in report.trends}
        assert set(trends) == {
            "p_ed_random_substitution",
            "p_ed_intercept_resend",
            "p_cm_random_substitution",
            "p_cm_intercept_resend",
        }
        assert trends["p_ed_random_substitution"].monotone
        assert trends["p_ed_intercept_resend"].monotone
        assert trends["p_cm_intercept_resend"].direction == "nonincreasing"

    async def test_table_csv(self, analysis_config: AnalysisConfig) -> None:
        report = await build_tables(Protocol.B92, n_values=(5, 10), analysis=analysis_config)

        header = table_to_csv(report).splitlines()[0]

        assert header.startswith("N,rounds,p_ed_random_substitution")

    @pytest.mark.parametrize(
        "attack", [AttackStrategy.RANDOM_SUBSTITUTION, AttackStrategy.INTERCEPT_RESEND]
    )
    async def test_protocols_agree(
        self, attack: AttackStrategy, analysis_config: AnalysisConfig
    ) -> None:
        rows = await compare_protocols(attack, Event.DETECTED, range(1, 11), True, analysis_config)

        assert len(rows) == 10
        assert all(row.difference == 0.0 for row in rows)
        assert all(row.bb84 == row.b92 for row in rows)
