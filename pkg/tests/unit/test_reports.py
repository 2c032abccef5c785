import json

import pytest
from hamcrest import assert_that, contains_exactly, equal_to, has_entries, has_key, has_length, is_

from imflow import __version__
from imflow.core.channels import TOY_CHANNELS, TOY_EXPECTED, Scenario, exact_joint, toy_joint
from imflow.core.errors import InvariantBreachError
from imflow.core.info_matrix import analyze
from imflow.core.layer_chain import layer_chain
from imflow.core.mlp import MlpConfig, bit_task, init
from imflow.core.objectives import Candidate, objective_sweep
from imflow.core.reports import (
    DIAGRAM_HEADER,
    SWEEP_HEADER,
    analysis_dict,
    chain_dict,
    diagram_rows,
    envelope,
    sweep_dict,
    sweep_rows,
    validate_report,
)


def toy_analysis_body(channel: str = "high-bit"):
    analysis = analyze(exact_joint(Scenario(toy_joint(), TOY_CHANNELS[channel])))
    return {"kind": "analysis", "samples": 4, **analysis_dict(analysis)}


class TestEnvelope:
    """Tests for the report envelope."""

    def test_envelope_records_command_and_estimator(self):
        """Test that the envelope carries version, estimator and the command echo."""
        report = envelope("analyze", {"bins": 16}, toy_analysis_body(), {"report": "out/report.json"})

        assert_that(report["toolkit_version"], equal_to(__version__))
        assert_that(report["estimator"], has_entries(name="plug-in", units="bits", log_base=2))
        assert_that(report["command"], equal_to({"name": "analyze", "arguments": {"bins": 16}}))
        assert_that(report["artifacts"], equal_to({"report": "out/report.json"}))

    def test_report_is_plain_json(self):
        """Test that a report survives a JSON dump unchanged."""
        report = envelope("analyze", {}, toy_analysis_body())

        assert_that(json.loads(json.dumps(report)), equal_to(report))

    def test_bits_are_tagged(self):
        """Test that every block of bit quantities says so."""
        body = toy_analysis_body()

        for block in ("quantities", "matrix", "constraints", "noise_loss_point"):
            assert_that(body[block]["units"], equal_to("bits"))


class TestValidateReport:
    """Tests for schema validation."""

    def test_analysis_report_is_valid(self):
        """Test that an analysis report passes validation."""
        validate_report(envelope("analyze", {}, toy_analysis_body()))

    def test_sweep_report_is_valid(self):
        """Test that a sweep report passes validation."""
        family = [Candidate(name, q) for name, q in TOY_EXPECTED.items()]
        body = {"kind": "sweep", **sweep_dict(objective_sweep(family, [0.0, 0.5], [2.0]))}

        validate_report(envelope("objective-sweep", {}, body))

    def test_missing_field_rejected(self):
        """Test that a report without a matrix fails validation with its location."""
        body = toy_analysis_body()
        del body["matrix"]

        with pytest.raises(InvariantBreachError, match="body"):
            validate_report(envelope("analyze", {}, body))

    def test_unknown_command_rejected(self):
        """Test that the command name must be one of the toolkit's commands."""
        with pytest.raises(InvariantBreachError):
            validate_report(envelope("explain", {}, toy_analysis_body()))


class TestTables:
    """Tests for the flat tables written next to reports."""

    def test_sweep_rows_align_with_header(self):
        """Test one sweep row per grid point with every header column filled."""
        family = [Candidate(name, q) for name, q in TOY_EXPECTED.items()]

        rows = sweep_rows(objective_sweep(family, [0.0, 1.0], [0.5]))

        assert_that(rows, has_length(3))
        assert_that({len(row) for row in rows}, equal_to({len(SWEEP_HEADER)}))
        assert_that(rows[1][4], equal_to("high-bit constant"))
        assert_that(rows[0][5], equal_to(""))
        assert_that(rows[2][3], equal_to("constant"))

    def test_diagram_rows_cover_every_entry(self):
        """Test one diagram row per snapshot and chain entry, input first."""
        inputs, targets = bit_task(bits=4, repeats=1)
        chain = layer_chain(init(MlpConfig((4, 6, 3, 1))), inputs, targets)

        rows = diagram_rows({0: chain, 5: chain})

        assert_that(rows, has_length(2 * 4))
        assert_that([row[1] for row in rows[:4]], contains_exactly("input", "1", "2", "3"))
        assert_that({len(row) for row in rows}, equal_to({len(DIAGRAM_HEADER)}))

    def test_chain_dict_is_json_ready(self):
        """Test that a chain block holds layers, chains and ordering verdicts."""
        inputs, targets = bit_task(bits=4, repeats=1)
        chain = layer_chain(init(MlpConfig((4, 6, 3, 1))), inputs, targets)

        block = json.loads(json.dumps(chain_dict(chain)))

        assert_that(block, has_key("metadata"))
        assert_that(block["layers"], has_length(4))
        assert_that(block["layers"][0]["layer"], equal_to("input"))
        assert_that(block["monotone"], is_(chain.monotone))
