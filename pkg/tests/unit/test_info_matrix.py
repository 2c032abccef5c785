from dataclasses import replace

import numpy as np
import pytest
from hamcrest import assert_that, close_to, equal_to, greater_than, has_item, is_

from helpers.toy import random_deterministic_scenario, random_stochastic_scenario
from imflow.core.channels import TOY_CHANNELS, TOY_EXPECTED, Scenario, exact_joint, toy_joint
from imflow.core.errors import AxisError, InconsistentInputsError, InvalidParameterError
from imflow.core.info_matrix import (
    InfoQuantities,
    Mode,
    NoiseLossPoint,
    PatternKind,
    analyze,
    classify_pattern,
    identity_quantities,
    information_matrix,
    initial_matrix,
    isometric_table,
    ixx_from_point,
    noise_loss_point,
    pattern_matrix,
    quantities_from_joint,
    verify_constraints,
)
from imflow.core.probability import JointTable

TOLERANCE = 1e-9


def toy_quantities(name: str) -> InfoQuantities:
    return quantities_from_joint(exact_joint(Scenario(toy_joint(), TOY_CHANNELS[name])))


def entries(matrix):
    return matrix.a, matrix.b, matrix.c, matrix.d


def assert_close(actual, expected):
    assert_that(len(actual), equal_to(len(expected)))
    for value, wanted in zip(actual, expected):
        assert_that(value, close_to(wanted, TOLERANCE))


class TestQuantitiesFromJoint:
    """Tests for computing every entropy of X -> f(X) -> Y."""

    @pytest.mark.parametrize("name", sorted(TOY_CHANNELS))
    def test_toy_channels_match_hand_computed_values(self, name):
        """Test that each toy channel reproduces its hand-computed quantities."""
        # Act
        q = toy_quantities(name)

        # Assert
        for field, expected in TOY_EXPECTED[name].as_dict().items():
            assert_that(getattr(q, field), close_to(expected, TOLERANCE))

    def test_toy_base_quantities(self):
        """Test the X/Y part of the toy problem: h_x 2, h_y 1, n_xy 1, i_xy 1, l_xy 0."""
        q = toy_quantities("identity")

        assert_close((q.h_x, q.h_y, q.n_xy, q.i_xy, q.l_xy), (2.0, 1.0, 1.0, 1.0, 0.0))

    def test_missing_axis_rejected(self):
        """Test that a table without a T axis is rejected."""
        with pytest.raises(AxisError):
            quantities_from_joint(toy_joint())

    def test_noisy_channel_has_stochasticity(self):
        """Test that n_xxf is positive when T is not a function of X."""
        table = JointTable(("X", "T", "Y"), [[0, 0, 0], [0, 1, 0], [1, 1, 1]], [0.25, 0.25, 0.5])

        q = quantities_from_joint(table)

        assert_that(q.n_xxf, greater_than(0.0))
        assert_that(q.is_deterministic(), is_(False))


class TestInformationMatrix:
    """Tests for the 2x2 decomposition of H(X)."""

    @pytest.mark.parametrize("name, expected", [
        ("identity", (0.0, 1.0, 0.0, 1.0)),
        ("high-bit", (1.0, 0.0, 0.0, 1.0)),
        ("constant", (1.0, 0.0, 1.0, 0.0)),
        ("low-bit", (0.0, 1.0, 1.0, 0.0)),
    ])
    def test_toy_matrices(self, name, expected):
        """Test the four toy matrices (a, b, c, d)."""
        matrix = information_matrix(toy_quantities(name))

        assert_close(entries(matrix), expected)

    def test_array_view_lays_out_rows_by_relevance(self):
        """Test that the 2x2 view holds [[a, b], [c, d]]."""
        matrix = information_matrix(toy_quantities("constant"))

        assert_that(matrix.as_array().tolist(), equal_to([[1.0, 0.0], [1.0, 0.0]]))

    def test_initial_matrix_keeps_everything(self):
        """Test that IM[X] is (0, n_xy, 0, i_xy)."""
        matrix = initial_matrix(toy_quantities("constant"))

        assert_close(entries(matrix), (0.0, 1.0, 0.0, 1.0))

    def test_identity_quantities_describe_the_identity(self):
        """Test that identity quantities have h_f = h_x and no loss beyond l_xy."""
        q = identity_quantities(toy_quantities("low-bit"))

        assert_close((q.h_f, q.i_xxf, q.l_xyf, q.dloss), (2.0, 2.0, 0.0, 0.0))

    def test_entropy_expansion_is_flagged(self):
        """Test that a + c < 0 is reported as entropy expansion."""
        table = JointTable(("X", "T", "Y"), [[0, 0, 0], [0, 1, 0]], [0.5, 0.5])

        matrix = information_matrix(quantities_from_joint(table))

        assert_that(matrix.entropy_expansion, is_(True))


class TestVerifyConstraints:
    """Tests for the constraint report."""

    def test_high_bit_passes_deterministic_checks(self):
        """Test that the high-bit channel passes every deterministic check."""
        report = verify_constraints(information_matrix(toy_quantities("high-bit")), Mode.DETERMINISTIC, 1e-9)

        assert_that(report.passed, is_(True))
        assert_that(report.failures(), equal_to([]))

    def test_identity_passes_stochastic_checks(self):
        """Test that n_xxf = 0 is admissible in stochastic mode."""
        report = verify_constraints(information_matrix(toy_quantities("identity")), Mode.STOCHASTIC)

        assert_that(report.passed, is_(True))

    def test_fabricated_loss_violation_is_reported(self):
        """Test that l_xyf < l_xy fails the loss lower bound with positive slack."""
        q = replace(toy_quantities("identity"), l_xy=0.5)

        report = verify_constraints(information_matrix(q), Mode.DETERMINISTIC)

        check = report.check("loss lower bound")
        assert_that(check.passed, is_(False))
        assert_that(check.slack, close_to(0.5, TOLERANCE))

    def test_noisy_data_fails_determinism_in_det_mode(self):
        """Test that a stochastic joint fails the determinism check in det mode only."""
        table = JointTable(("X", "T", "Y"), [[0, 0, 0], [0, 1, 0], [1, 1, 1]], [0.25, 0.25, 0.5])
        matrix = information_matrix(quantities_from_joint(table))

        det = verify_constraints(matrix, Mode.DETERMINISTIC)
        stoch = verify_constraints(matrix, Mode.STOCHASTIC)

        assert_that(det.check("determinism").passed, is_(False))
        assert_that([check.name for check in stoch.checks if check.name == "determinism"], equal_to([]))

    def test_negative_tolerance_rejected(self):
        """Test that a negative tolerance is an error."""
        with pytest.raises(InvalidParameterError):
            verify_constraints(information_matrix(toy_quantities("identity")), tol=-1.0)


class TestNoiseLossDiagram:
    """Tests for diagram coordinates, isometrics and corner patterns."""

    def test_coordinates_are_the_diagonal(self):
        """Test that the point of a matrix is (a, d)."""
        point = noise_loss_point(information_matrix(toy_quantities("high-bit")))

        assert_close((point.x_coord, point.y_coord), (1.0, 1.0))

    @pytest.mark.parametrize("point, expected", [
        (NoiseLossPoint(1.0, 1.0), 1.0),
        (NoiseLossPoint(0.0, 1.0), 2.0),
        (NoiseLossPoint(0.0, 0.0), 1.0),
        (NoiseLossPoint(1.0, 0.0), 0.0),
    ])
    def test_isometric_on_toy_problem(self, point, expected):
        """Test I(X; f(X)) read from the four toy corners."""
        assert_that(ixx_from_point(point, n_xy=1.0), close_to(expected, TOLERANCE))

    def test_isometric_rejects_impossible_points(self):
        """Test that a point below the zero isometric is inconsistent."""
        with pytest.raises(InconsistentInputsError):
            ixx_from_point(NoiseLossPoint(1.0, 0.0), n_xy=0.5)

    def test_isometric_table_of_toy_problem(self):
        """Test the per-pattern coordinates and I(X; f(X)) values on the toy problem."""
        table = isometric_table(toy_quantities("identity"))

        kinds = (PatternKind.LOSSLESS, PatternKind.MAX_DISCRIMINATIVE, PatternKind.DUMMY, PatternKind.RANDOM)
        assert_close([table[kind].i_xxf for kind in kinds], (2.0, 1.0, 0.0, 1.0))
        assert_close((table[PatternKind.LOSSLESS].point.x_coord, table[PatternKind.LOSSLESS].point.y_coord),
                     (0.0, 1.0))

    def test_stochastic_corner_matrices(self):
        """Test that injected noise shifts every corner by n_xxf."""
        q = toy_quantities("identity")

        assert_close(pattern_matrix(PatternKind.MAX_DISCRIMINATIVE, q, 0.25), (0.75, 0.25, 0.25, 0.75))
        assert_close(pattern_matrix(PatternKind.DUMMY, q, 0.25), (0.75, 0.25, 1.0, 0.0))

    @pytest.mark.parametrize("name, kind", [
        ("identity", PatternKind.LOSSLESS),
        ("high-bit", PatternKind.MAX_DISCRIMINATIVE),
        ("constant", PatternKind.DUMMY),
        ("low-bit", PatternKind.RANDOM),
    ])
    def test_toy_patterns(self, name, kind):
        """Test that each toy channel lands on its own corner."""
        label = classify_pattern(information_matrix(toy_quantities(name)), 0.05)

        assert_that(label.kind, equal_to(kind))
        assert_that(label.oracle, equal_to(kind is PatternKind.MAX_DISCRIMINATIVE))

    def test_far_from_corners_is_intermediate(self):
        """Test that a matrix halfway along both axes is Intermediate."""
        q = toy_quantities("identity")
        matrix = replace(information_matrix(q), a=0.5, b=0.5, c=0.5, d=0.5)

        assert_that(classify_pattern(matrix).kind, equal_to(PatternKind.INTERMEDIATE))

    def test_tau_out_of_range_rejected(self):
        """Test that tau must lie strictly between 0 and 0.5."""
        with pytest.raises(InvalidParameterError):
            classify_pattern(information_matrix(toy_quantities("identity")), 0.5)


class TestAnalyze:
    """Tests for the combined analysis of one joint."""

    def test_toy_high_bit(self):
        """Test that the analysis carries matrix, point, pattern and isometric value."""
        analysis = analyze(exact_joint(Scenario(toy_joint(), TOY_CHANNELS["high-bit"])))

        assert_close(entries(analysis.matrix), (1.0, 0.0, 0.0, 1.0))
        assert_that(analysis.constraints.passed, is_(True))
        assert_that(analysis.pattern.kind, equal_to(PatternKind.MAX_DISCRIMINATIVE))
        assert_that(analysis.i_xxf_from_point, close_to(1.0, TOLERANCE))

    def test_noisy_data_in_det_mode_reports_failures(self):
        """Test that det mode on noisy data still returns an analysis with failures."""
        table = JointTable(("X", "T", "Y"), [[0, 0, 0], [0, 1, 0], [1, 1, 1]], [0.25, 0.25, 0.5])

        analysis = analyze(table, Mode.DETERMINISTIC)

        assert_that([check.name for check in analysis.constraints.failures()],
                    has_item("determinism"))


class TestIdentities:
    """Algebraic identities over many generated channels."""

    def test_deterministic_channels(self):
        """Test sums, ranges, DPI and isometric consistency on 200 deterministic channels."""
        rng = np.random.default_rng(20240601)
        for _ in range(200):
            # Arrange
            scenario = random_deterministic_scenario(rng)

            # Act
            q = quantities_from_joint(exact_joint(scenario))
            matrix = information_matrix(q)
            report = verify_constraints(matrix, Mode.DETERMINISTIC)

            # Assert
            for name in ("irrelevant row sum", "relevant row sum", "filtered-in column sum",
                         "filtered-out column sum", "total sum", "fundamental equation"):
                assert report.check(name).passed, name
            assert report.passed, [check.name for check in report.failures()]
            assert matrix.a >= -TOLERANCE and matrix.c >= -TOLERANCE
            assert q.i_xyf <= q.i_xxf + TOLERANCE
            point = noise_loss_point(matrix)
            assert point.within_bounds(q.n_xy, q.i_xy)
            assert_that(ixx_from_point(point, q.n_xy), close_to(q.i_xxf, TOLERANCE))

    def test_stochastic_channels(self):
        """Test the fundamental equation, the noise lower bound and DPI on 100 stochastic channels."""
        rng = np.random.default_rng(7)
        for _ in range(100):
            scenario = random_stochastic_scenario(rng)

            q = quantities_from_joint(exact_joint(scenario))
            report = verify_constraints(information_matrix(q), Mode.STOCHASTIC)

            assert report.check("fundamental equation").passed
            assert report.check("noise lower bound").passed
            assert q.n_xyf >= q.n_xxf - TOLERANCE
            assert q.i_xyf <= q.i_xxf + TOLERANCE
            point = noise_loss_point(information_matrix(q))
            assert_that(ixx_from_point(point, q.n_xy, q.n_xxf), close_to(q.i_xxf, TOLERANCE))
