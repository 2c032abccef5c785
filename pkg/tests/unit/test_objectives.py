from dataclasses import replace

import numpy as np
import pytest
from hamcrest import assert_that, close_to, contains_exactly, equal_to, is_

from imflow.core.channels import TOY_EXPECTED, DeterministicChannel, Scenario, exact_joint
from imflow.core.errors import InvalidParameterError, StochasticCandidateError
from imflow.core.info_matrix import quantities_from_joint
from imflow.core.objectives import (
    VERDICT_NOT_APPLICABLE,
    VERDICT_TRUE,
    VERDICT_UNDEFINED,
    Candidate,
    ObjectiveKind,
    ObjectiveSpec,
    equivalence_check,
    is_deterministic_family,
    objective_sweep,
    objective_value,
    raw_vs_reformulated_check,
    select,
)
from helpers.toy import random_joint_xy

TOY_FAMILY = [Candidate(name, q) for name, q in TOY_EXPECTED.items()]


def random_family(rng: np.random.Generator):
    joint = random_joint_xy(rng)
    x_size = int(joint.column("X").max()) + 1
    family = []
    for index in range(int(rng.integers(2, 7))):
        mapping = rng.integers(0, int(rng.integers(1, 9)), size=x_size)
        channel = DeterministicChannel(tuple(int(image) for image in mapping))
        family.append(Candidate(f"c{index}", quantities_from_joint(exact_joint(Scenario(joint, channel)))))
    return family


class TestObjectiveSpec:
    """Tests for objective construction and validation."""

    def test_labels(self):
        """Test the readable labels of parametrised objectives."""
        assert_that(ObjectiveSpec.parametric(0.25).label, equal_to("parametric(alpha=0.25)"))
        assert_that(ObjectiveSpec.ib_raw(2).label, equal_to("ib_raw(beta=2)"))
        assert_that(ObjectiveSpec.diagonal().label, equal_to("diagonal"))

    def test_kind_from_name(self):
        """Test that a kind can be given by its value."""
        assert_that(ObjectiveSpec("loss_only").kind, equal_to(ObjectiveKind.LOSS_ONLY))

    @pytest.mark.parametrize("kind, parameter", [
        ("parametric", 1.5),
        ("parametric", None),
        ("ib_reformulated", -0.1),
        ("loss_only", 0.3),
        ("minimum_description", None),
    ])
    def test_invalid_specs_rejected(self, kind, parameter):
        """Test that out-of-range or missing parameters and unknown kinds are rejected."""
        with pytest.raises(InvalidParameterError):
            ObjectiveSpec(kind, parameter)


class TestSelect:
    """Tests for evaluating objectives over the toy family."""

    @pytest.mark.parametrize("spec, expected", [
        (ObjectiveSpec.loss_only(), ("identity", "high-bit")),
        (ObjectiveSpec.noise_only(), ("high-bit", "constant")),
        (ObjectiveSpec.diagonal(), ("high-bit",)),
        (ObjectiveSpec.parametric(1.0), ("high-bit", "constant")),
        (ObjectiveSpec.parametric(0.5), ("high-bit",)),
        (ObjectiveSpec.ib_reformulated(0.5), ("constant",)),
        (ObjectiveSpec.ib_raw(0.5), ("constant",)),
    ])
    def test_toy_minimisers(self, spec, expected):
        """Test the set of minimisers of each objective on the toy channels."""
        result = select(TOY_FAMILY, spec)

        assert_that(result.argmin_set, equal_to(expected))
        assert_that(result.selected, equal_to(expected[0]))

    def test_values_of_identity_channel(self):
        """Test objective values on the identity channel (n_xyf 1, l_xyf 0)."""
        q = TOY_EXPECTED["identity"]

        assert_that(objective_value(ObjectiveSpec.parametric(0.25), q), close_to(0.25, 1e-12))
        assert_that(objective_value(ObjectiveSpec.ib_reformulated(3.0), q), close_to(1.0, 1e-12))
        assert_that(objective_value(ObjectiveSpec.ib_raw(2.0), q), close_to(0.0, 1e-12))

    def test_empty_family_rejected(self):
        """Test that selecting from no candidates is an error."""
        with pytest.raises(InvalidParameterError):
            select([], ObjectiveSpec.diagonal())

    def test_duplicate_names_rejected(self):
        """Test that candidate names must be unique."""
        with pytest.raises(InvalidParameterError):
            select(TOY_FAMILY + TOY_FAMILY[:1], ObjectiveSpec.diagonal())


class TestEquivalence:
    """Tests for the parametric and bottleneck objectives selecting alike."""

    def test_alpha_zero_has_no_matching_beta(self):
        """Test that alpha = 0 is rejected by the equivalence check."""
        with pytest.raises(InvalidParameterError):
            equivalence_check(TOY_FAMILY, 0.0)

    def test_random_families(self):
        """Test parametric(alpha) against ib_reformulated(1 / alpha) on 100 random families."""
        rng = np.random.default_rng(11)
        alphas = [round(0.1 * step, 1) for step in range(1, 10)]
        for _ in range(100):
            family = random_family(rng)
            for alpha in alphas:
                assert equivalence_check(family, alpha).equivalent, alpha
            for beta in (0.5, 1.0, 2.0, 4.0):
                assert raw_vs_reformulated_check(family, beta), beta

    def test_max_discriminative_dominates_parametric(self):
        """Test that the high-bit channel minimises parametric(alpha) for every alpha in (0, 1)."""
        for alpha in np.linspace(0.05, 0.95, 19):
            assert "high-bit" in select(TOY_FAMILY, ObjectiveSpec.parametric(float(alpha))).argmin_set

    def test_stochastic_family_rejected_for_raw_comparison(self):
        """Test that candidates with n_xxf > 0 cannot be compared raw against reformulated."""
        noisy = Candidate("noisy", replace(TOY_EXPECTED["identity"], n_xxf=0.2))

        assert_that(is_deterministic_family(TOY_FAMILY + [noisy]), is_(False))
        with pytest.raises(StochasticCandidateError):
            raw_vs_reformulated_check(TOY_FAMILY + [noisy], 1.0)


class TestObjectiveSweep:
    """Tests for sweeping alpha and beta grids."""

    def test_toy_sweep(self):
        """Test verdicts and selections of an alpha and beta sweep over the toy channels."""
        # Act
        table = objective_sweep(TOY_FAMILY, alphas=[0.0, 0.5, 1.0], betas=[0.5, 2.0])

        # Assert
        assert_that(table.deterministic_family, is_(True))
        assert_that([row.verdict for row in table.rows],
                    contains_exactly(VERDICT_UNDEFINED, VERDICT_TRUE, VERDICT_TRUE, VERDICT_TRUE, VERDICT_TRUE))
        assert_that(table.rows[1].selection.selected, equal_to("high-bit"))
        assert_that(table.rows[2].selection.argmin_set, equal_to(("high-bit", "constant")))
        assert_that(table.rows[3].selection.selected, equal_to("constant"))
        assert_that(table.rows[0].companion, equal_to(None))

    def test_stochastic_family_beta_rows_not_applicable(self):
        """Test that beta rows of a noisy family carry no raw-vs-reformulated verdict."""
        noisy = Candidate("noisy", replace(TOY_EXPECTED["identity"], n_xxf=0.2))

        table = objective_sweep(TOY_FAMILY + [noisy], betas=[2.0])

        assert_that(table.rows[0].verdict, equal_to(VERDICT_NOT_APPLICABLE))
