import pytest
from hamcrest import assert_that, close_to, equal_to, greater_than_or_equal_to

from imflow.core.layer_chain import INPUT_LAYER, ChainSettings, layer_chain
from imflow.core.mlp import MlpConfig, accuracy, bit_task, init, train

TOLERANCE = 1e-9

XOR_CONFIG = MlpConfig((4, 6, 3, 1), seed=0, learning_rate=2.0, epochs=2000, batch_size=32)


@pytest.fixture(scope="module")
def trained():
    inputs, targets = bit_task(bits=4)
    return inputs, targets, train(init(XOR_CONFIG), inputs, targets)


@pytest.mark.slow
class TestXorLayerChain:
    """Train 4-6-3-1 on bit 0 XOR bit 1 of every 4-bit input and measure the chain."""

    def test_network_learns_the_task(self, trained):
        """Test that training accuracy reaches 0.99."""
        inputs, targets, training = trained

        assert_that(len(inputs), equal_to(4096))
        assert_that(accuracy(training.model, inputs, targets), greater_than_or_equal_to(0.99))

    def test_chain_at_the_final_model(self, trained):
        """Test DPI per layer, monotone chains and the input row of the final chain."""
        inputs, targets, training = trained

        chain = layer_chain(training.model, inputs, targets, ChainSettings(epsilon=0.05))

        for entry in chain.entries:
            q = entry.analysis.quantities
            assert q.i_xyf <= q.i_xxf + TOLERANCE, entry.layer
        assert chain.monotone, [verdict for verdict in chain.chains if not verdict.holds]
        start = chain.entry(INPUT_LAYER).analysis
        assert_that(start.matrix.a, close_to(0.0, TOLERANCE))
        assert_that(start.matrix.b, close_to(start.quantities.n_xy, TOLERANCE))
        assert_that(start.matrix.c, close_to(0.0, TOLERANCE))
        assert_that(start.matrix.d, close_to(start.quantities.i_xy, TOLERANCE))

    def test_training_is_reproducible(self, trained):
        """Test that a second run with the same seed gives the same loss history."""
        inputs, targets, training = trained
        config = MlpConfig(XOR_CONFIG.layer_widths, seed=0, learning_rate=2.0, epochs=20, batch_size=32)

        first = train(init(config), inputs, targets)
        second = train(init(config), inputs, targets)

        assert_that(first.loss_history, equal_to(second.loss_history))
        assert_that(training.loss_history[-1] < training.loss_history[0], equal_to(True))
