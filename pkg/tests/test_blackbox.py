"""
Unit tests for the reference classifier and the classifier contract
"""

import json

import pytest
import numpy as np
import torch

from core.errors import ShapeError, MissingLabel, VersionError, ConfigError, ProtocolError
from core.types import Dataset, TimeSeries
from data.synth import SynthConfig, generate
from blackbox import (
    ReferenceCNN,
    BuiltinClassifier,
    ReferenceTrainConfig,
    train_reference,
    evaluate_accuracy,
    check_distribution,
    save_reference,
    load_reference,
    open_classifier,
)


@pytest.fixture
def random_handle():
    torch.manual_seed(0)
    return BuiltinClassifier(ReferenceCNN(3), series_length=40, num_classes=3)


class TestBuiltinClassifier:
    """Tests for BuiltinClassifier predictions"""

    def test_zero_weights_give_uniform_output(self):
        """Test that an all-zero network predicts 1/C everywhere"""
        network = ReferenceCNN(4)
        with torch.no_grad():
            for param in network.parameters():
                param.zero_()
        handle = BuiltinClassifier(network, series_length=20, num_classes=4)
        X = np.random.default_rng(0).normal(size=(5, 20))
        np.testing.assert_allclose(handle.predict_proba_batch(X), 0.25, atol=1e-15)

    def test_outputs_are_distributions(self, random_handle):
        """Test 100 random inputs against the probability contract"""
        X = np.random.default_rng(1).normal(scale=5.0, size=(100, 40))
        probs = random_handle.predict_proba_batch(X)
        check_distribution(probs, 3)
        assert probs.shape == (100, 3)

    def test_single_and_batch_agree(self, random_handle):
        """Test predict_proba against the batch call"""
        X = np.random.default_rng(2).normal(size=(3, 40))
        batch = random_handle.predict_proba_batch(X)
        np.testing.assert_allclose(random_handle.predict_proba(X[1]), batch[1], atol=1e-12)
        np.testing.assert_array_equal(random_handle.predict(X), batch.argmax(axis=1))

    def test_deterministic(self, random_handle):
        """Test that repeated calls give identical output"""
        x = np.random.default_rng(3).normal(size=40)
        np.testing.assert_array_equal(random_handle.predict_proba(x), random_handle.predict_proba(x))

    def test_length_mismatch(self, random_handle):
        """Test that the wrong series length raises ShapeError"""
        with pytest.raises(ShapeError):
            random_handle.predict_proba(np.zeros(39))


class TestCheckDistribution:
    """Tests for check_distribution"""

    @pytest.mark.parametrize('probs', [
        [[0.5, 0.6]],
        [[-0.1, 1.1]],
        [[1.0]],
        [[np.nan, 1.0]],
    ])
    def test_rejects(self, probs):
        """Test malformed probability rows"""
        with pytest.raises(ProtocolError):
            check_distribution(np.array(probs), 2)

    def test_accepts_within_tolerance(self):
        """Test that rounding noise below 1e-6 is accepted"""
        check_distribution(np.array([[0.3, 0.7 + 5e-7]]), 2)


class TestTrainReference:
    """Tests for train_reference"""

    def test_untrained_is_near_chance(self):
        """Test that zero epochs stay close to chance on random labels"""
        rng = np.random.default_rng(4)
        ds = Dataset.from_arrays(rng.normal(size=(200, 30)), labels=np.arange(200) % 2)
        handle = train_reference(ds, ReferenceTrainConfig(epochs=0, seed=4))
        assert abs(evaluate_accuracy(handle, ds) - 0.5) <= 0.1
        assert handle.report['epochs_run'] == 0

    def test_deterministic(self):
        """Test that one seed gives identical weights"""
        rng = np.random.default_rng(5)
        ds = Dataset.from_arrays(rng.normal(size=(40, 24)), labels=np.arange(40) % 2)
        config = ReferenceTrainConfig(epochs=3, batch_size=8, seed=1)
        assert train_reference(ds, config).to_dict() == train_reference(ds, config).to_dict()

    def test_missing_label(self):
        """Test that unlabeled data raises MissingLabel"""
        ds = Dataset(instances=(TimeSeries(np.zeros(8), label=0), TimeSeries(np.ones(8))), num_classes=2)
        with pytest.raises(MissingLabel):
            train_reference(ds, ReferenceTrainConfig(epochs=1))

    def test_invalid_config(self):
        """Test that a bad validation fraction is rejected"""
        with pytest.raises(ConfigError):
            ReferenceTrainConfig(validation_fraction=1.0).validate()

    def test_learns_motif_count(self):
        """Test accuracy on a small high-amplitude count benchmark"""
        train, test = generate(SynthConfig('mcc', 'h', length=200, n_train=1000, n_test=400, seed=7))
        handle = train_reference(train, ReferenceTrainConfig(seed=7), test=test)
        assert handle.report['test_accuracy'] >= 0.9
        assert handle.report['validation_accuracy'] is not None


class TestPersistence:
    """Tests for save_reference, load_reference and open_classifier"""

    def test_round_trip(self, random_handle, tmp_path):
        """Test that reloaded weights predict identically"""
        random_handle.report = {'train_accuracy': 0.75}
        path = str(tmp_path / 'model.json')
        save_reference(random_handle, path)
        loaded = load_reference(path)

        X = np.random.default_rng(6).normal(size=(4, 40))
        np.testing.assert_array_equal(loaded.predict_proba_batch(X), random_handle.predict_proba_batch(X))
        assert loaded.report == {'train_accuracy': 0.75}

    def test_open_builtin(self, random_handle, tmp_path):
        """Test the builtin: prefix"""
        path = str(tmp_path / 'model.json')
        save_reference(random_handle, path)
        assert open_classifier(f'builtin:{path}').kind == 'builtin'

    def test_unknown_prefix(self):
        """Test that an unknown model prefix raises ConfigError"""
        with pytest.raises(ConfigError):
            open_classifier('onnx:model.onnx')

    def test_wrong_version(self, random_handle, tmp_path):
        """Test that a stale artifact raises VersionError"""
        doc = random_handle.to_dict()
        doc['version'] = 0
        path = tmp_path / 'model.json'
        path.write_text(json.dumps(doc))
        with pytest.raises(VersionError):
            load_reference(str(path))


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
