"""
Unit tests for shapelet bank training and persistence
"""

import json
from dataclasses import replace

import pytest
import numpy as np

from core.errors import MissingLabel, VersionError, ConfigError, ShapeError
from core.types import Dataset, TimeSeries
from sdd import TrainConfig, train, save_bank, load_bank, ShapeletBank, BankHyper, encode_shapelets


@pytest.fixture(scope='module')
def toy_dataset():
    rng = np.random.default_rng(11)
    values = rng.normal(size=(24, 32))
    labels = np.arange(24) % 2
    # class 1 carries a bump in the middle
    values[labels == 1, 12:20] += 3.0
    return Dataset.from_arrays(values, labels=labels, name='toy')


@pytest.fixture(scope='module')
def small_config():
    return TrainConfig(
        n_shapelets=3, shapelet_len=8, patch_len=2, num_heads=2, d_model=8,
        lr=1e-2, batch_size=8, epochs=4, seed=5,
    )


class TestTrain:
    """Tests for train"""

    def test_history_has_one_entry_per_epoch(self, toy_dataset, small_config):
        """Test the per-epoch loss trace"""
        bank = train(toy_dataset, small_config)
        assert len(bank.history) == small_config.epochs
        assert all(np.isfinite(bank.history))

    def test_deterministic(self, toy_dataset, small_config):
        """Test that two runs with one seed give identical banks"""
        first = train(toy_dataset, small_config).to_dict()
        second = train(toy_dataset, small_config).to_dict()
        assert first == second

    def test_seed_matters(self, toy_dataset, small_config):
        """Test that a different seed gives a different bank"""
        other = replace(small_config, seed=6)
        a = encode_shapelets(train(toy_dataset, small_config))
        b = encode_shapelets(train(toy_dataset, other))
        assert not np.array_equal(a, b)

    def test_loss_decreases(self, toy_dataset):
        """Test that the objective goes down on an easy problem"""
        config = TrainConfig(
            n_shapelets=2, shapelet_len=8, patch_len=4, num_heads=1, d_model=4,
            lr=1e-2, batch_size=24, epochs=30, seed=0, use_encoder=False,
        )
        history = train(toy_dataset, config).history
        assert history[-1] < history[0]

    def test_zero_epochs(self, toy_dataset, small_config):
        """Test that epochs=0 returns the initial bank"""
        bank = train(toy_dataset, replace(small_config, epochs=0))
        assert bank.history == []

    def test_missing_label(self):
        """Test that unlabeled training data raises MissingLabel"""
        ds = Dataset(instances=(TimeSeries(np.zeros(16), label=0), TimeSeries(np.ones(16))), num_classes=2)
        with pytest.raises(MissingLabel):
            train(ds, TrainConfig(n_shapelets=2, shapelet_len=4, d_model=4, epochs=1))

    def test_invalid_optimiser_settings(self, toy_dataset):
        """Test that a non-positive learning rate is rejected"""
        with pytest.raises(ConfigError):
            train(toy_dataset, TrainConfig(lr=0.0))


class TestHyperFor:
    """Tests for TrainConfig.hyper_for"""

    def test_data_dependent_defaults(self):
        """Test the default shapelet and patch lengths"""
        hyper = TrainConfig().hyper_for(200, 2)
        assert hyper.shapelet_len == 20
        assert hyper.patch_len == 5

    def test_single_class_gets_two_outputs(self):
        """Test that the head always has at least two classes"""
        assert TrainConfig().hyper_for(100, 1).num_classes == 2

    def test_indivisible_patch(self):
        """Test that a patch length not dividing L is rejected"""
        with pytest.raises(ConfigError):
            TrainConfig(shapelet_len=10, patch_len=4).hyper_for(100, 2)


class TestBankPersistence:
    """Tests for save_bank and load_bank"""

    def test_round_trip_is_exact(self, toy_dataset, small_config, tmp_path):
        """Test that saving and loading preserves every parameter bit"""
        bank = train(toy_dataset, small_config)
        path = str(tmp_path / 'bank.json')
        save_bank(bank, path)
        loaded = load_bank(path)

        assert loaded.to_dict() == bank.to_dict()
        np.testing.assert_array_equal(encode_shapelets(loaded), encode_shapelets(bank))
        x = toy_dataset[3].values
        np.testing.assert_array_equal(loaded.activation_map(x), bank.activation_map(x))

    def test_wrong_version(self, toy_dataset, small_config, tmp_path):
        """Test that an unknown version raises VersionError"""
        doc = train(toy_dataset, replace(small_config, epochs=0)).to_dict()
        doc['version'] = 99
        path = tmp_path / 'bank.json'
        path.write_text(json.dumps(doc))
        with pytest.raises(VersionError):
            load_bank(str(path))

    def test_wrong_kind(self, tmp_path):
        """Test that another artifact kind is rejected"""
        path = tmp_path / 'bank.json'
        path.write_text(json.dumps({'version': 1, 'kind': 'reference_cnn'}))
        with pytest.raises(VersionError):
            load_bank(str(path))

    def test_malformed_document(self):
        """Test that missing fields raise VersionError"""
        with pytest.raises(VersionError):
            ShapeletBank.from_dict({'version': 1, 'kind': 'shapelet_bank', 'hyper': {}})

    def test_activation_map_checks_length(self):
        """Test that a series of the wrong length raises ShapeError"""
        bank = ShapeletBank(BankHyper(2, 4, 2, 1, 4, 2, 16))
        with pytest.raises(ShapeError):
            bank.activation_map(np.zeros(15))


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
