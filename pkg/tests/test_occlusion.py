"""
Unit tests for the occlusion protocol
"""

import pytest
import numpy as np
from scipy.special import expit

from core.errors import ConfigError, MissingLabel, ShapeError
from core.types import Dataset, SaliencyMap, TimeSeries
from data.synth import MotifSpec, motif_waveform
from evaluation.metrics import macro_auroc
from evaluation.occlusion import occlusion, occlusion_mask, masked_steps, DEFAULT_RATIOS


@pytest.fixture(scope='module')
def motif_test_set():
    """Class 1 carries one tall triangle; class 0 is quiet noise"""
    rng = np.random.default_rng(0)
    T, motif_len = 50, 10
    values = 0.3 * rng.standard_normal((20, T))
    saliency = np.zeros((20, T), dtype=int)
    labels = np.arange(20) % 2
    for i in np.flatnonzero(labels == 1):
        start = int(rng.integers(10, 30))
        values[i, start:start + motif_len] = motif_waveform(MotifSpec('triangle', motif_len, 3.0))
        saliency[i, start:start + motif_len] = 1
    return Dataset.from_arrays(values, labels=labels, saliency=saliency, name='motifs')


@pytest.fixture
def peak_classifier(function_classifier):
    return function_classifier(lambda X: expit(10.0 * (X.max(axis=1) - 1.5)))


def _gt_maps(ds):
    return [SaliencyMap(ts.gt_saliency.astype(float)) for ts in ds]


class TestOcclusionMask:
    """Tests for occlusion_mask"""

    def test_bottom_and_top(self):
        """Test which steps each order masks"""
        scores = np.array([0.1, 0.9, 0.5, 0.3])
        np.testing.assert_array_equal(occlusion_mask(scores, 2, 'bottom').bits, [0, 1, 1, 0])
        np.testing.assert_array_equal(occlusion_mask(scores, 1, 'top').bits, [1, 0, 1, 1])

    def test_ties_go_to_earlier_steps(self):
        """Test the stable tie-break in both orders"""
        np.testing.assert_array_equal(occlusion_mask(np.zeros(5), 2, 'bottom').bits, [0, 0, 1, 1, 1])
        np.testing.assert_array_equal(occlusion_mask(np.zeros(5), 2, 'top').bits, [0, 0, 1, 1, 1])

    def test_zero_steps(self):
        """Test that k = 0 keeps everything"""
        assert occlusion_mask(np.arange(4.0), 0).bits.all()


class TestMaskedSteps:
    """Tests for masked_steps"""

    @pytest.mark.parametrize('ratio, length, expected', [
        (0.29, 100, 29),
        (0.3, 10, 3),
        (0.7, 10, 7),
        (0.25, 10, 2),
        (0.0, 50, 0),
        (1.0, 50, 50),
    ])
    def test_floor_of_product(self, ratio, length, expected):
        """Test floor(r * T) without losing a step to rounding"""
        assert masked_steps(ratio, length) == expected

    def test_occlusion_masks_that_many_steps(self, function_classifier):
        """Test that r = 0.29 over 100 steps perturbs exactly 29 of them"""
        seen = []

        def fn(X):
            seen.append(X.copy())
            return X[:, 0] * 0

        ds = Dataset(instances=(TimeSeries(np.ones(100), label=0), TimeSeries(np.ones(100), label=1)),
                     num_classes=2)
        maps = [SaliencyMap(np.linspace(0.0, 1.0, 100))] * 2
        occlusion(ds, maps, function_classifier(fn), ratios=[0.29], baseline='zero')
        assert int((seen[0][0] == 0.0).sum()) == 29


class TestOcclusion:
    """Tests for occlusion"""

    def test_ratio_zero_is_unperturbed(self, motif_test_set, peak_classifier):
        """Test that r = 0 reproduces the plain AUROC exactly"""
        curve = occlusion(motif_test_set, _gt_maps(motif_test_set), peak_classifier, ratios=[0.0])
        plain = macro_auroc(peak_classifier.predict_proba_batch(motif_test_set.values_matrix()),
                            motif_test_set.labels())
        assert curve.auroc == (plain,)

    def test_full_zero_occlusion_is_chance(self, motif_test_set, peak_classifier):
        """Test that masking everything with zeros leaves ties only"""
        curve = occlusion(motif_test_set, _gt_maps(motif_test_set), peak_classifier,
                          ratios=[1.0], baseline='zero')
        assert curve.auroc == (0.5,)

    def test_bottom_beats_top(self, motif_test_set, peak_classifier):
        """Test that removing the motif hurts more than removing background"""
        maps = _gt_maps(motif_test_set)
        bottom = occlusion(motif_test_set, maps, peak_classifier, baseline='zero', order='bottom')
        top = occlusion(motif_test_set, maps, peak_classifier, baseline='zero', order='top')

        assert bottom.ratios == DEFAULT_RATIOS
        assert all(b >= t for b, t in zip(bottom.auroc, top.auroc))
        assert bottom.auroc[2] == 1.0
        assert top.auroc[2] < 0.9

    def test_rows(self, motif_test_set, peak_classifier):
        """Test the tabular form of a curve"""
        curve = occlusion(motif_test_set, _gt_maps(motif_test_set), peak_classifier,
                          ratios=[0.0, 0.5], order='top')
        rows = curve.rows()
        assert [r['ratio'] for r in rows] == [0.0, 0.5]
        assert all(r['order'] == 'top' and r['baseline'] == 'linear' for r in rows)

    def test_map_count_mismatch(self, motif_test_set, peak_classifier):
        """Test that every instance needs a map"""
        with pytest.raises(ShapeError):
            occlusion(motif_test_set, _gt_maps(motif_test_set)[:-1], peak_classifier)

    def test_map_length_mismatch(self, motif_test_set, peak_classifier):
        """Test that maps must match the series length"""
        maps = [SaliencyMap.zeros(49)] * len(motif_test_set)
        with pytest.raises(ShapeError):
            occlusion(motif_test_set, maps, peak_classifier)

    def test_unlabeled(self, peak_classifier):
        """Test that unlabeled instances raise MissingLabel"""
        ds = Dataset(instances=(TimeSeries(np.zeros(4), label=0), TimeSeries(np.ones(4))), num_classes=2)
        with pytest.raises(MissingLabel):
            occlusion(ds, [SaliencyMap.zeros(4)] * 2, peak_classifier)

    @pytest.mark.parametrize('kwargs', [
        {'ratios': [1.5]},
        {'baseline': 'noise'},
        {'order': 'middle'},
    ])
    def test_invalid_settings(self, motif_test_set, peak_classifier, kwargs):
        """Test that bad ratios, baselines and orders are rejected"""
        with pytest.raises(ConfigError):
            occlusion(motif_test_set, _gt_maps(motif_test_set), peak_classifier, **kwargs)


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
