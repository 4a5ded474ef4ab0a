"""
End-to-end experiment on a small motif-count benchmark

Runs for several minutes; selected with ``pytest -m slow``.
"""

import pytest
import numpy as np

from data.synth import SynthConfig, generate
from blackbox import ReferenceTrainConfig, train_reference
from sdd import TrainConfig, train
from attribution.pipeline import ExplainConfig, explain_dataset
from attribution.saliency import random_saliency
from evaluation.metrics import saliency_metrics
from evaluation.occlusion import occlusion

pytestmark = pytest.mark.slow

SEEDS = (7, 8, 9)


def _run(seed):
    """Benchmark, trained reference model, shapelet bank and explanations for one seed"""
    train_ds, test_ds = generate(SynthConfig('mcc', 'h', length=200, n_train=1000, n_test=400, seed=seed))
    model = train_reference(train_ds, ReferenceTrainConfig(seed=seed), test=test_ds)
    bank = train(train_ds, TrainConfig(n_shapelets=6, epochs=100, seed=seed))
    explanations = explain_dataset(test_ds, bank, model, ExplainConfig(seed=seed))
    return test_ds, model, [e.saliency for e in explanations]


@pytest.fixture(scope='module')
def experiments():
    return [_run(seed) for seed in SEEDS]


@pytest.fixture(scope='module')
def experiment(experiments):
    return experiments[0]


def _mean_auprc(ds, maps):
    return float(np.mean([saliency_metrics(m, ts.gt_saliency).auprc for ts, m in zip(ds, maps)]))


class TestMotifCountExperiment:
    """Acceptance checks on the trained pipeline"""

    def test_reference_model_accuracy(self, experiment):
        """Test that the black box solves the benchmark"""
        _, model, _ = experiment
        assert model.report['test_accuracy'] >= 0.9

    def test_saliency_beats_random(self, experiment):
        """Test mean AUPRC against the ground truth and a random reference"""
        ds, _, maps = experiment
        random_maps = [random_saliency(ds.length, SEEDS[0] + i) for i in range(len(ds))]
        ours = _mean_auprc(ds, maps)
        assert ours >= 0.40
        assert ours >= 2.0 * _mean_auprc(ds, random_maps)

    def test_occlusion_direction(self, experiments):
        """Test that masking the least salient quarter hurts less than the most salient, averaged over seeds"""
        gaps = []
        for ds, model, maps in experiments:
            bottom = occlusion(ds, maps, model, ratios=[0.25], order='bottom')
            top = occlusion(ds, maps, model, ratios=[0.25], order='top')
            gaps.append(bottom.auroc[0] - top.auroc[0])
        assert len(gaps) == len(SEEDS)
        assert float(np.mean(gaps)) >= 0.05


if __name__ == '__main__':
    pytest.main([__file__, '-v', '-m', 'slow'])
