"""
Unit tests for artifact and table helpers
"""

import json
import logging

import pytest
import numpy as np

from core.errors import IoError, VersionError
from core.types import SaliencyMap
from utils import (
    setup_logging,
    save_json_artifact,
    load_json_artifact,
    export_saliency_csv,
    load_saliency_csv,
    export_shapley_json,
    export_table_csv,
    format_table_csv,
)


class TestJsonArtifacts:
    """Tests for save_json_artifact and load_json_artifact"""

    def test_round_trip_is_exact(self, tmp_path):
        """Test that floats come back bit for bit"""
        doc = {'kind': 'demo', 'values': [0.1, 1 / 3, np.nextafter(1.0, 2.0)]}
        path = save_json_artifact(doc, str(tmp_path / 'sub' / 'a.json'))
        assert load_json_artifact(path, kind='demo') == doc

    def test_missing_file(self, tmp_path):
        """Test that an absent file raises IoError"""
        with pytest.raises(IoError):
            load_json_artifact(str(tmp_path / 'missing.json'))

    def test_not_json(self, tmp_path):
        """Test that garbage raises VersionError naming the path"""
        path = tmp_path / 'bad.json'
        path.write_text('{not json')
        with pytest.raises(VersionError) as exc:
            load_json_artifact(str(path))
        assert exc.value.path == str(path)

    def test_not_an_object(self, tmp_path):
        """Test that a JSON list is rejected"""
        path = tmp_path / 'list.json'
        path.write_text('[1, 2]')
        with pytest.raises(VersionError):
            load_json_artifact(str(path))

    def test_wrong_kind(self, tmp_path):
        """Test that the kind field is checked"""
        path = save_json_artifact({'kind': 'bank'}, str(tmp_path / 'bank.json'))
        with pytest.raises(VersionError):
            load_json_artifact(path, kind='reference_cnn')


class TestSaliencyCsv:
    """Tests for the saliency CSV format"""

    def test_round_trip(self, tmp_path):
        """Test that maps come back in instance order with exact scores"""
        rng = np.random.default_rng(0)
        maps = [SaliencyMap(rng.random(7)) for _ in range(3)]
        path = export_saliency_csv(maps, str(tmp_path / 'sal.csv'))
        assert load_saliency_csv(path) == maps

    def test_header(self, tmp_path):
        """Test the column layout"""
        path = export_saliency_csv([SaliencyMap([0.0, 1.0])], str(tmp_path / 'sal.csv'))
        lines = open(path).read().splitlines()
        assert lines == ['instance,t,score', '0,0,0', '0,1,1']

    def test_wrong_columns(self, tmp_path):
        """Test that another table is rejected"""
        path = tmp_path / 'other.csv'
        path.write_text('ratio,auroc\n0,1\n')
        with pytest.raises(VersionError):
            load_saliency_csv(str(path))

    def test_missing_file(self, tmp_path):
        """Test that an absent file raises IoError"""
        with pytest.raises(IoError):
            load_saliency_csv(str(tmp_path / 'missing.csv'))


class TestTables:
    """Tests for result tables and Shapley records"""

    def test_format_table(self):
        """Test that columns keep the requested order"""
        text = format_table_csv([{'aur': 0.5, 'auprc': 1.0}], ['auprc', 'aur'])
        assert text == 'auprc,aur\n1,0.5\n'

    def test_export_matches_format(self, tmp_path):
        """Test that the file and stdout forms agree"""
        rows = [{'ratio': 0.1, 'auroc': 0.75}, {'ratio': 0.2, 'auroc': 0.5}]
        path = export_table_csv(rows, str(tmp_path / 't.csv'), ['ratio', 'auroc'])
        assert open(path).read() == format_table_csv(rows, ['ratio', 'auroc'])

    def test_shapley_json(self, tmp_path):
        """Test that records are written as a JSON list"""
        records = [{'instance': 0, 'target': 1, 'segments': [], 'warning': None}]
        path = export_shapley_json(records, str(tmp_path / 'phi.json'))
        assert json.loads(open(path).read()) == records


class TestSetupLogging:
    """Tests for setup_logging"""

    def test_log_file(self, tmp_path):
        """Test that a dated log file is created in the log directory"""
        setup_logging('INFO', str(tmp_path / 'logs'))
        logging.getLogger('test').info('hello')
        for handler in logging.getLogger().handlers:
            handler.flush()
        files = list((tmp_path / 'logs').iterdir())
        assert len(files) == 1
        assert files[0].name.startswith('shapex_')
        assert 'hello' in files[0].read_text()

    def test_level(self):
        """Test that the requested level is applied to the root logger"""
        setup_logging('error')
        assert logging.getLogger().level == logging.ERROR


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
