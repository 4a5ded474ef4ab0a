"""
Unit tests for dataset loading, saving and row validation
"""

import pytest
import numpy as np

from core.types import Dataset
from core.errors import EmptyDataset, FormatError, IoError, ParseError
from data.loader import load_dataset, save_dataset, resolve_format
from data.validator import validate_rows, validate_data_quality


def _write(path, text):
    path.write_text(text, encoding='utf-8')
    return str(path)


class TestLoadDataset:
    """Tests for load_dataset"""

    def test_basic_tsv(self, tmp_path):
        """Test a plain label-first TSV file"""
        path = _write(tmp_path / 'toy.tsv', "0\t1.5\t2.5\n1\t-1\t0\n")
        ds = load_dataset(path)

        assert len(ds) == 2
        assert ds.length == 2
        assert ds.num_classes == 2
        assert ds.name == 'toy'
        np.testing.assert_array_equal(ds.values_matrix(), [[1.5, 2.5], [-1.0, 0.0]])

    def test_csv_with_saliency(self, tmp_path):
        """Test CSV input with trailing saliency flags"""
        path = _write(tmp_path / 'toy.csv', "1,0.1,0.2,0.3,0,1,1\n")
        ds = load_dataset(path, saliency=True)

        assert ds.length == 3
        np.testing.assert_array_equal(ds[0].gt_saliency, [0, 1, 1])

    def test_comments_and_blank_lines_skipped(self, tmp_path):
        """Test that comment and blank lines are ignored"""
        path = _write(tmp_path / 'toy.tsv', "# a note\n\n0\t1\t2\n# another\n1\t3\t4\n")
        assert len(load_dataset(path)) == 2

    def test_ragged_row_names_row(self, tmp_path):
        """Test that a short row raises FormatError with its 1-based index"""
        path = _write(tmp_path / 'bad.tsv', "0\t1\t2\n1\t3\t4\n0\t5\n")
        with pytest.raises(FormatError) as exc:
            load_dataset(path)
        assert exc.value.row == 3

    def test_non_numeric_token(self, tmp_path):
        """Test that a bad token raises ParseError naming row and field"""
        path = _write(tmp_path / 'bad.tsv', "0\t1\t2\n1\tabc\t4\n")
        with pytest.raises(ParseError, match='row 2, field 2'):
            load_dataset(path)

    def test_missing_token(self, tmp_path):
        """Test that an empty field is a parse error"""
        path = _write(tmp_path / 'bad.csv', "0,1,\n")
        with pytest.raises(ParseError):
            load_dataset(path)

    def test_empty_file(self, tmp_path):
        """Test that a file without data rows raises EmptyDataset"""
        path = _write(tmp_path / 'empty.tsv', "# only a comment\n")
        with pytest.raises(EmptyDataset):
            load_dataset(path)

    def test_missing_file(self, tmp_path):
        """Test that an unreadable path raises IoError"""
        with pytest.raises(IoError):
            load_dataset(str(tmp_path / 'nope.tsv'))

    def test_unlabeled_rows(self, tmp_path):
        """Test that label -1 marks an unlabeled instance"""
        path = _write(tmp_path / 'u.tsv', "-1\t1\t2\n0\t3\t4\n")
        ds = load_dataset(path)
        assert ds[0].label is None
        assert ds[1].label == 0

    def test_unknown_format(self):
        """Test that an unknown format name is rejected"""
        with pytest.raises(FormatError):
            resolve_format('x.dat', 'parquet')


class TestSaveDataset:
    """Tests for save_dataset"""

    def test_header_restores_name_and_saliency(self, tmp_path):
        """Test that the header comment lets load_dataset detect saliency"""
        values = np.array([[0.1, 1 / 3, -2.5e-17], [np.pi, 2.0, 1e300]])
        ds = Dataset.from_arrays(values, labels=[1, 0], saliency=[[0, 1, 0], [1, 1, 0]], name='demo')
        path = str(tmp_path / 'demo.tsv')
        save_dataset(ds, path)

        assert open(path, encoding='utf-8').readline().startswith('# dataset name=demo')
        loaded = load_dataset(path)
        assert loaded == ds

    def test_header_keeps_declared_classes(self, tmp_path):
        """Test that the class count survives even if a class is absent"""
        ds = Dataset.from_arrays(np.ones((2, 2)), labels=[0, 0], num_classes=3, name='c')
        path = str(tmp_path / 'c.csv')
        save_dataset(ds, path)
        assert load_dataset(path).num_classes == 3

    @pytest.mark.parametrize('name', ['motif count test', 'a=b', '100% done', 'tab\there'])
    def test_awkward_names_round_trip(self, tmp_path, name):
        """Test that names with spaces, '=' or '%' come back unchanged"""
        ds = Dataset.from_arrays(np.ones((2, 3)), labels=[0, 1], name=name)
        path = str(tmp_path / 'named.tsv')
        save_dataset(ds, path)
        loaded = load_dataset(path)
        assert loaded.name == name
        assert loaded == ds


class TestValidateRows:
    """Tests for validate_rows and validate_data_quality"""

    def test_fractional_label(self):
        """Test that non-integral labels are rejected"""
        with pytest.raises(FormatError, match='row 1'):
            validate_rows(np.array([[0.5, 1.0, 2.0]]), saliency=False, name='x')

    def test_odd_split_with_saliency(self):
        """Test that values and flags must split evenly"""
        with pytest.raises(FormatError):
            validate_rows(np.array([[0.0, 1.0, 2.0, 1.0]]), saliency=True, name='x')

    def test_non_binary_flags(self):
        """Test that saliency flags must be binary"""
        with pytest.raises(FormatError, match='row 2'):
            validate_rows(np.array([[0, 1.0, 1], [1, 2.0, 3]]), saliency=True, name='x')

    def test_quality_stats(self):
        """Test the summary statistics"""
        ds = Dataset.from_arrays(np.zeros((4, 3)), labels=[0, 1, 1, 1], saliency=np.ones((4, 3)))
        stats = validate_data_quality(ds)
        assert stats['instances'] == 4
        assert stats['class_1'] == 3
        assert stats['saliency_prevalence'] == 1.0


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
