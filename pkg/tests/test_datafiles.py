import json

import numpy as np
import pytest

from thresholdctl import Dataset, MultiLabelDataset, fit, parse_and_bind
from thresholdctl.datafiles import fit_report, load_dataset, report_schema, write_json
from thresholdctl.errors import InconsistentKeys, MissingLabelColumn, NonNumericScore, ParseError
from thresholdctl.synthetic import beta_mixture_instance


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestCsv:
    def test_well_formed(self, tmp_path):
        d = load_dataset(write(tmp_path, "a.csv", "kids,weapon,violence,label\n0.9,0.1,0.8,1\n"))
        assert isinstance(d, Dataset)
        assert (d.n_samples, d.n_subtasks) == (1, 3)
        assert d.subtask_names == ("kids", "weapon", "violence")

    def test_label_located_by_name(self, tmp_path):
        d = load_dataset(write(tmp_path, "a.csv", "label,b,a\n1,0.2,0.3\n0,0.4,0.5\n"))
        assert d.subtask_names == ("b", "a")
        np.testing.assert_array_equal(d.scores, [[0.2, 0.3], [0.4, 0.5]])
        np.testing.assert_array_equal(d.labels, [1, 0])

    def test_non_numeric(self, tmp_path):
        path = write(tmp_path, "a.csv", "kids,weapon,label\n0.9,abc,1\n")
        with pytest.raises(NonNumericScore) as info:
            load_dataset(path)
        assert (info.value.line, info.value.column) == (2, "weapon")

    def test_missing_label(self, tmp_path):
        with pytest.raises(MissingLabelColumn):
            load_dataset(write(tmp_path, "a.csv", "a,b\n0.1,0.2\n"))

    def test_ragged_row(self, tmp_path):
        with pytest.raises(ParseError) as info:
            load_dataset(write(tmp_path, "a.csv", "a,label\n0.1,1\n0.2\n"))
        assert info.value.line == 3

    def test_bad_label(self, tmp_path):
        with pytest.raises(ParseError):
            load_dataset(write(tmp_path, "a.csv", "a,label\n0.1,2\n"))

    def test_multilabel(self, tmp_path):
        d = load_dataset(write(tmp_path, "m.csv", "x,y,label_y,label_x\n0.1,0.9,1,0\n"))
        assert isinstance(d, MultiLabelDataset)
        assert d.class_names == ("x", "y")
        np.testing.assert_array_equal(d.labels, [[0, 1]])

    def test_multilabel_columns_must_match(self, tmp_path):
        with pytest.raises(ParseError):
            load_dataset(write(tmp_path, "m.csv", "x,y,label_x,label_z\n0.1,0.9,1,0\n"))

    def test_round_trip_is_exact(self, tmp_path):
        d, _ = beta_mixture_instance("s0 OR s1", seed=0)
        lines = ["s0,s1,label"] + [f"{a!r},{b!r},{int(y)}" for (a, b), y in zip(d.scores.tolist(), d.labels)]
        back = load_dataset(write(tmp_path, "d.csv", "\n".join(lines) + "\n"))
        np.testing.assert_array_equal(back.scores, d.scores)
        again = load_dataset(tmp_path / "d.csv")
        np.testing.assert_array_equal(again.scores, back.scores)


class TestJsonl:
    def test_binary(self, tmp_path):
        text = '{"scores": {"b": 0.2, "a": 0.3}, "label": 1}\n{"scores": {"a": 0.5, "b": 0.4}, "label": 0}\n'
        d = load_dataset(write(tmp_path, "a.jsonl", text))
        assert d.subtask_names == ("b", "a")
        np.testing.assert_array_equal(d.scores, [[0.2, 0.3], [0.4, 0.5]])

    def test_missing_label_line(self, tmp_path):
        text = '{"scores": {"a": 0.1}, "label": 1}\n{"scores": {"a": 0.2}}\n'
        with pytest.raises(MissingLabelColumn) as info:
            load_dataset(write(tmp_path, "a.jsonl", text))
        assert info.value.line == 2

    def test_inconsistent_keys(self, tmp_path):
        text = '{"scores": {"a": 0.1}, "label": 1}\n{"scores": {"b": 0.2}, "label": 0}\n'
        with pytest.raises(InconsistentKeys):
            load_dataset(write(tmp_path, "a.jsonl", text))

    def test_non_numeric(self, tmp_path):
        with pytest.raises(NonNumericScore):
            load_dataset(write(tmp_path, "a.jsonl", '{"scores": {"a": "x"}, "label": 1}\n'))

    def test_multilabel(self, tmp_path):
        text = '{"scores": {"x": 0.1, "y": 0.8}, "labels": {"y": 1, "x": 0}}\n'
        d = load_dataset(write(tmp_path, "a.jsonl", text))
        assert isinstance(d, MultiLabelDataset)
        np.testing.assert_array_equal(d.labels, [[0, 1]])

    def test_invalid_json(self, tmp_path):
        with pytest.raises(ParseError):
            load_dataset(write(tmp_path, "a.jsonl", "{nope\n"))


class TestReport:
    def test_schema(self, tmp_path):
        jsonschema = pytest.importorskip("jsonschema")
        d, e = beta_mixture_instance("s0 OR s1", seed=0)
        r = fit(d, e)
        report = fit_report(r, {"expression": "s0 OR s1"}, 12.5, include_trace=True)
        jsonschema.validate(report, report_schema())
        assert len(report["trace"]) == r.iterations_run + 1

    def test_write_is_bit_faithful(self, tmp_path):
        value = 0.1 + 0.2
        write_json({"v": value}, tmp_path / "out.json")
        assert json.loads((tmp_path / "out.json").read_text())["v"] == value

    def test_rejects_nan(self, tmp_path):
        with pytest.raises(ValueError):
            write_json({"v": float("nan")}, tmp_path / "out.json")
