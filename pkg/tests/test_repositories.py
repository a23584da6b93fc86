import json

import numpy as np
import pytest

import config
from exceptions import InputError
from models.report import RunReport, RunStatus
from repositories.report_repository import ReportRepository


def _document(path):
    return json.loads(path.read_text())


def test_load_returns_digest_of_bytes(spec_repository, example2_path):
    spec, digest = spec_repository.load(example2_path)
    assert digest == spec_repository.digest(example2_path.read_bytes())
    assert len(digest) == 64
    assert (spec.n, spec.m1, spec.m2, spec.N) == (2, 2, 2, 3)
    np.testing.assert_array_equal(spec.G2, [[0.5, -0.4], [-0.4, 0.5]])


def test_missing_field_is_named(spec_repository, example2_path):
    document = _document(example2_path)
    del document["G2"]
    with pytest.raises(InputError) as info:
        spec_repository.parse(json.dumps(document), source="spec.json")
    assert info.value.details["field"] == "G2"
    assert "G2" in info.value.message


def test_syntax_error_reports_line_and_column(spec_repository):
    with pytest.raises(InputError) as info:
        spec_repository.parse('{\n  "N": 3,\n  "x": [1.0,]\n}')
    assert info.value.details["line"] == 3
    assert "column" in info.value.details


def test_non_finite_entry_is_named(spec_repository, example1_path):
    text = example1_path.read_text().replace('"Q2": [[3.0]]', '"Q2": [[NaN]]')
    with pytest.raises(InputError) as info:
        spec_repository.parse(text)
    assert info.value.details["field"] == "Q2"


def test_ragged_matrix_is_an_input_error(spec_repository, example2_path):
    document = _document(example2_path)
    document["A"] = [[1.0, 0.5], [0.3]]
    with pytest.raises(InputError):
        spec_repository.parse(json.dumps(document))


def test_unreadable_file(spec_repository, tmp_path):
    with pytest.raises(InputError) as info:
        spec_repository.load(tmp_path / "absent.json")
    assert info.value.exit_code == 3


def test_spec_save_and_load(spec_repository, example2, tmp_path):
    path = tmp_path / "copy.json"
    digest = spec_repository.save(example2, path)
    spec, loaded_digest = spec_repository.load(path)
    assert digest == loaded_digest
    assert spec.to_document() == example2.to_document()


def test_report_round_trip_is_exact(tmp_path):
    rng = np.random.default_rng(0)
    report = RunReport(
        command="solve",
        spec_digest="abc",
        status=RunStatus.SOLVED,
        payload={"stages": [{"k": 0, "u": rng.standard_normal(2).tolist(), "residual": 1.2345678901234567e-17}]},
        tool_version=config.APP_VERSION
    )
    repository = ReportRepository()
    repository.save(report, tmp_path / "report.json")
    loaded = repository.load(tmp_path / "report.json")
    assert loaded == report
    assert loaded.exit_code == 0


def test_report_load_rejects_other_json(tmp_path):
    path = tmp_path / "other.json"
    path.write_text('{"hello": 1}')
    with pytest.raises(InputError):
        ReportRepository().load(path)
