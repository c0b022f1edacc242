import json

import numpy as np
import pytest

from cramer_wold.errors import InvalidArgument
from cramer_wold.io import (SCHEMA_VERSION, dump_report, load_measure, load_report, measure_from_dict,
                            measure_to_dict, save_measure, validate_report)
from cramer_wold.measures import DensityPiece, DiscreteMeasure1D, DiscreteMeasureND


def minimal_report(**overrides):
    rep = {"schema_version": SCHEMA_VERSION, "kind": "kernel_audit", "config": {}, "rows": [],
           "summary": {"passed": True, "properties": {"kernel": True}}}
    rep.update(overrides)
    return rep


class TestMeasures:
    def test_roundtrip_cloud(self, tmp_path, rng):
        m = DiscreteMeasureND(rng.standard_normal((4, 3)), rng.dirichlet(np.ones(4)), probability=True)
        back = load_measure(save_measure(m, tmp_path / "m.json"))
        assert isinstance(back, DiscreteMeasureND) and back.probability
        assert np.array_equal(back.points, m.points) and np.array_equal(back.weights, m.weights)

    def test_roundtrip_line_with_density(self, tmp_path):
        m = DiscreteMeasure1D(np.array([0.5]), np.array([-1.0]), (DensityPiece(0, 1, (0.5, 1.0)),))
        back = load_measure(save_measure(m, tmp_path / "l.json"))
        assert isinstance(back, DiscreteMeasure1D)
        assert back.atoms == m.atoms and back.pieces == m.pieces

    @pytest.mark.parametrize("bad", [
        {"dim": 2, "points": [[0, 0]]},
        {"dim": 0, "points": [], "weights": []},
        {"dim": 1, "points": [["x"]], "weights": [1]},
        {"dim": 1, "points": [[0]], "weights": [1], "density_pieces": [{"l": 0, "u": 1}]},
    ])
    def test_rejects(self, bad):
        with pytest.raises(InvalidArgument):
            measure_from_dict(bad)

    def test_density_needs_line(self):
        with pytest.raises(InvalidArgument):
            measure_from_dict({"dim": 2, "points": [], "weights": [],
                               "density_pieces": [{"l": 0, "u": 1, "coeffs": [1]}]})

    def test_probability_enforced(self):
        with pytest.raises(InvalidArgument):
            measure_from_dict({"dim": 1, "points": [[0]], "weights": [0.5], "probability": True})

    def test_dict_shape(self):
        d = measure_to_dict(DiscreteMeasureND.dirac([1.0, 2.0]))
        assert d == {"dim": 2, "points": [[1.0, 2.0]], "weights": [1.0], "probability": True}


class TestReports:
    def test_valid(self):
        assert validate_report(minimal_report())["kind"] == "kernel_audit"

    @pytest.mark.parametrize("change", [
        {"schema_version": "0.9"},
        {"rows": {}},
        {"summary": {"passed": True}},
        {"summary": {"passed": True, "properties": {"x": "yes"}}},
    ])
    def test_schema_violations(self, change):
        with pytest.raises(InvalidArgument):
            validate_report(minimal_report(**change))

    def test_missing_key(self, tmp_path):
        rep = minimal_report()
        del rep["rows"]
        path = tmp_path / "r.json"
        path.write_text(json.dumps(rep))
        with pytest.raises(InvalidArgument):
            load_report(path)

    def test_dump_sorted(self):
        text = dump_report(minimal_report())
        assert text.index('"config"') < text.index('"kind"') < text.index('"schema_version"')
