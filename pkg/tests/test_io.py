
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from cit_filter.io import read_csv, write_csv, write_json, write_manifest
from cit_filter.params import SystemParams


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=20))
def test_csv_round_trip_is_exact(tmp_path_factory, xs):
    path = tmp_path_factory.mktemp("csv") / "x.csv"
    write_csv(path, ["x"], [(x,) for x in xs])
    assert read_csv(path)["x"].tolist() == xs


def test_json_handles_numpy_and_dataclasses(tmp_path):
    path = write_json(tmp_path / "a.json", {"p": SystemParams(G=1.0, gn_sqrt=2.0),
                                           "a": np.arange(3), "z": 1 + 2j, "f": np.float64(0.5)})
    text = path.read_text()
    assert '"gn_sqrt": 2.0' in text and "[\n    1.0,\n    2.0\n  ]" in text


def test_manifest_hashes(tmp_path):
    f = write_csv(tmp_path / "d.csv", ["a"], [(1.0,)])
    m = write_manifest(tmp_path, "fig4", {"ratio": 1.0}, {}, [f], 0.1)
    assert "d.csv" in m.read_text()
